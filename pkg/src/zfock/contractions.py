"""Contraction combinatorics for mixed creator/annihilator monomials.

A contraction pairs some outgoing slots (1..m) with incoming slots
(m+1..m+n).  Each carries a lattice delta factor, an exchange factor
accumulated by pulling the paired slots together, and a reflection
factor used by the conjugate-coefficient identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .scattering import Permutation, ScatteringModel, _axis, pair_values


@dataclass(frozen=True)
class Contraction:
    """Pairing of distinct outgoing slots with distinct incoming slots.

    Pairs (l, r) satisfy 1 <= l <= m < r <= m+n and are stored sorted by r.
    """

    m: int
    n: int
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        pairs = tuple(sorted((tuple(p) for p in self.pairs), key=lambda p: p[1]))
        lefts = [l for l, _ in pairs]
        rights = [r for _, r in pairs]
        if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
            raise ValueError("contracted slots must be pairwise distinct")
        for l, r in pairs:
            if not (1 <= l <= self.m < r <= self.m + self.n):
                raise ValueError(f"pair {(l, r)} out of range for ({self.m},{self.n})")
        object.__setattr__(self, "pairs", pairs)

    @property
    def size(self) -> int:
        return len(self.pairs)

    @property
    def free_left(self) -> tuple[int, ...]:
        used = {l for l, _ in self.pairs}
        return tuple(i for i in range(1, self.m + 1) if i not in used)

    @property
    def free_right(self) -> tuple[int, ...]:
        used = {r for _, r in self.pairs}
        return tuple(i for i in range(self.m + 1, self.m + self.n + 1) if i not in used)

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "pairs": [list(p) for p in self.pairs]}

    @classmethod
    def from_json(cls, data: dict) -> "Contraction":
        return cls(int(data["m"]), int(data["n"]),
                   tuple((int(l), int(r)) for l, r in data["pairs"]))


@lru_cache(maxsize=None)
def enumerate_contractions(m: int, n: int) -> tuple[Contraction, ...]:
    """All contractions of (m, n), the empty one first."""
    out = []
    for k in range(min(m, n) + 1):
        for rights in itertools.combinations(range(m + 1, m + n + 1), k):
            for lefts in itertools.permutations(range(1, m + 1), k):
                out.append(Contraction(m, n, tuple(zip(lefts, rights))))
    return tuple(sorted(out, key=lambda c: (c.size, c.pairs)))


def delta_pairs(C: Contraction, theta: Sequence[float], eta: Sequence[float]) -> int:
    """Product of lattice deltas over the contracted pairs: 1 on support, else 0."""
    if len(theta) != C.m or len(eta) != C.n:
        raise ValueError("tuple lengths do not match the contraction")
    return int(all(theta[l - 1] == eta[r - C.m - 1] for l, r in C.pairs))


def delta_mask(C: Contraction, N: int) -> np.ndarray:
    """Boolean support tensor over the (m+n)-slot lattice."""
    total = C.m + C.n
    out = np.ones((N,) * total, dtype=bool)
    for l, r in C.pairs:
        out = out & (_axis(N, total, l - 1) == _axis(N, total, r - 1))
    return out


def _crossed(a: int, b: int, m: int) -> bool:
    """Whether exactly one of the two concatenated-slot indices is outgoing."""
    return (a <= m) != (b <= m)


def _factor_indices(C: Contraction) -> list[tuple[int, int]]:
    """Concatenated-slot index pairs (a, b) whose S(xi_a - xi_b) values multiply.

    Crossed pairs enter with swapped arguments.  First the sweep factors of
    each contracted pair over the slots strictly between its ends, then one
    factor per nested pair combination.
    """
    out = []
    for l, r in C.pairs:
        for p in range(l + 1, r):
            a, b = p, l
            if _crossed(a, b, C.m):
                a, b = b, a
            out.append((a, b))
    for (li, ri), (lj, rj) in itertools.combinations(C.pairs, 2):
        # pairs are sorted by r, so ri < rj; nested combination needs li < lj
        if li < lj:
            a, b = lj, ri
            if _crossed(a, b, C.m):
                a, b = b, a
            out.append((a, b))
    return out


def s_c_factor(model: ScatteringModel, C: Contraction, theta: Sequence[float],
               eta: Sequence[float]) -> complex:
    """Exchange factor of the contraction at one lattice tuple."""
    xi = tuple(theta) + tuple(eta)
    out = 1.0 + 0.0j
    for a, b in _factor_indices(C):
        out *= model.value(xi[a - 1] - xi[b - 1])
    return out


def s_factor_grid(model: ScatteringModel, points: Sequence[float], C: Contraction) -> np.ndarray:
    """Exchange factor on every lattice tuple; shape (N,)*(m+n)."""
    N = len(points)
    total = C.m + C.n
    mat = pair_values(model, points)
    out = np.ones((N,) * total, dtype=complex)
    for a, b in _factor_indices(C):
        out = out * mat[_axis(N, total, a - 1), _axis(N, total, b - 1)]
    return out


def r_c_factor(model: ScatteringModel, C: Contraction, theta: Sequence[float],
               eta: Sequence[float]) -> complex:
    """Reflection factor: product over pairs of (1 - full exchange sweep of the left slot).

    The sweep runs over every concatenated slot including the left slot
    itself, so the S(0) value participates.
    """
    xi = tuple(theta) + tuple(eta)
    out = 1.0 + 0.0j
    for l, _ in C.pairs:
        sweep = 1.0 + 0.0j
        for p in range(1, C.m + C.n + 1):
            a, b = l, p
            if _crossed(a, b, C.m):
                a, b = b, a
            sweep *= model.value(xi[a - 1] - xi[b - 1])
        out *= 1.0 - sweep
    return out


def r_factor_grid(model: ScatteringModel, points: Sequence[float], C: Contraction) -> np.ndarray:
    """Reflection factor on every lattice tuple; shape (N,)*(m+n)."""
    N = len(points)
    total = C.m + C.n
    mat = pair_values(model, points)
    out = np.ones((N,) * total, dtype=complex)
    for l, _ in C.pairs:
        sweep = np.ones((N,) * total, dtype=complex)
        for p in range(1, total + 1):
            a, b = l, p
            if _crossed(a, b, C.m):
                a, b = b, a
            sweep = sweep * mat[_axis(N, total, a - 1), _axis(N, total, b - 1)]
        out = out * (1.0 - sweep)
    return out


def compose(C: Contraction, D: Contraction) -> Contraction:
    """Union of C with a contraction D of the slots left free by C.

    D is renumbered: its outgoing index i means the i-th free outgoing slot
    of C, and likewise on the incoming side.
    """
    c = C.size
    if (D.m, D.n) != (C.m - c, C.n - c):
        raise ValueError("inner contraction does not match the free slots")
    fl, fr = C.free_left, C.free_right
    lifted = tuple((fl[l - 1], fr[r - D.m - 1]) for l, r in D.pairs)
    return Contraction(C.m, C.n, C.pairs + lifted)


def reflect_contraction(C: Contraction) -> Contraction:
    """Swap the roles of the slot groups: (l, r) becomes (r - m, l + n)."""
    return Contraction(C.n, C.m, tuple((r - C.m, l + C.n) for l, r in C.pairs))


def sigma_rho(C: Contraction) -> tuple[Permutation, Permutation]:
    """Group permutations that reorder each side so the contracted slots meet.

    On the delta support the exchange factor splits as the outgoing-side
    factor of sigma times the incoming-side factor of rho.
    """
    fl, fr = C.free_left, C.free_right
    sigma = Permutation(fl + tuple(l for l, _ in C.pairs))
    rho = Permutation(tuple(r - C.m for _, r in reversed(C.pairs))
                      + tuple(r - C.m for r in fr))
    return sigma, rho
