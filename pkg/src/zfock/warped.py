"""Momentum-space deformation of sector-blocked operators.

Every basis tuple is a total-momentum eigenvector, so the deformation by
a skew-symmetric matrix Q acts as an explicit phase on each matrix
element.  The deformed commutator built from it closes on expansion
coefficients: nested deformed commutators of an operator with deformed
creators and annihilators reproduce the contraction-sum coefficients.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .expansion import fmn_coefficients
from .fock import RapidityGrid, sector_momentum
from .scattering import ScatteringModel
from .zops import (KernelTensor, QuadraticForm, annihilator_form, creator_form)


class GroupingWarning(UserWarning):
    """Momentum clustering merged values that were not bitwise identical."""


@dataclass(frozen=True)
class SkewSymmetricQ:
    """Skew matrix -(a / 2 mass^2) * offdiag(1, 1) entering the deformation.

    Skew means x . (Q y) = -(Q x) . y in the Minkowski pairing, so every
    momentum pairs to zero with itself.
    """

    a: float
    mass: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.mass) and self.mass > 0):
            raise ValueError("deformation needs finite a and positive mass")

    def matrix(self) -> np.ndarray:
        return -(self.a / (2.0 * self.mass**2)) * np.array([[0.0, 1.0], [1.0, 0.0]])

    def pairing(self, x: Sequence[float], y: Sequence[float]) -> float:
        """Minkowski product x . (Q y)."""
        c = -self.a / (2.0 * self.mass**2)
        return c * (float(x[0]) * float(y[1]) - float(x[1]) * float(y[0]))

    def pairing_arrays(self, x0, x1, y0, y1) -> np.ndarray:
        c = -self.a / (2.0 * self.mass**2)
        return c * (np.asarray(x0) * np.asarray(y1) - np.asarray(x1) * np.asarray(y0))

    def scaled(self, c: float) -> "SkewSymmetricQ":
        return SkewSymmetricQ(c * self.a, self.mass)

    def __neg__(self) -> "SkewSymmetricQ":
        return self.scaled(-1.0)

    def __add__(self, other: "SkewSymmetricQ") -> "SkewSymmetricQ":
        if self.mass != other.mass:
            raise ValueError("deformations carry different masses")
        return SkewSymmetricQ(self.a + other.a, self.mass)

    def scattering_model(self) -> ScatteringModel:
        """The scattering factor exp(i a sinh) generated by this deformation."""
        return ScatteringModel.sinh_exp(self.a)


def _check_mass(A: QuadraticForm, Q: SkewSymmetricQ) -> None:
    if A.grid.mass != Q.mass:
        raise ValueError("deformation mass differs from the lattice mass")


def warp(A: QuadraticForm, Q: SkewSymmetricQ) -> QuadraticForm:
    """Deformed operator: each matrix element picks up exp(i q . (Q p)).

    q and p are the total momenta of the row and column basis tuples.  This
    is the spectral sum over momentum projectors evaluated exactly, and the
    left and right orderings agree because Q is skew.
    """
    _check_mass(A, Q)
    blocks = {}
    for (l, k), mat in A.blocks.items():
        blocks[(l, k)] = _phase_block(A.grid, Q, l, k) * mat
    return QuadraticForm(A.grid, A.truncation, blocks, A.truncated)


@lru_cache(maxsize=64)
def _phase_block(grid: RapidityGrid, Q: SkewSymmetricQ, l: int, k: int) -> np.ndarray:
    q0, q1 = sector_momentum(grid, l)
    p0, p1 = sector_momentum(grid, k)
    phase = np.exp(1j * Q.pairing_arrays(q0[:, None], q1[:, None], p0[None, :], p1[None, :]))
    phase.setflags(write=False)
    return phase


def _cluster(values: np.ndarray, atol: float) -> tuple[np.ndarray, np.ndarray]:
    """Group rows of an (M, 2) array within atol; returns labels and representatives."""
    M = values.shape[0]
    labels = np.full(M, -1, dtype=int)
    order = np.lexsort((values[:, 1], values[:, 0]))
    reps = []
    current: list[int] = []

    def close(i, j):
        return (abs(values[i, 0] - values[j, 0]) <= atol
                and abs(values[i, 1] - values[j, 1]) <= atol)

    grouped = False
    for idx in order:
        if current and not close(current[-1], idx):
            for i in current:
                labels[i] = len(reps)
            reps.append(values[current].mean(axis=0))
            current = []
        current.append(idx)
    if current:
        for i in current:
            labels[i] = len(reps)
        reps.append(values[current].mean(axis=0))
    reps_arr = np.array(reps)
    for lab in range(len(reps)):
        members = values[labels == lab]
        if len(members) > 1 and (np.ptp(members[:, 0]) > 0 or np.ptp(members[:, 1]) > 0):
            grouped = True
    if grouped:
        warnings.warn("momentum values were grouped within tolerance", GroupingWarning,
                      stacklevel=3)
    return labels, reps_arr


def _momentum_clusters(grid: RapidityGrid, truncation: int,
                       rtol: float = 1e-12) -> tuple[list[np.ndarray], np.ndarray]:
    """Cluster the total momenta of all basis tuples up to the truncation.

    Returns per-sector label arrays and the representative momenta.
    """
    moms = []
    sizes = []
    for s in range(truncation + 1):
        p0, p1 = sector_momentum(grid, s)
        moms.append(np.stack([p0, p1], axis=1))
        sizes.append(len(p0))
    allmoms = np.concatenate(moms, axis=0)
    scale = max(1.0, float(np.max(np.abs(allmoms))))
    labels, reps = _cluster(allmoms, rtol * scale)
    out = []
    off = 0
    for size in sizes:
        out.append(labels[off:off + size])
        off += size
    return out, reps


def warp_spectral(A: QuadraticForm, Q: SkewSymmetricQ, side: str = "right",
                  rtol: float = 1e-12) -> QuadraticForm:
    """Deformation computed as the literal spectral sum over momentum clusters.

    ``side`` selects whether the momentum projector multiplies from the
    right or from the left; skewness of Q makes both agree with
    :func:`warp` up to clustering error.
    """
    _check_mass(A, Q)
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    labels, reps = _momentum_clusters(A.grid, A.truncation, rtol)
    blocks = {}
    for (l, k), mat in A.blocks.items():
        q0, q1 = sector_momentum(A.grid, l)
        p0, p1 = sector_momentum(A.grid, k)
        key_labels = labels[k] if side == "right" else labels[l]
        rep = reps[key_labels]  # one representative momentum per keyed index
        if side == "right":
            row = np.exp(1j * Q.pairing_arrays(q0[:, None], q1[:, None],
                                               rep[None, :, 0], rep[None, :, 1]))
            col = np.exp(-1j * Q.pairing_arrays(p0, p1, rep[:, 0], rep[:, 1]))
            blocks[(l, k)] = row * mat * col[None, :]
        else:
            row = np.exp(1j * Q.pairing_arrays(q0, q1, rep[:, 0], rep[:, 1]))
            col = np.exp(-1j * Q.pairing_arrays(p0[None, :], p1[None, :],
                                                rep[:, None, 0], rep[:, None, 1]))
            blocks[(l, k)] = row[:, None] * mat * col
    return QuadraticForm(A.grid, A.truncation, blocks, A.truncated)


@dataclass
class HomogeneousComponent:
    """Piece of an operator shifting total momentum by a fixed transfer."""

    transfer: tuple[float, float]
    form: QuadraticForm


def momentum_sector_decompose(A: QuadraticForm, rtol: float = 1e-12) -> list[HomogeneousComponent]:
    """Split an operator by momentum transfer (row momentum minus column momentum).

    The pieces sum to A exactly, and each is an eigenvector of translation
    conjugation with phase exp(i transfer . x).
    """
    records = []  # (phi0, phi1) rows aligned with a flat list of entries
    entries = []  # (block key, i, j)
    for (l, k), mat in A.blocks.items():
        q0, q1 = sector_momentum(A.grid, l)
        p0, p1 = sector_momentum(A.grid, k)
        nz = np.argwhere(mat != 0)
        for i, j in nz:
            records.append((q0[i] - p0[j], q1[i] - p1[j]))
            entries.append(((l, k), int(i), int(j)))
    if not records:
        return []
    arr = np.array(records)
    scale = max(1.0, float(np.max(np.abs(arr))))
    labels, reps = _cluster(arr, rtol * scale)
    comps: dict[int, QuadraticForm] = {}
    for (key, i, j), lab in zip(entries, labels):
        comp = comps.get(lab)
        if comp is None:
            comp = QuadraticForm(A.grid, A.truncation, {}, A.truncated)
            comps[lab] = comp
        if key not in comp.blocks:
            comp.set_block(key[0], key[1], np.zeros_like(A.blocks[key]))
        comp.blocks[key][i, j] = A.blocks[key][i, j]
    order = sorted(comps, key=lambda lab: (reps[lab][0], reps[lab][1]))
    return [HomogeneousComponent((float(reps[lab][0]), float(reps[lab][1])), comps[lab])
            for lab in order]


def q_commutator(A: QuadraticForm, B: QuadraticForm, Q: SkewSymmetricQ) -> QuadraticForm:
    """Deformed commutator: AB minus the twice-deformed reversed product."""
    back = Q.scaled(-2.0)
    fwd = Q.scaled(2.0)
    return (A @ B) - warp(warp(B, back) @ warp(A, back), fwd)


# ---------------------------------------------------------------------------
# number parity and the graded commutator


def parity_of(A: QuadraticForm) -> int | None:
    """0 for even, 1 for odd under particle-number parity, None if mixed or zero."""
    seen = set()
    for (l, k), mat in A.blocks.items():
        if np.any(mat != 0):
            seen.add((l - k) % 2)
    if len(seen) == 1:
        return seen.pop()
    return None


def parity_split(A: QuadraticForm) -> tuple[QuadraticForm, QuadraticForm]:
    """Even and odd parts under particle-number parity."""
    even = {key: mat for key, mat in A.blocks.items() if (key[0] - key[1]) % 2 == 0}
    odd = {key: mat for key, mat in A.blocks.items() if (key[0] - key[1]) % 2 == 1}
    return (QuadraticForm(A.grid, A.truncation, even, A.truncated),
            QuadraticForm(A.grid, A.truncation, odd, A.truncated))


def graded_commutator(A: QuadraticForm, B: QuadraticForm) -> QuadraticForm:
    """Commutator twisted by number parity: anticommutator when both are odd."""
    pa, pb = parity_of(A), parity_of(B)
    if pa is None or pb is None:
        raise ValueError("graded commutator needs definite-parity operators")
    sign = -1.0 if (pa and pb) else 1.0
    return (A @ B) - sign * (B @ A)


# ---------------------------------------------------------------------------
# deformed creators and the nested-commutator coefficients


@lru_cache(maxsize=None)
def _point_ladder(model: ScatteringModel, grid: RapidityGrid,
                  truncation: int) -> tuple[tuple[QuadraticForm, ...], tuple[QuadraticForm, ...]]:
    """Creator and annihilator forms at every lattice point."""
    creators = []
    annihilators = []
    for g in range(grid.size):
        e = np.zeros(grid.size, dtype=complex)
        e[g] = 1.0
        creators.append(creator_form(model, grid, truncation, e))
        annihilators.append(annihilator_form(model, grid, truncation, e))
    return tuple(creators), tuple(annihilators)


def deformed_creator(grid: RapidityGrid, truncation: int, f: np.ndarray,
                     Q: SkewSymmetricQ) -> QuadraticForm:
    """Deformation of the ordinary (symmetric) creator smeared with f."""
    return warp(creator_form(ScatteringModel.free(), grid, truncation, f), Q)


def deformed_annihilator(grid: RapidityGrid, truncation: int, f: np.ndarray,
                         Q: SkewSymmetricQ) -> QuadraticForm:
    """Deformation of the ordinary annihilator smeared with f."""
    return warp(annihilator_form(ScatteringModel.free(), grid, truncation, f), Q)


def _deformed_point_ladder(grid: RapidityGrid, truncation: int,
                           Q: SkewSymmetricQ) -> tuple[list[QuadraticForm], list[QuadraticForm]]:
    creators, annihilators = _point_ladder(ScatteringModel.free(), grid, truncation)
    return ([warp(c, Q) for c in creators], [warp(a, Q) for a in annihilators])


def deformed_vector_matrices(grid: RapidityGrid, truncation: int, Q: SkewSymmetricQ,
                             jmax: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Columns are products of deformed creators applied to the vacuum.

    The left list applies creators in slot order (slot 1 outermost), the
    right list in descending slot order, matching the contracted vectors
    of the coefficient formula.
    """
    creators, _ = _deformed_point_ladder(grid, truncation, Q)
    N = grid.size
    left = [np.ones((1, 1), dtype=complex)]
    right = [np.ones((1, 1), dtype=complex)]
    for j in range(1, jmax + 1):
        L = np.zeros((N**j, N**j), dtype=complex)
        R = np.zeros((N**j, N**j), dtype=complex)
        for g in range(N):
            block = creators[g].block(j, j - 1)
            L[:, g * N**(j - 1):(g + 1) * N**(j - 1)] = block @ left[j - 1]
            R[:, g::N] = block @ right[j - 1]
        left.append(L)
        right.append(R)
    return left, right


def deformed_fmn_coefficients(A: QuadraticForm, Q: SkewSymmetricQ, m: int,
                              n: int) -> KernelTensor:
    """Expansion coefficients of A against the deformed creator vectors.

    Exchange factors use the scattering model generated by Q, so this is
    the coefficient formula of the interacting theory realized on the
    ordinary symmetric space.
    """
    _check_mass(A, Q)
    left, right = deformed_vector_matrices(A.grid, A.truncation, Q, max(m, n))
    return fmn_coefficients(Q.scattering_model(), A, m, n, left_mats=left, right_mats=right)


def deformed_monomial(grid: RapidityGrid, truncation: int, Q: SkewSymmetricQ,
                      kernel: KernelTensor) -> QuadraticForm:
    """Sum over lattice tuples of kernel-weighted deformed creator/annihilator words."""
    creators, annihilators = _deformed_point_ladder(grid, truncation, Q)
    N = grid.size
    m, n = kernel.m, kernel.n

    def words(ops: list[QuadraticForm], depth: int) -> dict[tuple[int, ...], QuadraticForm]:
        out: dict[tuple[int, ...], QuadraticForm] = {
            (): None}  # type: ignore[dict-item]
        for _ in range(depth):
            new = {}
            for key, X in out.items():
                for g in range(N):
                    new[key + (g,)] = ops[g] if X is None else X @ ops[g]
            out = new
        return out

    lefts = words(creators, m)
    rights = words(annihilators, n)
    total = QuadraticForm(grid, truncation)
    flat = kernel.values.reshape((N,) * (m + n)) if m + n else kernel.values
    for lkey, V in lefts.items():
        for rkey, W in rights.items():
            c = complex(flat[lkey + rkey]) if (m + n) else complex(kernel.values)
            if c == 0:
                continue
            if V is None and W is None:
                from .zops import identity_form
                word = c * identity_form(ScatteringModel.free(), grid, truncation)
            elif V is None:
                word = c * W
            elif W is None:
                word = c * V
            else:
                word = c * (V @ W)
            total = total + word
    return total


def _nested_tensor(A: QuadraticForm, m: int, n: int,
                   creators: Sequence[QuadraticForm],
                   annihilators: Sequence[QuadraticForm],
                   wrap_creator: Callable[[QuadraticForm, QuadraticForm, int], QuadraticForm],
                   wrap_annihilator: Callable[[QuadraticForm, QuadraticForm, int], QuadraticForm],
                   base_parity: int = 0) -> np.ndarray:
    """Vacuum expectation of nested wraps, on every lattice tuple.

    Creator wraps nest first (last incoming slot innermost), then
    annihilator wraps (first outgoing slot innermost).  The wrap callables
    receive the running parity of the nested operand.
    """
    N = A.grid.size
    layer: dict[tuple[int, ...], QuadraticForm] = {(): A}
    parity = base_parity
    for _ in range(n):
        new = {}
        for key, X in layer.items():
            for g in range(N):
                new[(g,) + key] = wrap_creator(X, creators[g], parity)
        layer = new
        parity ^= 1
    out = np.zeros((N,) * (m + n), dtype=complex)
    for eta_key, X0 in layer.items():
        sub: dict[tuple[int, ...], QuadraticForm] = {(): X0}
        subparity = parity
        for _ in range(m):
            new = {}
            for key, X in sub.items():
                for g in range(N):
                    new[key + (g,)] = wrap_annihilator(annihilators[g], X, subparity)
            sub = new
            subparity ^= 1
        for theta_key, X in sub.items():
            blk = X.blocks.get((0, 0))
            out[theta_key + eta_key] = blk[0, 0] if blk is not None else 0.0
    return out


def _nested_family(A: QuadraticForm, total: int,
                   creators: Sequence[QuadraticForm],
                   annihilators: Sequence[QuadraticForm],
                   wrap_creator: Callable[[QuadraticForm, QuadraticForm, int], QuadraticForm],
                   wrap_annihilator: Callable[[QuadraticForm, QuadraticForm, int], QuadraticForm],
                   base_parity: int = 0) -> dict[tuple[int, int], np.ndarray]:
    """Nested-wrap vacuum tensors for every (m, n) with m + n <= total.

    Creator layers are shared between readouts, so the whole family costs
    little more than its deepest members.
    """
    N = A.grid.size
    out = {(m, n): np.zeros((N,) * (m + n), dtype=complex)
           for n in range(total + 1) for m in range(total + 1 - n)}

    def vac(X: QuadraticForm) -> complex:
        blk = X.blocks.get((0, 0))
        return complex(blk[0, 0]) if blk is not None else 0.0

    layer: dict[tuple[int, ...], QuadraticForm] = {(): A}
    parity = base_parity
    for n in range(total + 1):
        if n:
            grown = {}
            for key, X in layer.items():
                for g in range(N):
                    grown[(g,) + key] = wrap_creator(X, creators[g], parity)
            layer = grown
            parity ^= 1
        for eta_key, X0 in layer.items():
            out[(0, n)][eta_key] = vac(X0)
            sub: dict[tuple[int, ...], QuadraticForm] = {(): X0}
            subparity = parity
            for m in range(1, total + 1 - n):
                grown = {}
                for key, X in sub.items():
                    for g in range(N):
                        grown[key + (g,)] = wrap_annihilator(annihilators[g], X, subparity)
                sub = grown
                subparity ^= 1
                for theta_key, X in sub.items():
                    out[(m, n)][theta_key + eta_key] = vac(X)
    return out


def _plain_wraps():
    def wrapc(X, B, _):
        return X @ B - B @ X

    def wrapa(B, X, _):
        return B @ X - X @ B

    return wrapc, wrapa


def _graded_wraps():
    def wrapc(X, B, xparity):
        sign = -1.0 if xparity else 1.0
        return X @ B - sign * (B @ X)

    def wrapa(B, X, xparity):
        sign = -1.0 if xparity else 1.0
        return B @ X - sign * (X @ B)

    return wrapc, wrapa


def _q_wraps(Q: SkewSymmetricQ):
    def wrapc(X, B, _):
        return q_commutator(X, B, Q)

    def wrapa(B, X, _):
        return q_commutator(B, X, Q)

    return wrapc, wrapa


def nested_free_coefficients(A: QuadraticForm, m: int, n: int) -> KernelTensor:
    """Vacuum expectations of plain nested commutators with free ladder operators."""
    creators, annihilators = _point_ladder(ScatteringModel.free(), A.grid, A.truncation)
    wrapc, wrapa = _plain_wraps()
    return KernelTensor(m, n, _nested_tensor(A, m, n, creators, annihilators, wrapc, wrapa))


def nested_free_family(A: QuadraticForm, total: int) -> dict[tuple[int, int], KernelTensor]:
    """Plain nested commutator tensors for all m + n <= total, shared layers."""
    creators, annihilators = _point_ladder(ScatteringModel.free(), A.grid, A.truncation)
    wrapc, wrapa = _plain_wraps()
    raw = _nested_family(A, total, creators, annihilators, wrapc, wrapa)
    return {mn: KernelTensor(mn[0], mn[1], v) for mn, v in raw.items()}


def nested_graded_coefficients(A: QuadraticForm, m: int, n: int) -> KernelTensor:
    """Nested graded commutators with the sign-exchange ladder operators.

    A is split by number parity and each definite-parity part is nested
    with the parity-tracked graded commutator.
    """
    creators, annihilators = _point_ladder(ScatteringModel.ising(), A.grid, A.truncation)
    wrapc, wrapa = _graded_wraps()
    N = A.grid.size
    out = np.zeros((N,) * (m + n), dtype=complex)
    for part, par in zip(parity_split(A), (0, 1)):
        if not part.blocks:
            continue
        out += _nested_tensor(part, m, n, creators, annihilators, wrapc, wrapa,
                              base_parity=par)
    return KernelTensor(m, n, out)


def nested_graded_family(A: QuadraticForm, total: int) -> dict[tuple[int, int], KernelTensor]:
    """Graded nested tensors for all m + n <= total, one parity part at a time."""
    creators, annihilators = _point_ladder(ScatteringModel.ising(), A.grid, A.truncation)
    wrapc, wrapa = _graded_wraps()
    N = A.grid.size
    out = {(m, n): np.zeros((N,) * (m + n), dtype=complex)
           for n in range(total + 1) for m in range(total + 1 - n)}
    for part, par in zip(parity_split(A), (0, 1)):
        if not part.blocks:
            continue
        raw = _nested_family(part, total, creators, annihilators, wrapc, wrapa,
                             base_parity=par)
        for mn, v in raw.items():
            out[mn] += v
    return {mn: KernelTensor(mn[0], mn[1], v) for mn, v in out.items()}


def nested_q_coefficients(A: QuadraticForm, Q: SkewSymmetricQ, m: int,
                          n: int) -> KernelTensor:
    """Nested deformed commutators with deformed ladder operators."""
    _check_mass(A, Q)
    creators, annihilators = _deformed_point_ladder(A.grid, A.truncation, Q)
    wrapc, wrapa = _q_wraps(Q)
    return KernelTensor(m, n, _nested_tensor(A, m, n, creators, annihilators, wrapc, wrapa))


def nested_q_family(A: QuadraticForm, Q: SkewSymmetricQ,
                    total: int) -> dict[tuple[int, int], KernelTensor]:
    """Deformed nested tensors for all m + n <= total, shared layers."""
    _check_mass(A, Q)
    creators, annihilators = _deformed_point_ladder(A.grid, A.truncation, Q)
    wrapc, wrapa = _q_wraps(Q)
    raw = _nested_family(A, total, creators, annihilators, wrapc, wrapa)
    return {mn: KernelTensor(mn[0], mn[1], v) for mn, v in raw.items()}
