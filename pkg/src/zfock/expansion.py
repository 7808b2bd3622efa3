"""Expansion of sector-blocked operators into normal-ordered monomials.

The coefficient of the (m, n) monomial is an alternating sum over
contractions of matrix elements between partially contracted multi-creator
vectors, decorated with lattice deltas and exchange factors.  The series
reconstructs the operator exactly on the truncated space, and the
coefficients transform covariantly under translations, boosts, and the
antiunitary reflection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .contractions import (Contraction, delta_mask, enumerate_contractions,
                           r_factor_grid, s_factor_grid)
from .fock import FockState, RapidityGrid, sector_momentum
from .scattering import ScatteringModel
from .zops import (KernelTensor, QuadraticForm, create, reversal_permutation,
                   symmetrizer_matrix, zmzn_form)


@lru_cache(maxsize=None)
def left_vector_matrix(model: ScatteringModel, grid: RapidityGrid, j: int) -> np.ndarray:
    """Columns are the j-fold creator vectors, indexed row-major by the tuple."""
    out = math.sqrt(math.factorial(j)) * symmetrizer_matrix(model, grid, j)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def right_vector_matrix(model: ScatteringModel, grid: RapidityGrid, j: int) -> np.ndarray:
    """Columns are j-fold creator vectors applied in descending slot order."""
    rev = reversal_permutation(grid.size, j)
    out = np.array(left_vector_matrix(model, grid, j))[:, rev]
    out.flags.writeable = False
    return out


def point_index(grid: RapidityGrid, theta: float) -> int:
    try:
        return grid.points.index(float(theta))
    except ValueError:
        raise ValueError(f"rapidity {theta!r} is not a lattice point") from None


def contracted_vector(model: ScatteringModel, side: str, C: Contraction,
                      args: Sequence[float], grid: RapidityGrid,
                      truncation: int) -> FockState:
    """Multi-creator vector with the contracted slots omitted.

    ``args`` is the full tuple for the chosen side; only the entries at
    free slots are used.  The left vector applies creators in slot order
    (slot 1 outermost), the right vector in descending slot order.
    """
    if side == "left":
        free = [l - 1 for l in C.free_left]
        order = list(reversed(free))
        if len(args) != C.m:
            raise ValueError("argument tuple must have one entry per outgoing slot")
    elif side == "right":
        free = [r - C.m - 1 for r in C.free_right]
        order = free
        if len(args) != C.n:
            raise ValueError("argument tuple must have one entry per incoming slot")
    else:
        raise ValueError("side must be 'left' or 'right'")
    state = FockState.vacuum(grid, truncation)
    for pos in order:
        e = np.zeros(grid.size, dtype=complex)
        e[point_index(grid, args[pos])] = 1.0
        state = create(model, e, state)
    return state


def embed_reduced(C: Contraction, reduced: np.ndarray, N: int) -> np.ndarray:
    """Broadcast a tensor over the free slots of C to the full slot lattice."""
    total = C.m + C.n
    free_axes = [l - 1 for l in C.free_left] + [r - 1 for r in C.free_right]
    contracted = tuple(sorted(set(range(total)) - set(free_axes)))
    if reduced.ndim != len(free_axes):
        raise ValueError("reduced tensor rank does not match the free slots")
    expanded = np.expand_dims(reduced, contracted) if contracted else reduced
    return np.broadcast_to(expanded, (N,) * total)


def _contracted_elements(A: QuadraticForm, C: Contraction, left_mats, right_mats) -> np.ndarray:
    """Matrix elements of A between the contracted vectors, on reduced tuples."""
    mh, nh = C.m - C.size, C.n - C.size
    L = left_mats[mh]
    R = right_mats[nh]
    return (L.conj().T @ A.block(mh, nh) @ R)


def fmn_coefficients(model: ScatteringModel, A: QuadraticForm, m: int, n: int,
                     left_mats: Sequence[np.ndarray] | None = None,
                     right_mats: Sequence[np.ndarray] | None = None) -> KernelTensor:
    """Expansion coefficient with m outgoing and n incoming slots.

    Alternating sum over contractions: each term carries the lattice delta
    and exchange factor of the contraction and the matrix element of A
    between the reduced multi-creator vectors.  Custom vector matrices may
    be supplied to extract against a different creator realization.
    """
    grid = A.grid
    N = grid.size
    jmax = max(m, n)
    if left_mats is None:
        left_mats = [left_vector_matrix(model, grid, j) for j in range(jmax + 1)]
    if right_mats is None:
        right_mats = [right_vector_matrix(model, grid, j) for j in range(jmax + 1)]
    out = np.zeros((N,) * (m + n), dtype=complex)
    for C in enumerate_contractions(m, n):
        mh, nh = C.m - C.size, C.n - C.size
        M = _contracted_elements(A, C, left_mats, right_mats)
        reduced = M.reshape((N,) * (mh + nh))
        term = delta_mask(C, N) * s_factor_grid(model, grid.points, C) \
            * embed_reduced(C, reduced, N)
        out += ((-1) ** C.size) * term
    return KernelTensor(m, n, out)


@dataclass
class CoefficientFamily:
    """Expansion coefficients indexed by (outgoing, incoming) slot counts."""

    grid: RapidityGrid
    truncation: int
    entries: dict[tuple[int, int], KernelTensor] = field(default_factory=dict)

    def entry(self, m: int, n: int) -> KernelTensor:
        got = self.entries.get((m, n))
        if got is not None:
            return got
        N = self.grid.size
        return KernelTensor(m, n, np.zeros((N,) * (m + n), dtype=complex))

    def set_entry(self, kernel: KernelTensor) -> None:
        self.entries[(kernel.m, kernel.n)] = kernel


def extract_family(model: ScatteringModel, A: QuadraticForm,
                   mmax: int | None = None, nmax: int | None = None) -> CoefficientFamily:
    """All coefficients with slot counts up to the truncation (or given bounds)."""
    mmax = A.truncation if mmax is None else mmax
    nmax = A.truncation if nmax is None else nmax
    family = CoefficientFamily(A.grid, A.truncation)
    for m in range(mmax + 1):
        for n in range(nmax + 1):
            family.set_entry(fmn_coefficients(model, A, m, n))
    return family


def reconstruct(model: ScatteringModel, family: CoefficientFamily,
                truncation: int | None = None) -> QuadraticForm:
    """Sum of normal-ordered monomials weighted by 1/(m! n!)."""
    K = family.truncation if truncation is None else truncation
    total = QuadraticForm(family.grid, K)
    for (m, n), kernel in sorted(family.entries.items()):
        if m > K or n > K:
            continue
        term = zmzn_form(model, kernel, family.grid, K)
        total = total + (1.0 / (math.factorial(m) * math.factorial(n))) * term
    return total


def inversion_residual(model: ScatteringModel, A: QuadraticForm, m: int, n: int,
                       family: CoefficientFamily | None = None) -> float:
    """Defect of the inversion identity on the (m, n) matrix elements.

    The uncontracted multi-creator matrix elements of A must equal the sum
    over contractions of delta and exchange factors times the reduced
    coefficients.
    """
    grid = A.grid
    N = grid.size
    L = left_vector_matrix(model, grid, m)
    R = right_vector_matrix(model, grid, n)
    lhs = (L.conj().T @ A.block(m, n) @ R).reshape((N,) * (m + n))
    rhs = np.zeros_like(lhs)
    for C in enumerate_contractions(m, n):
        mh, nh = C.m - C.size, C.n - C.size
        if family is not None and (mh, nh) in family.entries:
            reduced = family.entry(mh, nh).values
        else:
            reduced = fmn_coefficients(model, A, mh, nh).values
        rhs += delta_mask(C, N) * s_factor_grid(model, grid.points, C) \
            * embed_reduced(C, reduced, N)
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# symmetry transformations


def translate_form(A: QuadraticForm, x: Sequence[float]) -> QuadraticForm:
    """Conjugation by the translation unitary: phases on rows and columns."""
    x = np.asarray(x, dtype=float)
    blocks = {}
    for (l, k), mat in A.blocks.items():
        q0, q1 = sector_momentum(A.grid, l)
        p0, p1 = sector_momentum(A.grid, k)
        row = np.exp(1j * (q0 * x[0] - q1 * x[1]))
        col = np.exp(-1j * (p0 * x[0] - p1 * x[1]))
        blocks[(l, k)] = row[:, None] * mat * col[None, :]
    return QuadraticForm(A.grid, A.truncation, blocks, A.truncated)


def boost_form(A: QuadraticForm, lam: float) -> QuadraticForm:
    """Conjugation by the boost: identical blocks over the shifted lattice."""
    return QuadraticForm(A.grid.shifted(lam), A.truncation,
                         {key: mat.copy() for key, mat in A.blocks.items()}, A.truncated)


def reflect_conjugate(A: QuadraticForm) -> QuadraticForm:
    """The reflected adjoint J A* J, realized blockwise.

    Its matrix elements satisfy <psi| J A* J |chi> = <J chi| A |J psi>.
    """
    N = A.grid.size
    blocks = {}
    for (k, j), mat in A.blocks.items():
        revj = reversal_permutation(N, j)
        revk = reversal_permutation(N, k)
        blocks[(j, k)] = mat.T[np.ix_(revj, revk)]
    return QuadraticForm(A.grid, A.truncation, blocks, A.truncated)


def transform_coeffs_poincare(family: CoefficientFamily, x: Sequence[float],
                              lam: float) -> CoefficientFamily:
    """Coefficient family of the Poincare-transformed operator.

    Boost part: same arrays over the lattice shifted by -lam.  Translation
    part: momentum-transfer phases evaluated on the new lattice.
    """
    x = np.asarray(x, dtype=float)
    new_grid = family.grid.shifted(lam)
    N = new_grid.size
    out = CoefficientFamily(new_grid, family.truncation)
    for (m, n), kernel in family.entries.items():
        q0, q1 = sector_momentum(new_grid, m)
        p0, p1 = sector_momentum(new_grid, n)
        row = np.exp(1j * (q0 * x[0] - q1 * x[1])).reshape((N,) * m + (1,) * n)
        col = np.exp(-1j * (p0 * x[0] - p1 * x[1])).reshape((1,) * m + (N,) * n)
        out.set_entry(KernelTensor(m, n, row * col * kernel.values))
    return out


def reflected_coeffs(model: ScatteringModel, family: CoefficientFamily,
                     m: int, n: int) -> KernelTensor:
    """Coefficient of the reflected adjoint from the original family.

    Alternating sum over contractions with the extra reflection factor;
    the reduced coefficients enter with slot groups exchanged.
    """
    grid = family.grid
    N = grid.size
    out = np.zeros((N,) * (m + n), dtype=complex)
    for C in enumerate_contractions(m, n):
        mh, nh = C.m - C.size, C.n - C.size
        g = family.entry(nh, mh).values
        reduced = g.transpose(tuple(range(nh, nh + mh)) + tuple(range(nh)))
        term = delta_mask(C, N) * s_factor_grid(model, grid.points, C) \
            * r_factor_grid(model, grid.points, C) * embed_reduced(C, reduced, N)
        out += ((-1) ** C.size) * term
    return KernelTensor(m, n, out)
