"""Deterministic random inputs for verification runs.

Generators are counter-based (Philox) and keyed by a seed together with
string labels and an instance index, so any check can be reproduced in
isolation without replaying the runs before it.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .fock import FockState, RapidityGrid
from .scattering import ScatteringModel
from .zops import KernelTensor, QuadraticForm, symmetrizer_matrix


def keyed_rng(seed: int, *labels) -> np.random.Generator:
    """Philox generator keyed by the seed and a label path."""
    digest = hashlib.blake2b(
        ("/".join(str(x) for x in (seed,) + labels)).encode(), digest_size=16
    ).digest()
    key = np.frombuffer(digest, dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _complex(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_kernel(grid: RapidityGrid, m: int, n: int, rng: np.random.Generator) -> KernelTensor:
    N = grid.size
    return KernelTensor(m, n, _complex(rng, (N,) * (m + n)))


def random_form(model: ScatteringModel, grid: RapidityGrid, truncation: int,
                rng: np.random.Generator, kmax: int | None = None) -> QuadraticForm:
    """Dense random operator supported on the symmetric subspace.

    Blocks up to ``kmax`` (default: the truncation) are drawn complex
    gaussian and sandwiched between sector symmetrizers.
    """
    kmax = truncation if kmax is None else kmax
    N = grid.size
    blocks = {}
    for l in range(kmax + 1):
        Pl = symmetrizer_matrix(model, grid, l)
        for k in range(kmax + 1):
            Pk = symmetrizer_matrix(model, grid, k)
            blocks[(l, k)] = Pl @ _complex(rng, (N**l, N**k)) @ Pk
    return QuadraticForm(grid, truncation, blocks)


def random_state(model: ScatteringModel, grid: RapidityGrid, truncation: int,
                 rng: np.random.Generator) -> FockState:
    """Random state with S-symmetric sectors."""
    from .scattering import symmetrize

    N = grid.size
    sectors = []
    for n in range(truncation + 1):
        raw = _complex(rng, (N,) * n)
        sectors.append(symmetrize(model, raw, grid.points) if n >= 2 else raw)
    return FockState(grid, sectors)
