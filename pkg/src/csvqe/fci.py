"""Full configuration interaction in a fixed (n_alpha, n_beta) sector."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np
import scipy.sparse.linalg as spla

from .exceptions import CapacityError
from .hamiltonian import HamiltonianContext
from .wavefunction import Determinant, SparseWavefunction

__all__ = ["FciBasis", "enumerate_determinants", "fci_ground_energy", "DENSE_LIMIT", "MAX_DIMENSION"]

DENSE_LIMIT = 4_000
MAX_DIMENSION = 100_000


def _masks(n_orb, n_el):
    return sorted(sum(1 << p for p in occ) for occ in combinations(range(n_orb), n_el))


@dataclass(frozen=True)
class FciBasis:
    """All determinants of a sector, ordered lexicographically by (alpha, beta)."""

    n_orbitals: int
    n_alpha: int
    n_beta: int
    determinants: tuple = field(repr=False)
    index: dict = field(repr=False, compare=False)

    def __len__(self):
        return len(self.determinants)

    @property
    def alpha(self):
        return np.array([d.alpha for d in self.determinants], dtype=np.uint64)

    @property
    def beta(self):
        return np.array([d.beta for d in self.determinants], dtype=np.uint64)


def enumerate_determinants(n_orb, n_alpha, n_beta):
    if min(n_alpha, n_beta) < 0 or max(n_alpha, n_beta) > n_orb:
        raise ValueError(f"cannot place {n_alpha} alpha / {n_beta} beta electrons in {n_orb} orbitals")
    dets = tuple(
        Determinant(a, b) for a in _masks(n_orb, n_alpha) for b in _masks(n_orb, n_beta)
    )
    return FciBasis(n_orb, n_alpha, n_beta, dets, {d: i for i, d in enumerate(dets)})


def basis_for(table):
    return enumerate_determinants(table.n_orbitals, table.n_alpha, table.n_beta)


def lowest_eigenpair(hmat, v0=None, tol=1e-9, method="auto"):
    """Lowest eigenpair of a symmetric matrix.

    ``method="auto"`` diagonalizes densely up to DENSE_LIMIT and runs Lanczos
    (``eigsh``) from the unit vector on the first determinant above it;
    ``"dense"`` and ``"lanczos"`` force one path.
    """
    dim = hmat.shape[0]
    if method not in ("auto", "dense", "lanczos"):
        raise ValueError(f"unknown eigensolver method {method!r}")
    if method == "dense" or (method == "auto" and dim <= DENSE_LIMIT):
        w, v = np.linalg.eigh(hmat.toarray() if hasattr(hmat, "toarray") else np.asarray(hmat))
        energy, vec = w[0], v[:, 0]
    else:
        if v0 is None:
            v0 = np.zeros(dim)
            v0[0] = 1.0
        w, v = spla.eigsh(hmat, k=1, which="SA", v0=v0, tol=tol)
        energy, vec = w[0], v[:, 0]
    vec = vec / np.linalg.norm(vec)
    # deterministic phase: largest-magnitude component positive
    if vec[np.argmax(np.abs(vec))] < 0:
        vec = -vec
    return float(energy), vec


def fci_ground_energy(table, ctx=None):
    """Exact ground-state energy and normalized ground vector.

    Returns
    -------
    energy : float
    psi : SparseWavefunction
    """
    dim = comb(table.n_orbitals, table.n_alpha) * comb(table.n_orbitals, table.n_beta)
    if dim > MAX_DIMENSION:
        raise CapacityError(f"FCI dimension {dim} exceeds {MAX_DIMENSION}")
    basis = basis_for(table)
    ctx = ctx or HamiltonianContext(table)
    energy, vec = lowest_eigenpair(ctx.matrix(basis.determinants))
    return energy, SparseWavefunction.from_vector(vec, basis.determinants)
