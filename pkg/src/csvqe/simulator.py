"""Vectorized circuit simulation over the full determinant sector.

Every system handled here fits its whole (n_alpha, n_beta) sector in memory,
so states are stored as dense vectors indexed by :class:`~csvqe.fci.FciBasis`
position. Because the basis is sorted like :class:`Determinant` tuples, the
index order doubles as the truncation tie-break order, and results match the
dictionary-based path in :mod:`csvqe.ucc` exactly.
"""
from __future__ import annotations

from math import cos, sin

import numpy as np

from .fci import basis_for, lowest_eigenpair
from .hamiltonian import HamiltonianContext
from .wavefunction import ALPHA, SparseWavefunction

__all__ = ["SectorSimulator", "truncate_vector"]


def truncate_vector(vec, n_wf):
    """Zero all but the ``n_wf`` largest-|amplitude| entries (ties keep the lower index)."""
    if np.count_nonzero(vec) <= n_wf:
        return vec
    order = np.lexsort((np.arange(vec.size), -np.abs(vec)))
    out = np.zeros_like(vec)
    keep = order[:n_wf]
    out[keep] = vec[keep]
    return out


class SectorSimulator:
    """Circuit states, energies and the Hamiltonian matrix for one integral table.

    Parameters
    ----------
    table : IntegralTable
    ctx : HamiltonianContext, optional
        Reused when given, so element caches and arrays are shared.
    """

    def __init__(self, table, ctx=None):
        self.table = table
        self.ctx = ctx or HamiltonianContext(table)
        self.basis = basis_for(table)
        self._alpha = self.basis.alpha
        self._beta = self.basis.beta
        n = table.n_orbitals
        self._shift = np.uint64(n)
        self._keys = (self._alpha << self._shift) | self._beta if n <= 32 else None
        self._maps = {}
        self._hamiltonian = None
        self._fci = None

    @property
    def dim(self):
        return len(self.basis)

    @property
    def hamiltonian(self):
        if self._hamiltonian is None:
            self._hamiltonian = self.ctx.matrix(self.basis.determinants)
        return self._hamiltonian

    def fci(self):
        """``(energy, vector)`` of the exact ground state, computed once."""
        if self._fci is None:
            self._fci = lowest_eigenpair(self.hamiltonian)
        return self._fci

    @property
    def fci_energy(self):
        return self.fci()[0]

    def reference_vector(self, det):
        vec = np.zeros(self.dim)
        vec[self.basis.index[det]] = 1.0
        return vec

    def to_sparse(self, vec):
        return SparseWavefunction.from_vector(vec, self.basis.determinants)

    def from_sparse(self, psi):
        return psi.to_vector(self.basis.index)

    def _lookup(self, alpha, beta):
        if self._keys is not None:
            return np.searchsorted(self._keys, (alpha << self._shift) | beta)
        index = self.basis.index
        return np.array([index[(int(a), int(b))] for a, b in zip(alpha, beta)], dtype=np.intp)

    def factor_map(self, factor):
        """Source indices, target indices and signs where the forward excitation applies."""
        key = factor.excitation
        if key in self._maps:
            return self._maps[key]
        alpha = self._alpha.copy()
        beta = self._beta.copy()
        ok = np.ones(self.dim, dtype=bool)
        parity = np.zeros(self.dim, dtype=np.int64)
        ops = [(so, False) for so in factor.holes] + [(so, True) for so in reversed(factor.particles)]
        for so, create in ops:
            bit = np.uint64(1 << so.orbital)
            below = np.uint64((1 << so.orbital) - 1)
            if so.spin == ALPHA:
                occupied = (alpha & bit) != 0
                parity += np.bitwise_count(alpha & below)
                alpha = alpha ^ bit
            else:
                occupied = (beta & bit) != 0
                parity += np.bitwise_count(alpha) + np.bitwise_count(beta & below)
                beta = beta ^ bit
            ok &= occupied != create
        src = np.flatnonzero(ok)
        dst = self._lookup(alpha[src], beta[src])
        sign = np.where(parity[src] % 2 == 1, -1.0, 1.0)
        self._maps[key] = (src, dst, sign)
        return self._maps[key]

    def apply(self, vec, factor):
        src, dst, sign = self.factor_map(factor)
        c, s = cos(factor.theta), sin(factor.theta)
        out = vec.copy()
        ss = sign * s
        out[src] = c * vec[src] - ss * vec[dst]
        out[dst] = c * vec[dst] + ss * vec[src]
        return out

    def run(self, circuit, m=None, keep_all=False):
        """Prefix state after ``m`` factors (default all); with ``keep_all`` every prefix as columns."""
        m = len(circuit) if m is None else m
        if not 0 <= m <= len(circuit):
            raise ValueError(f"prefix length {m} outside [0, {len(circuit)}]")
        vec = self.reference_vector(circuit.reference)
        states = [vec] if keep_all else None
        for factor in circuit.factors[:m]:
            vec = truncate_vector(self.apply(vec, factor), circuit.n_wf)
            if keep_all:
                states.append(vec)
        return np.column_stack(states) if keep_all else vec

    def prefix_states(self, circuit):
        """Matrix whose column ``k`` is the prefix state after ``k`` factors."""
        return self.run(circuit, keep_all=True)

    def expectation(self, vec):
        norm2 = vec @ vec
        if norm2 == 0.0:
            raise ValueError("expectation value of a zero vector")
        return float(vec @ (self.hamiltonian @ vec) / norm2)

    def energy(self, circuit):
        return self.expectation(self.run(circuit))
