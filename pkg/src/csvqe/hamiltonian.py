"""Slater-Condon matrix elements between determinants and sparse states."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .wavefunction import (
    ALPHA,
    BETA,
    SpinOrbital,
    _check_sectors,
    apply_excitation,
    excitation_degree,
    inner_product,
)

__all__ = [
    "HamiltonianContext",
    "diagonal_element",
    "offdiagonal_element",
    "transition_element",
    "rayleigh_quotient",
]


def _spin_orbitals(mask, spin):
    return [SpinOrbital(p, spin) for p in range(mask.bit_length()) if mask >> p & 1]


def _difference(a, b):
    """Spin-orbitals occupied in ``b`` but not ``a`` (holes) and vice versa (particles)."""
    holes = _spin_orbitals(b.alpha & ~a.alpha, ALPHA) + _spin_orbitals(b.beta & ~a.beta, BETA)
    particles = _spin_orbitals(a.alpha & ~b.alpha, ALPHA) + _spin_orbitals(a.beta & ~b.beta, BETA)
    return holes, particles


class HamiltonianContext:
    """Electronic Hamiltonian of an :class:`~csvqe.integrals.IntegralTable`.

    Matrix elements use the dense 0-based integral arrays of the table, with
    determinant bit ``p`` standing for spatial orbital ``p + 1`` of the file.
    """

    def __init__(self, table):
        self.table = table
        self.h1, self.eri = table.arrays()
        n = table.n_orbitals
        idx = np.arange(n)
        self.coulomb = self.eri[idx[:, None], idx[:, None], idx[None, :], idx[None, :]]
        self.exchange = self.eri[idx[:, None], idx[None, :], idx[None, :], idx[:, None]]

    @property
    def n_orbitals(self):
        return self.table.n_orbitals

    def _check(self, det):
        limit = 1 << self.n_orbitals
        if det.alpha >= limit or det.beta >= limit:
            raise ValueError(f"{det} addresses orbitals beyond n_orbitals={self.n_orbitals}")

    def diagonal_element(self, d):
        self._check(d)
        oa = d.occupied(ALPHA)
        ob = d.occupied(BETA)
        J, K = self.coulomb, self.exchange
        e = self.table.core_energy
        e += self.h1[oa, oa].sum() + self.h1[ob, ob].sum()
        for occ in (oa, ob):
            e += 0.5 * (J[np.ix_(occ, occ)].sum() - K[np.ix_(occ, occ)].sum())
        e += J[np.ix_(oa, ob)].sum()
        return float(e)

    def offdiagonal_element(self, a, b):
        """<a|H|b> for distinct determinants."""
        if a == b:
            raise ValueError("offdiagonal_element needs distinct determinants; use diagonal_element")
        self._check(a)
        self._check(b)
        degree = excitation_degree(a, b)
        if degree > 2:
            return 0.0
        holes, particles = _difference(a, b)
        if len(holes) != len(particles):
            return 0.0
        out = apply_excitation(b, holes, particles)
        sign = out[1]
        g = self.eri
        if degree == 1:
            (i,), (p,) = holes, particles
            if i.spin != p.spin:
                return 0.0
            oi, op = i.orbital, p.orbital
            value = self.h1[oi, op]
            same = b.occupied(i.spin)
            other = b.occupied(1 - i.spin)
            for m in same:
                if m != oi:
                    value += g[oi, op, m, m] - g[oi, m, m, op]
            for m in other:
                value += g[oi, op, m, m]
            return float(sign * value)
        i, j = holes
        p, q = particles
        value = 0.0
        if i.spin == p.spin and j.spin == q.spin:
            value += g[i.orbital, p.orbital, j.orbital, q.orbital]
        if i.spin == q.spin and j.spin == p.spin:
            value -= g[i.orbital, q.orbital, j.orbital, p.orbital]
        return float(sign * value)

    def element(self, a, b):
        return self.diagonal_element(a) if a == b else self.offdiagonal_element(a, b)

    def transition_element(self, a, b):
        """<a|H|b> for sparse states, summed over determinant pairs within two excitations."""
        _check_sectors(a, b)
        total = 0.0
        for da, ca in sorted(a.items()):
            for db, cb in sorted(b.items()):
                if excitation_degree(da, db) <= 2:
                    total += ca * self.element(da, db) * cb
        return total

    def rayleigh_quotient(self, psi):
        norm2 = inner_product(psi, psi)
        if norm2 == 0.0:
            raise ValueError("rayleigh_quotient of a zero-norm state")
        return self.transition_element(psi, psi) / norm2

    def matrix(self, determinants):
        """Symmetric CSR Hamiltonian over an ordered determinant list.

        Connected pairs are screened with vectorized popcounts before the
        Slater-Condon rules are evaluated.
        """
        dets = list(determinants)
        n = len(dets)
        alpha = np.array([d.alpha for d in dets], dtype=np.uint64)
        beta = np.array([d.beta for d in dets], dtype=np.uint64)
        rows, cols, vals = [], [], []
        for i, d in enumerate(dets):
            rows.append(i)
            cols.append(i)
            vals.append(self.diagonal_element(d))
            if i + 1 == n:
                break
            diff = np.bitwise_count(alpha[i + 1:] ^ alpha[i]) + np.bitwise_count(beta[i + 1:] ^ beta[i])
            for j in np.flatnonzero(diff <= 4) + i + 1:
                v = self.offdiagonal_element(dets[j], d)
                if v != 0.0:
                    rows += [i, j]
                    cols += [j, i]
                    vals += [v, v]
        return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def diagonal_element(ctx, d):
    return ctx.diagonal_element(d)


def offdiagonal_element(ctx, a, b):
    return ctx.offdiagonal_element(a, b)


def transition_element(ctx, a, b):
    return ctx.transition_element(a, b)


def rayleigh_quotient(ctx, psi):
    return ctx.rayleigh_quotient(psi)
