"""Determinants as alpha/beta bit masks and sparse real wavefunctions over them.

Spin-orbitals are ordered with every alpha orbital (ascending) before every
beta orbital, and a determinant is the ordered product of its creators in that
order acting on the vacuum. Fermionic signs follow from that ordering alone,
so no orbital count is needed to compute them.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = [
    "ALPHA",
    "BETA",
    "SpinOrbital",
    "Determinant",
    "SparseWavefunction",
    "excitation_sign",
    "apply_excitation",
    "excitation_degree",
    "inner_product",
    "truncate",
    "hf_determinant",
]

ALPHA, BETA = 0, 1


class SpinOrbital(NamedTuple):
    orbital: int
    spin: int = ALPHA

    def __str__(self):
        return f"{self.orbital}{'ab'[self.spin]}"

    @classmethod
    def parse(cls, text):
        """Inverse of ``str``: ``"3b"`` -> SpinOrbital(3, BETA)."""
        return cls(int(text[:-1]), "ab".index(text[-1]))

    def sort_key(self):
        return (self.spin, self.orbital)


class Determinant(NamedTuple):
    """Occupation of spatial orbitals; bit p of ``alpha`` set means p holds an alpha electron."""

    alpha: int
    beta: int

    @property
    def n_alpha(self):
        return self.alpha.bit_count()

    @property
    def n_beta(self):
        return self.beta.bit_count()

    def occupied(self, spin):
        mask = self.beta if spin else self.alpha
        return [p for p in range(mask.bit_length()) if mask >> p & 1]

    def is_occupied(self, so):
        return bool((self.beta if so.spin else self.alpha) >> so.orbital & 1)


def hf_determinant(n_alpha, n_beta):
    return Determinant((1 << n_alpha) - 1, (1 << n_beta) - 1)


def _act(det, so, create):
    """Apply a single creator/annihilator; None when the result vanishes."""
    alpha, beta = det
    bit = 1 << so.orbital
    if so.spin == ALPHA:
        if bool(alpha & bit) == create:
            return None
        n_before = (alpha & (bit - 1)).bit_count()
        alpha ^= bit
    else:
        if bool(beta & bit) == create:
            return None
        n_before = alpha.bit_count() + (beta & (bit - 1)).bit_count()
        beta ^= bit
    return Determinant(alpha, beta), -1 if n_before & 1 else 1


def apply_excitation(det, holes, particles):
    """Apply ``a+_a a+_b ... a_j a_i`` with holes ``(i, j, ...)`` and particles ``(a, b, ...)``.

    Returns ``(determinant, sign)`` or None when Pauli blocking makes the
    excitation inapplicable.
    """
    sign = 1
    for so in holes:
        out = _act(det, so, create=False)
        if out is None:
            return None
        det, s = out
        sign *= s
    for so in reversed(particles):
        out = _act(det, so, create=True)
        if out is None:
            return None
        det, s = out
        sign *= s
    return det, sign


def excitation_sign(det, holes, particles):
    out = apply_excitation(det, holes, particles)
    return None if out is None else out[1]


def excitation_degree(a, b):
    return ((a.alpha ^ b.alpha).bit_count() + (a.beta ^ b.beta).bit_count()) // 2


class SparseWavefunction:
    """Real amplitudes on determinants sharing one (n_alpha, n_beta) sector.

    Exactly-zero amplitudes are never stored. Instances are treated as
    immutable; operations return new objects.
    """

    __slots__ = ("_terms", "_sector")

    def __init__(self, terms=None):
        terms = {Determinant(*d): float(c) for d, c in dict(terms or {}).items() if c != 0.0}
        sectors = {(d.n_alpha, d.n_beta) for d in terms}
        if len(sectors) > 1:
            raise ValueError(f"determinants span several electron sectors: {sorted(sectors)}")
        self._terms = terms
        self._sector = sectors.pop() if sectors else None

    @classmethod
    def from_determinant(cls, det, amplitude=1.0):
        return cls({det: amplitude})

    @property
    def terms(self):
        return self._terms

    @property
    def sector(self):
        return self._sector

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __getitem__(self, det):
        return self._terms.get(det, 0.0)

    def items(self):
        return self._terms.items()

    def __eq__(self, other):
        return isinstance(other, SparseWavefunction) and self._terms == other._terms

    def __repr__(self):
        return f"SparseWavefunction({len(self)} determinants)"

    def norm(self):
        return float(np.sqrt(sum(c * c for c in self._terms.values())))

    def scaled(self, factor):
        return SparseWavefunction({d: factor * c for d, c in self._terms.items()})

    def allclose(self, other, atol=1e-12):
        keys = self._terms.keys() | other._terms.keys()
        return all(abs(self[d] - other[d]) <= atol for d in keys)

    def to_vector(self, index):
        """Dense amplitudes over a basis given as a determinant -> position map."""
        vec = np.zeros(len(index))
        for d, c in self._terms.items():
            vec[index[d]] = c
        return vec

    @classmethod
    def from_vector(cls, vector, determinants):
        return cls({determinants[i]: vector[i] for i in np.flatnonzero(vector)})

    def dumps(self):
        """One ``alpha_hex beta_hex amplitude`` line per determinant, largest |amplitude| first."""
        rows = sorted(self._terms.items(), key=lambda kv: (-abs(kv[1]), kv[0]))
        return "".join(f"{d.alpha:x} {d.beta:x} {c!r}\n" for d, c in rows)

    @classmethod
    def loads(cls, text):
        terms = {}
        for line in text.splitlines():
            if line.strip():
                a, b, c = line.split()
                terms[Determinant(int(a, 16), int(b, 16))] = float(c)
        return cls(terms)


def _check_sectors(a, b):
    if a.sector is not None and b.sector is not None and a.sector != b.sector:
        raise ValueError(f"electron sectors differ: {a.sector} vs {b.sector}")


def inner_product(a, b):
    _check_sectors(a, b)
    if len(b) < len(a):
        a, b = b, a
    # sum in a fixed determinant order so that <a|b> == <b|a> bit for bit
    shared = sorted(a.terms.keys() & b.terms.keys())
    return float(sum(a[d] * b[d] for d in shared))


def truncate(psi, n_wf):
    """Keep the ``n_wf`` largest-magnitude amplitudes; ties keep the smaller determinant.

    Amplitudes are not renormalized.
    """
    if n_wf < 1:
        raise ValueError("n_wf must be >= 1")
    if len(psi) <= n_wf:
        return psi
    ranked = sorted(psi.items(), key=lambda kv: (-abs(kv[1]), kv[0]))
    return SparseWavefunction(dict(ranked[:n_wf]))
