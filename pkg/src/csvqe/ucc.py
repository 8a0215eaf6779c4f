"""Factorized unitary coupled cluster circuits on sparse determinant states.

Each factor ``exp(theta (E - E^+))`` acts on a determinant as a rotation in
the two-dimensional space spanned by that determinant and its (de)excited
partner, so it can be applied exactly with one cosine and one sine.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from .exceptions import DegenerateDenominatorError
from .wavefunction import (
    ALPHA,
    BETA,
    Determinant,
    SparseWavefunction,
    SpinOrbital,
    apply_excitation,
    hf_determinant,
    truncate,
)

__all__ = [
    "UccFactor",
    "UccCircuit",
    "orbital_energies",
    "mp2_amplitudes",
    "singles_excitations",
    "build_circuit",
    "apply_factor",
    "prefix_state",
    "mp2_circuit",
    "DEFAULT_MAX_DOUBLES",
]

DEFAULT_MAX_DOUBLES = 50
DENOMINATOR_TOL = 1e-10


def _sorted_spin_orbitals(sos):
    return tuple(sorted((SpinOrbital(*so) for so in sos), key=SpinOrbital.sort_key))


class UccFactor:
    """One factor ``exp(theta (a+_a a+_b a_j a_i - h.c.))`` of the circuit."""

    __slots__ = ("holes", "particles", "theta")

    def __init__(self, holes, particles, theta=0.0):
        holes = _sorted_spin_orbitals(holes)
        particles = _sorted_spin_orbitals(particles)
        if len(holes) != len(particles) or len(holes) not in (1, 2):
            raise ValueError("a factor needs one or two holes and as many particles")
        if len(set(holes + particles)) != 2 * len(holes):
            raise ValueError(f"repeated spin-orbital in {holes} -> {particles}")
        if sorted(so.spin for so in holes) != sorted(so.spin for so in particles):
            raise ValueError(f"excitation {holes} -> {particles} does not conserve spin")
        self.holes = holes
        self.particles = particles
        self.theta = float(theta)

    @property
    def rank(self):
        return len(self.holes)

    @property
    def is_double(self):
        return self.rank == 2

    @property
    def excitation(self):
        return self.holes, self.particles

    def sort_key(self):
        return (
            tuple(so.sort_key() for so in self.holes),
            tuple(so.sort_key() for so in self.particles),
        )

    def with_theta(self, theta):
        return UccFactor(self.holes, self.particles, theta)

    def __eq__(self, other):
        return (
            isinstance(other, UccFactor)
            and self.excitation == other.excitation
            and self.theta == other.theta
        )

    def __repr__(self):
        return f"UccFactor({self})"

    def __str__(self):
        holes = ",".join(map(str, self.holes))
        particles = ",".join(map(str, self.particles))
        return f"{holes} {particles} {self.theta!r}"

    @classmethod
    def parse(cls, line):
        holes, particles, theta = line.split()
        return cls(
            [SpinOrbital.parse(t) for t in holes.split(",")],
            [SpinOrbital.parse(t) for t in particles.split(",")],
            float(theta),
        )


@dataclass(frozen=True)
class UccCircuit:
    """Ordered factors U_1 ... U_N acting on a reference determinant."""

    factors: tuple
    reference: object
    n_wf: int = 50_000

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if self.n_wf < 1:
            raise ValueError("n_wf must be >= 1")

    def __len__(self):
        return len(self.factors)

    @property
    def n_gates(self):
        return len(self.factors)

    @property
    def thetas(self):
        return np.array([f.theta for f in self.factors])

    @property
    def n_doubles(self):
        return sum(f.is_double for f in self.factors)

    def with_thetas(self, thetas):
        thetas = np.asarray(thetas, dtype=float)
        if thetas.shape != (len(self),):
            raise ValueError(f"expected {len(self)} angles, got shape {thetas.shape}")
        return UccCircuit(
            tuple(f.with_theta(t) for f, t in zip(self.factors, thetas)),
            self.reference,
            self.n_wf,
        )

    def dumps(self):
        """One ``holes particles theta`` line per factor, in circuit order."""
        ref = self.reference
        head = f"# reference {ref.alpha:x} {ref.beta:x} n_wf {self.n_wf}\n"
        return head + "".join(f"{f}\n" for f in self.factors)

    @classmethod
    def loads(cls, text, reference=None, n_wf=None):
        factors = []
        for line in text.splitlines():
            line = line.strip()
            if line.startswith("# reference"):
                _, _, a, b, _, nwf = line.split()
                reference = reference or Determinant(int(a, 16), int(b, 16))
                n_wf = n_wf or int(nwf)
            elif line and not line.startswith("#"):
                factors.append(UccFactor.parse(line))
        if reference is None:
            raise ValueError("circuit text has no reference line and none was given")
        return cls(tuple(factors), reference, n_wf or 50_000)


def orbital_energies(table):
    """Closed-shell Fock diagonal, 0-based."""
    h1, g = table.arrays()
    occ = range(table.n_electrons // 2)
    n = table.n_orbitals
    eps = np.array([h1[p, p] for p in range(n)])
    for p in range(n):
        eps[p] += sum(2 * g[p, p, j, j] - g[p, j, j, p] for j in occ)
    return eps


def mp2_amplitudes(table):
    """First-order doubles amplitudes for every distinct spin-orbital double excitation.

    Same-spin pairs (i < j, a < b) get the antisymmetrized integral
    ``(ia|jb) - (ib|ja)``; opposite-spin pairs (alpha i, a; beta j, b) get
    ``(ia|jb)``. Both are divided by ``e_i + e_j - e_a - e_b``.

    Returns
    -------
    list of UccFactor
        Doubles with ``theta`` set to the amplitude, in enumeration order.
    """
    if table.n_electrons % 2:
        raise ValueError("mp2_amplitudes requires a closed-shell table")
    h1, g = table.arrays()
    eps = orbital_energies(table)
    n_occ = table.n_electrons // 2
    occ = range(n_occ)
    vir = range(n_occ, table.n_orbitals)

    def denominator(i, j, a, b):
        d = eps[i] + eps[j] - eps[a] - eps[b]
        if abs(d) < DENOMINATOR_TOL:
            raise DegenerateDenominatorError(
                f"degenerate denominator {d:.3e} for orbitals (i, j, a, b) = {(i + 1, j + 1, a + 1, b + 1)}"
            )
        return d

    out = []
    for spin in (ALPHA, BETA):
        for i in occ:
            for j in occ:
                if j <= i:
                    continue
                for a in vir:
                    for b in vir:
                        if b <= a:
                            continue
                        t = (g[i, a, j, b] - g[i, b, j, a]) / denominator(i, j, a, b)
                        out.append(UccFactor(
                            [(i, spin), (j, spin)], [(a, spin), (b, spin)], t
                        ))
    for i in occ:
        for j in occ:
            for a in vir:
                for b in vir:
                    t = g[i, a, j, b] / denominator(i, j, a, b)
                    out.append(UccFactor([(i, ALPHA), (j, BETA)], [(a, ALPHA), (b, BETA)], t))
    return out


def singles_excitations(n_orbitals, n_alpha, n_beta):
    out = []
    for spin, n_occ in ((ALPHA, n_alpha), (BETA, n_beta)):
        for i in range(n_occ):
            for a in range(n_occ, n_orbitals):
                out.append(UccFactor([(i, spin)], [(a, spin)], 0.0))
    return out


def build_circuit(amplitudes, *, n_orbitals, reference=None, max_doubles=DEFAULT_MAX_DOUBLES,
                  include_singles=True, n_wf=50_000):
    """Assemble a circuit ordered so that the largest |theta| acts first.

    Parameters
    ----------
    amplitudes : iterable of UccFactor
        Candidate factors, usually from :func:`mp2_amplitudes`.
    n_orbitals : int
        Spatial orbital count; needed to enumerate singles.
    reference : Determinant, optional
        Defaults to the closed-shell determinant implied by the doubles.
    max_doubles : int or None
        Keep only this many largest-|theta| doubles; None keeps all.
    include_singles : bool
        Append every single excitation with theta = 0.
    """
    amplitudes = list(amplitudes)
    doubles = [f for f in amplitudes if f.is_double]
    singles = [f for f in amplitudes if not f.is_double]
    if reference is None:
        if not doubles and not singles:
            raise ValueError("cannot infer the reference determinant from an empty amplitude list")
        n_alpha = 1 + max(so.orbital for f in amplitudes for so in f.holes if so.spin == ALPHA)
        n_beta = 1 + max(so.orbital for f in amplitudes for so in f.holes if so.spin == BETA)
        reference = hf_determinant(n_alpha, n_beta)
    if max_doubles is not None:
        doubles.sort(key=lambda f: (-abs(f.theta), f.sort_key()))
        doubles = doubles[:max_doubles]
    if include_singles:
        known = {f.excitation for f in singles}
        singles += [
            f for f in singles_excitations(n_orbitals, reference.n_alpha, reference.n_beta)
            if f.excitation not in known
        ]
    factors = doubles + singles
    if not factors:
        raise ValueError("empty circuit: no doubles retained and no singles requested")
    factors.sort(key=lambda f: (-abs(f.theta), not f.is_double, f.sort_key()))
    return UccCircuit(tuple(factors), reference, n_wf)


def apply_factor(psi, factor):
    """Apply ``exp(theta (E - E^+))`` exactly, one two-level rotation per determinant."""
    c, s = cos(factor.theta), sin(factor.theta)
    holes, particles = factor.excitation
    out = {}
    for det, amp in psi.items():
        fwd = apply_excitation(det, holes, particles)
        if fwd is not None:
            image, sign = fwd
            out[det] = out.get(det, 0.0) + c * amp
            out[image] = out.get(image, 0.0) + sign * s * amp
            continue
        rev = apply_excitation(det, particles, holes)
        if rev is not None:
            image, sign = rev
            out[det] = out.get(det, 0.0) + c * amp
            out[image] = out.get(image, 0.0) - sign * s * amp
            continue
        out[det] = out.get(det, 0.0) + amp
    return SparseWavefunction(out)


def prefix_state(circuit, m):
    """State after the first ``m`` factors, truncated to ``n_wf`` after each one."""
    if not 0 <= m <= len(circuit):
        raise ValueError(f"prefix length {m} outside [0, {len(circuit)}]")
    psi = SparseWavefunction.from_determinant(circuit.reference)
    for factor in circuit.factors[:m]:
        psi = truncate(apply_factor(psi, factor), circuit.n_wf)
    return psi


def mp2_circuit(table, max_doubles=DEFAULT_MAX_DOUBLES, include_singles=True, n_wf=50_000):
    """Circuit initialized and ordered by MP2 amplitudes on the closed-shell reference."""
    reference = hf_determinant(table.n_alpha, table.n_beta)
    return build_circuit(
        mp2_amplitudes(table),
        n_orbitals=table.n_orbitals,
        reference=reference,
        max_doubles=max_doubles,
        include_singles=include_singles,
        n_wf=n_wf,
    )
