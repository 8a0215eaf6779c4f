"""Circuit-subspace energies from mid-circuit states.

The states produced after each prefix of a circuit span a subspace; the
Hamiltonian projected onto (a selection of) those states defines a small
generalized eigenvalue problem whose lowest root never lies above the energy
of any included state, in particular the final circuit state.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .exceptions import DegenerateOverlapError
from .ucc import prefix_state
from .wavefunction import inner_product

__all__ = [
    "STRATEGIES",
    "SelectionStrategy",
    "SubspaceProblem",
    "GepSolution",
    "CircuitSubspace",
    "select_states",
    "build_subspace_problem",
    "solve_gep",
    "csvqe_energy",
    "random_search",
    "sample_index_sets",
    "sample_statistics",
    "DEFAULT_THRESHOLD",
]

DEFAULT_THRESHOLD = 1e-10
STRATEGIES = ("even", "front_loaded", "back_loaded", "random")


@dataclass(frozen=True)
class SelectionStrategy:
    kind: str
    m: int
    seed: int = 0

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ValueError(f"unknown selection strategy {self.kind!r}; expected one of {STRATEGIES}")


def select_states(strategy, n):
    """Sorted indices of the prefix states to keep; always contains ``n``.

    Parameters
    ----------
    strategy : SelectionStrategy
    n : int
        Number of gates; prefix states are indexed 0..n.
    """
    m = strategy.m
    if m < 1:
        raise ValueError("subspace size must be >= 1")
    if m > n + 1:
        raise ValueError(f"subspace size {m} exceeds the {n + 1} available states")
    if m == 1:
        return [n]
    kind = strategy.kind
    if kind == "even":
        picked = {k * n // (m - 1) for k in range(m - 1)} | {n}
        fill = (i for i in range(n + 1) if i not in picked)
        while len(picked) < m:
            picked.add(next(fill))
        return sorted(picked)
    if kind == "back_loaded":
        return list(range(n - m + 1, n + 1))
    if kind == "front_loaded":
        return list(range(m - 1)) + [n]
    rng = np.random.default_rng(strategy.seed)
    return sorted(rng.choice(n, size=m - 1, replace=False).tolist()) + [n]


@dataclass(frozen=True)
class SubspaceProblem:
    h: np.ndarray
    s: np.ndarray
    state_indices: tuple

    @property
    def size(self):
        return len(self.state_indices)


@dataclass(frozen=True)
class GepSolution:
    energy: float
    coefficients: np.ndarray
    retained_rank: int
    state_indices: tuple = ()


def solve_gep(problem, threshold=DEFAULT_THRESHOLD):
    """Lowest root of ``h x = E s x`` after projecting out overlap eigenvalues <= ``threshold``.

    Canonical orthogonalization: with ``s = U diag(w) U^T`` and ``X = U_r w_r^{-1/2}``
    over the retained eigenpairs, diagonalize ``X^T h X`` and map the lowest
    eigenvector back through ``X``.
    """
    w, u = np.linalg.eigh(problem.s)
    keep = w > threshold
    rank = int(keep.sum())
    if rank == 0:
        raise DegenerateOverlapError(
            f"no overlap eigenvalue above {threshold:g} (largest {w.max():.3e})"
        )
    x = u[:, keep] / np.sqrt(w[keep])
    hr = x.T @ problem.h @ x
    e, c = np.linalg.eigh(0.5 * (hr + hr.T))
    return GepSolution(float(e[0]), x @ c[:, 0], rank, tuple(problem.state_indices))


def build_subspace_problem(ctx, circuit, indices):
    """Subspace matrices from the dictionary-based state path (reference implementation)."""
    indices = tuple(indices)
    if not indices:
        raise ValueError("no states selected")
    states = [prefix_state(circuit, i) for i in indices]
    m = len(states)
    h = np.zeros((m, m))
    s = np.zeros((m, m))
    for i in range(m):
        for j in range(i, m):
            h[i, j] = h[j, i] = ctx.transition_element(states[i], states[j])
            s[i, j] = s[j, i] = inner_product(states[i], states[j])
    return SubspaceProblem(h, s, indices)


class CircuitSubspace:
    """All prefix states of one circuit, with their full H and S matrices.

    Any selection of states is then a principal submatrix, so sampling many
    index sets costs one small eigensolve each.
    """

    def __init__(self, sim, circuit):
        self.sim = sim
        self.circuit = circuit
        self.states = sim.prefix_states(circuit)
        hv = sim.hamiltonian @ self.states
        h = self.states.T @ hv
        s = self.states.T @ self.states
        self.h = np.triu(h) + np.triu(h, 1).T
        self.s = np.triu(s) + np.triu(s, 1).T

    @property
    def n_gates(self):
        return len(self.circuit)

    @property
    def vqe_energy(self):
        n = self.n_gates
        return float(self.h[n, n] / self.s[n, n])

    def problem(self, indices):
        indices = tuple(int(i) for i in indices)
        if not indices:
            raise ValueError("no states selected")
        if min(indices) < 0 or max(indices) > self.n_gates:
            raise ValueError(f"state index outside [0, {self.n_gates}]")
        ix = np.ix_(indices, indices)
        return SubspaceProblem(self.h[ix], self.s[ix], indices)

    def solve(self, indices, threshold=DEFAULT_THRESHOLD):
        return solve_gep(self.problem(indices), threshold)


def csvqe_energy(subspace, strategy, threshold=DEFAULT_THRESHOLD):
    """Select states with ``strategy`` and solve the resulting subspace problem."""
    return subspace.solve(select_states(strategy, subspace.n_gates), threshold)


def sample_index_sets(n, m, n_samples, seed):
    """Distinct index sets of size ``m`` drawn from 0..n, each containing ``n``.

    When fewer than ``n_samples`` distinct sets exist, all of them are
    returned in lexicographic order. Otherwise sample ``k`` is drawn from its
    own stream derived from ``(seed, k)`` and redrawn from that stream until it
    differs from every earlier sample.
    """
    if m < 1 or m > n + 1:
        raise ValueError(f"subspace size {m} outside [1, {n + 1}]")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if comb(n, m - 1) <= n_samples:
        return [c + (n,) for c in combinations(range(n), m - 1)]
    seen = set()
    out = []
    for k in range(n_samples):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))
        while True:
            pick = tuple(sorted(rng.choice(n, size=m - 1, replace=False).tolist())) + (n,)
            if pick not in seen:
                break
        seen.add(pick)
        out.append(pick)
    return out


def random_search(subspace, m, n_samples, seed, threshold=DEFAULT_THRESHOLD, executor=None):
    """Solve the subspace problem for many distinct random state selections.

    Returns
    -------
    dict
        ``energies`` (one per sample, in sample order), ``solutions`` and
        ``best`` (the lowest-energy solution, earliest sample on ties).
    """
    sets = sample_index_sets(subspace.n_gates, m, n_samples, seed)
    solve = lambda idx: subspace.solve(idx, threshold)  # noqa: E731
    solutions = list(executor.map(solve, sets)) if executor else [solve(idx) for idx in sets]
    energies = [sol.energy for sol in solutions]
    best = solutions[int(np.argmin(energies))]
    return {"energies": energies, "solutions": solutions, "best": best}


def sample_statistics(energies, reference):
    """Mean, population standard deviation and minimum of ``energies - reference``."""
    errors = np.asarray(energies, dtype=float) - reference
    if errors.size == 0:
        raise ValueError("no energies given")
    return {"mean": float(errors.mean()), "std": float(errors.std()), "min": float(errors.min())}
