from itertools import combinations
from math import comb

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from csvqe.exceptions import DegenerateOverlapError
from csvqe.fci import enumerate_determinants
from csvqe.hamiltonian import HamiltonianContext
from csvqe.subspace import (
    CircuitSubspace,
    SelectionStrategy,
    SubspaceProblem,
    build_subspace_problem,
    csvqe_energy,
    random_search,
    sample_index_sets,
    sample_statistics,
    select_states,
    solve_gep,
)
from csvqe.ucc import apply_factor, mp2_circuit
from csvqe.wavefunction import SparseWavefunction

from oracles import excitation_generator, expm_series


def _sel(kind, m, n, seed=0):
    return select_states(SelectionStrategy(kind, m, seed), n)


def test_named_selection_sets():
    assert _sel("even", 4, 149) == [0, 49, 99, 149]
    assert _sel("back_loaded", 4, 149) == [146, 147, 148, 149]
    assert _sel("front_loaded", 4, 149) == [0, 1, 2, 149]


def test_even_full_set_and_collisions():
    assert _sel("even", 7, 6) == list(range(7))
    assert _sel("even", 5, 5) == [0, 1, 2, 3, 5]  # floor(k*5/4) = 0, 1, 2, 3 plus N
    out = _sel("even", 4, 3)
    assert out == [0, 1, 2, 3]


@given(st.sampled_from(["even", "front_loaded", "back_loaded", "random"]), st.integers(1, 40), st.data())
@settings(max_examples=300, deadline=None)
def test_selection_invariants(kind, n, data):
    m = data.draw(st.integers(1, n + 1))
    seed = data.draw(st.integers(0, 2**32 - 1))
    out = _sel(kind, m, n, seed)
    assert len(out) == m == len(set(out))
    assert n in out and out == sorted(out) and 0 <= out[0]


def test_selection_errors():
    with pytest.raises(ValueError):
        _sel("even", 5, 3)
    with pytest.raises(ValueError):
        _sel("even", 0, 3)
    with pytest.raises(ValueError):
        SelectionStrategy("middle", 2)


# -- problem assembly ------------------------------------------------------------------


@pytest.fixture(scope="module")
def h2_circuit(h2):
    c = mp2_circuit(h2)
    return c.with_thetas([-0.11, 0.05, -0.02])


def test_single_state_problem(h2, h2_ctx, h2_circuit):
    p = build_subspace_problem(h2_ctx, h2_circuit, [3])
    from csvqe.ucc import prefix_state

    psi = prefix_state(h2_circuit, 3)
    assert p.h.shape == (1, 1)
    assert p.h[0, 0] == pytest.approx(h2_ctx.transition_element(psi, psi), abs=1e-15)
    assert p.s[0, 0] == pytest.approx(psi.norm() ** 2, abs=1e-15)
    with pytest.raises(ValueError):
        build_subspace_problem(h2_ctx, h2_circuit, [])


def test_problem_vs_dense_oracle(h2, h2_ctx, h2_circuit):
    """Prefix states from the Fock-space exponential and a dense H, compared entrywise."""
    basis = enumerate_determinants(2, 1, 1)
    hmat = h2_ctx.matrix(basis.determinants).toarray()
    vec = SparseWavefunction.from_determinant(h2_circuit.reference).to_vector(basis.index)
    states = [vec]
    for f in h2_circuit.factors:
        vec = expm_series(f.theta * excitation_generator(basis.determinants, f.holes, f.particles, 2)) @ vec
        states.append(vec)
    idx = [0, 2, 3]
    x = np.column_stack([states[i] for i in idx])
    p = build_subspace_problem(h2_ctx, h2_circuit, idx)
    assert np.max(np.abs(p.h - x.T @ hmat @ x)) < 1e-12
    assert np.max(np.abs(p.s - x.T @ x)) < 1e-12


def test_dense_and_sparse_assembly_agree(lih, lih_sim):
    c = mp2_circuit(lih, n_wf=60)
    sub = CircuitSubspace(lih_sim, c)
    idx = (0, 5, 17, 40, len(c))
    ref = build_subspace_problem(HamiltonianContext(lih), c, idx)
    p = sub.problem(idx)
    assert np.max(np.abs(p.h - ref.h)) < 1e-12 and np.max(np.abs(p.s - ref.s)) < 1e-12


def test_duplicated_state(h2_ctx, h2_circuit):
    p = build_subspace_problem(h2_ctx, h2_circuit, [1, 3])
    dup = build_subspace_problem(h2_ctx, h2_circuit, [1, 3, 3])
    assert np.linalg.matrix_rank(dup.s, tol=1e-10) == 2
    a, b = solve_gep(p), solve_gep(dup)
    assert b.energy == pytest.approx(a.energy, abs=1e-12)
    assert b.retained_rank == a.retained_rank == 2


# -- eigensolve ------------------------------------------------------------------


def test_identity_overlap():
    sol = solve_gep(SubspaceProblem(np.diag([-1.0, -0.5]), np.eye(2), (0, 1)))
    assert sol.energy == -1.0 and sol.retained_rank == 2
    assert np.allclose(np.abs(sol.coefficients), [1.0, 0.0])


def test_degenerate_overlap():
    with pytest.raises(DegenerateOverlapError):
        solve_gep(SubspaceProblem(np.zeros((2, 2)), np.zeros((2, 2)), (0, 1)))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_random_gep_vs_scipy(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(3, 3))
    h = a + a.T
    b = rng.normal(size=(3, 3))
    s = b @ b.T + 0.5 * np.eye(3)
    ours = solve_gep(SubspaceProblem(h, s, (0, 1, 2)))
    assert ours.energy == pytest.approx(scipy.linalg.eigh(h, s, eigvals_only=True)[0], abs=1e-10)
    assert ours.retained_rank == 3


@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10), st.integers(0, 3))
@settings(max_examples=100, deadline=None)
def test_scale_invariance(seed, scale, row):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(6, 4))
    a = rng.normal(size=(6, 6))
    h = x.T @ (a + a.T) @ x
    s = x.T @ x
    d = np.ones(4)
    d[row] = scale
    base = solve_gep(SubspaceProblem(h, s, tuple(range(4))), threshold=1e-12)
    scaled = solve_gep(SubspaceProblem(d[:, None] * h * d, d[:, None] * s * d, tuple(range(4))), threshold=1e-12)
    assert scaled.energy == pytest.approx(base.energy, abs=1e-10)


def test_full_span_gives_fci(h2_sim, h2_circuit):
    sub = CircuitSubspace(h2_sim, h2_circuit)
    sol = sub.solve(range(4))
    assert sol.retained_rank == 4
    assert sol.energy == pytest.approx(h2_sim.fci_energy, abs=1e-10)


@pytest.mark.parametrize("name", ["h2_sto3g", "h2_631g"])
def test_threshold_robustness_small_fixtures(name):
    from conftest import load_sim

    sim = load_sim(name)
    c = mp2_circuit(sim.table, max_doubles=None)
    c = c.with_thetas(np.random.default_rng(0).uniform(-np.pi, np.pi, len(c)))
    sub = CircuitSubspace(sim, c)
    n = len(c)
    for idx in sample_index_sets(n, min(5, n + 1), 50, seed=1):
        energies = [sub.solve(idx, t).energy for t in (1e-12, 1e-10, 1e-8)]
        assert max(energies) - min(energies) < 1e-8


# -- csvqe energies and sampling ------------------------------------------------------------


def test_final_state_only_is_vqe(lih, lih_sim):
    c = mp2_circuit(lih)
    sub = CircuitSubspace(lih_sim, c)
    sol = csvqe_energy(sub, SelectionStrategy("even", 1))
    assert sol.energy == pytest.approx(lih_sim.energy(c), abs=1e-13)
    assert sol.state_indices == (len(c),)


def test_strategies_never_above_vqe(lih, lih_sim):
    c = mp2_circuit(lih)
    sub = CircuitSubspace(lih_sim, c)
    for kind in ("even", "front_loaded", "back_loaded", "random"):
        for m in (2, 4, 12, len(c) + 1):
            assert csvqe_energy(sub, SelectionStrategy(kind, m, seed=m)).energy <= sub.vqe_energy + 1e-10


def test_sample_sets():
    full = sample_index_sets(5, 3, 100, seed=0)
    assert len(full) == comb(5, 2) and full == [c + (5,) for c in combinations(range(5), 2)]
    sets = sample_index_sets(30, 4, 200, seed=9)
    assert len(sets) == len(set(sets)) == 200
    assert all(s[-1] == 30 and len(set(s)) == 4 for s in sets)
    assert sets == sample_index_sets(30, 4, 200, seed=9)
    assert sets[:50] == sample_index_sets(30, 4, 50, seed=9)
    assert sets != sample_index_sets(30, 4, 200, seed=10)


def test_random_search(lih, lih_sim):
    c = mp2_circuit(lih)
    sub = CircuitSubspace(lih_sim, c)
    one = random_search(sub, 4, 1, seed=3)
    assert len(one["energies"]) == 1 and one["best"].energy == one["energies"][0]
    res = random_search(sub, 4, 300, seed=3)
    assert all(e <= sub.vqe_energy + 1e-10 for e in res["energies"])
    assert res["best"].energy == min(res["energies"])


def test_sample_statistics():
    st_ = sample_statistics([-1.0, -1.0], -1.1)
    assert st_["mean"] == pytest.approx(0.1) and st_["std"] == 0.0 and st_["min"] == pytest.approx(0.1)
    assert sample_statistics([-1.0], -1.2)["std"] == 0.0
    st_ = sample_statistics([-1.0, -1.2], -1.2)
    assert st_["mean"] == pytest.approx(0.1) and st_["std"] == pytest.approx(0.1) and st_["min"] == pytest.approx(0.0)
    with pytest.raises(ValueError):
        sample_statistics([], 0.0)


def test_apply_factor_used_by_subspace_is_unitary(h2_circuit):
    psi = SparseWavefunction.from_determinant(h2_circuit.reference)
    for f in h2_circuit.factors:
        psi = apply_factor(psi, f)
    assert psi.norm() == pytest.approx(1.0, abs=1e-14)
