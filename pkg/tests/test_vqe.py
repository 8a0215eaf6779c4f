import numpy as np
import pytest

from csvqe.integrals import hf_energy
from csvqe.ucc import mp2_circuit, prefix_state
from csvqe.vqe import (
    OptimizationTrace,
    OptimizerSettings,
    energy_objective,
    gradient_fd,
    make_objective,
    optimize,
    random_init,
    run_vqe,
)


def test_zero_angles_give_hf(lih, lih_sim):
    c = mp2_circuit(lih)
    assert energy_objective(lih_sim, c, np.zeros(len(c))) == pytest.approx(hf_energy(lih), abs=1e-12)


def test_dimension_mismatch(lih, lih_sim):
    c = mp2_circuit(lih)
    with pytest.raises(ValueError):
        energy_objective(lih_sim, c, np.zeros(3))


def test_objective_is_rayleigh_quotient(h2_631g, h2_631g_sim):
    c = mp2_circuit(h2_631g, max_doubles=None)
    theta = np.linspace(-1, 1, len(c))
    psi = prefix_state(c.with_thetas(theta), len(c))
    assert energy_objective(h2_631g_sim, c, theta) == pytest.approx(
        h2_631g_sim.ctx.rayleigh_quotient(psi), abs=1e-12
    )


def test_h2_single_double_optimum_is_exact(h2, h2_sim):
    c = mp2_circuit(h2, include_singles=False)
    trace = run_vqe(h2_sim, c)
    assert trace.final_energy == pytest.approx(h2_sim.fci_energy, abs=1e-10)
    grad = gradient_fd(make_objective(h2_sim, c), trace.final_theta)
    assert np.linalg.norm(grad) < 1e-5


def test_gradient_of_quadratic():
    theta = np.array([0.3, -1.2, 2.0])
    grad = gradient_fd(lambda t: float(t @ t), theta, h=1e-4)
    assert np.allclose(grad, 2 * theta, atol=1e-8)


def test_gradient_second_order_accuracy():
    f = lambda t: float(np.sin(t[0]) * np.exp(t[1]))  # noqa: E731
    x = np.array([0.4, 0.3])
    exact = np.array([np.cos(0.4) * np.exp(0.3), np.sin(0.4) * np.exp(0.3)])
    e1 = np.abs(gradient_fd(f, x, 1e-2) - exact)
    e2 = np.abs(gradient_fd(f, x, 5e-3) - exact)
    assert np.all((e1 / e2 > 3.5) & (e1 / e2 < 4.5))


def test_gradient_rejects_bad_step():
    with pytest.raises(ValueError):
        gradient_fd(lambda t: 0.0, np.zeros(1), h=0.0)


def test_already_converged_start():
    trace = optimize(lambda t: float(t @ t), np.zeros(3))
    assert len(trace) == 1 and trace.converged and trace.iterations == 0


def test_iteration_cap():
    rosen = lambda t: float((1 - t[0]) ** 2 + 100 * (t[1] - t[0] ** 2) ** 2)  # noqa: E731
    trace = optimize(rosen, np.array([-1.2, 1.0]), OptimizerSettings(max_iter=3))
    assert len(trace) <= 4 and not trace.converged
    full = optimize(rosen, np.array([-1.2, 1.0]))
    assert full.converged and np.allclose(full.final_theta, [1, 1], atol=1e-5)


def test_non_finite_start():
    with pytest.raises(ValueError):
        optimize(lambda t: float("nan"), np.zeros(2))


def test_h2_from_mp2(h2, h2_sim):
    trace = run_vqe(h2_sim, mp2_circuit(h2))
    assert trace.converged
    assert trace.final_energy - h2_sim.fci_energy < 1e-8


def test_trace_invariants(lih, lih_sim):
    c = mp2_circuit(lih)
    trace = run_vqe(lih_sim, c, settings=OptimizerSettings(max_iter=5))
    assert trace.energies[-1] <= trace.energies[0] + 1e-12
    assert all(b <= a for a, b in zip(trace.energies, trace.energies[1:]))
    for theta, energy in trace.steps:
        psi = prefix_state(c.with_thetas(theta), len(c))
        assert lih_sim.ctx.rayleigh_quotient(psi) == pytest.approx(energy, abs=1e-10)
    again = OptimizationTrace.loads(trace.dumps())
    assert again.energies == trace.energies
    assert all(np.array_equal(a, b) for a, b in zip(again.thetas, trace.thetas))


def test_random_init():
    a = random_init(20, 5)
    assert np.array_equal(a, random_init(20, 5))
    assert np.all((a >= -np.pi) & (a < np.pi))
    assert not np.array_equal(random_init(20, 1), random_init(20, 2))
    with pytest.raises(ValueError):
        random_init(3, 0, scale=0)
