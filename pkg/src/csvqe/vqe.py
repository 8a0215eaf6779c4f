"""Variational optimization of circuit angles with a per-step trace."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "OptimizerSettings",
    "OptimizationTrace",
    "energy_objective",
    "make_objective",
    "gradient_fd",
    "optimize",
    "random_init",
    "run_vqe",
]

ARMIJO_C1 = 1e-4
MIN_STEP = 1e-12


@dataclass(frozen=True)
class OptimizerSettings:
    grad_tol: float = 1e-6
    max_iter: int = 200
    fd_step: float = 1e-6


@dataclass
class OptimizationTrace:
    """Accepted iterates of an optimization, starting with the initial point."""

    thetas: list = field(default_factory=list)
    energies: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self):
        return len(self.energies) - 1

    @property
    def steps(self):
        return list(zip(self.thetas, self.energies))

    def __len__(self):
        return len(self.energies)

    @property
    def final_theta(self):
        return self.thetas[-1]

    @property
    def final_energy(self):
        return self.energies[-1]

    def append(self, theta, energy):
        self.thetas.append(np.array(theta, dtype=float))
        self.energies.append(float(energy))

    def dumps(self):
        """``step_index energy theta_1 ... theta_N`` per line."""
        return "".join(
            " ".join([str(k), repr(e)] + [repr(float(t)) for t in th]) + "\n"
            for k, (th, e) in enumerate(zip(self.thetas, self.energies))
        )

    @classmethod
    def loads(cls, text):
        trace = cls()
        for line in text.splitlines():
            if line.strip():
                fields = line.split()
                trace.append([float(x) for x in fields[2:]], float(fields[1]))
        return trace


def energy_objective(sim, circuit, theta):
    """Energy of ``circuit`` with its angles replaced by ``theta``."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (len(circuit),):
        raise ValueError(f"expected {len(circuit)} angles, got shape {theta.shape}")
    return sim.energy(circuit.with_thetas(theta))


def make_objective(sim, circuit):
    return lambda theta: energy_objective(sim, circuit, theta)


def gradient_fd(objective, theta, h=1e-6):
    """Central finite-difference gradient of a scalar objective."""
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    theta = np.asarray(theta, dtype=float)
    grad = np.empty_like(theta)
    for k in range(theta.size):
        step = np.zeros_like(theta)
        step[k] = h
        grad[k] = (objective(theta + step) - objective(theta - step)) / (2 * h)
    return grad


def optimize(objective, theta0, settings=None):
    """BFGS with a backtracking Armijo line search.

    The trace records ``theta0`` and every accepted iterate; line-search
    probes are not recorded. Iteration stops once the gradient 2-norm drops
    to ``grad_tol``, after ``max_iter`` accepted steps, or when the line
    search cannot find a decrease.
    """
    settings = settings or OptimizerSettings()
    x = np.array(theta0, dtype=float)
    f = objective(x)
    if not np.isfinite(f):
        raise ValueError("objective is not finite at the initial point")
    g = gradient_fd(objective, x, settings.fd_step)
    trace = OptimizationTrace()
    trace.append(x, f)
    if np.linalg.norm(g) <= settings.grad_tol:
        trace.converged = True
        return trace

    hinv = np.eye(x.size)
    first = True
    for _ in range(settings.max_iter):
        p = -hinv @ g
        slope = g @ p
        if slope >= 0:
            hinv = np.eye(x.size)
            p, slope = -g, -(g @ g)
        alpha = 1.0
        while True:
            x_new = x + alpha * p
            f_new = objective(x_new)
            if f_new <= f + ARMIJO_C1 * alpha * slope:
                break
            alpha *= 0.5
            if alpha * np.linalg.norm(p) < MIN_STEP:
                return trace
        g_new = gradient_fd(objective, x_new, settings.fd_step)
        s, y = x_new - x, g_new - g
        sy = s @ y
        if sy > 1e-14:
            if first:
                hinv = np.eye(x.size) * (sy / (y @ y))
                first = False
            rho = 1.0 / sy
            v = np.eye(x.size) - rho * np.outer(s, y)
            hinv = v @ hinv @ v.T + rho * np.outer(s, s)
        x, f, g = x_new, f_new, g_new
        trace.append(x, f)
        if np.linalg.norm(g) <= settings.grad_tol:
            trace.converged = True
            break
    return trace


def random_init(n, seed, scale=np.pi):
    """``n`` angles drawn i.i.d. uniform on [-scale, scale)."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    rng = np.random.default_rng(seed)
    return rng.uniform(-scale, scale, size=n)


def run_vqe(sim, circuit, theta0=None, settings=None):
    """Optimize ``circuit`` starting from ``theta0`` (default: its own angles)."""
    theta0 = circuit.thetas if theta0 is None else theta0
    return optimize(make_objective(sim, circuit), theta0, settings)
