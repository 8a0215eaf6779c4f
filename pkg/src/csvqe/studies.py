"""Experiment runners that write plot-ready CSV reports.

Each runner takes an :class:`~csvqe.config.ExperimentConfig`, writes its CSV
files plus ``run_manifest.json`` into ``config.out_dir`` and returns the list
of written paths. Work items are independent and can be spread over worker
processes; rows are always written in a fixed order, so outputs do not depend
on ``threads``.
"""
from __future__ import annotations

import csv
import json
import logging
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import derive_seed
from .integrals import read_fcidump
from .simulator import SectorSimulator
from .subspace import (
    CircuitSubspace,
    SelectionStrategy,
    csvqe_energy,
    random_search,
)
from .ucc import UccCircuit, mp2_circuit
from .vqe import make_objective, optimize, random_init

__all__ = [
    "System",
    "run_vqe_command",
    "run_csvqe_command",
    "run_selection_study",
    "run_opt_trace_study",
    "run_local_minima_study",
]

log = logging.getLogger(__name__)


class System:
    """Integral table, simulator and MP2-initialized circuit for one config."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.table = read_fcidump(cfg.fcidump_path)
        self.sim = SectorSimulator(self.table)
        self.circuit = mp2_circuit(
            self.table, max_doubles=cfg.max_doubles,
            include_singles=cfg.include_singles, n_wf=cfg.n_wf,
        )

    @property
    def e_fci(self):
        return self.sim.fci_energy


# Per-process system, built once by the pool initializer (or lazily in-process).
_SYSTEM = None


def _init_worker(cfg):
    global _SYSTEM
    _SYSTEM = System(cfg)


def _system(cfg):
    global _SYSTEM
    if _SYSTEM is None or _SYSTEM.cfg != cfg:
        _SYSTEM = System(cfg)
    return _SYSTEM


def _map(cfg, fn, items):
    items = list(items)
    if cfg.threads <= 1 or len(items) <= 1:
        _system(cfg)
        return [fn(cfg, item) for item in items]
    with ProcessPoolExecutor(cfg.threads, initializer=_init_worker, initargs=(cfg,)) as pool:
        return list(pool.map(fn, [cfg] * len(items), items))


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (tuple, list)):
        return " ".join(str(i) for i in x)
    return str(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])
    return path


def _write_manifest(out, command, cfg, outputs, extra=None):
    manifest = {
        "command": command,
        "config": cfg.as_dict(),
        "versions": {
            "csvqe": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "seeds": {
            "root": cfg.seed,
            "derivation": "SeedSequence(root, spawn_key=(crc32(name) or int, ...)) per named sub-stream",
        },
        "outputs": [Path(p).name for p in outputs],
    }
    if extra:
        manifest.update(extra)
    path = out / "run_manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return path


def _out_dir(cfg):
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _csvqe_errors(system, thetas, m_values, seed_keys):
    """Best random-search error for each subspace size at the given angles."""
    cfg = system.cfg
    sub = CircuitSubspace(system.sim, system.circuit.with_thetas(thetas))
    errors = []
    for m in m_values:
        seed = derive_seed(cfg.seed, *seed_keys, m)
        best = random_search(sub, m, cfg.n_samples, seed, cfg.threshold)["best"]
        errors.append(best.energy - system.e_fci)
    return sub.vqe_energy - system.e_fci, errors


def _write_trace(out, name, circuit, trace):
    (out / f"{name}.txt").write_text(trace.dumps())
    snap = out / f"{name}_circuits"
    snap.mkdir(exist_ok=True)
    for k, theta in enumerate(trace.thetas):
        (snap / f"step_{k:04d}.txt").write_text(circuit.with_thetas(theta).dumps())
    return out / f"{name}.txt"


# -- vqe / csvqe subcommands -------------------------------------------------


def run_vqe_command(cfg):
    out = _out_dir(cfg)
    system = _system(cfg)
    trace = optimize(make_objective(system.sim, system.circuit), system.circuit.thetas, cfg.optimizer)
    outputs = [_write_trace(out, "vqe_trace", system.circuit, trace)]
    final = system.circuit.with_thetas(trace.final_theta)
    (out / "vqe_circuit.txt").write_text(final.dumps())
    outputs.append(out / "vqe_circuit.txt")
    outputs.append(_write_csv(
        out / "vqe_summary.csv",
        ["n_gates", "iterations", "converged", "energy", "error", "e_fci"],
        [[len(final), trace.iterations, trace.converged, trace.final_energy,
          trace.final_energy - system.e_fci, system.e_fci]],
    ))
    outputs.append(_write_manifest(out, "vqe", cfg, outputs))
    return outputs


def _csvqe_circuit(cfg, system):
    if cfg.circuit:
        path = Path(cfg.circuit)
        if not path.is_absolute():
            path = Path(cfg.base_dir) / path
        circuit = UccCircuit.loads(path.read_text())
        circuit = UccCircuit(circuit.factors, circuit.reference, cfg.n_wf)
    else:
        circuit = system.circuit
    if cfg.optimize:
        trace = optimize(make_objective(system.sim, circuit), circuit.thetas, cfg.optimizer)
        circuit = circuit.with_thetas(trace.final_theta)
    return circuit


def run_csvqe_command(cfg):
    """Per-sample records for every configured M plus the fixed selection strategies."""
    out = _out_dir(cfg)
    system = _system(cfg)
    circuit = _csvqe_circuit(cfg, system)
    sub = CircuitSubspace(system.sim, circuit)
    n = len(circuit)
    e_fci = system.e_fci
    sample_rows, summary_rows = [], []
    summary_rows.append(["vqe", 1, sub.vqe_energy, sub.vqe_energy - e_fci, 1, (n,)])
    for m in cfg.resolved_m_values(n):
        if m > n + 1:
            log.warning("skipping M=%d: circuit has only %d states", m, n + 1)
            continue
        for kind in cfg.strategies:
            strategy = SelectionStrategy(kind, m, derive_seed(cfg.seed, "csvqe", kind, m))
            sol = csvqe_energy(sub, strategy, cfg.threshold)
            summary_rows.append([kind, m, sol.energy, sol.energy - e_fci, sol.retained_rank, sol.state_indices])
        result = random_search(sub, m, cfg.n_samples, derive_seed(cfg.seed, "csvqe", "random", m), cfg.threshold)
        for k, sol in enumerate(result["solutions"]):
            sample_rows.append([k, m, sol.state_indices, sol.energy, sol.energy - e_fci, sol.retained_rank])
        best = result["best"]
        summary_rows.append(["random_best", m, best.energy, best.energy - e_fci, best.retained_rank, best.state_indices])
    outputs = [
        _write_csv(out / "csvqe_samples.csv",
                   ["sample_index", "M", "indices", "energy", "error", "retained_rank"], sample_rows),
        _write_csv(out / "csvqe_summary.csv",
                   ["strategy", "M", "energy", "error", "retained_rank", "indices"], summary_rows),
    ]
    outputs.append(_write_manifest(out, "csvqe", cfg, outputs, {"e_fci": e_fci, "n_gates": n}))
    return outputs


# -- studies -------------------------------------------------------------------


def _selection_task(cfg, item):
    m, theta = item
    system = _system(cfg)
    sub = CircuitSubspace(system.sim, system.circuit.with_thetas(theta))
    e_fci = system.e_fci
    rows = []
    for kind in cfg.strategies:
        strategy = SelectionStrategy(kind, m, derive_seed(cfg.seed, "selection-study", kind, m))
        sol = csvqe_energy(sub, strategy, cfg.threshold)
        rows.append([kind, m, sol.energy, sol.energy - e_fci, sol.retained_rank, sol.state_indices])
    seed = derive_seed(cfg.seed, "selection-study", "random", m)
    best = random_search(sub, m, cfg.n_samples, seed, cfg.threshold)["best"]
    rows.append(["random_best", m, best.energy, best.energy - e_fci, best.retained_rank, best.state_indices])
    return rows


def run_selection_study(cfg):
    """Fixed selection strategies versus the best random selection, circuit after one optimization step."""
    out = _out_dir(cfg)
    system = _system(cfg)
    settings = replace(cfg.optimizer, max_iter=1)
    trace = optimize(make_objective(system.sim, system.circuit), system.circuit.thetas, settings)
    theta = trace.final_theta
    n = len(system.circuit)
    e_vqe = trace.final_energy
    m_values = []
    for m in cfg.resolved_m_values(n):
        if m > n + 1:
            log.warning("skipping M=%d: circuit has only %d states", m, n + 1)
        else:
            m_values.append(m)
    rows = [["vqe", 1, e_vqe, e_vqe - system.e_fci, 1, (n,)]]
    for block in _map(cfg, _selection_task, [(m, theta) for m in m_values]):
        rows.extend(block)
    outputs = [_write_csv(
        out / "selection_study.csv",
        ["strategy", "M", "energy", "error", "retained_rank", "indices"], rows,
    )]
    outputs.append(_write_manifest(
        out, "selection-study", cfg, outputs,
        {"e_fci": system.e_fci, "n_gates": n, "opt_step": trace.iterations},
    ))
    return outputs


def _opt_trace_task(cfg, item):
    step, theta = item
    system = _system(cfg)
    vqe_error, errors = _csvqe_errors(
        system, theta, cfg.resolved_m_values(len(system.circuit)), ("opt-trace-study", step)
    )
    return [step, vqe_error] + errors


def run_opt_trace_study(cfg):
    """VQE and best-of-``n_samples`` CSVQE error at every optimization step."""
    out = _out_dir(cfg)
    system = _system(cfg)
    trace = optimize(make_objective(system.sim, system.circuit), system.circuit.thetas, cfg.optimizer)
    m_values = cfg.resolved_m_values(len(system.circuit))
    rows = _map(cfg, _opt_trace_task, list(enumerate(trace.thetas)))
    outputs = [
        _write_csv(
            out / "opt_trace_study.csv",
            ["opt_step", "vqe_error"] + [f"csvqe_error_m{m}" for m in m_values], rows,
        ),
        _write_trace(out, "opt_trace", system.circuit, trace),
    ]
    outputs.append(_write_manifest(
        out, "opt-trace-study", cfg, outputs,
        {"e_fci": system.e_fci, "n_gates": len(system.circuit), "converged": trace.converged},
    ))
    return outputs


def _trial_task(cfg, trial):
    system = _system(cfg)
    theta0 = random_init(len(system.circuit), derive_seed(cfg.seed, "local-minima-study", "init", trial),
                         cfg.init_scale)
    trace = optimize(make_objective(system.sim, system.circuit), theta0, cfg.optimizer)
    vqe_error, errors = _csvqe_errors(
        system, trace.final_theta, cfg.resolved_m_values(len(system.circuit)),
        ("local-minima-study", "trial", trial),
    )
    return {
        "trial": trial,
        "initial_error": trace.energies[0] - system.e_fci,
        "vqe_error": vqe_error,
        "iterations": trace.iterations,
        "converged": trace.converged,
        "csvqe_errors": errors,
        "thetas": trace.thetas,
    }


def _minima_trace_task(cfg, item):
    label, trial, step, theta = item
    system = _system(cfg)
    vqe_error, errors = _csvqe_errors(
        system, theta, cfg.resolved_m_values(len(system.circuit)),
        ("local-minima-study", "trace", trial, step),
    )
    return [label, trial, step, vqe_error] + errors


def run_local_minima_study(cfg):
    """Randomly initialized circuits: final VQE error versus CSVQE error, plus best/worst traces."""
    out = _out_dir(cfg)
    system = _system(cfg)
    m_values = cfg.resolved_m_values(len(system.circuit))
    results = _map(cfg, _trial_task, range(cfg.n_trials))
    results.sort(key=lambda r: (r["vqe_error"], r["trial"]))
    rows = [
        [rank, r["trial"], r["initial_error"], r["vqe_error"], r["iterations"], r["converged"]]
        + r["csvqe_errors"]
        for rank, r in enumerate(results, start=1)
    ]
    header = ["rank", "trial", "initial_error", "vqe_error", "iterations", "converged"]
    header += [f"csvqe_error_m{m}" for m in m_values]
    outputs = [_write_csv(out / "local_minima_study.csv", header, rows)]

    picks = [("best", results[0])] + ([("worst", results[-1])] if len(results) > 1 else [])
    items = [(label, r["trial"], k, theta) for label, r in picks for k, theta in enumerate(r["thetas"])]
    trace_rows = _map(cfg, _minima_trace_task, items)
    outputs.append(_write_csv(
        out / "local_minima_traces.csv",
        ["which", "trial", "opt_step", "vqe_error"] + [f"csvqe_error_m{m}" for m in m_values],
        trace_rows,
    ))
    outputs.append(_write_manifest(
        out, "local-minima-study", cfg, outputs,
        {"e_fci": system.e_fci, "n_gates": len(system.circuit)},
    ))
    return outputs

