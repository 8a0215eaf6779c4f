"""Experiment configuration files.

Configs are INI files. ``[run]``, ``[system]``, ``[optimizer]`` and ``[csvqe]``
hold shared settings; a section named after a study (``[selection-study]``,
``[opt-trace-study]``, ``[local-minima-study]``) overrides any of them for
that study. Example::

    [run]
    seed = 7
    out_dir = results

    [system]
    fcidump = builtin:lih_sto3g

    [opt-trace-study]
    m_values = 4, 12, all
"""
from __future__ import annotations

import configparser
import zlib
from dataclasses import asdict, dataclass, field
from importlib import resources
from math import pi
from pathlib import Path

import numpy as np

from .exceptions import ConfigError
from .subspace import STRATEGIES
from .vqe import OptimizerSettings

__all__ = ["ExperimentConfig", "load_config", "resolve_fcidump", "derive_seed", "STUDY_DEFAULTS"]

BUILTIN_PREFIX = "builtin:"

STUDY_DEFAULTS = {
    "vqe": {},
    "csvqe": {},
    "selection-study": {"m_values": "2, 4, 6, 8, 10, 12, 16, 20", "n_samples": "20000"},
    "opt-trace-study": {"m_values": "4, 12, all", "n_samples": "1000"},
    "local-minima-study": {
        "fcidump": "builtin:h2_631g",
        "n_wf": "30000",
        "max_doubles": "all",
        "m_values": "4, 8, 12",
        "n_samples": "10000",
    },
}


def resolve_fcidump(source, base_dir=None):
    """Path of an FCIDUMP given as a file path or ``builtin:<name>``."""
    source = str(source)
    if source.startswith(BUILTIN_PREFIX):
        name = source[len(BUILTIN_PREFIX):]
        path = Path(str(resources.files("csvqe") / "data" / f"{name}.fcidump"))
    else:
        path = Path(source)
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
    if not path.is_file():
        raise ConfigError(f"FCIDUMP not found: {source}")
    return path


def derive_seed(root, *keys):
    """Integer seed for the named sub-stream ``keys`` of ``root``."""
    spawn = tuple(zlib.crc32(k.encode()) if isinstance(k, str) else int(k) for k in keys)
    return int(np.random.SeedSequence(root, spawn_key=spawn).generate_state(1)[0])


@dataclass
class ExperimentConfig:
    fcidump: str
    seed: int
    out_dir: str = "results"
    threads: int = 1
    n_wf: int = 50_000
    max_doubles: int | None = 50
    include_singles: bool = True
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    threshold: float = 1e-10
    strategies: tuple = ("even", "front_loaded", "back_loaded")
    m_values: tuple = (4, 12, "all")
    n_samples: int = 1000
    n_trials: int = 30
    init_scale: float = pi
    circuit: str | None = None
    optimize: bool = False
    base_dir: str = "."

    def __post_init__(self):
        for name in ("n_wf", "n_samples", "n_trials", "threads"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.max_doubles is not None and self.max_doubles < 0:
            raise ConfigError("max_doubles must be non-negative or 'all'")
        if self.init_scale <= 0 or self.threshold <= 0:
            raise ConfigError("init_scale and threshold must be positive")
        for m in self.m_values:
            if m != "all" and m < 1:
                raise ConfigError(f"subspace size {m} must be positive")
        if self.seed is None:
            raise ConfigError("a seed is required (config [run] seed or --seed)")
        unknown = set(self.strategies) - set(STRATEGIES)
        if unknown:
            raise ConfigError(f"unknown selection strategies {sorted(unknown)}")

    @property
    def fcidump_path(self):
        return resolve_fcidump(self.fcidump, self.base_dir)

    def resolved_m_values(self, n_gates):
        return [n_gates + 1 if m == "all" else int(m) for m in self.m_values]

    def as_dict(self):
        out = asdict(self)
        out["m_values"] = list(self.m_values)
        out["strategies"] = list(self.strategies)
        return out


def _int_list(text):
    out = []
    for tok in text.replace(",", " ").split():
        out.append("all" if tok.lower() == "all" else int(tok))
    return tuple(out)


def _bool(text):
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def load_config(path, study, seed=None, out_dir=None, threads=None):
    """Read ``path`` and flatten the settings that apply to ``study``.

    Command-line values (``seed``, ``out_dir``, ``threads``) take precedence.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    parser.read(path)
    values = dict(STUDY_DEFAULTS.get(study, {}))
    for section in ("run", "system", "optimizer", "csvqe", study):
        if parser.has_section(section):
            values.update(parser.items(section))
    if seed is not None:
        values["seed"] = seed
    if out_dir is not None:
        values["out_dir"] = out_dir
    if threads is not None:
        values["threads"] = threads
    if "fcidump" not in values:
        raise ConfigError("no fcidump configured")
    if "seed" not in values:
        raise ConfigError("a seed is required (config [run] seed or --seed)")

    try:
        optimizer = OptimizerSettings(
            grad_tol=float(values.pop("grad_tol", 1e-6)),
            max_iter=int(values.pop("max_iter", 200)),
            fd_step=float(values.pop("fd_step", 1e-6)),
        )
        max_doubles = values.pop("max_doubles", "50")
        cfg = ExperimentConfig(
            fcidump=values.pop("fcidump"),
            seed=int(values.pop("seed")),
            out_dir=str(values.pop("out_dir", "results")),
            threads=int(values.pop("threads", 1)),
            n_wf=int(values.pop("n_wf", 50_000)),
            max_doubles=None if str(max_doubles).lower() == "all" else int(max_doubles),
            include_singles=_bool(values.pop("include_singles", "true")),
            optimizer=optimizer,
            threshold=float(values.pop("threshold", 1e-10)),
            strategies=tuple(
                s.strip() for s in values.pop("strategies", "even, front_loaded, back_loaded").split(",")
            ),
            m_values=_int_list(values.pop("m_values", "4, 12, all")),
            n_samples=int(values.pop("n_samples", 1000)),
            n_trials=int(values.pop("n_trials", 30)),
            init_scale=float(values.pop("init_scale", pi)),
            circuit=values.pop("circuit", None),
            optimize=_bool(values.pop("optimize", "false")),
            base_dir=str(path.parent),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    if values:
        raise ConfigError(f"unknown config keys: {sorted(values)}")
    cfg.fcidump_path  # existence check
    return cfg
