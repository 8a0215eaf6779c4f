"""Command-line entry point.

Examples
--------
::

    csvqe parse-check h2.fcidump
    csvqe fci builtin:lih_sto3g
    csvqe opt-trace-study lih.ini --seed 7 --out-dir results/lih --threads 4
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .config import load_config, resolve_fcidump
from .exceptions import CsvqeError
from .fci import basis_for, fci_ground_energy
from .integrals import hf_energy, read_fcidump
from .studies import (
    run_csvqe_command,
    run_local_minima_study,
    run_opt_trace_study,
    run_selection_study,
    run_vqe_command,
)

log = logging.getLogger("csvqe")

STUDIES = {
    "vqe": (run_vqe_command, "optimize the MP2-initialized circuit and write its trace"),
    "csvqe": (run_csvqe_command, "CSVQE energies for one circuit (per-sample CSV)"),
    "selection-study": (run_selection_study, "compare state-selection strategies"),
    "opt-trace-study": (run_opt_trace_study, "VQE and CSVQE error along the optimization"),
    "local-minima-study": (run_local_minima_study, "random-initialization trials"),
}


def _common(p):
    p.add_argument("--seed", type=int, default=None, help="root seed (overrides the config)")
    p.add_argument("--out-dir", default=None, help="output directory (overrides the config)")
    p.add_argument("--threads", type=int, default=None, help="worker processes (default 1)")


def build_parser():
    parser = argparse.ArgumentParser(prog="csvqe", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse-check", help="validate an FCIDUMP and print a summary")
    p.add_argument("fcidump", help="file path or builtin:<name>")

    p = sub.add_parser("fci", help="exact ground-state energy of an FCIDUMP")
    p.add_argument("fcidump", help="file path or builtin:<name>")
    p.add_argument("--out-dir", default=None, help="also write fci.json here")

    for name, (_, help_text) in STUDIES.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="INI experiment config")
        _common(p)
    return parser


def _parse_check(args):
    table = read_fcidump(resolve_fcidump(args.fcidump))
    print(f"n_orbitals    {table.n_orbitals}")
    print(f"n_electrons   {table.n_electrons}")
    print(f"ms2           {table.ms2}")
    print(f"core_energy   {table.core_energy!r}")
    print(f"one_electron  {len(table.one_electron)} unique")
    print(f"two_electron  {len(table.two_electron)} unique")
    print(f"sector_dim    {len(basis_for(table))}")
    print(f"hf_energy     {hf_energy(table)!r}")
    return 0


def _fci(args):
    table = read_fcidump(resolve_fcidump(args.fcidump))
    start = time.perf_counter()
    energy, psi = fci_ground_energy(table)
    elapsed = time.perf_counter() - start
    dim = len(basis_for(table))
    print(f"dimension  {dim}")
    print(f"e_hf       {hf_energy(table)!r}")
    print(f"e_fci      {energy!r}")
    log.info("FCI took %.2f s", elapsed)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        record = {
            "command": "fci",
            "fcidump": str(args.fcidump),
            "dimension": dim,
            "e_hf": hf_energy(table),
            "e_fci": energy,
            "versions": {"csvqe": __version__},
        }
        (out / "fci.json").write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "parse-check":
            return _parse_check(args)
        if args.command == "fci":
            return _fci(args)
        runner = STUDIES[args.command][0]
        cfg = load_config(args.config, args.command, seed=args.seed, out_dir=args.out_dir,
                          threads=args.threads)
        for path in runner(cfg):
            print(path)
        return 0
    except (CsvqeError, OSError) as exc:
        print(f"csvqe {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
