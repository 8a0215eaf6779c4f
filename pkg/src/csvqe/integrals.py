"""FCIDUMP parsing and integral lookup.

Integrals are stored under a canonical index tuple (the smallest member of the
symmetry orbit) so that every permuted lookup hits the same entry. Indices in
the public lookup functions are 1-based, matching the file format; the dense
arrays returned by :meth:`IntegralTable.arrays` are 0-based.
"""
from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .exceptions import FcidumpParseError, UnsupportedSystemError

__all__ = [
    "IntegralTable",
    "parse_fcidump",
    "read_fcidump",
    "write_fcidump",
    "one_electron",
    "two_electron",
    "hf_energy",
    "canonical_pair",
    "canonical_quartet",
]


def canonical_pair(p, q):
    return (p, q) if p >= q else (q, p)


def canonical_quartet(p, q, r, s):
    """Smallest of the 8 index permutations that leave (pq|rs) invariant."""
    return min(
        (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
        (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
    )


@dataclass(frozen=True)
class IntegralTable:
    """Core energy plus one- and two-electron integrals in chemists' notation.

    ``one_electron`` is keyed by canonical (p, q), p >= q; ``two_electron`` by
    canonical (p, q, r, s). All keys are 1-based. Missing keys read as zero.
    """

    n_orbitals: int
    n_electrons: int
    ms2: int = 0
    core_energy: float = 0.0
    one_electron: dict = field(default_factory=dict)
    two_electron: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_orbitals < 1:
            raise ValueError("n_orbitals must be >= 1")
        if self.n_electrons < 1 or self.n_electrons > 2 * self.n_orbitals:
            raise ValueError(
                f"n_electrons={self.n_electrons} incompatible with "
                f"n_orbitals={self.n_orbitals}"
            )
        if self.n_orbitals > 64:
            raise UnsupportedSystemError("at most 64 spatial orbitals are supported")

    @property
    def n_alpha(self):
        return (self.n_electrons + self.ms2) // 2

    @property
    def n_beta(self):
        return (self.n_electrons - self.ms2) // 2

    def h(self, p, q):
        """One-electron integral h(p, q), 1-based."""
        self._check(p, q)
        return self.one_electron.get(canonical_pair(p, q), 0.0)

    def eri(self, p, q, r, s):
        """Two-electron integral (pq|rs), 1-based."""
        self._check(p, q, r, s)
        return self.two_electron.get(canonical_quartet(p, q, r, s), 0.0)

    def _check(self, *indices):
        for i in indices:
            if not 1 <= i <= self.n_orbitals:
                raise IndexError(
                    f"orbital index {i} outside [1, {self.n_orbitals}]"
                )

    @cached_property
    def _arrays(self):
        n = self.n_orbitals
        h1 = np.zeros((n, n))
        for (p, q), v in self.one_electron.items():
            h1[p - 1, q - 1] = h1[q - 1, p - 1] = v
        g = np.zeros((n, n, n, n))
        for (p, q, r, s), v in self.two_electron.items():
            p, q, r, s = p - 1, q - 1, r - 1, s - 1
            for a, b, c, d in (
                (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
            ):
                g[a, b, c, d] = v
        h1.setflags(write=False)
        g.setflags(write=False)
        return h1, g

    def arrays(self):
        """Dense 0-based ``(h1, eri)`` arrays, built once and read-only."""
        return self._arrays

    def to_fcidump(self):
        buf = io.StringIO()
        write_fcidump(self, buf)
        return buf.getvalue()


def _parse_header(header):
    body = re.sub(r"^\s*&\s*FCI", "", header, flags=re.I)
    parts = re.split(r"([A-Za-z_][A-Za-z0-9_]*)\s*=", body)
    values = {}
    for key, raw in zip(parts[1::2], parts[2::2]):
        values[key.upper()] = [v for v in re.split(r"[,\s]+", raw) if v]
    return values


def parse_fcidump(text):
    """Parse FCIDUMP text (a string or a text stream) into an IntegralTable.

    Raises
    ------
    FcidumpParseError
        Missing header keys, malformed records or out-of-range indices.
    UnsupportedSystemError
        Open-shell headers (MS2 != 0).
    """
    if not isinstance(text, str):
        text = text.read()
    lines = text.splitlines()

    header_lines = []
    body_start = None
    for lineno, line in enumerate(lines):
        stripped = line.strip()
        if stripped.upper().endswith("&END") or stripped == "/" or stripped.endswith("/"):
            header_lines.append(re.sub(r"(&END|/)\s*$", "", stripped, flags=re.I))
            body_start = lineno + 1
            break
        header_lines.append(line)
    if body_start is None:
        raise FcidumpParseError("header not terminated by '&END' or '/'")

    header = _parse_header(" ".join(header_lines))
    ints = {}
    for key in ("NORB", "NELEC", "MS2"):
        if key not in header or not header[key]:
            raise FcidumpParseError(f"missing header key {key}")
        try:
            ints[key] = int(header[key][0])
        except ValueError:
            raise FcidumpParseError(f"non-integer value for {key}") from None
    norb, nelec, ms2 = ints["NORB"], ints["NELEC"], ints["MS2"]
    if ms2 != 0:
        raise UnsupportedSystemError(f"MS2={ms2}: only closed-shell systems are supported")

    core = 0.0
    one, two = {}, {}
    for lineno, line in enumerate(lines[body_start:], start=body_start + 1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 5:
            raise FcidumpParseError("expected 'value i j k l'", lineno)
        try:
            value = float(fields[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(f) for f in fields[1:])
        except ValueError:
            raise FcidumpParseError(f"non-numeric field in {line.strip()!r}", lineno) from None
        if not all(0 <= x <= norb for x in (i, j, k, l)):
            raise FcidumpParseError(f"index outside [0, {norb}]", lineno)
        if i == j == k == l == 0:
            core = value
        elif k == l == 0 and i and j:
            one[canonical_pair(i, j)] = value
        elif i and j and k and l:
            two[canonical_quartet(i, j, k, l)] = value
        # orbital-energy records (i 0 0 0) carry nothing we use

    try:
        return IntegralTable(norb, nelec, ms2, core, one, two)
    except ValueError as exc:
        raise FcidumpParseError(str(exc)) from None


def read_fcidump(path):
    return parse_fcidump(Path(path).read_text())


def write_fcidump(table, stream):
    """Write ``table`` in FCIDUMP format (canonical records only)."""
    stream.write(
        f" &FCI NORB={table.n_orbitals},NELEC={table.n_electrons},MS2={table.ms2},\n &END\n"
    )
    for (p, q, r, s), v in sorted(table.two_electron.items()):
        stream.write(f" {v!r} {p} {q} {r} {s}\n")
    for (p, q), v in sorted(table.one_electron.items()):
        stream.write(f" {v!r} {p} {q} 0 0\n")
    stream.write(f" {table.core_energy!r} 0 0 0 0\n")


def one_electron(table, p, q):
    return table.h(p, q)


def two_electron(table, p, q, r, s):
    return table.eri(p, q, r, s)


def hf_energy(table):
    """Closed-shell Hartree-Fock energy with the lowest n_electrons/2 orbitals doubly occupied."""
    if table.n_electrons % 2:
        raise UnsupportedSystemError("hf_energy requires an even electron count")
    occ = range(1, table.n_electrons // 2 + 1)
    e = table.core_energy + 2 * sum(table.h(i, i) for i in occ)
    for i in occ:
        for j in occ:
            e += 2 * table.eri(i, i, j, j) - table.eri(i, j, j, i)
    return e
