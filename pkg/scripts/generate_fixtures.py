"""Regenerate the bundled FCIDUMP fixtures and their reference values.

Requires PySCF. Geometries are experimental values from CCCBDB. Reference
energies are computed by PySCF on the integrals read back from each written
FCIDUMP, so they refer to exactly the shipped file.

    python scripts/generate_fixtures.py
"""
import json
from math import comb, cos, radians, sin, sqrt
from pathlib import Path

import numpy as np
from pyscf import __version__ as pyscf_version
from pyscf import ao2mo, fci, gto, mp, scf
from pyscf.tools import fcidump

DATA = Path(__file__).resolve().parents[1] / "src" / "csvqe" / "data"


def _bent(center, r, angle):
    half = radians(angle) / 2
    return f"{center} 0 0 0; H 0 {r * sin(half)} {r * cos(half)}; H 0 {-r * sin(half)} {r * cos(half)}"


def _pyramid(center, r, angle):
    # three equivalent H on a C3 axis with H-X-H angle `angle`
    c = cos(radians(angle))
    rho = r * sqrt(2 * (1 - c) / 3)
    z = -sqrt(r * r - rho * rho)
    atoms = [f"{center} 0 0 0"]
    for k in range(3):
        phi = radians(120 * k)
        atoms.append(f"H {rho * cos(phi)} {rho * sin(phi)} {z}")
    return "; ".join(atoms)


def _tetrahedral(center, r):
    d = r / sqrt(3)
    signs = [(1, 1, 1), (-1, -1, 1), (-1, 1, -1), (1, -1, -1)]
    return "; ".join([f"{center} 0 0 0"] + [f"H {a * d} {b * d} {c * d}" for a, b, c in signs])


# name -> (atom string, basis, geometry note)
MOLECULES = {
    "h2_sto3g": ("H 0 0 0; H 0 0 0.7414", "sto-3g", "r(HH) = 0.7414 A"),
    "h2_631g": ("H 0 0 0; H 0 0 0.7414", "6-31g", "r(HH) = 0.7414 A"),
    "lih_sto3g": ("Li 0 0 0; H 0 0 1.5949", "sto-3g", "r(LiH) = 1.5949 A"),
    "h2o_sto3g": (
        _bent("O", 0.9578, 104.4776),
        "sto-3g",
        "r(OH) = 0.9578 A, a(HOH) = 104.48 deg",
    ),
    "nh3_sto3g": (
        _pyramid("N", 1.012, 106.7),
        "sto-3g",
        "r(NH) = 1.012 A, a(HNH) = 106.7 deg",
    ),
    "ch4_sto3g": (
        _tetrahedral("C", 1.087),
        "sto-3g",
        "r(CH) = 1.087 A, Td",
    ),
    "n2_sto3g": ("N 0 0 0; N 0 0 1.0977", "sto-3g", "r(NN) = 1.0977 A"),
    "c2_sto3g": ("C 0 0 0; C 0 0 1.2425", "sto-3g", "r(CC) = 1.2425 A"),
}

# FCI reference only where the determinant sector stays small
FCI_MAX_DIM = 50_000


def main():
    manifest = {"generator": f"pyscf {pyscf_version}", "fixtures": {}}
    for name, (atom, basis, geometry) in MOLECULES.items():
        mol = gto.M(atom=atom, basis=basis, unit="Angstrom", verbose=0)
        mf = scf.RHF(mol).run(conv_tol=1e-12)
        path = DATA / f"{name}.fcidump"
        fcidump.from_scf(mf, str(path), tol=1e-15)

        ints = fcidump.read(str(path), verbose=False)
        norb, nelec, ecore = ints["NORB"], ints["NELEC"], ints["ECORE"]
        h1 = ints["H1"]
        eri = ao2mo.restore(1, ints["H2"], norb)
        occ = nelec // 2
        e_hf = (
            ecore
            + 2 * np.trace(h1[:occ, :occ])
            + 2 * np.einsum("iijj->", eri[:occ, :occ, :occ, :occ])
            - np.einsum("ijji->", eri[:occ, :occ, :occ, :occ])
        )
        entry = {
            "file": path.name,
            "molecule": name.split("_")[0].upper(),
            "basis": basis,
            "geometry": geometry,
            "geometry_source": "experimental geometries from the CCCBDB database",
            "n_orbitals": norb,
            "n_electrons": nelec,
            "e_scf": float(mf.e_tot),
            "e_hf_from_fcidump": float(e_hf),
            "e_mp2": float(mp.MP2(mf).run().e_tot),
        }
        dim = comb(norb, nelec // 2) ** 2
        if dim <= FCI_MAX_DIM:
            solver = fci.direct_spin1.FCI()
            solver.conv_tol = 1e-13
            e_fci, _ = solver.kernel(h1, eri, norb, nelec, ecore=ecore)
            entry["e_fci"] = float(e_fci)
        if norb <= 4:
            # 1-based integral probes for parser tests
            entry["h_11"] = float(h1[0, 0])
            entry["eri_1111"] = float(eri[0, 0, 0, 0])
            entry["eri_1122"] = float(eri[0, 0, 1, 1])
            entry["eri_1212"] = float(eri[0, 1, 0, 1])
        if name == "h2_sto3g":
            t2 = mp.MP2(mf).run().t2
            entry["mp2_t2_0011"] = float(t2[0, 0, 0, 0])
        manifest["fixtures"][name] = entry
        print(name, norb, nelec, entry.get("e_fci"))

    (DATA / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
