import numpy as np
import pytest

from csvqe.exceptions import CapacityError
from csvqe.fci import enumerate_determinants, fci_ground_energy, lowest_eigenpair, MAX_DIMENSION
from csvqe.hamiltonian import HamiltonianContext
from csvqe.integrals import IntegralTable

from conftest import load_table
from oracles import fock_hamiltonian, sector_matrix


def test_basis_sizes():
    assert len(enumerate_determinants(2, 1, 1)) == 4
    assert len(enumerate_determinants(6, 2, 2)) == 225
    vac = enumerate_determinants(3, 0, 0)
    assert len(vac) == 1 and vac.determinants[0] == (0, 0)


def test_basis_ordering_and_index():
    basis = enumerate_determinants(4, 2, 1)
    dets = list(basis.determinants)
    assert dets == sorted(dets) and len(set(dets)) == len(dets)
    assert all(basis.index[d] == i for i, d in enumerate(dets))


def test_too_many_electrons():
    with pytest.raises(ValueError):
        enumerate_determinants(2, 3, 0)


def test_one_electron_system():
    one = {(1, 1): -1.0, (2, 1): 0.3, (2, 2): -0.2}
    t = IntegralTable(2, 1, 1, 0.4, one, {(1, 1, 1, 1): 0.7})
    energy, _ = fci_ground_energy(t)
    h = np.array([[-1.0, 0.3], [0.3, -0.2]])
    assert energy == pytest.approx(np.linalg.eigvalsh(h)[0] + 0.4, abs=1e-12)


def test_h2_matches_dense_oracle(h2):
    h1, g = h2.arrays()
    dets = enumerate_determinants(2, 1, 1).determinants
    ref = sector_matrix(fock_hamiltonian(h1, g, h2.core_energy), dets, 2)
    energy, psi = fci_ground_energy(h2)
    assert energy == pytest.approx(np.linalg.eigvalsh(ref)[0], abs=1e-12)
    assert psi.norm() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("name", ["h2_sto3g", "h2_631g", "lih_sto3g", "h2o_sto3g"])
def test_matches_external_fci(name, manifest):
    energy, _ = fci_ground_energy(load_table(name))
    assert energy == pytest.approx(manifest[name]["e_fci"], abs=1e-8)


def test_live_external_fci(lih):
    pyscf_fci = pytest.importorskip("pyscf.fci")
    h1, g = lih.arrays()
    e, _ = pyscf_fci.direct_spin1.kernel(np.asarray(h1), np.asarray(g), 6, (2, 2), ecore=lih.core_energy,
                                         conv_tol=1e-12)
    assert fci_ground_energy(lih)[0] == pytest.approx(e, abs=1e-8)


def test_residual_and_variational_bound(lih):
    ctx = HamiltonianContext(lih)
    basis = enumerate_determinants(6, 2, 2)
    hmat = ctx.matrix(basis.determinants)
    energy, psi = fci_ground_energy(lih, ctx)
    vec = psi.to_vector(basis.index)
    assert np.linalg.norm(hmat @ vec - energy * vec) <= 1e-8
    assert ctx.rayleigh_quotient(psi) == pytest.approx(energy, abs=1e-10)
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = rng.normal(size=len(basis))
        assert energy <= v @ (hmat @ v) / (v @ v) + 1e-10


def test_iterative_path_matches_dense(lih):
    ctx = HamiltonianContext(lih)
    hmat = ctx.matrix(enumerate_determinants(6, 2, 2).determinants)
    e_dense, v_dense = lowest_eigenpair(hmat, method="dense")
    e_iter, v_iter = lowest_eigenpair(hmat, method="lanczos")
    assert e_iter == pytest.approx(e_dense, abs=1e-10)
    assert np.linalg.norm(hmat @ v_iter - e_iter * v_iter) <= 1e-8


def test_capacity_error():
    t = IntegralTable(24, 20, 0, 0.0, {}, {})
    with pytest.raises(CapacityError):
        fci_ground_energy(t)
    assert MAX_DIMENSION == 100_000
