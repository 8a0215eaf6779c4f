"""Factorized-UCC circuit simulation on determinant wavefunctions and
circuit-subspace (CSVQE) post-processing of the mid-circuit states."""

__version__ = "0.1.0"

from .exceptions import (
    CapacityError,
    ConfigError,
    CsvqeError,
    DegenerateDenominatorError,
    DegenerateOverlapError,
    FcidumpParseError,
    UnsupportedSystemError,
)
from .integrals import IntegralTable, hf_energy, parse_fcidump, read_fcidump, write_fcidump
from .wavefunction import Determinant, SparseWavefunction, SpinOrbital, inner_product, truncate
from .hamiltonian import HamiltonianContext
from .fci import FciBasis, enumerate_determinants, fci_ground_energy
from .ucc import UccCircuit, UccFactor, apply_factor, build_circuit, mp2_amplitudes, mp2_circuit, prefix_state
from .simulator import SectorSimulator
from .vqe import OptimizationTrace, OptimizerSettings, gradient_fd, optimize, random_init, run_vqe
from .subspace import (
    CircuitSubspace,
    GepSolution,
    SelectionStrategy,
    csvqe_energy,
    random_search,
    sample_statistics,
    select_states,
    solve_gep,
)
