"""Wavepacket scattering of spin-1/2 fermions in the one-dimensional Hubbard model."""

__version__ = "0.1.0"

from .basis import DOWN, UP, ManyBodyState, SectorBasis, enumerate_sector, state_from_terms
from .bethe import collision_angle, phase_shift, reflection
from .hamiltonian import SparseOperator, build_equivalent_chain, build_hubbard, build_k_subspace_basis
from .metrics import concurrence, fidelity, spin_reduced_dm
from .propagator import NumericContractError, evolve, evolve_series
from .spin_smatrix import cascade, collision_schedule, heisenberg_gate, pair_smatrix
from .wavepacket import WavepacketSpec, gaussian_wavepacket, product_state

__all__ = [
    "DOWN",
    "UP",
    "ManyBodyState",
    "NumericContractError",
    "SectorBasis",
    "SparseOperator",
    "WavepacketSpec",
    "build_equivalent_chain",
    "build_hubbard",
    "build_k_subspace_basis",
    "cascade",
    "collision_angle",
    "collision_schedule",
    "concurrence",
    "enumerate_sector",
    "evolve",
    "evolve_series",
    "fidelity",
    "gaussian_wavepacket",
    "heisenberg_gate",
    "pair_smatrix",
    "phase_shift",
    "product_state",
    "reflection",
    "spin_reduced_dm",
    "state_from_terms",
]
