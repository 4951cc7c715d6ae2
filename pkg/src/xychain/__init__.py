"""Entanglement dynamics of two qubits in a dissipative Heisenberg XY chain."""

from .analysis import (
    EntanglementEvents,
    ScanError,
    critical_anisotropy_scan,
    detect_events,
    steady_concurrence_formula,
    steady_concurrence_numerical,
    steady_concurrence_rederived,
)
from .entanglement import concurrence_general, concurrence_xstate, is_xstate
from .lindblad import (
    DegenerateSteadyStateError,
    IntegrationError,
    IntegratorOptions,
    Trajectory,
    build_liouvillian,
    evolve,
    lindblad_rhs,
    steady_state,
)
from .model import (
    InvalidStateError,
    ModelParams,
    build_hamiltonian,
    build_initial_state,
    check_density_matrix,
)

__version__ = "0.1.0"
