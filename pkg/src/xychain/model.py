"""Two-qubit anisotropic XY model in a longitudinal field.

All matrices use the product basis ``|uu>, |ud>, |du>, |dd>`` (u = spin up,
d = spin down), spin-1/2 operators with S^z eigenvalues +-1/2 and hbar = 1.
The field symbol written as omega in the Hamiltonian is the same parameter
labelled Omega in plot captions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BASIS_LABELS = ("uu", "ud", "du", "dd")

# Single-spin lowering operator in the (u, d) basis: maps |u> -> |d>.
_SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
_ID2 = np.eye(2, dtype=complex)

# S1^- = |du><uu| + |dd><ud|,  S2^- = |ud><uu| + |dd><du|
S1_MINUS = np.kron(_SIGMA_MINUS, _ID2)
S2_MINUS = np.kron(_ID2, _SIGMA_MINUS)
LOWERING_OPERATORS = (S1_MINUS, S2_MINUS)

# Entries allowed to be nonzero in an X-shaped two-qubit state.
X_PATTERN = np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 1, 1, 0],
        [1, 0, 0, 1],
    ],
    dtype=bool,
)


class InvalidStateError(ValueError):
    """Raised when a matrix fails the density-matrix checks."""


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the dissipative XY pair.

    j_coupling is the symmetric exchange J = (Jx + Jy)/2, delta the
    anisotropy (Jx - Jy)/2, omega the field along z and gamma the
    single-qubit relaxation rate.
    """

    j_coupling: float = 1.0
    delta: float = 0.2
    omega: float = 0.2
    gamma: float = 0.5

    def __post_init__(self):
        for name in ("j_coupling", "delta", "omega", "gamma"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)):
                raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, float(value))
        if self.gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")


def build_hamiltonian(params: ModelParams) -> np.ndarray:
    """Return the 4x4 Hamiltonian

    ``J (S1+ S2- + S1- S2+) + delta (S1+ S2+ + S1- S2-) + omega (S1z + S2z)``.

    In the fixed basis only the field diagonal (omega, 0, 0, -omega), the
    exchange pair (ud <-> du) and the double-flip pair (uu <-> dd) survive.
    """
    if not isinstance(params, ModelParams):
        raise TypeError("params must be a ModelParams instance")
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = params.omega
    h[3, 3] = -params.omega
    h[1, 2] = h[2, 1] = params.j_coupling
    h[0, 3] = h[3, 0] = params.delta
    return h


def build_initial_state(theta: float) -> np.ndarray:
    """Projector onto ``cos(theta)|dd> + sin(theta)|uu>``."""
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    psi = np.zeros(4, dtype=complex)
    psi[0] = math.sin(theta)
    psi[3] = math.cos(theta)
    return np.outer(psi, psi.conj())


def check_density_matrix(
    rho: np.ndarray,
    herm_tol: float = 1e-12,
    trace_tol: float = 1e-12,
    psd_tol: float = 1e-9,
) -> np.ndarray:
    """Validate a 4x4 density matrix and return it as a complex array.

    Raises InvalidStateError if rho is not Hermitian, not of unit trace or
    has an eigenvalue below ``-psd_tol``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvalidStateError(f"expected a 4x4 matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("density matrix has non-finite entries")
    herm_err = np.max(np.abs(rho - rho.conj().T))
    if herm_err > herm_tol:
        raise InvalidStateError(f"not Hermitian (max deviation {herm_err:.3e})")
    trace_err = abs(np.trace(rho) - 1.0)
    if trace_err > trace_tol:
        raise InvalidStateError(f"trace differs from 1 by {trace_err:.3e}")
    min_eig = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if min_eig < -psd_tol:
        raise InvalidStateError(f"not positive semidefinite (min eigenvalue {min_eig:.3e})")
    return rho


def off_x_magnitude(rho: np.ndarray) -> float:
    """Largest modulus among the eight entries outside the X pattern."""
    rho = np.asarray(rho)
    return float(np.max(np.abs(rho[..., ~X_PATTERN]), initial=0.0))
