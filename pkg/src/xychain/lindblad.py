"""Markovian relaxation dynamics of the XY pair.

The generator is

    d rho/dt = -i[H, rho] + gamma * sum_j (S_j^- rho S_j^+ - 1/2 {S_j^+ S_j^-, rho})

with independent lowering operators on each qubit. Superoperators act on
column-major (Fortran order) vectorized density matrices, so that
``vec(A X B) = (B^T kron A) vec(X)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.integrate import solve_ivp

from .entanglement import concurrence_general
from .model import (
    LOWERING_OPERATORS,
    InvalidStateError,
    ModelParams,
    build_hamiltonian,
    check_density_matrix,
)

logger = logging.getLogger(__name__)

POSITIVITY_FAILURE_TOL = 1e-6
MIN_STEP = 1e-12
NULL_SPACE_TOL = 1e-8


class IntegrationError(RuntimeError):
    """The integrator failed (step underflow or loss of positivity)."""


class DegenerateSteadyStateError(ValueError):
    """The Liouvillian has more than one stationary state."""


@dataclass(frozen=True)
class IntegratorOptions:
    """Time-stepping configuration.

    ``fixed`` is classical RK4 with step ``dt`` (shrunk so that it divides
    the output spacing). ``adaptive`` is the Dormand-Prince 4(5) pair with
    absolute tolerance ``abs_tol``.
    """

    mode: Literal["fixed", "adaptive"] = "fixed"
    dt: float = 1e-3
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9

    def __post_init__(self):
        if self.mode not in ("fixed", "adaptive"):
            raise ValueError(f"unknown integrator mode {self.mode!r}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")


@dataclass
class Trajectory:
    times: np.ndarray  # (N,)
    states: np.ndarray  # (N, 4, 4) complex
    concurrences: np.ndarray  # (N,)
    params: ModelParams
    options: IntegratorOptions = field(default_factory=IntegratorOptions)

    def __len__(self):
        return len(self.times)

    @property
    def t_end(self) -> float:
        return float(self.times[-1])


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    return np.asarray(v).reshape(4, 4, order="F")


def lindblad_rhs(rho: np.ndarray, params: ModelParams, check: bool = True) -> np.ndarray:
    """Time derivative of rho under the master equation."""
    if check:
        rho = check_density_matrix(rho, herm_tol=1e-10, trace_tol=1e-9)
    else:
        rho = np.asarray(rho, dtype=complex)
    h = build_hamiltonian(params)
    out = -1j * (h @ rho - rho @ h)
    if params.gamma:
        for s in LOWERING_OPERATORS:
            sd = s.conj().T
            n = sd @ s
            out += params.gamma * (s @ rho @ sd - 0.5 * (n @ rho + rho @ n))
    return out


def build_liouvillian(params: ModelParams) -> np.ndarray:
    """16x16 matrix L with ``L @ vec(rho) == vec(lindblad_rhs(rho))``."""
    h = build_hamiltonian(params)
    eye = np.eye(4)
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for s in LOWERING_OPERATORS:
        n = s.conj().T @ s
        lv += params.gamma * (
            np.kron(s.conj(), s) - 0.5 * np.kron(eye, n) - 0.5 * np.kron(n.T, eye)
        )
    return lv


def rk4_propagator(liouvillian: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step of ``dv/dt = L v`` as a matrix.

    For a linear autonomous system the four stages collapse to the degree-4
    Taylor polynomial ``I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24``.
    """
    a = h * liouvillian
    a2 = a @ a
    a3 = a2 @ a
    return np.eye(a.shape[0]) + a + a2 / 2 + a3 / 6 + a2 @ a2 / 24


def _output_grid(t_end: float, dt_out: float) -> np.ndarray:
    n = int(math.floor(t_end / dt_out + 1e-9))
    return np.arange(n + 1) * dt_out


def _hermitize(states: np.ndarray) -> np.ndarray:
    return 0.5 * (states + np.swapaxes(states, -1, -2).conj())


def _evolve_fixed(v0, lv, n_out, dt_out, dt):
    n_sub = max(1, math.ceil(dt_out / dt - 1e-9))
    h = dt_out / n_sub
    if h < MIN_STEP:
        raise IntegrationError(f"step size {h:.3e} underflows")
    prop = np.linalg.matrix_power(rk4_propagator(lv, h), n_sub)
    out = np.empty((n_out, 16), dtype=complex)
    v = v0
    for k in range(n_out):
        rho = unvec(v)
        v = vec(0.5 * (rho + rho.conj().T))
        out[k] = v
        v = prop @ v
    return out


def _evolve_adaptive(v0, lv, times, opts):
    sol = solve_ivp(
        lambda _t, y: lv @ y,
        (0.0, float(times[-1])),
        v0,
        method="RK45",
        t_eval=times,
        atol=opts.abs_tol,
        rtol=opts.rel_tol,
        first_step=min(opts.dt, float(times[-1])),
    )
    if not sol.success:
        raise IntegrationError(f"adaptive integration failed: {sol.message}")
    return sol.y.T


def evolve(
    rho0: np.ndarray,
    params: ModelParams,
    t_end: float,
    dt_out: float,
    opts: IntegratorOptions | None = None,
) -> Trajectory:
    """Integrate the master equation and sample at ``0, dt_out, ..., t_end``."""
    opts = opts or IntegratorOptions()
    if not (math.isfinite(t_end) and t_end > 0):
        raise ValueError(f"t_end must be positive, got {t_end}")
    if not (math.isfinite(dt_out) and dt_out > 0):
        raise ValueError(f"dt_out must be positive, got {dt_out}")
    rho0 = check_density_matrix(rho0)
    times = _output_grid(t_end, dt_out)
    lv = build_liouvillian(params)
    v0 = vec(rho0)
    if opts.mode == "fixed":
        flat = _evolve_fixed(v0, lv, len(times), dt_out, opts.dt)
    else:
        flat = _evolve_adaptive(v0, lv, times, opts)
    states = _hermitize(flat.reshape(-1, 4, 4).transpose(0, 2, 1))

    min_eig = float(np.min(np.linalg.eigvalsh(states)))
    if min_eig < -POSITIVITY_FAILURE_TOL:
        raise IntegrationError(f"positivity lost (min eigenvalue {min_eig:.3e})")
    logger.debug("evolved %d samples, min eigenvalue %.2e", len(times), min_eig)

    return Trajectory(
        times=times,
        states=states,
        concurrences=concurrence_general(states),
        params=params,
        options=opts,
    )


def steady_state(params: ModelParams) -> np.ndarray:
    """Unique stationary state from the null space of the Liouvillian.

    Uses the right singular vector of the smallest singular value. Raises
    DegenerateSteadyStateError when the two smallest singular values are
    both below 1e-8.
    """
    if params.gamma == 0:
        raise ValueError("steady state requires gamma > 0 (not unique for closed dynamics)")
    lv = build_liouvillian(params)
    _, sv, vh = np.linalg.svd(lv)
    if sv[-2] < NULL_SPACE_TOL:
        raise DegenerateSteadyStateError(
            f"null space has dimension >= 2 (singular values {sv[-2]:.2e}, {sv[-1]:.2e})"
        )
    rho = unvec(vh[-1].conj())
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        raise InvalidStateError("null vector is traceless; cannot normalize")
    rho = rho / tr
    rho = 0.5 * (rho + rho.conj().T)
    return check_density_matrix(rho)
