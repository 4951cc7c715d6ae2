"""Sudden death/birth detection, steady-state concurrence and anisotropy scans."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .entanglement import concurrence_general
from .lindblad import IntegratorOptions, Trajectory, evolve, steady_state
from .model import ModelParams, build_initial_state

DEFAULT_EPS = 1e-6
DEFAULT_MIN_WINDOW = 0.5
LONG_TIME = 200.0


@dataclass
class EntanglementEvents:
    """Sudden death (ESD) and birth (ESB) times found on a trajectory.

    ``zero_intervals`` holds ``(start, end)`` sample times of every sustained
    zero-concurrence window; a death time is the first zero sample of a window
    entered from C >= eps, a birth time is the first sample with C >= eps
    after a window.
    """

    death_times: list[float] = field(default_factory=list)
    birth_times: list[float] = field(default_factory=list)
    steady_value: float = 0.0
    zero_intervals: list[tuple[float, float]] = field(default_factory=list)
    t_start: float = 0.0
    t_end: float = 0.0

    @property
    def sudden_birth(self) -> bool:
        """Entanglement created after a delay from an initially separable state."""
        return bool(
            self.zero_intervals
            and self.zero_intervals[0][0] == self.t_start
            and self.birth_times
            and (not self.death_times or self.birth_times[0] < self.death_times[0])
        )

    @property
    def sudden_death(self) -> bool:
        return bool(self.death_times)

    @property
    def permanent_death(self) -> bool:
        """The last death is never followed by a birth before the trajectory ends."""
        return bool(
            self.death_times and (not self.birth_times or self.birth_times[-1] < self.death_times[-1])
        )


def detect_events(
    traj: Trajectory | tuple[np.ndarray, np.ndarray],
    eps: float = DEFAULT_EPS,
    min_window: float = DEFAULT_MIN_WINDOW,
) -> EntanglementEvents:
    """Find sustained zero-concurrence windows and the transitions around them.

    A window is a maximal run of samples with C < eps whose duration is at
    least min_window. Shorter runs (instantaneous touches of an oscillating
    trace) are ignored. ``traj`` may also be a ``(times, concurrences)`` pair.
    """
    if eps <= 0 or min_window <= 0:
        raise ValueError("eps and min_window must be positive")
    if isinstance(traj, Trajectory):
        times, conc = traj.times, traj.concurrences
    else:
        times, conc = (np.asarray(a, dtype=float) for a in traj)
    if len(times) < 2 or times[-1] - times[0] < min_window:
        raise ValueError(
            f"trajectory spans {times[-1] - times[0] if len(times) else 0:.3g}, "
            f"shorter than min_window={min_window}"
        )

    zero = conc < eps
    n = len(conc)
    events = EntanglementEvents(
        steady_value=float(conc[-1]), t_start=float(times[0]), t_end=float(times[-1])
    )
    # run boundaries: indices where the zero flag changes
    edges = np.flatnonzero(np.diff(zero.astype(np.int8))) + 1
    starts = np.concatenate(([0], edges))
    stops = np.concatenate((edges, [n]))
    for i, j in zip(starts, stops):
        if not zero[i]:
            continue
        last = j - 1
        if times[last] - times[i] < min_window:
            continue
        events.zero_intervals.append((float(times[i]), float(times[last])))
        if i > 0:
            events.death_times.append(float(times[i]))
        if j < n:
            events.birth_times.append(float(times[j]))
    return events


def steady_concurrence_formula(params: ModelParams) -> float:
    """Published closed form
    ``(2 D sqrt(4 w^2 + D^2) - 2 D^2) / (4 (w^2 + D^2) + g^2)``, clamped at 0.

    Kept as printed for comparison; see :func:`steady_concurrence_rederived`
    for the expression that matches the stationary state of the generator.
    """
    d, w, g = params.delta, params.omega, params.gamma
    num = 2 * d * math.sqrt(4 * w**2 + d**2) - 2 * d**2
    return max(0.0, num / (4 * (w**2 + d**2) + g**2))


def steady_concurrence_rederived(params: ModelParams) -> float:
    """Closed-form steady concurrence obtained by solving the stationary
    equations directly: ``(2|D| sqrt(4 w^2 + g^2) - 2 D^2) / (4 (w^2 + D^2) + g^2)``.

    The stationary state has r11 = r22 = r33 = D^2 / (4 D^2 + g^2 + 4 w^2) and
    ``r14 = -i D (r44 - r11) / (g + 2 i w)``, which gives the expression above
    via ``C = 2(|r14| - r22)``. Requires gamma > 0 or omega != 0.
    """
    d, w, g = params.delta, params.omega, params.gamma
    den = 4 * (w**2 + d**2) + g**2
    if den == 0:
        return 0.0
    num = 2 * abs(d) * math.sqrt(4 * w**2 + g**2) - 2 * d**2
    return max(0.0, num / den)


def steady_concurrence_numerical(params: ModelParams) -> float:
    """Concurrence of the Liouvillian null-space state."""
    return concurrence_general(steady_state(params))


def terminal_concurrences(
    params: ModelParams,
    thetas,
    t_end: float = LONG_TIME,
    dt_out: float = 1.0,
    opts: IntegratorOptions | None = None,
) -> np.ndarray:
    """Concurrence at ``t_end`` for each initial angle, evolved concurrently."""

    def run(theta):
        return evolve(build_initial_state(theta), params, t_end, dt_out, opts).concurrences[-1]

    with ThreadPoolExecutor() as pool:
        return np.array(list(pool.map(run, thetas)))


class ScanError(ValueError):
    """The anisotropy predicate has no single sign change in the scanned range."""

    def __init__(self, message, sign_changes=()):
        super().__init__(message)
        self.sign_changes = list(sign_changes)


PREDICATES = {
    # delayed creation of entanglement from the initial zero window
    "esb": lambda ev: ev.sudden_birth,
    # any exit from a sustained zero window
    "birth": lambda ev: bool(ev.birth_times),
}


def critical_anisotropy_scan(
    theta: float,
    omega: float,
    gamma: float,
    j: float = 1.0,
    delta_range: tuple[float, float] = (0.05, 2.0),
    t_end: float = 30.0,
    *,
    n_grid: int = 21,
    resolution: float = 1e-3,
    predicate: str = "esb",
    dt_out: float = 0.01,
    eps: float = DEFAULT_EPS,
    min_window: float = DEFAULT_MIN_WINDOW,
    opts: IntegratorOptions | None = None,
) -> float:
    """Locate the anisotropy above which sudden birth disappears.

    The predicate is evaluated on a uniform grid of ``n_grid`` values to check
    that it switches exactly once from true to false, then the bracketing
    interval is bisected down to ``resolution``. Returns the midpoint of the
    final bracket.
    """
    lo, hi = map(float, delta_range)
    if not (0 < lo < hi):
        raise ValueError(f"delta_range must be positive and ordered, got {delta_range}")
    if n_grid < 2 or resolution <= 0:
        raise ValueError("n_grid must be >= 2 and resolution positive")
    try:
        test = PREDICATES[predicate]
    except KeyError:
        raise ValueError(f"unknown predicate {predicate!r}; choose from {sorted(PREDICATES)}")
    rho0 = build_initial_state(theta)
    base = ModelParams(j_coupling=j, delta=lo, omega=omega, gamma=gamma)

    def holds(delta):
        traj = evolve(rho0, replace(base, delta=float(delta)), t_end, dt_out, opts)
        return test(detect_events(traj, eps=eps, min_window=min_window))

    grid = np.linspace(lo, hi, n_grid)
    with ThreadPoolExecutor() as pool:
        flags = list(pool.map(holds, grid))

    changes = [
        (float(grid[k]), float(grid[k + 1]))
        for k in range(n_grid - 1)
        if flags[k] != flags[k + 1]
    ]
    if not changes:
        raise ScanError(
            f"predicate {predicate!r} is {flags[0]} over the whole range {delta_range}"
        )
    if len(changes) > 1 or not flags[0]:
        raise ScanError(
            f"predicate {predicate!r} is not monotone (true below, false above); "
            f"sign changes in {changes}",
            changes,
        )

    a, b = changes[0]
    while b - a > resolution:
        mid = 0.5 * (a + b)
        if holds(mid):
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)
