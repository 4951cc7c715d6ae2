"""Command-line front end writing trajectories and steady-state reports as CSV.

Examples::

    xychain --mode trajectory --theta pi/4 --gamma 0.5 --omega 1 --out traj.csv
    xychain --mode sweep --sweep omega=0,0.2,0.6,1.0 --theta pi/2 --out sweep/
    xychain --mode figure --figure fig2b --out figs/
    xychain --mode steady --omega 0.2 --delta 0.2 --gamma 0.5
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .analysis import (
    detect_events,
    steady_concurrence_formula,
    steady_concurrence_numerical,
    steady_concurrence_rederived,
)
from .lindblad import IntegratorOptions, Trajectory, evolve
from .model import ModelParams, build_initial_state

MODES = ("trajectory", "sweep", "figure", "steady")
SWEEP_PARAMS = ("theta", "omega", "delta", "gamma", "j")

TRAJECTORY_HEADER = [
    "t", "concurrence",
    "rho11_re", "rho14_re", "rho14_im", "rho22_re",
    "rho23_re", "rho23_im", "rho33_re", "rho44_re",
]
STEADY_HEADER = [
    "j", "delta", "omega", "gamma",
    "c_numerical", "c_formula", "abs_diff", "c_rederived",
]


def fmt(x: float) -> str:
    # 15 significant digits; normalize negative zero
    return f"{float(x) + 0.0:.14e}"


def parse_angle(text: str) -> float:
    """Parse ``0.3``, ``pi``, ``pi/4``, ``3pi/4`` or ``3*pi/4``."""
    s = text.strip().replace(" ", "")
    m = re.fullmatch(r"([-+]?[0-9.eE+-]*?)\*?pi(?:/([0-9.eE+-]+))?", s)
    if m:
        num = m.group(1)
        factor = -1.0 if num == "-" else 1.0 if num in ("", "+") else float(num)
        den = float(m.group(2)) if m.group(2) else 1.0
        return factor * math.pi / den
    return float(s)


def load_presets() -> dict:
    with resources.files(__package__).joinpath("presets.json").open() as fh:
        return json.load(fh)


@dataclass
class RunConfig:
    mode: str = "trajectory"
    theta: float = 0.0
    omega: float = 0.2
    delta: float = 0.2
    gamma: float = 0.5
    j: float = 1.0
    t_end: float = 50.0
    dt_out: float = 0.01
    sweep_param: str | None = None
    sweep_values: list[float] = field(default_factory=list)
    figure_id: str | None = None
    output_path: str | None = None
    integrator: IntegratorOptions = field(default_factory=IntegratorOptions)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "sweep":
            if self.sweep_param not in SWEEP_PARAMS:
                raise ValueError(f"sweep parameter must be one of {SWEEP_PARAMS}")
            if not self.sweep_values:
                raise ValueError("sweep requires a non-empty value list")
        if self.mode == "figure" and self.figure_id is None:
            raise ValueError("figure mode requires --figure")
        if self.mode in ("trajectory", "sweep") and not (self.t_end > 0 and self.dt_out > 0):
            raise ValueError("t_end and dt_out must be positive")

    @property
    def params(self) -> ModelParams:
        return ModelParams(j_coupling=self.j, delta=self.delta, omega=self.omega, gamma=self.gamma)


def trajectory_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRAJECTORY_HEADER)
    for t, c, rho in zip(traj.times, traj.concurrences, traj.states):
        writer.writerow([
            fmt(t), fmt(c),
            fmt(rho[0, 0].real), fmt(rho[0, 3].real), fmt(rho[0, 3].imag),
            fmt(rho[1, 1].real), fmt(rho[1, 2].real), fmt(rho[1, 2].imag),
            fmt(rho[2, 2].real), fmt(rho[3, 3].real),
        ])
    return buf.getvalue()


def steady_csv(params: ModelParams) -> str:
    numerical = steady_concurrence_numerical(params)
    formula = steady_concurrence_formula(params)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(STEADY_HEADER)
    writer.writerow([
        fmt(params.j_coupling), fmt(params.delta), fmt(params.omega), fmt(params.gamma),
        fmt(numerical), fmt(formula), fmt(abs(numerical - formula)),
        fmt(steady_concurrence_rederived(params)),
    ])
    return buf.getvalue()


def _emit(text: str, path: str | Path | None):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _simulate(cfg: RunConfig, **overrides) -> Trajectory:
    values = {
        "theta": cfg.theta, "omega": cfg.omega, "delta": cfg.delta,
        "gamma": cfg.gamma, "j": cfg.j, "t_end": cfg.t_end,
    }
    values.update(overrides)
    params = ModelParams(
        j_coupling=values["j"], delta=values["delta"],
        omega=values["omega"], gamma=values["gamma"],
    )
    return evolve(
        build_initial_state(values["theta"]), params, values["t_end"], cfg.dt_out, cfg.integrator
    )


def run_trajectory(cfg: RunConfig) -> str:
    text = trajectory_csv(_simulate(cfg))
    _emit(text, cfg.output_path)
    return text


def _value_label(v: float) -> str:
    return repr(float(v))


def _write_curves(cfg, curves, out_dir: Path) -> list[Path]:
    """Run ``(filename, overrides)`` curves concurrently and write each CSV."""
    out_dir.mkdir(parents=True, exist_ok=True)
    with ThreadPoolExecutor() as pool:
        trajs = list(pool.map(lambda item: _simulate(cfg, **item[1]), curves))
    paths = []
    for (name, _), traj in zip(curves, trajs):
        path = out_dir / name
        path.write_text(trajectory_csv(traj))
        paths.append(path)
        ev = detect_events(traj) if traj.t_end - traj.times[0] >= 0.5 else None
        if ev is not None:
            print(
                f"{name}: C(t_end)={traj.concurrences[-1]:.6f} "
                f"deaths={[round(t, 3) for t in ev.death_times]} "
                f"births={[round(t, 3) for t in ev.birth_times]}"
            )
    return paths


def run_sweep(cfg: RunConfig) -> list[Path]:
    out_dir = Path(cfg.output_path or ".")
    curves = [
        (f"{cfg.sweep_param}_{_value_label(v)}.csv", {cfg.sweep_param: float(v)})
        for v in cfg.sweep_values
    ]
    return _write_curves(cfg, curves, out_dir)


def figure_curves(figure_id: str) -> tuple[dict, list[tuple[str, dict]]]:
    """Base parameters and per-curve overrides for a figure preset."""
    presets = load_presets()
    if figure_id not in presets:
        raise ValueError(f"unknown figure id {figure_id!r}; choose from {sorted(presets)}")
    spec = dict(presets[figure_id])
    sweep = spec.pop("sweep")
    values = spec.pop("values")
    base = {}
    for key, value in spec.items():
        if key == "theta_over_pi":
            base["theta"] = value * math.pi
        else:
            base[key] = value
    curves = []
    for v in values:
        if sweep == "theta_over_pi":
            curves.append((f"{figure_id}_theta_{_value_label(v)}pi.csv", {"theta": v * math.pi}))
        else:
            curves.append((f"{figure_id}_{sweep}_{_value_label(v)}.csv", {sweep: float(v)}))
    return base, curves


def run_figure_preset(figure_id: str, out_dir=".", dt_out: float = 0.01, integrator=None) -> list[Path]:
    base, curves = figure_curves(figure_id)
    cfg = RunConfig(
        mode="figure", figure_id=figure_id, dt_out=dt_out,
        integrator=integrator or IntegratorOptions(), **base,
    )
    return _write_curves(cfg, curves, Path(out_dir))


def run_steady(cfg: RunConfig) -> str:
    if cfg.gamma <= 0:
        raise ValueError("steady mode requires gamma > 0")
    text = steady_csv(cfg.params)
    _emit(text, cfg.output_path)
    return text


def _parse_sweep(text: str) -> tuple[str, list[float]]:
    name, sep, values = text.partition("=")
    if not sep:
        raise ValueError(f"--sweep expects <param>=v1,v2,..., got {text!r}")
    name = name.strip()
    parse = parse_angle if name == "theta" else float
    return name, [parse(v) for v in values.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="xychain",
        description="Entanglement dynamics of a dissipative two-qubit XY chain.",
    )
    p.add_argument("--mode", choices=MODES, default=None,
                   help="defaults to 'figure' with --figure, 'sweep' with --sweep, else 'trajectory'")
    p.add_argument("--theta", type=parse_angle, default=0.0,
                   help="initial state cos(theta)|dd> + sin(theta)|uu>; accepts e.g. pi/4")
    p.add_argument("--omega", type=float, default=0.2, help="magnetic field")
    p.add_argument("--delta", type=float, default=0.2, help="anisotropy")
    p.add_argument("--gamma", type=float, default=0.5, help="relaxation rate")
    p.add_argument("--j", type=float, default=1.0, help="exchange coupling")
    p.add_argument("--t-end", type=float, default=50.0)
    p.add_argument("--dt-out", type=float, default=0.01)
    p.add_argument("--sweep", default=None, metavar="PARAM=V1,V2,...")
    p.add_argument("--figure", default=None, help="preset id, e.g. fig1a ... fig3d, fig4")
    p.add_argument("--out", default=None,
                   help="output file (trajectory, steady; stdout if omitted) or directory (sweep, figure)")
    p.add_argument("--integrator", choices=("fixed", "adaptive"), default="fixed")
    p.add_argument("--dt", type=float, default=1e-3, help="RK4 step (fixed) or first step (adaptive)")
    p.add_argument("--abs-tol", type=float, default=1e-9, help="adaptive absolute tolerance")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    mode = args.mode
    if mode is None:
        mode = "figure" if args.figure else "sweep" if args.sweep else "trajectory"
    sweep_param, sweep_values = (None, [])
    if args.sweep:
        sweep_param, sweep_values = _parse_sweep(args.sweep)
    return RunConfig(
        mode=mode, theta=args.theta, omega=args.omega, delta=args.delta,
        gamma=args.gamma, j=args.j, t_end=args.t_end, dt_out=args.dt_out,
        sweep_param=sweep_param, sweep_values=sweep_values,
        figure_id=args.figure, output_path=args.out,
        integrator=IntegratorOptions(mode=args.integrator, dt=args.dt, abs_tol=args.abs_tol),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.mode == "trajectory":
            run_trajectory(cfg)
        elif cfg.mode == "sweep":
            run_sweep(cfg)
        elif cfg.mode == "figure":
            run_figure_preset(cfg.figure_id, cfg.output_path or ".", cfg.dt_out, cfg.integrator)
        else:
            run_steady(cfg)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"xychain: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
