"""Command-line front end.

    rattleback <simulate|effective|classify|converge|scan|tapping>
               --config <path> [--out <dir>]

Experiments are described by a single strict JSON document (unknown keys
anywhere are rejected).  Time series go to CSV with a fixed header and 17
significant digits so that identical configs reproduce byte-identical
files; scalar results go to summary.json (or stdout for classify/tapping).

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
RATTLEBACK_THREADS caps the fan-out of scan and converge runs (default:
CPU count); the stepping kernels release the GIL, so threads scale.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .analysis import (
    convergence_study,
    detect_reversals,
    transversal_energy,
    weak_star_observable,
)
from .effective import (
    EffectiveSystem,
    InvalidRegime,
    classify,
    critical_ratio,
    effective_energy,
    effective_potential,
    oscillation_period,
    simulate_effective,
    theta_constant,
    turning_points,
)
from .integrate import IntegrationError, IntegratorConfig, Trajectory, simulate
from .model import (
    BodyInertia,
    State,
    StiffSystem,
    a_priori_bounds,
    tapping_acceleration,
)

CSV_HEADER = "t,gamma,alpha,v_gamma,v_alpha,energy,k_perp,u_perp,weak_obs"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3


class ConfigError(ValueError):
    """Malformed or incomplete experiment configuration."""


@dataclass
class ExperimentConfig:
    body: BodyInertia
    k: Optional[float] = None
    initial: State = field(default_factory=lambda: State(0.0, 0.0, 0.0, 0.0))
    T: Optional[float] = None
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    window: Optional[float] = None
    floor: Optional[float] = None
    k_ladder: Optional[list[float]] = None
    ratio_squared_grid: Optional[list[float]] = None
    out_dir: Optional[str] = None
    write_csv: bool = True
    write_json: bool = True


def _check_keys(d: dict, allowed: set[str], where: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _number(d: dict, key: str, where: str, default=None):
    if key not in d:
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {v!r}")
    return float(v)


def parse_config(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(
        doc,
        {"body", "k", "initial", "T", "integrator", "analysis", "output"},
        "config",
    )
    if "body" not in doc or not isinstance(doc["body"], dict):
        raise ConfigError("config.body object is required")
    _check_keys(doc["body"], {"i_x", "i_y", "i_z"}, "body")
    try:
        body = BodyInertia(
            _number(doc["body"], "i_x", "body"),
            _number(doc["body"], "i_y", "body"),
            _number(doc["body"], "i_z", "body"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid body: {exc}") from exc

    init = doc.get("initial", {})
    if not isinstance(init, dict):
        raise ConfigError("config.initial must be an object")
    _check_keys(init, {"gamma", "alpha", "v_gamma", "v_alpha"}, "initial")
    try:
        initial = State(
            _number(init, "gamma", "initial", 0.0),
            _number(init, "alpha", "initial", 0.0),
            _number(init, "v_gamma", "initial", 0.0),
            _number(init, "v_alpha", "initial", 0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid initial state: {exc}") from exc

    integ = doc.get("integrator", {})
    if not isinstance(integ, dict):
        raise ConfigError("config.integrator must be an object")
    _check_keys(
        integ, {"rel_tol", "abs_tol", "max_step", "dt_out", "max_energy_drift"}, "integrator"
    )
    defaults = IntegratorConfig()
    try:
        integrator = IntegratorConfig(
            rel_tol=_number(integ, "rel_tol", "integrator", defaults.rel_tol),
            abs_tol=_number(integ, "abs_tol", "integrator", defaults.abs_tol),
            max_step=_number(integ, "max_step", "integrator"),
            dt_out=_number(integ, "dt_out", "integrator"),
            max_energy_drift=_number(
                integ, "max_energy_drift", "integrator", defaults.max_energy_drift
            ),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid integrator settings: {exc}") from exc

    ana = doc.get("analysis", {})
    if not isinstance(ana, dict):
        raise ConfigError("config.analysis must be an object")
    _check_keys(ana, {"window", "floor", "k_ladder", "ratio_squared_grid"}, "analysis")
    k_ladder = None
    if "k_ladder" in ana:
        k_ladder = ana["k_ladder"]
        if not isinstance(k_ladder, list) or len(k_ladder) < 3:
            raise ConfigError("analysis.k_ladder must be a list of at least 3 stiffnesses")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in k_ladder):
            raise ConfigError("analysis.k_ladder entries must be numbers")
        k_ladder = [float(v) for v in k_ladder]
        if any(b <= a for a, b in zip(k_ladder, k_ladder[1:])):
            raise ConfigError("analysis.k_ladder must be strictly increasing")
    grid = None
    if "ratio_squared_grid" in ana:
        grid = ana["ratio_squared_grid"]
        if not isinstance(grid, list) or not grid:
            raise ConfigError("analysis.ratio_squared_grid must be a nonempty list")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in grid):
            raise ConfigError("analysis.ratio_squared_grid entries must be numbers")
        grid = [float(v) for v in grid]
        if any(v <= 0 for v in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("analysis.ratio_squared_grid must be positive, strictly increasing")

    out = doc.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("config.output must be an object")
    _check_keys(out, {"dir", "csv", "json"}, "output")
    out_dir = out.get("dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigError("output.dir must be a string")
    for flag in ("csv", "json"):
        if flag in out and not isinstance(out[flag], bool):
            raise ConfigError(f"output.{flag} must be a boolean")

    T = _number(doc, "T", "config")
    if T is not None and T <= 0:
        raise ConfigError("T must be positive")
    k = _number(doc, "k", "config")

    return ExperimentConfig(
        body=body,
        k=k,
        initial=initial,
        T=T,
        integrator=integrator,
        window=_number(ana, "window", "analysis"),
        floor=_number(ana, "floor", "analysis"),
        k_ladder=k_ladder,
        ratio_squared_grid=grid,
        out_dir=out_dir,
        write_csv=out.get("csv", True),
        write_json=out.get("json", True),
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(doc)


def _threads() -> int:
    raw = os.environ.get("RATTLEBACK_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"RATTLEBACK_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"RATTLEBACK_THREADS must be >= 1, got {n}")
    return n


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_trajectory_csv(path: Path, traj: Trajectory, sys: Optional[StiffSystem]) -> None:
    if sys is not None:
        k_perp, u_perp = transversal_energy(traj, sys)
    else:
        k_perp = np.zeros(len(traj))
        u_perp = np.zeros(len(traj))
    weak = weak_star_observable(traj, traj.inertia)
    lines = [CSV_HEADER]
    for j in range(len(traj)):
        row = (
            traj.times[j],
            traj.states[j, 0],
            traj.states[j, 1],
            traj.states[j, 2],
            traj.states[j, 3],
            traj.energy[j],
            k_perp[j],
            u_perp[j],
            weak[j],
        )
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _bounds_block(traj: Trajectory, sys: StiffSystem) -> dict:
    v_bound, gamma_bound = a_priori_bounds(float(traj.energy[0]), sys.inertia, sys.k)
    max_gamma = float(np.max(np.abs(traj.gamma)))
    max_vg = float(np.max(np.abs(traj.v_gamma)))
    max_va = float(np.max(np.abs(traj.v_alpha)))
    slack = 1.0 + 1e-6
    return {
        "v_bound": v_bound,
        "gamma_bound": gamma_bound,
        "max_abs_gamma": max_gamma,
        "max_abs_v_gamma": max_vg,
        "max_abs_v_alpha": max_va,
        "ok": bool(
            max_gamma <= gamma_bound * slack
            and max_vg <= v_bound * slack
            and max_va <= v_bound * slack
        ),
    }


def _reversal_block(report) -> dict:
    return {
        "count": report.count,
        "times": list(report.reversal_times),
        "monotone": report.monotone,
        "window": report.window,
        "floor": report.floor,
    }


def cmd_simulate(config: ExperimentConfig, out_dir: Path) -> int:
    if config.k is None:
        raise ConfigError("simulate requires config.k")
    if config.T is None:
        raise ConfigError("simulate requires config.T")
    sys_ = StiffSystem(config.body, config.k)
    traj = simulate(sys_, config.initial, config.T, config.integrator)
    report = detect_reversals(traj, window=config.window, floor=config.floor)
    if config.write_csv:
        _write_trajectory_csv(out_dir / "trajectory.csv", traj, sys_)
    if config.write_json:
        _write_json(
            out_dir / "summary.json",
            {
                "command": "simulate",
                "k": config.k,
                "T": config.T,
                "dt_out": traj.dt_out,
                "E0": float(traj.energy[0]),
                "energy_drift": traj.meta.max_rel_energy_drift,
                "bounds": _bounds_block(traj, sys_),
                "reversals": _reversal_block(report),
                "steps": {
                    "accepted": traj.meta.steps_accepted,
                    "rejected": traj.meta.steps_rejected,
                },
            },
        )
    return EXIT_OK


def cmd_effective(config: ExperimentConfig, out_dir: Path) -> int:
    if config.T is None:
        raise ConfigError("effective requires config.T")
    s0 = config.initial
    theta = theta_constant(config.body, s0.alpha, s0.v_gamma)
    eff = EffectiveSystem(config.body, theta)
    traj = simulate_effective(eff, s0.alpha, s0.v_alpha, config.T, config.integrator)

    regime = None
    ratio = None
    if s0.v_gamma != 0.0 and s0.v_alpha != 0.0 and s0.alpha == 0.0:
        regime = classify(config.body, s0.v_gamma, s0.v_alpha).value
        ratio = (s0.v_alpha / s0.v_gamma) ** 2

    turning = None
    period = None
    e0 = effective_energy(eff, s0.alpha, s0.v_alpha)
    if config.body.i_y < config.body.i_x and theta > 0.0:
        if e0 < effective_potential(eff, 0.5 * math.pi):
            turning = turning_points(eff, e0)
            if turning is not None and 0.0 < turning < 0.5 * math.pi:
                period = oscillation_period(eff, e0)

    if config.write_csv:
        _write_trajectory_csv(out_dir / "trajectory.csv", traj, None)
    if config.write_json:
        _write_json(
            out_dir / "summary.json",
            {
                "command": "effective",
                "T": config.T,
                "dt_out": traj.dt_out,
                "theta": theta,
                "regime": regime,
                "ratio": ratio,
                "critical_ratio": critical_ratio(config.body),
                "turning_point": turning,
                "period": period,
                "E0": e0,
                "energy_drift": traj.meta.max_rel_energy_drift,
            },
        )
    return EXIT_OK


def cmd_classify(config: ExperimentConfig) -> int:
    s0 = config.initial
    if s0.v_gamma == 0.0 or s0.v_alpha == 0.0:
        raise ConfigError("classify requires nonzero initial.v_gamma and initial.v_alpha")
    regime = classify(config.body, s0.v_gamma, s0.v_alpha)
    print(
        json.dumps(
            {
                "regime": regime.value,
                "ratio": (s0.v_alpha / s0.v_gamma) ** 2,
                "critical_ratio": critical_ratio(config.body),
                "theta": theta_constant(config.body, 0.0, s0.v_gamma),
            },
            sort_keys=True,
        )
    )
    return EXIT_OK


def cmd_converge(config: ExperimentConfig, out_dir: Path) -> int:
    if config.k_ladder is None:
        raise ConfigError("converge requires analysis.k_ladder")
    if config.T is None:
        raise ConfigError("converge requires config.T")
    window = config.window if config.window is not None else 0.5
    report = convergence_study(
        config.body,
        config.initial,
        config.k_ladder,
        config.T,
        config.integrator,
        window=window,
        max_workers=_threads(),
    )

    def strictly_decreasing_first_last(arr) -> bool:
        return bool(arr[-1] < arr[0])

    if config.write_csv:
        lines = ["k,sup_alpha_err,sup_dalpha_err,sup_gamma,weak_star_err,equip_gap"]
        for i, k in enumerate(report.k_values):
            lines.append(
                ",".join(
                    _fmt(v)
                    for v in (
                        k,
                        report.sup_alpha_err[i],
                        report.sup_dalpha_err[i],
                        report.sup_gamma[i],
                        report.weak_star_err[i],
                        report.equipartition_gap[i],
                    )
                )
            )
        (out_dir / "convergence.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if config.write_json:
        _write_json(
            out_dir / "summary.json",
            {
                "command": "converge",
                "T": config.T,
                "theta": report.theta,
                "window": report.window,
                "dt_out": report.dt_out,
                "k_values": list(report.k_values),
                "sup_alpha_err": report.sup_alpha_err.tolist(),
                "sup_dalpha_err": report.sup_dalpha_err.tolist(),
                "sup_gamma": report.sup_gamma.tolist(),
                "weak_star_err": report.weak_star_err.tolist(),
                "equipartition_gap": report.equipartition_gap.tolist(),
                "decreasing_first_vs_last": {
                    "sup_alpha_err": strictly_decreasing_first_last(report.sup_alpha_err),
                    "sup_dalpha_err": strictly_decreasing_first_last(report.sup_dalpha_err),
                    "weak_star_err": strictly_decreasing_first_last(report.weak_star_err),
                    "equipartition_gap": strictly_decreasing_first_last(
                        report.equipartition_gap
                    ),
                },
            },
        )
    return EXIT_OK


def cmd_scan(config: ExperimentConfig, out_dir: Path) -> int:
    if config.k is None:
        raise ConfigError("scan requires config.k")
    if config.T is None:
        raise ConfigError("scan requires config.T")
    if config.ratio_squared_grid is None:
        raise ConfigError("scan requires analysis.ratio_squared_grid")
    if config.initial.v_gamma == 0.0:
        raise ConfigError("scan requires nonzero initial.v_gamma")
    sys_ = StiffSystem(config.body, config.k)
    v_gamma0 = config.initial.v_gamma

    def one(ratio_sq: float):
        s0 = State(0.0, 0.0, v_gamma0, math.sqrt(ratio_sq) * abs(v_gamma0))
        traj = simulate(sys_, s0, config.T, config.integrator)
        report = detect_reversals(traj, window=config.window, floor=config.floor)
        return ratio_sq, report.count, report.monotone

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(one, config.ratio_squared_grid))

    reversing = [r for r, count, _ in rows if count >= 1]
    monotone = [r for r, _, mono in rows if mono]
    transition = None
    if reversing and monotone:
        transition = 0.5 * (max(reversing) + min(monotone))

    if config.write_csv:
        lines = ["ratio_squared,reversal_count,monotone"]
        for r, count, mono in rows:
            lines.append(f"{_fmt(r)},{count},{str(mono).lower()}")
        (out_dir / "scan.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if config.write_json:
        _write_json(
            out_dir / "summary.json",
            {
                "command": "scan",
                "k": config.k,
                "T": config.T,
                "rows": [
                    {"ratio_squared": r, "reversal_count": c, "monotone": m}
                    for r, c, m in rows
                ],
                "empirical_transition_ratio_squared": transition,
                "critical_ratio": critical_ratio(config.body),
            },
        )
    return EXIT_OK


def cmd_tapping(config: ExperimentConfig) -> int:
    if config.k is None:
        raise ConfigError("tapping requires config.k")
    s0 = config.initial
    if s0.v_alpha != 0.0 or s0.gamma != 0.0:
        raise ConfigError("tapping requires initial.v_alpha == 0 and initial.gamma == 0")
    closed = tapping_acceleration(config.body, s0.alpha, s0.v_gamma)

    h = 1e-4
    sys_ = StiffSystem(config.body, config.k)
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14, dt_out=h)
    traj = simulate(sys_, s0, h, cfg)
    fd = float(traj.v_alpha[-1] - traj.v_alpha[0]) / h

    print(
        json.dumps(
            {
                "closed_form": closed,
                "finite_difference": fd,
                "step": h,
                "abs_error": abs(fd - closed),
            },
            sort_keys=True,
        )
    )
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="rattleback",
        description="Simulate and analyse the spring-constrained spinning body.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "effective", "classify", "converge", "scan", "tapping"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON experiment config")
        p.add_argument("--out", default=None, help="output directory (overrides output.dir)")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        out_dir = Path(args.out or config.out_dir or ".")
        if args.command in ("simulate", "effective", "converge", "scan"):
            out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            return cmd_simulate(config, out_dir)
        if args.command == "effective":
            return cmd_effective(config, out_dir)
        if args.command == "classify":
            return cmd_classify(config)
        if args.command == "converge":
            return cmd_converge(config, out_dir)
        if args.command == "scan":
            return cmd_scan(config, out_dir)
        return cmd_tapping(config)
    except (ConfigError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, InvalidRegime) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
