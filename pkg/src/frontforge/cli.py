"""Command-line entry point: ``frontforge <command> [--config run.json] [overrides]``.

Exit status: 0 success, 2 invalid input, 3 solver did not converge
(MaxIter / Indeterminate), 4 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import os
import sys
from contextlib import nullcontext
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import decay_rate, verify_front
from .artifacts import emit_plotdata, write_csv, write_json
from .chain import (conserved_quantities, denormalize_front, init_front, init_riemann,
                    measured_speed, simulate, transition_is_monotone, tw_deviation, write_snapshots)
from .errors import (BadParams, ComplexSoundSpeed, ConfigError, DegenerateJump, FrontForgeError,
                     Indeterminate, MismatchedShock, NonHyperbolic, NonPositive, Sonic)
from .potential import (PotentialSpec, area_bound_constants, build_normalized, builtin_spec,
                        check_assumptions)
from .profile import Grid, average
from .psystem import classify, complete_shock, jump_residuals, trace_curve, turning_points, write_curves_csv
from .solver import MAX_ITER, SolverConfig, solve_front

log = logging.getLogger("frontforge")

COMMANDS = ("check-potential", "shock-curve", "solve-front", "decay-rate", "simulate-chain")

EXIT_OK, EXIT_INVALID, EXIT_NOCONV, EXIT_NUMERIC = 0, 2, 3, 4
_INVALID = (ConfigError, BadParams, NonHyperbolic, DegenerateJump, Sonic, NonPositive,
            MismatchedShock, ComplexSoundSpeed)

DEFAULTS = {
    "potential": {"builtin": "cubic_force", "params": [0.4]},
    "shock": {"r_minus": -1.0, "r_plus": 1.0, "v_minus": None, "branch": 2},
    "grid": {"h": 0.05, "M": 40.0},
    "solver": {"lam": 1.0, "tol": 1e-10, "max_iter": 10000, "pin_every": 1, "diag_window": 50},
    "chain": {"N": 2000, "dt": 0.01, "t_end": 10.0, "n_snapshots": 11, "init": "front", "smoothing": 2.0},
    "curve": {"interval": [-1.0, 1.0], "bounds": None, "step": 0.02, "max_points": 2000, "n_grid": 401},
    "decay": {"lambda": None},
    "output_dir": "frontforge-out",
    "plots": True,
}


def _merge(base: dict, extra: dict, path="") -> dict:
    out = copy.deepcopy(base)
    for key, val in extra.items():
        if key not in base:
            raise ConfigError(f"unknown config key {path + key!r}")
        if isinstance(base[key], dict) and key != "potential":
            if not isinstance(val, dict):
                raise ConfigError(f"config key {path + key!r} must be an object")
            out[key] = _merge(base[key], val, path + key + ".")
        else:
            out[key] = val
    return out


def resolve_config(command: str, config: dict | None = None, overrides: dict | None = None) -> dict:
    """Defaults, then the config file, then scalar command-line overrides."""
    config = dict(config or {})
    file_cmd = config.pop("command", None)
    if file_cmd is not None and file_cmd != command:
        raise ConfigError(f"config is for command {file_cmd!r}, not {command!r}")
    cfg = _merge(DEFAULTS, config)
    cfg["command"] = command
    ov = overrides or {}
    if ov.get("lambda") is not None:
        if command == "decay-rate":
            cfg["decay"]["lambda"] = ov["lambda"]
        else:
            cfg["solver"]["lam"] = ov["lambda"]
    for key, section in (("tol", "solver"), ("h", "grid"), ("M", "grid")):
        if ov.get(key) is not None:
            cfg[section][key] = ov[key]
    if ov.get("output_dir") is not None:
        cfg["output_dir"] = ov["output_dir"]
    if ov.get("no_plots"):
        cfg["plots"] = False
    return cfg


def base_potential(cfg: dict) -> tuple[PotentialSpec, str]:
    pot = cfg["potential"]
    if not isinstance(pot, dict):
        raise ConfigError("potential must be an object")
    if "builtin" in pot:
        params = tuple(pot.get("params", ()))
        return builtin_spec(pot["builtin"], params), f"{pot['builtin']}{params if params else ''}"
    try:
        return PotentialSpec.from_dict(pot), "custom"
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed potential: {exc}") from exc


def _shock(cfg, p):
    sh = cfg["shock"]
    branch = int(sh["branch"])
    rm, rp = float(sh["r_minus"]), float(sh["r_plus"])
    s = complete_shock(p, rm, rp, 0.0, branch)
    vm = sh["v_minus"]
    if vm is None:
        # frame with <v> = 0
        vm = 0.5 * s.sigma * s.r_jump
    return complete_shock(p, rm, rp, float(vm), branch)


def _validate(cfg):
    """Everything that can be checked before any artifact is written."""
    p, label = base_potential(cfg)
    grid = Grid(float(cfg["grid"]["h"]), float(cfg["grid"]["M"]))
    solver = SolverConfig(**cfg["solver"])
    return p, label, grid, solver


def _thread_limit():
    n = os.environ.get("FRONT_FORGE_THREADS")
    if not n:
        return nullcontext()
    from threadpoolctl import threadpool_limits
    try:
        return threadpool_limits(max(int(n), 1))
    except ValueError as exc:
        raise ConfigError(f"FRONT_FORGE_THREADS must be an integer, got {n!r}") from exc


# -- workflows ------------------------------------------------------------------------


def _check_potential(cfg, out):
    p, label, _, _ = _validate(cfg)
    s = _shock(cfg, p)
    np_ = build_normalized(p, s.r_minus, s.r_plus, name=label)
    rep = check_assumptions(np_)
    c_lo, c_hi = area_bound_constants(np_)
    lo, hi = sorted((s.r_minus, s.r_plus))
    report = {
        "potential": label,
        "shock": s.to_dict(),
        "assumptions": rep.to_dict(),
        "passed": rep.passed,
        "lambda_minus": np_.lambda_minus,
        "lambda_plus": np_.lambda_plus,
        "energy_gap": np_.energy_gap,
        "area_constants": [c_lo, c_hi],
        "interior_fixed_points": np_.interior_fixed_points(),
        "turning_points": [{"r": r, "kind": k} for r, k in turning_points(p, (lo, hi))],
    }
    if cfg["plots"]:
        from .plotting import plot_potential
        plot_potential(out / "potential.png", np_, label)
    return report, EXIT_OK


def _dedupe_seeds(p, tps, cfg):
    curves, covered = [], []
    c = cfg["curve"]
    bounds = c["bounds"] or c["interval"]
    for r, _ in tps:
        if any(abs(r - x) < 1e-6 for x in covered):
            continue
        curve = trace_curve(p, r, float(c["step"]), int(c["max_points"]), tuple(bounds))
        ends = curve.array[[0, -1]]
        covered.extend(float(e[0]) for e in ends if abs(e[0] - e[1]) < 1e-2)
        curves.append(curve)
    return curves


def _shock_curve(cfg, out):
    p, label, _, _ = _validate(cfg)
    c = cfg["curve"]
    tps = turning_points(p, tuple(c["interval"]), int(c["n_grid"]))
    curves = _dedupe_seeds(p, tps, cfg)
    write_curves_csv(out / "curve.csv", p, curves)
    from .psystem import energy_residual
    worst = max((abs(energy_residual(p, *pt)) for cv in curves for pt in cv.points), default=0.0)
    report = {
        "potential": label,
        "turning_points": [{"r": r, "kind": k} for r, k in tps],
        "curves": [{"seed": cv.seed, "points": len(cv.points), "truncated": cv.truncated,
                    "stop": cv.message} for cv in curves],
        "max_abs_J": worst,
    }
    if cfg["plots"]:
        from .plotting import plot_curves
        plot_curves(out / "curve.png", curves, c["bounds"] or c["interval"], label)
    return report, EXIT_NUMERIC if any(cv.truncated for cv in curves) else EXIT_OK


def _front(cfg):
    p, label, grid, solver = _validate(cfg)
    s = _shock(cfg, p)
    np_ = build_normalized(p, s.r_minus, s.r_plus, name=label)
    return p, s, np_, solve_front(np_, solver, grid)


def _solve_front(cfg, out):
    p, s, np_, res = _front(cfg)
    w = res.profile
    write_csv(out / "profile.csv", ["phi", "W", "AW"], [w.grid.nodes, w.values, average(w).values])
    write_csv(out / "history.csv", ["iteration", "residual", "action", "total_shift"],
              [np.arange(len(res.history)), [h.residual for h in res.history],
               [h.action for h in res.history], [h.total_shift for h in res.history]])
    ver = verify_front(np_, res)
    report = dict(res.summary())
    report.pop("config")
    report.update({
        "lambda_minus": np_.lambda_minus,
        "lambda_plus": np_.lambda_plus,
        "tau_plus_fit": ver.decay.tau_plus_fit,
        "tau_minus_fit": ver.decay.tau_minus_fit,
        "tau_plus_pred": ver.decay.tau_plus_pred,
        "tau_minus_pred": ver.decay.tau_minus_pred,
        "shock": s.to_dict(),
        "shock_type": _safe_type(p, s),
        "jump_residuals": jump_residuals(p, s),
        "verification": ver.to_dict(),
    })
    if cfg["plots"]:
        from .plotting import plot_front
        plot_front(out / "front.png", w.grid.nodes, w.values, average(w).values, res.history, res.outcome)
    return report, EXIT_NOCONV if res.outcome == MAX_ITER else EXIT_OK


def _safe_type(p, s):
    try:
        return classify(p, s).value
    except ComplexSoundSpeed:
        return None


def _decay_rate(cfg, out):
    lam = cfg["decay"]["lambda"]
    if lam is not None:
        return {"lambda": float(lam), "tau": decay_rate(float(lam))}, EXIT_OK
    p, label, _, _ = _validate(cfg)
    s = _shock(cfg, p)
    np_ = build_normalized(p, s.r_minus, s.r_plus, name=label)
    return {
        "potential": label,
        "lambda_minus": np_.lambda_minus,
        "lambda_plus": np_.lambda_plus,
        "tau_minus": decay_rate(np_.lambda_minus),
        "tau_plus": decay_rate(np_.lambda_plus),
    }, EXIT_OK


def _simulate_chain(cfg, out):
    ch = cfg["chain"]
    init = ch["init"]
    if init not in ("front", "riemann"):
        raise ConfigError(f"chain.init must be 'front' or 'riemann', got {init!r}")
    N, dt, t_end = int(ch["N"]), float(ch["dt"]), float(ch["t_end"])
    report = {"init": init}
    if init == "front":
        p, s, np_, res = _front(cfg)
        report["front_outcome"] = res.outcome
        if res.outcome == MAX_ITER:
            return report, EXIT_NOCONV
        R, V = denormalize_front(res.profile, s, np_)
        if N < 4 * res.profile.grid.M:
            raise BadParams(f"N = {N} is below 4 M = {4 * res.profile.grid.M:g}")
        state = init_front(R, V, s, N)
    else:
        p, _, _, _ = _validate(cfg)
        s = _shock(cfg, p)
        state = init_riemann(s, N, float(ch["smoothing"]))
    snaps = simulate(state, p, dt, t_end, int(ch["n_snapshots"]))
    write_snapshots(out / "snapshots.csv", snaps)
    level = s.r_mean
    e0 = conserved_quantities(snaps[0], p)[0]
    if init == "front":
        dev = tw_deviation(snaps, R, s.sigma, p)
        report.update(dev.to_dict())
    else:
        late = snaps[len(snaps) // 2:]
        speed = measured_speed(late, level, s.sigma)
        drift = max(abs(conserved_quantities(x, p)[0] - x.boundary_work - e0) for x in snaps) / abs(e0)
        report.update({"speed_fit": speed, "shape_error": None, "energy_drift": drift,
                       "monotone_transition": transition_is_monotone(snaps[-1], level)})
    ratio = (p.derivative(s.r_plus, 1) - p.derivative(s.r_minus, 1)) / s.r_jump
    report.update({"sigma": s.sigma, "speed_relative_error": abs(report["speed_fit"] - s.sigma) / abs(s.sigma),
                   "sigma2_relative_error": abs(report["speed_fit"] ** 2 - ratio) / ratio,
                   "final_time": snaps[-1].time})
    if cfg["plots"]:
        from .plotting import plot_snapshots
        plot_snapshots(out / "snapshots.png", snaps[:: max(len(snaps) // 5, 1)])
    return report, EXIT_OK


WORKFLOWS = {
    "check-potential": _check_potential,
    "shock-curve": _shock_curve,
    "solve-front": _solve_front,
    "decay-rate": _decay_rate,
    "simulate-chain": _simulate_chain,
}


def run(cfg: dict) -> int:
    """Execute a resolved config, writing report.json and artifacts into ``output_dir``."""
    command = cfg["command"]
    try:
        _validate(cfg)
    except _INVALID as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = Path(cfg["output_dir"])
    try:
        with _thread_limit():
            out.mkdir(parents=True, exist_ok=True)
            report, code = WORKFLOWS[command](cfg, out)
    except _INVALID as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Indeterminate as exc:
        print(f"error: Indeterminate: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except FrontForgeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    full = {"command": command, "version": __version__, "exit_code": code}
    full.update(report)
    full["config"] = cfg
    write_json(out / "report.json", full)
    try:
        emit_plotdata(out)
    except FrontForgeError:
        pass
    for key in ("outcome", "residual", "iterations", "tau", "speed_fit", "passed"):
        if key in full:
            print(f"{key}={full[key]}")
    print(f"report={out / 'report.json'}")
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="frontforge",
        description="Lattice fronts, shock curves and chain runs. Artifacts go to the output directory.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", type=Path, help="JSON run configuration")
    ap.add_argument("--lambda", dest="lam", type=float,
                    help="Euler step (solver) or linearization constant (decay-rate)")
    ap.add_argument("--tol", type=float, help="residual tolerance of the solver")
    ap.add_argument("--h", type=float, help="grid spacing, 1/(2k) for an integer k")
    ap.add_argument("--M", type=float, help="half-width of the computational box")
    ap.add_argument("-o", "--output-dir", help="artifact directory (default: frontforge-out)")
    ap.add_argument("--no-plots", action="store_true", help="skip PNG figures")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        raw = json.loads(args.config.read_text()) if args.config else {}
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        cfg = resolve_config(args.command, raw, {
            "lambda": args.lam, "tol": args.tol, "h": args.h, "M": args.M,
            "output_dir": args.output_dir, "no_plots": args.no_plots})
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
