"""Command-line front end.

Subcommands: flow (integrate one system, optional cone event), portrait
(region grid + normalized-flow seed trajectories + Einstein points), verify
(run the acceptance battery), roots (quintic roots + sign chart), cone-exit
(first boundary crossing).  Every command prints a single JSON object to
stdout; files use the deterministic formats of `serialize`.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import cone, derivatives, flow, serialize, verify
from .errors import RicciFlowError
from .spaces import XiParam

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4

_DEFAULT_SEEDS = (((10.0 / 11.0) ** (4.0 / 3.0), 1.1), (0.87, 1.1))


class ConfigError(ValueError):
    pass


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _parse_floats(text: str, name: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"--{name}: expected comma-separated floats, got {text!r}") from exc
    if not values:
        raise ConfigError(f"--{name}: empty value")
    return values


def _resolve_xi(args) -> float:
    if getattr(args, "k", None):
        parts = args.k.split(",")
        if len(parts) != 2:
            raise ConfigError(f"--k: expected two integers, got {args.k!r}")
        try:
            k1, k2 = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ConfigError(f"--k: expected integers, got {args.k!r}") from exc
        try:
            return XiParam.from_integers(k1, k2).xi
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if getattr(args, "xi", None) is not None:
        if not (0.0 < args.xi <= 1.0):
            raise ConfigError(f"--xi must lie in (0, 1], got {args.xi}")
        return args.xi
    return 1.0


def _config_from(args, horizon=None) -> flow.IntegratorConfig:
    try:
        return flow.IntegratorConfig(
            rel_tol=args.rel_tol,
            abs_tol=args.abs_tol,
            max_step=args.max_step if args.max_step else float("inf"),
            max_time=horizon if horizon is not None else args.horizon,
            direction=getattr(args, "direction", "forward"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _flow_events(system: str, xi: float) -> list[flow.EventSpec]:
    if system == "aw2":
        return [flow.boundary_event("aw2")]
    if system == "aw3":
        return [flow.boundary_event("aw3"), flow.window_event(3)]
    if system == "aw4":
        return [flow.boundary_event("aw4", xi), flow.window_event(4)]
    if system == "berger":
        return [flow.boundary_event("berger")]
    raise ConfigError(f"--event cone is not defined for system {system!r}")


def cmd_flow(args) -> int:
    xi = _resolve_xi(args)
    init = _parse_floats(args.init, "init")
    try:
        system = flow.make_system(args.system, xi if args.system in ("aw3", "aw4", "aw2") else None)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if len(init) != system.dim:
        raise ConfigError(f"system {args.system!r} needs {system.dim} init components, got {len(init)}")
    events = _flow_events(args.system, xi) if args.event == "cone" else []
    cfg = _config_from(args)
    traj = flow.integrate(system, init, cfg, events)
    out = _out_dir(args)
    csv_path = serialize.write_trajectory_csv(out / "trajectory.csv", traj)
    events_path = serialize.write_events_json(out / "events.json", traj)
    hit = traj.first_event("cone_exit")
    _emit({
        "status": "ok",
        "command": "flow",
        "system": args.system,
        "xi": xi,
        "rows": int(traj.times.size),
        "trajectory_status": traj.status,
        "final_time": traj.final_time,
        "final_state": [float(c) for c in traj.final_state],
        "events": [{"name": ev.name, "time": ev.time} for ev in traj.events],
        "exit_time": hit.time if hit else None,
        "files": {"trajectory": str(csv_path), "events": str(events_path)},
    })
    return EXIT_OK


def _parse_grid(text: str):
    try:
        x_part, s_part = text.split(",")
        x0, x1, nx = x_part.split(":")
        s0, s1, ns = s_part.split(":")
        parsed = (float(x0), float(x1), int(nx), float(s0), float(s1), int(ns))
    except ValueError as exc:
        raise ConfigError(f"--grid: expected x0:x1:nx,s0:s1:ns, got {text!r}") from exc
    x0, x1, nx, s0, s1, ns = parsed
    if nx < 2 or ns < 2:
        raise ConfigError("--grid: counts must be >= 2")
    if not (0.0 < x0 < x1 and 0.0 < s0 < s1):
        raise ConfigError("--grid: ranges must be positive and ordered")
    return np.linspace(x0, x1, nx), np.linspace(s0, s1, ns)


def _load_seeds(path: str | None):
    if path is None:
        return [np.array(seed) for seed in _DEFAULT_SEEDS]
    seeds = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        values = _parse_floats(line, f"seeds (line {lineno})")
        if len(values) != 2:
            raise ConfigError(f"--seeds: line {lineno} needs two components, got {len(values)}")
        seeds.append(np.array(values))
    if not seeds:
        raise ConfigError(f"--seeds: no seeds found in {path}")
    return seeds


def cmd_portrait(args) -> int:
    xs, ss = _parse_grid(args.grid)
    seeds = _load_seeds(args.seeds)
    cfg = _config_from(args)
    out = _out_dir(args)

    rows = [(float(x), float(s), cone.normalized_region(float(x), float(s)))
            for x in xs for s in ss]
    region_path = serialize.write_region_csv(out / "regions.csv", rows)

    system = flow.make_system("normalized")
    seed_files = []
    for i, seed in enumerate(seeds):
        traj = flow.integrate(system, seed, cfg)
        seed_files.append(str(serialize.write_trajectory_csv(out / f"seed_{i:03d}.csv", traj)))

    e_plus, e_minus = derivatives.einstein_points()
    def einstein_entry(point):
        verdict = cone.classify_2param(point[0], point[1])
        return {"x": float(point[0]), "s": float(point[1]),
                "verdict": verdict.classification.value, "margin": verdict.margin}
    einstein_path = serialize.write_json(out / "einstein.json", {
        "E_plus": einstein_entry(e_plus),
        "E_minus": einstein_entry(e_minus),
    })

    _emit({
        "status": "ok",
        "command": "portrait",
        "grid_points": len(rows),
        "seeds": len(seeds),
        "files": {"regions": str(region_path), "seeds": seed_files,
                  "einstein": str(einstein_path)},
    })
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_all()
    report = [{"check": r.name, "status": "pass" if r.passed else "fail",
               "measured": r.measured, "tolerance": r.tolerance} for r in results]
    out = _out_dir(args)
    path = serialize.write_json(out / "verification_report.json", report)
    failed = [r.name for r in results if not r.passed]
    _emit({
        "status": "ok" if not failed else "failed",
        "command": "verify",
        "checks": len(results),
        "failed": failed,
        "report": str(path),
    })
    return EXIT_OK if not failed else EXIT_VERIFY


def cmd_roots(_args) -> int:
    roots = derivatives.d_roots()
    chart = []
    for a, b in zip(roots[:-1], roots[1:]):
        mid = 0.5 * (a + b)
        chart.append({
            "interval": [float(a), float(b)],
            "sign": "positive" if derivatives.d_polynomial(mid) > 0 else "negative",
        })
    _emit({"status": "ok", "command": "roots",
           "roots": [float(r) for r in roots], "sign_chart": chart})
    return EXIT_OK


def cmd_cone_exit(args) -> int:
    xi = _resolve_xi(args)
    init = _parse_floats(args.init, "init")
    cfg = _config_from(args)
    exit_time, exit_state = flow.cone_exit(args.family, init, cfg, xi=xi)
    after_family = "aw4" if (args.family == "aw3" and xi != 1.0) else args.family
    verdict = flow.post_exit_verdict(after_family, exit_state, xi)
    _emit({
        "status": "ok",
        "command": "cone-exit",
        "family": args.family,
        "xi": xi,
        "exit_time": exit_time,
        "exit_state": [float(c) for c in exit_state],
        "verdict_after": {"classification": verdict.classification.value,
                          "margin": verdict.margin},
    })
    return EXIT_OK


def _add_tolerance_flags(parser, horizon_default):
    parser.add_argument("--horizon", type=float, default=horizon_default,
                        help="integration horizon (flow time)")
    parser.add_argument("--rel-tol", type=float, default=1e-10, dest="rel_tol")
    parser.add_argument("--abs-tol", type=float, default=1e-12, dest="abs_tol")
    parser.add_argument("--max-step", type=float, default=None, dest="max_step")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ricciflow",
        description="Homogeneous Ricci flow lab for Aloff-Wallach and Berger metrics")
    sub = parser.add_subparsers(dest="command", required=True)

    p_flow = sub.add_parser("flow", help="integrate one flow system")
    p_flow.add_argument("--system", required=True,
                        choices=["aw2", "aw3", "aw4", "berger", "normalized"])
    p_flow.add_argument("--init", required=True, help="comma-separated initial state")
    p_flow.add_argument("--xi", type=float, default=None)
    p_flow.add_argument("--k", default=None, help="k1,k2 as an alternative to --xi")
    p_flow.add_argument("--event", choices=["cone", "none"], default="none")
    p_flow.add_argument("--direction", choices=["forward", "backward"], default="forward")
    p_flow.add_argument("--out", default=".")
    _add_tolerance_flags(p_flow, horizon_default=1.0)
    p_flow.set_defaults(func=cmd_flow)

    p_port = sub.add_parser("portrait", help="normalized-flow phase portrait data")
    p_port.add_argument("--grid", default="0.3:2:18,0.3:2:18",
                        help="x0:x1:nx,s0:s1:ns region grid")
    p_port.add_argument("--seeds", default=None, help="file with one 'x,s' seed per line")
    p_port.add_argument("--out", default=".")
    _add_tolerance_flags(p_port, horizon_default=10.0)
    p_port.set_defaults(func=cmd_portrait)

    p_verify = sub.add_parser("verify", help="run the acceptance battery")
    p_verify.add_argument("--out", default=".")
    p_verify.set_defaults(func=cmd_verify)

    p_roots = sub.add_parser("roots", help="roots and sign chart of the derivative quintic")
    p_roots.set_defaults(func=cmd_roots)

    p_exit = sub.add_parser("cone-exit", help="first positivity-cone boundary crossing")
    p_exit.add_argument("--family", required=True, choices=["aw2", "aw3", "berger"])
    p_exit.add_argument("--init", required=True)
    p_exit.add_argument("--xi", type=float, default=None)
    p_exit.add_argument("--k", default=None)
    _add_tolerance_flags(p_exit, horizon_default=10.0)
    p_exit.set_defaults(func=cmd_cone_exit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        _emit({"status": "error", "code": EXIT_CONFIG, "error": str(exc)})
        return EXIT_CONFIG
    except RicciFlowError as exc:
        _emit({"status": "error", "code": EXIT_NUMERICAL,
               "error": f"{type(exc).__name__}: {exc}"})
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
