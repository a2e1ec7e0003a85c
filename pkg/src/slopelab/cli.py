"""Command-line interface.

Every subcommand reads one JSON config (``--config``), applies ``--set``
overrides and writes its products to ``output_dir``.  Exit status: 0 on
success, 2 for usage errors, 3 for invalid input, 4 for numerical failures,
5 when a verification or oracle check fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .conformal import (
    QuadrantMapParams,
    build_map,
    explicit_quadrant_inverse,
    forward,
    halfplane_map,
    halfplane_polygon,
    inverse,
    inverse_real_axis,
    quadrant_center,
    quadrant_polygon,
)
from .construct import (
    ConstructionCertificate,
    build_counterexample,
    certificate_domain,
    verify_certificate,
)
from .dynamics import max_time, slope_curve, slope_interval, time_grid, to_csv, trajectory
from .errors import SlopeLabError, ValidationError
from .staircase import build_params, classify, realize

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 5
HALFPLANE_SCALE = 16  # half-plane box size in units of tail_length


def _floats(raw: str) -> list[float]:
    return [float(x) for x in raw.split(",") if x.strip()] if raw else []


def _parse_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _config(args) -> RunConfig:
    cfg = load_config(args.config)
    overrides = {}
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValidationError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = _parse_value(value)
    if args.output_dir is not None:
        overrides["output_dir"] = args.output_dir
    return cfg.with_overrides(overrides) if overrides else cfg


def _params(args):
    if args.params:
        try:
            data = json.loads(Path(args.params).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read params {args.params}: {exc}") from exc
        if not isinstance(data, dict) or not {"u", "v", "w"} <= set(data):
            raise ValidationError(f"params file {args.params} needs keys u, v, w")
        return build_params(data["u"], data["v"], data["w"])
    if args.u is None:
        raise ValidationError("give --params FILE or --u/--v/--w")
    return build_params(_floats(args.u), _floats(args.v or ""), _floats(args.w or ""))


def _out(cfg: RunConfig, name: str) -> Path:
    path = Path(cfg.output_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _print_table(rows, header) -> None:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    for r in [header] + rows:
        print("  ".join(str(c).ljust(w) for c, w in zip(r, widths)))


# subcommands ---------------------------------------------------------------


def cmd_validate(args, cfg: RunConfig) -> int:
    params = _params(args)
    poly = realize(params, cfg.tail_length)
    kind = classify(params, args.v_unbounded, args.w_unbounded)
    print(json.dumps({
        "valid": True, "stage_count": params.stage_count, "vertices": len(poly.vertices),
        "classification": kind.value,
    }, sort_keys=True))
    return EXIT_OK


def oracle_residuals(cfg: RunConfig) -> list[tuple[str, float, float]]:
    """(name, residual, tolerance) for the closed-form oracle suite."""
    tol = cfg.tolerances
    T = cfg.tail_length
    p = QuadrantMapParams(2.0, 1.0)
    qmap = build_map(quadrant_polygon(p, T), cfg.resolution, quadrant_center(p), max_iterations=tol.max_iterations)
    t = np.linspace(p.u + 1, p.u + T / 2, 400)
    rows = [
        ("quadrant sup |inverse - f^-1|", float(np.max(np.abs(inverse_real_axis(qmap, t) - explicit_quadrant_inverse(p, t)))), tol.tau2),
        ("quadrant inverse(3) - 1/3", float(abs(inverse(qmap, 3.0 + 0j) - 1 / 3)), tol.tau2),
        ("quadrant inverse(4) - (12-3i)/17", float(abs(inverse(qmap, 4.0 + 0j) - (12 - 3j) / 17)), tol.tau2),
    ]
    hmap = build_map(halfplane_polygon(HALFPLANE_SCALE * T), cfg.resolution, max_iterations=tol.max_iterations)
    z = np.concatenate([[0], (0.5 * np.sqrt(np.linspace(0, 1, 6)[1:])[:, None]
                              * np.exp(2j * np.pi * np.arange(16) / 16)[None, :]).ravel()])
    rows.append(("half-plane sup |g - 2z/(1-z)|", float(np.max(np.abs(forward(hmap, z) - halfplane_map(z)))), tol.tau1))
    th = np.linspace(0, max_time(hmap), 400)
    orbit = trajectory(hmap, 0j, th)
    rows.append(("half-plane orbit - t/(t+2)", float(np.max(np.abs(orbit.points - th / (th + 2)))), tol.tau1))
    return rows


def cmd_map_test(args, cfg: RunConfig) -> int:
    rows = oracle_residuals(cfg)
    table = [(name, f"{r:.3e}", f"{tol:.1e}", "pass" if r <= tol else "FAIL") for name, r, tol in rows]
    _print_table(table, ("check", "residual", "tolerance", "status"))
    if "structured-text" in cfg.output_formats:
        _write_json(_out(cfg, "map_test.json"), [
            {"check": n, "residual": r, "tolerance": tol, "passed": r <= tol} for n, r, tol in rows
        ])
    return EXIT_OK if all(r <= tol for _, r, tol in rows) else EXIT_VERIFY


def _orbit(args, cfg: RunConfig):
    params = _params(args)
    poly = realize(params, cfg.tail_length)
    cmap = build_map(poly, cfg.resolution, max_iterations=cfg.tolerances.max_iterations)
    z0 = complex(args.z0.replace(" ", ""))
    t_max = max_time(cmap, z0) if args.t_max is None else args.t_max
    traj = trajectory(cmap, z0, time_grid(cfg.time_grid, t_max))
    return poly, cmap, traj


def _summary(cmap, traj, interval=None) -> dict:
    out = {
        "z0": [traj.z0.real, traj.z0.imag], "t_max": float(traj.t_grid[-1]),
        "points": len(traj), "map": cmap.to_dict(),
    }
    if interval is not None:
        out["slope_interval"] = interval.to_dict()
    return out


def cmd_trajectory(args, cfg: RunConfig) -> int:
    poly, cmap, traj = _orbit(args, cfg)
    if "table-text" in cfg.output_formats:
        to_csv(traj, _out(cfg, "trajectory.csv"))
    if "structured-text" in cfg.output_formats:
        _write_json(_out(cfg, "trajectory.json"), _summary(cmap, traj))
    if "vector-plot" in cfg.output_formats:
        from .plotting import plot_domain, plot_slope

        plot_domain(poly, traj, _out(cfg, "domain.svg"))
        plot_slope(slope_curve(traj), _out(cfg, "slope.svg"))
    print(f"trajectory: {len(traj)} points up to t = {traj.t_grid[-1]:.6g}, "
          f"map accuracy {cmap.accuracy:.2e}; written to {cfg.output_dir}")
    return EXIT_OK


def cmd_slope(args, cfg: RunConfig) -> int:
    _, cmap, traj = _orbit(args, cfg)
    interval = slope_interval(slope_curve(traj), args.tail_fraction)
    summary = _summary(cmap, traj, interval)
    if "structured-text" in cfg.output_formats:
        _write_json(_out(cfg, "slope.json"), summary)
    print(json.dumps(interval.to_dict(), sort_keys=True))
    return EXIT_OK


def cmd_construct(args, cfg: RunConfig) -> int:
    def report(rec):
        print(f"stage {rec.n} {rec.direction.value:>4}: M = {rec.M_n:.6g}, xi = {rec.xi_n:.6g}, "
              f"theta = {rec.theta_n:+.6f} (threshold {rec.direction.sign * rec.threshold:+.6f})",
              file=sys.stderr)

    eps = _floats(args.eps) if args.eps else None
    cert = build_counterexample(args.stages, eps, cfg.search, cfg.tolerances.max_iterations, progress=report)
    path = Path(args.certificate) if args.certificate else _out(cfg, "certificate.json")
    path.parent.mkdir(parents=True, exist_ok=True)
    cert.save(path)
    print(f"certificate with {len(cert.stages)} stages written to {path}")
    return EXIT_OK


def _certificate_path(args, cfg: RunConfig) -> Path:
    return Path(args.certificate) if args.certificate else Path(cfg.output_dir) / "certificate.json"


def cmd_verify(args, cfg: RunConfig) -> int:
    cert = ConstructionCertificate.load(_certificate_path(args, cfg))
    strictness = cfg.strictness if args.strictness is None else args.strictness
    if not strictness > 1:
        raise ValidationError("strictness must exceed 1")
    rep = verify_certificate(cert, strictness, cfg.search.resolution, cfg.tolerances.max_iterations)
    table = [
        (c.n, f"{c.threshold:+.6f}", f"{c.theta_certified:+.6f}", f"{c.theta_verified:+.6f}",
         f"{c.delta:.2e}", f"{c.margin:.2e}", "pass" if c.passed else "FAIL")
        for c in rep.checks
    ]
    _print_table(table, ("n", "threshold", "theta_cert", "theta_verify", "delta", "margin", "status"))
    for p in rep.problems:
        print(f"problem: {p}")
    if "structured-text" in cfg.output_formats:
        _write_json(_out(cfg, "verification.json"), rep.to_dict())
    print("verification " + ("passed" if rep.passed else "FAILED"))
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_plot(args, cfg: RunConfig) -> int:
    from .plotting import plot_domain, plot_slope

    if args.certificate:
        cert = ConstructionCertificate.load(args.certificate)
        poly = certificate_domain(cert, cfg.strictness)
        cmap = build_map(poly, cfg.search.resolution, max_iterations=cfg.tolerances.max_iterations)
        xi = [s.xi_n for s in cert.stages]
        t = np.concatenate([[0.0], np.geomspace(cfg.time_grid.t0, max_time(cmap), cfg.time_grid.points - 1)])
        traj = trajectory(cmap, 0j, t)
        thresholds = sorted({s.direction.sign * s.threshold for s in cert.stages})
    else:
        poly, cmap, traj = _orbit(args, cfg)
        xi, thresholds = (), ()
    a = plot_domain(poly, traj, _out(cfg, "domain.svg"), xi)
    b = plot_slope(slope_curve(traj), _out(cfg, "slope.svg"), thresholds)
    print(f"wrote {a} and {b}")
    return EXIT_OK


# parser --------------------------------------------------------------------


def _add_params(p) -> None:
    p.add_argument("--params", help="JSON file with u, v, w")
    p.add_argument("--u", help="comma-separated abscissas")
    p.add_argument("--v", help="comma-separated upper heights")
    p.add_argument("--w", help="comma-separated lower depths")


def _add_orbit(p) -> None:
    _add_params(p)
    p.add_argument("--z0", default="0", help="start point in the disk, e.g. 0.1+0.2j")
    p.add_argument("--t-max", type=float, default=None, help="final time (default: trusted limit)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config field, e.g. search.resolution=800")
    common.add_argument("--output-dir", default=None)

    parser = argparse.ArgumentParser(prog="slopelab", description="Staircase domains and trajectory slopes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check staircase parameters")
    _add_params(p)
    p.add_argument("--v-unbounded", action="store_true", help="declare the heights unbounded")
    p.add_argument("--w-unbounded", action="store_true", help="declare the depths unbounded")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("map-test", parents=[common], help="closed-form oracle residuals")
    p.set_defaults(func=cmd_map_test)

    p = sub.add_parser("trajectory", parents=[common], help="orbit and slope export")
    _add_orbit(p)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("slope", parents=[common], help="slope interval of an orbit")
    _add_orbit(p)
    p.add_argument("--tail-fraction", type=float, default=0.5)
    p.set_defaults(func=cmd_slope)

    p = sub.add_parser("construct", parents=[common], help="build a counterexample certificate")
    p.add_argument("--stages", type=int, default=2)
    p.add_argument("--eps", help="comma-separated epsilon per stage")
    p.add_argument("--certificate", help="output path (default: OUTPUT_DIR/certificate.json)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common], help="re-check a certificate")
    p.add_argument("--certificate", help="certificate path (default: OUTPUT_DIR/certificate.json)")
    p.add_argument("--strictness", type=float, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", parents=[common], help="SVG figures of a domain and its orbit")
    _add_orbit(p)
    p.add_argument("--certificate", help="plot the domain of a certificate instead")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except SlopeLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_status
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ValidationError.exit_status


if __name__ == "__main__":
    sys.exit(main())
