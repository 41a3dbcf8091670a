"""Command-line front end: ground, protocol, sweep and verify subcommands.

Outputs are written as ``report.json``, ``profile.csv`` and ``sweep.csv``
in the chosen output directory.  CSV numbers carry 17 significant digits
so downstream comparisons are exact at double precision, and identical
configurations produce byte-identical files.

Exit codes: 0 success, 1 failed verification, 2 configuration error,
3 solver non-convergence, 4 degenerate ground state, 5 failed protocol
invariant check.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import verify as verify_mod
from .config import ConfigError, RunConfig, load_config
from .protocol import (
    MeasurementSetup,
    feedback_objective,
    protocol_constants,
    run_protocol,
    sample_outcomes,
)
from .solve import (
    ConvergenceError,
    DegenerateGroundStateError,
    solve_and_calibrate,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NO_CONVERGENCE = 3
EXIT_DEGENERATE = 4
EXIT_CHECKS_FAILED = 5


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(
            ",".join(
                str(v) if isinstance(v, (int, str)) else _fmt(v) for v in row
            )
        )
    path.write_text("\n".join(lines) + "\n")


def _report_skeleton(command: str, cfg: RunConfig) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": cfg.to_dict(),
    }


def _prepare(cfg: RunConfig):
    model = cfg.model.build()
    solver = cfg.solver
    return solve_and_calibrate(
        model,
        method=solver.method,
        tol=solver.tol,
        max_iter=solver.max_iter,
        seed=cfg.seed or 7,
    )


def _outputs(cfg: RunConfig, args) -> tuple[Path, str]:
    out_dir = Path(args.out or cfg.output_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = args.format or cfg.output_format or "both"
    if fmt not in ("json", "csv", "both"):
        raise ConfigError(f"format must be json, csv or both, got {fmt!r}")
    return out_dir, fmt


def cmd_ground(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    out_dir, fmt = _outputs(cfg, args)
    calibrated, spectrum = _prepare(cfg)
    results = {
        "e0": spectrum.eigenvalues[0],
        "gap": spectrum.gap,
        "residual": spectrum.residual,
        "method": spectrum.method,
        "shift_total": sum(calibrated.shifts),
    }
    if spectrum.span is not None:
        results["span"] = spectrum.span
    if spectrum.iterations is not None:
        results["iterations"] = spectrum.iterations
    print(f"ground energy (calibrated zero): {results['e0']:.12e}")
    print(f"gap: {results['gap']:.12e}")
    if spectrum.span is not None:
        print(f"spectral span: {spectrum.span:.12e}")
    if fmt in ("json", "both"):
        payload = _report_skeleton("ground", cfg)
        payload["results"] = results
        _write_json(out_dir / "report.json", payload)
    return EXIT_OK


def cmd_protocol(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if cfg.protocol is None:
        raise ConfigError(f"{cfg.source_path}: missing required section [protocol]")
    out_dir, fmt = _outputs(cfg, args)
    calibrated, spectrum = _prepare(cfg)
    pcfg = cfg.protocol
    report = run_protocol(
        calibrated,
        spectrum.ground,
        MeasurementSetup(pcfg.site_a, pcfg.direction_a),
        pcfg.site_b,
        pcfg.direction_b,
    )
    payload = _report_skeleton("protocol", cfg)
    payload["results"] = report.to_dict()
    if pcfg.shots > 0:
        payload["results"]["sampled_outcomes"] = {
            str(k): v
            for k, v in sample_outcomes(
                spectrum.ground,
                MeasurementSetup(pcfg.site_a, pcfg.direction_a),
                pcfg.shots,
                cfg.seed,
            ).items()
        }
    if fmt in ("json", "both"):
        _write_json(out_dir / "report.json", payload)
    if fmt in ("csv", "both"):
        rows = [
            [n, report.profiles["step1"].values[n], report.profiles["step3"].values[n]]
            for n in range(calibrated.site_count)
        ]
        _write_csv(
            out_dir / "profile.csv",
            ["site", "t_expect_step1", "t_expect_step3"],
            rows,
        )
    print(
        f"e_a={report.energy_input:.12e} e_b={report.teleported_energy:.12e} "
        f"eta={report.eta:.12e} theta={report.theta:.12e}"
    )
    failed = [name for name, c in report.checks.items() if not c.passed]
    if failed:
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECKS_FAILED
    return EXIT_OK


def _sweep_rows(cfg: RunConfig, calibrated, spectrum, jobs: int):
    pcfg = cfg.protocol
    sweep = cfg.sweep
    setup = MeasurementSetup(pcfg.site_a, pcfg.direction_a)

    if sweep.axis == "distance":
        header = ["distance", "site_b", "xi", "eta", "theta", "e_a", "e_b"]

        def one(raw):
            d = int(raw)
            site_b = pcfg.site_a + d
            if calibrated.boundary == "periodic":
                site_b %= calibrated.site_count
            report = run_protocol(
                calibrated, spectrum.ground, setup, site_b, pcfg.direction_b
            )
            return [
                d, site_b, report.xi, report.eta, report.theta,
                report.energy_input, report.teleported_energy,
            ]

        points = list(sweep.values)
    elif sweep.axis == "coupling":
        if cfg.model.kind != "ising":
            raise ConfigError("coupling sweeps require an ising model")
        header = ["h", "xi", "eta", "theta", "e_a", "e_b"]

        def one(raw):
            h = float(raw)
            row_cfg = replace(cfg, model=replace(cfg.model, h=h))
            cal, spec = _prepare(row_cfg)
            report = run_protocol(
                cal, spec.ground, setup, pcfg.site_b, pcfg.direction_b
            )
            return [
                h, report.xi, report.eta, report.theta,
                report.energy_input, report.teleported_energy,
            ]

        points = list(sweep.values)
    else:  # angle
        header = ["theta", "receiver_window_energy", "e_b_at_theta"]
        constants = protocol_constants(
            spectrum.ground, calibrated, setup, pcfg.site_b, pcfg.direction_b
        )

        def one(raw):
            theta = float(raw)
            objective = feedback_objective(constants.xi, constants.eta, theta)
            return [theta, objective, -objective]

        step = math.pi / sweep.points
        points = [-math.pi / 2 + (k + 1) * step for k in range(sweep.points)]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(one, points))
    else:
        rows = [one(p) for p in points]
    return header, rows


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if cfg.protocol is None:
        raise ConfigError(f"{cfg.source_path}: missing required section [protocol]")
    if cfg.sweep is None:
        raise ConfigError(f"{cfg.source_path}: missing required section [sweep]")
    if cfg.sweep.axis != "angle" and not cfg.sweep.values:
        raise ConfigError(f"{cfg.source_path}: sweep grid is empty")
    out_dir, fmt = _outputs(cfg, args)
    calibrated, spectrum = _prepare(cfg)
    header, rows = _sweep_rows(cfg, calibrated, spectrum, max(1, args.jobs))
    if fmt in ("csv", "both"):
        _write_csv(out_dir / "sweep.csv", header, rows)
    if fmt in ("json", "both"):
        payload = _report_skeleton("sweep", cfg)
        payload["results"] = {
            "axis": cfg.sweep.axis,
            "header": header,
            "rows": [[float(v) for v in row] for row in rows],
        }
        _write_json(out_dir / "report.json", payload)
    print(f"{len(rows)} sweep rows written to {out_dir}")
    return EXIT_OK


def cmd_verify(args) -> int:
    outcomes = verify_mod.run_checks(args.scope)
    for o in outcomes:
        status = "PASS" if o.passed else "FAIL"
        line = f"{status}  {o.check_id}  ({o.seconds:.2f}s)"
        if not o.passed:
            line += f"  {o.detail}"
        print(line)
    failures = [o.check_id for o in outcomes if not o.passed]
    summary = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "scope": args.scope,
        "passed": len(outcomes) - len(failures),
        "failed": failures,
    }
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_json(out_dir / "verify.json", summary)
    else:
        print(json.dumps(summary, sort_keys=True))
    if failures:
        print(f"failing checks: {', '.join(failures)}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qetsim",
        description="Spin-chain energy teleportation simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument(
            "--format", default=None, choices=("json", "csv", "both"),
            help="which output files to write",
        )
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--jobs", type=int, default=1, help="parallel grid workers")

    ground = sub.add_parser("ground", help="solve and calibrate the ground state")
    common(ground)
    ground.set_defaults(fn=cmd_ground)

    proto = sub.add_parser("protocol", help="run the full protocol once")
    common(proto)
    proto.set_defaults(fn=cmd_protocol)

    sweep = sub.add_parser("sweep", help="run the protocol over a parameter grid")
    common(sweep)
    sweep.set_defaults(fn=cmd_sweep)

    ver = sub.add_parser("verify", help="run the built-in invariant suite")
    ver.add_argument(
        "--scope", default="all", choices=("all",) + verify_mod.MODULES,
        help="restrict to one module's invariants",
    )
    ver.add_argument("--out", default=None, help="directory for verify.json")
    ver.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as err:
        print(f"solver did not converge: {err}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except DegenerateGroundStateError as err:
        print(f"degenerate ground state: {err}", file=sys.stderr)
        return EXIT_DEGENERATE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
