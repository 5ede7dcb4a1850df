"""Command line interface.

Subcommands::

    hearth run --scenario S --interval T [--duration D] [--seed N] [--out FILE.{json,csv}]
    hearth matrix [--duration D] [--seed N] [--out FILE.{json,csv}]
    hearth elderly [--seed N] [--out FILE.json]
    hearth validate-config FILE
    hearth serve [--config FILE] [--port P] [--speed X] [--static DIR]

Exit codes: 0 success, 1 validation or budget error, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import config as config_mod
from . import harness
from .errors import HearthError
from .home import build_home
from .memstore import TIERS, ScenarioKind

DEFAULT_PORT = 8123


def _write_out(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _emit_reports(reports, out: str | None) -> None:
    if out is not None and out.endswith(".csv"):
        _write_out(harness.reports_to_csv(reports if isinstance(reports, list) else [reports]), out)
    else:
        _write_out(harness.report_to_json(reports), out)


def _cmd_run(args: argparse.Namespace) -> int:
    report = harness.run_scenario(
        ScenarioKind(args.scenario), args.interval, args.duration, args.seed
    )
    _emit_reports(report, args.out)
    return 0


def _cmd_matrix(args: argparse.Namespace) -> int:
    reports = harness.run_matrix(args.duration, args.seed)
    _emit_reports(reports, args.out)
    return 0


def _cmd_elderly(args: argparse.Namespace) -> int:
    bundle = harness.run_24h_elderly(args.seed)
    _write_out(harness.report_to_json(bundle.to_dict()), args.out)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    text = Path(args.file).read_text(encoding="utf-8")
    config_mod.load(text)
    print("OK")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .gateway import serve  # aiohttp import deferred to serving

    if args.config:
        text = Path(args.config).read_text(encoding="utf-8")
    else:
        text = harness.sample_config_text()
    cfg = config_mod.load(text)
    home = build_home(cfg, seed=args.seed, speed=args.speed)
    port = int(os.environ.get("HEARTH_PORT", args.port))
    static = Path(args.static) if args.static else _default_static()
    print(f"serving on http://127.0.0.1:{port} (speed x{args.speed})", file=sys.stderr)
    serve(home, port, args.speed, static)
    return 0


def _default_static() -> Path | None:
    dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return dist if dist.is_dir() else None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hearth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario at one interval tier")
    run.add_argument("--scenario", required=True, choices=[s.value for s in ScenarioKind])
    run.add_argument("--interval", required=True, type=int, choices=list(TIERS))
    run.add_argument("--duration", type=int, default=harness.DAY_S, help="simulated seconds")
    run.add_argument("--seed", type=int, default=7)
    run.add_argument("--out", help="output file, .json or .csv (default stdout JSON)")
    run.set_defaults(func=_cmd_run)

    matrix = sub.add_parser("matrix", help="run every scenario x interval cell")
    matrix.add_argument("--duration", type=int, default=harness.DAY_S)
    matrix.add_argument("--seed", type=int, default=7)
    matrix.add_argument("--out", help="output file, .json or .csv (default stdout JSON)")
    matrix.set_defaults(func=_cmd_matrix)

    elderly = sub.add_parser("elderly", help="run the 24-hour monitoring bundle")
    elderly.add_argument("--seed", type=int, default=11)
    elderly.add_argument("--out", help="output file (default stdout JSON)")
    elderly.set_defaults(func=_cmd_elderly)

    validate = sub.add_parser("validate-config", help="check a configuration file")
    validate.add_argument("file")
    validate.set_defaults(func=_cmd_validate)

    serve_p = sub.add_parser("serve", help="serve the gateway API and dashboard")
    serve_p.add_argument("--config", help="config file (default: shipped sample home)")
    serve_p.add_argument("--port", type=int, default=DEFAULT_PORT)
    serve_p.add_argument("--speed", type=float, default=1.0, help="clock acceleration; 0 pauses")
    serve_p.add_argument("--seed", type=int, default=7)
    serve_p.add_argument("--static", help="dashboard asset directory")
    serve_p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HearthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
