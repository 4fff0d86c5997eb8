"""Command-line entry point. With no mode flag an interactive REPL starts;
--batch, --serve, and --eval select the other modes. The CLI is a thin client
over the session service: in-process by default, or against a running server
via --connect."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import IO, Optional

from .batch import batch_mode
from .client import LocalClient, RemoteClient, SessionClient
from .config import Config, ConfigError, load_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="idiolect",
        description="voice-command intent engine: REPL, batch, service, and eval modes",
    )
    parser.add_argument("--home", metavar="DIR", help="configuration directory")
    parser.add_argument("--batch", nargs=2, metavar=("IN", "OUT"),
                        help="process a JSONL transcript file")
    parser.add_argument("--serve", metavar="ADDR",
                        help="run the session service on HOST:PORT")
    parser.add_argument("--eval", dest="eval_grid", metavar="GRID.json",
                        help="run the evaluation harness with a noise-grid file")
    parser.add_argument("--seed", type=int, default=42, help="evaluation seed")
    parser.add_argument("--connect", metavar="URL",
                        help="talk to a running service instead of in-process")
    return parser


def _make_client(args: argparse.Namespace, config: Config) -> SessionClient:
    if args.connect:
        return RemoteClient(args.connect)
    from .service.core import ServiceCore

    return LocalClient(ServiceCore(config))


def run_eval(config: Config, grid_path: str, seed: int, out: IO[str]) -> Path:
    """Run the harness with a JSON noise grid; writes report.csv (and
    traces.json) into the home directory."""
    from .actions import load_default_catalog
    from .evaluation import (
        NoiseCondition,
        NoiseModel,
        default_noise_grid,
        run_harness,
    )
    from .grammar import merge_grammars

    if grid_path == "default":
        grid = default_noise_grid()
        n = 100
    else:
        body = json.loads(Path(grid_path).read_text("utf-8"))
        n = int(body.get("n", 100))
        grid = [
            NoiseCondition(
                label=str(cond["label"]),
                noise=NoiseModel(
                    p_sub=float(cond.get("p_sub", 0.0)),
                    p_del=float(cond.get("p_del", 0.0)),
                    p_ins=float(cond.get("p_ins", 0.0)),
                    filler_rate=float(cond.get("filler_rate", 0.0)),
                ),
            )
            for cond in body["conditions"]
        ]
    grammar = merge_grammars(config.load_grammars())
    catalog = load_default_catalog()
    report = run_harness(
        grammar, catalog, grid, n=n, seed=seed,
        settings=config.engine_settings(), collect_traces=True,
    )
    report_path = config.home_dir / "report.csv"
    report_path.write_text(report.to_csv(), "utf-8")
    (config.home_dir / "traces.json").write_text(report.traces_json(), "utf-8")
    print(report.to_csv(), end="", file=out)
    print(f"report written to {report_path}", file=out)
    return report_path


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    env = dict(__import__("os").environ)
    if args.home:
        env["IDIOLECT_HOME"] = args.home
    try:
        config = load_config(env)
    except ConfigError as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return 2

    if args.serve:
        from .service.app import serve

        serve(config, args.serve)
        return 0
    if args.eval_grid:
        run_eval(config, args.eval_grid, args.seed, sys.stdout)
        return 0
    client = _make_client(args, config)
    if args.batch:
        input_path, output_path = (Path(p) for p in args.batch)
        if not input_path.exists():
            print(f"fatal: no such input file {input_path}", file=sys.stderr)
            return 2
        batch_mode(client, input_path, output_path, log=sys.stdout)
        return 0
    from .repl import repl_loop

    return repl_loop(config, client)


if __name__ == "__main__":
    sys.exit(main())
