"""Command line entry point: ``ntnsim run --config cfg.yaml --sweep power --out results``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import engine, report
from .scenario import ConfigError, ScenarioConfig, load_config, validate_config

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("ntnsim")


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


class _Parser(argparse.ArgumentParser):
    # a bad invocation is a configuration problem, not a runtime failure
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ntnsim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a Monte Carlo sweep and write CSV (and SVG) results")
    run.add_argument("--config", type=Path, help="YAML scenario document (defaults if omitted)")
    run.add_argument("--sweep", choices=sorted(engine.AXES), required=True)
    run.add_argument("--trials", type=_positive)
    run.add_argument("--seed", type=_u64)
    run.add_argument("--workers", type=_positive)
    run.add_argument("--out", type=Path, required=True)
    run.add_argument("--svg", action="store_true", help="also render one SVG chart per metric")
    return parser


def load(path: Path | None) -> ScenarioConfig:
    if path is None:
        return validate_config(ScenarioConfig())
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return load_config(text)


def cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = load(args.config)
        spec = engine.sweep_from_config(cfg, args.sweep, args.trials, args.seed)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    workers = args.workers or cfg.run.workers
    try:
        t0 = time.perf_counter()
        records = engine.run_sweep(cfg, spec, workers=workers)
        args.out.mkdir(parents=True, exist_ok=True)
        stem = f"sweep_{args.sweep}"
        csv_path = report.write_csv(records, args.out / f"{stem}.csv")
        written = [csv_path]
        if args.svg:
            written += report.write_figures(csv_path, args.out, stem)
        log.info("%d trials in %.1f s", spec.trials, time.perf_counter() - t0)
    except Exception as exc:  # noqa: BLE001 - mapped to the runtime exit code
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for path in written:
        print(path)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return cmd_run(args)
    return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
