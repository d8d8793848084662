from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from fedsvg_runtime.adapters.config.file_config_provider import FileConfigProvider
from fedsvg_runtime.application.errors import FedSvgError
from fedsvg_runtime.application.run_config import RunConfig
from fedsvg_runtime.app.factory import create_runner, resolve_config_path
from fedsvg_runtime.domain.federation.models import PARADIGMS
from fedsvg_runtime.observability.logging import configure_logging

logger = logging.getLogger(__name__)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", dest="config_path", help="JSON run config or bundled name")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--threads", type=int)
    parser.add_argument("--out-dir", dest="out_dir", help="root for volumes/, graphs/ and runs/")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fedsvg", description="Federated supervoxel-graph runtime")
    parser.add_argument("--log-level", dest="log_level")
    subparsers = parser.add_subparsers(dest="command")

    _add_common(subparsers.add_parser("synth", help="Generate synthetic multi-modal volumes"))
    _add_common(subparsers.add_parser("preprocess", help="Build supervoxel graphs from volumes"))

    train = subparsers.add_parser("train", help="Train one paradigm or all of them")
    _add_common(train)
    train.add_argument("--paradigm", choices=[*PARADIGMS, "all"], default="federated")
    train.add_argument("--repeats", type=int, help="number of consecutive seeds")

    explain = subparsers.add_parser("explain", help="Modality attention and statistics")
    _add_common(explain)
    explain.add_argument("--checkpoint", required=True)
    explain.add_argument("--explain-dir", dest="explain_dir")

    report = subparsers.add_parser("report", help="Comparison table and training curves")
    _add_common(report)
    report.add_argument("run_dirs", nargs="+")
    report.add_argument("--report-dir", dest="report_dir")

    config = subparsers.add_parser("config", help="Inspect or check run configuration")
    group = config.add_mutually_exclusive_group(required=True)
    group.add_argument("--dump-defaults", action="store_true")
    group.add_argument("--dump-schema", action="store_true")
    group.add_argument("--check", metavar="FILE")
    return parser


def _config_command(args: argparse.Namespace) -> dict:
    if args.dump_defaults:
        print(json.dumps(RunConfig().model_dump(mode="json"), indent=2, sort_keys=True))
        return {"command": "config"}
    if args.dump_schema:
        print(json.dumps(RunConfig.model_json_schema(), indent=2, sort_keys=True))
        return {"command": "config"}
    provider = FileConfigProvider(resolve_config_path(args.check))
    provider.get_config()
    return {"command": "config", "valid": True, "config_hash": provider.config_hash()}


def dispatch(args: argparse.Namespace) -> object:
    if args.command == "config":
        return _config_command(args)
    runner = create_runner(
        args.config_path, args.seed, args.threads, args.out_dir, getattr(args, "repeats", None)
    )
    if args.command == "synth":
        return runner.synth()
    if args.command == "preprocess":
        return runner.preprocess()
    if args.command == "train":
        paradigms = PARADIGMS if args.paradigm == "all" else (args.paradigm,)
        return [result for p in paradigms for result in runner.train(p)]
    if args.command == "explain":
        return runner.explain(args.checkpoint, args.explain_dir)
    return runner.report(args.run_dirs, args.report_dir)


def _error_line(exc: BaseException) -> str:
    message = " ".join(str(exc).split())
    return f"error={type(exc).__name__} message={message}"


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    if args.command is None:
        parser.print_help()
        return 0
    try:
        summary = dispatch(args)
    except FedSvgError as exc:
        print(_error_line(exc), file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        logger.debug("unexpected failure", exc_info=True)
        print(_error_line(exc), file=sys.stderr)
        return 1
    print(json.dumps(summary, sort_keys=True, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
