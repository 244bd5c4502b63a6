#!/usr/bin/env python3
"""
Case suffix prediction with Daemon Action sampling
Usage: python main.py compare --log logs/loan.csv --out output/reports/loan
"""

import argparse
import asyncio
import os
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd

# Add the project root to the path so we can import our modules
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from agents.harness import rank_table, run_experiment, winners
from agents.sampling import make_rng
from config import Config, ExperimentConfig
from models.data_models import EventLog, SearchSpace
from models.ngram import train_ngram
from tools.eventlog import ColumnMapping, describe_log, filter_activities, max_trace_length, parse_csv_log, write_csv_log
from tools.model_store import load_model, save_model
from tools.reports import markdown_table, report_frame, statistics_frame, write_experiment
from tools.synthetic import SynthSpecError, generate_synthetic_log, load_spec
from utils.files import atomic_writer
from utils.logging import EventLogger
from utils.validators import DEFAULT_POLICIES, PolicySyntaxError, is_open_fraction, parse_number_list, parse_policies, parse_policy


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _non_negative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not is_open_fraction(value):
        raise argparse.ArgumentTypeError(f"must be in (0, 1), got {value}")
    return value


def _policies(text: str):
    try:
        return parse_policies(text)
    except PolicySyntaxError as e:
        raise argparse.ArgumentTypeError(str(e))


def _policy(text: str):
    try:
        return parse_policy(text)
    except PolicySyntaxError as e:
        raise argparse.ArgumentTypeError(str(e))


def _int_list(text: str):
    try:
        values = parse_number_list(text, int)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("n-gram orders must be >= 1")
    return values


def _float_list(text: str):
    try:
        values = parse_number_list(text, float)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))
    if any(v < 0 for v in values):
        raise argparse.ArgumentTypeError("smoothing values must be >= 0")
    return values


def build_parser(config: Config) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Predict case suffixes and remaining times; compare sampling policies',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py synth --spec specs/loop_heavy.env --out data/loop_heavy.csv
  python main.py compare --log data/loop_heavy.csv --out output/reports/loop_heavy
  python main.py train --log data/loop_heavy.csv --order 3 --out models/loop.json
  python main.py evaluate --log data/loop_heavy.csv --policy daemon --model models/loop.json
        """
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=config.seed, help='Master seed (default 42)')
    common.add_argument('--workers', type=_positive_int, default=config.workers, help='Worker threads for generation')
    common.add_argument('--debug', action='store_true', help='Per-batch logs and tracebacks on errors')

    log_args = argparse.ArgumentParser(add_help=False)
    log_args.add_argument('--case-col', default='case_id')
    log_args.add_argument('--activity-col', default='activity')
    log_args.add_argument('--time-col', default='end_time')
    log_args.add_argument('--role-col', default='role')
    log_args.add_argument('--time-format', default=None, help='strftime format (default ISO-8601)')
    log_args.add_argument('--activity-filter', default=None, help='Regex; keep only matching activities')

    protocol = argparse.ArgumentParser(add_help=False)
    protocol.add_argument('--split', type=_fraction, default=config.train_fraction, help='Train fraction of the temporal split')
    protocol.add_argument('--hpo-iters', type=_positive_int, default=config.hpo_iterations, help='Random search iterations')
    protocol.add_argument('--max-steps-factor', type=_positive_int, default=config.max_steps_factor,
                          help='Generation cap as a multiple of the longest training trace')
    protocol.add_argument('--orders', type=_int_list, default=list(SearchSpace().orders), help='Search space for the n-gram order')
    protocol.add_argument('--alphas', type=_float_list, default=list(SearchSpace().alphas), help='Search space for smoothing')

    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('train', parents=[common, log_args], help='Train and save an n-gram model')
    p.add_argument('--log', required=True, help='CSV event log')
    p.add_argument('--order', type=_positive_int, default=3)
    p.add_argument('--alpha', type=_non_negative_float, default=0.0)
    p.add_argument('--out', required=True, help='Model file to write')

    p = sub.add_parser('evaluate', parents=[common, log_args, protocol], help='Evaluate one sampling policy')
    p.add_argument('--log', required=True, help='CSV event log')
    p.add_argument('--policy', type=_policy, default=_policy('daemon'))
    p.add_argument('--order', type=_positive_int, default=None, help='Skip the search and use this order')
    p.add_argument('--alpha', type=_non_negative_float, default=None, help='Smoothing with --order (default 0)')
    p.add_argument('--model', default=None, help='Use a saved model instead of training')
    p.add_argument('--out', default=config.output_dir, help='Output directory')

    p = sub.add_parser('compare', parents=[common, log_args, protocol], help='Run the full protocol for several policies')
    p.add_argument('--log', action='append', required=True, help='CSV event log; repeat to rank across datasets')
    p.add_argument('--policies', type=_policies, default=_policies(DEFAULT_POLICIES))
    p.add_argument('--dataset', default=None, help='Dataset name in reports, single --log only (default: log file stem)')
    p.add_argument('--out', default=config.output_dir, help='Output directory')
    p.add_argument('--format', choices=['csv', 'markdown'], default='markdown', help='Summary printed to stdout')

    p = sub.add_parser('synth', parents=[common], help='Generate a synthetic CSV log')
    p.add_argument('--spec', required=True, help='KEY=VALUE synthetic spec file')
    p.add_argument('--out', required=True, help='CSV file to write')

    p = sub.add_parser('describe', parents=[log_args], help='Print event log statistics')
    p.add_argument('--log', required=True, help='CSV event log')
    p.add_argument('--format', choices=['csv', 'markdown'], default='markdown')
    p.add_argument('--debug', action='store_true')
    return parser


def load_log(args, logger: EventLogger, path: Optional[str] = None) -> EventLog:
    path = path or args.log
    mapping = ColumnMapping(case_id=args.case_col, activity=args.activity_col, end_time=args.time_col, role=args.role_col)
    with logger.timed(step="parse_log", component="cli") as t:
        log = parse_csv_log(path, mapping, args.time_format)
        if args.activity_filter:
            log = filter_activities(log, args.activity_filter)
        t.result("ok", extra={"path": str(path), "cases": len(log), "events": log.n_events, "activities": len(log.vocabulary.labels)})
    return log


def experiment_config(args, dataset: str, fixed=None) -> ExperimentConfig:
    return ExperimentConfig(
        dataset=dataset,
        seed=args.seed,
        train_fraction=args.split,
        hpo_iterations=args.hpo_iters,
        space=SearchSpace(orders=tuple(args.orders), alphas=tuple(args.alphas)),
        max_steps_factor=args.max_steps_factor,
        workers=args.workers,
        fixed=fixed,
    )


def dataset_names(args) -> List[str]:
    """One report name per --log: --dataset for a single log, else the file stems."""
    if args.dataset:
        return [args.dataset]
    return [Path(p).stem for p in args.log]


def check_args(parser: argparse.ArgumentParser, args) -> None:
    """Option combinations argparse cannot express on its own."""
    if args.command == 'evaluate':
        if args.alpha is not None and args.order is None:
            parser.error("evaluate: --alpha requires --order")
        if args.model and args.order is not None:
            parser.error("evaluate: --model and --order are mutually exclusive")
    elif args.command == 'compare':
        if args.dataset and len(args.log) > 1:
            parser.error("compare: --dataset only applies to a single --log")
        names = dataset_names(args)
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            parser.error(f"compare: logs share the dataset name(s) {', '.join(duplicates)}")


async def cmd_train(args, logger: EventLogger) -> int:
    log = load_log(args, logger)
    with logger.timed(step="train", component="cli") as t:
        model = train_ngram(log, args.order, args.alpha)
        path = save_model(model, args.out)
        t.result("ok", extra={"path": str(path)})
    print(f"vocabulary size: {model.vocabulary.size} (incl. EOC)")
    print(f"traces: {len(log)}")
    print(f"max trace length: {max_trace_length(log)}")
    print(f"✅ model written to {path}")
    return 0


async def cmd_evaluate(args, logger: EventLogger) -> int:
    log = load_log(args, logger)
    model = None
    fixed = None
    if args.model:
        model = load_model(args.model)
        if model.vocabulary != log.vocabulary:
            raise ValueError("model vocabulary does not match the event log")
    elif args.order is not None:
        fixed = (args.order, 0.0 if args.alpha is None else args.alpha)
    config = experiment_config(args, Path(args.log).stem, fixed)
    report = await run_experiment(log, [args.policy], config, logger=logger, model=model)
    write_experiment([report], rank_table([(report.dataset, report)]), args.out)
    print(markdown_table(report_frame(report)))
    return 0


async def cmd_compare(args, logger: EventLogger) -> int:
    reports = []
    for path, name in zip(args.log, dataset_names(args)):
        log = load_log(args, logger, path)
        reports.append(await run_experiment(log, args.policies, experiment_config(args, name), logger=logger))
    tables = rank_table([(r.dataset, r) for r in reports])
    with logger.timed(step="write_report", component="cli") as t:
        paths = write_experiment(reports, tables, args.out)
        t.result("ok", extra={k: str(v) for k, v in paths.items()})

    frame = pd.concat([report_frame(r) for r in reports], ignore_index=True)
    if args.format == 'csv':
        sys.stdout.write(frame.to_csv(index=False, float_format="%.6f", lineterminator="\n"))
    else:
        print(markdown_table(frame))
    for metric, table in tables.items():
        for dataset, best in winners(table).items():
            print(f"🏆 {metric} [{dataset}]: {', '.join(best)}")
    print(f"📄 report: {paths['report']}")
    return 0


async def cmd_synth(args, logger: EventLogger) -> int:
    spec = load_spec(args.spec)
    log = generate_synthetic_log(spec, make_rng(args.seed))
    with atomic_writer(args.out) as f:
        write_csv_log(log, f)
    logger.log(step="synth", component="cli", outcome="ok", extra={"cases": len(log), "events": log.n_events, "path": args.out})
    print(f"✅ {len(log)} cases, {log.n_events} events written to {args.out}")
    return 0


async def cmd_describe(args, logger: EventLogger) -> int:
    log = load_log(args, logger)
    frame = statistics_frame(Path(args.log).stem, describe_log(log))
    if args.format == 'csv':
        sys.stdout.write(frame.to_csv(index=False, float_format="%.4f", lineterminator="\n"))
    else:
        print(markdown_table(frame))
    return 0


COMMANDS = {
    'train': cmd_train,
    'evaluate': cmd_evaluate,
    'compare': cmd_compare,
    'synth': cmd_synth,
    'describe': cmd_describe,
}


async def main(argv: Optional[List[str]] = None) -> int:
    try:
        config = Config()
    except ValueError as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return 1

    parser = build_parser(config)
    args = parser.parse_args(argv)
    check_args(parser, args)
    logger = EventLogger(debug=args.debug)

    try:
        return await COMMANDS[args.command](args, logger)
    except SynthSpecError as e:
        print(f"{parser.prog} {args.command}: error: {e}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print("\n❌ Operation cancelled by user", file=sys.stderr)
        return 1
    except (ValueError, OSError) as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        if args.debug:
            import traceback
            traceback.print_exc()
        else:
            print("💡 Use --debug flag for detailed error information", file=sys.stderr)
        return 1


if __name__ == "__main__":
    exit(asyncio.run(main()))
