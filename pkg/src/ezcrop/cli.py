"""Command-line interface.

Subcommands: analyze, plan, compose, verify-conv, report, bench. Every
command is deterministic given its inputs (and seed) and overwrites its
outputs identically on re-run.

Exit codes: 0 success, 1 numeric or verification failure, 2 usage or
input error. EZCROP_THREADS caps the worker count used for per-layer
scoring.
"""

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import formats, report, verify
from .errors import FormatError, NumericError
from .importance import DEFAULT_BETA, DEFAULT_CIRCLE_FRACTION, METRICS, score_layer
from .pruner import PlanLayer, PrunePlan, compose_plans, make_plan


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _size_list(text):
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from exc


def worker_count():
    env = os.environ.get("EZCROP_THREADS")
    if env is not None:
        try:
            cap = int(env)
        except ValueError:
            raise FormatError(f"EZCROP_THREADS must be an integer, got {env!r}")
        if cap < 1:
            raise FormatError(f"EZCROP_THREADS must be >= 1, got {cap}")
        return cap
    return min(4, os.cpu_count() or 1)


def _map_layers(func, items):
    """Apply func across layers, in order, on up to worker_count() threads."""
    workers = worker_count()
    if workers == 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def cmd_analyze(args):
    dump_dir = Path(args.dumps)
    entries = formats.read_manifest(dump_dir / formats.MANIFEST_NAME)

    def score_entry(entry):
        fm = formats.load_feature_maps(dump_dir, entry)
        if args.batch_limit is not None:
            fm = fm[: args.batch_limit]
        return score_layer(
            fm,
            args.metric,
            beta=args.beta,
            fraction=args.fraction,
            layer=entry.layer,
        )

    importances = _map_layers(score_entry, entries)
    formats.write_scores(args.output, importances)
    print(f"wrote scores for {len(importances)} layers to {args.output}")
    return 0


def cmd_plan(args):
    importances = formats.read_scores(args.scores)
    spec = formats.read_keep_spec(args.keep_spec)
    by_layer = {imp.layer: imp for imp in importances}
    unknown = sorted(set(spec) - set(by_layer))
    if unknown:
        raise FormatError(f"keep spec names unknown layer {unknown[0]!r}")
    missing = sorted(set(by_layer) - set(spec))
    if missing:
        raise FormatError(f"keep spec missing layer {missing[0]!r}")
    layers = []
    for imp in importances:
        kind, value = spec[imp.layer]
        total = len(imp.scores)
        if kind == "ratio":
            count = max(1, int(value * total + 0.5))
        else:
            count = value
        layers.append(make_plan(imp, count))
    formats.write_plan(args.output, PrunePlan(layers=layers))
    print(f"wrote plan for {len(layers)} layers to {args.output}")
    return 0


def cmd_compose(args):
    plans = [formats.read_plan(path) for path in args.plans]
    composite = plans[0]
    for nxt in plans[1:]:
        composite = compose_plans(composite, nxt)
    formats.write_plan(args.output, composite)
    print(f"wrote composite of {len(plans)} plans to {args.output}")
    return 0


def cmd_verify_conv(args):
    result = verify.run_verification(args.seed, args.trials)
    text = verify.format_report(result)
    sys.stdout.write(text)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    return 0 if result.passed else 1


def cmd_report(args):
    score_sets = [formats.read_scores(path) for path in args.scores]
    heatmap_maps = None
    if args.heatmaps:
        dump_dir = Path(args.heatmaps)
        entries = formats.read_manifest(dump_dir / formats.MANIFEST_NAME)
        heatmap_maps = {
            e.layer: formats.load_feature_maps(dump_dir, e) for e in entries
        }
        for imp in score_sets[0]:
            if imp.layer not in heatmap_maps:
                raise FormatError(
                    f"dump directory has no feature maps for layer {imp.layer!r}"
                )
    written = report.emit_report(
        score_sets, args.output, heatmap_maps=heatmap_maps, heatmap_beta=args.beta
    )
    print(f"wrote {len(written)} files to {args.output}")
    return 0


def cmd_bench(args):
    records = bench_mod.run_bench(args.sizes, args.reps, args.seed, threads=args.threads)
    formats._dump_json(args.output, bench_mod.report_doc(records, args.seed, args.threads))
    slopes = {r.metric: r.slope for r in records}
    for metric, slope in sorted(slopes.items()):
        print(f"{metric}: fitted log-log slope {slope:.3f}")
    print(f"wrote benchmark report to {args.output}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ezcrop",
        description="Frequency-domain channel importance scoring and pruning plans",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="score every layer in a feature-map dump")
    p.add_argument("dumps", help="dump directory containing manifest.json")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA,
                   help="energy-zone size parameter in (0, 1)")
    p.add_argument("--metric", choices=METRICS, default="energy")
    p.add_argument("--fraction", type=float, default=DEFAULT_CIRCLE_FRACTION,
                   help="energy fraction for the circle metric")
    p.add_argument("--batch-limit", type=_positive_int, default=None,
                   help="score at most this many batch samples per layer")
    p.add_argument("-o", "--output", required=True, help="scores file to write")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("plan", help="turn scores plus a keep spec into a prune plan")
    p.add_argument("scores", help="scores file from analyze")
    p.add_argument("keep_spec", help="per-layer keep ratios/counts (JSON)")
    p.add_argument("-o", "--output", required=True, help="plan file to write")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("compose", help="compose multi-pass prune plans left to right")
    p.add_argument("plans", nargs="+", help="two or more plan files, first pass first")
    p.add_argument("-o", "--output", required=True, help="composite plan file")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser(
        "verify-conv",
        help="randomized check: frequency-domain convolution vs spatial reference",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=_positive_int, default=200)
    p.add_argument("-o", "--output", default=None, help="also write the report here")
    p.set_defaults(func=cmd_verify_conv)

    p = sub.add_parser("report", help="emit ranking tables, agreement stats, images")
    p.add_argument("scores", nargs="+", help="one or two scores files")
    p.add_argument("--heatmaps", default=None, metavar="DUMPS",
                   help="dump directory; emit per-channel spectral heatmaps")
    p.add_argument("--beta", type=float, default=None,
                   help="annotate heatmaps with this zone size")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("bench", help="time energy vs rank metrics across sizes")
    p.add_argument("--sizes", type=_size_list, default=[64, 128, 256, 512, 1024])
    p.add_argument("--reps", type=_positive_int, default=9)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=_positive_int, default=1,
                   help="worker-pool cap while timing (1 = single-threaded)")
    p.add_argument("-o", "--output", required=True, help="JSON report file")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.func is cmd_report and len(args.scores) > 2:
            parser.error("report takes one or two scores files")
        if args.func is cmd_compose and len(args.plans) < 2:
            parser.error("compose needs at least two plan files")
    except SystemExit as exc:  # argparse already printed the message
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (NumericError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
