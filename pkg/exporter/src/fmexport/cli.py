"""Command-line entry: `fmexport export --model ckpt --data dir --batch 16
--layers "conv*" --out dumps/`.

Exit codes: 0 success, 2 usage or input error.
"""

import argparse
import sys

from .export import ExportSpec, export_feature_maps


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fmexport",
        description="Dump post-activation feature maps as tensor containers",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("export", help="run one batch and dump selected layers")
    p.add_argument("--model", required=True, help="checkpoint path")
    p.add_argument("--data", required=True, help="directory of .npy samples")
    p.add_argument("--batch", type=_positive_int, default=16)
    p.add_argument("--layers", default="conv*", help="layer name glob")
    p.add_argument("--out", required=True, help="dump directory")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    spec = ExportSpec(
        model_path=args.model,
        data_dir=args.data,
        batch=args.batch,
        layer_pattern=args.layers,
        out_dir=args.out,
    )
    try:
        entries = export_feature_maps(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(entries)} layers to {args.out}")
    return 0


def entrypoint():
    sys.exit(main())
