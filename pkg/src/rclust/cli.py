"""Command-line interface: ``rclust {cluster,benchmark,diagnose,tune,scale}``.

Exit status is 0 on success, 1 on a runtime failure and 2 on bad usage or
unreadable input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path

from . import experiments
from .dataio import DatasetSource, ResultRecord, format_results, load_ucr_tsv
from .errors import ConfigError, ParseError, RClustError
from .kernelbank import BankConfig, FeatureBank
from .pipeline import PipelineConfig, run_protocol
from .stats import render_aggregate
from .transform import set_threads, transform_dataset

USAGE_ERRORS = (ConfigError, ParseError, FileNotFoundError)


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _u64(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _common_parser():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("pipeline options")
    g.add_argument("--seed", type=_u64, default=0, help="base seed (default 0)")
    g.add_argument("--kernels", type=int, default=500, help="number of kernels (default 500)")
    g.add_argument("--kernel-length", type=int, default=9, help="odd kernel length (default 9)")
    g.add_argument("--pca-threshold", type=float, default=0.01,
                   help="drop components explaining less than this share (default 0.01)")
    g.add_argument("--no-pca", action="store_true", help="cluster the raw PPV features")
    g.add_argument("--runs", type=int, default=10, help="protocol restarts (default 10)")
    g.add_argument("--legacy-bias", action="store_true",
                   help="assign bias quantiles in feature order (reproduces the "
                        "autocorrelation artifact)")
    g.add_argument("--weight-mode", choices=("sum-zero", "iid"), default="sum-zero")
    g.add_argument("--fixed-bank", action="store_true",
                   help="draw one bank and vary only the K-means initialisation")
    g.add_argument("--merge-policy", choices=("merge", "train-only", "test-only"),
                   default="merge")
    g.add_argument("--znorm", action="store_true", help="z-normalise each series on load")
    g.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $RCLUST_THREADS or all cores)")
    o = p.add_argument_group("output options")
    o.add_argument("--out", help="output file (cluster) or directory (benchmark)")
    o.add_argument("--format", choices=("csv", "json", "markdown"), default=None,
                   help="output format (default: csv for results, markdown for reports)")
    o.add_argument("--save-bank", help="write the best run's bank and PCA model as JSON")
    o.add_argument("--load-bank", help="reuse a bank saved with --save-bank")
    o.add_argument("--dump-features", help="write the best run's PPV feature matrix as CSV")
    return p


def _pipeline_config(args, k=2) -> PipelineConfig:
    bank = BankConfig(
        num_features=args.kernels,
        kernel_length=args.kernel_length,
        weight_mode=args.weight_mode,
        bias_mode="legacy-sorted" if args.legacy_bias else "permuted-quantiles",
        seed=args.seed,
    )
    return PipelineConfig(bank=bank, pca_enabled=not args.no_pca,
                          pca_threshold=args.pca_threshold, k=k, runs=args.runs,
                          fixed_bank=args.fixed_bank)


def _apply_threads(args):
    threads = args.threads
    if threads is None and os.environ.get("RCLUST_THREADS"):
        try:
            threads = int(os.environ["RCLUST_THREADS"])
        except ValueError:
            raise ConfigError("RCLUST_THREADS must be an integer") from None
    if threads is not None and threads < 1:
        raise ConfigError("--threads must be >= 1")
    set_threads(threads)


def _emit(text, path=None):
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _load_bank(path):
    path = Path(path)
    if not path.is_file():
        raise ParseError("no such bank file", path)
    try:
        doc = json.loads(path.read_text())
        return FeatureBank.from_dict(doc["bank"])
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"invalid bank file: {exc}", path) from None


def cmd_cluster(args) -> int:
    for p in args.paths:
        if not Path(p).is_file():
            raise ParseError("no such file", p)
    train = args.paths[0]
    test = args.paths[1] if len(args.paths) > 1 else None
    policy = args.merge_policy if test else "train-only"
    ds = load_ucr_tsv(DatasetSource(train, test, policy), znormalize=args.znorm)
    k = args.k if args.k is not None else ds.n_classes
    config = _pipeline_config(args, k=k)
    bank = _load_bank(args.load_bank) if args.load_bank else None

    t0 = time.perf_counter()
    outcome = run_protocol(ds, config, args.seed, bank=bank)
    wall = (time.perf_counter() - t0) * 1e3
    best = outcome.best

    parts = [f"dataset={ds.name}", f"series={ds.n_series}", f"length={ds.length}",
             f"k={k}", f"runs={config.runs}"]
    if outcome.best_ari is not None:
        parts.append(f"best_ari={outcome.best_ari:.4f}")
    parts.append(f"retained_dims={outcome.retained_dims}")
    parts += [f"{stage}_ms={ms:.1f}" for stage, ms in outcome.timings_ms.items()]
    print(" ".join(parts))

    if args.out:
        record = ResultRecord(ds.name, config.label(), args.seed, config.runs,
                              outcome.aris or [], outcome.best_ari, wall,
                              outcome.retained_dims)
        _emit(format_results([record], args.format or "csv"), args.out)
    if args.save_bank:
        doc = {"pipeline": config.to_dict(), "bank": best.bank.to_dict(),
               "pca": best.pca.to_dict() if best.pca is not None else None}
        _emit(json.dumps(doc, indent=1) + "\n", args.save_bank)
    if args.dump_features:
        transform_dataset(ds, best.bank).to_csv(args.dump_features)
    return 0


def cmd_benchmark(args) -> int:
    datasets = []
    if args.manifest:
        entries = experiments.read_manifest(args.manifest)
        datasets = experiments.load_manifest_datasets(entries, args.merge_policy, args.znorm)
    elif args.synthetic:
        datasets = experiments.synthetic_suite(args.synthetic, args.seed)
    external = experiments.read_score_csv(args.external) if args.external else None
    if not datasets and external is None:
        raise ConfigError("benchmark needs --manifest, --synthetic or --external")

    config = _pipeline_config(args)
    result = experiments.run_benchmark(datasets, config, args.seed, external,
                                       name=args.name, alpha=args.alpha)

    out = Path(args.out or "benchmark-out")
    out.mkdir(parents=True, exist_ok=True)
    (out / "scores.csv").write_text(experiments.score_table_csv(result.table))
    (out / "scores.md").write_text(experiments.score_table_markdown(result.table))
    (out / "summary.md").write_text(render_aggregate(result.summary, "markdown"))
    (out / "summary.csv").write_text(render_aggregate(result.summary, "csv"))
    if result.records:
        fmt = args.format or "csv"
        suffix = {"csv": "csv", "json": "json", "markdown": "md"}[fmt]
        (out / f"results.{suffix}").write_text(format_results(result.records, fmt))

    print(render_aggregate(result.summary, "markdown"), end="")
    if result.friedman is not None:
        f = result.friedman
        (out / "friedman.json").write_text(json.dumps(asdict(f), indent=1) + "\n")
        print(f"friedman statistic={f.statistic:.4f} p={f.p_value:.6g} "
              f"rejected={str(f.rejected).lower()}")
        (out / "control.csv").write_text(result.control.to_csv())
        (out / "control.md").write_text(result.control.to_markdown())
        (out / "pairwise.csv").write_text(result.pairwise.to_csv())
        (out / "pairwise.md").write_text(result.pairwise.to_markdown())
        print(result.control.to_markdown(), end="")
    print(f"wrote {out}/")
    return 0


def cmd_diagnose(args) -> int:
    report = experiments.diagnose(seeds=args.seeds, base_seed=args.seed,
                                  num_features=args.kernels,
                                  kernel_length=args.kernel_length,
                                  series_length=args.length, n_series=args.series,
                                  max_lag=args.max_lag, alpha=args.alpha,
                                  weight_mode=args.weight_mode)
    if args.format == "csv":
        text = report.to_csv()
    elif args.format == "json":
        text = json.dumps({m: r.tolist() for m, r in report.rejection_rate.items()},
                          indent=1) + "\n"
    else:
        text = report.to_markdown()
    _emit(text, args.out)
    if args.out:
        print(report.to_markdown(), end="")
    return 0


def cmd_tune(args) -> int:
    if args.manifest:
        datasets = experiments.load_manifest_datasets(
            experiments.read_manifest(args.manifest), args.merge_policy, args.znorm)
    else:
        datasets = experiments.synthetic_suite(args.synthetic or 3, args.seed)
    rows, _ = experiments.tune(datasets, args.grid_kernels, args.grid_lengths,
                               _pipeline_config(args), args.seed)
    fmt = "csv" if args.format == "csv" else "markdown"
    _emit(experiments.render_tune(rows, fmt), args.out)
    if args.out:
        print(experiments.render_tune(rows, "markdown"), end="")
    return 0


def cmd_scale(args) -> int:
    report = experiments.scale(lengths=args.lengths, sizes=args.sizes,
                               fixed_size=args.fixed_size, fixed_length=args.fixed_length,
                               classes=args.classes, config=_pipeline_config(args),
                               seed=args.seed, repeats=args.repeats)
    text = report.to_csv() if args.format == "csv" else report.to_markdown()
    _emit(text, args.out)
    print(f"length_slope={report.length_slope:.3f} size_slope={report.size_slope:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="rclust",
        description="Time-series clustering with random convolutional kernels.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", parents=[common], help="cluster one UCR dataset")
    p.add_argument("paths", nargs="+", metavar="TSV", help="TRAIN file [TEST file]")
    p.add_argument("-k", "--k", type=int, default=None,
                   help="number of clusters (default: number of labels)")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("benchmark", parents=[common], help="best-of-runs ARI over many datasets")
    p.add_argument("--manifest", help="lines of name,train_path,test_path")
    p.add_argument("--synthetic", type=int, default=0,
                   help="use N generated datasets instead of a manifest")
    p.add_argument("--external", help="CSV dataset,<algorithm>,... of competitor ARIs")
    p.add_argument("--name", default="R-Clustering", help="column name for this method")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser(
        "diagnose", parents=[common],
        help="Ljung-Box test of the PPV vector of white noise along the feature axis",
        description="Fits banks in both bias modes on white noise and tests the "
                    "transformed vector, read in feature order, for autocorrelation. "
                    "Feature order is the bank's construction order, not shuffled, so "
                    "the legacy mode's sorted quantiles show up as a trend.")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--length", type=int, default=500, help="white-noise series length")
    p.add_argument("--series", type=int, default=10, help="series per noise dataset")
    p.add_argument("--max-lag", type=int, default=20)
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("tune", parents=[common], help="grid over kernel count and length")
    p.add_argument("--manifest")
    p.add_argument("--synthetic", type=int, default=0)
    p.add_argument("--grid-kernels", type=_int_list,
                   default=list(experiments.DEFAULT_GRID_KERNELS))
    p.add_argument("--grid-lengths", type=_int_list,
                   default=list(experiments.DEFAULT_GRID_LENGTHS))
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("scale", parents=[common], help="timing sweeps over length and size")
    p.add_argument("--lengths", type=_int_list, default=list(experiments.DEFAULT_SCALE_LENGTHS))
    p.add_argument("--sizes", type=_int_list, default=list(experiments.DEFAULT_SCALE_SIZES))
    p.add_argument("--fixed-size", type=int, default=100)
    p.add_argument("--fixed-length", type=int, default=600)
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--repeats", type=int, default=1)
    p.set_defaults(func=cmd_scale)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_threads(args)
        return args.func(args)
    except USAGE_ERRORS as exc:
        print(f"rclust: error: {exc}", file=sys.stderr)
        return 2
    except RClustError as exc:
        print(f"rclust: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
