"""Command line front end: fit, predict, bench, gen, kkmeans.

Exit codes: 0 success, 1 runtime failure (bad data, bad files), 2 flag
errors.  stdout carries machine-parseable results only (key=value lines,
CSV, or JSON depending on the subcommand); diagnostics go to stderr.
"""

import argparse
import csv
import json
import sys

import numpy as np

from .baselines import kernel_kmeans, kmeans_then_tree
from .data_io import (
    aggregate_runs,
    gen_imm_pathology,
    gen_rotated_gaussians,
    load_csv,
    minmax_scale,
    report_lines,
    subsample,
    write_labels,
    write_report,
)
from .exceptions import ConfigError, DimensionMismatchError, KauriError, ParseError
from .kernels import KERNEL_NAMES, KernelSpec, compute_kernel
from .masses import objective_from_labels
from .metrics import (
    adjusted_rand_index,
    normalized_score,
    weighted_average_depth,
    weighted_average_explanation_size,
)
from .tree import GrowConfig, grow_tree, predict, tree_from_json, tree_to_dot, tree_to_json

# CLI spelling uses hyphens; module names use underscores.
_KERNEL_CHOICES = tuple(name.replace("_", "-") for name in KERNEL_NAMES)


def _gamma_flag(text):
    if text == "auto":
        return "auto"
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or a number, got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"gamma must be positive, got {value}")
    return value


def _fraction_flag(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"expected a fraction in (0, 1], got {value}")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _kernel_spec(args):
    return KernelSpec(
        name=args.kernel.replace("-", "_"),
        gamma=args.gamma,
        degree=args.degree,
        coef0=args.coef0,
    )


def _add_kernel_flags(parser):
    parser.add_argument("--kernel", choices=_KERNEL_CHOICES, default="linear")
    parser.add_argument("--gamma", type=_gamma_flag, default="auto",
                        help="kernel bandwidth, 'auto' or a positive number")
    parser.add_argument("--degree", type=_positive_int, default=3)
    parser.add_argument("--coef0", type=float, default=1.0)


def _add_data_flags(parser):
    parser.add_argument("--data", required=True, help="input CSV")
    parser.add_argument("--schema", help="JSON sidecar {column: kind}")
    parser.add_argument("--labels-col", help="column holding ground-truth labels")
    parser.add_argument("--scale", choices=("minmax", "none"), default="minmax")
    parser.add_argument("--max-samples", type=_positive_int, default=25000,
                        help="row cap; the dense kernel needs n^2 memory")


def _load_features(args):
    schema = None
    if args.schema is not None:
        with open(args.schema, encoding="utf-8") as fh:
            try:
                schema = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{args.schema}: not valid JSON: {exc}") from exc
    if args.labels_col is not None:
        schema = dict(schema or {})
        schema[args.labels_col] = "label"
    dataset = load_csv(args.data, schema=schema)
    if dataset.n_dropped:
        print(f"dropped {dataset.n_dropped} rows with missing values", file=sys.stderr)
    if dataset.data.shape[0] > args.max_samples:
        raise ConfigError(
            f"{args.data} has {dataset.data.shape[0]} rows, over the "
            f"--max-samples cap of {args.max_samples}; raise the cap to proceed"
        )
    data = minmax_scale(dataset.data) if args.scale == "minmax" else dataset.data
    return data, dataset


def _print_kv(key, value):
    if isinstance(value, float):
        value = format(value, ".17g")
    elif isinstance(value, bool):
        value = "true" if value else "false"
    print(f"{key}={value}")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_fit(args):
    data, _ = _load_features(args)
    kernel = compute_kernel(data, _kernel_spec(args))
    config = GrowConfig(
        max_clusters=args.k_max,
        max_leaves=args.max_leaves,
        min_leaf_size=args.min_leaf_size,
        gain_tolerance=args.gain_tol,
    )
    result = grow_tree(data, kernel, config)
    if args.out_tree:
        with open(args.out_tree, "w") as fh:
            fh.write(tree_to_json(result.tree))
            fh.write("\n")
    if args.out_dot:
        with open(args.out_dot, "w") as fh:
            fh.write(tree_to_dot(result.tree))
    if args.out_labels:
        write_labels(args.out_labels, result.labels)
    _print_kv("objective", result.objective)
    _print_kv("score", result.score)
    _print_kv("leaves", result.n_leaves)
    _print_kv("clusters", result.n_clusters)
    _print_kv("converged", result.converged)
    return 0


def _cmd_predict(args):
    with open(args.tree, encoding="utf-8") as fh:
        tree = tree_from_json(fh.read())
    data, dataset = _load_features(args)
    if data.shape[1] != tree.n_features:
        raise DimensionMismatchError(
            f"tree expects {tree.n_features} features, data has {data.shape[1]}"
        )
    labels = predict(tree, data)
    ids = dataset.row_ids if dataset.row_ids is not None else np.arange(labels.shape[0])
    if args.out_labels:
        write_labels(args.out_labels, labels, sample_ids=ids)
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(["sample_id", "cluster"])
        for i, lab in zip(ids, labels):
            writer.writerow([int(i), int(lab)])
    return 0


def _bench_one(method, subset, kernel, args, seed):
    if method == "kauri":
        result = grow_tree(subset, kernel, GrowConfig(
            max_clusters=args.k_max,
            max_leaves=args.k_max * args.leaves_per_cluster,
        ))
        tree, labels = result.tree, result.labels
        score = result.score
    else:
        result = kmeans_then_tree(subset, kernel, args.k_max,
                                  leaves_per_cluster=args.leaves_per_cluster,
                                  seed=seed)
        tree, labels = result.tree, result.labels
        score = float(np.trace(kernel)) - objective_from_labels(kernel, labels)
    return tree, labels, score


def _cmd_bench(args):
    data, dataset = _load_features(args)
    spec = _kernel_spec(args)
    methods = ("kauri", "kmeans-dt") if args.method == "both" else (args.method,)
    sections = {}
    for method in methods:
        runs = []
        for i in range(args.runs):
            seed = args.seed + i
            subset, idx = subsample(data, args.subsample, seed)
            kernel = compute_kernel(subset, spec)
            tree, labels, score = _bench_one(method, subset, kernel, args, seed)
            # Plain kernel k-means on the same subsample anchors the score scale.
            reference = kernel_kmeans(kernel, args.k_max, seed=seed)
            run = {
                "seed": seed,
                "wad": weighted_average_depth(tree, subset),
                "waes": weighted_average_explanation_size(tree, subset),
                "kmeans_score": score,
                "normalized_score": normalized_score(score, reference.score),
            }
            if dataset.labels is not None:
                run["ari"] = adjusted_rand_index(dataset.labels[idx], labels)
            runs.append(run)
        sections[method] = {"runs": runs, "aggregate": aggregate_runs(runs)}
    report = sections[methods[0]] if len(methods) == 1 else sections
    if args.out_report:
        write_report(args.out_report, report)
    summary = {m: sections[m]["aggregate"] for m in methods} if len(methods) > 1 \
        else sections[methods[0]]["aggregate"]
    for line in report_lines(summary):
        print(line)
    return 0


def _cmd_gen(args):
    if args.dataset == "rotated-gaussians":
        data, labels = gen_rotated_gaussians(args.n, args.theta, seed=args.seed)
    else:
        data, labels = gen_imm_pathology(n_per_side=args.n_per_side,
                                         epsilon=args.epsilon, v=args.v,
                                         seed=args.seed)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j}" for j in range(data.shape[1])] + ["label"])
        for row, lab in zip(data, labels):
            writer.writerow([format(v, ".17g") for v in row] + [int(lab)])
    return 0


def _cmd_kkmeans(args):
    data, _ = _load_features(args)
    kernel = compute_kernel(data, _kernel_spec(args))
    counts = {j: 0 for j in range(1, args.k + 1)}
    for i in range(args.runs):
        result = kernel_kmeans(kernel, args.k, seed=args.seed + i,
                               max_iter=args.max_iter)
        counts[result.n_nonempty] += 1
    payload = {
        "k": args.k,
        "runs": args.runs,
        "histogram": {str(j): counts[j] for j in counts},
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.out_hist:
        with open(args.out_hist, "w") as fh:
            fh.write(text)
            fh.write("\n")
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="kauri",
        description="Interpretable kernel clustering with a single decision tree.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="grow a clustering tree from a CSV")
    _add_data_flags(p_fit)
    _add_kernel_flags(p_fit)
    p_fit.add_argument("--k-max", type=_positive_int, required=True,
                       help="cluster budget")
    p_fit.add_argument("--max-leaves", type=_positive_int, default=None,
                       help="leaf budget (default: unlimited)")
    p_fit.add_argument("--min-leaf-size", type=_positive_int, default=1)
    p_fit.add_argument("--gain-tol", type=float, default=0.0,
                       help="smallest objective gain worth a split")
    p_fit.add_argument("--out-tree", help="write the tree as JSON")
    p_fit.add_argument("--out-dot", help="write the tree as Graphviz DOT")
    p_fit.add_argument("--out-labels", help="write cluster labels as CSV")
    p_fit.set_defaults(run=_cmd_fit)

    p_pred = sub.add_parser("predict", help="route a CSV through a saved tree")
    p_pred.add_argument("--tree", required=True, help="tree JSON from fit")
    _add_data_flags(p_pred)
    p_pred.add_argument("--out-labels", help="write labels here instead of stdout")
    p_pred.set_defaults(run=_cmd_predict)

    p_bench = sub.add_parser("bench", help="repeated-subsample benchmark")
    _add_data_flags(p_bench)
    _add_kernel_flags(p_bench)
    p_bench.add_argument("--k-max", type=_positive_int, required=True)
    p_bench.add_argument("--method", choices=("kauri", "kmeans-dt", "both"),
                         default="kauri")
    p_bench.add_argument("--runs", type=_positive_int, default=30)
    p_bench.add_argument("--subsample", type=_fraction_flag, default=0.8)
    p_bench.add_argument("--seed", type=int, default=0,
                         help="run i uses seed+i")
    p_bench.add_argument("--leaves-per-cluster", type=_positive_int, default=1)
    p_bench.add_argument("--out-report", help="write the full report JSON")
    p_bench.set_defaults(run=_cmd_bench)

    p_gen = sub.add_parser("gen", help="write a synthetic dataset CSV")
    p_gen.add_argument("--dataset", choices=("rotated-gaussians", "imm-pathology"),
                       required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--n", type=_positive_int, default=1000,
                       help="rotated-gaussians: total points")
    p_gen.add_argument("--theta", type=float, default=0.0,
                       help="rotated-gaussians: rotation in radians")
    p_gen.add_argument("--n-per-side", type=_positive_int, default=150,
                       help="imm-pathology: points per blob")
    p_gen.add_argument("--epsilon", type=float, default=0.05,
                       help="imm-pathology: blob variance")
    p_gen.add_argument("--v", type=float, default=1000.0,
                       help="imm-pathology: outlier height")
    p_gen.set_defaults(run=_cmd_gen)

    p_kk = sub.add_parser("kkmeans", help="kernel k-means restarts and their"
                                          " non-empty-cluster histogram")
    _add_data_flags(p_kk)
    _add_kernel_flags(p_kk)
    p_kk.add_argument("--k", type=_positive_int, required=True)
    p_kk.add_argument("--runs", type=_positive_int, default=100)
    p_kk.add_argument("--seed", type=int, default=0, help="run i uses seed+i")
    p_kk.add_argument("--max-iter", type=_positive_int, default=300)
    p_kk.add_argument("--out-hist", help="also write the histogram JSON here")
    p_kk.set_defaults(run=_cmd_kkmeans)

    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.run(args)
    except (KauriError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
