"""Command-line experiment front end.

Subcommands
-----------
fit       decompose a tensor, write cores + convergence report
cluster   fit, k-means the extracted features, score AC/NMI
classify  fit, k-NN classify features from a per-class prefix split
sweep     rerun the clustering task over a parameter grid
basis     export the learned per-feature basis images as one montage
ingest    convert a PGM/PPM class-directory corpus to the tensor format

Exit codes: 0 success, 2 validation error, 3 I/O error, 4 numerical
failure.  Every run writes a ``manifest.json`` capturing the effective
configuration and input digests, enough to reproduce the outputs
bit-for-bit with the same binary.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .fileio import (
    FileFormatError,
    atomic_write_bytes,
    read_labels,
    read_tensor,
    sha256_file,
    write_labels,
    write_tensor,
)
from .graph import neighbor_graph
from .images import ingest_images, montage, to_uint8, write_pgm, write_ppm
from .metrics import accuracy, kmeans, knn_classify, nmi
from .ring import build_subchain, feature_matrix, subchain_unfold2
from .solver import DegenerateSubproblemError, NumericalError, SolverConfig, fit

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4

SWEEP_DEFAULTS = {
    "tmax": (60, 80, 100, 120, 140),
    "p": (3, 4, 5, 6, 7),
    "beta": (0.1, 0.2, 0.3, 0.4, 0.5),
}


def _parse_int_list(text):
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from exc


def _parse_float_list(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ValueError(f"expected comma-separated numbers, got {text!r}") from exc


def _parse_layout(text):
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"layout must look like ROWSxCOLS, got {text!r}")
    rows, cols = int(parts[0]), int(parts[1])
    if rows < 1 or cols < 1:
        raise ValueError("layout sides must be positive")
    return rows, cols


def _balanced_factor_pair(k):
    # Most balanced integer factorization a*b = k with a >= b.
    b = int(np.sqrt(k))
    while k % b:
        b -= 1
    return k // b, b


def default_ranks(order, n_classes):
    """Rank chain giving ``n_classes`` feature columns on the last core.

    The last core's leading/trailing ranks take the most balanced factor
    pair of the class count (larger factor on the last core's own rank);
    all other ranks are 2.
    """
    if order < 2:
        raise ValueError("need a tensor of order >= 2")
    a, b = _balanced_factor_pair(int(n_classes))
    ranks = [2] * order
    ranks[0] = b
    ranks[-1] = a
    return tuple(ranks)


def _solver_config(args, seed=None, beta=None, t_max=None):
    return SolverConfig(
        t_max=t_max if t_max is not None else args.tmax,
        max_sweeps=args.max_sweeps,
        tol=args.tol,
        beta=beta if beta is not None else args.beta,
        seed=seed if seed is not None else args.seed,
    )


def _load_data(args, need_labels):
    x = read_tensor(args.data)
    labels = None
    if need_labels:
        if args.labels is None:
            raise ValueError("this command requires --labels")
        labels = read_labels(args.labels)
        if labels.size != x.shape[-1]:
            raise ValueError(
                f"{labels.size} labels for {x.shape[-1]} samples (last dimension)"
            )
    return x, labels


def _resolve_ranks(args, x, labels):
    if args.ranks is not None:
        ranks = _parse_int_list(args.ranks)
        if len(ranks) != x.ndim:
            raise ValueError(f"{len(ranks)} ranks for an order-{x.ndim} tensor")
        return ranks
    if labels is None:
        raise ValueError("--ranks is required when no labels define a class count")
    return default_ranks(x.ndim, np.unique(labels).size)


def _graph_or_none(x, beta, p):
    return neighbor_graph(x, p) if beta > 0 else None


def _outdir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("ascii"))


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def _write_manifest(outdir, command, params, inputs):
    manifest = {
        "command": command,
        "version": __version__,
        "parameters": params,
        "inputs": {name: sha256_file(path) for name, path in inputs.items()},
    }
    atomic_write_bytes(
        outdir / "manifest.json",
        (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode("ascii"),
    )


def _common_params(args, ranks):
    return {
        "ranks": list(ranks),
        "beta": args.beta,
        "p": args.p,
        "t_max": args.tmax,
        "tol": args.tol,
        "max_sweeps": args.max_sweeps,
        "seed": args.seed,
    }


def cmd_fit(args):
    x, _ = _load_data(args, need_labels=False)
    ranks = _resolve_ranks(args, x, None)
    cfg = _solver_config(args)
    graph = _graph_or_none(x, cfg.beta, args.p)
    cores, report = fit(x, ranks, cfg, graph)
    out = _outdir(args)
    for i, core in enumerate(cores):
        write_tensor(out / f"core_{i + 1}.ten", core)
    rows = [
        (s + 1, float(report.objective_per_sweep[s]),
         float(report.rel_change_per_sweep[s]), float(report.seconds_per_sweep[s]))
        for s in range(report.sweeps_run)
    ]
    _write_csv(out / "report.csv", ("sweep", "objective", "rel_change", "seconds"), rows)
    _write_manifest(out, "fit", _common_params(args, ranks), {"data": args.data})
    print(
        f"fit: {report.sweeps_run} sweeps, objective "
        f"{report.objective_per_sweep[-1]:.6g}, stopped by {report.terminated_by}, "
        f"cores in {out}"
    )


def _cluster_runs(x, labels, ranks, args, beta=None, p=None, t_max=None):
    """One clustering experiment: repeated fit + k-means, scored per run."""
    beta = args.beta if beta is None else beta
    p = args.p if p is None else p
    k = int(np.unique(labels).size)
    graph = _graph_or_none(x, beta, p)
    rows = []
    for run in range(args.repeats):
        cfg = _solver_config(args, seed=args.seed + run, beta=beta, t_max=t_max)
        cores, _ = fit(x, ranks, cfg, graph)
        pred = kmeans(feature_matrix(cores), k, restarts=args.restarts,
                      seed=args.seed + run)
        rows.append((accuracy(pred, labels), nmi(pred, labels)))
    return np.asarray(rows)


def cmd_cluster(args):
    x, labels = _load_data(args, need_labels=True)
    ranks = _resolve_ranks(args, x, labels)
    scores = _cluster_runs(x, labels, ranks, args)
    out = _outdir(args)
    rows = [(r + 1, scores[r, 0], scores[r, 1]) for r in range(len(scores))]
    rows.append(("mean", scores[:, 0].mean(), scores[:, 1].mean()))
    rows.append(("std", scores[:, 0].std(), scores[:, 1].std()))
    _write_csv(out / "cluster.csv", ("run", "ac", "nmi"), rows)
    params = _common_params(args, ranks)
    params.update({"restarts": args.restarts, "repeats": args.repeats})
    _write_manifest(out, "cluster", params,
                    {"data": args.data, "labels": args.labels})
    for r in range(len(scores)):
        print(f"run {r + 1}: ac={scores[r, 0]:.4f} nmi={scores[r, 1]:.4f}")
    print(
        f"cluster: mean ac={scores[:, 0].mean():.4f} (std {scores[:, 0].std():.4f}), "
        f"mean nmi={scores[:, 1].mean():.4f} (std {scores[:, 1].std():.4f})"
    )


def _prefix_split(labels, fraction):
    """Per-class prefix split: first ``fraction`` of each class is labeled."""
    train_idx, test_idx = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        n_lab = int(np.floor(fraction * idx.size))
        if n_lab < 1:
            raise ValueError(
                f"class {c} has {idx.size} samples; fraction {fraction} labels none"
            )
        if n_lab == idx.size:
            raise ValueError(f"fraction {fraction} leaves class {c} without test data")
        train_idx.extend(idx[:n_lab])
        test_idx.extend(idx[n_lab:])
    return np.asarray(train_idx), np.asarray(test_idx)


def cmd_classify(args):
    if not 0.0 < args.label_fraction < 1.0:
        raise ValueError("--label-fraction must lie strictly between 0 and 1")
    x, labels = _load_data(args, need_labels=True)
    ranks = _resolve_ranks(args, x, labels)
    k_list = _parse_int_list(args.k_list)
    train_idx, test_idx = _prefix_split(labels, args.label_fraction)
    graph = _graph_or_none(x, args.beta, args.p)
    acc = {k: [] for k in k_list}
    for run in range(args.repeats):
        cfg = _solver_config(args, seed=args.seed + run)
        cores, _ = fit(x, ranks, cfg, graph)
        feats = feature_matrix(cores)
        for k in k_list:
            pred = knn_classify(feats[train_idx], labels[train_idx],
                                feats[test_idx], k)
            acc[k].append(float(np.mean(pred == labels[test_idx])))
    out = _outdir(args)
    rows = []
    for k in k_list:
        vals = np.asarray(acc[k])
        rows.extend((k, r + 1, vals[r]) for r in range(len(vals)))
        rows.append((k, "mean", vals.mean()))
        rows.append((k, "std", vals.std()))
        print(f"k={k}: mean accuracy {vals.mean():.4f} (std {vals.std():.4f})")
    _write_csv(out / "classify.csv", ("k", "run", "accuracy"), rows)
    params = _common_params(args, ranks)
    params.update({"label_fraction": args.label_fraction, "k_list": list(k_list),
                   "repeats": args.repeats})
    _write_manifest(out, "classify", params,
                    {"data": args.data, "labels": args.labels})


def cmd_sweep(args):
    x, labels = _load_data(args, need_labels=True)
    ranks = _resolve_ranks(args, x, labels)
    param = args.sweep_param
    if args.sweep_values is not None:
        values = (_parse_int_list(args.sweep_values) if param in ("tmax", "p")
                  else _parse_float_list(args.sweep_values))
    else:
        values = SWEEP_DEFAULTS[param]
    arg_name = {"tmax": "t_max", "p": "p", "beta": "beta"}[param]
    rows = []
    for value in values:
        start = time.perf_counter()
        scores = _cluster_runs(x, labels, ranks, args, **{arg_name: value})
        elapsed = time.perf_counter() - start
        rows.append((param, value, scores[:, 0].mean(), scores[:, 0].std(),
                     scores[:, 1].mean(), scores[:, 1].std(), elapsed))
        print(f"{param}={value}: mean ac={scores[:, 0].mean():.4f} "
              f"mean nmi={scores[:, 1].mean():.4f} ({elapsed:.2f}s)")
    out = _outdir(args)
    _write_csv(out / "sweep.csv",
               ("param", "value", "ac_mean", "ac_std", "nmi_mean", "nmi_std", "seconds"),
               rows)
    params = _common_params(args, ranks)
    params.update({"sweep_param": param, "sweep_values": list(values),
                   "restarts": args.restarts, "repeats": args.repeats})
    _write_manifest(out, "sweep", params,
                    {"data": args.data, "labels": args.labels})


def basis_tensors(cores):
    """Per-feature basis stack: the ring with the last core replaced by a
    unit indicator on each feature column in turn.

    Contracting that indicator against the remaining cores just reads the
    columns of the subchain unfolding, so basis f is column f folded back
    to the non-sample dimensions.
    """
    d = len(cores.cores) if hasattr(cores, "cores") else len(cores)
    sub2 = subchain_unfold2(build_subchain(cores, d - 1))
    slice_dims = tuple(c.shape[1] for c in cores)[:-1]
    return [
        sub2[:, f].reshape(slice_dims, order="F") for f in range(sub2.shape[1])
    ]


def cmd_basis(args):
    x, _ = _load_data(args, need_labels=False)
    ranks = _resolve_ranks(args, x, None)
    rows_n, cols_n = _parse_layout(args.layout)
    slice_dims = x.shape[:-1]
    color = len(slice_dims) == 3 and slice_dims[2] == 3
    if not color and len(slice_dims) != 2:
        raise ValueError(
            "basis montage needs grayscale (h, w, samples) or color "
            "(h, w, 3, samples) data"
        )
    cfg = _solver_config(args)
    graph = _graph_or_none(x, cfg.beta, args.p)
    cores, _ = fit(x, ranks, cfg, graph)
    tiles = [to_uint8(b) for b in basis_tensors(cores)]
    canvas = montage(tiles, rows_n, cols_n)
    out = _outdir(args)
    name = "basis.ppm" if color else "basis.pgm"
    (write_ppm if color else write_pgm)(out / name, canvas)
    params = _common_params(args, ranks)
    params.update({"layout": [rows_n, cols_n]})
    _write_manifest(out, "basis", params, {"data": args.data})
    print(f"basis: {len(tiles)} tiles -> {out / name} "
          f"({canvas.shape[0]}x{canvas.shape[1]} pixels)")


def cmd_ingest(args):
    x, labels = ingest_images(args.images, args.height, args.width)
    out = _outdir(args)
    write_tensor(out / "data.ten", x)
    write_labels(out / "labels.txt", labels)
    _write_manifest(out, "ingest",
                    {"height": args.height, "width": args.width,
                     "images": str(args.images)},
                    {"data": out / "data.ten", "labels": out / "labels.txt"})
    print(f"ingest: {labels.size} samples, shape {x.shape}, wrote {out}")


def _add_solver_opts(p, uses_labels, uses_restarts):
    # Every experiment subcommand accepts the same option set; flags a
    # particular command does not use are tolerated and ignored.
    p.add_argument("--data", required=True, help="input tensor (.ten)")
    labels_help = ("labels file, one integer per line" if uses_labels
                   else "accepted for interface uniformity; unused here")
    p.add_argument("--labels", help=labels_help)
    p.add_argument("--ranks", help="comma-separated rank chain r1,...,rd")
    p.add_argument("--beta", type=float, default=0.0,
                   help="graph regularization weight (0 = plain fit)")
    p.add_argument("--p", type=int, default=5, help="neighbor count for the graph")
    p.add_argument("--tmax", type=int, default=100, help="inner iterations per core")
    p.add_argument("--tol", type=float, default=1e-6,
                   help="relative objective-change stopping threshold")
    p.add_argument("--max-sweeps", type=int, default=500, help="outer sweep cap")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    restarts_help = ("k-means restarts" if uses_restarts
                     else "accepted for interface uniformity; unused here")
    p.add_argument("--restarts", type=int, default=200, help=restarts_help)
    if uses_restarts:
        p.add_argument("--repeats", type=int, default=10,
                       help="independent experiment repetitions")
    p.add_argument("--out", default="tring-out", help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tring",
        description="Nonnegative tensor ring decomposition experiments",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="decompose a tensor and save the cores")
    _add_solver_opts(p, uses_labels=False, uses_restarts=False)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("cluster", help="cluster extracted features, score AC/NMI")
    _add_solver_opts(p, uses_labels=True, uses_restarts=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("classify", help="k-NN classification on extracted features")
    _add_solver_opts(p, uses_labels=True, uses_restarts=True)
    p.add_argument("--label-fraction", type=float, default=0.4,
                   help="labeled prefix fraction per class (in (0, 1))")
    p.add_argument("--k-list", default="1,3,5",
                   help="comma-separated neighbor counts")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", help="rerun the clustering task over a grid")
    _add_solver_opts(p, uses_labels=True, uses_restarts=True)
    p.add_argument("--sweep-param", required=True, choices=("tmax", "p", "beta"))
    p.add_argument("--sweep-values",
                   help="comma-separated grid (defaults per parameter)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("basis", help="export per-feature basis images as a montage")
    _add_solver_opts(p, uses_labels=False, uses_restarts=False)
    p.add_argument("--layout", required=True, help="montage grid, e.g. 3x4")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("ingest", help="convert a PGM/PPM corpus to tensor format")
    p.add_argument("--images", required=True,
                   help="directory with one subdirectory per class")
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--out", default="tring-out", help="output directory")
    p.set_defaults(func=cmd_ingest)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (FileFormatError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericalError, DegenerateSubproblemError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
