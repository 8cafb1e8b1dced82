"""Command-line front end: sc, psc-train, psc-predict, psc-extend, eval,
bench, and gen subcommands.

Labels are written as single-column CSV with header ``cluster``; reports
are JSON.  Heavy imports happen inside main() so the thread-count
environment knob below can take effect before numpy loads its BLAS.
"""

from __future__ import annotations

import argparse
import json
import os
import sys


def _apply_thread_env() -> None:
    # PSCLUSTER_SINGLE_THREAD=1 pins BLAS to one thread for clean measurements
    if os.environ.get("PSCLUSTER_SINGLE_THREAD") == "1":
        for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, "1")


def _add_common_input(sub):
    sub.add_argument("--input", required=True, help="input CSV (header row)")
    sub.add_argument("--label-column", default=None,
                     help="header name of a label column to exclude from features")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pscluster",
        description="Spectral clustering and parametric spectral clustering",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sc = subs.add_parser("sc", help="baseline spectral clustering")
    _add_common_input(sc)
    sc.add_argument("--k", type=int, required=True)
    sc.add_argument("--p", type=int, default=None)
    sc.add_argument("--sigma", default="auto")
    sc.add_argument("--seed", type=int, default=0)
    sc.add_argument("--normalize-rows", action="store_true")
    sc.add_argument("--standardize", action="store_true")
    sc.add_argument("--out", required=True, help="labels CSV path")
    sc.add_argument("--report", default=None, help="optional report JSON path")

    tr = subs.add_parser("psc-train", help="train a parametric model")
    _add_common_input(tr)
    tr.add_argument("--rate", type=float, required=True, help="sampling rate in (0,1]")
    tr.add_argument("--p", type=int, required=True, help="embedding width")
    tr.add_argument("--sigma", default="auto")
    tr.add_argument("--hidden", default="32,64,32",
                    help="comma-separated hidden widths n1,n2,n3")
    tr.add_argument("--epochs", type=int, default=200)
    tr.add_argument("--batch-size", type=int, default=64)
    tr.add_argument("--learning-rate", type=float, default=1e-3)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--standardize", action="store_true",
                    help="standardize features; the scaler is stored in the model")
    tr.add_argument("--model", required=True, help="output model path")

    pr = subs.add_parser("psc-predict", help="cluster data with a trained model")
    _add_common_input(pr)
    pr.add_argument("--model", required=True)
    pr.add_argument("--k", type=int, required=True)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--out", required=True)
    pr.add_argument("--report", default=None)

    ex = subs.add_parser("psc-extend",
                         help="incrementally cluster base data plus a new batch")
    ex.add_argument("--model", required=True)
    ex.add_argument("--base", required=True, help="base data CSV")
    ex.add_argument("--new", required=True, help="new batch CSV")
    ex.add_argument("--label-column", default=None)
    ex.add_argument("--k", type=int, required=True)
    ex.add_argument("--seed", type=int, default=0)
    ex.add_argument("--mode", choices=("recluster-all", "assign-to-centroids"),
                    default="recluster-all")
    ex.add_argument("--out", required=True)

    ev = subs.add_parser("eval", help="score predicted labels against truth")
    ev.add_argument("--true", dest="true_path", required=True,
                    help="single-column CSV of ground-truth labels")
    ev.add_argument("--pred", dest="pred_path", required=True,
                    help="single-column CSV of predicted labels")
    ev.add_argument("--out", default=None, help="output JSON (default stdout)")

    be = subs.add_parser("bench", help="timed and memory-profiled comparison")
    be.add_argument("--dataset", choices=("circles", "blobs"), required=True)
    be.add_argument("--n", type=int, required=True)
    be.add_argument("--d", type=int, default=2)
    be.add_argument("--k", type=int, default=2)
    be.add_argument("--noise", type=float, default=0.05)
    be.add_argument("--spread", type=float, default=1.0)
    be.add_argument("--methods", default="sc,psc")
    be.add_argument("--rate", type=float, default=0.5)
    be.add_argument("--trials", type=int, default=5)
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--sigma", default="auto")
    be.add_argument("--epochs", type=int, default=200)
    be.add_argument("--standardize", action="store_true",
                    help="standardize the dataset before both methods")
    be.add_argument("--report", required=True)

    ge = subs.add_parser("gen", help="write a synthetic labeled dataset CSV")
    ge.add_argument("--dataset", choices=("circles", "blobs"), required=True)
    ge.add_argument("--n", type=int, required=True)
    ge.add_argument("--d", type=int, default=2)
    ge.add_argument("--k", type=int, default=2)
    ge.add_argument("--noise", type=float, default=0.05)
    ge.add_argument("--spread", type=float, default=1.0)
    ge.add_argument("--radius-inner", type=float, default=1.0)
    ge.add_argument("--radius-outer", type=float, default=5.0)
    ge.add_argument("--seed", type=int, default=0)
    ge.add_argument("--out", required=True)

    return parser


def _parse_sigma(value):
    return value if value == "auto" else float(value)


def _parse_hidden(value: str):
    widths = tuple(int(w) for w in value.split(",") if w.strip())
    if not widths:
        raise ValueError(f"no hidden widths in {value!r}")
    return widths


def _write_labels(path, labels) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("cluster\n")
        for v in labels:
            fh.write(f"{int(v)}\n")


def _read_label_csv(path):
    import numpy as np

    from .dataio import DataFormatError, load_csv

    X, _ = load_csv(path)
    if X.shape[1] != 1:
        raise DataFormatError(f"{path}: expected a single label column")
    if (X[:, 0] % 1 != 0).any() or X[:, 0].min() < 0:
        raise DataFormatError(f"{path}: labels must be non-negative integers")
    return np.asarray(X[:, 0], dtype=np.int64)


def _write_json(path, payload) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2)
    if path is None:
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _cmd_sc(args) -> int:
    from dataclasses import asdict

    from .bench import dataset_fingerprint, labels_digest
    from .dataio import load_csv, standardize
    from .metrics import score_clustering
    from .spectral import ScConfig, spectral_cluster

    X, y = load_csv(args.input, args.label_column)
    if args.standardize:
        X, _ = standardize(X)
    cfg = ScConfig(k=args.k, p=args.p, sigma=_parse_sigma(args.sigma),
                   seed=args.seed, normalize_rows=args.normalize_rows)
    assignment, _ = spectral_cluster(X, cfg)
    _write_labels(args.out, assignment.labels)
    if args.report:
        report = {
            "method": "sc",
            "dataset": dataset_fingerprint(X),
            "config": {"k": args.k, "p": cfg.embedding_width(),
                       "sigma": args.sigma, "seed": args.seed,
                       "normalize_rows": args.normalize_rows,
                       "standardize": args.standardize},
            "labels_sha256": labels_digest(assignment.labels),
        }
        if y is not None:
            report["quality"] = asdict(score_clustering(y, assignment.labels))
        _write_json(args.report, report)
    return 0


def _cmd_psc_train(args) -> int:
    from .dataio import load_csv
    from .neural import TrainHyperparams
    from .psc import psc_train, save_model

    X, _ = load_csv(args.input, args.label_column)
    hp = TrainHyperparams(epochs=args.epochs, batch_size=args.batch_size,
                          learning_rate=args.learning_rate, seed=args.seed)
    model = psc_train(X, rate=args.rate, p=args.p,
                      sigma=_parse_sigma(args.sigma),
                      mlp_widths=_parse_hidden(args.hidden), hp=hp,
                      scale_features=args.standardize)
    save_model(model, args.model)
    print(f"model written to {args.model} (train MSE {model.train_mse:.6g})")
    return 0


def _cmd_psc_predict(args) -> int:
    from dataclasses import asdict

    from .bench import dataset_fingerprint, labels_digest
    from .metrics import score_clustering
    from .dataio import load_csv
    from .psc import load_model, psc_cluster

    X, y = load_csv(args.input, args.label_column)
    model = load_model(args.model)
    assignment = psc_cluster(model, X, args.k, seed=args.seed)
    _write_labels(args.out, assignment.labels)
    if args.report:
        report = {
            "method": "psc",
            "dataset": dataset_fingerprint(X),
            "config": {"k": args.k, "seed": args.seed, "model": str(args.model),
                       "rate": model.sample_rate, "p": model.p,
                       "train_seed": model.train_seed},
            "labels_sha256": labels_digest(assignment.labels),
        }
        if y is not None:
            report["quality"] = asdict(score_clustering(y, assignment.labels))
        _write_json(args.report, report)
    return 0


def _cmd_psc_extend(args) -> int:
    from .dataio import load_csv
    from .psc import incremental_extend, load_model, start_session

    base, _ = load_csv(args.base, args.label_column)
    new, _ = load_csv(args.new, args.label_column)
    model = load_model(args.model)
    session = start_session(model, base, args.k, seed=args.seed, mode=args.mode)
    assignment = incremental_extend(session, new, args.k, seed=args.seed)
    _write_labels(args.out, assignment.labels)
    return 0


def _cmd_eval(args) -> int:
    from dataclasses import asdict

    from .metrics import score_clustering

    y = _read_label_csv(args.true_path)
    yhat = _read_label_csv(args.pred_path)
    _write_json(args.out, asdict(score_clustering(y, yhat)))
    return 0


def _cmd_bench(args) -> int:
    from .bench import make_dataset, run_psc_bench, run_sc_bench
    from .dataio import standardize
    from .neural import TrainHyperparams

    X, y = make_dataset(args.dataset, n=args.n, d=args.d, k=args.k,
                        seed=args.seed, noise=args.noise, spread=args.spread)
    if args.standardize:
        X, _ = standardize(X)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    reports = {}
    for method in methods:
        if method == "sc":
            reports["sc"] = run_sc_bench(
                X, y, k=args.k, trials=args.trials, base_seed=args.seed,
                sigma=_parse_sigma(args.sigma)).to_dict()
        elif method == "psc":
            reports["psc"] = run_psc_bench(
                X, y, k=args.k, rate=args.rate, trials=args.trials,
                base_seed=args.seed, sigma=_parse_sigma(args.sigma),
                hp=TrainHyperparams(epochs=args.epochs)).to_dict()
        else:
            raise ValueError(f"unknown method {method!r} (choose sc, psc)")
    payload = {
        "dataset": {"name": args.dataset, "n": args.n, "d": args.d,
                    "k": args.k, "noise": args.noise, "spread": args.spread,
                    "seed": args.seed, "standardize": args.standardize},
        "reports": reports,
    }
    _write_json(args.report, payload)
    return 0


def _cmd_gen(args) -> int:
    from .bench import make_dataset

    X, y = make_dataset(args.dataset, n=args.n, d=args.d, k=args.k,
                        seed=args.seed, noise=args.noise, spread=args.spread,
                        radius_inner=args.radius_inner,
                        radius_outer=args.radius_outer)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(",".join(f"x{j}" for j in range(X.shape[1])) + ",label\n")
        for row, lab in zip(X, y):
            fh.write(",".join(repr(float(v)) for v in row) + f",{int(lab)}\n")
    return 0


_HANDLERS = {
    "sc": _cmd_sc,
    "psc-train": _cmd_psc_train,
    "psc-predict": _cmd_psc_predict,
    "psc-extend": _cmd_psc_extend,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
    "gen": _cmd_gen,
}


def main(argv=None) -> int:
    _apply_thread_env()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except Exception as exc:
        print(f"pscluster {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
