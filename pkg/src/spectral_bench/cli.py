"""``spectral-bench`` command line: synth, split, train, evaluate, export, benchmark."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import dataset, pipeline, serialize
from .errors import IncompatibleExport, InvalidConfig, SpectralBenchError
from .pls import PlsModel, select_components


def _emit(obj) -> None:
    sys.stdout.write(serialize.dumps(obj, indent=1))


def cmd_synth(args) -> int:
    grid = dataset.WavelengthGrid(args.start, args.step, args.count)
    data = dataset.synth_spectra(args.classes, args.per_class, grid, args.separation, args.noise, args.seed)
    dataset.write_csv(data, args.out)
    _emit({"rows": data.n_samples, "columns": grid.count, "class_counts": dict(zip(data.class_names, data.class_counts().tolist()))})
    return 0


def cmd_split(args) -> int:
    data = dataset.load_csv(args.input, args.label_column)
    split = dataset.balanced_split(data, args.train_fraction, args.seed)
    train = data.subset(split.train_indices)
    test = data.subset(split.test_indices)
    dataset.write_csv(train, args.train_out)
    dataset.write_csv(test, args.test_out)
    per_class = {
        name: {"train": int(a), "test": int(b)}
        for name, a, b in zip(data.class_names, train.class_counts(), test.class_counts())
    }
    _emit({"train": train.n_samples, "test": test.n_samples, "per_class": per_class, "seed": args.seed})
    return 0


def _train_overrides(args) -> dict:
    by_model = {
        "plsda": {"components": args.components, "p_min": args.p_min, "p_max": args.p_max, "scale": args.scale or None},
        "knn": {"k": args.k},
        "svm": {"c": args.c, "epochs": args.epochs, "eta0": args.eta0},
        "dlda": {"m": args.m},
        "slda": {"gamma": args.gamma},
    }
    return by_model.get(args.model, {})


def cmd_train(args) -> int:
    data = dataset.load_csv(args.train, args.label_column)
    config = pipeline.read_config(args.config).get(args.model, {}) if args.config else {}
    overrides = {**config, **{k: v for k, v in _train_overrides(args).items() if v is not None}}
    fitted = pipeline.fit_named(args.model, data, overrides)
    serialize.save_model(args.out, fitted.model, data.grid)
    _emit(fitted.summary)
    return 0


def cmd_evaluate(args) -> int:
    model, _ = serialize.load_model(args.model)
    data = dataset.load_csv(args.data, args.label_column)
    report = pipeline.evaluate_model(model, data)
    kind = pipeline.model_kind(model)
    doc = serialize.report_to_dict(report, kind, model.class_names or data.class_names, {"data": Path(args.data).name, "n": data.n_samples})
    if args.out:
        Path(args.out).write_text(serialize.dumps(doc, indent=1), encoding="utf-8")
    sys.stdout.write(f"{'MODEL':8s}{'MIS':>9s}{'ARI':>9s}{'CHI2':>10s}\n")
    sys.stdout.write(f"{kind.upper():8s}{report.mis:9.3f}{report.ari:9.3f}{report.chi2:10.3f}\n")
    return 0


def cmd_export(args) -> int:
    model = grid = None
    if args.model:
        model, grid = serialize.load_model(args.model)
    data = dataset.load_csv(args.data, args.label_column) if args.data else None
    what = args.what
    if what == "spectra":
        if data is None:
            raise InvalidConfig("--what spectra needs --data")
        text = pipeline.export_spectra(data)
    elif model is None:
        raise InvalidConfig(f"--what {what} needs --model")
    elif what == "scores":
        if data is None:
            raise InvalidConfig("--what scores needs --data")
        text = pipeline.export_scores(model, data)
    elif what == "loadings":
        text = pipeline.export_loadings(model, grid)
    elif what == "variance":
        text = pipeline.export_variance(model)
    elif what == "scree":
        if not isinstance(model, PlsModel):
            raise IncompatibleExport(f"a scree curve needs a PLS-DA model, got {pipeline.model_kind(model)}")
        if data is not None:
            labels = pipeline.align_labels(data, model.class_names)
            scaled = not np.all(model.x_scale == 1.0)
            _, curve = select_components(data.spectra, labels, range(args.p_min, args.p_max + 1), scale=scaled)
        elif model.scree:
            curve = model.scree
        else:
            raise InvalidConfig("model carries no scree curve; pass --data to compute one")
        text = pipeline.export_scree(curve)
    else:
        raise InvalidConfig(f"unknown export {what!r}")
    pipeline.write_text(args.out, text)
    return 0


def cmd_benchmark(args) -> int:
    train = dataset.load_csv(args.train, args.label_column)
    test = dataset.load_csv(args.test, args.label_column)
    config = pipeline.read_config(args.config) if args.config else {}
    result = pipeline.run_benchmark(train, test, config)
    text = pipeline.format_benchmark(result)
    if args.out:
        Path(args.out).write_text(serialize.dumps(result, indent=1), encoding="utf-8")
    if args.text_out:
        pipeline.write_text(args.text_out, text)
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectral-bench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--label-column", default="label")

    p = sub.add_parser("synth", help="generate a synthetic spectra CSV")
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--per-class", type=int, default=54)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--separation", type=float, default=1.0)
    p.add_argument("--noise", type=float, default=0.002)
    p.add_argument("--start", type=float, default=1100.0)
    p.add_argument("--step", type=float, default=2.0)
    p.add_argument("--count", type=int, default=601)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("split", help="balanced train/test split")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--train-out", default="train.csv")
    p.add_argument("--test-out", default="test.csv")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="fit one model and save it as JSON")
    common(p)
    p.add_argument("--model", required=True, choices=pipeline.MODEL_NAMES)
    p.add_argument("--train", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.add_argument("--components", help="integer or 'auto' (plsda)")
    p.add_argument("--p-min", type=int, help="smallest component count tried by auto (plsda)")
    p.add_argument("--p-max", type=int, help="largest component count tried by auto (plsda)")
    p.add_argument("--scale", action="store_true", help="autoscale columns (plsda)")
    p.add_argument("--k", type=int, help="neighbors (knn)")
    p.add_argument("--c", type=float, help="regularization constant (svm)")
    p.add_argument("--epochs", type=int, help="subgradient epochs (svm)")
    p.add_argument("--eta0", help="initial step or 'auto' (svm)")
    p.add_argument("--m", help="retained S_b directions or 'auto' (dlda)")
    p.add_argument("--gamma", help="shrinkage in [0, 1] or 'auto' (slda)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a saved model on a dataset")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export", help="write plotting data as CSV")
    common(p)
    p.add_argument("--what", required=True, choices=("scores", "loadings", "scree", "spectra", "variance"))
    p.add_argument("--model")
    p.add_argument("--data")
    p.add_argument("--p-min", type=int, default=2)
    p.add_argument("--p-max", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("benchmark", help="fit and score every model")
    common(p)
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--config")
    p.add_argument("--out", help="JSON report path")
    p.add_argument("--text-out", help="text table path")
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpectralBenchError, FileNotFoundError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
