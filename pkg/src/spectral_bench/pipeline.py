"""Model-agnostic fitting, prediction, benchmarking and CSV export used by the CLI."""

from __future__ import annotations

import configparser
import csv
import io
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from . import discriminant, metrics, neighbors, pls, svm
from .dataset import LabeledDataset
from .discriminant import DiscriminantModel
from .errors import IncompatibleExport, InvalidConfig, SpectralBenchError
from .neighbors import KnnModel
from .pls import PlsModel
from .svm import SvmModel

MODEL_NAMES = ("plsda", "knn", "svm", "lda", "dlda", "slda", "mlda")
# benchmark row order: the six compared models, then plain LDA
BENCHMARK_ROWS = (
    ("PLS-DA", "plsda"),
    ("KNN", "knn"),
    ("SVM", "svm"),
    ("DLDA", "dlda"),
    ("MLDA", "mlda"),
    ("SLDA", "slda"),
    ("LDA", "lda"),
)
DEFAULT_PARAMS: dict[str, dict[str, Any]] = {
    "plsda": {"components": "auto", "p_min": 2, "p_max": 10, "scale": False},
    "knn": {"k": 3},
    "svm": {"c": 1.0, "epochs": 2000, "eta0": "auto"},
    "lda": {},
    "dlda": {"m": "auto"},
    "slda": {"gamma": "auto"},
    "mlda": {},
}


@dataclass
class FitResult:
    model: Any
    summary: dict = field(default_factory=dict)


def _auto(value) -> bool:
    return isinstance(value, str) and value.strip().lower() == "auto"


def _as_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ("1", "true", "yes", "on")


def resolve_params(name: str, overrides: dict | None = None) -> dict:
    if name not in DEFAULT_PARAMS:
        raise InvalidConfig(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")
    params = dict(DEFAULT_PARAMS[name])
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in params:
            raise InvalidConfig(f"model {name!r} has no parameter {key!r}")
        params[key] = value
    return params


def fit_named(name: str, data: LabeledDataset, overrides: dict | None = None) -> FitResult:
    """Fit model ``name`` on ``data`` with defaults patched by ``overrides``."""
    params = resolve_params(name, overrides)
    x, y, names = data.spectra, data.labels, data.class_names
    if name == "plsda":
        scale = _as_bool(params["scale"])
        summary: dict[str, Any] = {"model": name, "scale": scale}
        scree: tuple = ()
        if _auto(params["components"]):
            p_range = range(int(params["p_min"]), int(params["p_max"]) + 1)
            p, curve = pls.select_components(x, y, p_range, scale=scale)
            scree = tuple(curve)
            summary["scree"] = [[q, c] for q, c in curve]
        else:
            p = int(params["components"])
        model = replace(pls.fit_plsda(x, y, p, names, scale=scale), scree=scree)
        summary["components"] = p
        summary["explained_variance"] = model.explained_variance_x.tolist()
        return FitResult(model, summary)
    if name == "knn":
        model = neighbors.fit_knn(x, y, int(params["k"]), names)
        return FitResult(model, {"model": name, "k": model.k})
    if name == "svm":
        eta0 = None if _auto(params["eta0"]) else float(params["eta0"])
        model = svm.fit_svm(x, y, float(params["c"]), int(params["epochs"]), eta0, names, data.n_classes)
        return FitResult(
            model,
            {"model": name, "c": model.c, "epochs": model.epochs, "eta0": model.eta0,
             "final_objective": float(model.history[-1])},
        )
    sc = discriminant.scatter(x, y)
    if name == "lda":
        return FitResult(discriminant.fit_lda(sc, names), {"model": name})
    if name == "mlda":
        return FitResult(discriminant.fit_mlda(sc, names), {"model": name, "mean_eigenvalue": sc.mean_eigenvalue})
    if name == "dlda":
        m = None if _auto(params["m"]) else int(params["m"])
        model = discriminant.fit_dlda(sc, m, names)
        return FitResult(model, {"model": name, "m": model.m})
    if name == "slda":
        summary = {"model": name}
        if _auto(params["gamma"]):
            gamma, accuracy = discriminant.select_gamma(x, y)
            summary["gamma_grid"] = list(discriminant.DEFAULT_GAMMA_GRID)
            summary["loo_accuracy"] = accuracy
        else:
            gamma = float(params["gamma"])
        summary["gamma"] = gamma
        return FitResult(discriminant.fit_slda(sc, gamma, names), summary)
    raise InvalidConfig(f"unknown model {name!r}")


def model_kind(model) -> str:
    if isinstance(model, PlsModel):
        return "plsda"
    if isinstance(model, KnnModel):
        return "knn"
    if isinstance(model, SvmModel):
        return "svm"
    if isinstance(model, DiscriminantModel):
        return model.variant.lower()
    raise InvalidConfig(f"not a model: {type(model).__name__}")


def predict(model, x) -> np.ndarray:
    if isinstance(model, PlsModel):
        return pls.predict_plsda(model, x)
    if isinstance(model, KnnModel):
        return neighbors.knn_predict(model, x)
    if isinstance(model, SvmModel):
        return svm.svm_predict(model, x)
    if isinstance(model, DiscriminantModel):
        return discriminant.classify(model, x)
    raise InvalidConfig(f"not a model: {type(model).__name__}")


def align_labels(data: LabeledDataset, class_names) -> np.ndarray:
    """Express ``data`` labels as indices into ``class_names`` (matched by name)."""
    class_names = tuple(class_names)
    if not class_names or class_names == data.class_names:
        return np.asarray(data.labels)
    lookup = {name: i + 1 for i, name in enumerate(class_names)}
    missing = sorted(set(data.class_names) - set(lookup))
    if missing:
        raise InvalidConfig(f"labels {missing} are unknown to the model")
    remap = np.array([0] + [lookup[name] for name in data.class_names])
    return remap[data.labels]


def evaluate_model(model, data: LabeledDataset) -> metrics.EvaluationReport:
    names = getattr(model, "class_names", ()) or data.class_names
    real = align_labels(data, names)
    return metrics.evaluate(real, predict(model, data.spectra), len(names))


def _report_block(rep: metrics.EvaluationReport) -> dict:
    return {"mis": rep.mis, "ari": rep.ari, "chi2": rep.chi2, "confusion": rep.confusion.to_list()}


# ---------------------------------------------------------------- benchmark


def read_config(path) -> dict[str, dict[str, str]]:
    """Sections named after models, ``key = value`` inside; unknown sections are rejected."""
    parser = configparser.ConfigParser()
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise FileNotFoundError(path)
    out = {}
    for section in parser.sections():
        name = section.strip().lower()
        if name not in DEFAULT_PARAMS:
            raise InvalidConfig(f"unknown config section [{section}]")
        out[name] = dict(parser[section])
    return out


def run_benchmark(train: LabeledDataset, test: LabeledDataset, config: dict | None = None) -> dict:
    """Fit every model on ``train`` and score it on both sets.

    A model whose fit raises is recorded as failed with the exception class
    as reason; the others are unaffected.
    """
    config = config or {}
    rows = []
    for label, name in BENCHMARK_ROWS:
        row: dict[str, Any] = {"model": label, "key": name}
        try:
            fitted = fit_named(name, train, config.get(name))
            row["status"] = "ok"
            row["params"] = fitted.summary
            row["train"] = _report_block(evaluate_model(fitted.model, train))
            row["test"] = _report_block(evaluate_model(fitted.model, test))
        except SpectralBenchError as exc:
            row["status"] = "FAILED"
            row["reason"] = type(exc).__name__
            row["message"] = str(exc)
        rows.append(row)
    return {
        "version": "report-v1",
        "n_train": train.n_samples,
        "n_test": test.n_samples,
        "class_names": list(train.class_names),
        "rows": rows,
    }


def format_benchmark(result: dict) -> str:
    """Fixed-width table: one row per model, MIS/ARI/chi2 on the training then the test set."""
    stats = ("mis", "ari", "chi2")
    lines = [
        f"{'':8s}| {'Training set':^26s} || {'Test set':^26s}",
        f"{'Model':8s}|" + "".join(f"{s.upper():>9s}" for s in stats) + " ||" + "".join(f"{s.upper():>9s}" for s in stats),
    ]
    lines.append("-" * len(lines[1]))
    for row in result["rows"]:
        if row["status"] != "ok":
            lines.append(f"{row['model']:8s}| FAILED({row['reason']})")
            continue
        left = "".join(f"{row['train'][s]:9.3f}" for s in stats)
        right = "".join(f"{row['test'][s]:9.3f}" for s in stats)
        lines.append(f"{row['model']:8s}|{left} ||{right}")
    return "\n".join(lines) + "\n"


def parse_benchmark_text(text: str) -> dict[str, list[float] | str]:
    """Read a table produced by :func:`format_benchmark` back into numbers."""
    out: dict[str, list[float] | str] = {}
    for line in text.splitlines()[3:]:
        if not line.strip():
            continue
        name, rest = line.split("|", 1)
        rest = rest.strip()
        if rest.startswith("FAILED("):
            out[name.strip()] = rest
        else:
            out[name.strip()] = [float(tok) for tok in rest.replace("||", " ").split()]
    return out


# ---------------------------------------------------------------- exports


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([f"{v:.17g}" if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def export_scores(model, data: LabeledDataset) -> str:
    if isinstance(model, PlsModel):
        scores = pls.transform(model, data.spectra)
        prefix = "score"
    elif isinstance(model, DiscriminantModel):
        scores = discriminant.project(model, data.spectra)
        prefix = "discriminant"
    else:
        raise IncompatibleExport(f"a {model_kind(model)} model has no score space")
    names = model.class_names or data.class_names
    real = align_labels(data, names)
    predicted = predict(model, data.spectra)
    header = [f"{prefix}{p + 1}" for p in range(scores.shape[1])] + ["real_label", "predicted_label"]
    rows = [[*map(float, s), names[r - 1], names[c - 1]] for s, r, c in zip(scores, real, predicted)]
    return _csv_text(header, rows)


def export_loadings(model, grid) -> str:
    if not isinstance(model, PlsModel):
        raise IncompatibleExport(f"loadings need a PLS-DA model, got {model_kind(model)}")
    p = model.n_components
    header = ["wavelength"] + [f"loading{i + 1}" for i in range(p)] + [f"squared_loading{i + 1}" for i in range(p)]
    rows = [
        [float(w), *map(float, load), *map(float, load**2)]
        for w, load in zip(grid.wavelengths, model.x_loadings)
    ]
    return _csv_text(header, rows)


def export_variance(model) -> str:
    if not isinstance(model, PlsModel):
        raise IncompatibleExport(f"explained variance needs a PLS-DA model, got {model_kind(model)}")
    per = model.explained_variance_x
    header = ["row"] + [f"comp{i + 1}" for i in range(per.size)]
    return _csv_text(header, [["explained", *map(float, per)], ["cumulative", *map(float, np.cumsum(per))]])


def export_scree(curve) -> str:
    return _csv_text(["components", "chi2"], [[int(p), float(c)] for p, c in curve])


def export_spectra(data: LabeledDataset) -> str:
    """One row per wavelength, one column per sample (``<label>_<row>``)."""
    header = ["wavelength"] + [f"{name}_{i + 1}" for i, name in enumerate(data.label_strings())]
    rows = [[float(w), *map(float, col)] for w, col in zip(data.grid.wavelengths, data.spectra.T)]
    return _csv_text(header, rows)


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
