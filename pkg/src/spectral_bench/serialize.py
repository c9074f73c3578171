"""JSON envelopes for fitted models and evaluation reports.

Matrices are stored as ``{"rows", "cols", "data"}`` with ``data`` in
row-major order. Floats are written with 17 significant digits, which
round-trips float64 exactly.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .dataset import WavelengthGrid
from .discriminant import DiscriminantModel
from .errors import SpectralBenchError
from .neighbors import KnnModel
from .pls import PlsModel
from .svm import SvmModel

VERSIONS = {"plsda": "plsda-v1", "discriminant": "disc-v1", "svm": "svm-v1", "knn": "knn-v1"}
REPORT_VERSION = "report-v1"


class UnknownModelFormat(SpectralBenchError, ValueError):
    pass


def _mat(a) -> dict:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "data": a.ravel().tolist()}


def _unmat(d: dict) -> np.ndarray:
    return np.array(d["data"], dtype=np.float64).reshape(d["rows"], d["cols"])


def _vec(a) -> list:
    return np.asarray(a, dtype=np.float64).ravel().tolist()


def _grid(grid: WavelengthGrid) -> dict:
    return {"start_nm": grid.start_nm, "step_nm": grid.step_nm, "count": grid.count}


def model_to_dict(model, grid: WavelengthGrid) -> dict:
    if isinstance(model, PlsModel):
        return {
            "version": VERSIONS["plsda"],
            "class_names": list(model.class_names),
            "grid": _grid(grid),
            "n_components": model.n_components,
            "matrices": {
                "weights": _mat(model.weights),
                "scores": _mat(model.scores),
                "x_loadings": _mat(model.x_loadings),
                "y_loadings": _mat(model.y_loadings),
                "coefficients": _mat(model.coefficients),
            },
            "vectors": {
                "x_mean": _vec(model.x_mean),
                "y_mean": _vec(model.y_mean),
                "x_scale": _vec(model.x_scale),
                "explained_variance_x": _vec(model.explained_variance_x),
                "score_norms": _vec(model.score_norms),
                "residual_norms": _vec(model.residual_norms),
            },
            "scree": [[p, chi2] for p, chi2 in model.scree],
        }
    if isinstance(model, DiscriminantModel):
        return {
            "version": VERSIONS["discriminant"],
            "variant": model.variant,
            "class_names": list(model.class_names),
            "grid": _grid(grid),
            "hyperparameters": {"gamma": model.gamma, "m": model.m},
            "projection_dims": int(model.projection.shape[0]),
            "matrices": {
                "projection": _mat(model.projection),
                "projected_centroids": _mat(model.projected_centroids),
            },
            "vectors": {"x_mean": _vec(model.x_mean)},
        }
    if isinstance(model, SvmModel):
        return {
            "version": VERSIONS["svm"],
            "class_names": list(model.class_names),
            "grid": _grid(grid),
            "hyperparameters": {"c": model.c, "epochs": model.epochs, "eta0": model.eta0},
            "matrices": {"weights": _mat(model.weights)},
            "vectors": {"biases": _vec(model.biases), "x_mean": _vec(model.x_mean), "history": _vec(model.history)},
        }
    if isinstance(model, KnnModel):
        return {
            "version": VERSIONS["knn"],
            "class_names": list(model.class_names),
            "grid": _grid(grid),
            "hyperparameters": {"k": model.k},
            "matrices": {"train_x": _mat(model.train_x)},
            "train_labels": model.train_labels.astype(int).tolist(),
        }
    raise UnknownModelFormat(f"cannot serialize {type(model).__name__}")


def model_from_dict(d: dict):
    """Inverse of :func:`model_to_dict`; returns ``(model, grid)``."""
    version = d.get("version")
    grid = WavelengthGrid(**d["grid"])
    names = tuple(d.get("class_names", ()))
    m = d.get("matrices", {})
    v = d.get("vectors", {})
    if version == VERSIONS["plsda"]:
        model = PlsModel(
            n_components=int(d["n_components"]),
            weights=_unmat(m["weights"]),
            scores=_unmat(m["scores"]),
            x_loadings=_unmat(m["x_loadings"]),
            y_loadings=_unmat(m["y_loadings"]),
            coefficients=_unmat(m["coefficients"]),
            x_mean=np.array(v["x_mean"]),
            y_mean=np.array(v["y_mean"]),
            explained_variance_x=np.array(v["explained_variance_x"]),
            score_norms=np.array(v["score_norms"]),
            x_scale=np.array(v["x_scale"]),
            residual_norms=np.array(v["residual_norms"]),
            class_names=names,
            scree=tuple((int(p), float(c)) for p, c in d.get("scree", [])),
        )
    elif version == VERSIONS["discriminant"]:
        hp = d.get("hyperparameters", {})
        model = DiscriminantModel(
            variant=d["variant"],
            projection=_unmat(m["projection"]),
            projected_centroids=_unmat(m["projected_centroids"]),
            x_mean=np.array(v["x_mean"]),
            gamma=hp.get("gamma"),
            m=hp.get("m"),
            class_names=names,
        )
    elif version == VERSIONS["svm"]:
        hp = d["hyperparameters"]
        model = SvmModel(
            weights=_unmat(m["weights"]),
            biases=np.array(v["biases"]),
            c=float(hp["c"]),
            history=np.array(v["history"]),
            x_mean=np.array(v["x_mean"]),
            eta0=float(hp["eta0"]),
            epochs=int(hp["epochs"]),
            class_names=names,
        )
    elif version == VERSIONS["knn"]:
        model = KnnModel(
            train_x=_unmat(m["train_x"]),
            train_labels=np.array(d["train_labels"], dtype=np.int64),
            k=int(d["hyperparameters"]["k"]),
            class_names=names,
        )
    else:
        raise UnknownModelFormat(f"unrecognized model version {version!r}")
    return model, grid


def _float(v: float) -> str:
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize non-finite value {v!r}")
    text = f"{v:.17g}"
    # keep a float marker so integral values load back as floats
    return text if any(ch in text for ch in ".e") else text + ".0"


def _emit(obj, indent: int | None, depth: int) -> str:
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, dict):
        items = [(str(k), v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        parts = [f"{json.dumps(k)}: {_emit(v, indent, depth + 1)}" for k, v in items]
        return _join(parts, "{", "}", indent, depth)
    if isinstance(obj, (list, tuple)):
        return _join([_emit(v, indent, depth + 1) for v in obj], "[", "]", indent, depth)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _join(parts: list[str], left: str, right: str, indent: int | None, depth: int) -> str:
    if not parts:
        return left + right
    if indent is None:
        return left + ", ".join(parts) + right
    pad = "\n" + " " * (indent * (depth + 1))
    return left + pad + ("," + pad).join(parts) + "\n" + " " * (indent * depth) + right


def dumps(obj, indent: int | None = None) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits, no NaN or infinity."""
    return _emit(obj, indent, 0) + "\n"


def save_model(path, model, grid: WavelengthGrid) -> None:
    Path(path).write_text(dumps(model_to_dict(model, grid)), encoding="utf-8")


def load_model(path):
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def report_to_dict(report, model_name: str, class_names=(), extra: dict | None = None) -> dict:
    out = {
        "version": REPORT_VERSION,
        "model": model_name,
        "class_names": list(class_names),
        "confusion": report.confusion.to_list(),
        "mis": report.mis,
        "ari": report.ari,
        "chi2": report.chi2,
    }
    if extra:
        out["metadata"] = extra
    return out
