"""Labeled spectra: CSV I/O, centering, balanced splits and a synthetic generator."""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ClassTooSmall, EmptyDataset, InvalidConfig, MissingLabelColumn, ParseError, ShapeMismatch
from .numkernel import as_matrix

CSV_DIGITS = 9
_WAVELENGTH_COLUMN = re.compile(r"^w(-?\d+(?:\.\d+)?)$")


@dataclass(frozen=True)
class WavelengthGrid:
    start_nm: float = 1100.0
    step_nm: float = 2.0
    count: int = 601

    def __post_init__(self):
        if not self.step_nm > 0:
            raise InvalidConfig("step_nm must be positive")
        if self.count < 1:
            raise InvalidConfig("grid needs at least one wavelength")

    @property
    def wavelengths(self) -> np.ndarray:
        return self.start_nm + self.step_nm * np.arange(self.count)

    def column_names(self) -> list[str]:
        return [f"w{w:g}" for w in self.wavelengths]


@dataclass(frozen=True)
class LabeledDataset:
    """Spectra (n x J) with 1-based class indices into ``class_names``."""

    spectra: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    grid: WavelengthGrid = field(default_factory=WavelengthGrid)

    def __post_init__(self):
        spectra = as_matrix(self.spectra, "spectra")
        labels = np.asarray(self.labels, dtype=np.int64).ravel()
        if labels.shape[0] != spectra.shape[0]:
            raise ShapeMismatch(f"{labels.shape[0]} labels for {spectra.shape[0]} rows")
        if spectra.shape[1] != self.grid.count:
            raise ShapeMismatch(f"{spectra.shape[1]} columns for a grid of {self.grid.count}")
        k = len(self.class_names)
        if labels.min() < 1 or labels.max() > k or len(np.unique(labels)) != k:
            raise ShapeMismatch("every class in 1..K must appear at least once")
        spectra.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "spectra", spectra)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @property
    def n_samples(self) -> int:
        return self.spectra.shape[0]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes + 1)[1:]

    def subset(self, indices: Sequence[int]) -> "LabeledDataset":
        """Rows ``indices`` (0-based); class indices are kept, so every class must remain present."""
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.spectra[idx], self.labels[idx], self.class_names, self.grid)

    def label_strings(self) -> list[str]:
        return [self.class_names[i - 1] for i in self.labels]


@dataclass(frozen=True)
class TrainTestSplit:
    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int


def _grid_from_header(columns: list[str]) -> WavelengthGrid:
    parsed = [_WAVELENGTH_COLUMN.match(c.strip()) for c in columns]
    if all(parsed) and len(columns) >= 1:
        values = np.array([float(m.group(1)) for m in parsed])
        if len(values) == 1:
            return WavelengthGrid(values[0], 1.0, 1)
        step = values[1] - values[0]
        if step > 0 and np.allclose(np.diff(values), step, rtol=0, atol=1e-9 * max(1.0, abs(step))):
            return WavelengthGrid(float(values[0]), float(step), len(values))
    # non-wavelength headers fall back to a 1-based index grid
    return WavelengthGrid(1.0, 1.0, len(columns))


def load_csv(path, label_column: str = "label") -> LabeledDataset:
    """Read a dataset whose header is ``label,w1100,w1102,...``.

    Class indices follow the order in which label strings first appear.
    Errors name the file line (header is line 1) and the column header.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataset(f"{path} is empty") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise MissingLabelColumn(f"no column named {label_column!r} in {path}")
        label_pos = header.index(label_column)
        value_cols = [i for i in range(len(header)) if i != label_pos]
        if not value_cols:
            raise EmptyDataset("no spectral columns")
        names: dict[str, int] = {}
        labels: list[int] = []
        rows: list[list[float]] = []
        for line_no, record in enumerate(reader, start=2):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) != len(header):
                raise ParseError(line_no, "*", f"expected {len(header)} fields, got {len(record)}")
            values = []
            for i in value_cols:
                cell = record[i].strip()
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(line_no, header[i], f"not a number: {cell!r}") from None
                if not math.isfinite(v):
                    raise ParseError(line_no, header[i], f"not finite: {cell!r}")
                values.append(v)
            label = record[label_pos].strip()
            labels.append(names.setdefault(label, len(names) + 1))
            rows.append(values)
    if not rows:
        raise EmptyDataset(f"{path} has a header but no data rows")
    grid = _grid_from_header([header[i] for i in value_cols])
    return LabeledDataset(np.array(rows), np.array(labels), tuple(names), grid)


def format_value(v: float) -> str:
    return f"{v:.{CSV_DIGITS}g}"


def write_csv(data: LabeledDataset, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label", *data.grid.column_names()])
        for name, row in zip(data.label_strings(), data.spectra):
            writer.writerow([name, *(format_value(v) for v in row)])


def balanced_split(data: LabeledDataset, train_fraction: float, seed: int) -> TrainTestSplit:
    """Stratified split with ``floor(train_fraction * n_k)`` training rows per class.

    A class whose floor would be zero still contributes one training row.
    Indices are 0-based and returned sorted.
    """
    if not 0.0 < train_fraction < 1.0:
        raise InvalidConfig("train_fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for k in range(1, data.n_classes + 1):
        members = np.flatnonzero(data.labels == k)
        if members.size < 2:
            raise ClassTooSmall(f"class {data.class_names[k - 1]!r} has {members.size} member(s)")
        # the epsilon absorbs representation error, e.g. (37/54) * 54
        n_train = max(1, math.floor(train_fraction * members.size + 1e-9))
        chosen = rng.permutation(members)
        train.append(chosen[:n_train])
        test.append(chosen[n_train:])
    return TrainTestSplit(np.sort(np.concatenate(train)), np.sort(np.concatenate(test)), seed)


def center(train) -> tuple[np.ndarray, np.ndarray]:
    """Column-center ``train``; returns the centered copy and the column means."""
    x = as_matrix(train, "train")
    mean = x.mean(axis=0)
    return x - mean, mean


def autoscale(train) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Center and divide by the column standard deviation (ddof=1); constant columns keep scale 1."""
    centered, mean = center(train)
    std = centered.std(axis=0, ddof=1) if centered.shape[0] > 1 else np.ones(centered.shape[1])
    std = np.where(std > 0, std, 1.0)
    return centered / std, mean, std


# Synthetic spectra: fractions of the wavelength range, bump widths and depths
_BUMP_POSITIONS = (0.10, 0.30, 0.70)
_BUMP_DEPTHS = (0.06, 0.10, 0.08)
_BUMP_WIDTH_NM = 40.0
_SHIFT_NM_PER_SEPARATION = 8.0


def synth_spectra(
    n_classes: int = 3,
    per_class: int | Sequence[int] = 54,
    grid: WavelengthGrid | None = None,
    separation: float = 1.0,
    noise: float = 0.002,
    seed: int = 0,
) -> LabeledDataset:
    """Generate smooth, strongly collinear reflectance-like spectra.

    Class ``k`` has a mean curve made of three Gaussian absorption bands of
    fixed width whose centers move by ``separation * 8`` nm from one class to
    the next, on top of a baseline shared by all classes. Each sample then
    receives random smooth distortions (offset, gain, tilt, band depth) and
    white noise, all proportional to ``noise``; with ``noise=0`` every row of
    a class equals its mean curve.
    """
    grid = grid or WavelengthGrid()
    counts = [per_class] * n_classes if np.isscalar(per_class) else list(per_class)
    if n_classes < 2 or len(counts) != n_classes:
        raise InvalidConfig("need at least two classes and one count per class")
    if min(counts) < 2:
        raise InvalidConfig("every class needs at least two samples")
    if not (separation > 0 and noise >= 0):
        raise InvalidConfig("separation must be positive and noise non-negative")

    rng = np.random.default_rng(seed)
    lam = grid.wavelengths
    span = max(lam[-1] - lam[0], grid.step_nm)
    u = (lam - lam[0]) / span
    baseline = 0.45 + 0.15 * u - 0.10 * u**2
    centers = lam[0] + span * np.array(_BUMP_POSITIONS)
    offsets = (np.arange(n_classes) - (n_classes - 1) / 2.0) * separation * _SHIFT_NM_PER_SEPARATION

    def bands(k: int) -> np.ndarray:
        c = centers[:, None] + offsets[k]
        return np.exp(-0.5 * ((lam[None, :] - c) / _BUMP_WIDTH_NM) ** 2)

    rows, labels = [], []
    for k, n_k in enumerate(counts):
        shape = bands(k)
        depth = np.array(_BUMP_DEPTHS)[None, :] * (1.0 + 3.0 * noise * rng.standard_normal((n_k, 3)))
        curves = baseline[None, :] - depth @ shape
        gain = 1.0 + 5.0 * noise * rng.standard_normal((n_k, 1))
        offset = 10.0 * noise * rng.standard_normal((n_k, 1))
        tilt = 5.0 * noise * rng.standard_normal((n_k, 1))
        white = noise * rng.standard_normal((n_k, lam.size))
        rows.append(gain * curves + offset + tilt * u[None, :] + white)
        labels.append(np.full(n_k, k + 1))
    names = tuple(f"class{k + 1}" for k in range(n_classes))
    return LabeledDataset(np.vstack(rows), np.concatenate(labels), names, grid)
