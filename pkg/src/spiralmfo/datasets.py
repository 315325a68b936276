"""Sonar CSV ingestion, stratified splitting, jitter augmentation, and a
synthetic multiclass generator."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .exceptions import ConfigError, ParseError, SchemaError, SizeError

SONAR_FEATURES = 60
SONAR_CLASS_COUNTS = {"cylinder": 111, "rock": 97}
_SONAR_LABELS = {"M": 0, "R": 1}
_SONAR_NAMES = ["cylinder", "rock"]


class Provenance(enum.Enum):
    GORMAN_SEJNOWSKI = "GormanSejnowski"
    SYNTHETIC = "Synthetic"


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    provenance: Provenance

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        if features.ndim != 2 or len(features) != len(labels):
            raise SchemaError("features must be N x F with one label per row")
        if not np.all(np.isfinite(features)):
            raise SchemaError("features must be finite")
        if len(labels) and (labels.min() < 0 or labels.max() >= len(self.class_names)):
            raise SchemaError("label outside the class range")
        features.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "class_names", tuple(self.class_names))

    def __len__(self):
        return len(self.labels)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> dict[str, int]:
        counts = np.bincount(self.labels, minlength=self.n_classes)
        return {name: int(c) for name, c in zip(self.class_names, counts)}

    def subset(self, index) -> "Dataset":
        index = np.asarray(index, dtype=int)
        return Dataset(self.features[index], self.labels[index], self.class_names, self.provenance)


@dataclass(frozen=True)
class SplitSpec:
    n_train: int = 150
    n_test: int = 58
    seed: int = 0
    stratified: bool = True


def bundled_sonar_path() -> Path:
    """Path of the 208-row sonar file shipped with the package."""
    return Path(str(resources.files("spiralmfo") / "data" / "sonar.csv"))


def load_sonar_csv(path=None, strict: bool = True) -> Dataset:
    """Read the mines-vs-rocks CSV: 60 floats then an ``M`` or ``R`` token.

    Cylinder (``M``) maps to class 0 and rock (``R``) to class 1. With
    ``strict`` the file must hold exactly 208 rows split 111/97.
    """
    path = bundled_sonar_path() if path is None else Path(path)
    feats, labels = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not tok.strip() for tok in row):
                continue
            if len(row) != SONAR_FEATURES + 1:
                raise SchemaError(
                    f"line {lineno}: expected {SONAR_FEATURES + 1} columns, got {len(row)}"
                )
            token = row[-1].strip()
            if token not in _SONAR_LABELS:
                raise ParseError(f"unknown label {token!r}", line=lineno)
            try:
                values = [float(tok) for tok in row[:-1]]
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            if not np.all(np.isfinite(values)):
                raise ParseError("non-finite feature", line=lineno)
            feats.append(values)
            labels.append(_SONAR_LABELS[token])
    if not feats:
        raise SchemaError(f"{path}: no data rows")
    ds = Dataset(np.array(feats), np.array(labels), _SONAR_NAMES, Provenance.GORMAN_SEJNOWSKI)
    if strict:
        counts = ds.class_counts()
        if len(ds) != 208 or counts != SONAR_CLASS_COUNTS:
            raise SchemaError(f"{path}: expected 208 rows split 111/97, got {len(ds)} {counts}")
    return ds


def load_dataset_csv(path, class_names=None) -> Dataset:
    """Read a CSV of features followed by an integer class label."""
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    if data.size == 0:
        raise SchemaError(f"{path}: no data rows")
    labels = data[:, -1].astype(int)
    if class_names is None:
        class_names = [str(c) for c in range(labels.max() + 1)]
    return Dataset(data[:, :-1], labels, class_names, Provenance.SYNTHETIC)


def write_dataset_csv(path, ds: Dataset) -> Path:
    """Write rows as features then label, using ``M``/``R`` for sonar data."""
    path = Path(path)
    sonar = ds.provenance is Provenance.GORMAN_SEJNOWSKI and ds.n_classes == 2
    tokens = {v: k for k, v in _SONAR_LABELS.items()}
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for x, y in zip(ds.features, ds.labels):
            label = tokens[int(y)] if sonar else str(int(y))
            writer.writerow([repr(float(v)) for v in x] + [label])
    return path


def _allocate(total: int, weights: np.ndarray, caps: np.ndarray) -> np.ndarray:
    """Largest-remainder allocation of ``total`` proportional to ``weights``."""
    if total == 0 or weights.sum() == 0:
        return np.zeros(len(weights), dtype=int)
    exact = total * weights / weights.sum()
    alloc = np.minimum(np.floor(exact).astype(int), caps)
    remainder = exact - alloc
    while alloc.sum() < total:
        open_ = alloc < caps
        if not open_.any():
            break
        choice = np.argmax(np.where(open_, remainder, -np.inf))
        alloc[choice] += 1
        remainder[choice] = -1.0
    return alloc


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seeded (optionally stratified) disjoint train/test partition."""
    n = len(ds)
    if spec.n_train < 0 or spec.n_test < 0:
        raise ConfigError("split sizes must be non-negative")
    if spec.n_train + spec.n_test > n:
        raise SizeError(f"need {spec.n_train + spec.n_test} samples, dataset has {n}")
    rng = np.random.default_rng(spec.seed)
    order = rng.permutation(n)

    if not spec.stratified:
        train_idx = order[:spec.n_train]
        test_idx = order[spec.n_train:spec.n_train + spec.n_test]
        return ds.subset(train_idx), ds.subset(test_idx)

    by_class = [order[ds.labels[order] == c] for c in range(ds.n_classes)]
    sizes = np.array([len(idx) for idx in by_class])
    n_tr = _allocate(spec.n_train, sizes.astype(float), sizes)
    left = sizes - n_tr
    n_te = _allocate(spec.n_test, left.astype(float), left)
    train_idx = np.concatenate([idx[:k] for idx, k in zip(by_class, n_tr)])
    test_idx = np.concatenate([idx[k:k + j] for idx, k, j in zip(by_class, n_tr, n_te)])
    # interleave classes again
    train_idx = train_idx[rng.permutation(len(train_idx))]
    test_idx = test_idx[rng.permutation(len(test_idx))]
    return ds.subset(train_idx), ds.subset(test_idx)


def augment(ds: Dataset, factor: int = 8, noise_sigma: float = 0.02, seed: int = 0,
            clip=(0.0, 1.0)) -> Dataset:
    """Replicate every sample ``factor`` times with Gaussian jitter.

    The output starts with an exact copy of ``ds``; each further block of
    ``len(ds)`` rows is a noisy replica clamped to ``clip`` (``None`` keeps
    values unclamped).
    """
    if factor < 1:
        raise ConfigError("augmentation factor must be >= 1")
    if factor == 1:
        return ds
    rng = np.random.default_rng(seed)
    blocks = [ds.features]
    for _ in range(factor - 1):
        noisy = ds.features + rng.normal(0.0, noise_sigma, ds.features.shape)
        if clip is not None:
            noisy = np.clip(noisy, *clip)
        blocks.append(noisy)
    return Dataset(np.vstack(blocks), np.tile(ds.labels, factor), ds.class_names, ds.provenance)


def synth_multiclass(classes: int, per_class: int, dim: int, separation: float, seed: int = 0) -> Dataset:
    """Unit-variance Gaussian blobs whose means sit ``separation`` from the
    origin along random unit directions."""
    if classes < 2:
        raise ConfigError("need at least two classes")
    rng = np.random.default_rng(seed)
    directions = rng.normal(size=(classes, dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    means = separation * directions
    labels = np.repeat(np.arange(classes), per_class)
    features = means[labels] + rng.normal(size=(len(labels), dim))
    order = rng.permutation(len(labels))
    names = [f"class{c}" for c in range(classes)]
    return Dataset(features[order], labels[order], names, Provenance.SYNTHETIC)
