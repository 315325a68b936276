"""Run records and their CSV / key-value persistence."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class RunRecord:
    """Outcome of one seeded optimization run."""

    algorithm: str
    seed: int
    curve: np.ndarray
    best_position: np.ndarray
    best_fitness: float
    initial_fitness: float
    wall_ms: float
    evaluations: int = 0
    classification_rate: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return len(self.curve)

    def metadata(self) -> dict:
        out = {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "initial_fitness": self.initial_fitness,
            "best_fitness": self.best_fitness,
        }
        if self.classification_rate is not None:
            out["classification_rate"] = self.classification_rate
        out.update(self.meta)
        out["wall_ms"] = self.wall_ms
        return out


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_curve_csv(path, record: RunRecord) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "best_fitness"])
        for i, value in enumerate(record.curve, start=1):
            writer.writerow([i, _fmt(value)])
    return path


def read_curve_csv(path) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["iteration", "best_fitness"]:
            raise ValueError(f"unexpected curve header {header}")
        return np.array([float(row[1]) for row in reader])


def write_kv(path, items: dict) -> Path:
    """Flat ``key=value`` text file, one pair per line, in insertion order."""
    path = Path(path)
    with path.open("w") as fh:
        for key, value in items.items():
            fh.write(f"{key}={_fmt(value)}\n")
    return path


def read_kv(path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def write_run(directory, stem: str, record: RunRecord) -> tuple[Path, Path]:
    """Persist a record as ``<stem>.csv`` plus ``<stem>.meta`` sidecar."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    curve = write_curve_csv(directory / f"{stem}.csv", record)
    meta = write_kv(directory / f"{stem}.meta", record.metadata())
    return curve, meta
