"""Seeded multi-run experiments, the orthogonal-array sweep, timing, and
spiral trace export.

Every run uses ``seed = base_seed + i``; all artifacts are CSV or flat
``key=value`` files. Apart from the ``wall_ms`` entries, output bytes depend
only on the configuration.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import datasets as ds
from .exceptions import ConfigError, RunError
from .mfo import MfoConfig, ObjectiveSpec, optimize
from .network import (
    ConvExtractor,
    LabeledBatch,
    NetworkSpec,
    classification_rate,
    decode_forward,
    loss,
    make_objective,
    save_params,
)
from .pso import PsoConfig, pso_optimize
from .records import RunRecord, write_kv, write_run
from .spirals import SpiralKernel, SpiralKind, write_trace_csv
from .stats import ComparisonReport, RunBatch, build_report

logger = logging.getLogger(__name__)

MFO_NAMES = ("MFO",) + tuple(k.lmfo_name for k in SpiralKind)
ALGORITHMS = MFO_NAMES + ("PSO",)

_MFO_KEYS = {"q", "lituus_eps", "fermat_standard", "shared_t", "t_lower_start", "t_lower_end"}
_PSO_KEYS = {"c1", "c2", "w_start", "w_end", "v_max"}


# ---------------------------------------------------------------- config

@dataclass
class DatasetConfig:
    source: str = "sonar"  # sonar | synthetic
    path: str | None = None
    classes: int = 7
    per_class: int = 93
    dim: int = 20
    separation: float = 3.0
    synth_seed: int = 0
    n_train: int = 150
    n_test: int = 58
    split_seed: int = 0
    stratified: bool = True
    augment_factor: int = 8
    noise_sigma: float = 0.02
    augment_seed: int = 0


@dataclass
class NetworkConfig:
    n_hidden: int = 10
    n_layers: int = 1
    weight_bound: float = 10.0
    n_batches: int = 1
    # optional frozen extractor; features are reshaped to image_shape
    image_shape: tuple[int, int] | None = None
    conv_maps: tuple[int, ...] = (6,)
    conv_seed: int = 0


@dataclass
class OptimizerEntry:
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.name = self.name.strip().upper()
        if self.name not in ALGORITHMS:
            raise ConfigError(f"unknown optimizer {self.name!r}; choose from {', '.join(ALGORITHMS)}")
        allowed = _PSO_KEYS if self.name == "PSO" else _MFO_KEYS
        unknown = set(self.params) - allowed
        if unknown:
            raise ConfigError(f"{self.name}: unknown parameter(s) {sorted(unknown)}")


@dataclass
class ProtocolConfig:
    runs: int = 20
    iterations: int = 500
    population: int = 50
    base_seed: int = 0


@dataclass
class ExperimentConfig:
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    network: NetworkConfig = field(default_factory=NetworkConfig)
    optimizers: list[OptimizerEntry] = field(
        default_factory=lambda: [OptimizerEntry(n) for n in ALGORITHMS]
    )
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    reference: str = "MFO"
    out: str = "results"

    def __post_init__(self):
        if not self.optimizers:
            raise ConfigError("optimizer roster is empty")
        if self.protocol.runs < 1 or self.protocol.iterations < 1:
            raise ConfigError("runs and iterations must be >= 1")
        names = [o.name for o in self.optimizers]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate optimizer names in roster")

    def override(self, seed=None, runs=None, iterations=None, out=None) -> "ExperimentConfig":
        protocol = replace(
            self.protocol,
            base_seed=self.protocol.base_seed if seed is None else seed,
            runs=self.protocol.runs if runs is None else runs,
            iterations=self.protocol.iterations if iterations is None else iterations,
        )
        return replace(self, protocol=protocol, out=self.out if out is None else str(out))


def _section(cls, raw: dict | None, where: str):
    raw = dict(raw or {})
    known = set(cls.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}")
    for key in ("image_shape", "conv_maps"):
        if key in raw and raw[key] is not None:
            raw[key] = tuple(raw[key])
    return cls(**raw)


def config_from_dict(raw: dict) -> ExperimentConfig:
    raw = dict(raw or {})
    unknown = set(raw) - {"dataset", "network", "optimizers", "protocol", "reference", "out"}
    if unknown:
        raise ConfigError(f"unknown top-level key(s) {sorted(unknown)}")
    kwargs: dict[str, Any] = {
        "dataset": _section(DatasetConfig, raw.get("dataset"), "dataset"),
        "network": _section(NetworkConfig, raw.get("network"), "network"),
        "protocol": _section(ProtocolConfig, raw.get("protocol"), "protocol"),
    }
    if "optimizers" in raw:
        roster = []
        for item in raw["optimizers"]:
            if isinstance(item, str):
                roster.append(OptimizerEntry(item))
            else:
                item = dict(item)
                roster.append(OptimizerEntry(item.pop("name"), item))
        kwargs["optimizers"] = roster
    for key in ("reference", "out"):
        if key in raw:
            kwargs[key] = raw[key]
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return config_from_dict(raw or {})


def config_to_dict(cfg: ExperimentConfig) -> dict:
    out = asdict(cfg)
    out["optimizers"] = [{"name": o.name, **o.params} for o in cfg.optimizers]
    return out


# ---------------------------------------------------------------- data

@dataclass
class PreparedData:
    network: NetworkSpec
    train: LabeledBatch
    test: LabeledBatch


def _extract(features, net: NetworkConfig):
    if net.image_shape is None:
        return features, None
    extractor = ConvExtractor(n_maps=net.conv_maps, seed=net.conv_seed)
    images = np.asarray(features).reshape(len(features), *net.image_shape)
    return extractor.transform(images), extractor


def prepare_data(cfg: ExperimentConfig, network: NetworkConfig | None = None) -> PreparedData:
    """Load, split, augment, and wrap the configured dataset."""
    dcfg = cfg.dataset
    net = network or cfg.network
    if dcfg.source == "sonar":
        data = ds.load_sonar_csv(dcfg.path)
        clip = (0.0, 1.0)
    elif dcfg.source == "synthetic":
        data = ds.synth_multiclass(dcfg.classes, dcfg.per_class, dcfg.dim, dcfg.separation, dcfg.synth_seed)
        clip = None
    else:
        raise ConfigError(f"unknown dataset source {dcfg.source!r}")

    train, test = ds.split(data, ds.SplitSpec(dcfg.n_train, dcfg.n_test, dcfg.split_seed, dcfg.stratified))
    train = ds.augment(train, dcfg.augment_factor, dcfg.noise_sigma, dcfg.augment_seed, clip=clip)
    test = ds.augment(test, dcfg.augment_factor, dcfg.noise_sigma, dcfg.augment_seed + 1, clip=clip)

    x_train, extractor = _extract(train.features, net)
    x_test, _ = _extract(test.features, net) if len(test) else (np.empty((0, x_train.shape[1])), None)
    spec = NetworkSpec(x_train.shape[1], net.n_hidden, data.n_classes, net.n_layers, extractor)
    return PreparedData(
        spec,
        LabeledBatch.from_labels(x_train, train.labels, data.n_classes),
        LabeledBatch.from_labels(x_test, test.labels, data.n_classes),
    )


# ---------------------------------------------------------------- optimizers

def optimizer_config(entry: OptimizerEntry, protocol: ProtocolConfig, seed: int):
    """Concrete ``MfoConfig`` or ``PsoConfig`` for one roster entry."""
    p = dict(entry.params)
    common = {"population": protocol.population, "iterations": protocol.iterations, "seed": seed}
    if entry.name == "PSO":
        return PsoConfig(**common, **p)
    kind = SpiralKind.EQUIANGULAR if entry.name == "MFO" else SpiralKind.from_lmfo(entry.name)
    kernel = SpiralKernel(
        kind,
        float(p.pop("q", 1.0)),
        lituus_eps=float(p.pop("lituus_eps", 1e-6)),
        fermat_standard=bool(p.pop("fermat_standard", False)),
    )
    return MfoConfig(kernel=kernel, **common, **p)


def run_optimizer(entry: OptimizerEntry, objective: ObjectiveSpec, protocol: ProtocolConfig, seed: int) -> RunRecord:
    cfg = optimizer_config(entry, protocol, seed)
    try:
        if isinstance(cfg, PsoConfig):
            return pso_optimize(objective, cfg, algorithm=entry.name)
        return optimize(objective, cfg, algorithm=entry.name)
    except Exception as exc:
        raise RunError(entry.name, seed, exc) from exc


def _objective(cfg: ExperimentConfig, data: PreparedData, net: NetworkConfig, seed: int) -> ObjectiveSpec:
    return make_objective(data.network, data.train, net.weight_bound, net.n_batches, batch_seed=seed)


def _score(data: PreparedData, params) -> tuple[float, float | None]:
    train_loss = loss(decode_forward(data.network, params, data.train.inputs), data.train.targets)
    rate = None
    if len(data.test):
        rate = classification_rate(decode_forward(data.network, params, data.test.inputs), data.test.labels)
    return train_loss, rate


# ---------------------------------------------------------------- compare / train

@dataclass
class ExperimentResult:
    report: ComparisonReport
    batches: list[RunBatch]
    records: dict[str, list[RunRecord]]
    out_dir: Path


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> ExperimentResult:
    """Repeated seeded runs of every roster optimizer plus the comparison report."""
    out = Path(out_dir or cfg.out)
    curves_dir = out / "curves"
    curves_dir.mkdir(parents=True, exist_ok=True)
    data = prepare_data(cfg)
    protocol = cfg.protocol

    records: dict[str, list[RunRecord]] = {}
    batches = []
    for entry in cfg.optimizers:
        runs = []
        for i in range(protocol.runs):
            seed = protocol.base_seed + i
            rec = run_optimizer(entry, _objective(cfg, data, cfg.network, seed), protocol, seed)
            train_loss, rate = _score(data, rec.best_position)
            rec.classification_rate = rate
            rec.meta["train_loss"] = train_loss
            write_run(curves_dir, f"{entry.name}_seed{seed}", rec)
            runs.append(rec)
            logger.info("%s seed=%d loss=%.6g rate=%s", entry.name, seed, rec.best_fitness, rate)
        records[entry.name] = runs
        batches.append(RunBatch(
            entry.name,
            [r.best_fitness for r in runs],
            [r.classification_rate for r in runs] if len(data.test) else [],
            [r.curve for r in runs],
        ))

    reference = cfg.reference if cfg.reference in records else cfg.optimizers[0].name
    report = build_report(batches, reference)
    (out / "report.csv").write_text(report.to_csv())
    (out / "report.txt").write_text(report.to_text() + "\n")
    _write_runs_csv(out / "runs.csv", records)
    (out / "config.yaml").write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False))
    return ExperimentResult(report, batches, records, out)


def _write_runs_csv(path: Path, records: dict[str, list[RunRecord]]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["algorithm", "seed", "final_loss", "train_loss", "classification_rate"])
        for name, runs in records.items():
            for r in runs:
                rate = "" if r.classification_rate is None else repr(r.classification_rate)
                writer.writerow([name, r.seed, repr(r.best_fitness), repr(r.meta["train_loss"]), rate])


def run_train(cfg: ExperimentConfig, out_dir=None, optimizer: str | None = None) -> RunRecord:
    """Single run of one optimizer; saves its curve and trained parameters."""
    out = Path(out_dir or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    entry = cfg.optimizers[0]
    if optimizer is not None:
        matches = [o for o in cfg.optimizers if o.name == optimizer.upper()]
        entry = matches[0] if matches else OptimizerEntry(optimizer)
    data = prepare_data(cfg)
    seed = cfg.protocol.base_seed
    rec = run_optimizer(entry, _objective(cfg, data, cfg.network, seed), cfg.protocol, seed)
    train_loss, rate = _score(data, rec.best_position)
    rec.classification_rate = rate
    rec.meta["train_loss"] = train_loss
    stem = f"{entry.name}_seed{seed}"
    write_run(out, stem, rec)
    save_params(
        out / f"{stem}_params.csv", rec.best_position, data.network,
        seed=seed, weight_bound=cfg.network.weight_bound, algorithm=entry.name,
    )
    return rec


# ---------------------------------------------------------------- sweep

SWEEP_LEVELS = {
    "n_layer": (3, 4, 5, 6),
    "q": (0.20, 0.40, 0.80, 1.0),
    "n_batch": (6, 8, 10, 12),
}

# (n_layer level, q level, n_batch level) per experiment, 1-based
DEFAULT_TRIPLES = (
    (1, 1, 1), (1, 2, 2), (1, 3, 3), (1, 4, 4),
    (2, 1, 2), (2, 2, 1), (2, 3, 4), (2, 4, 3),
    (3, 1, 1), (3, 2, 4), (3, 3, 2), (3, 4, 3),
    (4, 1, 4), (4, 2, 3), (4, 3, 2), (4, 4, 1),
)


@dataclass(frozen=True)
class SweepPlan:
    levels: dict = field(default_factory=lambda: dict(SWEEP_LEVELS))
    triples: tuple = DEFAULT_TRIPLES

    def __post_init__(self):
        if len(self.triples) != 16:
            raise ConfigError("a sweep plan has exactly 16 experiments")
        for triple in self.triples:
            if len(triple) != 3 or not all(1 <= v <= 4 for v in triple):
                raise ConfigError(f"level indices must lie in 1..4, got {triple}")

    def rows(self) -> list[tuple[int, float, int]]:
        """Resolve level indices to ``(n_layer, q, n_batch)`` values."""
        nl, q, nb = self.levels["n_layer"], self.levels["q"], self.levels["n_batch"]
        return [(nl[a - 1], q[b - 1], nb[c - 1]) for a, b, c in self.triples]


@dataclass
class SweepRow:
    experiment: int
    n_layer: int
    q: float
    n_batch: int
    loss: float


def run_sweep(plan: SweepPlan, cfg: ExperimentConfig, out_dir=None, algorithm: str = "MFO") -> list[SweepRow]:
    """Evaluate every plan row; the loss is the full training-set loss of the
    best parameters, averaged over the protocol's seeded runs."""
    out = Path(out_dir or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    data_cache: dict[int, PreparedData] = {}
    rows = []
    for number, (n_layer, q, n_batch) in enumerate(plan.rows(), start=1):
        net = replace(cfg.network, n_layers=n_layer, n_batches=n_batch)
        if n_layer not in data_cache:
            data_cache[n_layer] = prepare_data(cfg, net)
        data = data_cache[n_layer]
        entry = OptimizerEntry(algorithm, {"q": q})
        losses = []
        for i in range(cfg.protocol.runs):
            seed = cfg.protocol.base_seed + i
            rec = run_optimizer(entry, _objective(cfg, data, net, seed), cfg.protocol, seed)
            losses.append(_score(data, rec.best_position)[0])
        rows.append(SweepRow(number, n_layer, q, n_batch, float(np.mean(losses))))
        logger.info("sweep %d: layers=%d q=%g batches=%d loss=%.6g", number, n_layer, q, n_batch, rows[-1].loss)

    with (out / "sweep.csv").open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["experiment", "n_layer", "q", "n_batch", "loss"])
        for r in rows:
            writer.writerow([r.experiment, r.n_layer, repr(r.q), r.n_batch, repr(r.loss)])
    best = min(rows, key=lambda r: r.loss)
    write_kv(out / "sweep_summary.meta", {
        "best_experiment": best.experiment,
        "best_n_layer": best.n_layer,
        "best_q": best.q,
        "best_n_batch": best.n_batch,
        "best_loss": best.loss,
    })
    return rows


def group_means(rows: list[SweepRow], factor: str) -> dict:
    groups: dict = {}
    for r in rows:
        groups.setdefault(getattr(r, factor), []).append(r.loss)
    return {k: float(np.mean(v)) for k, v in sorted(groups.items())}


# ---------------------------------------------------------------- timing

@dataclass
class TimingRow:
    model: str
    phase: str
    wall_ms: float


def run_timing(cfg: ExperimentConfig, out_dir=None, repeats: int = 3) -> list[TimingRow]:
    """Training wall time (median of ``repeats``) and per-sample inference
    time for each roster optimizer.

    Repeats are interleaved across the roster after one untimed warm-up run,
    so clock drift and cache warm-up do not favour whichever model runs last.
    """
    if repeats < 1:
        raise ConfigError("repeats must be at least 1")
    out = Path(out_dir or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    data = prepare_data(cfg)
    test_x = data.test.inputs if len(data.test) else data.train.inputs
    seed = cfg.protocol.base_seed
    names = [e.name for e in cfg.optimizers]
    run_optimizer(cfg.optimizers[0], _objective(cfg, data, cfg.network, seed), cfg.protocol, seed)

    train_ms: dict[str, list[float]] = {n: [] for n in names}
    best: dict[str, np.ndarray] = {}
    for _ in range(repeats):
        for entry in cfg.optimizers:
            objective = _objective(cfg, data, cfg.network, seed)
            start = time.perf_counter()
            rec = run_optimizer(entry, objective, cfg.protocol, seed)
            train_ms[entry.name].append((time.perf_counter() - start) * 1e3)
            best[entry.name] = rec.best_position

    rows = []
    for name in names:
        infer_ms = []
        for _ in range(repeats):
            start = time.perf_counter()
            decode_forward(data.network, best[name], test_x)
            infer_ms.append((time.perf_counter() - start) * 1e3 / len(test_x))
        rows.append(TimingRow(name, "train", float(np.median(train_ms[name]))))
        rows.append(TimingRow(name, "test", float(np.median(infer_ms))))

    with (out / "timing.csv").open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["model", "phase", "wall_ms"])
        for r in rows:
            writer.writerow([r.model, r.phase, repr(r.wall_ms)])
    return rows


# ---------------------------------------------------------------- spirals

def emit_spiral_traces(
    kernels=None,
    t_start: float = 0.0,
    t_stop: float = 3.0,
    samples: int = 301,
    out_dir="spirals",
    seed: int = 0,
) -> list[Path]:
    """One ``t,x,y`` CSV per kernel, named ``spiral_<LMFOk>_<kind>.csv``."""
    if kernels is None:
        kernels = [SpiralKernel(kind, 1.0) for kind in SpiralKind]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t = np.linspace(t_start, t_stop, samples)
    rng = np.random.default_rng(seed)
    paths = []
    for kernel in kernels:
        path = out / f"spiral_{kernel.name}_{kernel.kind.value}.csv"
        write_trace_csv(path, kernel, t, rng)
        paths.append(path)
    return paths
