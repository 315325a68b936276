"""Moth-flame optimizer with pluggable spiral kernels.

Plain MFO is the Equiangular kernel (``exp(q t)``) with ``q = 1``; the
LMFO1-LMFO6 variants swap in the other spiral families.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .exceptions import ConfigError, DimensionError, ObjectiveError
from .records import RunRecord
from .spirals import SpiralKernel, SpiralKind, radial_envelope

logger = logging.getLogger(__name__)


@dataclass
class ObjectiveSpec:
    """A box-bounded minimization problem.

    ``evaluate`` maps one position vector to a scalar loss. ``on_iteration``
    is an optional hook the optimizers call with the iteration number before
    each update step; mini-batch objectives use it to rotate their batch.
    """

    dim: int
    lower: np.ndarray
    upper: np.ndarray
    evaluate: Callable[[np.ndarray], float]
    on_iteration: Callable[[int], None] | None = None
    name: str = "objective"

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("dim must be a positive integer")
        self.lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.dim,)).copy()
        self.upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.dim,)).copy()
        if np.any(self.lower > self.upper):
            raise ConfigError("every lower bound must not exceed its upper bound")

    def evaluate_many(self, positions: np.ndarray) -> np.ndarray:
        """Evaluate rows in index order and reject non-finite losses."""
        out = np.empty(len(positions))
        for i, x in enumerate(positions):
            value = float(self.evaluate(x))
            if not np.isfinite(value):
                raise ObjectiveError(
                    f"{self.name} returned {value} at row {i}", position=x.copy()
                )
            out[i] = value
        return out

    def clip(self, positions: np.ndarray) -> np.ndarray:
        return np.clip(positions, self.lower, self.upper)


@dataclass
class MfoConfig:
    """Optimizer settings.

    Trajectory parameters ``t`` are drawn independently per coordinate
    unless ``shared_t`` is set, in which case each moth draws a single ``t``
    (and a single Random-kernel ``u``) per iteration.
    """

    population: int = 50
    iterations: int = 500
    kernel: SpiralKernel = field(default_factory=SpiralKernel)
    t_lower_start: float = -1.0
    t_lower_end: float = -2.0
    seed: int = 0
    shared_t: bool = False

    def __post_init__(self):
        if self.population < 2:
            raise ConfigError("population must be at least 2")
        if self.iterations < 1:
            raise ConfigError("iterations must be at least 1")
        if not (self.t_lower_end <= self.t_lower_start < 1):
            raise ConfigError("need t_lower_end <= t_lower_start < 1")

    @property
    def name(self) -> str:
        return self.kernel.name


def plain_mfo_config(**kwargs) -> MfoConfig:
    """Canonical MFO: logarithmic spiral ``exp(q t)`` with ``q = 1``."""
    kwargs.setdefault("kernel", SpiralKernel(SpiralKind.EQUIANGULAR, 1.0))
    return MfoConfig(**kwargs)


@dataclass
class SwarmState:
    positions: np.ndarray
    fitness: np.ndarray
    flames: np.ndarray
    flame_fitness: np.ndarray
    iteration: int

    @property
    def best_position(self) -> np.ndarray:
        return self.flames[0]

    @property
    def best_fitness(self) -> float:
        return float(self.flame_fitness[0])


def flame_count(n: int, l: int, T: int) -> int:
    """Number of flames at iteration ``l``: ``round(n - l (n-1) / T)``.

    Rounds half away from zero using exact integer arithmetic.
    """
    if not 1 <= l <= T:
        raise ValueError(f"iteration {l} outside 1..{T}")
    num = n * T - l * (n - 1)  # positive for l <= T
    k = (2 * num + T) // (2 * T)
    return max(1, min(n, k))


def t_lower(cfg: MfoConfig, l: int) -> float:
    """Lower end of the trajectory window at iteration ``l``."""
    frac = l / cfg.iterations
    return cfg.t_lower_start + frac * (cfg.t_lower_end - cfg.t_lower_start)


def spiral_update(moth, flame, kernel: SpiralKernel, t: float, rng=None) -> np.ndarray:
    """Move ``moth`` along the kernel's spiral around ``flame``.

    Returns ``|flame - moth| * S(t) * cos(2 pi t) + flame``. A zero distance
    returns the flame coordinate exactly.
    """
    moth = np.asarray(moth, dtype=float)
    flame = np.asarray(flame, dtype=float)
    if moth.shape != flame.shape:
        raise DimensionError(f"moth shape {moth.shape} != flame shape {flame.shape}")
    factor = radial_envelope(kernel, t, rng) * np.cos(2.0 * np.pi * t)
    distance = np.abs(flame - moth)
    with np.errstate(invalid="ignore", over="ignore"):
        moved = distance * factor + flame
    return np.where(distance == 0, flame, moved)


def _rank_flames(positions, fitness, k):
    order = np.argsort(fitness, kind="stable")[:k]
    return positions[order].copy(), fitness[order].copy()


def init_swarm(spec: ObjectiveSpec, cfg: MfoConfig, rng: np.random.Generator) -> SwarmState:
    """Uniform random population; flames are its sorted best members."""
    span = spec.upper - spec.lower
    positions = spec.lower + span * rng.random((cfg.population, spec.dim))
    if spec.on_iteration is not None:
        spec.on_iteration(1)
    fitness = spec.evaluate_many(positions)
    k = flame_count(cfg.population, 1, cfg.iterations)
    flames, flame_fitness = _rank_flames(positions, fitness, k)
    return SwarmState(positions, fitness, flames, flame_fitness, iteration=1)


def step(state: SwarmState, spec: ObjectiveSpec, cfg: MfoConfig, rng: np.random.Generator) -> SwarmState:
    """One synchronous update of every moth, followed by the flame refresh."""
    l = state.iteration
    if l > cfg.iterations:
        raise ValueError("state already at the iteration budget")
    n = cfg.population
    k = flame_count(n, l, cfg.iterations)

    lo = t_lower(cfg, l)
    # shared_t: one draw per moth reused for every coordinate
    shape = (n, 1) if cfg.shared_t else (n, spec.dim)
    t = (1.0 - lo) * rng.random(shape) + lo
    factor = radial_envelope(cfg.kernel, t, rng) * np.cos(2.0 * np.pi * t)

    targets = state.flames[np.minimum(np.arange(n), k - 1)]
    distance = np.abs(targets - state.positions)
    with np.errstate(invalid="ignore", over="ignore"):
        moved = distance * factor + targets
    moved = np.where(distance == 0, targets, moved)
    positions = spec.clip(moved)

    if spec.on_iteration is not None:
        spec.on_iteration(l)
    fitness = spec.evaluate_many(positions)

    next_l = l + 1
    k_next = flame_count(n, min(next_l, cfg.iterations), cfg.iterations)
    pool = np.vstack([state.flames, positions])
    pool_fit = np.concatenate([state.flame_fitness, fitness])
    flames, flame_fitness = _rank_flames(pool, pool_fit, k_next)
    return SwarmState(positions, fitness, flames, flame_fitness, iteration=next_l)


def optimize(spec: ObjectiveSpec, cfg: MfoConfig, algorithm: str | None = None) -> RunRecord:
    """Run ``cfg.iterations`` steps from a fresh seeded swarm."""
    rng = np.random.default_rng(cfg.seed)
    start = time.perf_counter()
    state = init_swarm(spec, cfg, rng)
    initial = state.best_fitness
    curve = np.empty(cfg.iterations)
    for i in range(cfg.iterations):
        state = step(state, spec, cfg, rng)
        curve[i] = state.best_fitness
    wall_ms = (time.perf_counter() - start) * 1e3
    name = algorithm or cfg.name
    logger.debug("%s seed=%d best=%g (%.1f ms)", name, cfg.seed, state.best_fitness, wall_ms)
    return RunRecord(
        algorithm=name,
        seed=cfg.seed,
        curve=curve,
        best_position=state.best_position.copy(),
        best_fitness=state.best_fitness,
        initial_fitness=initial,
        wall_ms=wall_ms,
        evaluations=cfg.population * (cfg.iterations + 1),
        meta={
            "kernel": cfg.kernel.kind.value,
            "q": cfg.kernel.q,
            "n": cfg.population,
            "T": cfg.iterations,
        },
    )


def with_seed(cfg, seed: int):
    """Copy of an optimizer config with a different seed."""
    return replace(cfg, seed=seed)
