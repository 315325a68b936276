"""Global-best particle swarm optimization baseline."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError
from .mfo import ObjectiveSpec
from .records import RunRecord


@dataclass
class PsoConfig:
    """Swarm parameters.

    Inertia decays linearly from ``w_start`` to ``w_end`` over the run.
    ``v_max`` caps each velocity component at that fraction of the
    dimension's bound range.
    """

    c1: float = 2.0
    c2: float = 2.0
    population: int = 50
    iterations: int = 500
    w_start: float = 0.9
    w_end: float = 0.4
    v_max: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.c1 < 0 or self.c2 < 0:
            raise ConfigError("acceleration coefficients must be non-negative")
        if not 0 < self.v_max <= 1:
            raise ConfigError("v_max must lie in (0, 1]")
        if self.population < 1 or self.iterations < 1:
            raise ConfigError("population and iterations must be positive")

    @property
    def name(self) -> str:
        return "PSO"

    def inertia(self, l: int) -> float:
        if self.iterations == 1:
            return self.w_start
        frac = (l - 1) / (self.iterations - 1)
        return self.w_start + frac * (self.w_end - self.w_start)


@dataclass
class PsoState:
    positions: np.ndarray
    velocities: np.ndarray
    fitness: np.ndarray
    pbest: np.ndarray
    pbest_fitness: np.ndarray
    gbest: np.ndarray
    gbest_fitness: float
    iteration: int


def init_pso(spec: ObjectiveSpec, cfg: PsoConfig, rng: np.random.Generator) -> PsoState:
    span = spec.upper - spec.lower
    positions = spec.lower + span * rng.random((cfg.population, spec.dim))
    velocities = np.zeros_like(positions)
    if spec.on_iteration is not None:
        spec.on_iteration(1)
    fitness = spec.evaluate_many(positions)
    best = int(np.argmin(fitness))
    return PsoState(
        positions=positions,
        velocities=velocities,
        fitness=fitness,
        pbest=positions.copy(),
        pbest_fitness=fitness.copy(),
        gbest=positions[best].copy(),
        gbest_fitness=float(fitness[best]),
        iteration=1,
    )


def pso_step(state: PsoState, spec: ObjectiveSpec, cfg: PsoConfig, rng: np.random.Generator) -> PsoState:
    """One synchronous velocity/position update of every particle."""
    l = state.iteration
    x = state.positions
    r1 = rng.random(x.shape)
    r2 = rng.random(x.shape)
    cap = cfg.v_max * (spec.upper - spec.lower)

    v = (
        cfg.inertia(l) * state.velocities
        + cfg.c1 * r1 * (state.pbest - x)
        + cfg.c2 * r2 * (state.gbest - x)
    )
    v = np.clip(v, -cap, cap)
    x = spec.clip(x + v)

    if spec.on_iteration is not None:
        spec.on_iteration(l)
    fitness = spec.evaluate_many(x)

    improved = fitness < state.pbest_fitness
    pbest = np.where(improved[:, None], x, state.pbest)
    pbest_fitness = np.where(improved, fitness, state.pbest_fitness)
    best = int(np.argmin(pbest_fitness))
    if pbest_fitness[best] < state.gbest_fitness:
        gbest, gbest_fitness = pbest[best].copy(), float(pbest_fitness[best])
    else:
        gbest, gbest_fitness = state.gbest, state.gbest_fitness
    return PsoState(x, v, fitness, pbest, pbest_fitness, gbest, gbest_fitness, l + 1)


def pso_optimize(spec: ObjectiveSpec, cfg: PsoConfig, algorithm: str = "PSO") -> RunRecord:
    rng = np.random.default_rng(cfg.seed)
    start = time.perf_counter()
    state = init_pso(spec, cfg, rng)
    initial = state.gbest_fitness
    curve = np.empty(cfg.iterations)
    for i in range(cfg.iterations):
        state = pso_step(state, spec, cfg, rng)
        curve[i] = state.gbest_fitness
    wall_ms = (time.perf_counter() - start) * 1e3
    return RunRecord(
        algorithm=algorithm,
        seed=cfg.seed,
        curve=curve,
        best_position=state.gbest.copy(),
        best_fitness=state.gbest_fitness,
        initial_fitness=initial,
        wall_ms=wall_ms,
        evaluations=cfg.population * (cfg.iterations + 1),
        meta={
            "c1": cfg.c1,
            "c2": cfg.c2,
            "n": cfg.population,
            "T": cfg.iterations,
            "w_start": cfg.w_start,
            "w_end": cfg.w_end,
            "v_max": cfg.v_max,
        },
    )
