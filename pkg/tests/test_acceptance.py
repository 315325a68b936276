"""Acceptance checks, one test per criterion.

Each test records a short detail line; the terminal summary prints one
PASS/FAIL line per criterion. Slow criteria carry the ``slow`` marker.
"""

import math
import statistics
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import ranksum_exact_bruteforce
from spiralmfo.experiment import (
    SweepPlan,
    config_from_dict,
    group_means,
    run_experiment,
    run_sweep,
    run_timing,
)
from spiralmfo.mfo import MfoConfig, ObjectiveSpec, flame_count, optimize, plain_mfo_config, spiral_update
from spiralmfo.network import NetworkSpec, decode_forward, encode, loss
from spiralmfo.records import read_kv
from spiralmfo.spirals import SpiralKernel, SpiralKind, radial_envelope
from spiralmfo.stats import ranksum_p

SONAR_PROTOCOL = {"dataset": {"source": "sonar", "n_train": 150, "n_test": 58, "augment_factor": 8},
                  "network": {"n_hidden": 10}}


def _round_half_up(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


@pytest.mark.criterion(1)
def test_c01_flame_schedule(verdict):
    n, T = 50, 500
    mismatches = [l for l in range(1, T + 1)
                  if flame_count(n, l, T) != _round_half_up(Fraction(n) - Fraction(l * (n - 1), T))]
    verdict(f"{T - len(mismatches)}/{T} iterations match; k(1)={flame_count(n, 1, T)} k(T)={flame_count(n, T, T)}")
    assert not mismatches
    assert flame_count(n, 1, T) == 50 and flame_count(n, T, T) == 1


def _direct(kind: SpiralKind, q: float, t: float) -> float:
    if kind is SpiralKind.ARCHIMEDEAN:
        return q * t
    if kind is SpiralKind.LOGARITHMIC:
        return math.pow(10.0, q * t)
    if kind is SpiralKind.FERMAT:
        return math.pow(abs(q), t)
    if kind is SpiralKind.LITUUS:
        return q / math.sqrt(max(abs(t), 1e-6))
    if kind is SpiralKind.EQUIANGULAR:
        return math.exp(q * t)
    raise AssertionError(kind)


@pytest.mark.criterion(2)
def test_c02_spiral_closed_forms(verdict):
    rng = np.random.default_rng(2024)
    qs = rng.uniform(0.05, 2.0, 1000) * rng.choice([-1, 1], 1000)
    ts = rng.uniform(-2.0, 1.0, 1000)
    worst = 0.0
    for kind in SpiralKind:
        if kind is SpiralKind.RANDOM:
            continue
        for q, t in zip(qs, ts):
            got = radial_envelope(SpiralKernel(kind, float(q)), float(t))
            want = _direct(kind, float(q), float(t))
            worst = max(worst, abs(got - want) / max(abs(want), 1e-300))
    kernel = SpiralKernel(SpiralKind.RANDOM, 1.0)
    t = ts[ts != 0]
    ratio = radial_envelope(kernel, t, np.random.default_rng(5)) / t
    verdict(f"max rel err {worst:.2e}; random S/t in [{ratio.min():.3f}, {ratio.max():.3f}]")
    assert worst <= 1e-12
    assert np.all((ratio >= 0) & (ratio < 1))


@pytest.mark.criterion(3)
def test_c03_update_fixed_point(verdict):
    rng = np.random.default_rng(3)
    kinds = list(SpiralKind)
    failures = 0
    for _ in range(1000):
        kind = kinds[rng.integers(len(kinds))]
        q = float(rng.uniform(0.1, 2.0))
        t = float(rng.uniform(-2.0, 1.0))
        flame = rng.normal(scale=10.0 ** rng.integers(-3, 4), size=int(rng.integers(1, 40)))
        out = spiral_update(flame.copy(), flame, SpiralKernel(kind, q), t, rng)
        failures += not np.array_equal(out, flame)
    verdict(f"{1000 - failures}/1000 bit-exact")
    assert failures == 0


def _sphere_spec(dim=30):
    return ObjectiveSpec(dim, -100.0, 100.0, lambda x: float(np.dot(x, x)), name="sphere")


def _random_search(dim, evaluations, seed):
    rng = np.random.default_rng(seed)
    best = math.inf
    for chunk in np.array_split(np.arange(evaluations), 10):
        x = rng.uniform(-100.0, 100.0, (len(chunk), dim))
        best = min(best, float(np.min(np.einsum("ij,ij->i", x, x))))
    return best


@pytest.mark.slow
@pytest.mark.criterion(4)
def test_c04_sphere_sanity(verdict):
    n, T, seeds = 50, 500, range(10)
    spec = _sphere_spec()
    baseline = statistics.median(_random_search(30, n * T, 1000 + s) for s in seeds)
    variants = {"MFO": plain_mfo_config()}
    variants.update({k.lmfo_name: MfoConfig(kernel=SpiralKernel(k, 1.0)) for k in SpiralKind})
    ratios, monotone = {}, True
    for name, base in variants.items():
        finals = []
        for s in seeds:
            rec = optimize(spec, replace(base, population=n, iterations=T, seed=s))
            monotone &= bool(np.all(np.diff(rec.curve) <= 0))
            finals.append(rec.best_fitness)
        ratios[name] = baseline / statistics.median(finals)
    weakest = min(ratios, key=ratios.get)
    verdict(f"random-search median {baseline:.4g}; weakest {weakest} at {ratios[weakest]:.3g}x")
    assert monotone
    assert all(r >= 10 for r in ratios.values()), ratios


@pytest.mark.criterion(5)
def test_c05_ranksum_oracle(verdict):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(500):
        total = int(rng.integers(2, 11))
        n1 = int(rng.integers(1, total))
        values = rng.integers(0, int(rng.integers(2, 12)), total).astype(float)
        a, b = values[:n1].tolist(), values[n1:].tolist()
        worst = max(worst, abs(ranksum_p(a, b) - ranksum_exact_bruteforce(a, b)))
    anchor = ranksum_p([1, 2, 3], [4, 5, 6])
    verdict(f"max abs err {worst:.1e}; anchor p={anchor}")
    assert worst <= 1e-9
    assert anchor == 0.1


@pytest.fixture(scope="module")
def sonar_lmfo5(tmp_path_factory):
    cfg = config_from_dict({**SONAR_PROTOCOL,
                            "optimizers": [{"name": "LMFO5", "q": 1.0}],
                            "protocol": {"runs": 5, "iterations": 100, "population": 30}})
    return run_experiment(cfg, tmp_path_factory.mktemp("c06"))


@pytest.mark.slow
@pytest.mark.criterion(6)
def test_c06_sonar_rate(verdict, sonar_lmfo5):
    rates = [r.classification_rate for r in sonar_lmfo5.records["LMFO5"]]
    median = statistics.median(rates)
    verdict(f"median held-out rate {median:.2f}% over {len(rates)} seeds, target 80%")
    assert median >= 80.0


@pytest.mark.slow
@pytest.mark.criterion(7)
def test_c07_mfo_beats_pso(verdict, tmp_path):
    cfg = config_from_dict({**SONAR_PROTOCOL, "optimizers": ["MFO", "PSO"],
                            "protocol": {"runs": 10, "iterations": 100, "population": 30}})
    result = run_experiment(cfg, tmp_path)
    med = {k: statistics.median(r.best_fitness for r in v) for k, v in result.records.items()}
    verdict(f"median final loss MFO {med['MFO']:.4f} vs PSO {med['PSO']:.4f}")
    assert med["MFO"] < med["PSO"]


@pytest.mark.slow
@pytest.mark.criterion(8)
def test_c08_sweep_q_direction(verdict, tmp_path):
    cfg = config_from_dict({"optimizers": ["MFO"],
                            "protocol": {"runs": 3, "iterations": 100, "population": 50}})
    rows = run_sweep(SweepPlan(), cfg, tmp_path)
    means = group_means(rows, "q")
    verdict(f"{len(rows)} rows; q=1 mean {means[1.0]:.4f} vs q=0.2 mean {means[0.2]:.4f}")
    assert len(rows) == 16
    assert means[1.0] < means[0.2]


@pytest.mark.criterion(9)
def test_c09_determinism(verdict, tmp_path):
    cfg = config_from_dict({**SONAR_PROTOCOL, "optimizers": ["MFO", "LMFO6", "PSO"],
                            "protocol": {"runs": 3, "iterations": 20, "population": 20, "base_seed": 11}})
    run_experiment(cfg, tmp_path / "a")
    run_experiment(cfg, tmp_path / "b")
    compared = 0
    for path in sorted((tmp_path / "a").rglob("*")):
        if path.is_dir():
            continue
        twin = tmp_path / "b" / path.relative_to(tmp_path / "a")
        if path.suffix == ".meta":
            left, right = read_kv(path), read_kv(twin)
            left.pop("wall_ms"), right.pop("wall_ms")
            assert left == right, path.name
        else:
            assert path.read_bytes() == twin.read_bytes(), path.name
        compared += 1
    verdict(f"{compared} files identical")
    assert compared == 2 * 3 * 3 + 4


@pytest.mark.criterion(10)
def test_c10_codec_and_loss(verdict):
    rng = np.random.default_rng(10)
    for _ in range(200):
        n, h, m = (int(v) for v in rng.integers(1, 16, 3))
        spec = NetworkSpec(n, h, m)
        assert encode(spec) == n * h + h + h * m
        assert decode_forward(spec, rng.normal(size=encode(spec)), rng.normal(size=(3, n))).shape == (3, m)
    for _ in range(200):
        rows, cols = (int(v) for v in rng.integers(1, 20, 2))
        o = rng.uniform(-1, 1, (rows, cols))
        d = rng.choice([-1.0, 1.0], (rows, cols))
        assert loss(d, d) == 0.0
        perm = rng.permutation(rows)
        assert loss(o[perm], d[perm]) == pytest.approx(loss(o, d), rel=1e-12)
    spot = (loss(np.ones((4, 1)), np.zeros((4, 1))), loss([[3.0]], [[1.0]]))
    verdict(f"200 specs, 200 batches; spot values {spot[0]:.3g} and {spot[1]:.3g}")
    assert spot == (pytest.approx(0.5), pytest.approx(1.0))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 200), st.integers(1, 400))
def test_schedule_shape_across_budgets(n, T):
    ks = [flame_count(n, l, T) for l in range(1, T + 1)]
    assert all(1 <= k <= n for k in ks)
    assert all(a >= b for a, b in zip(ks, ks[1:]))
    assert ks[-1] == 1


@pytest.mark.slow
@pytest.mark.criterion(11)
def test_c11_timing_parity(verdict, tmp_path):
    cfg = config_from_dict({**SONAR_PROTOCOL,
                            "optimizers": ["MFO"] + [k.lmfo_name for k in SpiralKind],
                            "protocol": {"iterations": 100, "population": 30}})
    rows = run_timing(cfg, tmp_path, repeats=5)
    train = {r.model: r.wall_ms for r in rows if r.phase == "train"}
    spread = {k: v / train["MFO"] - 1 for k, v in train.items() if k != "MFO"}
    worst = max(spread, key=lambda k: abs(spread[k]))
    verdict(f"MFO {train['MFO']:.0f} ms; largest deviation {worst} {spread[worst]:+.1%}")
    assert all(abs(v) <= 0.25 for v in spread.values()), spread
