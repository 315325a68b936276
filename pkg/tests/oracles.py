"""Independent reference computations used by the tests."""

from itertools import combinations
from math import comb


def u_statistic(a, b):
    """Mann-Whitney U by direct pairwise counting (ties count one half)."""
    u = 0.0
    for x in a:
        for y in b:
            if x > y:
                u += 1.0
            elif x == y:
                u += 0.5
    return u


def ranksum_exact_bruteforce(a, b):
    """Two-sided exact p-value by enumerating every relabelling of the pooled
    observations into groups of the original sizes."""
    pooled = list(a) + list(b)
    n1, n = len(a), len(pooled)
    centre = len(a) * len(b) / 2.0
    observed = abs(u_statistic(a, b) - centre)
    hits = 0
    total = 0
    for chosen in combinations(range(n), n1):
        picked = set(chosen)
        ga = [pooled[i] for i in chosen]
        gb = [pooled[i] for i in range(n) if i not in picked]
        if abs(u_statistic(ga, gb) - centre) >= observed - 1e-12:
            hits += 1
        total += 1
    assert total == comb(n, n1)
    return hits / total
