"""Repeated-run statistics: mean/std summaries and the rank-sum test."""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.stats import rankdata

EXACT_MAX_TOTAL = 16
SIGNIFICANCE = 0.05


def ave_std(samples) -> tuple[float, float]:
    """Mean and sample standard deviation (divisor ``n - 1``).

    A single sample yields ``std = 0`` with a ``RuntimeWarning``.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("ave_std of an empty sample")
    if x.size == 1:
        warnings.warn("single sample: std reported as 0", RuntimeWarning, stacklevel=2)
        return float(x[0]), 0.0
    return float(np.mean(x)), float(np.std(x, ddof=1))


def ranksum_p(a, b) -> float:
    """Two-sided Wilcoxon rank-sum (Mann-Whitney) p-value.

    Ties get midranks. Up to ``EXACT_MAX_TOTAL`` pooled observations the
    null distribution is enumerated exactly over all group assignments;
    beyond that a tie-corrected normal approximation with continuity
    correction is used.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("ranksum_p needs two non-empty samples")
    n1, n2 = a.size, b.size
    n = n1 + n2
    # doubled midranks are integers, so comparisons below are exact
    ranks2 = np.rint(2 * rankdata(np.concatenate([a, b]))).astype(np.int64)
    w2 = int(ranks2[:n1].sum())
    mean2 = n1 * (n + 1)  # twice the null mean of the rank sum

    if n <= EXACT_MAX_TOTAL:
        idx = np.array(list(combinations(range(n), n1)), dtype=np.int64)
        sums2 = ranks2[idx].sum(axis=1)
        extreme = np.abs(sums2 - mean2) >= abs(w2 - mean2)
        return float(min(1.0, extreme.mean()))

    _, counts = np.unique(ranks2, return_counts=True)
    tie_term = float(np.sum(counts**3 - counts)) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return 1.0
    dev = max(abs(w2 - mean2) / 2.0 - 0.5, 0.0)
    z = dev / math.sqrt(var)
    return float(min(1.0, math.erfc(z / math.sqrt(2.0))))


@dataclass
class RunBatch:
    algorithm: str
    final_losses: list
    classification_rates: list = field(default_factory=list)
    curves: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.final_losses) < 1:
            raise ValueError("a run batch needs at least one run")
        for name in ("classification_rates", "curves"):
            values = getattr(self, name)
            if values and len(values) != len(self.final_losses):
                raise ValueError(f"{name} length differs from final_losses")
        losses = np.asarray(self.final_losses, dtype=float)
        if not np.all(np.isfinite(losses)) or np.any(losses < 0):
            raise ValueError("final losses must be finite and non-negative")


@dataclass
class ReportRow:
    algorithm: str
    ave: float
    std: float
    p_value: float | None
    classification_rate: float | None

    @property
    def significant(self) -> bool:
        return self.p_value is not None and self.p_value <= SIGNIFICANCE


@dataclass
class ComparisonReport:
    reference: str
    rows: list[ReportRow]

    def row(self, algorithm: str) -> ReportRow:
        for r in self.rows:
            if r.algorithm == algorithm:
                return r
        raise KeyError(algorithm)

    @property
    def best(self) -> ReportRow:
        return min(self.rows, key=lambda r: r.ave)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["algorithm", "mse_ave", "mse_std", "p_value", "classification_rate"])
        for r in self.rows:
            writer.writerow([
                r.algorithm,
                repr(r.ave),
                repr(r.std),
                "N/A" if r.p_value is None else repr(r.p_value),
                "" if r.classification_rate is None else repr(r.classification_rate),
            ])
        return buf.getvalue()

    def to_text(self) -> str:
        """Plain-text table; the lowest average loss is wrapped in ``**``."""
        best = self.best.algorithm
        lines = [f"{'algorithm':<10} {'AVE':>12} {'STD':>12} {'P':>10} {'rate %':>9}"]
        for r in self.rows:
            ave = f"{r.ave:.6g}"
            if r.algorithm == best:
                ave = f"**{ave}**"
            p = "N/A" if r.p_value is None else f"{r.p_value:.3g}" + ("*" if r.significant else "")
            rate = "" if r.classification_rate is None else f"{r.classification_rate:.4f}"
            lines.append(f"{r.algorithm:<10} {ave:>12} {r.std:>12.3g} {p:>10} {rate:>9}")
        return "\n".join(lines)


def build_report(batches: list[RunBatch], reference: str) -> ComparisonReport:
    """Summarize each batch and test its losses against ``reference``."""
    by_name = {b.algorithm: b for b in batches}
    if reference not in by_name:
        raise KeyError(f"reference algorithm {reference!r} not among batches")
    ref_losses = by_name[reference].final_losses
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for b in batches:
            ave, std = ave_std(b.final_losses)
            p = None if b.algorithm == reference else ranksum_p(b.final_losses, ref_losses)
            rate = float(np.mean(b.classification_rates)) if b.classification_rates else None
            rows.append(ReportRow(b.algorithm, ave, std, p, rate))
    return ComparisonReport(reference, rows)
