"""Spiral radius functions used to shape the moth position update.

Each kernel maps a trajectory parameter ``t`` (used directly as the polar
angle) to a radial envelope ``S(t)``. The optimizer multiplies the
moth-flame distance by ``S(t) * cos(2*pi*t)``.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .exceptions import DegenerateKernelError, DomainError

LITUUS_EPS = 1e-6


class SpiralKind(enum.Enum):
    ARCHIMEDEAN = "archimedean"
    LOGARITHMIC = "logarithmic"
    FERMAT = "fermat"
    LITUUS = "lituus"
    EQUIANGULAR = "equiangular"
    RANDOM = "random"

    @property
    def lmfo_index(self) -> int:
        return _LMFO_ORDER.index(self) + 1

    @property
    def lmfo_name(self) -> str:
        return f"LMFO{self.lmfo_index}"

    @classmethod
    def from_lmfo(cls, name: str) -> "SpiralKind":
        """Look up a kind by its ``LMFO<k>`` name (case-insensitive)."""
        key = name.strip().upper()
        for kind in _LMFO_ORDER:
            if kind.lmfo_name == key:
                return kind
        raise KeyError(f"unknown LMFO variant {name!r}")


_LMFO_ORDER = (
    SpiralKind.ARCHIMEDEAN,
    SpiralKind.LOGARITHMIC,
    SpiralKind.FERMAT,
    SpiralKind.LITUUS,
    SpiralKind.EQUIANGULAR,
    SpiralKind.RANDOM,
)


@dataclass(frozen=True)
class SpiralKernel:
    """A spiral family plus its shape constant ``q``.

    ``fermat_standard`` switches the Fermat row from the literal
    ``r = |q|**t`` to the textbook ``r = q*sqrt(|t|)*sign(t)``.
    """

    kind: SpiralKind = SpiralKind.EQUIANGULAR
    q: float = 1.0
    lituus_eps: float = LITUUS_EPS
    fermat_standard: bool = False

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", SpiralKind(self.kind.lower()))
        if not math.isfinite(self.q):
            raise DomainError(f"spiral constant q must be finite, got {self.q}")
        if not self.lituus_eps > 0:
            raise DomainError("lituus_eps must be positive")

    @property
    def name(self) -> str:
        return self.kind.lmfo_name


def radial_envelope(kernel: SpiralKernel, t, rng: np.random.Generator | None = None):
    """Evaluate ``S(t)`` for a scalar or an array of trajectory parameters.

    Only the Random kernel consumes ``rng``; it draws one uniform ``u`` per
    element of ``t``. Returns a float for scalar input, otherwise an array.
    """
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("trajectory parameter t must be finite")

    kind, q = kernel.kind, kernel.q
    with np.errstate(over="ignore"):
        if kind is SpiralKind.ARCHIMEDEAN:
            s = q * t
        elif kind is SpiralKind.LOGARITHMIC:
            s = np.power(10.0, q * t)
        elif kind is SpiralKind.FERMAT:
            if kernel.fermat_standard:
                s = q * np.sqrt(np.abs(t)) * np.sign(t)
            else:
                if q == 0:
                    raise DegenerateKernelError("Fermat kernel with q=0 has zero radius")
                s = np.power(abs(q), t)
        elif kind is SpiralKind.LITUUS:
            if q == 0:
                raise DegenerateKernelError("Lituus kernel with q=0 has zero radius")
            s = q / np.sqrt(np.maximum(np.abs(t), kernel.lituus_eps))
        elif kind is SpiralKind.EQUIANGULAR:
            s = np.exp(q * t)
        elif kind is SpiralKind.RANDOM:
            if rng is None:
                raise ValueError("the Random kernel needs a random generator")
            u = rng.random(t.shape)
            s = u * t
        else:  # pragma: no cover
            raise ValueError(f"unsupported spiral kind {kind}")

    if scalar:
        return float(s)
    return np.asarray(s, dtype=float)


def trace_spiral(
    kernel: SpiralKernel,
    t_samples: Sequence[float],
    rng: np.random.Generator | None = None,
) -> list[tuple[float, float]]:
    """Planar points ``(S(t) cos 2pi t, S(t) sin 2pi t)`` for each sample."""
    t = np.asarray(t_samples, dtype=float)
    if t.size and not np.all(np.isfinite(t)):
        raise DomainError("trajectory samples must be finite")
    if t.size > 1 and np.any(np.diff(t) < 0):
        raise DomainError("trajectory samples must be sorted ascending")
    if t.size == 0:
        return []
    s = radial_envelope(kernel, t, rng)
    angle = 2.0 * np.pi * t
    x = s * np.cos(angle)
    y = s * np.sin(angle)
    return [(float(a), float(b)) for a, b in zip(x, y)]


def write_trace_csv(path, kernel: SpiralKernel, t_samples, rng=None) -> Path:
    """Write a ``t,x,y`` CSV for external plotting."""
    path = Path(path)
    points = trace_spiral(kernel, t_samples, rng)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "x", "y"])
        for t, (x, y) in zip(t_samples, points):
            writer.writerow([repr(float(t)), repr(x), repr(y)])
    return path
