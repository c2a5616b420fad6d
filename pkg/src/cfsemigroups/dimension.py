"""Hausdorff-dimension estimates from orbit growth.

The number of orbit vectors with sup norm at most N grows like
``C N^(2 delta)``, with delta the dimension of the limit set of the
generating semigroup.  Counting at a ladder of thresholds and fitting
``log count`` against ``log N`` by least squares estimates delta as
half the slope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .semigroups import GeneratorSet, orbit_norms
from .words import Vec2

__all__ = [
    "CountingSeries",
    "DimensionEstimate",
    "default_thresholds",
    "orbit_count",
    "estimate_dimension",
]


@dataclass(frozen=True)
class CountingSeries:
    """Orbit counts ``#{w : ||w v0||_inf <= T}`` over a threshold ladder."""

    label: str
    v0: tuple[int, int]
    thresholds: tuple[int, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.thresholds) != len(self.counts):
            raise ValueError("thresholds and counts must align")
        if list(self.thresholds) != sorted(set(self.thresholds)):
            raise ValueError("thresholds must be strictly increasing")


@dataclass(frozen=True)
class DimensionEstimate:
    delta: float
    stderr: float
    r_squared: float
    slope: float
    intercept: float
    points: int


def default_thresholds(nmax: int, points: int = 16, start: int = 100) -> tuple[int, ...]:
    """Geometric ladder of integer thresholds from start to nmax."""
    if nmax <= start:
        raise ValueError(f"nmax must exceed {start}")
    grid = np.unique(
        np.rint(np.geomspace(start, nmax, points)).astype(np.int64)
    )
    return tuple(int(t) for t in grid)


def orbit_count(
    g: GeneratorSet, v0: Vec2, thresholds: tuple[int, ...] | list[int]
) -> CountingSeries:
    """One orbit walk up to the largest threshold, counted at each rung."""
    thresholds = tuple(int(t) for t in thresholds)
    if not thresholds:
        raise ValueError("need at least one threshold")
    norms = orbit_norms(g, v0, thresholds[-1])
    counts = np.searchsorted(norms, np.asarray(thresholds), side="right")
    return CountingSeries(
        label=g.label,
        v0=(v0.x, v0.y),
        thresholds=thresholds,
        counts=tuple(int(c) for c in counts),
    )


def estimate_dimension(
    series: CountingSeries, drop_fraction: float = 0.2
) -> DimensionEstimate:
    """Least-squares slope of log count against log threshold, halved.

    The smallest ``drop_fraction`` of the rungs is dropped first: the
    power law is asymptotic and the small-threshold rungs bend the fit.
    The standard error is the usual OLS slope error, also halved; with
    fewer than three surviving rungs (or a zero count among them) the
    fit is refused.
    """
    if not 0 <= drop_fraction < 1:
        raise ValueError("drop_fraction must be in [0, 1)")
    skip = int(len(series.thresholds) * drop_fraction)
    ts = np.asarray(series.thresholds[skip:], dtype=float)
    cs = np.asarray(series.counts[skip:], dtype=float)
    if len(ts) < 3:
        raise ValueError("need at least 3 rungs after dropping")
    if np.any(cs <= 0):
        raise ValueError("zero counts in the fit range; raise thresholds")
    lx, ly = np.log(ts), np.log(cs)
    n = len(lx)
    mx, my = lx.mean(), ly.mean()
    sxx = float(np.sum((lx - mx) ** 2))
    slope = float(np.sum((lx - mx) * (ly - my)) / sxx)
    intercept = my - slope * mx
    resid = ly - (intercept + slope * lx)
    ssr = float(np.sum(resid ** 2))
    sst = float(np.sum((ly - my) ** 2))
    r2 = 1.0 if sst == 0 else 1.0 - ssr / sst
    se = float(np.sqrt(ssr / (n - 2) / sxx)) if n > 2 else float("nan")
    return DimensionEstimate(
        delta=slope / 2,
        stderr=se / 2,
        r_squared=r2,
        slope=slope,
        intercept=intercept,
        points=n,
    )
