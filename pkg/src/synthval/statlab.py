"""Statistical validation suite.

Bootstrap percentile CI, Shapiro-Wilk normality, Mann-Whitney U (exact
where feasible, normal approximation with tie and continuity corrections
otherwise), ECDF percentile, 2x2 chi-square independence test, EMA update,
and a finite-difference gradient penalty for scalar fields.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import chi2 as chi2_dist
from scipy.stats import norm, rankdata

from ._swilk import swilk
from .errors import (DegenerateSampleError, FormatError, IngestError,
                     ValidationError)

_EXACT_MWU_LIMIT = 400  # enumerate the exact U distribution up to n*m pairs


@dataclass(frozen=True)
class MetricSeries:
    """Ordered (step, value) training-metric log."""

    points: list[tuple[int, float]]
    metric_name: str = "metric"

    def __post_init__(self):
        steps = [s for s, _ in self.points]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise ValidationError("steps must be strictly increasing")
        if any(not math.isfinite(v) for _, v in self.points):
            raise ValidationError("series values must be finite")

    def values(self) -> list[float]:
        return [v for _, v in self.points]

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class BootstrapResult:
    mean: float
    ci_low: float
    ci_high: float
    level: float
    resamples: int
    seed: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "ci_low": self.ci_low, "ci_high": self.ci_high,
                "level": self.level, "resamples": self.resamples, "seed": self.seed}


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    method: str
    df: int | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValidationError(f"p-value out of range: {self.p_value}")

    def to_dict(self) -> dict:
        out = {"statistic": self.statistic, "p_value": self.p_value, "method": self.method}
        if self.df is not None:
            out["df"] = self.df
        if self.details:
            out["details"] = dict(self.details)
        return out


@dataclass(frozen=True)
class ContingencyTable2x2:
    """Rows: (real_images, synthetic_images); columns: (correct, incorrect)."""

    counts: tuple[tuple[int, int], tuple[int, int]]
    row_labels: tuple[str, str] = ("real_images", "synthetic_images")
    col_labels: tuple[str, str] = ("correct", "incorrect")

    def __post_init__(self):
        flat = [c for row in self.counts for c in row]
        if any(c < 0 for c in flat):
            raise ValidationError("counts must be nonnegative")
        if sum(flat) < 1:
            raise ValidationError("grand total must be >= 1")

    def total(self) -> int:
        return sum(c for row in self.counts for c in row)


def read_series(path: str, metric_name: str = "metric") -> MetricSeries:
    """Parse a metric-log CSV with header ``step,value``."""
    if not os.path.exists(path):
        raise IngestError(f"series file not found: {path}")
    points = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["step", "value"]:
            raise FormatError(f"{path}: expected header 'step,value'")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise FormatError(f"{path}: line {lineno} has {len(row)} fields")
            try:
                points.append((int(row[0]), float(row[1])))
            except ValueError as exc:
                raise FormatError(f"{path}: line {lineno} does not parse") from exc
    if not points:
        raise FormatError(f"{path}: no data rows")
    return MetricSeries(points=points, metric_name=metric_name)


def tail_fraction(series: MetricSeries, fraction: float) -> MetricSeries:
    """Last ceil(fraction * len) points, order preserved."""
    if not 0.0 < fraction <= 1.0:
        raise ValidationError(f"fraction must be in (0, 1], got {fraction}")
    if len(series) == 0:
        raise ValidationError("series is empty")
    k = math.ceil(fraction * len(series))
    return MetricSeries(points=series.points[-k:], metric_name=series.metric_name)


def bootstrap_mean_ci(values, resamples: int = 2000, level: float = 0.95,
                      seed: int = 0) -> BootstrapResult:
    """Percentile bootstrap CI for the mean; deterministic for a fixed seed."""
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise ValidationError("values is empty")
    if resamples < 100:
        raise ValidationError(f"resamples must be >= 100, got {resamples}")
    if not 0.0 < level < 1.0:
        raise ValidationError(f"level must be in (0, 1), got {level}")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, x.size, size=(resamples, x.size))
    means = x[idx].mean(axis=1)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(means, [alpha, 1.0 - alpha])
    return BootstrapResult(mean=float(x.mean()), ci_low=float(lo), ci_high=float(hi),
                           level=level, resamples=resamples, seed=seed)


def shapiro_wilk(values) -> TestResult:
    x = np.asarray(values, dtype=np.float64)
    w, p = swilk(x)
    return TestResult(statistic=w, p_value=p, method="shapiro-wilk-royston",
                      details={"n": float(x.size)})


def _exact_mwu_sf(n: int, m: int, u: float) -> float:
    """Two-sided exact p-value for U via the count-distribution recurrence.

    f(i, j, u) = f(i-1, j, u-j) + f(i, j-1, u): the largest remaining
    element is either an x (beating all j smaller y's) or a y.
    """
    max_u = n * m
    f = np.zeros((m + 1, max_u + 1), dtype=np.float64)
    f[:, 0] = 1.0
    for _ in range(1, n + 1):
        g = np.zeros_like(f)
        g[0, 0] = 1.0
        for j in range(1, m + 1):
            g[j, j:] = f[j, : max_u + 1 - j]
            g[j] += g[j - 1]
        f = g
    counts = f[m]
    total = counts.sum()
    u_round = int(round(u))
    lower = counts[: u_round + 1].sum() / total
    upper = counts[u_round:].sum() / total
    return min(1.0, 2.0 * min(lower, upper))


def mann_whitney_u(x, y) -> TestResult:
    """Two-sided Mann-Whitney U test; statistic is U for the first sample.

    Midranks handle ties. Exact enumeration when n*m <= 400 and the pooled
    sample has no ties; otherwise a normal approximation with tie and
    continuity corrections.
    """
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    n, m = xa.size, ya.size
    if n == 0 or m == 0:
        raise ValidationError("both samples must be non-empty")
    pooled = np.concatenate([xa, ya])
    ranks = rankdata(pooled)
    r_x = float(ranks[:n].sum())
    u_x = r_x - n * (n + 1) / 2.0

    _, tie_counts = np.unique(pooled, return_counts=True)
    has_ties = np.any(tie_counts > 1)

    if not has_ties and n * m <= _EXACT_MWU_LIMIT:
        p = _exact_mwu_sf(n, m, u_x)
        method = "mann-whitney-u-exact"
    else:
        nm = n + m
        tie_term = float(np.sum(tie_counts ** 3 - tie_counts)) / (nm * (nm - 1))
        var = n * m / 12.0 * ((nm + 1) - tie_term)
        if var <= 0.0:
            p = 1.0
        else:
            num = max(abs(u_x - n * m / 2.0) - 0.5, 0.0)
            p = min(1.0, 2.0 * norm.sf(num / math.sqrt(var)))
        method = "mann-whitney-u-normal"
    return TestResult(statistic=float(u_x), p_value=float(p), method=method,
                      details={"n": float(n), "m": float(m), "u_other": float(n * m - u_x)})


def ecdf_percentile(values, query: float) -> float:
    """Right-continuous empirical CDF: fraction of values <= query."""
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise ValidationError("values is empty")
    return float(np.count_nonzero(x <= query)) / x.size


def chi_square_2x2(table: ContingencyTable2x2, yates: bool = False) -> TestResult:
    """Chi-square test of independence on a 2x2 table, df = 1."""
    obs = np.asarray(table.counts, dtype=np.float64)
    row = obs.sum(axis=1, keepdims=True)
    col = obs.sum(axis=0, keepdims=True)
    total = obs.sum()
    if np.any(row == 0) or np.any(col == 0):
        raise DegenerateSampleError("a zero marginal makes expected counts zero")
    expected = row @ col / total
    adj = 0.5 if yates else 0.0
    stat = float(np.sum((np.abs(obs - expected) - adj).clip(min=0.0) ** 2 / expected))
    p = float(chi2_dist.sf(stat, 1))
    details = {f"expected_{i}{j}": float(expected[i, j]) for i in range(2) for j in range(2)}
    return TestResult(statistic=stat, p_value=p, df=1,
                      method="chi-square-2x2" + ("-yates" if yates else ""), details=details)


def ema_update(current, incoming, beta: float):
    """Elementwise beta * current + (1 - beta) * incoming."""
    if not 0.0 <= beta <= 1.0:
        raise ValidationError(f"beta must be in [0, 1], got {beta}")
    cur = np.asarray(current, dtype=np.float64)
    inc = np.asarray(incoming, dtype=np.float64)
    if cur.shape != inc.shape:
        raise ValidationError(f"shape mismatch: {cur.shape} vs {inc.shape}")
    return beta * cur + (1.0 - beta) * inc


def r1_penalty(field_fn: Callable[[np.ndarray], float], samples,
               gamma: float = 8.0, fd_step: float = 1e-4) -> float:
    """(gamma/2) * mean ||grad field||^2 with central finite differences."""
    pts = [np.asarray(s, dtype=np.float64) for s in samples]
    if not pts:
        raise ValidationError("samples is empty")
    if fd_step <= 0:
        raise ValidationError(f"fd_step must be > 0, got {fd_step}")
    grad_sq = []
    for p in pts:
        g = np.zeros_like(p)
        for i in range(p.size):
            e = np.zeros_like(p)
            e[i] = fd_step
            hi = field_fn(p + e)
            lo = field_fn(p - e)
            if not (math.isfinite(hi) and math.isfinite(lo)):
                raise ValidationError("field evaluated to a non-finite value")
            g[i] = (hi - lo) / (2.0 * fd_step)
        grad_sq.append(float(g @ g))
    return gamma / 2.0 * float(np.mean(grad_sq))
