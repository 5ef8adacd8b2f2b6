"""Spearman rank correlation, its p-value, and percentile-bootstrap intervals."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.stats import rankdata
from scipy.stats import t as student_t

from ._rng import derive_rng

__all__ = [
    "UndefinedCorrelationError",
    "BootstrapCI",
    "CorrelationReport",
    "spearman",
    "spearman_pvalue",
    "bootstrap_ci",
    "percentile",
    "correlation_report",
    "EXACT_PVALUE_BELOW",
]

# below this sample size p-values come from the exact permutation distribution
EXACT_PVALUE_BELOW = 10
_MAX_REDRAWS = 10
_CHUNK_ELEMS = 2_000_000


class UndefinedCorrelationError(ValueError):
    pass


def _pearson_rows(rx: np.ndarray, ry: np.ndarray) -> np.ndarray:
    """Row-wise Pearson correlation; NaN where either row is constant."""
    cx = rx - rx.mean(axis=-1, keepdims=True)
    cy = ry - ry.mean(axis=-1, keepdims=True)
    num = np.sum(cx * cy, axis=-1)
    den = np.sqrt(np.sum(cx * cx, axis=-1) * np.sum(cy * cy, axis=-1))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = num / den
    r = np.where(den > 0, r, np.nan)
    return np.clip(r, -1.0, 1.0)


def spearman(x, y) -> float:
    """Pearson correlation of average ranks (ties share the mean rank)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D and the same length")
    if len(x) < 3:
        raise ValueError("need at least 3 observations")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("inputs must be finite")
    r = float(_pearson_rows(rankdata(x), rankdata(y)))
    if math.isnan(r):
        raise UndefinedCorrelationError("one input has constant ranks; correlation is undefined")
    return r


@lru_cache(maxsize=None)
def _null_rhos(n: int) -> np.ndarray:
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    d = perms - np.arange(n)
    return 1.0 - 6.0 * np.sum(d * d, axis=1) / (n * (n * n - 1))


def spearman_pvalue(rho: float, n: int) -> float:
    """Two-sided p-value for ``rho`` at sample size ``n``.

    ``|rho| = 1`` gives 0.  For ``n < 10`` the exact null distribution
    (all ``n!`` rank permutations, no ties) is enumerated; otherwise the
    t approximation ``t = rho * sqrt((n-2)/(1-rho^2))`` with ``n-2`` degrees
    of freedom is used.
    """
    if n < 4:
        raise ValueError("need n >= 4")
    rho = float(rho)
    if abs(rho) >= 1.0:
        return 0.0
    if n < EXACT_PVALUE_BELOW:
        null = _null_rhos(n)
        return float(np.mean(np.abs(null) >= abs(rho) - 1e-12))
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return float(min(1.0, 2.0 * student_t.sf(abs(t), n - 2)))


def percentile(values, q: float) -> float:
    """Percentile ``q`` in [0, 100], linear between order statistics.

    With sorted values ``v[0..N-1]`` and ``h = (N-1) q / 100`` the result is
    ``v[floor(h)] + (h - floor(h)) * (v[floor(h)+1] - v[floor(h)])``.
    """
    return float(np.percentile(np.asarray(values, dtype=float), q, method="linear"))


@dataclass(frozen=True)
class BootstrapCI:
    low: float
    high: float
    resamples: np.ndarray = field(repr=False)
    skipped: int = 0

    def __iter__(self):
        return iter((self.low, self.high))


def bootstrap_ci(x, y, B: int = 1000, gamma: float = 0.95, seed: int = 0) -> BootstrapCI:
    """Percentile bootstrap interval for Spearman's rho over paired resamples.

    A resample whose ranks are constant in either variable is redrawn up to
    ten times and then dropped; ``skipped`` counts the dropped ones.
    Unpacks as ``(low, high)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    if n < 3 or len(y) != n:
        raise ValueError("need paired samples of size >= 3")
    if B < 100:
        raise ValueError("B must be at least 100")
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    rng = derive_rng(seed, "stats.bootstrap")
    idx = rng.integers(0, n, size=(B, n))
    rows = max(1, _CHUNK_ELEMS // n)
    rhos = np.concatenate([
        _pearson_rows(rankdata(x[idx[i:i + rows]], axis=1), rankdata(y[idx[i:i + rows]], axis=1))
        for i in range(0, B, rows)
    ])
    skipped = 0
    for b in np.flatnonzero(np.isnan(rhos)):
        for _ in range(_MAX_REDRAWS):
            j = rng.integers(0, n, size=n)
            r = _pearson_rows(rankdata(x[j]), rankdata(y[j]))
            if not np.isnan(r):
                rhos[b] = r
                break
        else:
            skipped += 1
    good = rhos[~np.isnan(rhos)]
    if len(good) == 0:
        raise UndefinedCorrelationError("every bootstrap resample had constant ranks")
    alpha = 100.0 * (1.0 - gamma) / 2.0
    return BootstrapCI(percentile(good, alpha), percentile(good, 100.0 - alpha), good, skipped)


@dataclass(frozen=True)
class CorrelationReport:
    measure: str
    rho: float
    ci_low: float
    ci_high: float
    p_value: float
    n: int
    bootstrap_B: int
    gamma: float
    seed: int
    skipped_resamples: int = 0
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def correlation_report(x, y, measure: str, B: int = 1000, gamma: float = 0.95, seed: int = 0, config: dict | None = None) -> CorrelationReport:
    rho = spearman(x, y)
    ci = bootstrap_ci(x, y, B=B, gamma=gamma, seed=seed)
    return CorrelationReport(
        measure=measure,
        rho=rho,
        ci_low=ci.low,
        ci_high=ci.high,
        p_value=spearman_pvalue(rho, len(x)),
        n=len(x),
        bootstrap_B=B,
        gamma=gamma,
        seed=seed,
        skipped_resamples=ci.skipped,
        config=dict(config or {}),
    )
