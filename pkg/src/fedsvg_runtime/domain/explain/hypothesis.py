from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from fedsvg_runtime.domain.common.errors import DegenerateSampleError, SpecValidationError
from fedsvg_runtime.domain.explain.distributions import f_sf, t_two_sided_p


@dataclass(frozen=True)
class AnovaResult:
    f: float
    p: float
    df_between: int
    df_within: int


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p: float
    mean_difference: float


def one_way_anova(groups: Sequence[Sequence[float]]) -> AnovaResult:
    if len(groups) < 2:
        raise SpecValidationError("groups", "need at least two groups")
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    if any(a.size < 2 for a in arrays):
        raise SpecValidationError("groups", "every group needs at least two values")
    grand = np.concatenate(arrays).mean()
    ss_between = float(sum(a.size * (a.mean() - grand) ** 2 for a in arrays))
    ss_within = float(sum(((a - a.mean()) ** 2).sum() for a in arrays))
    df_between = len(arrays) - 1
    df_within = int(sum(a.size for a in arrays)) - len(arrays)
    if ss_within == 0.0:
        if ss_between == 0.0:
            return AnovaResult(0.0, 1.0, df_between, df_within)
        return AnovaResult(math.inf, 0.0, df_between, df_within)
    f = (ss_between / df_between) / (ss_within / df_within)
    return AnovaResult(f, f_sf(f, df_between, df_within), df_between, df_within)


def _paired_differences(a: Sequence[float], b: Sequence[float]) -> np.ndarray:
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise SpecValidationError("b", f"paired samples differ in shape: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise SpecValidationError("a", "paired tests need at least two pairs")
    diffs = x - y
    if float(np.std(diffs)) == 0.0:
        raise DegenerateSampleError("degenerate paired sample")
    return diffs


def one_sample_ttest(values: Sequence[float], mu: float = 0.0) -> TTestResult:
    x = np.asarray(values, dtype=np.float64)
    if x.size < 2:
        raise SpecValidationError("values", "need at least two values")
    sd = float(np.std(x, ddof=1))
    if sd == 0.0:
        raise DegenerateSampleError("degenerate sample (zero variance)")
    n = x.size
    mean = float(x.mean()) - mu
    t = mean / (sd / math.sqrt(n))
    return TTestResult(t=t, df=n - 1, p=t_two_sided_p(t, n - 1), mean_difference=mean)


def paired_ttest(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Two-sided paired t-test of a - b."""
    diffs = _paired_differences(a, b)
    return one_sample_ttest(diffs)


def bonferroni(p: float, m: int) -> float:
    if m < 1:
        raise SpecValidationError("m", "number of comparisons must be >= 1")
    return min(1.0, m * p)


def cohens_d_paired(a: Sequence[float], b: Sequence[float]) -> float:
    """Mean paired difference over its sample standard deviation."""
    diffs = _paired_differences(a, b)
    return float(diffs.mean() / np.std(diffs, ddof=1))


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    u = np.asarray(x, dtype=np.float64)
    v = np.asarray(y, dtype=np.float64)
    if u.shape != v.shape or u.size < 2:
        raise SpecValidationError("y", "pearson needs two equal-length samples of size >= 2")
    du = u - u.mean()
    dv = v - v.mean()
    denominator = math.sqrt(float((du * du).sum()) * float((dv * dv).sum()))
    if denominator == 0.0:
        raise DegenerateSampleError("correlation undefined for a constant sample")
    return float((du * dv).sum() / denominator)
