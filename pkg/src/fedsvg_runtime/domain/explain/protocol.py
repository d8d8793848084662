"""Case-level statistical protocol over modality attention."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from fedsvg_runtime.domain.common.errors import DegenerateSampleError, SpecValidationError
from fedsvg_runtime.domain.explain.hypothesis import (
    bonferroni,
    cohens_d_paired,
    one_sample_ttest,
    one_way_anova,
    paired_ttest,
    pearson_r,
)
from fedsvg_runtime.domain.explain.models import (
    HIGH_CONTRAST,
    LOW_CONTRAST,
    AnovaEntry,
    ContrastEntry,
    CorrelationEntry,
    ModalityAttention,
    ModalitySummary,
    StatReport,
    TrendEntry,
)
from fedsvg_runtime.domain.volume_forge.config import MODALITIES

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrendResult:
    mean_difference: float
    t: float
    df: int
    p: float
    d: float


@dataclass(frozen=True)
class CorrelationResult:
    per_case: dict[str, float]
    excluded: list[str]
    mean_r: Optional[float]


def _check_layers(cases: Sequence[ModalityAttention], minimum: int) -> int:
    if not cases:
        raise SpecValidationError("cases", "no modality attention")
    n_layers = cases[0].n_layers
    if any(c.n_layers != n_layers for c in cases):
        raise SpecValidationError("cases", "cases differ in layer count")
    if n_layers < minimum:
        raise SpecValidationError("cases", f"need at least {minimum} layers, got {n_layers}")
    return n_layers


def trend_test(cases: Sequence[ModalityAttention], first: int = 0, last: int = -1) -> TrendResult:
    """Paired t-test of the high-minus-low contrast at ``last`` against ``first`` across cases."""
    if len(cases) < 2:
        raise SpecValidationError("cases", "trend test needs at least two cases")
    n_layers = _check_layers(cases, 2)
    last = last % n_layers
    late = [c.delta(last) for c in cases]
    early = [c.delta(first) for c in cases]
    try:
        result = paired_ttest(late, early)
        d = cohens_d_paired(late, early)
    except DegenerateSampleError as exc:
        raise DegenerateSampleError("no trend detectable") from exc
    return TrendResult(result.mean_difference, result.t, result.df, result.p, d)


def per_case_layer_correlation(cases: Sequence[ModalityAttention]) -> CorrelationResult:
    """Pearson r between layer index and the per-layer contrast, per case."""
    n_layers = _check_layers(cases, 3)
    depth = np.arange(n_layers, dtype=np.float64)
    per_case: dict[str, float] = {}
    excluded: list[str] = []
    for case in cases:
        deltas = [case.delta(layer) for layer in range(n_layers)]
        try:
            per_case[case.case_id] = pearson_r(depth, deltas)
        except DegenerateSampleError:
            excluded.append(case.case_id)
    if excluded:
        logger.warning("excluded %d cases with constant contrast across layers", len(excluded))
    mean_r = float(np.mean(list(per_case.values()))) if per_case else None
    return CorrelationResult(per_case=per_case, excluded=excluded, mean_r=mean_r)


def _contrast(
    layer: int, first: str, second: str, a: Sequence[float], b: Sequence[float], m: int
) -> ContrastEntry:
    try:
        result = paired_ttest(a, b)
        d = cohens_d_paired(a, b)
    except DegenerateSampleError as exc:
        return ContrastEntry(
            layer=layer,
            first=first,
            second=second,
            mean_difference=None,
            t=None,
            df=None,
            p=None,
            p_bonferroni=None,
            bonferroni_m=m,
            cohens_d=None,
            note=str(exc),
        )
    return ContrastEntry(
        layer=layer,
        first=first,
        second=second,
        mean_difference=result.mean_difference,
        t=result.t,
        df=result.df,
        p=result.p,
        p_bonferroni=bonferroni(result.p, m),
        bonferroni_m=m,
        cohens_d=d,
    )


def _trend_entry(cases: Sequence[ModalityAttention], n_layers: int) -> TrendEntry:
    last = n_layers - 1
    if n_layers < 2:
        return TrendEntry(
            first_layer=0,
            last_layer=last,
            mean_difference=None,
            t=None,
            df=None,
            p=None,
            cohens_d=None,
            note="single layer",
        )
    try:
        trend = trend_test(cases)
    except DegenerateSampleError as exc:
        return TrendEntry(
            first_layer=0,
            last_layer=last,
            mean_difference=None,
            t=None,
            df=None,
            p=None,
            cohens_d=None,
            note=str(exc),
        )
    return TrendEntry(
        first_layer=0,
        last_layer=last,
        mean_difference=trend.mean_difference,
        t=trend.t,
        df=trend.df,
        p=trend.p,
        cohens_d=trend.d,
    )


def layer_values(cases: Sequence[ModalityAttention], layer: int, modality: str) -> list[float]:
    return [c.at(layer, modality) for c in cases]


def run_protocol(cases: Sequence[ModalityAttention]) -> StatReport:
    """Summary, per-layer ANOVA, group and pairwise contrasts, trend test and correlation."""
    n_layers = _check_layers(cases, 1)
    if len(cases) < 2:
        raise SpecValidationError("cases", "the protocol needs at least two cases")

    summary = [
        ModalitySummary(
            layer=layer,
            modality=m,
            mean=float(np.mean(layer_values(cases, layer, m))),
            sd=float(np.std(layer_values(cases, layer, m), ddof=1)),
        )
        for layer in range(n_layers)
        for m in MODALITIES
    ]

    anova = []
    for layer in range(n_layers):
        result = one_way_anova([layer_values(cases, layer, m) for m in MODALITIES])
        anova.append(
            AnovaEntry(
                layer=layer,
                f=result.f if math.isfinite(result.f) else None,
                p=result.p,
                df_between=result.df_between,
                df_within=result.df_within,
            )
        )

    high_name, low_name = "+".join(HIGH_CONTRAST), "+".join(LOW_CONTRAST)
    group_contrast = []
    for layer in range(n_layers):
        high = [np.mean([c.at(layer, m) for m in HIGH_CONTRAST]) for c in cases]
        low = [np.mean([c.at(layer, m) for m in LOW_CONTRAST]) for c in cases]
        group_contrast.append(_contrast(layer, high_name, low_name, high, low, n_layers))

    pairs = list(itertools.combinations(MODALITIES, 2))
    pairwise = [
        _contrast(
            layer, a, b, layer_values(cases, layer, a), layer_values(cases, layer, b), len(pairs)
        )
        for layer in range(n_layers)
        for a, b in pairs
    ]

    trend_entry = _trend_entry(cases, n_layers)

    if n_layers >= 3:
        correlation = per_case_layer_correlation(cases)
        r_test = None
        if len(correlation.per_case) >= 2:
            try:
                r_test = one_sample_ttest(list(correlation.per_case.values()))
            except DegenerateSampleError:
                r_test = None
        correlation_entry = CorrelationEntry(
            per_case=correlation.per_case,
            excluded=correlation.excluded,
            mean_r=correlation.mean_r,
            t=r_test.t if r_test else None,
            p=r_test.p if r_test else None,
        )
    else:
        correlation_entry = CorrelationEntry(per_case={}, excluded=[], mean_r=None, t=None, p=None)

    return StatReport(
        n_cases=len(cases),
        n_layers=n_layers,
        modalities=list(MODALITIES),
        summary=summary,
        anova=anova,
        group_contrast=group_contrast,
        pairwise=pairwise,
        trend=trend_entry,
        correlation=correlation_entry,
    )
