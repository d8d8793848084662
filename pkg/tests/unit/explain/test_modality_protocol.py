import numpy as np
import pytest

from fedsvg_runtime.application.errors import DegenerateSampleError, ShapeMismatchError, SpecValidationError
from fedsvg_runtime.domain.explain.modality_attention import case_modality_attention, modality_attention
from fedsvg_runtime.domain.explain.models import ModalityAttention
from fedsvg_runtime.domain.explain.protocol import (
    per_case_layer_correlation,
    run_protocol,
    trend_test,
)
from fedsvg_runtime.domain.model.attention import CaseAttention

P = 3
TOKENS = 1 + 4 * P


def test_uniform_rows_give_equal_modalities():
    rows = np.full((5, 2, 2, TOKENS), 1.0 / TOKENS)
    result = case_modality_attention(CaseAttention("c", rows))
    np.testing.assert_allclose(result.values, 1.0 / TOKENS)


def test_attention_spread_over_t2_only():
    rows = np.zeros((2, 1, 2, TOKENS))
    rows[..., 1 + 2 * P : 1 + 3 * P] = 1.0 / P
    result = case_modality_attention(CaseAttention("c", rows))
    assert result.at(0, "T2") == pytest.approx(1.0 / P)
    assert result.at(0, "T1") == result.at(0, "FLAIR") == 0.0
    assert result.delta(0) == pytest.approx(0.5 / P)


def test_reduction_matches_explicit_loops():
    rng = np.random.default_rng(0)
    rows = rng.dirichlet(np.ones(TOKENS), size=(4, 3, 2))
    result = case_modality_attention(CaseAttention("c", rows))
    n_nodes, n_layers, n_heads, _ = rows.shape
    for layer in range(n_layers):
        for m in range(4):
            total = 0.0
            for node in range(n_nodes):
                for head in range(n_heads):
                    total += sum(rows[node, layer, head, 1 + m * P + j] for j in range(P)) / P
            assert result.values[layer, m] == pytest.approx(total / (n_nodes * n_heads))


def test_token_count_must_split_into_modality_blocks():
    with pytest.raises(ShapeMismatchError):
        case_modality_attention(CaseAttention("c", np.ones((1, 1, 1, 12))))


def test_record_stream_reduction_and_coverage():
    rng = np.random.default_rng(1)
    cases = [CaseAttention(f"c{i}", rng.dirichlet(np.ones(TOKENS), size=(3, 2, 2))) for i in range(2)]
    records = [r for case in cases for r in case.records()]
    results = modality_attention(records, n_layers=2, n_heads=2)
    assert [r.case_id for r in results] == ["c0", "c1"]
    np.testing.assert_allclose(results[1].values, case_modality_attention(cases[1]).values)
    with pytest.raises(SpecValidationError):
        modality_attention(records[1:], n_layers=2, n_heads=2)


def random_cases(n_cases=6, n_layers=3, seed=0) -> list[ModalityAttention]:
    rng = np.random.default_rng(seed)
    return [ModalityAttention(f"case_{i:04d}", rng.dirichlet(np.ones(4), size=n_layers) / 4) for i in range(n_cases)]


def test_protocol_report_shape():
    report = run_protocol(random_cases())
    assert report.n_cases == 6
    assert report.n_layers == 3
    assert len(report.summary) == 3 * 4
    assert len(report.anova) == 3
    assert [c.bonferroni_m for c in report.group_contrast] == [3, 3, 3]
    assert len(report.pairwise) == 3 * 6
    assert all(c.bonferroni_m == 6 for c in report.pairwise)
    assert report.trend.note is None
    assert report.trend.df == 5
    assert len(report.correlation.per_case) + len(report.correlation.excluded) == 6


def test_identical_cases_are_reported_as_degenerate():
    values = np.array([[0.1, 0.2, 0.3, 0.4], [0.2, 0.2, 0.3, 0.3], [0.4, 0.1, 0.1, 0.4]])
    cases = [ModalityAttention(f"case_{i}", values) for i in range(3)]
    with pytest.raises(DegenerateSampleError, match="no trend detectable"):
        trend_test(cases)
    report = run_protocol(cases)
    assert report.trend.note == "no trend detectable"
    assert all(c.p is None and c.note for c in report.pairwise)
    assert all(a.f is None and a.p == 0.0 for a in report.anova)


def test_increasing_contrast_correlates_with_depth():
    rows = [[0.3, 0.3, 0.2, 0.2], [0.25, 0.25, 0.25, 0.25], [0.2, 0.2, 0.3, 0.3]]
    cases = [ModalityAttention(f"c{i}", np.array(rows) + 0.01 * i) for i in range(3)]
    result = per_case_layer_correlation(cases)
    assert result.mean_r == pytest.approx(1.0)
    assert result.excluded == []


def test_protocol_needs_two_cases():
    with pytest.raises(SpecValidationError):
        run_protocol(random_cases(n_cases=1))
    with pytest.raises(SpecValidationError):
        run_protocol([])
