import pytest
from pydantic import ValidationError

from fedsvg_runtime.application.errors import SpecValidationError
from fedsvg_runtime.domain.federation.models import PartitionPlan
from fedsvg_runtime.domain.federation.partition import client_sizes, partition_dataset


def case_ids(n: int) -> list[str]:
    return [f"case_{i:04d}" for i in range(n)]


def test_client_sizes_follow_fractions():
    assert client_sizes(1251, (0.18, 0.22, 0.35, 0.25)) == [225, 275, 438, 313]


def test_equal_quarters():
    assert client_sizes(40, (0.25, 0.25, 0.25, 0.25)) == [10, 10, 10, 10]


def test_partition_covers_every_case_exactly_once():
    cases = case_ids(40)
    plan = PartitionPlan(fractions=(0.25, 0.25, 0.25, 0.25))
    splits = partition_dataset(cases, plan, seed=5)
    assigned = [c for split in splits for c in split.cases]
    assert sorted(assigned) == sorted(cases)
    assert len(set(assigned)) == len(assigned)
    for split in splits:
        assert len(split.cases) == 10
        assert not set(split.train) & set(split.test)
        assert len(split.train) == 8


def test_single_client_is_the_centralized_split():
    cases = case_ids(10)
    splits = partition_dataset(cases, PartitionPlan(fractions=(1.0,)), seed=1)
    assert len(splits) == 1
    assert len(splits[0].train) == 8
    assert len(splits[0].test) == 2
    assert sorted(splits[0].cases) == cases


def test_partition_is_deterministic_for_a_seed():
    cases = case_ids(30)
    plan = PartitionPlan()
    assert partition_dataset(cases, plan, seed=9) == partition_dataset(cases, plan, seed=9)


def test_small_client_keeps_a_test_case():
    splits = partition_dataset(case_ids(12), PartitionPlan(), seed=2)
    assert [len(s.cases) for s in splits] == [2, 3, 4, 3]
    assert all(len(s.test) >= 1 for s in splits)
    assert all(len(s.train) >= 1 for s in splits)


def test_fewer_cases_than_clients_rejected():
    with pytest.raises(SpecValidationError):
        partition_dataset(case_ids(3), PartitionPlan(), seed=0)


def test_empty_client_rejected():
    with pytest.raises(SpecValidationError):
        client_sizes(3, (0.1, 0.9))


def test_fractions_must_sum_to_one():
    with pytest.raises(ValidationError):
        PartitionPlan(fractions=(0.5, 0.4))
    with pytest.raises(ValidationError):
        PartitionPlan(fractions=(1.5, -0.5))
