import itertools

import numpy as np

from fedsvg_runtime.domain.common.rng import SALT_CLIENT, SALT_VOLUME, substream
from fedsvg_runtime.domain.federation.local_training import round_generator


def test_consecutive_seeds_do_not_share_round_streams():
    a = round_generator(42, 0, 1).random(4)
    b = round_generator(43, 0, 0).random(4)
    assert not np.array_equal(a, b)


def test_round_streams_are_distinct_across_seeds_clients_and_rounds():
    draws = {
        (seed, client, rnd): tuple(round_generator(seed, client, rnd).random(2))
        for seed, client, rnd in itertools.product(range(40, 46), range(4), range(8))
    }
    assert len(set(draws.values())) == len(draws)


def test_volume_streams_are_distinct_across_seeds_and_indices():
    draws = {
        (seed, index): tuple(substream(seed, index, salt=SALT_VOLUME).random(2))
        for seed, index in itertools.product(range(6), range(6))
    }
    assert len(set(draws.values())) == len(draws)


def test_salts_separate_streams_of_the_same_key():
    a = substream(7, 0, salt=SALT_VOLUME).random(3)
    b = substream(7, 0, salt=SALT_CLIENT).random(3)
    assert not np.array_equal(a, b)


def test_streams_are_reproducible():
    a = round_generator(11, 2, 5).random(5)
    b = round_generator(11, 2, 5).random(5)
    np.testing.assert_array_equal(a, b)
