from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from persistick.core import Extremum, Kind, PersistentPair, decompose
from persistick.oracle import gen_random_walk
from persistick.spectrum import SizeHistogram, histogram, spectrum


def _pair(size: int) -> PersistentPair:
    return PersistentPair(Extremum(0, 0, Kind.MIN), Extremum(1, size, Kind.MAX))


class TestHistogram:
    def test_empty(self):
        h = histogram([])
        assert h.entries == {} and h.total_pairs == 0

    def test_counts_by_size(self):
        h = histogram([_pair(2), _pair(2), _pair(2), _pair(4)])
        assert h.entries == {2: 3, 4: 1}
        assert h.total_pairs == 4

    def test_accepts_decomposition_and_array(self):
        dec = decompose([5, 1, 4, 2, 6])
        assert histogram(dec).entries == {2: 1}
        assert histogram(np.array([2, 2, 4])).entries == {2: 2, 4: 1}
        with pytest.raises(TypeError):
            histogram(np.array([2.0, 4.0]))

    def test_count_sum_invariant(self):
        h = histogram([_pair(s) for s in [1, 1, 3, 5, 5, 5]])
        assert sum(h.entries.values()) == h.total_pairs
        assert 0 not in h.entries.values()

    def test_arrays_sorted(self):
        h = SizeHistogram({5: 2, 1: 1, 3: 4}, 7)
        assert h.sizes().tolist() == [1, 3, 5]
        assert h.counts().tolist() == [1, 4, 2]


class TestSpectrum:
    def test_known_histogram(self):
        s = spectrum(SizeHistogram({2: 3, 4: 1}, 4))
        assert s.points == [(2, 12), (4, 8)]

    def test_empty(self):
        assert spectrum(SizeHistogram({}, 0)).points == []

    def test_singleton_sizes_lie_on_twice_size_line(self):
        s = spectrum(SizeHistogram({3: 1, 7: 1, 11: 1}, 3))
        assert all(val == 2 * m for m, val in s.points)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_sum_equals_paired_variation(self, seed):
        t, v = gen_random_walk(800, seed=seed, kind="gauss")
        dec = decompose(v, t)
        s = spectrum(histogram(dec))
        assert s.total() == dec.tv_total - dec.tv_top
        assert s.total() == dec.pair_variation()

    def test_points_ascending(self):
        s = spectrum(SizeHistogram({9: 1, 2: 5, 4: 2}, 8))
        ms = [m for m, _ in s.points]
        assert ms == sorted(ms)
