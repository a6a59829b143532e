from __future__ import annotations

import numpy as np
import pytest

from persistick.core import Decomposer, Decomposition, Sample


def stream_decompose(values, times=None) -> Decomposition:
    """Push values one by one through a Decomposer and finish."""
    d = Decomposer()
    ts = range(len(values)) if times is None else times
    for t, v in zip(ts, values):
        d.push(Sample(t, v))
    return d.finish()


def pair_tuples(dec: Decomposition) -> list[tuple[int, int, int, int]]:
    return [
        (p.minimum.time, p.minimum.value, p.maximum.time, p.maximum.value)
        for p in dec.pairs
    ]


def top_tuples(dec: Decomposition) -> list[tuple[int, int, int]]:
    return [(e.time, e.value, int(e.kind)) for e in dec.top.extrema]


def assert_same_decomposition(a: Decomposition, b: Decomposition) -> None:
    assert pair_tuples(a) == pair_tuples(b)
    assert top_tuples(a) == top_tuples(b)
    assert a.top.pending == b.top.pending
    assert a.tv_total == b.tv_total
    assert a.tv_top == b.tv_top


def assert_equivalent_decomposition(a: Decomposition, b: Decomposition) -> None:
    """Same pairs regardless of emission order, same top, same variation."""
    assert sorted(pair_tuples(a)) == sorted(pair_tuples(b))
    assert top_tuples(a) == top_tuples(b)
    assert a.top.pending == b.top.pending
    assert a.tv_total == b.tv_total
    assert a.tv_top == b.tv_top


def assert_conserved(dec: Decomposition) -> None:
    assert dec.tv_total == dec.tv_top + dec.pair_variation()


@pytest.fixture
def reference_series() -> tuple[np.ndarray, np.ndarray]:
    values = np.array([3, 6, 0, 7, 2, 5, 4, 8], dtype=np.int64)
    times = np.arange(8, dtype=np.int64)
    return times, values
