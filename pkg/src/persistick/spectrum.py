"""Movement-size histogram and the variation spectrum built from it.

Each completed pair of size m contributes exactly 2*m to the total
variation of its series, so the spectrum S(m) = 2 * count(m) * m measures
how much of the variation travels in movements of each size.  Summed over
all sizes it reproduces tv_total - tv_top exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import Decomposition, PersistentPair

__all__ = ["SizeHistogram", "Spectrum", "histogram", "spectrum"]


@dataclass(frozen=True)
class SizeHistogram:
    """Counts of completed movements by integer size; zero counts omitted."""

    entries: dict[int, int]
    total_pairs: int

    def sizes(self) -> np.ndarray:
        return np.fromiter(sorted(self.entries), dtype=np.int64, count=len(self.entries))

    def counts(self) -> np.ndarray:
        return np.fromiter(
            (self.entries[m] for m in sorted(self.entries)),
            dtype=np.int64,
            count=len(self.entries),
        )


@dataclass(frozen=True)
class Spectrum:
    """(size, 2 * count * size) points, ascending in size."""

    points: list[tuple[int, int]]

    def total(self) -> int:
        return sum(s for _, s in self.points)


def histogram(
    pairs: Decomposition | Iterable[PersistentPair] | np.ndarray,
) -> SizeHistogram:
    """Count completed movements by size.

    Accepts a Decomposition, an iterable of pairs, or a bare integer array
    of sizes.
    """
    if isinstance(pairs, Decomposition):
        size_arr = pairs.sizes()
    elif isinstance(pairs, np.ndarray):
        if pairs.dtype.kind not in "iu":
            raise TypeError("sizes must be integers")
        size_arr = pairs.astype(np.int64, copy=False)
    else:
        mat = list(pairs)
        size_arr = np.fromiter(
            (p.maximum.value - p.minimum.value for p in mat),
            dtype=np.int64,
            count=len(mat),
        )
    if size_arr.size == 0:
        return SizeHistogram({}, 0)
    uniq, counts = np.unique(size_arr, return_counts=True)
    entries = dict(zip(uniq.tolist(), counts.tolist()))
    return SizeHistogram(entries, int(size_arr.size))


def spectrum(h: SizeHistogram) -> Spectrum:
    """Variation spectrum of a histogram: S(m) = 2 * count(m) * m."""
    pts = [(m, 2 * h.entries[m] * m) for m in sorted(h.entries)]
    return Spectrum(pts)
