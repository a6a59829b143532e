"""Windowed scaling-exponent estimates over a long series.

Each window is decomposed from scratch and fitted independently, so a
window's result equals a standalone fit of that sub-series and no state
leaks between windows.  Windows that cannot support a fit are marked, not
dropped, keeping the output grid regular.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import decompose
from .powerlaw import DEFAULT_MIN_TAIL, InsufficientTailError, PowerLawFit, fit

__all__ = ["WEEK_NS", "DAY_NS", "RollingConfig", "RollingPoint", "rolling_fit"]

DAY_NS = 24 * 3600 * 10**9
WEEK_NS = 7 * DAY_NS


@dataclass(frozen=True)
class RollingConfig:
    """Window geometry (nanoseconds) plus fit settings passed through."""

    window: int = 8 * WEEK_NS
    step: int = 2 * WEEK_NS
    min_tail: int = DEFAULT_MIN_TAIL
    xmin_range: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if self.step <= 0 or self.window <= 0:
            raise ValueError("window and step must be positive")
        if self.step > self.window:
            raise ValueError("step must not exceed window")


@dataclass(frozen=True)
class RollingPoint:
    window_end: int
    fit: PowerLawFit | None
    pair_count: int
    status: str = field(default="ok")


def rolling_fit(
    values: Sequence[int] | np.ndarray,
    times: Sequence[int] | np.ndarray,
    cfg: RollingConfig | None = None,
) -> list[RollingPoint]:
    """Fit the size distribution inside each sliding window.

    Windows cover [end - window, end] with end advancing by step from the
    earliest time that fits a whole window; samples on the boundary belong
    to the window.  A window whose movements cannot satisfy the fit's tail
    requirement yields status "insufficient_tail" and fit None.
    """
    if cfg is None:
        cfg = RollingConfig()
    t = np.asarray(times, dtype=np.int64)
    v = np.asarray(values)
    if t.size != v.size:
        raise ValueError("times and values length mismatch")
    if t.size == 0:
        raise ValueError("empty series")
    span = int(t[-1] - t[0])
    if cfg.window > span:
        raise ValueError("window exceeds the series span")

    n_windows = (span - cfg.window) // cfg.step + 1
    out: list[RollingPoint] = []
    t0 = int(t[0])
    for i in range(n_windows):
        end = t0 + cfg.window + i * cfg.step
        start = end - cfg.window
        lo = int(np.searchsorted(t, start, side="left"))
        hi = int(np.searchsorted(t, end, side="right"))
        dec = decompose(v[lo:hi], t[lo:hi])
        try:
            f = fit(dec, min_tail=cfg.min_tail, xmin_range=cfg.xmin_range)
            out.append(RollingPoint(end, f, dec.pair_count, "ok"))
        except InsufficientTailError:
            out.append(RollingPoint(end, None, dec.pair_count, "insufficient_tail"))
    return out
