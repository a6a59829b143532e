"""Discrete power-law fitting of movement sizes.

Sizes are integer ticks, so the model is the discrete power law
P(m) = m**-b / zeta(b, xmin) for m >= xmin, with the Hurwitz zeta as
normalizer.  The exponent is estimated by maximum likelihood on a
bracketed interval, the cutoff xmin by minimizing the Kolmogorov-Smirnov
distance over candidate cutoffs.  The reported spectrum exponent alpha is
the count exponent minus one: multiplying a count law m**-(alpha+1) by the
per-movement variation 2m leaves a spectrum law proportional to m**-alpha.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .core import Decomposition
from .spectrum import SizeHistogram

__all__ = [
    "PowerLawFit",
    "InsufficientTailError",
    "mle_count_exponent",
    "ks_distance",
    "fit",
]

_BRACKET = (1.01, 6.0)
DEFAULT_MIN_TAIL = 50


class InsufficientTailError(ValueError):
    """No cutoff candidate leaves enough tail samples to fit."""


@dataclass(frozen=True)
class PowerLawFit:
    xmin: int
    count_exponent: float
    alpha: float
    ks_distance: float
    n_tail: int
    amplitude: float


def _as_sizes_counts(
    data: SizeHistogram | Decomposition | Iterable[int] | np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(data, SizeHistogram):
        return data.sizes(), data.counts()
    if isinstance(data, Decomposition):
        arr = data.sizes()
    else:
        arr = np.asarray(list(data) if not isinstance(data, np.ndarray) else data)
        if arr.size and arr.dtype.kind not in "iu":
            raise TypeError("sizes must be integers")
        arr = arr.astype(np.int64, copy=False)
    if arr.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    uniq, counts = np.unique(arr, return_counts=True)
    return uniq.astype(np.int64), counts.astype(np.int64)


def _mle_from_counts(
    ms: np.ndarray, cs: np.ndarray, xmin: int, n: int, log_sum: float
) -> float:
    # Negative log-likelihood of the discrete power law, up to constants:
    # n * ln zeta(b, xmin) + b * sum(count * ln size).
    def neg_ll(b: float) -> float:
        return n * float(np.log(zeta(b, xmin))) + b * log_sum

    res = minimize_scalar(
        neg_ll, bounds=_BRACKET, method="bounded", options={"xatol": 1e-9}
    )
    if res.success:
        return float(res.x)
    # Closed-form continuous approximation as the fallback estimate.
    approx = 1.0 + n / (log_sum - n * np.log(xmin - 0.5))
    return float(min(max(approx, _BRACKET[0]), _BRACKET[1]))


def mle_count_exponent(sizes: Sequence[int] | np.ndarray, xmin: int) -> float:
    """Maximum-likelihood exponent of the count law for sizes >= xmin."""
    ms, cs = _as_sizes_counts(sizes)
    if int(cs.sum()) < 2:
        raise ValueError("need at least two sizes to estimate an exponent")
    if xmin < 1:
        raise ValueError("xmin must be at least 1")
    if int(ms[0]) < xmin:
        raise ValueError("all sizes must be >= xmin")
    if ms.size < 2:
        raise ValueError("exponent is unidentifiable when all sizes are equal")
    n = int(cs.sum())
    log_sum = float(np.dot(cs, np.log(ms)))
    return _mle_from_counts(ms, cs, xmin, n, log_sum)


def _ks_from_counts(ms: np.ndarray, cs: np.ndarray, xmin: int, exponent: float) -> float:
    n = int(cs.sum())
    ecdf = np.cumsum(cs) / n
    norm = float(zeta(exponent, xmin))
    model = 1.0 - zeta(exponent, ms + 1) / norm
    return float(np.max(np.abs(ecdf - model)))


def ks_distance(
    sizes: Sequence[int] | np.ndarray, xmin: int, exponent: float
) -> float:
    """Max gap between empirical and model tail CDFs at observed sizes."""
    ms, cs = _as_sizes_counts(sizes)
    if int(cs.sum()) < 2:
        raise ValueError("need at least two sizes to measure a distance")
    if int(ms[0]) < xmin:
        raise ValueError("all sizes must be >= xmin")
    if exponent <= 1.0:
        raise ValueError("exponent must exceed 1")
    return _ks_from_counts(ms, cs, xmin, exponent)


def fit(
    data: SizeHistogram | Decomposition | Iterable[int] | np.ndarray,
    *,
    min_tail: int = DEFAULT_MIN_TAIL,
    xmin_range: tuple[int, int] | None = None,
) -> PowerLawFit:
    """Select the cutoff and exponent for a movement-size distribution.

    Every observed size is a cutoff candidate, subject to the candidate
    tail holding at least min_tail samples (and at least two distinct
    sizes) and to the optional inclusive xmin_range.  Each candidate gets
    its own maximum-likelihood exponent; the candidate with the smallest
    Kolmogorov-Smirnov distance wins, earliest on ties.  The amplitude
    scales the spectrum law so the model variation over the fitted range
    equals the empirical variation of the tail.
    """
    ms, cs = _as_sizes_counts(data)
    if ms.size == 0:
        raise InsufficientTailError("empty size distribution")
    if min_tail < 2:
        raise ValueError("min_tail must be at least 2")

    n_suffix = np.cumsum(cs[::-1])[::-1]
    logs = np.log(ms)
    logsum_suffix = np.cumsum((cs * logs)[::-1])[::-1]

    best: tuple[float, int] | None = None
    best_fit: tuple[int, float, float, int] | None = None
    for i in range(ms.size):
        xmin = int(ms[i])
        if xmin_range is not None and not xmin_range[0] <= xmin <= xmin_range[1]:
            continue
        n_tail = int(n_suffix[i])
        if n_tail < min_tail:
            continue
        if ms.size - i < 2:
            continue
        b = _mle_from_counts(ms[i:], cs[i:], xmin, n_tail, float(logsum_suffix[i]))
        d = _ks_from_counts(ms[i:], cs[i:], xmin, b)
        if best is None or d < best[0]:
            best = (d, xmin)
            best_fit = (xmin, b, d, n_tail)
    if best_fit is None:
        raise InsufficientTailError(
            f"no cutoff candidate leaves at least {min_tail} tail samples"
        )

    xmin, b, d, n_tail = best_fit
    alpha = b - 1.0
    mask = ms >= xmin
    emp_tail_variation = float(np.dot(2 * cs[mask], ms[mask]))
    grid = np.arange(xmin, int(ms[-1]) + 1, dtype=np.float64)
    model_sum = float(np.sum(grid**-alpha))
    amplitude = emp_tail_variation / model_sum
    return PowerLawFit(
        xmin=xmin,
        count_exponent=float(b),
        alpha=float(alpha),
        ks_distance=float(d),
        n_tail=n_tail,
        amplitude=amplitude,
    )
