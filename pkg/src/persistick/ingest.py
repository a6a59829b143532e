"""Quote-file parsing, exact tick quantization, and contract splicing.

All prices become integer tick counts on ingestion and every later stage
works on those integers.  Quantization goes through Fraction arithmetic,
so mid-prices landing exactly between two ticks round half-to-even rather
than drifting, and dequantizing a tick count reproduces it exactly.
"""

from __future__ import annotations

import csv
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import IO, Iterable, Sequence

from .core import Sample

__all__ = [
    "InstrumentSpec",
    "RollRule",
    "TickParseError",
    "SpliceError",
    "CalendarError",
    "quantize",
    "dequantize",
    "parse_ticks",
    "parse_timestamp",
    "build_continuous",
]

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
_MAX_REPORTED_LINES = 10


class TickParseError(ValueError):
    """Input rows failed to parse; carries (line number, reason) details."""

    def __init__(self, errors: list[tuple[int, str]]) -> None:
        self.errors = errors
        shown = "; ".join(f"line {ln}: {msg}" for ln, msg in errors[:_MAX_REPORTED_LINES])
        extra = len(errors) - _MAX_REPORTED_LINES
        if extra > 0:
            shown += f"; and {extra} more"
        super().__init__(shown)


class SpliceError(ValueError):
    """A roll point has no usable reference quote on one side."""


class CalendarError(ValueError):
    """A contract is missing from, or inconsistent with, the roll calendar."""


def _exact(value: str | int | Decimal | Fraction) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (str, int, Decimal)):
        return Fraction(value)
    raise TypeError(
        f"pass prices as str, int, Decimal or Fraction, not {type(value).__name__}"
    )


@dataclass(frozen=True)
class InstrumentSpec:
    tick_size: Fraction
    symbol: str = ""

    def __init__(self, tick_size: str | int | Decimal | Fraction, symbol: str = "") -> None:
        ts = _exact(tick_size)
        if ts <= 0:
            raise ValueError("tick size must be positive")
        object.__setattr__(self, "tick_size", ts)
        object.__setattr__(self, "symbol", symbol)


@dataclass(frozen=True)
class RollRule:
    """When to leave each contract: N calendar days before eligible expiries."""

    calendar: tuple[tuple[str, date], ...]
    days_before_expiry: int = 6
    eligible_months: frozenset[int] = frozenset({3, 6, 9, 12})

    def __init__(
        self,
        calendar: Iterable[tuple[str, date]],
        days_before_expiry: int = 6,
        eligible_months: Iterable[int] = (3, 6, 9, 12),
    ) -> None:
        cal = tuple(calendar)
        if days_before_expiry < 0:
            raise ValueError("days_before_expiry must be non-negative")
        if any(b[1] < a[1] for a, b in zip(cal, cal[1:])):
            raise CalendarError("calendar must be sorted by expiry date")
        object.__setattr__(self, "calendar", cal)
        object.__setattr__(self, "days_before_expiry", int(days_before_expiry))
        object.__setattr__(self, "eligible_months", frozenset(eligible_months))

    def roll_time_ns(self, expiry: date) -> int:
        roll_day = expiry - timedelta(days=self.days_before_expiry)
        dt = datetime(roll_day.year, roll_day.month, roll_day.day, tzinfo=timezone.utc)
        return _datetime_ns(dt)


def quantize(price: str | int | Decimal | Fraction, tick_size: str | int | Decimal | Fraction) -> int:
    """Price to integer tick count, rounding half-to-even."""
    return round(_exact(price) / _exact(tick_size))


def dequantize(ticks: int, tick_size: str | int | Decimal | Fraction) -> Fraction:
    """Tick count back to an exact price."""
    return ticks * _exact(tick_size)


def _datetime_ns(dt: datetime) -> int:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    delta = dt - _EPOCH
    return (delta.days * 86400 + delta.seconds) * 10**9 + delta.microseconds * 1000


def parse_timestamp(text: str) -> int:
    """Epoch nanoseconds from either a bare integer or an ISO-8601 string.

    Naive timestamps count as UTC.
    """
    s = text.strip()
    try:
        return int(s)
    except ValueError:
        pass
    iso = s[:-1] + "+00:00" if s.endswith("Z") else s
    return _datetime_ns(datetime.fromisoformat(iso))


_COLUMN_SETS = (("time", "bid", "ask"), ("time", "price"))


def parse_ticks(
    stream: IO[str] | Iterable[str],
    spec: InstrumentSpec,
    columns: str | Sequence[str] = "time,bid,ask",
    delimiter: str = ",",
) -> list[Sample]:
    """Read delimited quote rows into quantized samples.

    Rows must follow the declared column layout; with bid/ask columns the
    quantized value is the mid-price.  Any malformed, non-positive or
    crossed (bid > ask) row fails the parse with its line number, and a
    timestamp going backwards fails immediately naming the first offending
    line.  Input order is checked, never silently fixed.
    """
    cols = tuple(c.strip() for c in columns.split(",")) if isinstance(columns, str) else tuple(columns)
    if cols not in _COLUMN_SETS:
        raise ValueError(f"unsupported column layout: {','.join(cols)}")
    use_mid = len(cols) == 3

    samples: list[Sample] = []
    errors: list[tuple[int, str]] = []
    last_t: int | None = None
    for lineno, row in enumerate(csv.reader(stream, delimiter=delimiter), start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(cols):
            errors.append((lineno, f"expected {len(cols)} fields, got {len(row)}"))
            continue
        try:
            t = parse_timestamp(row[0])
        except ValueError:
            errors.append((lineno, f"bad timestamp {row[0].strip()!r}"))
            continue
        try:
            if use_mid:
                bid = Fraction(row[1].strip())
                ask = Fraction(row[2].strip())
                if bid > ask:
                    errors.append((lineno, f"crossed market: bid {row[1].strip()} > ask {row[2].strip()}"))
                    continue
                price = (bid + ask) / 2
            else:
                price = Fraction(row[1].strip())
        except (ValueError, ZeroDivisionError, InvalidOperation):
            errors.append((lineno, "bad price field"))
            continue
        if price <= 0:
            errors.append((lineno, "non-positive price"))
            continue
        if last_t is not None and t < last_t:
            raise TickParseError([(lineno, f"timestamp decreases ({t} after {last_t})")])
        last_t = t
        samples.append(Sample(t, quantize(price, spec.tick_size)))
    if errors:
        raise TickParseError(errors)
    return samples


def build_continuous(
    contract_series: Sequence[tuple[str, Sequence[Sample]]],
    rule: RollRule,
) -> list[Sample]:
    """Splice per-contract series into one continuous tick series.

    Each eligible contract contributes quotes up to its roll time (expiry
    minus the rule's day count); every later contract is shifted by the
    accumulated difference between the outgoing reference (last quote at or
    before the roll) and the incoming reference (first quote at or after
    it), so no splice introduces a price step and within-contract changes
    are untouched.
    """
    expiries = dict(rule.calendar)
    chain: list[tuple[str, Sequence[Sample], date]] = []
    for cid, samples in contract_series:
        if cid not in expiries:
            raise CalendarError(f"contract {cid!r} missing from the roll calendar")
        expiry = expiries[cid]
        if expiry.month not in rule.eligible_months:
            continue
        ss = list(samples)
        if any(b.time < a.time for a, b in zip(ss, ss[1:])):
            raise ValueError(f"contract {cid!r} samples are not sorted by time")
        chain.append((cid, ss, expiry))
    chain.sort(key=lambda c: c[2])
    if not chain:
        return []

    out: list[Sample] = []
    shift = 0
    start_idx = 0
    for i, (cid, ss, expiry) in enumerate(chain):
        last = i == len(chain) - 1
        if last:
            retained = ss[start_idx:]
        else:
            roll_ns = rule.roll_time_ns(expiry)
            end = bisect_right(ss, roll_ns, lo=start_idx, key=lambda s: s.time)
            if end == start_idx:
                raise SpliceError(
                    f"no splice reference: contract {cid!r} has no quote at or before its roll"
                )
            retained = ss[start_idx:end]
        out.extend(Sample(s.time, s.value + shift) for s in retained)
        if not last:
            nxt_cid, nxt_ss, _ = chain[i + 1]
            in_idx = bisect_left(nxt_ss, roll_ns, key=lambda s: s.time)
            if in_idx == len(nxt_ss):
                raise SpliceError(
                    f"no splice reference: contract {nxt_cid!r} has no quote at or after the roll"
                )
            shift += retained[-1].value - nxt_ss[in_idx].value
            start_idx = in_idx
    return out
