"""Command-line interface: parse, decompose, summarize, fit, roll, splice.

Outputs are plain delimited text or JSON, written atomically (temp file
then rename) into the chosen directory, and byte-identical for identical
inputs and flags.  Exit codes: 0 success, 2 bad input, 3 insufficient data
for a fit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from datetime import date

import numpy as np

from .core import Kind, decompose
from .ingest import (
    CalendarError,
    InstrumentSpec,
    RollRule,
    SpliceError,
    TickParseError,
    build_continuous,
    parse_ticks,
)
from .oracle import gen_discrete_powerlaw, gen_random_walk, level_sweep_pairs
from .powerlaw import InsufficientTailError, fit, mle_count_exponent
from .rolling import DAY_NS, WEEK_NS, RollingConfig, rolling_fit
from .spectrum import histogram, spectrum

__all__ = ["main"]

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INSUFFICIENT = 3

_HOUR_NS = 3600 * 10**9


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_duration(text: str) -> int:
    """Duration to nanoseconds: 8w, 56d, 12h, 3600000000000ns, bare int = weeks."""
    s = text.strip().lower()
    for suffix, unit in (("ns", 1), ("w", WEEK_NS), ("d", DAY_NS), ("h", _HOUR_NS)):
        if s.endswith(suffix):
            return int(s[: -len(suffix)]) * unit
    return int(s) * WEEK_NS


def _parse_xmin_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    return int(lo), int(hi)


def _load_series(args: argparse.Namespace) -> tuple[np.ndarray, np.ndarray]:
    spec = InstrumentSpec(args.tick)
    with open(args.input, newline="") as f:
        samples = parse_ticks(f, spec, columns=args.columns, delimiter=args.delimiter)
    t = np.fromiter((s.time for s in samples), dtype=np.int64, count=len(samples))
    v = np.fromiter((s.value for s in samples), dtype=np.int64, count=len(samples))
    return t, v


def _fit_kwargs(args: argparse.Namespace) -> dict:
    kw = {"min_tail": args.min_tail}
    if args.xmin_range is not None:
        kw["xmin_range"] = args.xmin_range
    return kw


def _kind_name(kind: Kind) -> str:
    return "min" if kind is Kind.MIN else "max"


def cmd_decompose(args: argparse.Namespace) -> int:
    t, v = _load_series(args)
    dec = decompose(v, t)
    summary = {
        "pair_count": dec.pair_count,
        "tv_total": dec.tv_total,
        "tv_top": dec.tv_top,
    }
    if args.format == "json":
        doc = {
            "pairs": [
                {
                    "t_min": p.minimum.time,
                    "v_min": p.minimum.value,
                    "t_max": p.maximum.time,
                    "v_max": p.maximum.value,
                    "size": p.size,
                }
                for p in dec.pairs
            ],
            "top": {
                "extrema": [
                    {"time": e.time, "value": e.value, "kind": _kind_name(e.kind)}
                    for e in dec.top.extrema
                ],
                "pending": (
                    None
                    if dec.top.pending is None
                    else {"time": dec.top.pending.time, "value": dec.top.pending.value}
                ),
            },
            "summary": summary,
        }
        _write_atomic(
            os.path.join(args.out, "decompose.json"),
            json.dumps(doc, sort_keys=True, indent=2) + "\n",
        )
        return EXIT_OK
    pair_rows = ["t_min,v_min,t_max,v_max,size"]
    pair_rows += [
        f"{p.minimum.time},{p.minimum.value},{p.maximum.time},{p.maximum.value},{p.size}"
        for p in dec.pairs
    ]
    top_rows = ["time,value,kind"]
    top_rows += [f"{e.time},{e.value},{_kind_name(e.kind)}" for e in dec.top.extrema]
    if dec.top.pending is not None:
        top_rows.append(f"{dec.top.pending.time},{dec.top.pending.value},pending")
    summary_rows = [
        "pair_count,tv_total,tv_top",
        f"{summary['pair_count']},{summary['tv_total']},{summary['tv_top']}",
    ]
    _write_atomic(os.path.join(args.out, "pairs.csv"), "\n".join(pair_rows) + "\n")
    _write_atomic(os.path.join(args.out, "top.csv"), "\n".join(top_rows) + "\n")
    _write_atomic(os.path.join(args.out, "summary.csv"), "\n".join(summary_rows) + "\n")
    return EXIT_OK


def cmd_spectrum(args: argparse.Namespace) -> int:
    t, v = _load_series(args)
    dec = decompose(v, t)
    h = histogram(dec)
    spec_pts = spectrum(h).points
    rows = ["m,n,S"] + [f"{m},{h.entries[m]},{s}" for m, s in spec_pts]
    _write_atomic(os.path.join(args.out, "spectrum.csv"), "\n".join(rows) + "\n")
    if args.no_fit:
        return EXIT_OK
    f = fit(h, **_fit_kwargs(args))
    grid = range(f.xmin, max(h.entries) + 1)
    overlay = ["m,S_model"] + [f"{m},{f.amplitude * m ** -f.alpha!r}" for m in grid]
    _write_atomic(os.path.join(args.out, "fit_overlay.csv"), "\n".join(overlay) + "\n")
    return EXIT_OK


def _fit_doc(f) -> dict:
    return {
        "xmin": f.xmin,
        "count_exponent": f.count_exponent,
        "alpha": f.alpha,
        "ks_distance": f.ks_distance,
        "n_tail": f.n_tail,
        "amplitude": f.amplitude,
    }


def cmd_fit(args: argparse.Namespace) -> int:
    t, v = _load_series(args)
    dec = decompose(v, t)
    f = fit(dec, **_fit_kwargs(args))
    if args.format == "json":
        _write_atomic(
            os.path.join(args.out, "fit.json"),
            json.dumps(_fit_doc(f), sort_keys=True, indent=2) + "\n",
        )
    else:
        rows = [
            "xmin,count_exponent,alpha,ks_distance,n_tail,amplitude",
            f"{f.xmin},{f.count_exponent!r},{f.alpha!r},{f.ks_distance!r},{f.n_tail},{f.amplitude!r}",
        ]
        _write_atomic(os.path.join(args.out, "fit.csv"), "\n".join(rows) + "\n")
    return EXIT_OK


def cmd_rolling(args: argparse.Namespace) -> int:
    t, v = _load_series(args)
    cfg = RollingConfig(
        window=args.window,
        step=args.step,
        min_tail=args.min_tail,
        xmin_range=args.xmin_range,
    )
    points = rolling_fit(v, t, cfg)
    rows = ["window_end,alpha,xmin,n_tail,status"]
    for p in points:
        if p.fit is None:
            rows.append(f"{p.window_end},,,,{p.status}")
        else:
            rows.append(
                f"{p.window_end},{p.fit.alpha!r},{p.fit.xmin},{p.fit.n_tail},{p.status}"
            )
    _write_atomic(os.path.join(args.out, "rolling.csv"), "\n".join(rows) + "\n")
    return EXIT_OK


def cmd_continuous(args: argparse.Namespace) -> int:
    spec = InstrumentSpec(args.tick)
    calendar = []
    with open(args.calendar, newline="") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            cid, _, expiry = line.partition(",")
            calendar.append((cid.strip(), date.fromisoformat(expiry.strip())))
    rule = RollRule(
        calendar,
        days_before_expiry=args.days_before_expiry,
        eligible_months=args.months,
    )
    series = []
    for item in args.contracts:
        cid, _, path = item.partition("=")
        if not path:
            raise TickParseError([(0, f"contract argument {item!r} must be ID=FILE")])
        with open(path, newline="") as f:
            series.append(
                (cid, parse_ticks(f, spec, columns=args.columns, delimiter=args.delimiter))
            )
    cont = build_continuous(series, rule)
    rows = ["time,value_ticks"] + [f"{s.time},{s.value}" for s in cont]
    _write_atomic(os.path.join(args.out, "continuous.csv"), "\n".join(rows) + "\n")
    return EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    failures = 0
    rng_seeds = range(args.seed, args.seed + 40)
    for seed in rng_seeds:
        kind = "pm1" if seed % 2 == 0 else "gauss"
        zp = 0.3 if seed % 4 == 0 else 0.0
        t, v = gen_random_walk(1500, seed=seed, kind=kind, zero_prob=zp)
        dec = decompose(v, t)
        ora = level_sweep_pairs(v.tolist(), t.tolist())
        same = sorted(
            (p.minimum.value, p.maximum.value) for p in dec.pairs
        ) == sorted((p.minimum.value, p.maximum.value) for p in ora.pairs)
        conserved = dec.tv_total == dec.tv_top + dec.pair_variation()
        if not (same and conserved and dec.tv_total == ora.tv_total and dec.tv_top == ora.tv_top):
            failures += 1
    print(f"oracle equivalence: {'ok' if failures == 0 else 'FAIL'} ({len(rng_seeds)} walks)")

    sizes = gen_discrete_powerlaw(20_000, 3.0, 10, seed=args.seed)
    est = mle_count_exponent(sizes, 10)
    fit_ok = abs(est - 3.0) < 0.1
    print(f"fit recovery: {'ok' if fit_ok else 'FAIL'} (estimate {est:.3f} for 3.0)")
    if failures or not fit_ok:
        return 1
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="persistick",
        description="Decompose tick series into persistent movements and fit their size scaling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p: argparse.ArgumentParser, with_input: bool = True) -> None:
        if with_input:
            p.add_argument("input", help="delimited quote file")
        p.add_argument("--tick", required=True, help="tick size, e.g. 0.0001")
        p.add_argument("--columns", default="time,bid,ask", help="time,bid,ask or time,price")
        p.add_argument("--delimiter", default=",")
        p.add_argument("--out", default=".", help="output directory")

    def add_fit_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--min-tail", type=int, default=50, dest="min_tail")
        p.add_argument(
            "--xmin-range",
            type=_parse_xmin_range,
            default=None,
            dest="xmin_range",
            metavar="LO:HI",
        )

    p = sub.add_parser("decompose", help="emit pairs, top structure, and summary")
    add_io(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("spectrum", help="emit size spectrum and fitted overlay")
    add_io(p)
    add_fit_flags(p)
    p.add_argument("--no-fit", action="store_true", dest="no_fit")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("fit", help="fit the movement-size power law")
    add_io(p)
    add_fit_flags(p)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("rolling", help="windowed scaling estimates")
    add_io(p)
    add_fit_flags(p)
    p.add_argument("--window", type=_parse_duration, default=8 * WEEK_NS)
    p.add_argument("--step", type=_parse_duration, default=2 * WEEK_NS)
    p.set_defaults(func=cmd_rolling)

    p = sub.add_parser("continuous", help="splice contracts into a continuous series")
    p.add_argument("contracts", nargs="+", metavar="ID=FILE")
    p.add_argument("--tick", required=True)
    p.add_argument("--columns", default="time,bid,ask")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--out", default=".")
    p.add_argument("--calendar", required=True, help="file of contract_id,expiry_date")
    p.add_argument("--days-before-expiry", type=int, default=6, dest="days_before_expiry")
    p.add_argument(
        "--months",
        type=lambda s: frozenset(int(x) for x in s.split(",")),
        default=frozenset({3, 6, 9, 12}),
    )
    p.set_defaults(func=cmd_continuous)

    p = sub.add_parser("selftest", help="run built-in consistency checks")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TickParseError, CalendarError, SpliceError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except InsufficientTailError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except (OSError, ValueError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
