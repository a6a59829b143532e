"""End-to-end tests of the command-line interface."""

from __future__ import annotations

import json
import subprocess
import sys
from datetime import date
from pathlib import Path

import numpy as np

from persistick.cli import _parse_duration, _parse_xmin_range, main
from persistick.core import Sample, decompose
from persistick.ingest import InstrumentSpec, build_continuous, parse_ticks, RollRule
from persistick.oracle import gen_random_walk
from persistick.powerlaw import fit
from persistick.rolling import DAY_NS, WEEK_NS

REFERENCE_VALUES = [3, 6, 0, 7, 2, 5, 4, 8]


def write_reference_csv(path: Path) -> None:
    rows = [f"{t},1.{2000 + v:04d}" for t, v in enumerate(REFERENCE_VALUES)]
    path.write_text("\n".join(rows) + "\n")


def write_walk_csv(path: Path, n: int, seed: int, flat: int = 0) -> np.ndarray:
    _, v = gen_random_walk(n, seed=seed, kind="pm1")
    if flat:
        _, w = gen_random_walk(n, seed=seed + 1, kind="pm1", start=int(v[-1]))
        v = np.concatenate([v, np.full(flat, v[-1], dtype=np.int64), w])
    cents = 12345 + v
    rows = [
        f"{i * 10**9},{c // 100}.{c % 100:02d}" for i, c in enumerate(cents.tolist())
    ]
    path.write_text("\n".join(rows) + "\n")
    return v


def run(*argv: str) -> int:
    return main(list(argv))


class TestHelpers:
    def test_parse_duration(self):
        assert _parse_duration("8w") == 8 * WEEK_NS
        assert _parse_duration("56d") == 56 * DAY_NS
        assert _parse_duration("12h") == 12 * 3600 * 10**9
        assert _parse_duration("3600000000000ns") == 3_600_000_000_000
        assert _parse_duration("8") == 8 * WEEK_NS

    def test_parse_xmin_range(self):
        assert _parse_xmin_range("5:40") == (5, 40)


class TestDecompose:
    def test_csv_outputs(self, tmp_path):
        src = tmp_path / "quotes.csv"
        write_reference_csv(src)
        rc = run(
            "decompose", str(src),
            "--tick", "0.0001", "--columns", "time,price", "--out", str(tmp_path),
        )
        assert rc == 0
        assert (tmp_path / "pairs.csv").read_text() == (
            "t_min,v_min,t_max,v_max,size\n"
            "6,12004,5,12005,1\n"
            "4,12002,3,12007,5\n"
        )
        assert (tmp_path / "top.csv").read_text() == (
            "time,value,kind\n"
            "0,12003,min\n"
            "1,12006,max\n"
            "2,12000,min\n"
            "7,12008,pending\n"
        )
        assert (tmp_path / "summary.csv").read_text() == (
            "pair_count,tv_total,tv_top\n2,29,17\n"
        )

    def test_json_output(self, tmp_path):
        src = tmp_path / "quotes.csv"
        write_reference_csv(src)
        rc = run(
            "decompose", str(src), "--format", "json",
            "--tick", "0.0001", "--columns", "time,price", "--out", str(tmp_path),
        )
        assert rc == 0
        doc = json.loads((tmp_path / "decompose.json").read_text())
        assert doc["summary"] == {"pair_count": 2, "tv_total": 29, "tv_top": 17}
        assert doc["pairs"][0] == {
            "t_min": 6, "v_min": 12004, "t_max": 5, "v_max": 12005, "size": 1,
        }
        assert [e["kind"] for e in doc["top"]["extrema"]] == ["min", "max", "min"]
        assert doc["top"]["pending"] == {"time": 7, "value": 12008}

    def test_outputs_byte_identical_across_runs(self, tmp_path):
        src = tmp_path / "quotes.csv"
        write_walk_csv(src, 2_000, seed=9)
        a, b = tmp_path / "a", tmp_path / "b"
        a.mkdir(), b.mkdir()
        for out in (a, b):
            for fmt in ("csv", "json"):
                rc = run(
                    "decompose", str(src), "--format", fmt,
                    "--tick", "0.01", "--columns", "time,price", "--out", str(out),
                )
                assert rc == 0
        for name in ("pairs.csv", "top.csv", "summary.csv", "decompose.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_empty_input_succeeds_with_zero_summary(self, tmp_path):
        src = tmp_path / "empty.csv"
        src.write_text("")
        rc = run(
            "decompose", str(src),
            "--tick", "0.01", "--columns", "time,price", "--out", str(tmp_path),
        )
        assert rc == 0
        assert (tmp_path / "summary.csv").read_text() == (
            "pair_count,tv_total,tv_top\n0,0,0\n"
        )
        assert (tmp_path / "pairs.csv").read_text() == "t_min,v_min,t_max,v_max,size\n"
        assert (tmp_path / "top.csv").read_text() == "time,value,kind\n"

    def test_module_entrypoint_smoke(self, tmp_path):
        src = tmp_path / "quotes.csv"
        write_reference_csv(src)
        proc = subprocess.run(
            [
                sys.executable, "-m", "persistick.cli",
                "decompose", str(src),
                "--tick", "0.0001", "--columns", "time,price", "--out", str(tmp_path),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert (tmp_path / "summary.csv").exists()


class TestSpectrum:
    def test_rows_and_no_fit(self, tmp_path):
        src = tmp_path / "quotes.csv"
        write_reference_csv(src)
        rc = run(
            "spectrum", str(src), "--no-fit",
            "--tick", "0.0001", "--columns", "time,price", "--out", str(tmp_path),
        )
        assert rc == 0
        assert (tmp_path / "spectrum.csv").read_text() == "m,n,S\n1,1,2\n5,1,10\n"
        assert not (tmp_path / "fit_overlay.csv").exists()

    def test_fit_overlay_written(self, tmp_path):
        src = tmp_path / "quotes.csv"
        write_walk_csv(src, 30_000, seed=12)
        rc = run(
            "spectrum", str(src),
            "--tick", "0.01", "--columns", "time,price", "--out", str(tmp_path),
        )
        assert rc == 0
        overlay = (tmp_path / "fit_overlay.csv").read_text().splitlines()
        assert overlay[0] == "m,S_model"
        ms = [int(line.split(",")[0]) for line in overlay[1:]]
        assert ms == list(range(ms[0], ms[0] + len(ms)))  # dense grid
        assert all(float(line.split(",")[1]) > 0 for line in overlay[1:])

    def test_small_input_fit_fails_but_spectrum_written(self, tmp_path, capsys):
        src = tmp_path / "quotes.csv"
        write_reference_csv(src)
        rc = run(
            "spectrum", str(src),
            "--tick", "0.0001", "--columns", "time,price", "--out", str(tmp_path),
        )
        assert rc == 3
        assert (tmp_path / "spectrum.csv").exists()
        assert "error:" in capsys.readouterr().err


class TestFit:
    def test_json_matches_library(self, tmp_path):
        src = tmp_path / "quotes.csv"
        v = write_walk_csv(src, 30_000, seed=12)
        rc = run(
            "fit", str(src),
            "--tick", "0.01", "--columns", "time,price", "--out", str(tmp_path),
        )
        assert rc == 0
        doc = json.loads((tmp_path / "fit.json").read_text())
        f = fit(decompose(12345 + v, np.arange(v.size, dtype=np.int64) * 10**9))
        assert doc["xmin"] == f.xmin
        assert doc["alpha"] == f.alpha
        assert doc["count_exponent"] == f.count_exponent
        assert doc["ks_distance"] == f.ks_distance
        assert doc["n_tail"] == f.n_tail
        assert doc["amplitude"] == f.amplitude

    def test_csv_format(self, tmp_path):
        src = tmp_path / "quotes.csv"
        write_walk_csv(src, 30_000, seed=12)
        rc = run(
            "fit", str(src), "--format", "csv",
            "--tick", "0.01", "--columns", "time,price", "--out", str(tmp_path),
        )
        assert rc == 0
        lines = (tmp_path / "fit.csv").read_text().splitlines()
        assert lines[0] == "xmin,count_exponent,alpha,ks_distance,n_tail,amplitude"
        assert len(lines) == 2

    def test_xmin_range_flag(self, tmp_path):
        src = tmp_path / "quotes.csv"
        write_walk_csv(src, 30_000, seed=12)
        rc = run(
            "fit", str(src), "--xmin-range", "3:3",
            "--tick", "0.01", "--columns", "time,price", "--out", str(tmp_path),
        )
        assert rc == 0
        assert json.loads((tmp_path / "fit.json").read_text())["xmin"] == 3

    def test_insufficient_tail_exit_code(self, tmp_path, capsys):
        src = tmp_path / "quotes.csv"
        write_reference_csv(src)
        rc = run(
            "fit", str(src),
            "--tick", "0.0001", "--columns", "time,price", "--out", str(tmp_path),
        )
        assert rc == 3
        assert not (tmp_path / "fit.json").exists()
        assert "error:" in capsys.readouterr().err


class TestRolling:
    def test_windows_and_insufficient_rows(self, tmp_path):
        src = tmp_path / "quotes.csv"
        write_walk_csv(src, 20_000, seed=21, flat=40_000)
        rc = run(
            "rolling", str(src),
            "--window", "20000000000000ns", "--step", "20000000000000ns",
            "--tick", "0.01", "--columns", "time,price", "--out", str(tmp_path),
        )
        assert rc == 0
        lines = (tmp_path / "rolling.csv").read_text().splitlines()
        assert lines[0] == "window_end,alpha,xmin,n_tail,status"
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[4] == "ok"
        assert float(first[1]) > 1.0
        for line in lines[2:]:
            cells = line.split(",")
            assert cells[1:] == ["", "", "", "insufficient_tail"]


class TestContinuous:
    def test_matches_library_splice(self, tmp_path):
        day = 86_400 * 10**9
        r1 = 1709942400 * 10**9  # 2024-03-09T00:00:00Z
        r2 = 1718409600 * 10**9  # 2024-06-15T00:00:00Z

        def write_contract(name, rows):
            p = tmp_path / name
            p.write_text("\n".join(f"{t},{v // 100}.{v % 100:02d}" for t, v in rows) + "\n")
            return p

        a = write_contract(
            "h24.csv",
            [(r1 - 2 * day, 10000), (r1 - day, 10004), (r1, 10003), (r1 + day, 10999)],
        )
        b = write_contract(
            "m24.csv",
            [(r1 - day, 9000), (r1, 9993), (r1 + day, 9995), (r2, 9996), (r2 + day, 10999)],
        )
        c = write_contract(
            "u24.csv", [(r2, 10000), (r2 + day, 9998), (r2 + 2 * day, 10003)]
        )
        cal = tmp_path / "calendar.csv"
        cal.write_text("H24,2024-03-15\nM24,2024-06-21\nU24,2024-09-20\n")

        rc = run(
            "continuous",
            f"H24={a}", f"M24={b}", f"U24={c}",
            "--tick", "0.01", "--columns", "time,price",
            "--calendar", str(cal), "--out", str(tmp_path),
        )
        assert rc == 0
        lines = (tmp_path / "continuous.csv").read_text().splitlines()
        assert lines[0] == "time,value_ticks"
        got = [Sample(int(t), int(v)) for t, v in (ln.split(",") for ln in lines[1:])]

        spec = InstrumentSpec("0.01")
        series = []
        for cid, path in (("H24", a), ("M24", b), ("U24", c)):
            with open(path) as f:
                series.append((cid, parse_ticks(f, spec, columns="time,price")))
        rule = RollRule(
            [
                ("H24", date(2024, 3, 15)),
                ("M24", date(2024, 6, 21)),
                ("U24", date(2024, 9, 20)),
            ]
        )
        assert got == build_continuous(series, rule)

    def test_bad_contract_argument(self, tmp_path, capsys):
        cal = tmp_path / "calendar.csv"
        cal.write_text("H24,2024-03-15\n")
        rc = run(
            "continuous", "H24-no-equals-sign",
            "--tick", "0.01", "--calendar", str(cal), "--out", str(tmp_path),
        )
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_calendar_entry(self, tmp_path, capsys):
        src = tmp_path / "x.csv"
        src.write_text("0,1.00\n")
        cal = tmp_path / "calendar.csv"
        cal.write_text("H24,2024-03-15\n")
        rc = run(
            "continuous", f"Z99={src}",
            "--tick", "0.01", "--columns", "time,price",
            "--calendar", str(cal), "--out", str(tmp_path),
        )
        assert rc == 2
        assert "error:" in capsys.readouterr().err


class TestExitCodes:
    def test_unsorted_input(self, tmp_path, capsys):
        src = tmp_path / "quotes.csv"
        src.write_text("10,1.00\n5,1.01\n")
        rc = run(
            "decompose", str(src),
            "--tick", "0.01", "--columns", "time,price", "--out", str(tmp_path),
        )
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        rc = run(
            "decompose", str(tmp_path / "nope.csv"),
            "--tick", "0.01", "--out", str(tmp_path),
        )
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_bad_tick(self, tmp_path, capsys):
        src = tmp_path / "quotes.csv"
        src.write_text("0,1.00\n")
        rc = run(
            "decompose", str(src),
            "--tick", "0", "--columns", "time,price", "--out", str(tmp_path),
        )
        assert rc == 2
        assert "error:" in capsys.readouterr().err


class TestSelftest:
    def test_passes(self, capsys):
        rc = run("selftest")
        assert rc == 0
        out = capsys.readouterr().out
        assert "oracle equivalence: ok (40 walks)" in out
        assert "fit recovery: ok" in out
