import csv
import io
import json
from pathlib import Path

import pytest

from mfseries.bench import BenchResult, machine_metadata, table1_sweep, throughput, write_csv

BASELINE = Path(__file__).parent / "data" / "bench_baseline.json"


def test_table1_double_precision():
    rows = table1_sweep([10, 20, 35])
    assert [r.N for r in rows] == [10, 20, 35]
    assert rows[0].max_error > rows[2].max_error
    assert rows[0].max_error >= rows[1].max_error >= rows[2].max_error
    assert rows[2].max_error <= 1e-11
    assert rows[2].b1_error <= rows[2].max_error


def test_csv_format():
    buf = io.StringIO()
    write_csv([BenchResult("svd", 71, 1234.5678, "ms"), BenchResult("reduce_point", 10000, 1.5e4, "points/s")], buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[0] == ["name", "param", "median_value", "unit"]
    assert rows[1] == ["svd", "71", "1234.57", "ms"]
    assert float(rows[2][2]) == 15000
    assert set(machine_metadata()) >= {"python", "machine", "numpy"}


def test_throughput_rejects_unknown():
    with pytest.raises(ValueError):
        throughput("fft", 8)


def test_reduce_point_rate_against_baseline():
    # frozen by scripts/run_bench.py --freeze on the development machine; allowed to drift 3x
    base = json.loads(BASELINE.read_text())["reduce_point"]
    res = throughput("reduce_point", 2000)
    assert res.unit == "points/s"
    assert res.median_value >= base / 3
