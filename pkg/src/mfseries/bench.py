"""Timing and accuracy harness for the expensive kernels."""

from __future__ import annotations

import csv
import platform
import statistics
import sys
import time
from dataclasses import dataclass

import numpy as np

from .catalog import disc6_group, disc6_k4_exact
from .fuchsian import compute_dirichlet_domain, reduce_point
from .mpnum import backend
from .numkernel import svd
from .pipeline import SolveOptions, solve
from .relations import ExpansionProblem, cauchy_system


@dataclass
class Table1Row:
    N: int
    digits: int
    b1_error: float  # rho |b1 - b1_exact|
    max_error: float  # max_n rho^n |b_n - b_n_exact|, n <= 8
    seconds: float


@dataclass
class BenchResult:
    name: str
    param: int
    median_value: float
    unit: str


_DOMAINS: dict = {}


def disc6_domain(digits: int = 15):
    if digits not in _DOMAINS:
        ar = backend(digits)
        _DOMAINS[digits] = compute_dirichlet_domain(disc6_group(ar), signature=(0, 2, 2, 3, 3))
    return _DOMAINS[digits]


def table1_sweep(Ns, digits: int = 15, method: str = "lu") -> list[Table1Row]:
    """Weight 4 disc-6 expansion errors against the exact coefficients, per N."""
    dom = disc6_domain(digits)
    ar = dom.ar
    exact = disc6_k4_exact(ar)
    rows = []
    for N in Ns:
        t = time.perf_counter()
        res = solve(ExpansionProblem(dom, 4, N), SolveOptions(method=method))
        dt = time.perf_counter() - t
        rho = dom.rho
        errs = [float(abs(res.b[n] - exact[n]) * rho ** n) for n in range(min(N, len(exact) - 1) + 1)]
        rows.append(Table1Row(N, digits, errs[1], max(errs), dt))
    return rows


def _median_time(fn, reps: int) -> float:
    times = []
    for _ in range(max(3, reps)):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return statistics.median(times)


def throughput(op: str, size: int, reps: int = 3, seed: int = 0) -> BenchResult:
    """Median over at least three repetitions.

    ``reduce_point``: points per second for ``size`` random points in |w| < 0.95.
    ``svd``: milliseconds for a ``size`` x ``size`` complex double matrix.
    ``assembly``: milliseconds for the Simpson Cauchy operator at N = ``size``.
    """
    rng = np.random.default_rng(seed)
    if op == "reduce_point":
        dom = disc6_domain()
        r = 0.95 * np.sqrt(rng.random(size))
        pts = r * np.exp(2j * np.pi * rng.random(size))

        def run():
            for w in pts:
                reduce_point(dom, complex(w))

        return BenchResult(op, size, size / _median_time(run, reps), "points/s")
    if op == "svd":
        A = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        ar = backend()
        return BenchResult(op, size, 1e3 * _median_time(lambda: svd(A, ar), reps), "ms")
    if op == "assembly":
        dom = disc6_domain()
        return BenchResult(op, size, 1e3 * _median_time(
            lambda: cauchy_system(ExpansionProblem(dom, 4, size), "simpson"), reps), "ms")
    raise ValueError(f"unknown benchmark {op!r}")


def write_csv(results, stream=None):
    stream = stream or sys.stdout
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["name", "param", "median_value", "unit"])
    for r in results:
        w.writerow([r.name, r.param, f"{r.median_value:.6g}", r.unit])


def machine_metadata() -> dict:
    return {
        "python": platform.python_version(),
        "machine": platform.machine(),
        "processor": platform.processor(),
        "system": platform.system(),
        "numpy": np.__version__,
    }


__all__ = ["BenchResult", "Table1Row", "machine_metadata", "table1_sweep", "throughput", "write_csv"]
