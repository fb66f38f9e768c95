"""Acceptance criteria, one test each; a summary table prints at the end of the run."""

import cmath
import json
import math
import time
from pathlib import Path

import mpmath
import numpy as np
import pytest

from mfseries.analysis import (
    chowla_selberg_omega,
    eta_product_expansion,
    normalize_cm,
    partial_from_regular,
    power_series_from_qexp,
    recognize_quadratic,
    regular_from_partial,
)
from mfseries.catalog import DISC6_SIGNATURE, disc6_group, disc6_k4_exact, gamma0_11_center
from mfseries.cli import main
from mfseries.fuchsian import FuchsianGroup, compute_dirichlet_domain, reduce_point
from mfseries.hyper import RealMatrix2, act_half_plane, from_disc, to_disc
from mfseries.models import hyperelliptic_fit, j_invariant
from mfseries.mpnum import backend
from mfseries.numkernel import numerical_kernel, svd
from mfseries.pipeline import SolveOptions, assemble, solve
from mfseries.relations import ExpansionProblem, cauchy_system

from .test_models import synthetic_pair

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def scaled_error(b, exact, rho):
    return max(float(abs(b[n] - exact[n]) * rho ** n) for n in range(len(exact)))


def test_criterion_1_disc6_double(report):
    t = time.perf_counter()
    ar = backend()
    dom = compute_dirichlet_domain(disc6_group(ar), signature=DISC6_SIGNATURE)
    prob = ExpansionProblem(dom, 4, 35)
    res = solve(prob, SolveOptions(quadrature="simpson"))
    dt = time.perf_counter() - t
    err = scaled_error(res.b, disc6_k4_exact(ar), dom.rho)
    ok = prob.Q == 70 and err <= 1e-11 and dt <= 60
    report(1, ok, f"N=35 Q=70 double: max rho^n err {err:.2e} (<= 1e-11), {dt:.1f}s (<= 60s)")
    assert ok


def test_criterion_2_disc6_extended(report):
    try:
        ar = backend(30)
    except Exception as exc:  # pragma: no cover - mpmath is a hard dependency
        pytest.skip(f"extended backend unavailable: {exc}")
    t = time.perf_counter()
    dom = compute_dirichlet_domain(disc6_group(ar), signature=DISC6_SIGNATURE)
    res = solve(ExpansionProblem(dom, 4, 70), SolveOptions())
    dt = time.perf_counter() - t
    err = scaled_error(res.b, disc6_k4_exact(ar), dom.rho)
    ok = err <= 1e-20 and dt <= 600
    report(2, ok, f"N=70 at 30 digits: max rho^n err {err:.2e} (<= 1e-20), {dt:.1f}s (<= 600s)")
    assert ok


def test_criterion_3_oracle(report):
    ar = backend(30)
    res = normalize_cm(power_series_from_qexp(eta_product_expansion(2000), gamma0_11_center(ar), 5, ar))
    target = [1, 1, 5, -123, -59, -6435]
    dev = max(float(abs(c - t)) for c, t in zip(res.c, target))
    omega = chowla_selberg_omega(7, 1, ar)
    theta = (-4 + 2 * ar.sqrt(ar.real(-7) + 0j)) / 11 * ar.pi * omega ** 2
    rel = float(abs(res.theta - theta) / abs(theta))
    ok = dev <= 1e-6 and rel <= 1e-8
    report(3, ok, f"c_0..c_5 max |c - integer| {dev:.1e} (<= 1e-6); Theta rel err {rel:.1e} (<= 1e-8)")
    assert ok


@pytest.mark.slow
def test_criterion_4_gamma0_11_pipeline(report, tmp_path):
    t = time.perf_counter()
    code = main(["compute", str(CONFIGS / "gamma0_11.cfg"), "--out", str(tmp_path)])
    dt = time.perf_counter() - t
    data = json.loads((tmp_path / "result.json").read_text())
    orc = data["checks"].get("oracle", {})
    err = orc.get("max_scaled_error", float("inf"))
    skipped = data.get("errors", [])
    ok = data["precision_digits"] >= 25 and data["N"] == 300 and err <= 1e-6 and not skipped
    report(4, ok, f"Gamma0(11) N=300, 25 digits, T2..T13: first 10 coeffs err {err:.2e} (<= 1e-6), "
                  f"{dt:.0f}s, exit {code}")
    assert ok


def test_criterion_5_kernel_quality(report, disc6_domain):
    prob = ExpansionProblem(disc6_domain, 4, 35)
    kern = numerical_kernel(assemble(prob, SolveOptions()), expected_dim=1)
    below = sum(1 for s in kern.singular_values if s <= kern.kernel_threshold * kern.singular_values[0])
    ok = kern.dimension == 1 and below == 1 and kern.quality >= 1e6 and not kern.flagged
    report(5, ok, f"kernel dim {kern.dimension} (expected 1), quality {kern.quality:.1e} (>= 1e6)")
    assert ok


def _property_checks(disc6_domain):
    out = {}
    rng = np.random.default_rng(0)

    worst = 0.0
    for digits in (15, 30):
        ar = backend(digits)
        triv = compute_dirichlet_domain(FuchsianGroup([], ar.cplx(0, 1), ar), require_cocompact=False)
        prob = ExpansionProblem(triv, 2, 12, Q=20, R=ar.real("0.7"))
        for quad in ("simpson", "riemann"):
            K = cauchy_system(prob, quad).operator(ar)
            err = max(float(abs(x)) for x in (K - ar.eye(13)).ravel())
            worst = max(worst, err / 10 ** (3 - digits))
    out["trivial-group operator = I"] = worst <= 1

    worst = 0.0
    for _ in range(200):
        a, b, c = rng.uniform(-2, 2, 3)
        if abs(a) < 0.2:
            continue
        g = RealMatrix2(a, b, c, (1 + b * c) / a)
        h = RealMatrix2(1.0, rng.uniform(-2, 2), 0.0, 1.0)
        z = complex(rng.uniform(-2, 2), rng.uniform(0.2, 2))
        hz, jh = act_half_plane(h, z)
        _, jg = act_half_plane(g, hz)
        _, jgh = act_half_plane(g @ h, z)
        p = complex(rng.uniform(-1, 1), rng.uniform(0.3, 2))
        rt = abs(from_disc(p, to_disc(p, z)) - z) / max(1, abs(z))
        worst = max(worst, abs(jgh - jg * jh) / max(1, abs(jgh)), rt)
    out["cocycle and chart round trips"] = worst <= 1e-13

    ok = True
    for _ in range(200):
        w = 0.95 * math.sqrt(rng.random()) * cmath.exp(2j * math.pi * rng.random())
        first = reduce_point(disc6_domain, w)
        again = reduce_point(disc6_domain, first.w_prime)
        ok &= again.word == () and again.w_prime == first.w_prime
    out["reduce_point idempotent"] = ok

    out["disc-6 area = 2 pi / 3"] = abs(disc6_domain.area - 2 * math.pi / 3) <= 1e-6

    worst = 0.0
    for n in (5, 20, 40):
        A = rng.standard_normal((n + 3, n)) + 1j * rng.standard_normal((n + 3, n))
        res = svd(A)
        worst = max(worst, np.abs(res.U.conj().T @ res.U - np.eye(n)).max(),
                    np.abs(res.V.conj().T @ res.V - np.eye(n)).max(),
                    np.abs(res.reconstruct() - A).max() / np.abs(A).max())
    out["SVD unitarity and reconstruction"] = worst <= 1e-11

    worst = 0.0
    ar = backend()
    for k in (2, 4, 6):
        y = 2 + 2 * rng.random()
        v = list(rng.standard_normal(13) + 1j * rng.standard_normal(13))
        back = regular_from_partial(partial_from_regular(v, k, y, ar), k, y, ar)
        worst = max(worst, max(abs(a - b) for a, b in zip(back, v)) / max(abs(x) for x in v))
    out["D <-> partial inverse pair"] = worst <= 1e-10

    out["j(i) = 1728, j(rho) = 0"] = (abs(j_invariant(1j) - 1728) <= 1e-9
                                      and abs(j_invariant(cmath.exp(2j * math.pi / 3))) <= 1e-9)

    q = np.array(hyperelliptic_fit(*synthetic_pair(60)).q)
    out["hyperelliptic x^6 + 1 recovery"] = np.abs(q - [1, 0, 0, 0, 0, 0, 1]).max() <= 1e-9
    return out


def test_criterion_6_property_suites(report, disc6_domain):
    checks = _property_checks(disc6_domain)
    failed = [name for name, ok in checks.items() if not ok]
    detail = f"{len(checks) - len(failed)}/{len(checks)} property checks" + (f"; failed: {failed}" if failed else "")
    report(6, not failed, detail)
    assert not failed


def test_criterion_7_recognition(report):
    ar = backend(20)
    a = (1 - ar.sqrt(ar.real(5))) / 2
    cases = [((70, 114), (149, -35)), ((8064, 13038), (17070, -4032)), ((174888, 282972), (370416, -87444))]
    got = []
    for (s, t), want in cases:
        text = mpmath.nstr(s * a + t, 20)
        got.append(recognize_quadratic(text, 5, digits=20) == want)
    report(7, all(got), f"{sum(got)}/3 numerators recovered exactly in Q(sqrt 5) from 20-digit strings")
    assert all(got)
