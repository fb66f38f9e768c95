"""Periods, lattice invariants and hyperelliptic models from weight-2 expansions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import ExpansionResult
from .mpnum import Arith, backend
from .numkernel import lu_least_squares


class ModelError(ValueError):
    pass


# ---------------------------------------------------------------------------
# lattices and j


def reduce_tau(tau, max_steps: int = 10 ** 4):
    """Move tau into the standard fundamental domain; returns ``(tau', (a, b, c, d))``.

    ``tau' = (a tau + b)/(c tau + d)`` with ``|Re tau'| <= 1/2`` and
    ``|tau'| >= 1``.
    """
    if not tau.imag > 0:
        raise ModelError("tau must lie in the upper half-plane")
    a, b, c, d = 1, 0, 0, 1
    for _ in range(max_steps):
        n = math.floor(float(tau.real) + 0.5)
        if n:
            tau = tau - n
            a, b = a - n * c, b - n * d
        if abs(tau) < 1 - 1e-15:
            tau = -1 / tau
            a, b, c, d = -c, -d, a, b
        else:
            return tau, (a, b, c, d)
    raise ModelError("tau reduction did not terminate")


@dataclass
class PeriodLattice:
    """``Z omega1 + Z omega2`` with ``tau = omega1/omega2`` reduced."""

    omega1: object
    omega2: object
    tau: object = field(init=False)

    def __post_init__(self):
        if self.omega2 == 0:
            raise ModelError("omega2 must be nonzero")
        tau = self.omega1 / self.omega2
        if abs(tau.imag) <= 1e-300 or tau.imag == 0:
            raise ModelError("periods are linearly dependent over R")
        w1, w2 = self.omega1, self.omega2
        if tau.imag < 0:
            w1, tau = -w1, -tau
        tau, (a, b, c, d) = reduce_tau(tau)
        self.omega1, self.omega2 = a * w1 + b * w2, c * w1 + d * w2
        self.tau = self.omega1 / self.omega2

    def reduce(self, z):
        """Subtract the nearest lattice point (ties toward zero)."""
        w1, w2 = self.omega1, self.omega2
        det = w1.real * w2.imag - w1.imag * w2.real
        x = (z.real * w2.imag - z.imag * w2.real) / det
        y = (w1.real * z.imag - w1.imag * z.real) / det
        return z - _round_half_to_zero(x) * w1 - _round_half_to_zero(y) * w2


def _round_half_to_zero(x) -> int:
    f = math.floor(float(x))
    frac = float(x) - f
    if frac > 0.5:
        return f + 1
    if frac < 0.5:
        return f
    return f if f >= 0 else f + 1


def _series_terms(absq: float, power: int, digits: int) -> int:
    n = 1
    target = -(digits + 5) * math.log(10)
    while power * math.log(n) + n * math.log(absq) > target:
        n += 1
    return n + 1


def eisenstein_e4_e6(tau, ar: Arith):
    """``E_4(tau)``, ``E_6(tau)`` from their q-series (tau reduced)."""
    q = ar.expj(2 * ar.pi * tau)
    absq = float(abs(q))
    M = _series_terms(absq, 6, ar.digits)
    e4, e6 = ar.cplx(1), ar.cplx(1)
    qn = ar.cplx(1)
    for n in range(1, M + 1):
        qn = qn * q
        s3 = s5 = 0
        for dd in range(1, int(math.isqrt(n)) + 1):
            if n % dd == 0:
                for e in {dd, n // dd}:
                    s3 += e ** 3
                    s5 += e ** 5
        e4 += 240 * s3 * qn
        e6 -= 504 * s5 * qn
    return e4, e6


def discriminant_delta(tau, ar: Arith):
    """``Delta = q prod (1 - q^n)^24``."""
    q = ar.expj(2 * ar.pi * tau)
    M = _series_terms(float(abs(q)), 0, ar.digits)
    prod = ar.cplx(1)
    qn = ar.cplx(1)
    for _ in range(M):
        qn = qn * q
        prod = prod * (1 - qn)
    return q * prod ** 24


def j_invariant(tau, ar: Arith | None = None):
    ar = ar or backend()
    tau, _ = reduce_tau(tau)
    if tau.imag < 1e-3:
        raise ModelError("tau too close to the real axis")
    e4, _ = eisenstein_e4_e6(tau, ar)
    return e4 ** 3 / discriminant_delta(tau, ar)


def j_from_lattice(L: PeriodLattice, ar: Arith | None = None):
    return j_invariant(L.tau, ar)


# ---------------------------------------------------------------------------
# periods


def _check_weight2(res: ExpansionResult):
    if res.weight != 2:
        raise ModelError(f"periods need a weight 2 form, got weight {res.weight}")


def antiderivative_eval(res: ExpansionResult, w):
    """``sum b_n w^(n+1) / (n+1)``: primitive of ``f dw / (1 - w)^2``."""
    _check_weight2(res)
    acc = 0
    for n in range(len(res.b) - 1, -1, -1):
        acc = acc * w + res.b[n] / (n + 1)
    return acc * w


def period_integral(res: ExpansionResult, start, end, slack: float = 1e-9):
    """Integral of ``f dw / (1 - w)^2`` from ``start`` to ``end``."""
    _check_weight2(res)
    lim = float(res.R) * (1 + slack)
    for pt in (start, end):
        if abs(pt) > lim:
            raise ModelError(f"endpoint {pt} lies outside the validated radius {float(res.R)}")
    return antiderivative_eval(res, end) - antiderivative_eval(res, start)


# ---------------------------------------------------------------------------
# Laurent series helpers: (valuation, coefficient array)


def _mul(a, b, n):
    va, ca = a
    vb, cb = b
    out = np.convolve(ca, cb)[:n] if ca.dtype != object else _conv_obj(ca, cb, n)
    return va + vb, out


def _conv_obj(a, b, n):
    out = np.empty(min(n, len(a) + len(b) - 1), dtype=object)
    for k in range(len(out)):
        s = 0
        for i in range(max(0, k - len(b) + 1), min(k, len(a) - 1) + 1):
            s += a[i] * b[k - i]
        out[k] = s
    return out


def _inv(a, n):
    v, c = a
    inv = np.empty(n, dtype=c.dtype)
    inv[0] = 1 / c[0]
    for k in range(1, n):
        s = 0
        for i in range(1, min(k, len(c) - 1) + 1):
            s += c[i] * inv[k - i]
        inv[k] = -s / c[0]
    return -v, inv


def _deriv(a):
    v, c = a
    e = np.array([v + i for i in range(len(c))])
    return v - 1, c * e


@dataclass
class HyperellipticFit:
    q: list  # q_0 .. q_{2g+2}
    residual: float
    variable: str
    equations: int
    held_out: int


def hyperelliptic_fit(g_series: ExpansionResult, h_series: ExpansionResult, genus: int = 2,
                      held_out: int = 10, tol: float | None = None) -> HyperellipticFit:
    """Fit ``y^2 = q(x)`` with ``x = g/h``, ``y = x'/h`` as Laurent series.

    The ``(1 - w)^2`` factors cancel in x and only rescale y by a constant,
    so the bracketed series are used directly.  When both inputs carry a
    CM normalisation the variable is ``Theta w``.
    """
    ar = g_series.ar if g_series.digits >= h_series.digits else h_series.ar
    tol = ar.tol(4) if tol is None else tol
    deg = 2 * genus + 2
    G = ar.array(g_series.b)
    H = ar.array(h_series.b)
    variable = "w"
    if g_series.theta is not None and h_series.theta is not None:
        theta = h_series.theta
        G = ar.array([x / theta ** n for n, x in enumerate(g_series.b)])
        H = ar.array([x / theta ** n for n, x in enumerate(h_series.b)])
        variable = "theta*w"
    R = float(h_series.R)
    scale = max(float(abs(x)) * R ** n for n, x in enumerate(h_series.b))
    if abs(h_series.b[0]) > tol * scale:
        raise ModelError("h must vanish at the centre (simple zero at w = 0)")
    if abs(h_series.b[1]) * R <= tol * scale:
        raise ModelError("h must have a simple zero at w = 0, but b_1 vanishes too")
    if abs(g_series.b[0]) <= tol * max(float(abs(x)) * R ** n for n, x in enumerate(g_series.b)):
        raise ModelError("g must not vanish at the centre")
    n = min(len(G), len(H) - 1)
    hs = (1, H[1:n + 1])
    gs = (0, G[:n])
    hinv = _inv(hs, n)
    x = _mul(gs, hinv, n)
    y = _mul(_deriv(x), hinv, n)
    y2 = _mul(y, y, n)
    powers = [(0, ar.array([1] + [0] * (n - 1)))]
    for _ in range(deg):
        powers.append(_mul(powers[-1], x, n))
    # match coefficients of w^m for m = -deg .. -deg + rows - 1
    v0 = y2[0]
    need = deg + 1 + held_out
    usable = min(len(y2[1]), *(len(pw[1]) - (v0 - pw[0]) for pw in powers))
    if usable < need:
        raise ModelError(f"series too short for the fit: have {usable} coefficients, need {need}; increase N")

    def coeff(series, m):
        v, c = series
        i = m - v
        return c[i] if 0 <= i < len(c) else 0

    rows = list(range(v0, v0 + need))
    A = ar.zeros((need, deg + 1))
    rhs = ar.zeros(need)
    for r, m in enumerate(rows):
        rhs[r] = coeff(y2, m)
        for i, pw in enumerate(powers):
            A[r, i] = coeff(pw, m)
    fit_rows = deg + 1
    qv = lu_least_squares(A[:fit_rows], rhs[:fit_rows], ar)
    resid = A[fit_rows:] @ qv - rhs[fit_rows:]
    qn = max(float(abs(c)) for c in qv)
    res = max(float(abs(c)) for c in resid) if len(resid) else 0.0
    if res > tol * max(qn, 1.0):
        raise ModelError(f"ill-conditioned fit: held-out residual {res:.3g} vs |q| {qn:.3g}; increase N")
    return HyperellipticFit(list(qv), res, variable, fit_rows, len(resid))


__all__ = [
    "HyperellipticFit",
    "ModelError",
    "PeriodLattice",
    "antiderivative_eval",
    "discriminant_delta",
    "eisenstein_e4_e6",
    "hyperelliptic_fit",
    "j_from_lattice",
    "j_invariant",
    "period_integral",
    "reduce_tau",
]
