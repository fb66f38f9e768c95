"""From expansions to arithmetic.

* an independent oracle: q-expansion -> regular derivatives D^r f(p) ->
  Shimura-Maass derivatives -> power series coefficients b_n,
* CM normalisation ``f = f(p) (1 - w)^k sum c_n/n! (Theta w)^n``,
* residual checks for automorphy and Hecke relations,
* recognition of rationals and of elements of Q(sqrt d).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .mpnum import Arith, backend, binomial, kronecker_symbol, pochhammer
from .relations import ExpansionProblem, automorphy_row, hecke_kernel

log = logging.getLogger(__name__)


class AnalysisError(ValueError):
    pass


@dataclass
class ExpansionResult:
    """Coefficients of ``f = (1 - w)^k sum b_n w^n`` (unscaled)."""

    b: list
    R: object
    weight: int
    digits: int = 15
    theta: object = None
    theta_source: str | None = None
    c: list | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return len(self.b) - 1

    @property
    def ar(self) -> Arith:
        return backend(self.digits)

    def scaled(self) -> list:
        """``b'_n = b_n R^n``."""
        return [bn * self.R ** n for n, bn in enumerate(self.b)]

    def evaluate(self, w):
        acc = 0
        for bn in reversed(self.b):
            acc = acc * w + bn
        return (1 - w) ** self.weight * acc


@dataclass
class QExpansion:
    """``f = sum a[n] q^n``; ``a[0]`` is the constant term."""

    a: list
    weight: int
    level: int = 1
    normalized: bool = False

    def __post_init__(self):
        if self.normalized and (len(self.a) < 2 or self.a[1] != 1):
            raise AnalysisError("a normalised eigenform must have a_1 = 1")

    @property
    def M(self) -> int:
        return len(self.a) - 1


# ---------------------------------------------------------------------------
# q-expansions


def _euler_product(M: int) -> np.ndarray:
    """Coefficients of prod (1 - q^n) through q^M (pentagonal number theorem)."""
    out = np.zeros(M + 1, dtype=np.int64)
    k = 0
    while True:
        hit = False
        for kk in ((k, -k) if k else (0,)):
            e = kk * (3 * kk - 1) // 2
            if e <= M:
                out[e] += -1 if kk % 2 else 1
                hit = True
        if not hit:
            break
        k += 1
    return out


def _mul_trunc(a: np.ndarray, b: np.ndarray, M: int) -> np.ndarray:
    return np.convolve(a, b)[: M + 1]


def eta_product_expansion(M: int, level: int = 11) -> QExpansion:
    """``q prod (1 - q^n)^2 (1 - q^{level n})^2`` through q^M.

    For level 11 this is the weight-2 newform of that level.
    """
    if not 1 <= M <= 10 ** 6:
        raise ValueError("M must lie in [1, 10^6]")
    E = _euler_product(M)
    E2 = _mul_trunc(E, E, M)
    E2L = np.zeros(M + 1, dtype=np.int64)
    E2L[::level] = E2[: M // level + 1]
    prod = _mul_trunc(E2, E2L, M)
    a = [0] + [int(x) for x in prod[:M]]
    return QExpansion(a, weight=2, level=level, normalized=True)


def _tail_bound(M: int, r: int, k: int, absq: float) -> float:
    # |a_n| <= n^k is crude but safe for cusp forms of weight k
    n = M + 1
    if absq >= 1:
        return float("inf")
    log_term = (r + k) * math.log(n) + n * math.log(absq)
    ratio = ((n + 1) / n) ** (r + k) * absq
    if ratio >= 1:
        return float("inf")
    return math.exp(log_term) / (1 - ratio)


def required_terms(r_max: int, k: int, absq: float, eps: float) -> int:
    n = max(1, r_max + k)
    while _tail_bound(n, r_max, k, absq) > eps:
        n = int(n * 1.25) + 10
        if n > 10 ** 7:
            break
    return n


def qexp_derivative_values(f: QExpansion, p, r_max: int, ar: Arith | None = None, eps: float | None = None):
    """``(D^r f)(p) = sum_n n^r a_n q^n`` for r = 0..r_max, and a tail bound."""
    ar = ar or backend()
    eps = ar.tol(0) if eps is None else eps
    q = ar.expj(2 * ar.pi * p)
    absq = float(abs(q))
    tail = _tail_bound(f.M, r_max, f.weight, absq)
    if tail > eps:
        need = required_terms(r_max, f.weight, absq, eps)
        raise AnalysisError(f"q-expansion too short: tail bound {tail:.3g} > {eps:.3g}; need about M = {need}")
    terms = []
    qn = ar.cplx(1)
    for n in range(f.M + 1):
        if f.a[n]:
            terms.append((n, qn * f.a[n]))
        qn = qn * q
    out = []
    for r in range(r_max + 1):
        s = ar.cplx(0)
        for i, (n, t) in enumerate(terms):
            s += t
            terms[i] = (n, t * n)
        out.append(s)
    return out, tail


def _c_factor(y, ar: Arith):
    return -4 * ar.pi * y


def _partial_with_loss(Dvals, k: int, y, ar: Arith):
    c = _c_factor(y, ar)
    out, lost = [], 0.0
    for n in range(len(Dvals)):
        s = 0
        big = 0.0
        for r in range(n + 1):
            t = binomial(n, r) * pochhammer(k + r, n - r) / c ** (n - r) * Dvals[r]
            big = max(big, float(abs(t)))
            s += t
        out.append(s)
        if big > 0:
            lost = max(lost, math.log10(big / max(float(abs(s)), 1e-300)))
    return out, lost


def partial_from_regular(Dvals, k: int, y, ar: Arith | None = None):
    """Shimura-Maass derivatives ``(d^n f)(p)`` from regular ones ``(D^r f)(p)``."""
    return _partial_with_loss(Dvals, k, y, ar or backend())[0]


def regular_from_partial(Pvals, k: int, y, ar: Arith | None = None):
    """Inverse of :func:`partial_from_regular`."""
    ar = ar or backend()
    c = _c_factor(y, ar)
    out = []
    for n in range(len(Pvals)):
        s = 0
        for r in range(n + 1):
            sign = -1 if (n - r) % 2 else 1
            s += sign * binomial(n, r) * pochhammer(k + r, n - r) / c ** (n - r) * Pvals[r]
        out.append(s)
    return out


def power_series_from_qexp(f: QExpansion, p, N: int, ar: Arith | None = None, R=None) -> ExpansionResult:
    """Coefficients b_0..b_N at p from a q-expansion: ``b_n = d^n f(p) / n! (-4 pi y)^n``."""
    ar = ar or backend()
    y = p.imag
    Dvals, tail = qexp_derivative_values(f, p, N, ar)
    P, lost = _partial_with_loss(Dvals, f.weight, y, ar)
    if lost > ar.digits - 6:
        log.warning("oracle conversion cancels %.0f of %d digits; raise the precision", lost, ar.digits)
    c = _c_factor(y, ar)
    b = [P[n] / math.factorial(n) * c ** n for n in range(N + 1)]
    return ExpansionResult(b, R if R is not None else ar.real(1), f.weight, ar.digits,
                           diagnostics={"source": "q-expansion", "tail_bound": tail, "M": f.M, "digits_lost": lost})


# ---------------------------------------------------------------------------
# CM normalisation


def chowla_selberg_omega(d: int, h: int, ar: Arith | None = None):
    """``(2 d pi)^(-1/2) (prod_j Gamma(j/d)^(-d/j))^(1/(2h))``, d the absolute discriminant."""
    ar = ar or backend()
    if d <= 0 or h <= 0:
        raise ValueError("d and h must be positive")
    logsum = ar.real(0)
    for j in range(1, d):
        chi = kronecker_symbol(-d, j)
        if chi:
            logsum += chi * ar.log(ar.gamma(Fraction(j, d)))
    return ar.exp(logsum / (2 * h)) / ar.sqrt(2 * d * ar.pi)


def normalize_cm(res: ExpansionResult, theta_override=None, tol: float | None = None) -> ExpansionResult:
    """Fill in Theta and ``c_n = n! (b_n / b_0) / Theta^n``.

    Theta is ``b_1 / b_0`` unless ``theta_override`` is given (needed when
    b_1 vanishes, e.g. at an elliptic point of even order).
    """
    ar = res.ar
    b = res.b
    tol = ar.tol(6) if tol is None else tol
    scale = max(float(abs(x) * float(res.R) ** n) for n, x in enumerate(b))
    if abs(b[0]) <= tol * scale:
        raise AnalysisError("b_0 vanishes; the CM normalisation needs f(p) != 0")
    if theta_override is None:
        if abs(b[1]) * float(res.R) <= tol * scale:
            raise AnalysisError("b_1 vanishes; supply theta_override from an external period (e.g. -4 pi Omega^2)")
        theta, source = b[1] / b[0], "from_ratio"
    else:
        theta, source = theta_override, "external"
    c = []
    tn = 1
    for n, bn in enumerate(b):
        c.append(math.factorial(n) * (bn / b[0]) / tn)
        tn = tn * theta
    return replace(res, theta=theta, theta_source=source, c=c)


# ---------------------------------------------------------------------------
# verification


def _off_domain_points(prob: ExpansionProblem, count: int, seed: int, inner: float = 0.5):
    rng = np.random.default_rng(seed)
    ar = prob.ar
    pts = []
    tries = 0
    while len(pts) < count and tries < 50 * count:
        tries += 1
        r = float(prob.R) * rng.uniform(inner, 1.0)
        theta = rng.uniform(0, 2 * math.pi)
        w = ar.real(r) * ar.expj(ar.real(theta))
        if not prob.domain.contains(w):
            pts.append(w)
    return pts


def verify_automorphy(res: ExpansionResult, prob: ExpansionProblem, num_points: int = 10, seed: int = 0) -> float:
    """Largest ``|sum_n K^a_n(w) b'_n| / ||b'||`` over random points of the disc |w| <= R off D."""
    pts = _off_domain_points(prob, num_points, seed)
    if not pts:
        log.warning("no sample point outside the fundamental domain; nothing to verify")
        return 0.0
    bs = prob.ar.array(res.scaled()[: prob.N + 1])
    norm = float(max(abs(x) for x in bs))
    worst = 0.0
    for w in pts:
        row, trivial = automorphy_row(prob, w, scaled=True)
        if trivial:
            continue
        worst = max(worst, float(abs(row @ bs)) / norm)
    return worst


def verify_hecke(res: ExpansionResult, prob: ExpansionProblem, cosets, a_p) -> float:
    """``|a_p b_0 - sum K^h_n b_n|`` relative to ``|a_p b_0|``."""
    kh = hecke_kernel(prob, cosets, scaled=True)
    bs = prob.ar.array(res.scaled()[: prob.N + 1])
    lhs = a_p * res.b[0]
    denom = abs(lhs) if abs(lhs) > 0 else abs(res.b[0])
    return float(abs(lhs - kh @ bs) / denom)


# ---------------------------------------------------------------------------
# recognition


def _as_fraction(x) -> Fraction:
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    sign, man, exp, _ = (x if hasattr(x, "_mpf_") else x.real)._mpf_
    man = -int(man) if sign else int(man)
    return Fraction(man * 2 ** exp) if exp >= 0 else Fraction(man, 2 ** (-exp))


def recognize_rational(x, max_denominator: int = 10 ** 6, digits: int = 15):
    """Best rational approximation with bounded denominator, or None if not close enough."""
    xf = _as_fraction(x.real if hasattr(x, "imag") and not isinstance(x, (int, float, Fraction)) else x)
    cand = xf.limit_denominator(max_denominator)
    tol = 10.0 ** (6 - digits) * max(1.0, abs(float(xf)))
    return cand if abs(float(xf - cand)) <= tol else None


def _lll(basis: list[list[int]], delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """Textbook LLL with exact rational Gram-Schmidt; fine for tiny dimensions."""
    b = [list(v) for v in basis]
    n = len(b)

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    def gso():
        bstar, mu = [], [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = Fraction(dot(b[i], bstar[j])) / dot(bstar[j], bstar[j])
                v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
            bstar.append(v)
        return bstar, mu

    bstar, mu = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            qj = round(mu[k][j])
            if qj:
                b[k] = [x - qj * y for x, y in zip(b[k], b[j])]
                bstar, mu = gso()
        if dot(bstar[k], bstar[k]) >= (delta - mu[k][k - 1] ** 2) * dot(bstar[k - 1], bstar[k - 1]):
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            bstar, mu = gso()
            k = max(k - 1, 1)
    return b


def recognize_quadratic(x, d: int, height: int = 10 ** 6, digits: int = 15):
    """Find rationals (u, v) with ``x ~ u + v sqrt(d)``, or None.

    Lattice reduction on ``(1, x, sqrt d)`` scaled by about 10^digits /
    |x|, keeping the integer relation ``a x + b + c sqrt d = 0`` with
    ``H = max |a|, |b|, |c| <= height``.  Some relation of height H always
    comes within about ``H^-2 |x|`` of zero by chance, so a relation is only
    accepted when it beats that level by a factor 100 as well as matching
    the working precision.
    """
    import mpmath

    ctx = mpmath.MPContext()
    ctx.dps = digits + 10
    xv = ctx.mpf(x.real if hasattr(x, "imag") else x) if not isinstance(x, str) else ctx.mpf(x)
    sd = ctx.sqrt(d)
    size = max(ctx.mpf(1), abs(xv))
    S = ctx.mpf(10) ** (digits - 1) / size
    basis = [
        [1, 0, 0, int(ctx.nint(S * xv))],
        [0, 1, 0, int(ctx.nint(S))],
        [0, 0, 1, int(ctx.nint(S * sd))],
    ]
    tol = 10.0 ** (6 - digits) * float(size)
    for v in _lll(basis):
        a, bb, c = v[:3]
        if a == 0 or max(abs(a), abs(bb), abs(c)) > height:
            continue
        # judge the integer relation itself; dividing by a would let generic
        # lattice vectors through
        H = max(abs(a), abs(bb), abs(c))
        resid = abs(a * xv + bb + c * sd)
        if resid <= tol and resid <= 1e-2 * float(size) / H ** 2:
            return Fraction(-bb, a), Fraction(-c, a)
    return None


__all__ = [
    "AnalysisError",
    "ExpansionResult",
    "QExpansion",
    "chowla_selberg_omega",
    "eta_product_expansion",
    "normalize_cm",
    "partial_from_regular",
    "power_series_from_qexp",
    "qexp_derivative_values",
    "recognize_quadratic",
    "recognize_rational",
    "regular_from_partial",
    "required_terms",
    "verify_automorphy",
    "verify_hecke",
]
