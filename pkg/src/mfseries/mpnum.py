"""Precision-parametric arithmetic.

Every numerical routine in the package takes an :class:`Arith` instance and
only calls the methods defined here, so the same code runs in IEEE double
precision (numpy ``complex128`` arrays) or in extended precision (numpy
``object`` arrays of mpmath numbers).  Use :func:`backend` to obtain one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

DOUBLE_DIGITS = 15


@dataclass(frozen=True)
class Precision:
    """Number of significant decimal digits requested for a run."""

    digits: int = DOUBLE_DIGITS

    def __post_init__(self):
        if int(self.digits) != self.digits or self.digits < DOUBLE_DIGITS:
            raise ValueError(f"precision must be an integer >= {DOUBLE_DIGITS} digits, got {self.digits}")

    @property
    def extended(self) -> bool:
        return self.digits > DOUBLE_DIGITS

    @property
    def epsilon(self) -> float:
        return 10.0 ** (-self.digits)


class Arith:
    """Arithmetic contract shared by the double and extended backends."""

    precision: Precision
    dtype: object

    @property
    def digits(self) -> int:
        return self.precision.digits

    def tol(self, shift: int) -> float:
        """Return ``10**(shift - digits)`` as a plain float."""
        return 10.0 ** (shift - self.digits)

    # -- scalars ---------------------------------------------------------
    def real(self, x):
        raise NotImplementedError

    def cplx(self, re, im=0):
        raise NotImplementedError

    def from_fraction(self, q: Fraction):
        return self.real(q.numerator) / self.real(q.denominator)

    # -- arrays ----------------------------------------------------------
    def array(self, values):
        raise NotImplementedError

    def zeros(self, shape):
        raise NotImplementedError

    def eye(self, n: int):
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.cplx(1)
        return out

    def to_complex(self, arr) -> np.ndarray:
        """Round an array (or scalar) to ``complex128``."""
        return np.asarray(np.vectorize(complex, otypes=[complex])(arr), dtype=complex)

    def to_float(self, x) -> float:
        return float(x)

    def fmt(self, x) -> str:
        raise NotImplementedError

    def gamma(self, x):
        return gamma_eval(x, self.precision)


class DoubleArith(Arith):
    dtype = np.complex128
    unit_roundoff = 2.0 ** -53

    def __init__(self, precision: Precision | None = None):
        self.precision = precision or Precision()
        self.pi = math.pi

    def real(self, x):
        if isinstance(x, str):
            return float(mpmath.mpf(x))
        return float(x)

    def cplx(self, re, im=0):
        if isinstance(re, complex):
            return re + 1j * float(im)
        return complex(self.real(re), self.real(im))

    def sqrt(self, x):
        return cmath.sqrt(x) if isinstance(x, complex) or x < 0 else math.sqrt(x)

    def exp(self, x):
        return cmath.exp(x) if isinstance(x, complex) else math.exp(x)

    def log(self, x):
        return cmath.log(x) if isinstance(x, complex) else math.log(x)

    def expj(self, theta):
        return cmath.exp(1j * theta)

    def cos(self, x):
        return math.cos(x)

    def sin(self, x):
        return math.sin(x)

    def atan2(self, y, x):
        return math.atan2(y, x)

    def acosh(self, x):
        return math.acosh(x)

    def atanh(self, x):
        return math.atanh(x)

    def arg(self, z):
        return cmath.phase(z)

    def array(self, values):
        return np.array(values, dtype=np.complex128)

    def zeros(self, shape):
        return np.zeros(shape, dtype=np.complex128)

    def fmt(self, x) -> str:
        return repr(float(x))


class MPArith(Arith):
    dtype = object

    def __init__(self, precision: Precision):
        self.precision = precision
        self.ctx = mpmath.MPContext()
        self.ctx.dps = precision.digits
        self.unit_roundoff = float(self.ctx.mpf(2) ** (-self.ctx.prec))
        self.pi = self.ctx.pi

    def real(self, x):
        if isinstance(x, Fraction):
            return self.from_fraction(x)
        return self.ctx.mpf(x)

    def cplx(self, re, im=0):
        if isinstance(re, (complex, self.ctx.mpc)):
            return self.ctx.mpc(re) + self.ctx.mpc(0, 1) * self.real(im)
        return self.ctx.mpc(self.real(re), self.real(im))

    def sqrt(self, x):
        return self.ctx.sqrt(x)

    def exp(self, x):
        return self.ctx.exp(x)

    def log(self, x):
        return self.ctx.log(x)

    def expj(self, theta):
        return self.ctx.expj(theta)

    def cos(self, x):
        return self.ctx.cos(x)

    def sin(self, x):
        return self.ctx.sin(x)

    def atan2(self, y, x):
        return self.ctx.atan2(y, x)

    def acosh(self, x):
        return self.ctx.acosh(x)

    def atanh(self, x):
        return self.ctx.atanh(x)

    def arg(self, z):
        return self.ctx.arg(z)

    def array(self, values):
        arr = np.array(values, dtype=object)
        flat = arr.reshape(-1)
        for i, v in enumerate(flat):
            flat[i] = self.ctx.mpc(v)
        return arr

    def zeros(self, shape):
        out = np.empty(shape, dtype=object)
        out.reshape(-1)[:] = [self.ctx.mpc(0)] * out.size
        return out

    def fmt(self, x) -> str:
        return self.ctx.nstr(x, self.digits + 3)


@lru_cache(maxsize=None)
def backend(digits: int = DOUBLE_DIGITS) -> Arith:
    """Return the arithmetic backend for ``digits`` significant digits."""
    prec = Precision(digits)
    return MPArith(prec) if prec.extended else DoubleArith(prec)


# ---------------------------------------------------------------------------
# special functions

_LANCZOS_G = 7
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _gamma_lanczos(x: float) -> float:
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * _gamma_lanczos(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    t = x + _LANCZOS_G + 0.5
    for i in range(1, _LANCZOS_G + 2):
        acc += _LANCZOS_COEF[i] / (x + i)
    return math.sqrt(2 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def _gamma_stirling(x, digits: int):
    ctx = mpmath.MPContext()
    ctx.dps = digits + 10
    x = ctx.mpf(x)
    # shift the argument until the asymptotic series converges to the target
    shift = max(0, int(math.ceil(1.2 * digits - float(x))))
    z = x + shift
    lg = (z - ctx.mpf(1) / 2) * ctx.log(z) - z + ctx.log(2 * ctx.pi) / 2
    zpow = z
    zsq = z * z
    tiny = ctx.mpf(10) ** (-(digits + 8))
    for k in range(1, 4 * digits):
        term = ctx.bernoulli(2 * k) / (2 * k * (2 * k - 1) * zpow)
        lg += term
        if abs(term) < tiny:
            break
        zpow *= zsq
    denom = ctx.mpf(1)
    for i in range(shift):
        denom *= x + i
    return ctx.exp(lg) / denom


def gamma_eval(x, prec: Precision | int = DOUBLE_DIGITS):
    """Gamma function for positive real ``x``.

    Lanczos approximation in double precision, Stirling's series with an
    argument shift otherwise.
    """
    if not isinstance(prec, Precision):
        prec = Precision(prec)
    if not x > 0:
        raise ValueError(f"gamma_eval requires x > 0, got {x}")
    if not prec.extended:
        return _gamma_lanczos(float(x))
    work = mpmath.MPContext()
    work.dps = prec.digits + 10
    xv = work.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else work.mpf(x)
    return backend(prec.digits).real(_gamma_stirling(xv, prec.digits))


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a/n), extending the Jacobi symbol to all integers."""
    a, n = int(a), int(n)
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 == 1 and a % 8 in (3, 5):
            result = -result
    # n is now odd and positive: Jacobi symbol
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def pochhammer(a, m: int):
    """Rising factorial a(a+1)...(a+m-1); the empty product is 1."""
    if m < 0:
        raise ValueError("pochhammer needs m >= 0")
    out = 1
    for i in range(m):
        out = out * (a + i)
    return out


def binomial(n: int, r: int) -> int:
    return math.comb(n, r)
