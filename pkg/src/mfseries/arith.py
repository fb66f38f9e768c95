"""Exact arithmetic: Q(sqrt d), 2x2 matrices over it, quaternion orders over Q."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .hyper import RealMatrix2
from .mpnum import Arith


class ExactArithmeticError(ValueError):
    pass


def squarefree_part(n: int) -> tuple[int, int]:
    """Write ``n = m**2 * s`` with s squarefree; return ``(m, s)``."""
    if n == 0:
        raise ExactArithmeticError("0 has no squarefree part")
    sign = -1 if n < 0 else 1
    n = abs(n)
    m, s, f = 1, 1, 2
    while f * f <= n:
        while n % (f * f) == 0:
            n //= f * f
            m *= f
        if n % f == 0:
            n //= f
            s *= f
        f += 1
    return m, sign * s * n


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class QuadExt:
    """The number ``x + y*sqrt(d)`` with x, y rational and d squarefree.

    Rationals use ``d = 1`` and ``y = 0``; they combine with any field.
    """

    x: Fraction
    y: Fraction = Fraction(0)
    d: int = 1

    def __post_init__(self):
        object.__setattr__(self, "x", _frac(self.x))
        object.__setattr__(self, "y", _frac(self.y))
        if self.d == 1 and self.y != 0:
            object.__setattr__(self, "x", self.x + self.y)
            object.__setattr__(self, "y", Fraction(0))
        if self.d != 1 and squarefree_part(self.d)[0] != 1:
            raise ExactArithmeticError(f"d = {self.d} is not squarefree")

    @classmethod
    def sqrt(cls, n: int) -> "QuadExt":
        m, s = squarefree_part(int(n))
        if s == 1:
            return cls(Fraction(m))
        return cls(Fraction(0), Fraction(m), s)

    @classmethod
    def coerce(cls, v) -> "QuadExt":
        if isinstance(v, QuadExt):
            return v
        return cls(_frac(v))

    @property
    def is_rational(self) -> bool:
        return self.y == 0

    def _field(self, other: "QuadExt") -> int:
        if self.is_rational:
            return other.d
        if other.is_rational or other.d == self.d:
            return self.d
        raise ExactArithmeticError(f"cannot combine elements of Q(sqrt {self.d}) and Q(sqrt {other.d})")

    def __add__(self, other):
        other = QuadExt.coerce(other)
        d = self._field(other)
        return QuadExt(self.x + other.x, self.y + other.y, d) if d != 1 else QuadExt(self.x + other.x)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.x, -self.y, self.d)

    def __sub__(self, other):
        return self + (-QuadExt.coerce(other))

    def __rsub__(self, other):
        return QuadExt.coerce(other) - self

    def __mul__(self, other):
        other = QuadExt.coerce(other)
        d = self._field(other)
        x = self.x * other.x + self.y * other.y * d
        y = self.x * other.y + self.y * other.x
        return QuadExt(x, y, d) if d != 1 else QuadExt(x)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.x, -self.y, self.d)

    def norm(self) -> Fraction:
        return self.x * self.x - self.y * self.y * self.d

    def inverse(self) -> "QuadExt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in a quadratic field")
        c = self.conjugate()
        return QuadExt(c.x / n, c.y / n, self.d)

    def __truediv__(self, other):
        return self * QuadExt.coerce(other).inverse()

    def __rtruediv__(self, other):
        return QuadExt.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadExt(Fraction(1))
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, QuadExt):
            try:
                other = QuadExt.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        if self.is_rational and other.is_rational:
            return self.x == other.x
        return (self.x, self.y, self.d) == (other.x, other.y, other.d)

    def __hash__(self):
        return hash((self.x, self.y, self.d if self.y else 1))

    def sign(self, embedding_sign: int = 1) -> int:
        """Exact sign of the real number ``x + y*sqrt(d)`` (d > 0)."""
        x, y = self.x, self.y * embedding_sign
        if y == 0 or self.d == 1:
            return (x + y > 0) - (x + y < 0)
        if self.d < 0:
            raise ExactArithmeticError("sign of a non-real number")
        sx, sy = (x > 0) - (x < 0), (y > 0) - (y < 0)
        if sx == sy or sx == 0:
            return sy
        # opposite signs: compare x^2 with y^2 d
        return sx if x * x > y * y * self.d else sy

    def numeric(self, ar: Arith, embedding_sign: int = 1):
        if self.is_rational:
            return ar.from_fraction(self.x)
        if self.d < 0:
            raise ExactArithmeticError("numeric real embedding of a non-real number")
        return ar.from_fraction(self.x) + embedding_sign * ar.from_fraction(self.y) * ar.sqrt(ar.real(self.d))

    def __repr__(self):
        if self.is_rational:
            return str(self.x)
        return f"{self.x} + {self.y}*sqrt({self.d})"


def _q(v) -> QuadExt:
    return QuadExt.coerce(v)


@dataclass(frozen=True)
class ExactMatrix2:
    """Exact element of SL2(Q(sqrt d)) with a chosen real embedding."""

    a: QuadExt
    b: QuadExt
    c: QuadExt
    d: QuadExt
    embedding_sign: int = 1

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, _q(getattr(self, name)))
        if self.det != 1:
            raise ExactArithmeticError(f"determinant {self.det} != 1")

    @property
    def det(self) -> QuadExt:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "ExactMatrix2") -> "ExactMatrix2":
        return ExactMatrix2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.embedding_sign,
        )

    def inverse(self) -> "ExactMatrix2":
        return ExactMatrix2(self.d, -self.b, -self.c, self.a, self.embedding_sign)

    def __neg__(self):
        return ExactMatrix2(-self.a, -self.b, -self.c, -self.d, self.embedding_sign)

    def canonical(self) -> "ExactMatrix2":
        """Representative of +-g with trace >= 0 (then c > 0, then d > 0)."""
        for entry in (self.a + self.d, self.c, self.d):
            s = entry.sign(self.embedding_sign)
            if s:
                return self if s > 0 else -self
        return self

    def is_identity(self) -> bool:
        g = self.canonical()
        return g.a == 1 and g.b == 0 and g.c == 0 and g.d == 1

    def key(self) -> tuple:
        g = self.canonical()
        return (g.a, g.b, g.c, g.d)

    def numeric_embed(self, ar: Arith) -> RealMatrix2:
        e = self.embedding_sign
        return RealMatrix2(*(x.numeric(ar, e) for x in (self.a, self.b, self.c, self.d))).canonical()

    @classmethod
    def identity(cls) -> "ExactMatrix2":
        return cls(_q(1), _q(0), _q(0), _q(1))


# ---------------------------------------------------------------------------
# quaternion algebras over Q


@dataclass(frozen=True)
class QuaternionAlgebraQ:
    """The algebra (a, b | Q): alpha^2 = a, beta^2 = b, beta alpha = -alpha beta."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", _frac(self.a))
        object.__setattr__(self, "b", _frac(self.b))
        if self.a == 0 or self.b == 0:
            raise ExactArithmeticError("quaternion algebra parameters must be nonzero")

    def one(self) -> "QuaternionElement":
        return QuaternionElement(1, 0, 0, 0)


@dataclass(frozen=True)
class QuaternionElement:
    """t + u*alpha + v*beta + s*alpha*beta."""

    t: Fraction
    u: Fraction = Fraction(0)
    v: Fraction = Fraction(0)
    s: Fraction = Fraction(0)

    def __post_init__(self):
        for name in "tuvs":
            object.__setattr__(self, name, _frac(getattr(self, name)))

    @property
    def coords(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.t, self.u, self.v, self.s)

    def __add__(self, other):
        if not isinstance(other, QuaternionElement):
            other = QuaternionElement(other)
        return QuaternionElement(*(x + y for x, y in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return QuaternionElement(*(-x for x in self.coords))

    def __sub__(self, other):
        if not isinstance(other, QuaternionElement):
            other = QuaternionElement(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, r) -> "QuaternionElement":
        r = _frac(r)
        return QuaternionElement(*(r * x for x in self.coords))

    def mul(self, other: "QuaternionElement", alg: QuaternionAlgebraQ) -> "QuaternionElement":
        a, b = alg.a, alg.b
        t1, u1, v1, s1 = self.coords
        t2, u2, v2, s2 = other.coords
        return QuaternionElement(
            t1 * t2 + a * u1 * u2 + b * v1 * v2 - a * b * s1 * s2,
            t1 * u2 + u1 * t2 - b * v1 * s2 + b * s1 * v2,
            t1 * v2 + v1 * t2 + a * u1 * s2 - a * s1 * u2,
            t1 * s2 + s1 * t2 + u1 * v2 - v1 * u2,
        )

    def conjugate(self) -> "QuaternionElement":
        return QuaternionElement(self.t, -self.u, -self.v, -self.s)

    def __repr__(self):
        return f"Q({self.t}, {self.u}, {self.v}, {self.s})"


def reduced_norm(x: QuaternionElement, alg: QuaternionAlgebraQ) -> Fraction:
    """nrd(x) = x * conj(x) = t^2 - a u^2 - b v^2 + a b s^2."""
    a, b = alg.a, alg.b
    return x.t * x.t - a * x.u * x.u - b * x.v * x.v + a * b * x.s * x.s


def reduced_trace(x: QuaternionElement) -> Fraction:
    return 2 * x.t


def _solve_rational(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rows)
    m = [list(r) + [v] for r, v in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ExactArithmeticError("order basis is linearly dependent")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


@dataclass(frozen=True)
class OrderQ:
    """Z-lattice spanned by four quaternions, required to be a ring with 1."""

    alg: QuaternionAlgebraQ
    basis: tuple[QuaternionElement, QuaternionElement, QuaternionElement, QuaternionElement]

    def __post_init__(self):
        if len(self.basis) != 4:
            raise ExactArithmeticError("an order needs exactly four basis elements")
        one = self.coordinates(self.alg.one())
        if any(c.denominator != 1 for c in one):
            raise ExactArithmeticError("order does not contain 1")
        for x, y in itertools.product(self.basis, repeat=2):
            coords = self.coordinates(x.mul(y, self.alg))
            if any(c.denominator != 1 for c in coords):
                raise ExactArithmeticError(f"order is not closed under multiplication: {x} * {y}")

    def coordinates(self, x: QuaternionElement) -> list[Fraction]:
        """Coordinates of x in the order basis (rational in general)."""
        rows = [[self.basis[j].coords[i] for j in range(4)] for i in range(4)]
        return _solve_rational(rows, list(x.coords))

    def element(self, coeffs) -> QuaternionElement:
        out = QuaternionElement(0)
        for c, e in zip(coeffs, self.basis):
            out = out + e.scale(c)
        return out

    @cached_property
    def norm_form(self) -> list[list[Fraction]]:
        """Symmetric matrix G with nrd(sum n_i e_i) = n^T G n."""
        g = [[Fraction(0)] * 4 for _ in range(4)]
        for i in range(4):
            g[i][i] = reduced_norm(self.basis[i], self.alg)
        for i, j in itertools.combinations(range(4), 2):
            both = reduced_norm(self.basis[i] + self.basis[j], self.alg)
            g[i][j] = g[j][i] = (both - g[i][i] - g[j][j]) / 2
        return g


def _sign_canonical(x: QuaternionElement) -> QuaternionElement:
    for c in x.coords:
        if c != 0:
            return x if c > 0 else -x
    return x


def enumerate_norm_one_units(order: OrderQ, height: int) -> list[QuaternionElement]:
    """Norm-one units with basis coordinates bounded by ``height``.

    Results are taken up to sign, closed under conjugation (the inverse of a
    norm-one unit) and sorted canonically.
    """
    if height < 0:
        raise ValueError("height must be nonnegative")
    g = order.norm_form
    found: set[QuaternionElement] = set()
    rng = range(-height, height + 1)
    for n in itertools.product(rng, repeat=4):
        val = sum(g[i][j] * n[i] * n[j] for i in range(4) for j in range(4))
        if val == 1:
            x = _sign_canonical(order.element(n))
            found.add(x)
            found.add(_sign_canonical(x.conjugate()))
    found.add(order.alg.one())
    return sorted(found, key=lambda x: (sum(abs(c) for c in x.coords), x.coords))


def embed_quaternion(x: QuaternionElement, alg: QuaternionAlgebraQ) -> tuple[QuadExt, QuadExt, QuadExt, QuadExt]:
    """Entries (a, b, c, d) of the image of x under the real splitting.

    alpha -> diag(sqrt a, -sqrt a), beta -> (0 1; b 0).  The map is a ring
    homomorphism into M2(Q(sqrt a)) and sends nrd to det.
    """
    if alg.a <= 0:
        raise ExactArithmeticError("the real splitting needs a > 0")
    if alg.a.denominator != 1:
        raise ExactArithmeticError("the real splitting needs an integral a")
    ra = QuadExt.sqrt(int(alg.a))
    t, u, v, s = (QuadExt(c) for c in x.coords)
    b = QuadExt(alg.b)
    return (t + u * ra, v + s * ra, b * v - b * s * ra, t - u * ra)


def embed_unit(x: QuaternionElement, alg: QuaternionAlgebraQ, embedding_sign: int = 1) -> ExactMatrix2:
    """Image of a norm-one quaternion in SL2(Q(sqrt a))."""
    if reduced_norm(x, alg) != 1:
        raise ExactArithmeticError(f"{x} does not have reduced norm 1")
    return ExactMatrix2(*embed_quaternion(x, alg), embedding_sign)
