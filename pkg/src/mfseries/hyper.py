"""Upper half-plane and Poincare disc: charts, Mobius actions, distances.

Points are plain complex scalars (``complex`` or mpmath ``mpc``); the disc
chart is always taken relative to a centre ``p`` in the upper half-plane,
``w = (z - p)/(z - conj(p))``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .mpnum import Arith, backend


class GeometryError(ValueError):
    pass


def _check_half_plane(z, name="z"):
    if not z.imag > 0:
        raise GeometryError(f"{name} = {z} is not in the upper half-plane")


def _check_disc(w):
    if not abs(w) < 1:
        raise GeometryError(f"w = {w} is not inside the unit disc")


def to_disc(p, z):
    """Map z in H to the disc chart centred at p."""
    _check_half_plane(p, "p")
    _check_half_plane(z)
    return (z - p) / (z - p.conjugate())


def from_disc(p, w):
    """Inverse of :func:`to_disc`."""
    _check_half_plane(p, "p")
    _check_disc(w)
    return (p.conjugate() * w - p) / (w - 1)


@dataclass(frozen=True)
class RealMatrix2:
    """A matrix in SL2(R), considered up to sign.

    ``canonical()`` picks the representative with non-negative trace (and
    with ``c > 0``, or ``c == 0`` and ``d > 0``, when the trace vanishes).
    """

    a: object
    b: object
    c: object
    d: object

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "RealMatrix2") -> "RealMatrix2":
        return RealMatrix2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "RealMatrix2":
        # det is 1, so the adjugate is the inverse
        return RealMatrix2(self.d, -self.b, -self.c, self.a)

    def normalized(self, ar: Arith) -> "RealMatrix2":
        det = self.det
        if not det > 0:
            raise GeometryError("matrix must have positive determinant")
        s = ar.sqrt(det)
        return RealMatrix2(self.a / s, self.b / s, self.c / s, self.d / s).canonical()

    def canonical(self) -> "RealMatrix2":
        tr = self.a + self.d
        flip = tr < 0 or (tr == 0 and (self.c < 0 or (self.c == 0 and self.d < 0)))
        if flip:
            return RealMatrix2(-self.a, -self.b, -self.c, -self.d)
        return self

    def act(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)

    def j(self, z):
        return self.c * z + self.d

    def entries(self):
        return (self.a, self.b, self.c, self.d)


IDENTITY = RealMatrix2(1.0, 0.0, 0.0, 1.0)


def act_half_plane(g: RealMatrix2, z):
    """Return ``(g z, j(g, z))`` with ``j(g, z) = c z + d``."""
    _check_half_plane(z)
    j = g.c * z + g.d
    return (g.a * z + g.b) / j, j


def act_disc(g: RealMatrix2, p, w):
    """Action of g on the disc chart centred at p.

    Returns ``(w', j)`` with ``w' = w(p; g z(p; w))`` and ``j = j(g, z(p; w))``.
    """
    z = from_disc(p, w)
    gz, j = act_half_plane(g, z)
    return to_disc(p, gz), j


def disc_matrix(g: RealMatrix2, p):
    """Matrix ``(A, B, C, D)`` of g acting on the disc chart at p.

    The result is in SU(1,1) form, so ``|C w + D| >= 1`` exactly when
    ``|g w| <= |w|`` fails to shrink w, and ``-D/C`` is the centre of the
    isometric circle of g.
    """
    pb = p.conjugate()
    # C_p g C_p^{-1} with C_p = (1 -p; 1 -pb)
    a, b, c, d = g.a, g.b, g.c, g.d
    m11, m12 = a - p * c, b - p * d
    m21, m22 = a - pb * c, b - pb * d
    det = p - pb
    A = (-m11 * pb - m12) / det
    B = (m11 * p + m12) / det
    C = (-m21 * pb - m22) / det
    D = (m21 * p + m22) / det
    return A, B, C, D


def hyp_distance(z1, z2, ar: Arith | None = None):
    """Hyperbolic distance in the upper half-plane (curvature -1)."""
    ar = ar or backend()
    _check_half_plane(z1, "z1")
    _check_half_plane(z2, "z2")
    num = abs(z1 - z2) ** 2
    arg = 1 + num / (2 * z1.imag * z2.imag)
    return ar.acosh(arg) if arg > 1 else 0 * arg


def disc_distance_to_centre(w, ar: Arith | None = None):
    """Distance from the centre of the chart to w, ``2 artanh |w|``."""
    ar = ar or backend()
    r = abs(w)
    return 2 * ar.atanh(r)
