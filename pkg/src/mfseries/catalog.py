"""Ready-made groups, centres and reference data used by tests, scripts and configs."""

from __future__ import annotations

from fractions import Fraction as F

from .arith import (
    ExactMatrix2,
    OrderQ,
    QuaternionAlgebraQ,
    QuaternionElement,
    embed_unit,
    enumerate_norm_one_units,
)
from .fuchsian import FuchsianGroup
from .mpnum import Arith, backend

# ---------------------------------------------------------------------------
# the maximal order of the quaternion algebra of discriminant 6


def disc6_algebra() -> QuaternionAlgebraQ:
    return QuaternionAlgebraQ(3, -1)


def disc6_order() -> OrderQ:
    alg = disc6_algebra()
    alpha = QuaternionElement(0, 1)
    beta = QuaternionElement(0, 0, 1)
    delta = (alg.one() + alpha + beta + alpha.mul(beta, alg)).scale(F(1, 2))
    return OrderQ(alg, (alg.one(), alpha, beta, delta))


def disc6_center(ar: Arith):
    """The CM point ``((sqrt 6 - sqrt 2)/2) i``."""
    return ar.cplx(0, (ar.sqrt(ar.real(6)) - ar.sqrt(ar.real(2))) / 2)


def disc6_group(ar: Arith | None = None, height: int = 1) -> FuchsianGroup:
    ar = ar or backend()
    alg = disc6_algebra()
    units = [embed_unit(u, alg) for u in enumerate_norm_one_units(disc6_order(), height)]
    return FuchsianGroup(units, disc6_center(ar), ar)


DISC6_SIGNATURE = (0, 2, 2, 3, 3)

# weight 4 form: b_n / (12 Theta^n) for n <= 8, Theta = -4 pi Omega^2, Omega the
# Chowla-Selberg period of discriminant -24; odd coefficients vanish
DISC6_K4_EXACT = {0: F(1, 12), 2: F(5, 24), 4: F(-45, 8 * 24), 6: F(555, 4 * 720), 8: F(57165, 8 * 40320)}
DISC6_K4_EXACT_MAX_N = 8


def disc6_theta(ar: Arith, omega=None):
    from .analysis import chowla_selberg_omega

    omega = chowla_selberg_omega(24, 2, ar) if omega is None else omega
    return -4 * ar.pi * omega ** 2


def disc6_k4_exact(ar: Arith, omega=None) -> list:
    """b_0..b_8 of the weight-4 form normalised by b_0 = 1."""
    theta = disc6_theta(ar, omega)
    out = []
    for n in range(DISC6_K4_EXACT_MAX_N + 1):
        q = DISC6_K4_EXACT.get(n, F(0)) * 12
        out.append(ar.cplx(ar.from_fraction(q)) * theta ** n)
    return out


# ---------------------------------------------------------------------------
# Gamma_0(11)


def gamma0_11_generators() -> list[ExactMatrix2]:
    mats = [(1, 1, 0, 1), (7, -2, 11, -3), (8, -3, 11, -4)]
    return [ExactMatrix2(*m) for m in mats]


def gamma0_11_center(ar: Arith):
    """Heegner point ``(-9 + sqrt(-7))/22``."""
    return ar.cplx(F(-9, 22), ar.sqrt(ar.real(7)) / 22)


def gamma0_11_group(ar: Arith | None = None) -> FuchsianGroup:
    ar = ar or backend()
    return FuchsianGroup(gamma0_11_generators(), gamma0_11_center(ar), ar)


# Hecke eigenvalues of the level 11 newform
GAMMA0_11_AP = {2: -2, 3: -1, 5: 1, 7: -2, 13: 4}
