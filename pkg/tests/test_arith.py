from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mfseries.arith import (
    ExactArithmeticError,
    ExactMatrix2,
    QuadExt,
    QuaternionAlgebraQ,
    QuaternionElement,
    embed_quaternion,
    embed_unit,
    enumerate_norm_one_units,
    reduced_norm,
    reduced_trace,
    squarefree_part,
)
from mfseries.catalog import disc6_algebra, disc6_order
from mfseries.mpnum import backend

ALG = disc6_algebra()
ALPHA = QuaternionElement(0, 1)
BETA = QuaternionElement(0, 0, 1)

small = st.fractions(-5, 5, max_denominator=4)
quats = st.builds(QuaternionElement, small, small, small, small)


def test_squarefree_part():
    assert squarefree_part(12) == (2, 3)
    assert squarefree_part(-7) == (1, -7)


def test_quadext_arithmetic():
    s5 = QuadExt.sqrt(5)
    a = (1 - s5) / 2
    assert a * a - a - 1 == 0  # a = -0.618...
    assert float(a.numeric(backend())) == pytest.approx(-0.6180339887498949)
    assert (70 * a + 114) == QuadExt(149, -35, 5)
    assert float((s5 * s5).numeric(backend())) == pytest.approx(5)
    assert QuadExt.sqrt(8) == 2 * QuadExt.sqrt(2)
    assert (a.inverse() * a) == 1
    assert a.sign() == -1 and a.sign(-1) == 1


def test_quadext_mixed_fields_rejected():
    with pytest.raises(ExactArithmeticError):
        QuadExt.sqrt(2) + QuadExt.sqrt(3)


@given(quats, quats)
def test_nrd_multiplicative(x, y):
    assert reduced_norm(x.mul(y, ALG), ALG) == reduced_norm(x, ALG) * reduced_norm(y, ALG)


def test_nrd_examples():
    assert reduced_norm(ALG.one(), ALG) == 1
    assert reduced_norm(ALPHA, ALG) == -3
    assert reduced_norm(BETA, ALG) == 1
    assert reduced_trace(ALG.one()) == 2


def test_algebra_relations():
    assert ALPHA.mul(ALPHA, ALG) == QuaternionElement(3)
    assert BETA.mul(BETA, ALG) == QuaternionElement(-1)
    assert BETA.mul(ALPHA, ALG) == -ALPHA.mul(BETA, ALG)


def test_order_checks():
    with pytest.raises(ExactArithmeticError):
        from mfseries.arith import OrderQ

        OrderQ(ALG, (ALG.one(), ALPHA.scale(F(1, 2)), BETA, ALPHA.mul(BETA, ALG)))


def test_unit_enumeration():
    order = disc6_order()
    assert enumerate_norm_one_units(order, 0) == [ALG.one()]
    units1 = enumerate_norm_one_units(order, 1)
    assert BETA in units1
    units2 = enumerate_norm_one_units(order, 2)
    assert set(units1) <= set(units2)
    for u in units2:
        assert reduced_norm(u, ALG) == 1


def test_embedding_examples():
    assert embed_unit(ALG.one(), ALG).is_identity()
    g = embed_unit(BETA, ALG)
    assert (g.a, g.b, g.c, g.d) == (0, 1, -1, 0)
    ab = embed_quaternion(ALPHA.mul(BETA, ALG), ALG)
    assert ab == (0, QuadExt.sqrt(3), QuadExt.sqrt(3), 0)
    with pytest.raises(ExactArithmeticError):
        embed_unit(ALPHA.mul(BETA, ALG), ALG)  # nrd = -3
    with pytest.raises(ExactArithmeticError):
        embed_quaternion(ALPHA, QuaternionAlgebraQ(-1, -1))


@given(st.sampled_from(enumerate_norm_one_units(disc6_order(), 1)),
       st.sampled_from(enumerate_norm_one_units(disc6_order(), 1)))
def test_embedding_multiplicative(x, y):
    gx, gy = embed_unit(x, ALG), embed_unit(y, ALG)
    gxy = embed_unit(x.mul(y, ALG), ALG)
    assert (gx @ gy).key() == gxy.key()
    assert gxy.det == 1


def test_exact_matrix():
    g = ExactMatrix2(2, 1, 1, 1)
    assert (g @ g.inverse()).is_identity()
    assert (-g).key() == g.key()
    with pytest.raises(ExactArithmeticError):
        ExactMatrix2(1, 1, 1, 1)
    num = g.numeric_embed(backend())
    assert (num.a, num.b, num.c, num.d) == (2.0, 1.0, 1.0, 1.0)
