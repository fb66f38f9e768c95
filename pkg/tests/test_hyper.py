import cmath
import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from mfseries.hyper import (
    GeometryError,
    RealMatrix2,
    act_disc,
    act_half_plane,
    disc_distance_to_centre,
    from_disc,
    hyp_distance,
    to_disc,
)
from mfseries.mpnum import backend

P11 = complex(-9 / 22, math.sqrt(7) / 22)

upper = st.builds(complex, st.floats(-5, 5), st.floats(0.05, 5))
disc_pt = st.builds(lambda r, t: r * cmath.exp(1j * t), st.floats(0, 0.95), st.floats(0, 2 * math.pi))


@st.composite
def sl2(draw):
    a = draw(st.floats(-3, 3))
    b = draw(st.floats(-3, 3))
    c = draw(st.floats(-3, 3))
    assume(abs(a) > 0.1)
    d = (1 + b * c) / a
    return RealMatrix2(a, b, c, d)


def test_chart_examples():
    assert to_disc(1j, 1j) == 0
    assert to_disc(1j, 2j) == pytest.approx(1 / 3)
    assert abs(to_disc(P11, P11)) == 0
    assert from_disc(1j, 0) == 1j
    assert from_disc(1j, 1 / 3) == pytest.approx(2j)


def test_chart_rejects_bad_points():
    with pytest.raises(GeometryError):
        to_disc(1j, -1j)
    with pytest.raises(GeometryError):
        from_disc(1j, 1.0)


@given(upper, upper)
def test_chart_round_trip(p, z):
    assert abs(from_disc(p, to_disc(p, z)) - z) <= 1e-13 * max(1, abs(z)) * (1 + abs(p) / p.imag) ** 2


def test_chart_round_trip_extended():
    ar = backend(40)
    p = ar.cplx(ar.real(-9) / 22, ar.sqrt(ar.real(7)) / 22)
    for z in (ar.cplx(1, 2), ar.cplx(-3, ar.real(1) / 7), ar.cplx(0, 10)):
        assert abs(from_disc(p, to_disc(p, z)) - z) < 1e-37


def test_action_examples():
    ident = RealMatrix2(1.0, 0.0, 0.0, 1.0)
    z = 0.3 + 0.7j
    assert act_half_plane(ident, z) == (z, 1)
    S = RealMatrix2(0.0, -1.0, 1.0, 0.0)
    gz, j = act_half_plane(S, 1j)
    assert gz == pytest.approx(1j) and j == pytest.approx(1j)
    w, jd = act_disc(ident, P11, 0.2 - 0.1j)
    assert w == pytest.approx(0.2 - 0.1j) and jd == pytest.approx(1)


@given(sl2(), sl2(), upper)
def test_cocycle(g, h, z):
    # j(gh, z) = j(g, hz) j(h, z)
    hz, jh = act_half_plane(h, z)
    ghz, jg = act_half_plane(g, hz)
    ghz2, jgh = act_half_plane(g @ h, z)
    scale = max(1.0, *(abs(x) for x in (g.a, g.b, g.c, g.d, h.a, h.b, h.c, h.d))) ** 4
    assert abs(jgh - jg * jh) <= 1e-13 * scale * max(1, abs(z)) ** 2
    assume(ghz.imag > 1e-6)
    assert abs(ghz - ghz2) <= 1e-11 * scale * max(1, abs(ghz)) ** 2 / min(1, ghz.imag)


@given(sl2(), disc_pt)
def test_disc_action_matches_half_plane(g, w):
    p = 0.1 + 1.3j
    w2, j = act_disc(g, p, w)
    z = from_disc(p, w)
    gz, j_ref = act_half_plane(g, z)
    assert abs(abs(j) - abs(j_ref)) <= 1e-12 * max(1, abs(j_ref))
    assert abs(from_disc(p, w2) - gz) <= 1e-9 * max(1, abs(gz)) ** 2 / min(1, gz.imag)


def test_distance_examples():
    assert hyp_distance(1j, 1j) == 0
    assert hyp_distance(1j, 2j) == pytest.approx(math.log(2), rel=1e-15)
    # distance to the chart centre agrees with the half-plane formula
    p, z = 0.2 + 0.9j, -0.4 + 2.1j
    assert disc_distance_to_centre(to_disc(p, z)) == pytest.approx(hyp_distance(p, z), rel=1e-13)


@given(upper, upper, upper)
def test_triangle_inequality(a, b, c):
    assert hyp_distance(a, c) <= hyp_distance(a, b) + hyp_distance(b, c) + 1e-9


@given(sl2(), upper, upper)
def test_distance_invariance(g, a, b):
    ga, _ = act_half_plane(g, a)
    gb, _ = act_half_plane(g, b)
    assume(ga.imag > 1e-4 and gb.imag > 1e-4)
    assert hyp_distance(ga, gb) == pytest.approx(hyp_distance(a, b), rel=1e-6, abs=1e-6)


def test_normalized_and_canonical():
    g = RealMatrix2(2.0, 4.0, 0.0, 8.0).normalized(backend())
    assert g.det == pytest.approx(1)
    neg = RealMatrix2(-1.0, 0.0, 0.0, -1.0).canonical()
    assert (neg.a, neg.d) == (1.0, 1.0)
    with pytest.raises(GeometryError):
        RealMatrix2(0.0, 1.0, 1.0, 0.0).normalized(backend())
