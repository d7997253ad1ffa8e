import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qtqft.cyclo import (
    CycNum,
    cyc_from_int,
    cyc_from_power,
    cyc_inv,
    cyc_mul,
    cyc_to_float,
    cyclotomic_poly,
)

ORDERS = [8, 12, 20, 24, 32, 40]


def test_cyclotomic_polys():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(8) == (1, 0, 0, 0, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)
    # degree is Euler's phi
    assert len(cyclotomic_poly(40)) - 1 == 16


def test_roots_of_unity():
    assert cyc_from_power(6, 12) == cyc_from_int(-1, 12)
    assert cyc_from_power(12, 12) == CycNum.one(12)
    assert cyc_from_power(-1, 12) * cyc_from_power(1, 12) == CycNum.one(12)
    # golden ratio: q + q^-1 at q = exp(2 pi i / 10)
    phi = cyc_from_power(2, 20) + cyc_from_power(-2, 20)
    assert phi * phi == phi + 1
    assert abs(phi.to_complex() - (1 + math.sqrt(5)) / 2) < 1e-12


def test_sqrt2_in_q_zeta8():
    s = cyc_from_power(1, 8) + cyc_from_power(-1, 8)
    assert s * s == cyc_from_int(2, 8)
    assert s.is_rational() is False
    assert (s * s).rational_value() == 2


def test_order_mismatch():
    with pytest.raises(ValueError):
        CycNum.one(8) + CycNum.one(12)


def test_zero_inverse():
    with pytest.raises(ZeroDivisionError):
        CycNum.zero(8).inverse()


def test_str_and_json():
    x = cyc_from_power(3, 8) * Fraction(2, 3) - 1
    assert str(x) == "-1 + 2/3*z^3"
    assert CycNum.from_json(x.to_json()) == x
    assert cyc_to_float(CycNum.one(8)) == (1.0, 0.0)


def test_lift():
    z = cyc_from_power(1, 8)
    assert z.lift(24) == cyc_from_power(3, 24)
    with pytest.raises(ValueError):
        z.lift(12)


def test_module_helpers():
    a, b = cyc_from_power(1, 20), cyc_from_power(3, 20)
    assert cyc_mul(a, b) == cyc_from_power(4, 20)
    assert cyc_inv(a) == cyc_from_power(-1, 20)


coeff = st.integers(-6, 6)


@st.composite
def cyc(draw, order=None):
    n = order or draw(st.sampled_from(ORDERS))
    deg = len(cyclotomic_poly(n)) - 1
    cs = draw(st.lists(coeff, min_size=deg, max_size=deg))
    den = draw(st.integers(1, 4))
    return CycNum.from_coeffs(n, [Fraction(c, den) for c in cs])


@st.composite
def pair(draw):
    n = draw(st.sampled_from(ORDERS))
    return draw(cyc(n)), draw(cyc(n)), draw(cyc(n))


@settings(max_examples=60, deadline=None)
@given(pair())
def test_ring_axioms(t):
    a, b, c = t
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == CycNum.zero(a.order)


@settings(max_examples=60, deadline=None)
@given(pair())
def test_float_embedding_is_a_homomorphism(t):
    a, b, _ = t
    za, zb = a.to_complex(), b.to_complex()
    scale = 1 + abs(za) * abs(zb)
    assert abs((a * b).to_complex() - za * zb) < 1e-9 * scale
    assert abs((a + b).to_complex() - (za + zb)) < 1e-9 * (1 + abs(za) + abs(zb))


@settings(max_examples=40, deadline=None)
@given(cyc())
def test_inverse(a):
    if a.is_zero():
        return
    assert a * a.inverse() == CycNum.one(a.order)
    assert abs(a.inverse().to_complex() - 1 / a.to_complex()) < 1e-6 * (1 + abs(1 / a.to_complex()))


@settings(max_examples=40, deadline=None)
@given(cyc())
def test_conjugate_matches_complex_conjugate(a):
    assert abs(a.conjugate().to_complex() - a.to_complex().conjugate()) < 1e-9 * (1 + abs(a.to_complex()))
    assert a.conjugate().conjugate() == a
    assert a.galois(-1) == a.conjugate()


@settings(max_examples=40, deadline=None)
@given(cyc(), st.integers(0, 10))
def test_galois_is_a_field_automorphism(a, j):
    n = a.order
    units = [s for s in range(1, n) if math.gcd(s, n) == 1]
    s = units[j % len(units)]
    z = cyc_from_power(1, n)
    assert a.galois(s) == sum(
        (c * z ** (s * i) for i, c in enumerate(a.coeffs) if c), CycNum.zero(n)
    )
    assert (a * a).galois(s) == a.galois(s) * a.galois(s)


@settings(max_examples=40, deadline=None)
@given(cyc())
def test_json_round_trip(a):
    assert CycNum.from_json(a.to_json()) == a
    assert hash(CycNum.from_json(a.to_json())) == hash(a)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(ORDERS), st.integers(-50, 50))
def test_power_matches_exp(n, e):
    assert abs(cyc_from_power(e, n).to_complex() - cmath.exp(2j * math.pi * e / n)) < 1e-12
