"""Laurent series with truncation tracking, and Puiseux monomial sums."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toprec_kp.errors import TruncationExhausted, ZeroDivisionPoly
from toprec_kp.exactalg import LaurentSeries, PuiseuxSum, poly_at_series


def S(coeffs, trunc=None, center=F(0)):
    return LaurentSeries(center, {e: F(c) for e, c in coeffs.items()}, trunc)


def test_residue_is_coefficient_of_inverse_t():
    s = S({-1: 1, 0: 3, 1: 1}, trunc=5)
    assert s.residue() == 1


def test_inverse_of_t2_plus_t3():
    s = S({2: 1, 3: 1}, trunc=8)
    inv = s.inverse()
    # t^-2 - t^-1 + 1 - t + t^2 ...
    assert [inv.coefficient(k) for k in range(-2, 3)] == [1, -1, 1, -1, 1]
    prod = s * inv
    assert prod.coefficient(0) == 1
    assert all(prod.coefficient(k) == 0 for k in range(1, 4))


def test_truncation_is_a_hard_error():
    s = S({0: 1}, trunc=3)
    with pytest.raises(TruncationExhausted):
        s.coefficient(3)
    # multiplication propagates the bound conservatively
    t = S({2: 1}, trunc=9)
    assert (s * t).trunc == 5
    with pytest.raises(TruncationExhausted):
        (s * t).coefficient(5)


def test_zero_to_known_order_times_series():
    z = LaurentSeries.zero(F(0), trunc=4)
    t = S({1: 1}, trunc=10)
    assert (z * t).trunc == 5
    assert (z * t).valuation() is None


def test_compose_with():
    # f(t) = t^-1 + t, g(t) = t + t^2: f(g) = 1/(t+t^2) + t + t^2
    f = S({-1: 1, 1: 1}, trunc=5)
    g = S({1: 1, 2: 1}, trunc=6)
    fg = f.compose_with(g)
    direct = g.inverse() + g
    for k in range(-1, 3):
        assert fg.coefficient(k) == direct.coefficient(k)
    with pytest.raises(ValueError):
        f.compose_with(S({0: 1, 1: 1}, trunc=4))


def test_poly_at_series():
    # X(u) = u^2 evaluated at u = -t gives t^2 exactly (trunc None)
    s = LaurentSeries.monomial(F(0), 1, F(-1))
    out = poly_at_series([F(0), F(0), F(1)], s)
    assert out.coefficient(2) == 1 and out.trunc is None


def test_inverse_needs_scalar_lead_and_nonzero():
    with pytest.raises(ZeroDivisionPoly):
        LaurentSeries.zero(F(0), trunc=4).inverse()


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=6), st.integers(-3, 2))
def test_inverse_multiplies_back_to_one(coeffs, val):
    if all(c == 0 for c in coeffs) or coeffs[0] == 0:
        return
    s = LaurentSeries(F(0), {val + i: F(c) for i, c in enumerate(coeffs) if c}, val + 8)
    inv = s.inverse()
    prod = s * inv
    assert prod.coefficient(0) == 1
    for k in range(1, (prod.trunc or 4)):
        assert prod.coefficient(k) == 0


# -- Puiseux sums ------------------------------------------------------------

def test_antiderivative_produces_log():
    p = PuiseuxSum.monomial("tau", F(1, 24), -1)
    f = p.antiderivative()
    assert f.log_coeff == F(1, 24)
    assert f.terms == {}


def test_derivative_examples():
    assert PuiseuxSum.monomial("tau", 3, -5).derivative() == PuiseuxSum.monomial("tau", -15, -6)
    assert PuiseuxSum.log("tau", 1).derivative() == PuiseuxSum.monomial("tau", 1, -1)


def test_divide_by_monomial():
    p = PuiseuxSum("tau", {F(3): F(1), F(1): F(2)})
    assert p.divide_by_monomial(1, 1) == PuiseuxSum("tau", {F(2): F(1), F(0): F(2)})
    with pytest.raises(ZeroDivisionPoly):
        p.divide_by_monomial(0, 1)


def test_rational_exponents_allowed():
    p = PuiseuxSum.monomial("tau", 2, F(5, 2))
    assert p.derivative() == PuiseuxSum.monomial("tau", 5, F(3, 2))


@settings(max_examples=50, deadline=None)
@given(
    st.dictionaries(
        st.fractions(min_value=-6, max_value=6, max_denominator=3).filter(lambda e: e != -1),
        st.fractions(min_value=-5, max_value=5, max_denominator=12),
        max_size=5,
    )
)
def test_derivative_of_antiderivative_is_identity(terms):
    p = PuiseuxSum("tau", terms)
    assert p.antiderivative().derivative() == p
