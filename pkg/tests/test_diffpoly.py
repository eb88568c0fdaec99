"""Differential polynomials: Leibniz derivation, hbar grading, substitution."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toprec_kp.exactalg import DiffPoly, HbarSeries, PuiseuxSum

U = DiffPoly.gen("u")
UD = lambda j: DiffPoly.gen("u", j)
H = DiffPoly.hbar


def test_leibniz_on_square():
    # d/dt (u*u) = 2 u u'
    assert (U * U).d_dt() == U * UD(1) * 2


def test_derivation_commutes_with_hbar():
    assert (H() * UD(1)).d_dt() == H() * UD(2)


def test_classical_projection():
    dp = U * U * 2 + H() * UD(1) * 3 + DiffPoly.const(F(1, 2))
    assert dp.classical_value({"u": F(1)}) == F(5, 2)
    with pytest.raises(ValueError):
        (UD(1)).classical_value({"u": F(1)})


def test_set_zero_drops_generator():
    dp = U + DiffPoly.gen("w") * 5 + H() * DiffPoly.gen("w", 2)
    assert dp.set_zero("w") == U


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2), st.integers(0, 2), st.integers(-4, 4), st.integers(-4, 4))
def test_leibniz_rule_on_random_products(j1, j2, c1, c2):
    a = UD(j1) * c1 + H() * UD(j2)
    b = UD(j2) * c2 + DiffPoly.const(3)
    lhs = (a * b).d_dt()
    rhs = a.d_dt() * b + a * b.d_dt()
    assert lhs == rhs


def _dt_painleve(p: PuiseuxSum) -> PuiseuxSum:
    # d/dt through t = 3 tau^2
    return p.derivative().divide_by_monomial(6, 1)


def test_substitute_painleve_order_two():
    # u -> tau - (hbar^2/432) tau^-4 into 3u^2: hbar^2 coefficient -(1/72) tau^-3
    series = {
        "u": HbarSeries.from_even_orders(
            "tau",
            [PuiseuxSum.monomial("tau", 1, 1), PuiseuxSum.monomial("tau", F(-1, 432), -4)],
            2,
        )
    }
    out = (U * U * 3).substitute(series, _dt_painleve, 2)
    assert out.coefficient(0) == PuiseuxSum.monomial("tau", 3, 2)
    assert out.coefficient(1).is_zero()
    assert out.coefficient(2) == PuiseuxSum.monomial("tau", F(-1, 72), -3)


def test_substitute_tracks_derivatives_and_hbar_weights():
    series = {"u": HbarSeries.from_even_orders("tau", [PuiseuxSum.monomial("tau", 1, 1)], 3)}
    # hbar * u' at hbar^1 should be d_t tau = 1/(6 tau)
    out = (H() * UD(1)).substitute(series, _dt_painleve, 3)
    assert out.coefficient(0).is_zero()
    assert out.coefficient(1) == PuiseuxSum.monomial("tau", F(1, 6), -1)
