"""(p,q)-model layer: Chebyshev data, folding, Lax pairs against the printed
matrices, string-equation oracle, free energies, Tau cross-checks."""

from fractions import Fraction as F

import pytest

from toprec_kp.errors import (
    CompatibilityViolation,
    NotHomogeneousPair,
    TauMismatch,
    UnsupportedModel,
)
from toprec_kp.exactalg import DiffPoly, Poly, PuiseuxSum, parse_poly
from toprec_kp.kp import (
    DiffOpX,
    LaxPair,
    StringSeries,
    XPoly,
    build_lax,
    build_model_curve,
    chebyshev,
    fold,
    free_energy,
    free_energy_table,
    p_operator,
    pq_model,
    q_operator,
    spectral_det_check,
    string_series,
    tau_crosscheck,
    validate_pair,
    verify_lax,
    x_minus_q,
)
from toprec_kp.toprec import CorrelatorTable

Z = lambda text: parse_poly(text, "z")
U = DiffPoly.gen("u")
UD = lambda j: DiffPoly.gen("u", j)
H = DiffPoly.hbar
C = DiffPoly.const


def test_chebyshev_values():
    assert chebyshev(0) == Poly.const("z", 2)
    assert chebyshev(1) == Poly.x("z")
    assert chebyshev(2) == Z("z^2 - 2")
    assert chebyshev(3) == Z("z^3 - 3*z")
    assert chebyshev(4) == Z("z^4 - 4*z^2 + 2")
    # semigroup: T_m o T_n = T_{mn}
    assert chebyshev(2).compose(chebyshev(3)) == chebyshev(6)


def test_validate_pair_examples():
    assert validate_pair(chebyshev(2), chebyshev(3), 3, 2) == 3
    assert validate_pair(chebyshev(3), chebyshev(4), 4, 3) == 4
    with pytest.raises(NotHomogeneousPair):
        validate_pair(Z("z^2"), Z("z^3"), 3, 2)  # scale-invariant: combination 0
    with pytest.raises(ValueError):
        validate_pair(Z("2*z^2"), chebyshev(3), 3, 2)  # not monic


def test_unitary_chain_rho():
    m = pq_model(5, 4)
    assert m.rho == 5 and m.x_param == chebyshev(4) and m.y_param == chebyshev(5)
    assert not m.has_operators()
    with pytest.raises(UnsupportedModel):
        string_series(m, 1)


def test_unsupported_model_rejected():
    with pytest.raises(UnsupportedModel):
        pq_model(5, 2)


def test_model_curves_match_printed_parametrizations():
    assert build_model_curve(pq_model(3, 2)).x_poly == Z("z^2 - 2")
    assert build_model_curve(pq_model(3, 2)).y_poly == Z("z^3 - 3*z")
    assert build_model_curve(pq_model(2, 3)).x_poly == Z("z^3 - 3*z")
    assert build_model_curve(pq_model(2, 3)).y_poly == Z("2 - z^2")
    assert build_model_curve(pq_model(4, 3)).y_poly == Z("z^4 - 4*z^2 + 2")


# -- folding -----------------------------------------------------------------

def test_folding_pure_gravity():
    m = pq_model(3, 2)
    F_ops = fold(m)
    # F_l = (hbar d_t)^l below the fold threshold
    assert F_ops[0] == DiffOpX.identity()
    assert F_ops[1] == DiffOpX.hbar_dt()
    # F_2 = x + 2u and F_3 = (x + 2u) hbar d_t + 2 hbar u'
    assert F_ops[2] == DiffOpX([XPoly({1: C(1), 0: U * 2})])
    assert F_ops[3] == DiffOpX(
        [XPoly.const(H() * UD(1) * 2), XPoly({1: C(1), 0: U * 2})]
    )


def test_folding_derivative_order_bound():
    for pq in ((3, 2), (2, 3), (4, 3)):
        m = pq_model(*pq)
        for op in fold(m):
            assert op.order <= m.q - 1


def test_fq_equals_x_minus_subprincipal_q():
    # F_q = x - (Q - (hbar d_t)^q), an exact operator identity
    for pq in ((3, 2), (2, 3), (4, 3)):
        m = pq_model(*pq)
        xq = x_minus_q(m)
        hdt_q = DiffOpX([XPoly.zero()] * m.q + [XPoly.const(1)])
        ops = [DiffOpX.identity()]
        for _ in range(m.q):
            cur = ops[-1]
            ops.append(DiffOpX.hbar_dt().compose(cur) + xq.left_mul(cur.coeff(m.q - 1)))
        assert ops[m.q] == xq + hdt_q


# -- string equations as operator identities -------------------------------------

def painleve_poly():
    return U * U * 3 - H(2) * UD(2) * F(1, 2)


def ising_poly():
    return (
        U * U * U * 4
        - H(2) * U * UD(2) * 3
        - H(2) * UD(1) * UD(1) * F(3, 2)
        + H(4) * UD(4) * F(1, 6)
    )


def test_commutator_is_string_equation_32():
    m = pq_model(3, 2)
    comm = p_operator(m).compose(q_operator(m)) - q_operator(m).compose(p_operator(m))
    assert comm.order == 0
    assert comm.coeff(0) == XPoly.const(H() * painleve_poly().d_dt())


def test_commutator_is_string_equation_23():
    # exchanging P and Q flips the commutator: [P,Q] = -hbar on Painleve I
    m = pq_model(2, 3)
    comm = p_operator(m).compose(q_operator(m)) - q_operator(m).compose(p_operator(m))
    assert comm.order == 0
    assert comm.coeff(0) == XPoly.const(H() * painleve_poly().d_dt() * (-1))


def test_commutator_is_string_equation_43_at_w0():
    m = pq_model(4, 3)
    comm = p_operator(m).compose(q_operator(m)) - q_operator(m).compose(p_operator(m))
    reduced = comm.set_zero("w")
    assert reduced.order == 0
    assert reduced.coeff(0) == XPoly.const(H() * ising_poly().d_dt())


# -- Lax pairs against the printed displays -----------------------------------

def lax_32_display():
    """The 2x2 L of the construction section, at general t1."""
    t1 = F(0)
    return (
        (
            XPoly.const(H() * UD(1) * F(-1, 2) - C(t1)),
            XPoly({1: C(-1), 0: U}),
        ),
        (
            XPoly({2: C(-1), 1: -U, 0: U * U * 2 - H(2) * UD(2) * F(1, 2)}),
            XPoly.const(H() * UD(1) * F(1, 2) - C(t1)),
        ),
    )


def test_build_lax_reproduces_printed_32_display():
    pair = build_lax(pq_model(3, 2))
    assert pair.L == lax_32_display()
    assert pair.M == (
        (XPoly.zero(), XPoly.const(1)),
        (XPoly({1: C(1), 0: U * 2}), XPoly.zero()),
    )


def test_build_lax_reproduces_printed_23_display_up_to_sign():
    # the printed 3x3 L is the opposite orientation: -L here
    pair = build_lax(pq_model(2, 3))
    printed = (
        (XPoly.const(U * 2), XPoly.zero(), XPoly.const(-1)),
        (XPoly({1: C(-1), 0: H() * UD(1) * F(1, 2)}), XPoly.const(-U), XPoly.zero()),
        (
            XPoly.const(H(2) * UD(2) * F(1, 2)),
            XPoly({1: C(-1), 0: H() * UD(1) * F(-1, 2)}),
            XPoly.const(-U),
        ),
    )
    neg = tuple(tuple(-e for e in row) for row in pair.L)
    assert neg == printed
    assert pair.M == (
        (XPoly.zero(), XPoly.const(1), XPoly.zero()),
        (XPoly.zero(), XPoly.zero(), XPoly.const(1)),
        (XPoly({1: C(1), 0: H() * UD(1) * F(3, 2)}), XPoly.const(U * 3), XPoly.zero()),
    )


def lax_43_display_w0():
    """The printed 3x3 L of the Ising example at t1=t2=t3=w=0."""
    return (
        (
            XPoly.const(U * U * 2 - H(2) * UD(2) * F(1, 6)),
            XPoly({1: C(1), 0: H() * UD(1) * F(1, 2)}),
            XPoly.const(-U),
        ),
        (
            XPoly({1: -U, 0: H() * U * UD(1) * F(5, 2) - H(3) * UD(3) * F(1, 6)}),
            XPoly.const(-U * U + H(2) * UD(2) * F(1, 3)),
            XPoly({1: C(1), 0: H() * UD(1) * F(-1, 2)}),
        ),
        (
            XPoly(
                {
                    2: C(1),
                    0: H(2) * UD(1) * UD(1) * F(7, 4)
                    + H(2) * U * UD(2) * F(5, 2)
                    - H(4) * UD(4) * F(1, 6),
                }
            ),
            XPoly({1: U * 2, 0: -(H() * U * UD(1)) + H(3) * UD(3) * F(1, 6)}),
            XPoly.const(-U * U - H(2) * UD(2) * F(1, 6)),
        ),
    )


def test_build_lax_reproduces_printed_43_display_up_to_sign():
    pair = build_lax(pq_model(4, 3))
    at_w0 = tuple(tuple(e.set_zero("w") for e in row) for row in pair.L)
    neg = tuple(tuple(-e for e in row) for row in at_w0)
    assert neg == lax_43_display_w0()


# -- compatibility --------------------------------------------------------------

@pytest.mark.parametrize("pq", [(3, 2), (2, 3), (4, 3)])
def test_verify_lax_passes(pq):
    m = pq_model(*pq)
    pair = build_lax(m)
    ss = string_series(m, 3)
    report = verify_lax(pair, ss, 2, [0, 1, 2])
    assert report["passed"]


def test_verify_lax_negative_control():
    # corrupting u^{1} by +1 must violate compatibility (the residual carries
    # an overall hbar, so the corruption surfaces at hbar^3)
    m = pq_model(3, 2)
    pair = build_lax(m)
    ss = string_series(m, 3)
    bad = list(ss.orders)
    bad[1] = bad[1] + PuiseuxSum.monomial("tau", 1, 0)
    with pytest.raises(CompatibilityViolation):
        verify_lax(pair, StringSeries(m, tuple(bad)), 3, [0, 1])


# -- string series -----------------------------------------------------------

def test_painleve_series_values():
    ss = string_series(pq_model(3, 2), 3)
    assert ss.u_order(0) == PuiseuxSum.monomial("tau", 1, 1)
    assert ss.u_order(1) == PuiseuxSum.monomial("tau", F(-1, 432), -4)
    assert ss.u_order(2) == PuiseuxSum.monomial("tau", F(-49, 2**9 * 3**6), -9)
    assert ss.u_order(3) == PuiseuxSum.monomial("tau", F(-(5**2) * 7**2, 2**11 * 3**9), -14)


def test_ising_series_values():
    ss = string_series(pq_model(4, 3), 3)
    assert ss.u_order(1) == PuiseuxSum.monomial("tau", F(-1, 24 * 16), -6)
    assert ss.u_order(2) == PuiseuxSum.monomial("tau", F(-1925, 1458 * 2**13), -13)
    assert ss.u_order(3) == PuiseuxSum.monomial("tau", F(-509575, 13122 * 2**20), -20)


def test_dual_model_shares_painleve_series():
    assert string_series(pq_model(2, 3), 3).orders == string_series(pq_model(3, 2), 3).orders


# -- free energies and Tau function ----------------------------------------------

def test_free_energies_pure_gravity(model_table):
    m = pq_model(3, 2)
    table = model_table(3, 2)
    assert free_energy(m, table, 0) == PuiseuxSum.monomial("tau", F(12, 5), 5)
    assert free_energy(m, table, 1) == PuiseuxSum.log("tau", F(1, 24))
    assert free_energy(m, table, 2) == PuiseuxSum.monomial("tau", F(-7, 2**7 * 3**4 * 5), -5)
    assert free_energy(m, table, 3) == PuiseuxSum.monomial("tau", F(-5 * 7**2, 2**12 * 3**8), -10)


def test_free_energies_ising(model_table):
    m = pq_model(4, 3)
    table = model_table(4, 3)
    assert free_energy(m, table, 1) == PuiseuxSum.log("tau", F(1, 8))
    assert free_energy(m, table, 2) == PuiseuxSum.monomial("tau", F(-55, 1296 * 2**7), -7)
    assert free_energy(m, table, 3) == PuiseuxSum.monomial("tau", F(-29975, 81648 * 2**14), -14)


def test_duality_free_energies(model_table):
    m23, m32 = pq_model(2, 3), pq_model(3, 2)
    t23 = model_table(2, 3)
    t32 = model_table(3, 2)
    for g in (1, 2):
        assert free_energy(m23, t23, g) == free_energy(m32, t32, g)


@pytest.mark.parametrize("pq,gmax", [((3, 2), 3), ((2, 3), 2), ((4, 3), 3)])
def test_tau_crosscheck(pq, gmax, model_table):
    m = pq_model(*pq)
    table = model_table(*pq)
    fe = free_energy_table(m, table, gmax)
    ss = string_series(m, gmax)
    assert tau_crosscheck(m, fe, ss, gmax)["passed"]


def test_tau_crosscheck_detects_corruption(model_table):
    m = pq_model(3, 2)
    table = model_table(3, 2)
    fe = free_energy_table(m, table, 1)
    ss = string_series(m, 1)
    bad = StringSeries(m, (ss.orders[0], ss.orders[1] * 2))
    with pytest.raises(TauMismatch):
        tau_crosscheck(m, fe, bad, 1)


def test_g0_identity_control(model_table):
    # d_t^2 F^(0) = u^{0} = tau, from the closed form and homogeneity alone
    for pq in ((3, 2), (4, 3)):
        m = pq_model(*pq)
        f0 = free_energy(m, model_table(*pq), 0)
        assert m.dt(m.dt(f0)) == PuiseuxSum.monomial("tau", 1, 1)


# -- spectral determinant identity ----------------------------------------------

@pytest.mark.parametrize("pq", [(3, 2), (2, 3), (4, 3)])
def test_spectral_det_check(pq):
    report = spectral_det_check(pq_model(*pq))
    assert report["passed"]


def test_spectral_det_32_matches_explicit_curve():
    report = spectral_det_check(pq_model(3, 2))
    # det(y - L[0]) = y^2 - (x+2)(x-1)^2 at u0=1, t1=0
    assert report["char_poly"] == str(
        __import__("toprec_kp.exactalg", fromlist=["BiPoly"]).BiPoly(
            "x", "y", [[-2, 0, 1], [3, 0, 0], [0, 0, 0], [-1, 0, 0]]
        )
    )
