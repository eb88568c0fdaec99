"""The printed Lax matrices of the pure-gravity and Ising examples, re-typed
as exact operator data for symbol-by-symbol comparison."""

from fractions import Fraction as F

from toprec_kp.exactalg import DiffPoly
from toprec_kp.kp import XPoly

U = DiffPoly.gen("u")
UD = lambda j: DiffPoly.gen("u", j)
H = DiffPoly.hbar
C = DiffPoly.const


def printed_lax_32():
    """2x2 L of the folding construction, at t1 = 0:
    [[-h u'/2, -x + u], [-(x-u)(x+2u) - h^2 u''/2, h u'/2]]."""
    return (
        (
            XPoly.const(H() * UD(1) * F(-1, 2)),
            XPoly({1: C(-1), 0: U}),
        ),
        (
            XPoly({2: C(-1), 1: -U, 0: U * U * 2 - H(2) * UD(2) * F(1, 2)}),
            XPoly.const(H() * UD(1) * F(1, 2)),
        ),
    )


def printed_m_32():
    return (
        (XPoly.zero(), XPoly.const(1)),
        (XPoly({1: C(1), 0: U * 2}), XPoly.zero()),
    )


def printed_lax_43_w0():
    """3x3 L of the Ising example at t1 = t2 = t3 = w = 0."""
    return (
        (
            XPoly.const(U * U * 2 - H(2) * UD(2) * F(1, 6)),
            XPoly({1: C(1), 0: H() * UD(1) * F(1, 2)}),
            XPoly.const(-U),
        ),
        (
            XPoly({1: -U, 0: H() * U * UD(1) * F(5, 2) - H(3) * UD(3) * F(1, 6)}),
            XPoly.const(-(U * U) + H(2) * UD(2) * F(1, 3)),
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
            XPoly.const(-(U * U) - H(2) * UD(2) * F(1, 6)),
        ),
    )
