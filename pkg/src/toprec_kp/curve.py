"""Genus-0 spectral curves given parametrically by polynomials X(z), Y(z).

Conventions fixed here and used everywhere downstream:

    omega_1^(0) = -Y(z) dX(z),      omega_2^(0)(z1,z2) = dz1 dz2 / (z1-z2)^2.

A curve is accepted only if it is regular (X' and Y' share no zero) and all
zeros of X' are rational and simple; the recursion engine needs the local
Galois involution as an exact rational series at each such point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DegenerateCurve,
    NotRegular,
    RamificationNotRational,
    RamificationNotSimple,
)
from .exactalg import (
    BiPoly,
    LaurentSeries,
    Poly,
    RatFunc,
    poly_at_series,
    rat,
    rational_roots,
    resultant,
    sylvester_resultant,
)


@dataclass(frozen=True)
class SpectralCurve:
    x_poly: Poly
    y_poly: Poly
    ram_points: tuple[Fraction, ...]

    @property
    def var(self) -> str:
        return self.x_poly.var

    @property
    def x_prime(self) -> Poly:
        return self.x_poly.derivative()

    def __str__(self) -> str:
        return f"X = {self.x_poly}, Y = {self.y_poly}"


@dataclass(frozen=True)
class RamPoint:
    """A simple rational ramification point with its local sheet exchange.

    sigma: series s(t) with sigma_r(z) = r + s(t), t = z - r, s(t) = -t + O(t^2),
    satisfying X(r + s(t)) = X(r + t) and s(s(t)) = t to the stored order.
    """

    r: Fraction
    sigma: LaurentSeries
    order: int


@dataclass(frozen=True)
class DoublePointReport:
    pairs: tuple[tuple[Fraction, Fraction], ...]
    degenerate: bool


def build_curve(x_poly: Poly, y_poly: Poly) -> SpectralCurve:
    """Validate and build a spectral curve; typed rejection on failure."""
    if x_poly.var != y_poly.var:
        raise ValueError("X and Y must use the same variable")
    if x_poly.degree < 2:
        raise NotRegular(f"deg X = {x_poly.degree} < 2: x is not a branched covering")
    xp = x_poly.derivative()
    yp = y_poly.derivative()
    if yp.is_zero() or resultant(xp, yp) == 0:
        raise NotRegular("X' and Y' share a zero: curve is not regular")
    roots, cofactor = rational_roots(xp)
    if cofactor.degree >= 1:
        raise RamificationNotRational(
            f"X' has irrational zeros (cofactor {cofactor}); engine requires rational "
            "ramification points"
        )
    for r, mult in roots:
        if mult > 1:
            raise RamificationNotSimple(f"X''({r}) = 0: ramification point not simple")
    rams = tuple(sorted(r for r, _ in roots))
    return SpectralCurve(x_poly, y_poly, rams)


def galois_series(curve: SpectralCurve, r, order: int) -> RamPoint:
    """Local Galois involution at r by Newton iteration on X(r+s) = X(r+t).

    Starts from s = -t; the involution and X-invariance are verified to the
    requested order before returning.
    """
    r = rat(r)
    if r not in curve.ram_points:
        raise ValueError(f"{r} is not a ramification point of {curve}")
    if order < 2:
        raise ValueError("order must be at least 2")
    shifted = curve.x_poly.shift(r)  # X(r+u) as a polynomial in u
    trunc = order + 1
    target = poly_at_series(shifted.coeffs, LaurentSeries.monomial(r, 1)).truncate_to(trunc)
    xp_shifted = shifted.derivative()
    s = LaurentSeries.monomial(r, 1, Fraction(-1), trunc)
    for _ in range(order.bit_length() + 3):
        f = poly_at_series(shifted.coeffs, s).truncate_to(trunc) - target
        if f.valuation() is None:
            break
        fp = poly_at_series(xp_shifted.coeffs, s).truncate_to(trunc)
        s = (s - f * fp.inverse()).truncate_to(trunc)
    else:
        raise RamificationNotSimple(f"Newton iteration did not converge at r={r}")
    # verify: X-invariance, involution, s'(0) = -1
    resid = poly_at_series(shifted.coeffs, s).truncate_to(trunc) - target
    if resid.valuation() is not None:
        raise RamificationNotSimple(f"X(r+s) != X(r+t) at r={r}")
    if s.coefficient(1) != -1:
        raise RamificationNotSimple(f"sigma'(r) != -1 at r={r}")
    invol = s.compose_with(s) - LaurentSeries.monomial(r, 1, Fraction(1), trunc)
    if invol.valuation() is not None:
        raise RamificationNotSimple(f"sigma is not an involution to order {order} at r={r}")
    return RamPoint(r, s, order)


def omega01_as_ratfunc(curve: SpectralCurve) -> RatFunc:
    """Coefficient of dz in omega_1^(0) = -Y dX, i.e. -Y(z) X'(z)."""
    return RatFunc(-curve.y_poly * curve.x_prime)


def _divided_difference(p: Poly, avar: str, bvar: str) -> BiPoly:
    """(p(a) - p(b)) / (a - b) as an exact bivariate polynomial."""
    out = BiPoly.zero(avar, bvar)
    for k, c in enumerate(p.coeffs):
        if k == 0 or c == 0:
            continue
        # (a^k - b^k)/(a-b) = sum_{i<k} a^i b^{k-1-i}
        for i in range(k):
            out = out + BiPoly.term(avar, bvar, c, i, k - 1 - i)
    return out


def double_point_scan(curve: SpectralCurve) -> DoublePointReport:
    """Rational pairs z_a != z_b with X(z_a)=X(z_b) and Y(z_a)=Y(z_b).

    Only rational double points are found; irrational ones exist for most
    curves and are invisible to this scan (documented limitation -- the pole
    property at double points is a theorem, the scan is a warning device).
    A common factor between the two divided differences means the map
    z -> (X,Y) identifies sheets globally: reported as degenerate.
    """
    pvar, qvar = "_dpa", "_dpb"
    pdd = _divided_difference(curve.x_poly, pvar, qvar)
    qdd = _divided_difference(curve.y_poly, pvar, qvar)
    # eliminate b: coefficients of each as polynomials in b over Q[a]
    def as_b_coeffs(bp: BiPoly) -> list[Poly]:
        nb = max((j for _, j, _ in bp.terms()), default=0)
        cols = []
        for j in range(nb + 1):
            na = max((i for i, jj, _ in bp.terms() if jj == j), default=0)
            cols.append(Poly(pvar, [bp.coeff(i, j) for i in range(na + 1)]))
        while len(cols) > 1 and cols[-1].is_zero():
            cols.pop()
        return cols

    pb = as_b_coeffs(pdd)
    qb = as_b_coeffs(qdd)
    if len(pb) == 1 or len(qb) == 1:
        # a divided difference free of b is a symmetric polynomial free of a
        # too, i.e. a nonzero constant: that equation has no solutions at all
        return DoublePointReport((), False)
    elim = sylvester_resultant(pb, qb, Poly.zero(pvar))
    if elim.is_zero():
        return DoublePointReport((), True)
    roots, _ = rational_roots(elim) if elim.degree >= 1 else ([], elim)
    pairs = set()
    zvar = curve.var
    for a, _ in roots:
        # candidate b's: common rational roots of both divided differences at a
        pa = _eval_first(pdd, a, zvar)
        qa = _eval_first(qdd, a, zvar)
        if pa.is_zero() and qa.is_zero():
            return DoublePointReport((), True)
        g = pa.gcd(qa) if not pa.is_zero() and not qa.is_zero() else (qa if pa.is_zero() else pa)
        if g.degree < 1:
            continue
        broots, _ = rational_roots(g)
        for b, _ in broots:
            if b != a:
                pairs.add((min(a, b), max(a, b)))
    return DoublePointReport(tuple(sorted(pairs)), False)


def _eval_first(bp: BiPoly, a: Fraction, outvar: str) -> Poly:
    """Evaluate the first variable of a BiPoly at a rational, leaving a Poly."""
    nb = max((j for _, j, _ in bp.terms()), default=0)
    coeffs = [Fraction(0)] * (nb + 1)
    for i, j, c in bp.terms():
        coeffs[j] += c * a**i
    return Poly(outvar, coeffs)


def require_non_degenerate(curve: SpectralCurve) -> DoublePointReport:
    """Scan for double points; refuse degenerate curves (engine precondition)."""
    report = double_point_scan(curve)
    if report.degenerate:
        raise DegenerateCurve(
            f"parametrization of {curve} identifies sheets globally; "
            "topological recursion refused"
        )
    return report
