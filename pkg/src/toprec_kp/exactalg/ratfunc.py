"""Rational functions in one variable over exact rationals.

Normal form: num/den with gcd(num, den) = 1 and den monic, so equality is
structural.  Arithmetic never leaves the normal form.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import ZeroDivisionPoly
from .poly import Poly, rat, rat_str


class RatFunc:
    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None) -> None:
        if den is None:
            den = Poly.const(num.var, 1)
        if den.is_zero():
            raise ZeroDivisionPoly("rational function with zero denominator")
        if num.var != den.var:
            raise ValueError("variable mismatch in RatFunc")
        if num.is_zero():
            den = Poly.const(num.var, 1)
        else:
            g = num.gcd(den)
            if g.degree >= 1:
                num = num // g
                den = den // g
            lead = den.leading()
            if lead != 1:
                num = num * (1 / lead)
                den = den * (1 / lead)
        self.num = num
        self.den = den

    # -- constructors ------------------------------------------------------

    @classmethod
    def const(cls, var: str, c) -> "RatFunc":
        return cls(Poly.const(var, c))

    @classmethod
    def x(cls, var: str) -> "RatFunc":
        return cls(Poly.x(var))

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFunc":
        return cls(p)

    @property
    def var(self) -> str:
        return self.num.var

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.degree == 0

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc(other)
        if isinstance(other, (int, Fraction)):
            return RatFunc.const(self.var, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionPoly("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int):
        if n < 0:
            return (RatFunc.const(self.var, 1) / self) ** (-n)
        return RatFunc(self.num ** n, self.den ** n)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def derivative(self) -> "RatFunc":
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __call__(self, point: Fraction) -> Fraction:
        point = rat(point)
        dv = self.den(point)
        if dv == 0:
            raise ZeroDivisionPoly(f"pole of rational function at {point}")
        return self.num(point) / dv

    def defined_at(self, point) -> bool:
        return self.den(rat(point)) != 0

    # -- rendering -----------------------------------------------------------

    def __str__(self) -> str:
        """Canonical text: "c * (monic num) / (den)" with trivial parts elided."""
        if self.num.is_zero():
            return "0"
        c = self.num.leading()
        monic_num = self.num * (1 / c)
        parts = [rat_str(c)]
        if monic_num.degree >= 1:
            parts.append(f"({monic_num})")
        head = " * ".join(parts)
        if self.den.degree == 0:
            return head
        den_str = str(self.den)
        if len(self.den.coeffs) - sum(1 for cc in self.den.coeffs if cc == 0) > 1:
            den_str = f"({den_str})"
        return f"{head} / {den_str}"

    def __repr__(self) -> str:
        return f"RatFunc({self})"
