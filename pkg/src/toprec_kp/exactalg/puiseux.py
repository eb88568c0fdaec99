"""Finite sums of rational-exponent monomials in an internal time variable.

A PuiseuxSum is  sum_a c_a * tau^a  (+ c_log * ln tau), with exact rational
exponents and coefficients and at most one log term.  This is the value
domain for string-equation solutions u^{g}(tau) and free energies F^(g):
in the rationalizing variable tau every coefficient stays in Q.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import ZeroDivisionPoly
from .poly import rat, rat_str


class PuiseuxSum:
    __slots__ = ("var", "terms", "log_coeff")

    def __init__(self, var: str, terms: dict | None = None, log_coeff=0) -> None:
        clean: dict[Fraction, Fraction] = {}
        for e, c in (terms or {}).items():
            c = rat(c)
            if c:
                clean[rat(e)] = c
        self.var = var
        self.terms = clean
        self.log_coeff = rat(log_coeff)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, var: str) -> "PuiseuxSum":
        return cls(var)

    @classmethod
    def monomial(cls, var: str, coeff, exponent) -> "PuiseuxSum":
        return cls(var, {rat(exponent): rat(coeff)})

    @classmethod
    def log(cls, var: str, coeff) -> "PuiseuxSum":
        return cls(var, {}, log_coeff=coeff)

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms and self.log_coeff == 0

    def has_log(self) -> bool:
        return self.log_coeff != 0

    def coeff(self, exponent) -> Fraction:
        return self.terms.get(rat(exponent), Fraction(0))

    def single_monomial(self) -> tuple[Fraction, Fraction]:
        """(coeff, exponent) when the sum is exactly one monomial, no log."""
        if self.has_log() or len(self.terms) != 1:
            raise ValueError(f"{self} is not a single monomial")
        ((e, c),) = self.terms.items()
        return c, e

    def _check(self, other: "PuiseuxSum") -> None:
        if self.var != other.var:
            raise ValueError("variable mismatch in PuiseuxSum arithmetic")

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PuiseuxSum):
            return other
        if isinstance(other, (int, Fraction)):
            return PuiseuxSum(self.var, {Fraction(0): rat(other)})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return PuiseuxSum(self.var, out, self.log_coeff + other.log_coeff)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSum(self.var, {e: -c for e, c in self.terms.items()}, -self.log_coeff)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = rat(other)
            return PuiseuxSum(
                self.var, {e: c * v for e, v in self.terms.items()}, c * self.log_coeff
            )
        if not isinstance(other, PuiseuxSum):
            return NotImplemented
        self._check(other)
        if self.has_log() and other.has_log():
            raise ValueError("product of two log-bearing sums leaves the ring")
        if other.has_log():
            return other * self
        out: dict[Fraction, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = ea + eb
                out[e] = out.get(e, Fraction(0)) + ca * cb
        if self.has_log():
            # (x + c ln) * y with y log-free: log survives only against y's constant
            const = other.terms.get(Fraction(0), Fraction(0))
            nonconst = {e: c for e, c in other.terms.items() if e != 0}
            if nonconst:
                raise ValueError("log term times non-constant monomials leaves the ring")
            return PuiseuxSum(self.var, out, self.log_coeff * const)
        return PuiseuxSum(self.var, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PuiseuxSum":
        if n < 0:
            raise ValueError("negative power of a PuiseuxSum")
        out = PuiseuxSum(self.var, {Fraction(0): Fraction(1)})
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (
            self.var == other.var
            and self.terms == other.terms
            and self.log_coeff == other.log_coeff
        )

    def __hash__(self):
        return hash((self.var, tuple(sorted(self.terms.items())), self.log_coeff))

    # -- calculus --------------------------------------------------------

    def derivative(self) -> "PuiseuxSum":
        """d/d tau: tau^a -> a tau^(a-1), ln tau -> tau^-1."""
        out: dict[Fraction, Fraction] = {}
        for e, c in self.terms.items():
            if e != 0:
                ne = e - 1
                out[ne] = out.get(ne, Fraction(0)) + e * c
        if self.log_coeff:
            out[Fraction(-1)] = out.get(Fraction(-1), Fraction(0)) + self.log_coeff
        return PuiseuxSum(self.var, out)

    def antiderivative(self) -> "PuiseuxSum":
        """Antiderivative in tau; exponent -1 integrates to the log term."""
        if self.has_log():
            raise ValueError("antiderivative of a log term is out of ring")
        out: dict[Fraction, Fraction] = {}
        log_c = Fraction(0)
        for e, c in self.terms.items():
            if e == -1:
                log_c += c
            else:
                out[e + 1] = c / (e + 1)
        return PuiseuxSum(self.var, out, log_c)

    def divide_by_monomial(self, coeff, exponent) -> "PuiseuxSum":
        coeff = rat(coeff)
        if coeff == 0:
            raise ZeroDivisionPoly("division by zero monomial")
        if self.has_log():
            raise ValueError("cannot divide a log term by a monomial")
        e0 = rat(exponent)
        return PuiseuxSum(self.var, {e - e0: c / coeff for e, c in self.terms.items()})

    # -- rendering -----------------------------------------------------------

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            if e == 0:
                body = rat_str(abs(c))
            else:
                mag = "" if abs(c) == 1 else f"{rat_str(abs(c))}*"
                exp = f"^{e}" if e != 1 else ""
                body = f"{mag}{self.var}{exp}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        if self.log_coeff:
            c = self.log_coeff
            mag = "" if abs(c) == 1 else f"{rat_str(abs(c))}*"
            body = f"{mag}ln({self.var})"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"PuiseuxSum({self})"
