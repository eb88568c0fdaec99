"""Truncation-tracked Laurent series.

A series knows exactly which coefficients it is entitled to: every exponent
strictly below `trunc` is exact, everything at or above it is unknown.
Requesting an unknown coefficient raises TruncationExhausted -- never a
silent zero, because residue extraction must be provably correct.

`trunc is None` means the series is exact to all orders (a Laurent
polynomial), which is what polynomial evaluations and monomials produce.
Coefficients live in any commutative ring with +, *, unary -, and truthiness
as the zero test: Fraction and the engine's pole-basis combinations both
qualify.  `center` is a bookkeeping tag (expansion point); binary operations
insist that it match.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import TruncationExhausted, ZeroDivisionPoly


def _tmin(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class LaurentSeries:
    __slots__ = ("center", "coeffs", "trunc")

    def __init__(self, center, coeffs: dict, trunc: int | None) -> None:
        clean = {}
        for e, c in coeffs.items():
            if trunc is not None and e >= trunc:
                continue
            if c:
                clean[e] = c
        self.center = center
        self.coeffs = clean
        self.trunc = trunc

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, center, trunc: int | None = None) -> "LaurentSeries":
        return cls(center, {}, trunc)

    @classmethod
    def const(cls, center, c, trunc: int | None = None) -> "LaurentSeries":
        return cls(center, {0: c}, trunc)

    @classmethod
    def monomial(cls, center, exponent: int, c=Fraction(1), trunc: int | None = None) -> "LaurentSeries":
        return cls(center, {exponent: c}, trunc)

    # -- queries ---------------------------------------------------------

    def valuation(self) -> int | None:
        """Lowest known exponent; None when zero to all known orders."""
        return min(self.coeffs) if self.coeffs else None

    def is_exact_zero(self) -> bool:
        return not self.coeffs and self.trunc is None

    def coefficient(self, k: int):
        if self.trunc is not None and k >= self.trunc:
            raise TruncationExhausted(
                f"coefficient of t^{k} requested, series known only below t^{self.trunc}"
            )
        return self.coeffs.get(k, Fraction(0))

    def residue(self):
        """Coefficient of t^-1."""
        return self.coefficient(-1)

    def known_exponents(self):
        return sorted(self.coeffs)

    def _check(self, other: "LaurentSeries") -> None:
        if self.center != other.center:
            raise ValueError(f"center mismatch: {self.center} vs {other.center}")

    # -- ring operations -------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, LaurentSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentSeries.const(self.center, Fraction(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        self._check(other)
        trunc = _tmin(self.trunc, other.trunc)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            cur = out.get(e)
            out[e] = c if cur is None else cur + c
        return LaurentSeries(self.center, out, trunc)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.center, {e: -c for e, c in self.coeffs.items()}, self.trunc)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "LaurentSeries":
        if not c:
            return LaurentSeries.zero(self.center, self.trunc)
        return LaurentSeries(self.center, {e: c * v for e, v in self.coeffs.items()}, self.trunc)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by t^k."""
        return LaurentSeries(
            self.center,
            {e + k: c for e, c in self.coeffs.items()},
            None if self.trunc is None else self.trunc + k,
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(other))
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        self._check(other)
        va, vb = self.valuation(), other.valuation()
        # zero-to-known-order factors: only the truncation bound survives
        if va is None or vb is None:
            if (va is None and self.trunc is None) or (vb is None and other.trunc is None):
                return LaurentSeries.zero(self.center, None)  # exact zero
            if va is None and vb is None:
                return LaurentSeries.zero(self.center, self.trunc + other.trunc)
            if va is None:
                return LaurentSeries.zero(self.center, self.trunc + vb)
            return LaurentSeries.zero(self.center, other.trunc + va)
        trunc = _tmin(
            None if other.trunc is None else va + other.trunc,
            None if self.trunc is None else self.trunc + vb,
        )
        out: dict[int, object] = {}
        for ea, ca in self.coeffs.items():
            for eb, cb in other.coeffs.items():
                e = ea + eb
                if trunc is not None and e >= trunc:
                    continue
                term = ca * cb
                cur = out.get(e)
                out[e] = term if cur is None else cur + term
        return LaurentSeries(self.center, out, trunc)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentSeries":
        """Multiplicative inverse; leading coefficient must be invertible."""
        v = self.valuation()
        if v is None:
            raise ZeroDivisionPoly("inverse of a series that is zero to known order")
        lead = self.coeffs[v]
        if not isinstance(lead, Fraction):
            raise ZeroDivisionPoly("series inverse needs scalar leading coefficient")
        trunc = None if self.trunc is None else self.trunc - 2 * v
        # b_e solves sum_{i} a_i b_{e'-i} = delta; run e' = 0,1,2,... shifted by -v
        n_terms = None
        if trunc is not None:
            n_terms = trunc + v  # exponents -v .. trunc-1 => n = trunc - (-v)
        else:
            # exact polynomial input: an exact inverse only exists for monomials
            if len(self.coeffs) == 1:
                return LaurentSeries.monomial(self.center, -v, 1 / lead)
            raise ZeroDivisionPoly(
                "inverse of a non-monomial exact series needs a finite truncation; "
                "call truncate_to(order) first"
            )
        out: dict[int, object] = {}
        for m in range(n_terms):
            e = -v + m
            acc = Fraction(1) if m == 0 else Fraction(0)
            for ea, ca in self.coeffs.items():
                if ea == v:
                    continue
                eb = e + v - ea
                if eb in out:
                    acc = acc - ca * out[eb]
            val = acc / lead if isinstance(acc, Fraction) else acc * (1 / lead)
            if val:
                out[e] = val
        return LaurentSeries(self.center, out, trunc)

    def __pow__(self, n: int) -> "LaurentSeries":
        if n == 0:
            return LaurentSeries.const(self.center, Fraction(1), None)
        if n < 0:
            return self.inverse() ** (-n)
        out = None
        base = self
        m = n
        while m:
            if m & 1:
                out = base if out is None else out * base
            m >>= 1
            if m:
                base = base * base
        return out

    def truncate_to(self, trunc: int) -> "LaurentSeries":
        return LaurentSeries(self.center, self.coeffs, _tmin(self.trunc, trunc))

    def compose_with(self, inner: "LaurentSeries") -> "LaurentSeries":
        """self(inner(t)); inner must have strictly positive valuation."""
        vi = inner.valuation()
        if vi is None or vi < 1:
            raise ValueError("composition needs an inner series with valuation >= 1")
        cap = None if self.trunc is None else self.trunc * vi
        acc = LaurentSeries.zero(inner.center, cap)
        for e in self.known_exponents():
            acc = acc + (inner ** e).scale(self.coeffs[e])
        return acc.truncate_to(cap) if cap is not None else acc

    def equal_to_order(self, other: "LaurentSeries", order: int) -> bool:
        """Exact equality of all coefficients below `order`."""
        va = self.valuation()
        vb = other.valuation()
        lows = [v for v in (va, vb) if v is not None]
        start = min(lows) if lows else order
        for e in range(min(start, order), order):
            if self.coefficient(e) != other.coefficient(e):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (
            self.center == other.center
            and self.trunc == other.trunc
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.center, self.trunc, tuple(sorted(self.coeffs.items(), key=lambda kv: kv[0]))))

    def __str__(self) -> str:
        if not self.coeffs:
            body = "0"
        else:
            body = " + ".join(f"({self.coeffs[e]})*t^{e}" for e in self.known_exponents())
        tail = "" if self.trunc is None else f" + O(t^{self.trunc})"
        return body + tail

    def __repr__(self) -> str:
        return f"LaurentSeries@{self.center}[{self}]"


def poly_at_series(coeffs, series: LaurentSeries) -> LaurentSeries:
    """Evaluate a polynomial (coefficient list, degree 0 up) at a series."""
    acc = LaurentSeries.zero(series.center, None)
    for c in reversed(list(coeffs)):
        acc = acc * series + LaurentSeries.const(series.center, Fraction(c), None)
    return acc
