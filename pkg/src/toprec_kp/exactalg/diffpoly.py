"""Differential polynomials in time-dependent generators, graded by hbar.

A DiffPoly is a finite sum of monomials

    c * hbar^a * prod_i (s_i^{(j_i)})^{e_i}

where each s is a named generator (u, w, ...) and s^{(j)} is its j-th
t-derivative.  d/dt acts as the derivation s^{(j)} -> s^{(j+1)} via the
Leibniz rule; hbar is a central constant.  Coefficients are exact rationals.

HbarSeries is the substitution target: a truncated power series in hbar whose
coefficients are PuiseuxSums in the internal time variable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .poly import rat, rat_str
from .puiseux import PuiseuxSum

# monomial key: (hbar_power, ((sym, deriv_order), exponent) sorted tuple)
DMono = tuple[tuple[tuple[str, int], int], ...]
Key = tuple[int, DMono]


def _mono_mul(a: DMono, b: DMono) -> DMono:
    out: dict[tuple[str, int], int] = {}
    for g, e in a:
        out[g] = out.get(g, 0) + e
    for g, e in b:
        out[g] = out.get(g, 0) + e
    return tuple(sorted(out.items()))


class DiffPoly:
    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None) -> None:
        clean: dict[Key, Fraction] = {}
        for k, c in (terms or {}).items():
            c = rat(c)
            if c:
                clean[k] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def const(cls, c) -> "DiffPoly":
        return cls({(0, ()): rat(c)})

    @classmethod
    def gen(cls, sym: str, j: int = 0) -> "DiffPoly":
        return cls({(0, (((sym, j), 1),)): Fraction(1)})

    @classmethod
    def hbar(cls, k: int = 1) -> "DiffPoly":
        return cls({(k, ()): Fraction(1)})

    @classmethod
    def zero(cls) -> "DiffPoly":
        return cls()

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(k == (0, ()) for k in self.terms)

    def const_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_const():
            raise ValueError(f"{self} is not constant")
        return self.terms[(0, ())]

    def max_hbar(self) -> int:
        return max((a for a, _ in self.terms), default=0)

    def hbar_part(self, a: int) -> "DiffPoly":
        return DiffPoly({(0, m): c for (h, m), c in self.terms.items() if h == a})

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, DiffPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return DiffPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return DiffPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly({k: -c for k, c in self.terms.items()})

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
        out: dict[Key, Fraction] = {}
        for (ha, ma), ca in self.terms.items():
            for (hb, mb), cb in other.terms.items():
                k = (ha + hb, _mono_mul(ma, mb))
                out[k] = out.get(k, Fraction(0)) + ca * cb
        return DiffPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "DiffPoly":
        if n < 0:
            raise ValueError("negative power of a DiffPoly")
        out = DiffPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    # -- derivation and substitution ------------------------------------------

    def d_dt(self) -> "DiffPoly":
        """Formal t-derivative: a derivation with s^{(j)} -> s^{(j+1)}."""
        out: dict[Key, Fraction] = {}
        for (h, mono), c in self.terms.items():
            for idx, ((sym, j), e) in enumerate(mono):
                rest = list(mono)
                if e == 1:
                    del rest[idx]
                else:
                    rest[idx] = ((sym, j), e - 1)
                bumped = _mono_mul(tuple(rest), (((sym, j + 1), 1),))
                k = (h, bumped)
                out[k] = out.get(k, Fraction(0)) + c * e
        return DiffPoly(out)

    def set_zero(self, sym: str) -> "DiffPoly":
        """Drop every monomial containing the generator `sym` (any order)."""
        return DiffPoly(
            {
                (h, m): c
                for (h, m), c in self.terms.items()
                if not any(g[0] == sym for g, _ in m)
            }
        )

    def classical_value(self, values: dict[str, Fraction]) -> Fraction:
        """hbar->0 projection followed by substituting numbers for generators.

        Only derivative-free monomials may survive at hbar^0; a stray
        s^{(j>=1)} there means the expression has no classical projection.
        """
        total = Fraction(0)
        for (h, mono), c in self.terms.items():
            if h > 0:
                continue
            prod = c
            for (sym, j), e in mono:
                if j > 0:
                    raise ValueError(
                        f"hbar^0 part contains {sym}^({j}); no classical projection"
                    )
                prod *= rat(values[sym]) ** e
            total += prod
        return total

    def substitute(
        self,
        series: dict[str, "HbarSeries"],
        dt: Callable[[PuiseuxSum], PuiseuxSum],
        order: int,
    ) -> "HbarSeries":
        """Substitute an hbar-series for every generator, truncating at hbar^order.

        `dt` realizes d/dt on PuiseuxSums (it carries the model's time change
        of variables).  Derivatives of the supplied series are cached.
        """
        cache: dict[tuple[str, int], HbarSeries] = {}

        def deriv(sym: str, j: int) -> HbarSeries:
            if (sym, j) not in cache:
                if j == 0:
                    cache[(sym, j)] = series[sym].truncate(order)
                else:
                    cache[(sym, j)] = deriv(sym, j - 1).map(dt)
            return cache[(sym, j)]

        total = HbarSeries.zero(series_var(series), order)
        for (h, mono), c in self.terms.items():
            if h > order:
                continue
            acc = HbarSeries.const(series_var(series), c, order - h)
            for (sym, j), e in mono:
                for _ in range(e):
                    acc = acc * deriv(sym, j).truncate(order - h)
            total = total + acc.hbar_shift(h).truncate(order)
        return total

    # -- rendering -----------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (h, mono), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            factors = []
            if abs(c) != 1 or (h == 0 and not mono):
                factors.append(rat_str(abs(c)))
            if h:
                factors.append("h" + (f"^{h}" if h > 1 else ""))
            for (sym, j), e in mono:
                name = sym + "'" * j if j <= 4 else f"{sym}^({j})"
                factors.append(name + (f"^{e}" if e > 1 else ""))
            body = "*".join(factors)
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"DiffPoly({self})"


def series_var(series: dict[str, "HbarSeries"]) -> str:
    for s in series.values():
        return s.var
    raise ValueError("empty substitution map")


class HbarSeries:
    """Truncated power series in hbar with PuiseuxSum coefficients.

    orders[g] is the coefficient of hbar^g; everything above `order` is
    unknown and operations never pretend otherwise.
    """

    __slots__ = ("var", "orders", "order")

    def __init__(self, var: str, orders: list[PuiseuxSum], order: int) -> None:
        if len(orders) != order + 1:
            raise ValueError("HbarSeries length mismatch")
        self.var = var
        self.orders = list(orders)
        self.order = order

    @classmethod
    def zero(cls, var: str, order: int) -> "HbarSeries":
        return cls(var, [PuiseuxSum.zero(var) for _ in range(order + 1)], order)

    @classmethod
    def const(cls, var: str, c, order: int) -> "HbarSeries":
        out = cls.zero(var, order)
        out.orders[0] = PuiseuxSum(var, {Fraction(0): rat(c)})
        return out

    @classmethod
    def from_even_orders(cls, var: str, evens: list[PuiseuxSum], order: int) -> "HbarSeries":
        """Build sum_g hbar^{2g} evens[g], truncated at hbar^order."""
        out = cls.zero(var, order)
        for g, p in enumerate(evens):
            if 2 * g <= order:
                out.orders[2 * g] = p
        return out

    def coefficient(self, g: int) -> PuiseuxSum:
        if g > self.order:
            raise ValueError(f"hbar^{g} beyond truncation {self.order}")
        return self.orders[g]

    def truncate(self, order: int) -> "HbarSeries":
        if order >= self.order:
            return self
        return HbarSeries(self.var, self.orders[: order + 1], order)

    def hbar_shift(self, k: int) -> "HbarSeries":
        out = [PuiseuxSum.zero(self.var) for _ in range(self.order + k + 1)]
        for g, p in enumerate(self.orders):
            out[g + k] = p
        return HbarSeries(self.var, out, self.order + k)

    def map(self, fn) -> "HbarSeries":
        return HbarSeries(self.var, [fn(p) for p in self.orders], self.order)

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.orders)

    def __add__(self, other: "HbarSeries") -> "HbarSeries":
        order = min(self.order, other.order)
        return HbarSeries(
            self.var,
            [self.orders[g] + other.orders[g] for g in range(order + 1)],
            order,
        )

    def __sub__(self, other: "HbarSeries") -> "HbarSeries":
        order = min(self.order, other.order)
        return HbarSeries(
            self.var,
            [self.orders[g] - other.orders[g] for g in range(order + 1)],
            order,
        )

    def __mul__(self, other: "HbarSeries") -> "HbarSeries":
        order = min(self.order, other.order)
        out = [PuiseuxSum.zero(self.var) for _ in range(order + 1)]
        for ga, pa in enumerate(self.orders):
            if ga > order or pa.is_zero():
                continue
            for gb, pb in enumerate(other.orders):
                g = ga + gb
                if g > order or pb.is_zero():
                    continue
                out[g] = out[g] + pa * pb
        return HbarSeries(self.var, out, order)

    def __eq__(self, other):
        if not isinstance(other, HbarSeries):
            return NotImplemented
        return (
            self.var == other.var
            and self.order == other.order
            and self.orders == other.orders
        )

    def __str__(self) -> str:
        parts = [f"h^{g}*({p})" for g, p in enumerate(self.orders) if not p.is_zero()]
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O(h^{self.order + 1})"
