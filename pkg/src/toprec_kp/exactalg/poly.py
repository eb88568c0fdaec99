"""Dense univariate polynomials and bivariate polynomials over exact rationals.

Coefficients are `fractions.Fraction` throughout: gcd-reduced, positive
denominator, no rounding ever.  Polynomials are dense coefficient lists from
degree 0 upward with a trimmed (nonzero) leading coefficient; degrees in this
artifact stay small, so no sparsity machinery.

Every polynomial carries a variable tag.  Mixed-variable arithmetic is a bug,
not a coercion, and raises ValueError.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from ..errors import ZeroDivisionPoly

Rat = Fraction


def rat(value) -> Fraction:
    """Coerce int / "p/q" string / Fraction to an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot make an exact rational out of {value!r}")


def rat_str(value: Fraction) -> str:
    """Canonical text form: "p/q", or "p" when the denominator is 1."""
    return str(value)


class Poly:
    """Dense univariate polynomial over Fraction."""

    __slots__ = ("var", "coeffs")

    def __init__(self, var: str, coeffs: Iterable) -> None:
        cs = [rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.var = var
        self.coeffs = tuple(cs)

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, var: str) -> "Poly":
        return cls(var, [])

    @classmethod
    def const(cls, var: str, c) -> "Poly":
        return cls(var, [rat(c)])

    @classmethod
    def x(cls, var: str) -> "Poly":
        return cls(var, [0, 1])

    @classmethod
    def monomial(cls, var: str, c, k: int) -> "Poly":
        return cls(var, [0] * k + [rat(c)])

    # -- basic queries ---------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError(f"{self} is not constant")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def leading(self) -> Fraction:
        if not self.coeffs:
            raise ZeroDivisionPoly("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def _check(self, other: "Poly") -> None:
        if self.var != other.var:
            raise ValueError(f"variable mismatch: {self.var!r} vs {other.var!r}")

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.var, [self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.var, [-c for c in self.coeffs])

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
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(self.var, out)

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.var, other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.const(self.var, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.var == other.var and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.var, self.coeffs))

    # -- division --------------------------------------------------------

    def divrem(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Exact quotient and remainder."""
        other = self._coerce(other)
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionPoly("division by zero polynomial")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly.zero(self.var), self
        quot = [Fraction(0)] * (dq + 1)
        lead = other.leading()
        for k in range(dq, -1, -1):
            c = rem[k + other.degree] / lead
            quot[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return Poly(self.var, quot), Poly(self.var, rem[: other.degree])

    def __floordiv__(self, other):
        return self.divrem(other)[0]

    def __mod__(self, other):
        return self.divrem(other)[1]

    def divides(self, other: "Poly") -> bool:
        """True when self exactly divides other."""
        if self.is_zero():
            return other.is_zero()
        return other.divrem(self)[1].is_zero()

    def _primitive_int_coeffs(self) -> list[int]:
        """Integer coefficient list with content 1 (sign of leading kept)."""
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // _gcd_int(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = _gcd_int(g, v)
        return [v // g for v in ints] if g else ints

    def gcd(self, other: "Poly") -> "Poly":
        """Monic greatest common divisor (primitive remainder sequence over Z,
        which keeps intermediate coefficients bounded)."""
        self._check(other)
        if self.is_zero():
            return other.monic()
        if other.is_zero():
            return self.monic()
        a = self._primitive_int_coeffs()
        b = other._primitive_int_coeffs()
        if len(a) < len(b):
            a, b = b, a
        while b:
            r = _int_pseudo_rem(a, b)
            g = 0
            for v in r:
                g = _gcd_int(g, v)
            if g > 1:
                r = [v // g for v in r]
            a, b = b, r
        lead = Fraction(a[-1])
        return Poly(self.var, [Fraction(v) / lead for v in a])

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self * (1 / self.leading())

    # -- calculus and evaluation ------------------------------------------

    def derivative(self) -> "Poly":
        return Poly(self.var, [i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, point):
        """Horner evaluation; `point` may be any ring element (Rat, RatFunc)."""
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * point + c
        return Fraction(0) if acc is None else acc

    def compose(self, inner: "Poly") -> "Poly":
        """self(inner), exact."""
        acc = Poly.zero(inner.var)
        for c in reversed(self.coeffs):
            acc = acc * inner + Poly.const(inner.var, c)
        return acc

    def shift(self, a) -> "Poly":
        """Taylor shift: p(var + a)."""
        return self.compose(Poly(self.var, [rat(a), 1]))

    def with_var(self, var: str) -> "Poly":
        return Poly(var, self.coeffs)

    # -- rendering ---------------------------------------------------------

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeff(k)
            if c == 0:
                continue
            if k == 0:
                term = rat_str(abs(c))
            else:
                mag = abs(c)
                head = "" if mag == 1 else f"{rat_str(mag)}*"
                term = f"{head}{self.var}" + (f"^{k}" if k > 1 else "")
            if not parts:
                parts.append(term if c > 0 else f"-{term}")
            else:
                parts.append(f"+ {term}" if c > 0 else f"- {term}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Poly({self.var!r}, {self})"


# -- polynomial parsing ------------------------------------------------------

def parse_poly(text: str, var: str) -> Poly:
    """Parse expressions like "z^3 - 3*z" or "-7/2*z^2 + 1" exactly.

    Grammar: sums of terms; a term is a product of rationals and var^k
    (with optional '*'); parentheses are not supported, matching the
    config format.
    """
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial text")
    terms: list[tuple[Fraction, int]] = []
    i = 0
    n = len(s)
    while i < n:
        sign = Fraction(1)
        while i < n and s[i] in "+-":
            if s[i] == "-":
                sign = -sign
            i += 1
        coeff = sign
        power = 0
        saw_factor = False
        while i < n and s[i] not in "+-":
            if s[i] == "*":
                i += 1
                continue
            if s.startswith(var, i):
                i += len(var)
                k = 1
                if i < n and s[i] == "^":
                    i += 1
                    j = i
                    while j < n and s[j].isdigit():
                        j += 1
                    if j == i:
                        raise ValueError(f"bad exponent in {text!r}")
                    k = int(s[i:j])
                    i = j
                power += k
                saw_factor = True
            else:
                j = i
                while j < n and (s[j].isdigit() or s[j] == "/"):
                    j += 1
                if j == i:
                    raise ValueError(f"unexpected character {s[i]!r} in {text!r}")
                coeff *= Fraction(s[i:j])
                i = j
                saw_factor = True
        if not saw_factor:
            raise ValueError(f"dangling sign in {text!r}")
        terms.append((coeff, power))
    out = [Fraction(0)] * (max(p for _, p in terms) + 1)
    for c, p in terms:
        out[p] += c
    return Poly(var, out)


# -- rational root extraction -------------------------------------------------

def rational_roots(p: Poly) -> tuple[list[tuple[Fraction, int]], Poly]:
    """All rational roots with multiplicities, plus the root-free cofactor.

    Uses the rational-root theorem on the integer-normalized polynomial and
    deflates each found root to full multiplicity.  The returned cofactor has
    no rational roots (it may be a nonzero constant).
    """
    if p.is_zero():
        raise ZeroDivisionPoly("rational_roots of the zero polynomial")
    roots: list[tuple[Fraction, int]] = []
    work = p
    # strip the root at 0 first
    mult0 = 0
    while not work.is_zero() and work.coeff(0) == 0 and work.degree >= 1:
        work = Poly(work.var, work.coeffs[1:])
        mult0 += 1
    if mult0:
        roots.append((Fraction(0), mult0))
    while work.degree >= 1:
        found = None
        den_lcm = 1
        for c in work.coeffs:
            den_lcm = den_lcm * c.denominator // _gcd_int(den_lcm, c.denominator)
        ints = [int(c * den_lcm) for c in work.coeffs]
        a0, an = ints[0], ints[-1]
        if a0 == 0:
            found = Fraction(0)
        else:
            for pp in _divisors(abs(a0)):
                for qq in _divisors(abs(an)):
                    for cand in (Fraction(pp, qq), Fraction(-pp, qq)):
                        if work(cand) == 0:
                            found = cand
                            break
                    if found is not None:
                        break
                if found is not None:
                    break
        if found is None:
            break
        mult = 0
        lin = Poly(work.var, [-found, 1])
        while True:
            q, r = work.divrem(lin)
            if not r.is_zero():
                break
            work = q
            mult += 1
        roots.append((found, mult))
    roots.sort(key=lambda rm: rm[0])
    return roots, work


def _gcd_int(a: int, b: int) -> int:
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


def _int_pseudo_rem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of integer coefficient lists: lc(b)^k * a mod b."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(r) - 1 >= db and r:
        k = len(r) - 1 - db
        lead = r[-1]
        r = [c * lb for c in r[:-1]]
        for i in range(db):
            r[k + i] -= lead * b[i]
        while r and r[-1] == 0:
            r.pop()
    return r


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


# -- generic determinants and resultants --------------------------------------

def det_ring(mat: Sequence[Sequence], zero):
    """Determinant over any commutative ring via expansion in minors.

    Memoizes on column subsets, so the cost is O(2^n * n) ring operations:
    fine for the Sylvester matrices (size <= deg p + deg q) used here.
    Ring elements only need +, *, unary -.
    """
    n = len(mat)
    if n == 0:
        raise ValueError("empty matrix")
    cache: dict[tuple[int, ...], object] = {}

    def minor(cols: tuple[int, ...]):
        if cols in cache:
            return cache[cols]
        row = n - len(cols)
        if not cols:
            raise AssertionError
        if len(cols) == 1:
            val = mat[row][cols[0]]
        else:
            val = zero
            for idx, c in enumerate(cols):
                rest = cols[:idx] + cols[idx + 1 :]
                term = mat[row][c] * minor(rest)
                val = val + term if idx % 2 == 0 else val - term
        cache[cols] = val
        return val

    return minor(tuple(range(n)))


def sylvester_resultant(p_coeffs: Sequence, q_coeffs: Sequence, zero):
    """Resultant of two polynomials given as coefficient lists (degree 0 up)
    over an arbitrary commutative ring, as the Sylvester determinant.

    Leading coefficients must be ring-nonzero; callers guarantee this.
    """
    pc = list(p_coeffs)
    qc = list(q_coeffs)
    m = len(pc) - 1
    n = len(qc) - 1
    if m < 0 or n < 0:
        raise ZeroDivisionPoly("resultant with a zero polynomial")
    if m == 0 and n == 0:
        raise ValueError("resultant needs at least one nonconstant polynomial")
    size = m + n
    rows = []
    prow = list(reversed(pc))  # degree m .. 0
    qrow = list(reversed(qc))
    for i in range(n):
        rows.append([zero] * i + prow + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + qrow + [zero] * (size - n - 1 - i))
    return det_ring(rows, zero)


def resultant(p: Poly, q: Poly) -> Fraction:
    """Resultant of two univariate rational polynomials."""
    if p.var != q.var:
        raise ValueError("variable mismatch in resultant")
    if p.is_zero() or q.is_zero():
        raise ZeroDivisionPoly("resultant with a zero polynomial")
    if p.degree == 0 and q.degree == 0:
        return Fraction(1)
    if p.degree == 0:
        return p.coeffs[0] ** q.degree
    if q.degree == 0:
        return q.coeffs[0] ** p.degree
    return sylvester_resultant(p.coeffs, q.coeffs, Fraction(0))


class BiPoly:
    """Dense bivariate polynomial: coeffs[i][j] multiplies xvar^i * yvar^j."""

    __slots__ = ("xvar", "yvar", "coeffs")

    def __init__(self, xvar: str, yvar: str, coeffs) -> None:
        rows = [[rat(c) for c in row] for row in coeffs]
        # trim trailing zero columns, then zero rows
        width = 0
        for row in rows:
            for j in range(len(row) - 1, -1, -1):
                if row[j] != 0:
                    width = max(width, j + 1)
                    break
        rows = [row[:width] + [Fraction(0)] * (width - len(row[:width])) for row in rows]
        while rows and all(c == 0 for c in rows[-1]):
            rows.pop()
        self.xvar = xvar
        self.yvar = yvar
        self.coeffs = tuple(tuple(row) for row in rows)

    @classmethod
    def zero(cls, xvar: str, yvar: str) -> "BiPoly":
        return cls(xvar, yvar, [])

    @classmethod
    def const(cls, xvar: str, yvar: str, c) -> "BiPoly":
        return cls(xvar, yvar, [[rat(c)]])

    @classmethod
    def term(cls, xvar: str, yvar: str, c, i: int, j: int) -> "BiPoly":
        rows = [[Fraction(0)] * (j + 1) for _ in range(i + 1)]
        rows[i][j] = rat(c)
        return cls(xvar, yvar, rows)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int, j: int) -> Fraction:
        if 0 <= i < len(self.coeffs) and 0 <= j < len(self.coeffs[i]):
            return self.coeffs[i][j]
        return Fraction(0)

    def terms(self):
        for i, row in enumerate(self.coeffs):
            for j, c in enumerate(row):
                if c:
                    yield i, j, c

    def _check(self, other: "BiPoly") -> None:
        if (self.xvar, self.yvar) != (other.xvar, other.yvar):
            raise ValueError("variable mismatch in BiPoly arithmetic")

    def _coerce(self, other):
        if isinstance(other, BiPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return BiPoly.const(self.xvar, self.yvar, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        self._check(other)
        ni = max(len(self.coeffs), len(other.coeffs))
        nj = max(
            max((len(r) for r in self.coeffs), default=0),
            max((len(r) for r in other.coeffs), default=0),
        )
        rows = [[self.coeff(i, j) + other.coeff(i, j) for j in range(nj)] for i in range(ni)]
        return BiPoly(self.xvar, self.yvar, rows)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly(self.xvar, self.yvar, [[-c for c in row] for row in self.coeffs])

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
        self._check(other)
        if self.is_zero() or other.is_zero():
            return BiPoly.zero(self.xvar, self.yvar)
        ni = len(self.coeffs) + len(other.coeffs) - 1
        nj = max(len(r) for r in self.coeffs) + max(len(r) for r in other.coeffs) - 1
        rows = [[Fraction(0)] * nj for _ in range(ni)]
        for i, j, c in self.terms():
            for k, l, d in other.terms():
                rows[i + k][j + l] += c * d
        return BiPoly(self.xvar, self.yvar, rows)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self.xvar, self.yvar) == (other.xvar, other.yvar) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.xvar, self.yvar, self.coeffs))

    def __call__(self, xval, yval):
        total = Fraction(0)
        for i, j, c in self.terms():
            total += c * rat(xval) ** i * rat(yval) ** j
        return total

    def proportional_to(self, other: "BiPoly"):
        """Return the constant c with self == c * other, or None."""
        self._check(other)
        if other.is_zero():
            return Fraction(0) if self.is_zero() else None
        for i, j, c in other.terms():
            ratio = self.coeff(i, j) / c
            break
        if (self - other * ratio).is_zero():
            return ratio
        return None

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i, j, c in self.terms():
            factors = []
            if abs(c) != 1 or (i == 0 and j == 0):
                factors.append(rat_str(abs(c)))
            if i:
                factors.append(self.xvar + (f"^{i}" if i > 1 else ""))
            if j:
                factors.append(self.yvar + (f"^{j}" if j > 1 else ""))
            term = "*".join(factors)
            if not parts:
                parts.append(term if c > 0 else f"-{term}")
            else:
                parts.append(f"+ {term}" if c > 0 else f"- {term}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"BiPoly({self.xvar!r},{self.yvar!r}: {self})"


def resultant_bipoly(p_coeffs: Sequence[BiPoly], q_coeffs: Sequence[BiPoly], xvar: str, yvar: str) -> BiPoly:
    """Resultant in the eliminated variable of two polynomials whose
    coefficients are BiPoly in (xvar, yvar)."""
    zero = BiPoly.zero(xvar, yvar)
    pc = list(p_coeffs)
    qc = list(q_coeffs)
    while pc and pc[-1].is_zero():
        pc.pop()
    while qc and qc[-1].is_zero():
        qc.pop()
    return sylvester_resultant(pc, qc, zero)
