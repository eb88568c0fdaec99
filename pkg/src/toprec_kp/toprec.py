"""Topological recursion engine on genus-0 spectral curves, exact to the bit.

Representation.  Away from (0,1) and (0,2) -- which stay closed forms -- every
correlator omega_n^(g) is a finite symmetric sum of products of pole-basis
differentials dz/(z-r)^k anchored at ramification points.  On genus 0 the
z1-dependence of the recursion enters only through expansions of the kernel
numerator in 1/(z1-r)^m, so this representation is closed under the recursion;
symmetry and pole checks become finite-data assertions.

A TensorForm stores one coefficient per *sorted* multiset of (r, k) pairs; the
represented n-form is

    sum_{multisets} coeff * sum_{distinct arrangements} prod_i dz_i/(z_i-r_i)^{k_i}.

All residue extraction goes through truncation-tracked Laurent series; a
coefficient beyond guaranteed accuracy raises instead of silently reading 0.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from .curve import RamPoint, SpectralCurve, galois_series, require_non_degenerate
from .errors import DegenerateKernel, EvalAtPole, IdentityViolation, TruncationExhausted
from .exactalg import LaurentSeries, Poly, RatFunc, poly_at_series, rat, rat_str

# A pole-basis monomial assigns one basis differential to chosen slots:
# key = tuple of (slot, r, k), strictly increasing in slot.
CombKey = tuple[tuple[int, Fraction, int], ...]


class PoleComb:
    """Exact linear combination of products of pole-basis assignments."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None) -> None:
        clean: dict[CombKey, Fraction] = {}
        for k, c in (terms or {}).items():
            if c:
                clean[k] = c
        self.terms = clean

    @classmethod
    def const(cls, c) -> "PoleComb":
        return cls({(): Fraction(c)})

    @classmethod
    def basis(cls, slot: int, r: Fraction, k: int, coeff=Fraction(1)) -> "PoleComb":
        return cls({((slot, r, k),): Fraction(coeff)})

    def _coerce(self, other):
        if isinstance(other, PoleComb):
            return other
        if isinstance(other, (int, Fraction)):
            return PoleComb.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return PoleComb(out)

    __radd__ = __add__

    def __neg__(self):
        return PoleComb({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return PoleComb()
            return PoleComb({k: c * other for k, c in self.terms.items()})
        if not isinstance(other, PoleComb):
            return NotImplemented
        out: dict[CombKey, Fraction] = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                slots_a = {s for s, _, _ in ka}
                if any(s in slots_a for s, _, _ in kb):
                    raise ValueError("pole-basis product with overlapping slots")
                key = tuple(sorted(ka + kb))
                out[key] = out.get(key, Fraction(0)) + ca * cb
        return PoleComb(out)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __repr__(self):
        return f"PoleComb({self.terms})"


@dataclass(frozen=True)
class TensorForm:
    """omega_n^(g) as a symmetric sum of pole-basis tensor products."""

    g: int
    n: int
    terms: tuple  # sorted tuple of (multiset_key, coeff); multiset_key = ((r,k),...)

    @classmethod
    def from_term_dict(cls, g: int, n: int, terms: dict) -> "TensorForm":
        items = tuple(sorted((k, c) for k, c in terms.items() if c))
        return cls(g, n, items)

    @classmethod
    def from_slotted(cls, g: int, n: int, slotted: dict) -> "TensorForm":
        """Build from slot-indexed monomials, enforcing full symmetry.

        `slotted` maps CombKeys covering slots 1..n to coefficients.  The
        recursion treats z1 specially, so agreement of all arrangements of
        each multiset is a genuine theorem-check, not bookkeeping.
        """
        by_multiset: dict[tuple, dict[tuple, Fraction]] = {}
        for key, coeff in slotted.items():
            if not coeff:
                continue
            slots = tuple(s for s, _, _ in key)
            if slots != tuple(range(1, n + 1)):
                raise IdentityViolation(f"monomial {key} does not cover slots 1..{n}")
            ms = tuple(sorted((r, k) for _, r, k in key))
            by_multiset.setdefault(ms, {})[tuple((r, k) for _, r, k in key)] = coeff
        canonical: dict[tuple, Fraction] = {}
        for ms, found in by_multiset.items():
            arrangements = set(itertools.permutations(ms))
            values = {found.get(arr, Fraction(0)) for arr in arrangements}
            if len(values) != 1:
                raise IdentityViolation(
                    f"omega_{n}^({g}) not symmetric on multiset {ms}: {sorted(values)}"
                )
            coeff = values.pop()
            if coeff:
                canonical[ms] = coeff
        return cls.from_term_dict(g, n, canonical)

    def term_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def pole_points(self) -> set:
        return {r for ms, _ in self.terms for r, _ in ms}

    @staticmethod
    def arrangements(ms: tuple) -> list[tuple]:
        return sorted(set(itertools.permutations(ms)))

    def evaluate(self, points) -> Fraction:
        """Value of the dz-coefficient at rational points (dz factors stripped)."""
        pts = [rat(p) for p in points]
        if len(pts) != self.n:
            raise ValueError(f"need {self.n} points, got {len(pts)}")
        poles = self.pole_points()
        for p in pts:
            if p in poles:
                raise EvalAtPole(f"evaluation at pole z = {p}")
        total = Fraction(0)
        for ms, coeff in self.terms:
            for arr in self.arrangements(ms):
                prod = coeff
                for (r, k), p in zip(arr, pts):
                    prod /= (p - r) ** k
                total += prod
        return total

    def slot_restriction(self, slot: int, spectators, var: str = "z") -> RatFunc:
        """The form as a rational function of one slot, others at fixed points."""
        spectators = [rat(p) for p in spectators]
        if len(spectators) != self.n - 1:
            raise ValueError("need n-1 spectator points")
        scalar: dict[tuple, Fraction] = {}
        for ms, coeff in self.terms:
            for arr in self.arrangements(ms):
                others = [p for i, p in enumerate(arr, start=1) if i != slot]
                factor = coeff
                for (r, k), p in zip(others, spectators):
                    if p == r:
                        raise EvalAtPole(f"spectator point {p} is a pole")
                    factor /= (p - r) ** k
                rk = arr[slot - 1]
                scalar[rk] = scalar.get(rk, Fraction(0)) + factor
        out = RatFunc(Poly.zero(var))
        for (r, k), c in scalar.items():
            out = out + RatFunc(Poly.const(var, c), Poly(var, [-r, 1]) ** k)
        return out

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        terms = []
        for ms, coeff in self.terms:
            terms.append(
                {
                    "coeff": rat_str(coeff),
                    "poles": [{"r": rat_str(r), "k": k} for r, k in ms],
                }
            )
        return {"g": self.g, "n": self.n, "terms": terms}

    @classmethod
    def from_json_dict(cls, data: dict) -> "TensorForm":
        terms: dict[tuple, Fraction] = {}
        for item in data["terms"]:
            ms = tuple(sorted((rat(p["r"]), int(p["k"])) for p in item["poles"]))
            terms[ms] = terms.get(ms, Fraction(0)) + rat(item["coeff"])
        return cls.from_term_dict(int(data["g"]), int(data["n"]), terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for ms, coeff in self.terms:
            basis = " ".join(f"dz/(z-{rat_str(r)})^{k}" for r, k in ms)
            bits.append(f"({rat_str(coeff)}) * Sym[{basis}]")
        return " + ".join(bits)


@dataclass(frozen=True)
class KernelExpansion:
    """Local data of the recursion kernel at one ramification point."""

    r: Fraction
    numerator: LaurentSeries  # PoleComb-valued: 1/2 * [1/(z1-z) - 1/(z1-sigma(z))]
    denominator: LaurentSeries  # scalar: omega_1^(0)(z) - omega_1^(0)(sigma(z)), / dz
    kernel: LaurentSeries  # numerator / denominator


class _RamCtx:
    """Per-(ramification point, order) expansion workspace."""

    def __init__(self, curve: SpectralCurve, rp: RamPoint) -> None:
        self.curve = curve
        self.rp = rp
        self.r = rp.r
        self.trunc = rp.sigma.trunc
        self.s = rp.sigma
        self.s_prime = _series_derivative(self.s)
        self._s_pows: dict[int, LaurentSeries] = {1: self.s}
        self._basis_cache: dict[tuple, LaurentSeries] = {}
        self.kernel_data = self._build_kernel()

    # -- series utilities -------------------------------------------------

    def s_pow(self, k: int) -> LaurentSeries:
        if k == 0:
            return LaurentSeries.const(self.r, Fraction(1), None)
        if k not in self._s_pows:
            if k > 1:
                self._s_pows[k] = self.s_pow(k - 1) * self.s
            else:
                if -1 not in self._s_pows:
                    self._s_pows[-1] = self.s.inverse()
                self._s_pows[k] = self._s_pows[-1] ** (-k)
        return self._s_pows[k]

    def t_mono(self, k: int) -> LaurentSeries:
        return LaurentSeries.monomial(self.r, k)

    def basis_z(self, r2: Fraction, k: int) -> LaurentSeries:
        """1/(z - r2)^k expanded at z = r + t."""
        key = ("z", r2, k)
        if key in self._basis_cache:
            return self._basis_cache[key]
        if r2 == self.r:
            out = LaurentSeries.monomial(self.r, -k)
        else:
            c = self.r - r2
            coeffs = {
                m: Fraction(math.comb(k + m - 1, m) * (-1) ** m) * c ** (-k - m)
                for m in range(self.trunc)
            }
            out = LaurentSeries(self.r, coeffs, self.trunc)
        self._basis_cache[key] = out
        return out

    def basis_sigma(self, r2: Fraction, k: int) -> LaurentSeries:
        """1/(sigma(z) - r2)^k expanded at z = r + t (no dsigma factor)."""
        key = ("sigma", r2, k)
        if key in self._basis_cache:
            return self._basis_cache[key]
        if r2 == self.r:
            out = self.s_pow(-k)
        else:
            c = self.r - r2
            acc = LaurentSeries.zero(self.r, self.trunc)
            for m in range(self.trunc):
                coeff = Fraction(math.comb(k + m - 1, m) * (-1) ** m) * c ** (-k - m)
                acc = acc + self.s_pow(m).scale(coeff)
            out = acc
        self._basis_cache[key] = out
        return out

    def w2_spectator(self, slot: int, mode: str) -> LaurentSeries:
        """omega_2^(0)(., z_slot) with the on-curve argument z or sigma(z).

        Expansion law: 1/(w - z_j)^2 at w = r + v equals
        sum_m (m+1) v^m / (z_j - r)^{m+2}; sigma mode carries dsigma = s'(t) dt.
        """
        acc = LaurentSeries.zero(self.r, self.trunc)
        for m in range(self.trunc):
            comb = PoleComb.basis(slot, self.r, m + 2, Fraction(m + 1))
            v = self.t_mono(m) if mode == "z" else self.s_pow(m)
            acc = acc + v * LaurentSeries.const(self.r, comb, None)
        if mode == "sigma":
            acc = acc * self.s_prime
        return acc.truncate_to(self.trunc)

    def w2_z_sigma(self) -> LaurentSeries:
        """omega_2^(0)(z, sigma(z)) / dz^2 = s'(t) / (t - s(t))^2."""
        diff = self.t_mono(1) - self.s
        return self.s_prime * (diff * diff).inverse()

    # -- kernel -----------------------------------------------------------

    def _build_kernel(self) -> KernelExpansion:
        g_poly = (-self.curve.y_poly * self.curve.x_prime).shift(self.r)
        a = poly_at_series(g_poly.coeffs, self.t_mono(1))
        b = poly_at_series(g_poly.coeffs, self.s) * self.s_prime
        den = (a - b).truncate_to(self.trunc)
        if den.valuation() != 2:
            raise DegenerateKernel(
                f"kernel denominator at r={self.r} has valuation {den.valuation()}, "
                "expected an exact double zero"
            )
        num_coeffs: dict[int, PoleComb] = {}
        for m in range(1, self.trunc):
            half = Fraction(1, 2)
            basis = PoleComb.basis(1, self.r, m + 1)
            cur = num_coeffs.get(m)
            num_coeffs[m] = (basis * half) + cur if cur is not None else basis * half
            sm = self.s_pow(m)
            for e, c in sm.coeffs.items():
                if e >= self.trunc:
                    continue
                term = basis * (-half * c)
                cur = num_coeffs.get(e)
                num_coeffs[e] = term + cur if cur is not None else term
        num = LaurentSeries(self.r, num_coeffs, self.trunc)
        if num.valuation() is not None and num.valuation() < 1:
            raise DegenerateKernel(f"kernel numerator not O(t) at r={self.r}")
        kern = num * den.inverse()
        return KernelExpansion(self.r, num, den, kern)

    # -- lower-form expansion ----------------------------------------------

    def expand_form(self, form: TensorForm, oncurve_modes, spectator_slots) -> LaurentSeries:
        """Evaluate a cached TensorForm with its first slots on-curve.

        oncurve_modes: ("z",) or ("z", "sigma") for the first one or two slots;
        spectator_slots: global slot indices for the remaining arguments.
        Each sigma slot contributes one factor of s'(t) (pullback of dz).
        """
        n_on = len(oncurve_modes)
        acc = LaurentSeries.zero(self.r, self.trunc)
        for ms, coeff in form.terms:
            for arr in TensorForm.arrangements(ms):
                series = LaurentSeries.const(self.r, Fraction(coeff), None)
                for mode, (r2, k) in zip(oncurve_modes, arr[:n_on]):
                    base = self.basis_z(r2, k) if mode == "z" else self.basis_sigma(r2, k)
                    series = series * base
                    if mode == "sigma":
                        series = series * self.s_prime
                comb = None
                for slot, (r2, k) in zip(spectator_slots, arr[n_on:]):
                    b = PoleComb.basis(slot, r2, k)
                    comb = b if comb is None else comb * b
                if comb is not None:
                    series = series * LaurentSeries.const(self.r, comb, None)
                acc = acc + series
        return acc.truncate_to(self.trunc)


def _series_derivative(s: LaurentSeries) -> LaurentSeries:
    coeffs = {e - 1: e * c for e, c in s.coeffs.items() if e != 0}
    trunc = None if s.trunc is None else s.trunc - 1
    return LaurentSeries(s.center, coeffs, trunc)


class CorrelatorTable:
    """Memoized computation of omega_n^(g) on one validated curve.

    Truncation policy: initial local order 6g + 2n + 6 per ramification point,
    every result re-verified at +4 (identical or error), automatic retry with
    doubled order up to 4x the initial before failing loudly.
    """

    def __init__(self, curve: SpectralCurve) -> None:
        require_non_degenerate(curve)
        self.curve = curve
        self.cache: dict[tuple[int, int], TensorForm] = {}
        self._ctxs: dict[tuple[Fraction, int], _RamCtx] = {}
        self._lock = threading.RLock()

    # -- plumbing -----------------------------------------------------------

    def ram_ctx(self, r: Fraction, order: int) -> _RamCtx:
        key = (r, order)
        with self._lock:
            if key not in self._ctxs:
                rp = galois_series(self.curve, r, order)
                self._ctxs[key] = _RamCtx(self.curve, rp)
            return self._ctxs[key]

    @staticmethod
    def base_order(g: int, n: int) -> int:
        return 6 * g + 2 * n + 6

    def _deps(self, g: int, n: int):
        out = set()
        if g >= 1 and (g - 1, n + 1) not in ((0, 1), (0, 2)):
            out.add((g - 1, n + 1))
        for h in range(g + 1):
            for i in range(n):  # i = |I|
                hp, ip = g - h, n - 1 - i
                if (h == 0 and i == 0) or (hp == 0 and ip == 0):
                    continue
                for gg, mm in ((h, 1 + i), (hp, 1 + ip)):
                    if (gg, mm) not in ((0, 1), (0, 2)):
                        out.add((gg, mm))
        return {(gg, mm) for gg, mm in out if 2 * gg - 2 + mm >= 1}

    # -- public entry points -------------------------------------------------

    def compute(self, g: int, n: int) -> TensorForm:
        if g < 0 or n < 1 or 2 * g - 2 + n < 1:
            raise ValueError(f"(g,n)=({g},{n}) outside the recursion range 2g-2+n >= 1")
        with self._lock:
            if (g, n) in self.cache:
                return self.cache[(g, n)]
            for dep in sorted(self._deps(g, n), key=lambda p: (2 * p[0] - 2 + p[1], p)):
                self.compute(*dep)
            base = self.base_order(g, n)
            order = base
            last_err: Exception | None = None
            while order <= 4 * base:
                try:
                    form = self._attempt(g, n, order)
                    check = self._attempt(g, n, order + 4)
                    if form != check:
                        raise IdentityViolation(
                            f"omega_{n}^({g}) changed between orders {order} and {order + 4}"
                        )
                    self.cache[(g, n)] = form
                    return form
                except TruncationExhausted as err:
                    last_err = err
                    order *= 2
            raise TruncationExhausted(
                f"omega_{n}^({g}): order cap {4 * base} exhausted ({last_err})"
            )

    def _attempt(self, g: int, n: int, order: int) -> TensorForm:
        slotted: dict[CombKey, Fraction] = {}
        for r in self.curve.ram_points:  # ascending: fixed for reproducibility
            ctx = self.ram_ctx(r, order)
            qt = self._qtilde(g, n, ctx)
            res = (ctx.kernel_data.kernel * qt).residue()
            if isinstance(res, Fraction):
                if res:
                    raise IdentityViolation("scalar residue in tensor recursion")
                continue
            for key, c in res.terms.items():
                slotted[key] = slotted.get(key, Fraction(0)) + c
        return TensorForm.from_slotted(g, n, {k: c for k, c in slotted.items() if c})

    def _qtilde(self, g: int, n: int, ctx: _RamCtx) -> LaurentSeries:
        spectators = tuple(range(2, n + 1))
        acc = LaurentSeries.zero(ctx.r, ctx.trunc)
        if g >= 1:
            if (g - 1, n + 1) == (0, 2):
                acc = acc + ctx.w2_z_sigma()
            else:
                acc = acc + ctx.expand_form(
                    self.cache[(g - 1, n + 1)], ("z", "sigma"), spectators
                )
        for h in range(g + 1):
            hp = g - h
            for size in range(len(spectators) + 1):
                for I in itertools.combinations(spectators, size):
                    Ip = tuple(s for s in spectators if s not in I)
                    if (h == 0 and not I) or (hp == 0 and not Ip):
                        continue
                    acc = acc + self._piece(h, I, ctx, "z") * self._piece(hp, Ip, ctx, "sigma")
        return acc

    def _piece(self, h: int, I: tuple, ctx: _RamCtx, mode: str) -> LaurentSeries:
        if h == 0 and len(I) == 1:
            return ctx.w2_spectator(I[0], mode)
        return ctx.expand_form(self.cache[(h, 1 + len(I))], (mode,), I)

    # -- invariant checks ------------------------------------------------

    def verify_local_antisymmetry(self, form: TensorForm) -> None:
        """omega(z, .) + omega(sigma_r(z), .) must be analytic at every r."""
        spectators = tuple(range(2, form.n + 1))
        for r in self.curve.ram_points:
            ctx = self.ram_ctx(r, self.base_order(form.g, form.n))
            total = ctx.expand_form(form, ("z",), spectators) + ctx.expand_form(
                form, ("sigma",), spectators
            )
            val = total.valuation()
            if val is not None and val < 0:
                raise IdentityViolation(
                    f"omega_{form.n}^({form.g})(z,.) + omega(sigma_{r}(z),.) has a pole "
                    f"(valuation {val})"
                )

    def verify_decay_at_infinity(self, form: TensorForm) -> None:
        """Each slot's restriction must be O(1/z^2): the differential is
        regular at infinity (this implies the spec's num-degree < den-degree)."""
        probes = [rat(p) for p in (5, 7, 11, 13, 17)]
        poles = form.pole_points() | set(self.curve.ram_points)
        spectators = [p for p in probes if p not in poles][: form.n - 1]
        for slot in range(1, form.n + 1):
            f = form.slot_restriction(slot, spectators, self.curve.var)
            if f.is_zero():
                continue
            if f.num.degree > f.den.degree - 2:
                raise IdentityViolation(
                    f"slot {slot} of omega_{form.n}^({form.g}) not O(1/z^2) at infinity"
                )

    def verify_truncation_robustness(self, g: int, n: int) -> None:
        """Recompute the cached form at +4 order; must be bit-identical."""
        form = self.compute(g, n)
        redo = self._attempt(g, n, self.base_order(g, n) + 4)
        if form != redo:
            raise IdentityViolation(f"omega_{n}^({g}) not stable under order +4")


def kernel_expansion(table: CorrelatorTable, r, order: int) -> KernelExpansion:
    """Local kernel data at a ramification point (numerator carries the
    z1-pole basis; denominator is asserted to have an exact double zero)."""
    return table.ram_ctx(rat(r), order).kernel_data


def assemble_qtilde(table: CorrelatorTable, g: int, n: int, r, order: int | None = None) -> LaurentSeries:
    """The primed-sum integrand at one ramification point, with lower
    correlators already evaluated on-curve (first slot z, second sigma(z))."""
    for dep in sorted(table._deps(g, n), key=lambda p: (2 * p[0] - 2 + p[1], p)):
        table.compute(*dep)
    ctx = table.ram_ctx(rat(r), order or table.base_order(g, n))
    return table._qtilde(g, n, ctx)


def residue_at_infinity_of_z_times(form: TensorForm) -> Fraction:
    """Res_{z->inf} z * omega(z) for a one-slot form.

    With omega = sum c/(z-r)^k dz this equals -(sum_r r*c_{r,1} + c_{r,2}).
    """
    if form.n != 1:
        raise ValueError("residue at infinity needs a one-slot form")
    total = Fraction(0)
    for ms, coeff in form.terms:
        ((r, k),) = ms
        if k == 1:
            total += r * coeff
        elif k == 2:
            total += coeff
    return -total
