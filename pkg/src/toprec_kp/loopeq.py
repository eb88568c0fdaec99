"""Determinantal-formula laboratory over exact rationals.

Start from an explicit invertible matrix Psi(x) with polynomial (or rational)
entries and a fixed nonzero rational hbar.  Everything downstream -- kernel,
correlators, projectors -- is exact rational-function arithmetic, and every
loop-equation identity is checked as an exact identity (symbolic in one
distinguished variable, rational numbers elsewhere).  These identities are
theorems, so any failure is an implementation defect, never noise.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import IdentityViolation, SingularPsiAt, UnexpectedPole
from .exactalg import Poly, RatFunc, rat, rat_str
from .exactalg.poly import det_ring

VAR = "x"


def _rf_const(c) -> RatFunc:
    return RatFunc.const(VAR, c)


def _mat_apply(mat, fn):
    return [[fn(e) for e in row] for row in mat]


def _mat_mul(a, b):
    n, m, k = len(a), len(b[0]), len(b)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for l in range(k):
                term = a[i][l] * b[l][j]
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def _adjugate(mat, zero):
    """Classical adjugate via cofactor determinants (d <= 4 here)."""
    n = len(mat)
    if n == 1:
        return [[zero + 1]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [mat[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            cof = det_ring(minor, zero)
            out[j][i] = cof if (i + j) % 2 == 0 else -cof
    return out


@dataclass
class PsiSystem:
    """An invertible Psi(x) with L = hbar Psi' Psi^{-1}, all exact."""

    d: int
    hbar: Fraction
    psi: list  # d x d RatFunc
    psi_inv: list  # d x d RatFunc, Psi^{-1}
    L: list  # d x d RatFunc
    H: list  # d x d RatFunc: -hbar^{-1} Psi^{-1} L Psi (kernel diagonal data)
    det_psi: RatFunc
    retries: int = 0
    _kernel_memo: dict = None  # (x1, x2) -> kernel matrix

    @classmethod
    def build(cls, psi_entries, hbar, retries: int = 0) -> "PsiSystem":
        hbar = rat(hbar)
        if hbar == 0:
            raise ValueError("hbar must be nonzero")
        psi = [[e if isinstance(e, RatFunc) else RatFunc(e) for e in row] for row in psi_entries]
        d = len(psi)
        zero = RatFunc(Poly.zero(VAR))
        det = det_ring(psi, zero)
        if det.is_zero():
            raise SingularPsiAt("det Psi is identically zero")
        adj = _adjugate(psi, zero)
        psi_inv = _mat_apply(adj, lambda e: e / det)
        dpsi = _mat_apply(psi, lambda e: e.derivative())
        L = _mat_apply(_mat_mul(dpsi, psi_inv), lambda e: e * hbar)
        H = _mat_apply(_mat_mul(psi_inv, _mat_mul(L, psi)), lambda e: e * (-1 / hbar))
        return cls(d, hbar, psi, psi_inv, L, H, det, retries, {})

    # -- evaluation helpers -------------------------------------------------

    def check_regular(self, x) -> None:
        if not self.det_psi.defined_at(x) or self.det_psi(rat(x)) == 0:
            raise SingularPsiAt(f"det Psi vanishes (or is undefined) at x = {x}")

    def psi_at(self, x):
        self.check_regular(x)
        return _mat_apply(self.psi, lambda e: e(rat(x)))

    def psi_inv_at(self, x):
        self.check_regular(x)
        return _mat_apply(self.psi_inv, lambda e: e(rat(x)))

    def trace_L(self) -> RatFunc:
        acc = _rf_const(0)
        for a in range(self.d):
            acc = acc + self.L[a][a]
        return acc

    def projector(self, x, a: int):
        """P(x^a) = Psi(x) E_a Psi^{-1}(x) as a numeric matrix."""
        x = rat(x)
        psi = self.psi_at(x)
        psi_inv = self.psi_inv_at(x)
        return [
            [psi[i][a] * psi_inv[a][j] for j in range(self.d)]
            for i in range(self.d)
        ]


def random_system(d: int, deg: int, seed: int, hbar=1) -> PsiSystem:
    """Deterministic seeded Psi with polynomial entries of degree <= deg.

    Degenerate draws (det Psi = 0) retry with an incremented nonce; the number
    of retries is recorded on the system.
    """
    if d > 4 or deg > 3:
        raise ValueError("generator is sized for d <= 4, deg <= 3")
    nonce = 0
    while True:
        rng = random.Random(f"{seed}:{d}:{deg}:{nonce}")
        entries = [
            [
                Poly(VAR, [rng.randint(-3, 3) for _ in range(deg + 1)])
                for _ in range(d)
            ]
            for _ in range(d)
        ]
        try:
            return PsiSystem.build(entries, hbar, retries=nonce)
        except SingularPsiAt:
            nonce += 1
            if nonce > 64:
                raise


# ---------------------------------------------------------------------------
# Kernel and correlators
# ---------------------------------------------------------------------------

def safe_points(sys: PsiSystem, count: int, start: int = 2, exclude=()) -> list:
    """Rational probe points where det Psi is nonzero, pairwise distinct."""
    out: list = []
    x = start
    banned = {rat(e) for e in exclude}
    while len(out) < count:
        p = rat(x)
        if p not in banned and sys.det_psi.defined_at(p) and sys.det_psi(p) != 0:
            out.append(p)
        x += 1
        if x > start + 1000:
            raise SingularPsiAt("could not find enough regular probe points")
    return out


def kernel(sys: PsiSystem, x1, x2):
    """K(x1, x2) = Psi^{-1}(x1) Psi(x2) / (x1 - x2).

    Exactly one argument may be the symbol "x" (kept symbolic); the result is
    then a matrix of RatFunc in x.  Coinciding points are rejected here; the
    regularized limit lives in `sys.H` (off-diagonal) and W_1 (diagonal).
    """
    sym1, sym2 = x1 == "x", x2 == "x"
    if sym1 and sym2:
        raise ValueError("at most one symbolic argument")
    key = (x1 if sym1 else rat(x1), x2 if sym2 else rat(x2))
    if sys._kernel_memo is not None and key in sys._kernel_memo:
        return sys._kernel_memo[key]
    a_inv = sys.psi_inv if sym1 else sys.psi_inv_at(x1)
    b = sys.psi if sym2 else sys.psi_at(x2)
    if not sym1 and not sym2 and rat(x1) == rat(x2):
        raise ValueError("coinciding numeric points: use the regularized kernel")
    prod = _mat_mul(a_inv, b)
    if sym1:
        denom = RatFunc(Poly(VAR, [-rat(x2), 1]))
        out = _mat_apply(prod, lambda e: e / denom)
    elif sym2:
        denom = RatFunc(Poly(VAR, [rat(x1), -1]))
        out = _mat_apply(prod, lambda e: e / denom)
    else:
        out = _mat_apply(prod, lambda e: e * (1 / (rat(x1) - rat(x2))))
    if sys._kernel_memo is not None:
        sys._kernel_memo[key] = out
    return out


def w1(sys: PsiSystem, point, sheet: int):
    """W_1(x^a) = -hbar^{-1} (Psi^{-1} L Psi)_{aa}; symbolic when point == "x"."""
    h = sys.H[sheet][sheet]
    return h if point == "x" else h(rat(point))


def _kernel_entry_table(sys: PsiSystem, spec):
    """All kernel entries needed by the cycle sum.

    Coinciding points (numeric-numeric or two slots at the one symbolic
    point) use the regularized entries H_ab, per the quadratic loop
    equations' continuation convention.
    """
    n = len(spec)
    table = {}
    kmat_cache = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            xi, ai = spec[i]
            xj, aj = spec[j]
            both_sym = xi == "x" and xj == "x"
            if both_sym:
                table[(i, j)] = sys.H[ai][aj]
            elif xi == "x" or xj == "x" or rat(xi) != rat(xj):
                if (xi, xj) not in kmat_cache:
                    kmat_cache[(xi, xj)] = kernel(sys, xi, xj)
                table[(i, j)] = kmat_cache[(xi, xj)][ai][aj]
            else:
                table[(i, j)] = sys.H[ai][aj](rat(xi))
    return table


def correlator(sys: PsiSystem, spec):
    """W_n for spec = [(point, sheet), ...]; points are rationals or the
    symbol "x" (one symbolic point, possibly occupying several slots).
    Coinciding points use the regularized kernel entries, matching the
    quadratic-loop-equation conventions."""
    n = len(spec)
    if n == 0:
        raise ValueError("empty correlator")
    if n == 1:
        return w1(sys, spec[0][0], spec[0][1])
    if n > 6:
        raise ValueError("cycle sum limited to n <= 6")
    table = _kernel_entry_table(sys, spec)
    total = None
    sign = Fraction((-1) ** (n + 1))
    for perm in itertools.permutations(range(1, n)):
        cycle = (0,) + perm  # sigma maps cycle[i] -> cycle[i+1]
        prod = None
        for idx in range(n):
            i, j = cycle[idx], cycle[(idx + 1) % n]
            e = table[(i, j)]
            prod = e if prod is None else prod * e
        total = prod if total is None else total + prod
    return total * sign


def connected_w2_coinciding(sys: PsiSystem, x, a: int, b: int):
    """lim_{x1 -> x} W_2(x1^a, x^b) = -H_ab(x) H_ba(x) for a != b."""
    x = rat(x)
    return -sys.H[a][b](x) * sys.H[b][a](x)


# ---------------------------------------------------------------------------
# Checks: each raises IdentityViolation on failure and returns a small report
# ---------------------------------------------------------------------------

def check_replication(sys: PsiSystem, x1, x2, x3) -> dict:
    """K(x1,x2) K(x2,x3) = (x1-x3)/((x1-x2)(x2-x3)) K(x1,x3), exactly."""
    x1, x2, x3 = rat(x1), rat(x2), rat(x3)
    lhs = _mat_mul(kernel(sys, x1, x2), kernel(sys, x2, x3))
    scale = (x1 - x3) / ((x1 - x2) * (x2 - x3))
    rhs = _mat_apply(kernel(sys, x1, x3), lambda e: e * scale)
    if lhs != rhs:
        raise IdentityViolation(f"replication formula fails at ({x1},{x2},{x3})")
    return {"check": "replication", "points": [str(x1), str(x2), str(x3)], "passed": True}


def check_linear(sys: PsiSystem, n: int, fixed) -> dict:
    """sum_a W_n(x^a, fixed) = -delta_{n,1} hbar^{-1} Tr L(x) + delta_{n,2}/(x-y2)^2."""
    if n != len(fixed) + 1 or n > 4:
        raise ValueError("fixed points must number n-1, with n <= 4")
    acc = None
    for a in range(sys.d):
        w = correlator(sys, [("x", a)] + list(fixed))
        acc = w if acc is None else acc + w
    if n == 1:
        rhs = sys.trace_L() * (-1 / sys.hbar)
    elif n == 2:
        y = rat(fixed[0][0])
        rhs = RatFunc(Poly.const(VAR, 1), Poly(VAR, [-y, 1]) ** 2)
    else:
        rhs = _rf_const(0)
    if acc != rhs:
        raise IdentityViolation(f"linear loop equation fails at n={n}")
    return {
        "check": f"linear n={n}",
        "lhs": str(acc),
        "rhs": str(rhs),
        "passed": True,
    }


def _p1(sys: PsiSystem) -> RatFunc:
    """P_1(x) = (1/2 hbar^2)(-Tr L^2 + (Tr L)^2)."""
    tr_l = sys.trace_L()
    tr_l2 = _rf_const(0)
    for a in range(sys.d):
        for b in range(sys.d):
            tr_l2 = tr_l2 + sys.L[a][b] * sys.L[b][a]
    return (tr_l * tr_l - tr_l2) * (Fraction(1, 2) / sys.hbar**2)


def _assert_pole_subset(f: RatFunc, sys: PsiSystem, fixed_points) -> None:
    """Poles of f must lie among the fixed points and the poles of L."""
    den = f.den
    for y in fixed_points:
        lin = Poly(VAR, [-rat(y), 1])
        while lin.divides(den):
            den = den // lin
    allowed = Poly.const(VAR, 1)
    for row in sys.L:
        for e in row:
            allowed = allowed * e.den
    # strip every factor of den shared with a power of the allowed polynomial
    for _ in range(den.degree + 1):
        if den.degree < 1:
            break
        g = den.gcd(allowed)
        if g.degree < 1:
            break
        den = den // g
    if den.degree >= 1:
        raise UnexpectedPole(f"unexpected pole factor {den} in {f}")


def check_quadratic(sys: PsiSystem, n: int, fixed) -> dict:
    """Quadratic loop equation against the displayed P_1, P_2, P_3."""
    if n != len(fixed) + 1 or n > 3:
        raise ValueError("fixed points must number n-1, with n <= 3")
    d = sys.d
    lhs = _rf_const(0)
    fixed = [(rat(y), c) for y, c in fixed]
    for a in range(d):
        for b in range(a + 1, d):
            # W_{n+1}(x^a, x^b, fixed) with two slots at the symbolic point
            lhs = lhs + correlator(sys, [("x", a), ("x", b)] + fixed)
            for sub in _subsets(fixed):
                rest = [yc for yc in fixed if yc not in sub]
                lhs = lhs + correlator(sys, [("x", a)] + sub) * correlator(
                    sys, [("x", b)] + rest
                )
    if n == 1:
        rhs = _p1(sys)
    elif n == 2:
        y, c = fixed[0]
        proj = sys.projector(y, c)
        tr = _rf_const(0)
        for i in range(d):
            for j in range(d):
                pij = proj[j][i] - (1 if i == j else 0)
                tr = tr + sys.L[i][j] * pij
        rhs = tr / (sys.hbar * RatFunc(Poly(VAR, [-y, 1]) ** 2))
    else:
        # P_3 = Tr(L(x) [P(y2), P(y1)]) / (hbar (y1-y2)(x-y1)(x-y2))
        #       + (1 - (y1-y2)^2 W_2(y1,y2)) / ((x-y1)^2 (x-y2)^2).
        # Derived by collapsing the six 4-cycles of (1/2) sum_{a,b} W~_4 with
        # the replication formula; pinned by the d=1 edge case where the
        # left side is an empty sum and (y1-y2)^2 W_2 = 1 exactly.
        (y1, c1), (y2, c2) = fixed
        p1m = sys.projector(y1, c1)
        p2m = sys.projector(y2, c2)
        comm = _mat_sub_num(_mat_mul_num(p2m, p1m), _mat_mul_num(p1m, p2m))
        tr = _rf_const(0)
        for i in range(d):
            for j in range(d):
                tr = tr + sys.L[i][j] * comm[j][i]
        den12 = RatFunc(Poly(VAR, [-y1, 1]) * Poly(VAR, [-y2, 1]))
        w2_fixed = correlator(sys, [(y1, c1), (y2, c2)])
        rhs = tr / (sys.hbar * (y1 - y2)) / den12 + _rf_const(
            1 - (y1 - y2) ** 2 * w2_fixed
        ) / RatFunc((Poly(VAR, [-y1, 1]) * Poly(VAR, [-y2, 1])) ** 2)
    if lhs != rhs:
        raise IdentityViolation(f"quadratic loop equation fails at n={n}")
    _assert_pole_subset(lhs, sys, [y for y, _ in fixed])
    return {"check": f"quadratic n={n}", "passed": True}


def _subsets(items):
    out = []
    for r in range(len(items) + 1):
        out.extend(list(c) for c in itertools.combinations(items, r))
    return out


def _mat_add(a, b):
    return [[a[i][j] + b[i][j] for j in range(len(a))] for i in range(len(a))]


def _mat_sub_num(a, b):
    return [[a[i][j] - b[i][j] for j in range(len(a))] for i in range(len(a))]


def _mat_mul_num(a, b):
    n = len(a)
    return [
        [sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0)) for j in range(n)]
        for i in range(n)
    ]


def check_spectral_identity(sys: PsiSystem, x0) -> dict:
    """det(y - L(x0)) = sum_k y^{d-k} hbar^k sum_{a1<..<ak} Wbar_k(x0).

    Wbar_k are the principal k x k minors of H(x0) (the "det" convention puts
    W_1 on the diagonal).  The hbar^k weights are forced by the d = 1 case
    y - L = y + hbar W_1; they drop out at hbar = 1.
    """
    x0 = rat(x0)
    sys.check_regular(x0)
    d = sys.d
    l_num = [[sys.L[i][j](x0) for j in range(d)] for i in range(d)]
    h_num = [[sys.H[i][j](x0) for j in range(d)] for i in range(d)]
    # char poly in y by generic ring determinant
    yvar = "y"
    mat = [
        [
            Poly(yvar, [-l_num[i][j], 1]) if i == j else Poly.const(yvar, -l_num[i][j])
            for j in range(d)
        ]
        for i in range(d)
    ]
    charpoly = det_ring(mat, Poly.zero(yvar))
    rhs = Poly.zero(yvar)
    for k in range(d + 1):
        minor_sum = Fraction(0)
        for subset in itertools.combinations(range(d), k):
            if k == 0:
                minor_sum += 1
                continue
            sub = [[h_num[i][j] for j in subset] for i in subset]
            minor_sum += det_ring(sub, Fraction(0))
        rhs = rhs + Poly.monomial(yvar, minor_sum * sys.hbar**k, d - k)
    if charpoly != rhs:
        raise IdentityViolation(f"spectral identity fails at x0={x0}")
    # cross-check: the y^{d-2} coefficient is hbar^2 P_1(x0)
    if d >= 2 and charpoly.coeff(d - 2) != sys.hbar**2 * _p1(sys)(x0):
        raise IdentityViolation("y^(d-2) coefficient does not match P_1")
    return {"check": "spectral identity", "x0": str(x0), "passed": True}


def check_gauge_constant(sys: PsiSystem, g_matrix, probes) -> dict:
    """Constant invertible G: all W_n invariant (K itself is unchanged)."""
    entries = _mat_mul([[_rf_const(c) for c in row] for row in g_matrix], sys.psi)
    transformed = PsiSystem.build(entries, sys.hbar)
    for spec in probes:
        if correlator(sys, spec) != correlator(transformed, spec):
            raise IdentityViolation(f"constant gauge changed W at {spec}")
    return {"check": "gauge constant", "passed": True}


def check_gauge_scalar(sys: PsiSystem, g: RatFunc, probes, sample_y) -> dict:
    """Scalar G = g(x) 1: K rescales by exactly g(y)/g(x); W_n is invariant
    for n >= 2, while W_1 shifts by exactly -d/dx ln g (the cycle products
    cancel the rescaling, the n = 1 regularized limit picks up g'/g)."""
    entries = _mat_apply(sys.psi, lambda e: e * g)
    transformed = PsiSystem.build(entries, sys.hbar)
    y = rat(sample_y)
    k_old = kernel(sys, "x", y)
    k_new = kernel(transformed, "x", y)
    scale = _rf_const(g(y)) / g
    for i in range(sys.d):
        for j in range(sys.d):
            if k_new[i][j] != k_old[i][j] * scale:
                raise IdentityViolation("scalar gauge: kernel did not rescale by g(y)/g(x)")
    shift = g.derivative() / g
    for a in range(sys.d):
        if w1(transformed, "x", a) != w1(sys, "x", a) - shift:
            raise IdentityViolation("scalar gauge: W_1 did not shift by -(ln g)'")
    for spec in probes:
        if len(spec) < 2:
            continue
        if correlator(sys, spec) != correlator(transformed, spec):
            raise IdentityViolation(f"scalar gauge changed W_n at {spec}")
    return {"check": "gauge scalar", "passed": True}


def check_w3_regular(sys: PsiSystem, x2, sheets=(0, 0, 0), x3=None) -> dict:
    """Res_{x1 -> x2} W_3(x1^a, x2^b, x3^c) = 0, symbolically in x1."""
    x2 = rat(x2)
    x3 = rat(x3 if x3 is not None else x2 + 3)
    a, b, c = sheets
    w3 = correlator(sys, [("x", a), (x2, b), (x3, c)])
    lin = Poly(VAR, [-x2, 1])
    # multiply by (x - x2); a nonzero residue would leave a nonzero value at x2
    prod = w3 * RatFunc(lin)
    if not prod.defined_at(x2):
        raise IdentityViolation(f"W_3 has a pole of order >= 2 at coinciding {x2}")
    if prod(x2) != 0:
        raise IdentityViolation(f"W_3 has residue {prod(x2)} at coinciding {x2}")
    return {"check": "W3 coinciding-point regularity", "passed": True}


def check_w_symmetry(sys: PsiSystem, spec) -> dict:
    """W_n invariant under permuting its (point, sheet) pairs."""
    base = correlator(sys, list(spec))
    for perm in itertools.permutations(spec):
        if correlator(sys, list(perm)) != base:
            raise IdentityViolation(f"W_n not symmetric under {perm}")
    return {"check": "W symmetry", "passed": True}
