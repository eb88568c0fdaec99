"""Determinantal laboratory: every identity here is a theorem, so a failure
is an implementation defect by construction."""

from fractions import Fraction as F

import pytest

from toprec_kp.errors import IdentityViolation, SingularPsiAt
from toprec_kp.exactalg import Poly, RatFunc, parse_poly
from toprec_kp.loopeq import (
    PsiSystem,
    check_gauge_constant,
    check_gauge_scalar,
    check_linear,
    check_quadratic,
    check_replication,
    check_spectral_identity,
    check_w3_regular,
    check_w_symmetry,
    connected_w2_coinciding,
    correlator,
    kernel,
    random_system,
    safe_points,
    w1,
)

X = lambda text: parse_poly(text, "x")


def test_scalar_system_kernel_and_w1():
    # Psi = (x): K(x1,x2) = (x2/x1)/(x1-x2); at (2,1) -> 1/2
    s = PsiSystem.build([[X("x")]], 1)
    assert kernel(s, 2, 1)[0][0] == F(1, 2)
    # W_1(x) = -hbar^{-1} L(x) symbolically
    assert w1(s, "x", 0) == s.L[0][0] * (-1)
    assert w1(s, "x", 0) == RatFunc(X("-1"), X("x"))


def test_constant_scalar_system_is_trivial():
    s = PsiSystem.build([[X("5")]], 1)
    assert s.L[0][0].is_zero()
    assert w1(s, "x", 0).is_zero()


def test_random_system_pinned_golden():
    # the deterministic generator output is a contract: freeze seed 42
    s = random_system(2, 1, 42)
    entries = [[str(e) for e in row] for row in s.psi]
    assert entries == [["1 * (x)", "-2 * (x - 3/2)"], ["2 * (x)", "-3 * (x - 1/3)"]]
    assert s.retries == 0
    s2 = random_system(2, 1, 42)
    assert [[str(e) for e in row] for row in s2.psi] == entries


def test_random_system_det_nonzero():
    s = random_system(3, 2, 7)
    assert not s.det_psi.is_zero()
    assert s.det_psi.num.degree <= 6


def test_singular_psi_at_evaluation():
    s = PsiSystem.build([[X("x")]], 1)
    with pytest.raises(SingularPsiAt):
        kernel(s, 0, 1)


def test_w2_equals_minus_k12_k21():
    s = random_system(3, 2, 11)
    pts = safe_points(s, 2)
    x, y = pts
    k_xy = kernel(s, x, y)
    k_yx = kernel(s, y, x)
    assert correlator(s, [(x, 0), (y, 1)]) == -k_xy[0][1] * k_yx[1][0]


def test_w2_coinciding_limit_formula():
    # lim_{x1->x} W_2(x1^a, x^b) = -H_ab H_ba: compare against the symbolic limit
    s = random_system(2, 1, 5)
    pt = safe_points(s, 1)[0]
    w2_sym = correlator(s, [("x", 0), (pt, 1)])
    lin = Poly("x", [-pt, 1])
    # the symbolic W2 is regular at pt only through the full limit; evaluate
    # the closed form instead
    val = connected_w2_coinciding(s, pt, 0, 1)
    # cross-check: (x-pt)^2 * W2 -> TrP(x)P(pt)-structure; just compare with
    # the kernel-product limit computed from H directly
    assert val == -s.H[0][1](pt) * s.H[1][0](pt)


def test_replication_on_seeded_systems():
    for seed in (1, 2, 3):
        s = random_system(2, 1, seed)
        pts = safe_points(s, 3)
        assert check_replication(s, *pts)["passed"]


def test_diagonal_kernel_behavior():
    # (x1 - x2) K(x1, x2) -> identity as x1 -> x2 (series check via RatFunc)
    s = random_system(2, 1, 9)
    y = safe_points(s, 1)[0]
    k = kernel(s, "x", y)
    lin = RatFunc(Poly("x", [-y, 1]))
    for i in range(2):
        for j in range(2):
            limit = (k[i][j] * lin)(y)
            assert limit == (1 if i == j else 0)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_linear_loop_equations(d):
    s = random_system(d, 2, 13)
    pts = safe_points(s, 4)
    for n in (1, 2, 3, 4):
        fixed = [(pts[i], i % d) for i in range(n - 1)]
        assert check_linear(s, n, fixed)["passed"]


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_quadratic_loop_equations(d):
    s = random_system(d, 2, 17)
    pts = safe_points(s, 4)
    for n in (1, 2, 3):
        fixed = [(pts[1 + i], i % d) for i in range(n - 1)]
        assert check_quadratic(s, n, fixed)["passed"]


def test_quadratic_d1_degenerate_is_zero_zero():
    s = PsiSystem.build([[X("x^2 + 1")]], 1)
    assert check_quadratic(s, 3, [(F(3), 0), (F(5), 0)])["passed"]


def test_spectral_identity_including_nontrivial_hbar():
    for hbar in (1, F(3, 2), F(-2, 7)):
        s = random_system(3, 2, 23, hbar=hbar)
        x0 = safe_points(s, 1)[0]
        assert check_spectral_identity(s, x0)["passed"]


def test_spectral_identity_d1():
    # y - L(x0) = y + hbar W1(x0)
    s = PsiSystem.build([[X("x^2 + 1")]], F(2, 3))
    x0 = F(1)
    assert check_spectral_identity(s, x0)["passed"]


def test_w3_regular_at_coinciding_points():
    s = random_system(3, 2, 29)
    pts = safe_points(s, 2)
    assert check_w3_regular(s, pts[0], (0, 1, 2), pts[1])["passed"]
    assert check_w3_regular(s, pts[0], (1, 1, 0), pts[1])["passed"]


def test_w_symmetry():
    s = random_system(3, 2, 31)
    pts = safe_points(s, 3)
    spec = [(pts[0], 0), (pts[1], 1), (pts[2], 2)]
    assert check_w_symmetry(s, spec)["passed"]


def test_gauge_constant_permutation():
    s = random_system(3, 2, 37)
    pts = safe_points(s, 3)
    probes = [[(pts[0], 0), (pts[1], 1)], [(pts[0], 1), (pts[1], 2), (pts[2], 0)]]
    G = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    assert check_gauge_constant(s, G, probes)["passed"]


def test_gauge_scalar_rescales_kernel():
    s = random_system(3, 2, 41)
    pts = safe_points(s, 4)
    probes = [[(pts[0], 0), (pts[1], 1)], [(pts[0], 1), (pts[1], 2), (pts[2], 0)]]
    g = RatFunc(X("x^2 + 1"))
    assert check_gauge_scalar(s, g, probes, pts[3])["passed"]


def test_gauge_identity_changes_nothing():
    s = random_system(2, 1, 43)
    pts = safe_points(s, 2)
    probes = [[(pts[0], 0), (pts[1], 1)]]
    assert check_gauge_constant(s, [[1, 0], [0, 1]], probes)["passed"]
    assert check_gauge_scalar(s, RatFunc(X("1")), probes, pts[1])["passed"]


def test_identity_violation_is_detected():
    # mutate H to break the linear loop equation: the checker must notice
    s = random_system(2, 1, 47)
    s.H[0][0] = s.H[0][0] + RatFunc(X("1"))
    with pytest.raises(IdentityViolation):
        check_linear(s, 1, [])
