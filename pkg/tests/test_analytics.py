import math
from fractions import Fraction

import pytest

from vstrips.analytics import (
    CMPP,
    MPP,
    BoundReport,
    bad_set_bound,
    chebyshev_A_bound,
    cost_model_tau,
    d_j,
    dim_im_phi,
    entropy_bounds,
    expected_cost_bound,
    expected_searches_bound,
    kappa,
    mu,
    mu_float,
    ns_mean,
    ns_variance_leading,
    p_exact_c2,
    p_hat,
    prob_c1_exact,
    prob_cs_bound,
    s_star,
    tail_prob,
    two_strip_joint,
    valueset_bounds,
)
from vstrips.errors import ArgumentError, HypothesisError, OutOfRangeError


def test_mu():
    assert mu(1) == 1
    assert mu(2) == Fraction(1, 2)
    assert mu(3) == Fraction(2, 3)
    assert mu(5) == Fraction(19, 30)
    assert mu_float(100) == pytest.approx(1 - math.exp(-1), abs=1e-15)
    assert mu_float(30) == pytest.approx(1 - math.exp(-1), abs=1e-15)
    with pytest.raises(ArgumentError):
        mu(0)


def test_p_hat():
    assert p_hat(1, 2) == Fraction(1, 2)
    assert p_hat(3, 2) == Fraction(1, 8)
    assert float(sum(p_hat(s, 5) for s in range(1, 200))) == pytest.approx(1)
    assert float(p_hat(1, 30)) == pytest.approx(0.632121, abs=1e-6)
    with pytest.raises(ArgumentError):
        p_hat(0, 3)


def test_prob_c1_exact():
    assert prob_c1_exact(3, 2) == Fraction(19, 27)
    assert prob_c1_exact(5, 2) == Fraction(81, 125)
    # tends to mu_d as q grows
    assert float(prob_c1_exact(10007, 5)) == pytest.approx(float(mu(5)), abs=1e-3)
    with pytest.raises(HypothesisError):
        prob_c1_exact(3, 3)


def test_two_strips():
    assert two_strip_joint(3, 2) == Fraction(121, 243)
    assert p_exact_c2(3, 2) == Fraction(50, 243)
    with pytest.raises(HypothesisError):
        two_strip_joint(2, 5)


def test_strip_combinatorics():
    assert [d_j(j, 2) for j in range(-1, 4)] == [0, 1, 2, 3, 4]
    assert [d_j(j, 3) for j in range(-1, 4)] == [0, 1, 3, 6, 10]
    assert [kappa(i, 3) for i in range(1, 8)] == [0, 1, 1, 2, 2, 2, 3]
    assert [kappa(i, 2) for i in range(1, 5)] == [0, 1, 2, 3]
    with pytest.raises(ArgumentError):
        kappa(0, 2)


def test_s_star():
    assert s_star(2, 30) == 16
    assert s_star(2, 30, MPP) == 29
    assert s_star(3, 5) == 6
    assert s_star(3, 5, MPP) == 10
    with pytest.raises(ArgumentError):
        s_star(2, 5, "other")


def test_dim_im_phi():
    assert dim_im_phi(1, 2, 2) == 3
    assert dim_im_phi(2, 2, 2) == 5
    assert dim_im_phi(3, 2, 2) == 6
    assert dim_im_phi(3, 3, 2) == 7
    # s strips never give more than the whole space
    for s in range(1, d_j(4, 3) + 1):
        assert dim_im_phi(s, 3, 4) <= math.comb(7, 3)
    with pytest.raises(OutOfRangeError):
        dim_im_phi(4, 2, 2)


def test_prob_cs_bound():
    report = prob_cs_bound(67, 30, 1)
    assert report.variant == CMPP
    assert report.center == pytest.approx(float(mu(30)))
    assert report.contains(report.center)
    assert report.low < report.center < report.high

    # the error term shrinks like 1/q
    assert prob_cs_bound(10**6 + 3, 30, 1).radius < report.radius / 1000

    assert prob_cs_bound(67, 30, 29, MPP).radius > 0
    with pytest.raises(HypothesisError):
        prob_cs_bound(30, 30, 1)
    with pytest.raises(HypothesisError):
        prob_cs_bound(67, 30, 17)
    with pytest.raises(HypothesisError):
        prob_cs_bound(64, 30, 1, MPP)


def test_prob_cs_bound_degree_five():
    report = prob_cs_bound(67, 5, 2)
    assert report.center == pytest.approx(0.232222, abs=1e-6)
    spread = (5 - 2) ** 5 * math.exp(2 * math.sqrt(5)) / 2**4
    assert report.radius == pytest.approx((math.exp(-1) + spread + 1) / 67 + 14 / 67**2)
    radii = [prob_cs_bound(q, 5, 2).radius for q in (67, 670, 6700)]
    assert radii == sorted(radii, reverse=True)
    # (d - 2)^5 vanishes at d = 2
    assert prob_cs_bound(67, 2, 1).radius == pytest.approx((math.exp(-1) + 1) / 67 + 14 / 67**2)


def test_bound_report():
    with pytest.raises(ArgumentError):
        BoundReport(0.5, -0.1, CMPP)
    assert not BoundReport(0.5, 0.1, CMPP).contains(0.7)


def test_tail_prob():
    assert tail_prob(0, 5) == 1
    assert tail_prob(3, 2) == pytest.approx(0.125)
    with pytest.raises(ArgumentError):
        tail_prob(-1, 5)


def test_ns_mean():
    assert ns_mean(3, 2, 2) == Fraction(19, 9)
    assert ns_mean(5, 3, 2) == 25 * prob_c1_exact(5, 2)
    with pytest.raises(HypothesisError):
        ns_mean(2, 2, 2)


def test_ns_variance_and_chebyshev():
    assert ns_variance_leading(5, 2, 2) == pytest.approx(5 / 4 + 0.25 * 5)
    assert chebyshev_A_bound(0.5, 5, 2, 2) == pytest.approx(1.6)
    with pytest.raises(OutOfRangeError):
        chebyshev_A_bound(1.0, 5, 2, 2)
    with pytest.raises(OutOfRangeError):
        chebyshev_A_bound(0.0, 5, 2, 2)


def test_expected_searches_bound():
    assert expected_searches_bound(3, 5) == pytest.approx(2.889667, abs=1e-6)
    assert expected_searches_bound(2, 10**6) == pytest.approx(2.164, abs=0.01)
    assert expected_searches_bound(3, 200) == pytest.approx(1.582, abs=1e-3)
    with pytest.raises(ArgumentError):
        expected_searches_bound(2, 1)


def test_cost_model():
    assert cost_model_tau(2, 2, 4) == pytest.approx(10)
    assert cost_model_tau(2, 2, 4, c=0) == 6
    assert expected_cost_bound(5, 3, 67) == pytest.approx(
        cost_model_tau(5, 3, 67) * expected_searches_bound(3, 5)
    )


def test_entropy_bounds():
    upper, coeff = entropy_bounds(67, 3, 5)
    assert upper == pytest.approx(2 * math.log(67))
    assert coeff == pytest.approx(15 / 19)


def test_valueset_bounds():
    report = valueset_bounds(101, 10, 2)
    assert report.center == pytest.approx(float(mu(10)) * 101)
    assert report.radius > 0
    with pytest.raises(HypothesisError):
        valueset_bounds(101, 10, 5)
    with pytest.raises(HypothesisError):
        valueset_bounds(128, 10, 2, MPP)
    assert valueset_bounds(101, 10, 7, MPP).variant == MPP


def test_bad_set_bound():
    # one Vandermonde block, delta = 2, so only the delta^(13/3) term survives
    assert bad_set_bound(2, 2, 2, 67) == pytest.approx(5 * 2 ** (13 / 3) / 67**2)
    assert bad_set_bound(2, 2, 2, 67) == pytest.approx(0.022453482734)
    assert bad_set_bound(2, 2, 2, 67, main_term=True) == pytest.approx(1 / 67 + 5 * 2 ** (13 / 3) / 67**2)
    assert bad_set_bound(1, 2, 2, 67) == 0
    small = bad_set_bound(2, 2, 5, 101)
    assert bad_set_bound(4, 3, 5, 101) > small
    assert bad_set_bound(2, 2, 5, 10**9) < small
    with pytest.raises(OutOfRangeError):
        bad_set_bound(7, 2, 5, 101)


def test_prob_c1_close_to_mu():
    for q in (11, 67, 257):
        for d in range(2, 11):
            assert abs(prob_c1_exact(q, d) - mu(d)) <= Fraction(2, q)


def test_dim_im_phi_expressions_agree():
    # dim_im_phi asserts its closed form against the sum over kappa
    for r in range(2, 5):
        for d in range(0, 9):
            for s in range(1, d_j(d, r) + 1):
                assert dim_im_phi(s, r, d) <= math.comb(d + r, r)
