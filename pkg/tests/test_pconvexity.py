import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pconvex import domains
from pconvex.errors import FrameError, InvalidP
from pconvex.fields import quadratic_field
from pconvex.linalg import orthonormalize
from pconvex.pconvexity import (
    certify_boundary,
    collar_samples,
    is_p_psh_at,
    neg_log_dist_check,
    sample_boundary,
    sectional_curvatures,
)
from pconvex.distance import principal_curvatures


def torus_s2_sweep(R, r, count=100_001):
    """Closed-form min over theta of 1/r + cos(theta) / (R + r cos(theta))."""
    th = np.linspace(0, 2 * np.pi, count)
    s = 1 / r + np.cos(th) / (R + r * np.cos(th))
    return s.min(), th[np.argmin(s)]


def dumbbell_neck_s2(amp):
    """s_2 at the neck of |x|^2 - 1 + amp cos(pi x1) = 0 (surface of revolution, r' = 0 there)."""
    r0 = np.sqrt(1 - amp)
    return 1 / r0 - (amp * np.pi**2 - 2) / (2 * r0)


def test_sample_boundary_ball(ball):
    pts = sample_boundary(ball, 100)
    assert len(pts) == 100
    assert max(abs(np.linalg.norm(q) - 1) for q in pts) <= 1e-8


def test_sample_boundary_torus(torus):
    assert max(abs(torus.rho0.value(q)) for q in sample_boundary(torus, 100, seed=2)) <= 1e-8


def test_sample_boundary_deterministic(ellipsoid):
    a, b = sample_boundary(ellipsoid, 30, seed=5), sample_boundary(ellipsoid, 30, seed=5)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], sample_boundary(ellipsoid, 1, seed=6)[0])


def test_certify_ball(ball):
    rep = certify_boundary(ball, 2, sample_boundary(ball, 100))
    assert rep.min_sp == pytest.approx(2.0, abs=1e-5)
    assert rep.verdict == "strongly-p-convex"


def test_certify_torus(torus):
    oracle, theta = torus_s2_sweep(2.5, 1.0)
    assert theta == pytest.approx(np.pi, abs=1e-3)
    rep = certify_boundary(torus, 2, sample_boundary(torus, 500, seed=1))
    assert rep.min_sp == pytest.approx(oracle, abs=1e-6)
    assert rep.min_sp == pytest.approx(1 / 3, abs=1e-6)
    assert np.hypot(*rep.witness[:2]) == pytest.approx(1.5, abs=1e-3)
    assert rep.verdict == "strongly-p-convex"
    assert rep.p_flat_points == []


def test_certify_threshold_torus():
    oracle, _ = torus_s2_sweep(2.0, 1.0)
    assert oracle == pytest.approx(0.0, abs=1e-12)
    dom = domains.solid_torus(2.0, 1.0)
    rep = certify_boundary(dom, 2, sample_boundary(dom, 500, seed=1))
    assert rep.min_sp == pytest.approx(0.0, abs=1e-6)
    assert rep.verdict == "p-convex"
    # s_2 vanishes at the inner equator but nu_1 = -1 there, so it is not 2-flat
    assert rep.p_flat_points == []
    assert rep.samples[rep.argmin].curvatures[0] == pytest.approx(-1.0, abs=1e-3)


def test_certify_negative_torus():
    dom = domains.solid_torus(1.5, 1.0)
    rep = certify_boundary(dom, 2, sample_boundary(dom, 500, seed=1))
    assert rep.verdict == "not-p-convex"
    assert rep.min_sp == pytest.approx(torus_s2_sweep(1.5, 1.0)[0], abs=1e-3)
    assert rep.min_sp == pytest.approx(-1.0, abs=1e-3)


def test_certify_dumbbell():
    dom = domains.perturbed_ball(1.0, 0.9, np.pi)
    rep = certify_boundary(dom, 2, sample_boundary(dom, 200))
    assert rep.verdict == "not-p-convex"
    assert rep.min_sp == pytest.approx(dumbbell_neck_s2(0.9), abs=1e-4)
    assert abs(rep.witness[0]) < 1e-4


def test_certify_p1_ellipsoid(ellipsoid):
    # p = 1 is ordinary convexity; the smallest curvature of ellipsoid(1,2,3) is a / c^2 = 1/9 at (1, 0, 0)
    rep = certify_boundary(ellipsoid, 1, sample_boundary(ellipsoid, 300))
    assert rep.verdict == "strongly-p-convex"
    assert rep.min_sp == pytest.approx(1 / 9, abs=1e-5)


def test_certify_invalid_p(ball):
    with pytest.raises(InvalidP):
        certify_boundary(ball, 3, sample_boundary(ball, 5))


def test_report_serialization(torus):
    rep = certify_boundary(torus, 2, sample_boundary(torus, 20), refine=2)
    d = rep.to_dict()
    assert d["sample_count"] == len(rep.samples) == 22
    assert d["refined_count"] == 2
    lines = rep.to_csv().strip().splitlines()
    assert lines[0] == "x1,x2,x3,nu1,nu2,s_p,refined"
    assert len(lines) == 23


def test_is_p_psh_examples():
    assert is_p_psh_at(quadratic_field(3), np.array([0.3, -1.0, 2.0]), 2) == pytest.approx(4.0)
    saddle = quadratic_field(3, np.diag([1.0, -1.0, 0.0]))
    assert is_p_psh_at(saddle, np.zeros(3), 2) == -2.0
    assert is_p_psh_at(quadratic_field(2, np.diag([1.0, -1.0])), np.ones(2), 2) == 0.0


def test_sectional_ball():
    for R in (1.0, 2.0):
        dom = domains.ball(R)
        q = np.array([0.0, 0.0, R])
        H, K = sectional_curvatures(dom, q, np.eye(3)[:, :2])
        assert H == pytest.approx(2 / R, abs=1e-5)
        assert K == pytest.approx(1 / R**2, abs=1e-5)


def test_sectional_torus_inner_equator(torus):
    bp = principal_curvatures(torus, (1.5, 0, 0))
    H, K = sectional_curvatures(torus, bp.point, bp.principal_directions)
    assert H == pytest.approx(1 / 3, abs=1e-4)
    assert K == pytest.approx(-2 / 3, abs=1e-4)


@given(st.floats(0, np.pi), st.integers(0, 10_000))
def test_sectional_zero_mean_implies_nonpositive_gauss(theta, seed):
    # K <= H^2 / 4 for any 2x2 symmetric form, so H = 0 forces K <= 0
    dom = domains.perturbed_ball(1.0, 0.9, np.pi, dim=4)
    q = sample_boundary(dom, 1, seed=seed)[0]
    bp = principal_curvatures(dom, q)
    d = bp.principal_directions
    F = orthonormalize([np.cos(theta) * d[:, 0] + np.sin(theta) * d[:, 2], d[:, 1]]).basis
    H, K = sectional_curvatures(dom, q, F)
    assert K <= 0.25 * H * H + 1e-10


def test_sectional_frame_errors(ball):
    q = np.array([1.0, 0, 0])
    with pytest.raises(FrameError):
        sectional_curvatures(ball, q, np.eye(3)[:, :1])
    with pytest.raises(FrameError):
        sectional_curvatures(ball, q, np.eye(3)[:, :2])  # contains the normal e1
    with pytest.raises(FrameError):
        sectional_curvatures(ball, q, np.array([[0, 0], [1, 1], [0, 1.0]]))


def test_neg_log_ball(ball):
    pts = collar_samples(ball, sample_boundary(ball, 200), 0.2)
    rep = neg_log_dist_check(ball, 2, pts)
    assert rep["minimum"] >= -1e-5
    assert rep["evaluated"] == 200


def test_neg_log_torus(torus):
    pts = collar_samples(torus, sample_boundary(torus, 200), 0.2)
    assert neg_log_dist_check(torus, 2, pts)["minimum"] >= -1e-4


def test_neg_log_dumbbell():
    dom = domains.perturbed_ball(1.0, 0.9, np.pi)
    pts = collar_samples(dom, sample_boundary(dom, 200), 0.05)
    assert neg_log_dist_check(dom, 2, pts)["minimum"] < 0
