import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from pconvex import domains
from pconvex.errors import DimensionError
from pconvex.expr import field_from_expr
from pconvex.fields import quadratic_field
from pconvex.levi import (
    ComplexStructure,
    J_matrix,
    complex_tangent_frame,
    levi_degenerate_candidates,
    levi_form,
    levi_matrix,
    levi_level_check,
)
from pconvex.pconvexity import sample_boundary

unit4 = st.lists(st.floats(-1, 1), min_size=4, max_size=4).map(np.array).filter(lambda v: np.linalg.norm(v) > 1e-2)


def wirtinger_levi(expr_text, point, v):
    """4 * sum f_{z_j zbar_k} v_j conj(v_k) via sympy Wirtinger derivatives (independent oracle)."""
    x1, x2, x3, x4 = sp.symbols("x1:5", real=True)
    f = sp.sympify(expr_text, locals={"x1": x1, "x2": x2, "x3": x3, "x4": x4})
    pairs = [(x1, x2), (x3, x4)]

    def dz(g, k):
        a, b = pairs[k]
        return (sp.diff(g, a) - sp.I * sp.diff(g, b)) / 2

    def dzbar(g, k):
        a, b = pairs[k]
        return (sp.diff(g, a) + sp.I * sp.diff(g, b)) / 2

    vc = [complex(v[0], v[1]), complex(v[2], v[3])]
    subs = dict(zip((x1, x2, x3, x4), point))
    total = 0
    for j in range(2):
        for k in range(2):
            total += complex(dzbar(dz(f, j), k).subs(subs)) * vc[j] * np.conj(vc[k])
    return 4 * total.real


def test_complex_structure():
    J = J_matrix(4)
    np.testing.assert_array_equal(J @ J, -np.eye(4))
    np.testing.assert_array_equal(J.T, -J)
    np.testing.assert_array_equal(J @ [1, 0, 0, 0], [0, 1, 0, 0])
    with pytest.raises(DimensionError):
        ComplexStructure(3)


def test_levi_examples():
    f = quadratic_field(4)
    for v in np.eye(4):
        assert levi_form(f, np.ones(4), v) == pytest.approx(4.0)
    re_z2 = field_from_expr("x1^2 - x2^2", 4)
    assert levi_form(re_z2, np.ones(4), [1, 0, 0, 0]) == pytest.approx(0.0)
    assert levi_form(re_z2, np.ones(4), [0.6, 0.8, 0, 0]) == pytest.approx(0.0)
    z4 = field_from_expr("(x1^2 + x2^2)^2", 4)
    assert levi_form(z4, np.zeros(4), [1, 0, 0, 0]) == 0.0
    # |z|^4 at |z| = 1: Laplacian 16 |z|^2 = 4 * (f_{z zbar} = 4 |z|^2)
    assert levi_form(z4, np.array([1.0, 0, 0, 0]), [1, 0, 0, 0]) == pytest.approx(16.0)
    assert wirtinger_levi("(x1**2 + x2**2)**2", (1, 0, 0, 0), [1, 0, 0, 0]) == pytest.approx(16.0)


@pytest.mark.parametrize(
    "text",
    ["(x1**2 + x2**2)**2 + x3**2*x1", "x1*x3 - x2*x4 + x4**3", "exp(x1)*(x3**2 + x4**2)"],
)
def test_levi_matches_wirtinger_oracle(text):
    f = field_from_expr(text.replace("**", "^"), 4)
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.uniform(-1, 1, 4)
        v = rng.standard_normal(4)
        v /= np.linalg.norm(v)
        assert levi_form(f, x, v) == pytest.approx(wirtinger_levi(text, x, v), abs=1e-9)


@given(unit4, st.floats(0, 2 * np.pi))
def test_levi_depends_only_on_complex_line(v, theta):
    f = field_from_expr("x1^2*x3 + sin(x2)*x4 + x3^4", 4)
    x = np.array([0.3, -0.2, 0.5, 0.1])
    v = v / np.linalg.norm(v)
    w = np.cos(theta) * v + np.sin(theta) * (J_matrix(4) @ v)
    assert levi_form(f, x, w) == pytest.approx(levi_form(f, x, v), abs=1e-9)
    assert v @ levi_matrix(f.hessian(x)) @ v == pytest.approx(levi_form(f, x, v), abs=1e-12)


def test_levi_odd_dimension():
    with pytest.raises(DimensionError):
        levi_form(quadratic_field(3), np.zeros(3), [1, 0, 0])


def test_complex_tangent_frames(egg):
    F = complex_tangent_frame(domains.ball(1.0, dim=4), (1, 0, 0, 0)).basis
    assert F.shape == (4, 2)
    np.testing.assert_allclose(F[:2], 0.0, atol=1e-14)
    F = complex_tangent_frame(egg, (0, 0, 1, 0)).basis
    np.testing.assert_allclose(F @ F.T, np.diag([1.0, 1, 0, 0]), atol=1e-14)
    with pytest.raises(DimensionError):
        complex_tangent_frame(domains.ball(1.0), (1, 0, 0))


def test_frame_is_complex_and_tangent(hartogs):
    for q in sample_boundary(hartogs, 10):
        F = complex_tangent_frame(hartogs, q).basis
        g = hartogs.rho0.gradient(q)
        np.testing.assert_allclose(F.T @ g, 0.0, atol=1e-10)
        np.testing.assert_allclose(F.T @ (J_matrix(4) @ g), 0.0, atol=1e-10)
        np.testing.assert_allclose(J_matrix(4) @ F[:, 0], F[:, 1], atol=1e-14)


def test_hartogs_degenerate_lines(hartogs):
    pts = [np.array([0.0, 0.0, -1.0, 0.0]), np.array([0.0, 0.0, -0.5, 0.5]), np.array([0.0, 0.0, -0.5, -0.5])]
    rep = levi_level_check(hartogs, [-0.05, -0.1], pts)
    assert rep["pseudoconvex"]
    assert len(rep["K_values"]) == 3
    np.testing.assert_allclose(rep["K_values"], -4.0, atol=1e-9)
    assert rep["hypothesis_holds"]
    assert rep["strongly_pseudoconvex_levels"] == [-0.05, -0.1]
    assert all(r["min_levi_degenerate"] > 0 for r in rep["levels"])


def test_hartogs_refinement_finds_degenerate_points(hartogs):
    S = sample_boundary(hartogs, 60)
    cands = levi_degenerate_candidates(hartogs, S, refine=2)
    assert cands and min(np.hypot(q[0], q[1]) for q in cands) < 1e-3


def test_egg_levels_not_strict(egg):
    pts = [np.array([0.0, 0.0, np.cos(a), np.sin(a)]) for a in np.linspace(0, 2 * np.pi, 4, endpoint=False)]
    rep = levi_level_check(egg, [-0.05, -0.1], pts)
    assert rep["pseudoconvex"]
    np.testing.assert_allclose(rep["K_values"], 0.0, atol=1e-12)
    assert not rep["hypothesis_holds"]
    for row in rep["levels"]:
        assert abs(row["min_levi"]) <= 1e-6
    assert rep["strongly_pseudoconvex_levels"] == []


def test_ball4_levels():
    b4 = domains.ball(1.0, dim=4)
    rep = levi_level_check(b4, [-0.05, -0.1], sample_boundary(b4, 10), field=b4.exact_delta)
    assert rep["boundary_min_levi"] == pytest.approx(2.0, abs=1e-8)
    assert rep["levels"][1]["min_levi"] == pytest.approx(2 / 0.9, abs=1e-8)
    assert rep["K_values"] == []
