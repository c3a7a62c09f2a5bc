import json

import numpy as np
import pytest
from scipy.stats import qmc

from pconvex import domains
from pconvex.errors import CatalogError
from pconvex.fields import fd_gradient, fd_hessian

CATALOG = [
    ("ball", [1.0]),
    ("ellipsoid", {"axes": [1.0, 2.0, 3.0]}),
    ("solid_torus", [2.5, 1.0]),
    ("perturbed_ball", [1.0, 0.1]),
    ("complex_egg", [2]),
    ("hartogs_example", []),
]


def test_examples():
    assert domains.ball(1).rho0.value([0.5, 0, 0]) == pytest.approx(-0.75)
    assert domains.solid_torus(2.5, 1).rho0.value([2.5, 0, 0]) == pytest.approx(-1.0)
    np.testing.assert_allclose(domains.ellipsoid(1, 2, 3).rho0.gradient([1.0, 0, 0]), [2.0, 0, 0])


@pytest.mark.parametrize("name,params", CATALOG)
def test_analytic_derivatives_match_fd(name, params):
    dom = domains.catalog(name, params)
    assert dom.rho0.derivative_mode == "analytic"
    pts = qmc.scale(qmc.Halton(dom.n, seed=3).random(100), dom.bbox[:, 0], dom.bbox[:, 1])
    for x in pts:
        g, H = dom.rho0.gradient(x), dom.rho0.hessian(x)
        scale = 1 + np.abs(g).max()
        np.testing.assert_allclose(fd_gradient(dom.rho0.value, x), g, atol=1e-5 * scale)
        np.testing.assert_allclose(fd_hessian(dom.rho0.value, x), H, atol=1e-5 * (1 + np.abs(H).max()))
        assert np.array_equal(H, H.T)


@pytest.mark.parametrize("name,params", CATALOG)
def test_bounded_and_nonempty(name, params):
    dom = domains.catalog(name, params)
    assert len(dom.interior_points) > 0
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = dom.bbox[:, 0] + rng.random(dom.n) * (dom.bbox[:, 1] - dom.bbox[:, 0])
        k = rng.integers(dom.n)
        x[k] = dom.bbox[k, rng.integers(2)]
        assert dom.rho0.value(x) > 0


@pytest.mark.parametrize(
    "call",
    [
        lambda: domains.ball(-1),
        lambda: domains.ellipsoid(1, 0, 2),
        lambda: domains.solid_torus(1.0, 1.0),
        lambda: domains.solid_torus(0.5, 1.0),
        lambda: domains.catalog("klein_bottle"),
        lambda: domains.catalog("ball", {"radius": 2}),
    ],
)
def test_catalog_errors(call):
    with pytest.raises(CatalogError):
        call()


@pytest.mark.parametrize("name,params", CATALOG)
def test_spec_round_trip(name, params):
    dom = domains.catalog(name, params)
    again = domains.from_spec(json.loads(json.dumps(dom.to_json())))
    np.testing.assert_array_equal(again.bbox, dom.bbox)
    x = dom.interior_points[0]
    assert again.rho0.value(x) == dom.rho0.value(x)


def test_expr_spec_and_cli_argument(tmp_path):
    spec = {"name": "blob", "dim": 3, "expr": "x^2 + y^2/4 + z^2/9 - 1", "bbox": [[-2, 2], [-3, 3], [-4, 4]]}
    dom = domains.from_spec(spec)
    assert dom.rho0.value([1.0, 0, 0]) == pytest.approx(0.0)
    path = tmp_path / "blob.json"
    path.write_text(json.dumps(spec))
    assert domains.parse_domain_arg(str(path)).name == "blob"
    assert domains.parse_domain_arg(json.dumps(spec)).n == 3
    assert domains.parse_domain_arg("catalog:solid_torus:2.5,1").rho0.value([2.5, 0, 0]) == pytest.approx(-1)
    with pytest.raises(CatalogError):
        domains.from_spec({"dim": 3, "expr": "x"})
