import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pconvex import domains
from pconvex.errors import CatalogError, ImageOutsideDomain, MapError
from pconvex.expr import field_from_expr
from pconvex.fields import quadratic_field
from pconvex.harmonic import (
    affine_plane,
    catenoid_patch,
    default_patches,
    dichotomy_flag,
    enneper_patch,
    helicoid_patch,
    pullback_laplacian,
    stencil_laplacian,
    subharmonicity_sweep,
    with_bump,
)
from pconvex.linalg import random_frame

PATCHES = [catenoid_patch(), helicoid_patch(), enneper_patch(), affine_plane([0, 0, 0], [1, 0, 0], [0, 1, 1])]

uv = st.tuples(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))


@pytest.mark.parametrize("f", PATCHES, ids=lambda f: f.tag)
@given(uv)
def test_patches_are_conformal_harmonic(f, point):
    assert max(f.residuals(*point)) <= 1e-12


def test_rotated_scaled_patch_stays_conformal():
    Q = random_frame(5, 3, 4).basis
    f = enneper_patch(0.7, offset=np.ones(5), Q=Q)
    assert f.n == 5
    f.check(f.samples(50))


def test_pullback_examples():
    plane = affine_plane([0.2, 0.1, 0], [1, 0, 0], [0, 0, 1])
    sq = quadratic_field(3)
    lin = field_from_expr("3*x - y + 2*z", 3)
    for p in plane.samples(20):
        assert pullback_laplacian(sq, plane, p) == pytest.approx(4.0)
        assert pullback_laplacian(lin, catenoid_patch(), p) == pytest.approx(0.0, abs=1e-12)


def test_chain_rule_matches_stencil():
    rho = field_from_expr("sin(x) * exp(y) + z^4", 3)
    f = enneper_patch(0.5)
    for p in f.samples(20, seed=3):
        assert pullback_laplacian(rho, f, p) == pytest.approx(stencil_laplacian(rho, f, p), abs=1e-4)


def test_bump_is_rejected():
    bad = with_bump(affine_plane([0, 0, 0], [1, 0, 0], [0, 1, 0]))
    rho = quadratic_field(3)
    assert bad.residuals(0.0, 0.0)[0] > 1e-3
    with pytest.raises(MapError):
        bad.check([(0.0, 0.0)])
    with pytest.raises(MapError):
        pullback_laplacian(rho, bad, (0.0, 0.0))
    with pytest.raises(MapError):
        subharmonicity_sweep(field_from_expr("r2 - 4", 3), bad, count=50)


def test_sweep_ball(ball_df):
    cat = catenoid_patch(0.5)
    rep = subharmonicity_sweep(ball_df.field, cat, count=500)
    assert rep.min_laplacian >= -1e-6
    assert rep.stencil_ok and rep.max_conformal_gap <= 1e-8
    plane = affine_plane([0, 0, 0], [1, 0, 0], [0, 1, 0])
    assert subharmonicity_sweep(ball_df.field, plane, count=200).min_laplacian >= -1e-6
    assert len(rep.to_csv().splitlines()) == 501


def test_sweep_torus_enneper(torus_df):
    f = enneper_patch(0.3, offset=[2.5, 0.0, 0.0])
    rep = subharmonicity_sweep(torus_df.field, f, count=200)
    assert rep.min_laplacian >= -1e-5
    assert rep.to_dict()["samples"] == 200


def test_sweep_rejects_image_outside(ball):
    rho = ball.rho0
    with pytest.raises(ImageOutsideDomain) as info:
        subharmonicity_sweep(rho, catenoid_patch(2.0), count=50)
    assert info.value.witness["value"] > 0


def test_default_patches_contained():
    for dom in (domains.ball(2.0), domains.solid_torus(2.5, 1.0), domains.solid_torus(4.0, 0.5)):
        for f in default_patches(dom):
            vals = [dom.rho0.value(f(*p)) for p in f.samples(300)]
            assert max(vals) < 0, f.tag
    with pytest.raises(CatalogError):
        default_patches(domains.ellipsoid(1, 2, 3))


def test_dichotomy_interior(ball):
    assert dichotomy_flag(ball.rho0, catenoid_patch(0.5))["flag"] == "interior"


def test_dichotomy_boundary_slab():
    slab = field_from_expr("z^2 - 1", 3)
    f = affine_plane([0, 0, 1.0], [1, 0, 0], [0, 1, 0])
    assert dichotomy_flag(slab, f)["flag"] == "boundary"


def test_dichotomy_mixed_touch_point():
    bowl = field_from_expr("z - x^2 - y^2", 3)
    f = affine_plane([0, 0, 0], [1, 0, 0], [0, 1, 0])
    params = np.vstack([[0.0, 0.0], f.samples(100)])
    rep = dichotomy_flag(bowl, f, params=params)
    assert rep["flag"] == "mixed"
    assert rep["touch_uv"] == [0.0, 0.0]
    assert rep["touch_point"] == [0.0, 0.0, 0.0]
