"""Bounded implicit domains {rho0 < 0} and a catalog of analytic test domains.

Domains can be built from the catalog, from an expression string, or from a
JSON domain spec::

    {"name": "...", "dim": 3, "catalog": {"kind": "solid_torus", "params": {"R_ring": 2.5, "r_tube": 1}},
     "bbox": [[lo, hi], ...]}
    {"name": "...", "dim": 2, "expr": "x1^2 + 4*x2^2 - 1", "bbox": [[-2, 2], [-1, 1]]}

or from the short CLI form ``catalog:solid_torus:2.5,1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.stats import qmc

from .errors import CatalogError
from .expr import field_from_expr
from .fields import ScalarField

G_MIN = 1e-6


@dataclass(frozen=True)
class ImplicitDomain:
    """The bounded domain D = {rho0 < 0} inside an axis-aligned box."""

    name: str
    rho0: ScalarField
    bbox: np.ndarray
    spec: dict = field(default_factory=dict)
    exact_delta: Optional[ScalarField] = None

    @property
    def n(self) -> int:
        return self.rho0.n

    def contains(self, x) -> bool:
        return self.rho0.value(x) < 0.0

    @cached_property
    def gradient_bound(self) -> float:
        """Estimated Lipschitz constant of rho0 over the box (sampled maximum of |grad|, padded by 25%)."""
        pts = qmc.scale(qmc.Halton(self.n, seed=0).random(2048), self.bbox[:, 0], self.bbox[:, 1])
        return 1.25 * max(float(np.linalg.norm(self.rho0.gradient(x))) for x in pts)

    @cached_property
    def interior_points(self) -> np.ndarray:
        """Quasi-random points of the box that lie in D (used as bracketing anchors)."""
        pts = qmc.scale(qmc.Halton(self.n, seed=1).random(4096), self.bbox[:, 0], self.bbox[:, 1])
        inside = np.array([x for x in pts if self.rho0.value(x) < 0.0])
        if len(inside) == 0:
            raise CatalogError(f"domain {self.name} has no interior points in its bbox")
        return inside

    def to_json(self) -> dict:
        """Domain spec that rebuilds this domain through :func:`from_spec`."""
        return dict(self.spec, bbox=self.bbox.tolist())


def _box(lo, hi) -> np.ndarray:
    return np.column_stack([np.asarray(lo, float), np.asarray(hi, float)])


def _positive(name, **vals):
    for k, v in vals.items():
        if not np.isfinite(v) or v <= 0:
            raise CatalogError(f"{name}: {k} must be positive, got {v}")


def ball(R: float = 1.0, dim: int = 3) -> ImplicitDomain:
    """rho0 = |x|^2 - R^2. Also carries the exact signed distance |x| - R."""
    _positive("ball", R=R)
    dim = int(dim)
    if dim < 2:
        raise CatalogError("ball: dim must be at least 2")
    I = np.eye(dim)
    rho0 = ScalarField(dim, lambda x: x @ x - R * R, lambda x: 2.0 * x, lambda x: 2.0 * I, name=f"ball({R})")

    def hess_delta(x):
        r = np.linalg.norm(x)
        u = x / r
        return (I - np.outer(u, u)) / r

    exact = ScalarField(
        dim, lambda x: np.linalg.norm(x) - R, lambda x: x / np.linalg.norm(x), hess_delta, name="exact sdf"
    )
    spec = {"name": "ball", "dim": dim, "catalog": {"kind": "ball", "params": {"R": R, "dim": dim}}}
    return ImplicitDomain("ball", rho0, _box([-1.5 * R] * dim, [1.5 * R] * dim), spec, exact)


def ellipsoid(*axes: float) -> ImplicitDomain:
    """rho0 = sum(x_i^2 / a_i^2) - 1."""
    if len(axes) == 1 and np.ndim(axes[0]) == 1:
        axes = tuple(axes[0])
    a = np.asarray(axes, dtype=float)
    if len(a) < 2:
        raise CatalogError("ellipsoid: need at least two semi-axes")
    _positive("ellipsoid", **{f"a{i + 1}": v for i, v in enumerate(a)})
    w = 1.0 / a**2
    D = np.diag(2.0 * w)
    rho0 = ScalarField(len(a), lambda x: w @ (x * x) - 1.0, lambda x: 2.0 * w * x, lambda x: D, name="ellipsoid")
    spec = {"name": "ellipsoid", "dim": len(a), "catalog": {"kind": "ellipsoid", "params": {"axes": a.tolist()}}}
    return ImplicitDomain("ellipsoid", rho0, _box(-1.5 * a, 1.5 * a), spec)


def solid_torus(R_ring: float = 2.5, r_tube: float = 1.0) -> ImplicitDomain:
    """rho0 = (sqrt(x^2 + y^2) - R_ring)^2 + z^2 - r_tube^2 in R^3."""
    _positive("solid_torus", R_ring=R_ring, r_tube=r_tube)
    if R_ring <= r_tube:
        raise CatalogError(f"solid_torus: need R_ring > r_tube, got {R_ring} <= {r_tube}")
    R, r = float(R_ring), float(r_tube)

    def value(x):
        s = np.hypot(x[0], x[1])
        return (s - R) ** 2 + x[2] ** 2 - r * r

    def gradient(x):
        s = max(np.hypot(x[0], x[1]), 1e-300)
        d = s - R
        return np.array([2 * d * x[0] / s, 2 * d * x[1] / s, 2 * x[2]])

    def hessian(x):
        X, Y = x[0], x[1]
        s = max(np.hypot(X, Y), 1e-300)
        d = s - R
        s2, s3 = s * s, s * s * s
        hxx = 2 * X * X / s2 + 2 * d * Y * Y / s3
        hyy = 2 * Y * Y / s2 + 2 * d * X * X / s3
        hxy = 2 * X * Y / s2 - 2 * d * X * Y / s3
        return np.array([[hxx, hxy, 0.0], [hxy, hyy, 0.0], [0.0, 0.0, 2.0]])

    rho0 = ScalarField(3, value, gradient, hessian, name=f"solid_torus({R},{r})")
    spec = {"name": "solid_torus", "dim": 3, "catalog": {"kind": "solid_torus", "params": {"R_ring": R, "r_tube": r}}}
    L = R + 1.5 * r
    return ImplicitDomain("solid_torus", rho0, _box([-L, -L, -1.5 * r], [L, L, 1.5 * r]), spec)


def perturbed_ball(R: float = 1.0, amp: float = 0.1, freq: float = np.pi, dim: int = 3) -> ImplicitDomain:
    """rho0 = |x|^2 - R^2 + amp R^2 cos(freq x1 / R).

    The section radius at x1 = 0 is R sqrt(1 - amp); amp close to 1 gives a
    dumbbell with a thin, saddle-shaped neck.
    """
    _positive("perturbed_ball", R=R, freq=freq)
    if not 0.0 <= amp < 1.0:
        raise CatalogError(f"perturbed_ball: amp must lie in [0, 1), got {amp}")
    dim = int(dim)
    I = np.eye(dim)
    k = freq / R

    def value(x):
        return x @ x - R * R + amp * R * R * np.cos(k * x[0])

    def gradient(x):
        g = 2.0 * x
        g[0] -= amp * R * R * k * np.sin(k * x[0])
        return g

    def hessian(x):
        H = 2.0 * I.copy()
        H[0, 0] -= amp * R * R * k * k * np.cos(k * x[0])
        return H

    rho0 = ScalarField(dim, value, gradient, hessian, name="perturbed_ball")
    spec = {
        "name": "perturbed_ball",
        "dim": dim,
        "catalog": {"kind": "perturbed_ball", "params": {"R": R, "amp": amp, "freq": freq, "dim": dim}},
    }
    L = 1.5 * R * np.sqrt(1.0 + amp)
    return ImplicitDomain("perturbed_ball", rho0, _box([-L] * dim, [L] * dim), spec)


def complex_egg(k: int = 2) -> ImplicitDomain:
    """rho0 = |z|^(2k) + |w|^2 - 1 on C^2 = R^4 with z = x1 + i x2, w = x3 + i x4."""
    if int(k) != k or k < 1:
        raise CatalogError(f"complex_egg: k must be a positive integer, got {k}")
    k = int(k)

    def value(x):
        return (x[0] ** 2 + x[1] ** 2) ** k + x[2] ** 2 + x[3] ** 2 - 1.0

    def gradient(x):
        q = x[0] ** 2 + x[1] ** 2
        c = 2 * k * q ** (k - 1)
        return np.array([c * x[0], c * x[1], 2 * x[2], 2 * x[3]])

    def hessian(x):
        q = x[0] ** 2 + x[1] ** 2
        z = x[:2]
        H = np.zeros((4, 4))
        H[:2, :2] = 2 * k * q ** (k - 1) * np.eye(2)
        if k >= 2:
            H[:2, :2] += 4 * k * (k - 1) * q ** (k - 2) * np.outer(z, z)
        H[2, 2] = H[3, 3] = 2.0
        return H

    rho0 = ScalarField(4, value, gradient, hessian, name=f"complex_egg({k})")
    spec = {"name": "complex_egg", "dim": 4, "catalog": {"kind": "complex_egg", "params": {"k": k}}}
    return ImplicitDomain("complex_egg", rho0, _box([-1.5] * 4, [1.5] * 4), spec)


def hartogs_example(m: float = 0.0) -> ImplicitDomain:
    """rho0 = Re w + Re(z^2) + |w|^2 + |z|^4 + m on C^2 = R^4.

    The minimum of rho0 is m - 1/2, so the domain is nonempty for m < 1/2. With
    the default m = 0 the boundary circle {z = 0} has |grad rho0| = 1 and is
    exactly where the Levi form degenerates.
    """
    if not m < 0.5:
        raise CatalogError(f"hartogs_example: m must be < 1/2 for a nonempty domain, got {m}")

    def value(x):
        q = x[0] ** 2 + x[1] ** 2
        return x[2] + x[0] ** 2 - x[1] ** 2 + x[2] ** 2 + x[3] ** 2 + q * q + m

    def gradient(x):
        q = x[0] ** 2 + x[1] ** 2
        return np.array([2 * x[0] + 4 * q * x[0], -2 * x[1] + 4 * q * x[1], 1 + 2 * x[2], 2 * x[3]])

    def hessian(x):
        q = x[0] ** 2 + x[1] ** 2
        z = x[:2]
        H = np.zeros((4, 4))
        H[:2, :2] = np.diag([2.0, -2.0]) + 4 * q * np.eye(2) + 8 * np.outer(z, z)
        H[2, 2] = H[3, 3] = 2.0
        return H

    rho0 = ScalarField(4, value, gradient, hessian, name="hartogs_example")
    spec = {"name": "hartogs_example", "dim": 4, "catalog": {"kind": "hartogs_example", "params": {"m": m}}}
    return ImplicitDomain("hartogs_example", rho0, _box([-1.5, -1.5, -2.0, -1.5], [1.5, 1.5, 1.0, 1.5]), spec)


CATALOG = {
    "ball": ball,
    "ellipsoid": ellipsoid,
    "solid_torus": solid_torus,
    "perturbed_ball": perturbed_ball,
    "complex_egg": complex_egg,
    "hartogs_example": hartogs_example,
}

# order of positional parameters in the short "catalog:kind:p1,p2" form
POSITIONAL = {
    "ball": ["R", "dim"],
    "solid_torus": ["R_ring", "r_tube"],
    "perturbed_ball": ["R", "amp", "freq", "dim"],
    "complex_egg": ["k"],
    "hartogs_example": ["m"],
}


def catalog(name: str, params=None) -> ImplicitDomain:
    """Look up a catalog domain; ``params`` is a dict of keyword parameters or a positional list."""
    if name not in CATALOG:
        raise CatalogError(f"unknown catalog domain {name!r}; choose from {sorted(CATALOG)}")
    params = {} if params is None else params
    try:
        if name == "ellipsoid":
            axes = params.get("axes") if isinstance(params, dict) else params
            return ellipsoid(*axes)
        if isinstance(params, dict):
            return CATALOG[name](**params)
        return CATALOG[name](*params)
    except TypeError as exc:
        raise CatalogError(f"bad parameters for {name}: {exc}") from None


def from_spec(spec: dict) -> ImplicitDomain:
    """Build a domain from a JSON domain-spec dictionary."""
    if "catalog" in spec:
        cat = spec["catalog"]
        dom = catalog(cat["kind"], cat.get("params", {}))
        if "dim" in spec and int(spec["dim"]) != dom.n:
            raise CatalogError(f"spec dim {spec['dim']} does not match catalog dimension {dom.n}")
        if spec.get("bbox") is not None:
            bbox = np.asarray(spec["bbox"], dtype=float)
            full = dict(dom.spec, bbox=bbox.tolist(), name=spec.get("name", dom.name))
            dom = ImplicitDomain(full["name"], dom.rho0, bbox, full, dom.exact_delta)
        return dom
    if "expr" in spec:
        n = int(spec["dim"])
        if spec.get("bbox") is None:
            raise CatalogError("expression domains need an explicit bbox")
        bbox = np.asarray(spec["bbox"], dtype=float)
        if bbox.shape != (n, 2):
            raise CatalogError(f"bbox must have shape ({n}, 2)")
        name = spec.get("name", "expr")
        rho0 = field_from_expr(spec["expr"], n, name=name)
        full = {"name": name, "dim": n, "expr": spec["expr"], "bbox": bbox.tolist()}
        return ImplicitDomain(name, rho0, bbox, full)
    raise CatalogError("domain spec needs either 'catalog' or 'expr'")


def parse_domain_arg(arg: str) -> ImplicitDomain:
    """Resolve ``catalog:kind:p1,p2``, inline JSON, or a path to a JSON file."""
    arg = arg.strip()
    if arg.startswith("catalog:"):
        parts = arg.split(":", 2)
        kind = parts[1]
        values = [float(v) for v in parts[2].split(",")] if len(parts) > 2 and parts[2] else []
        if kind == "ellipsoid":
            return catalog(kind, {"axes": values})
        if kind not in POSITIONAL:
            raise CatalogError(f"unknown catalog domain {kind!r}")
        names = POSITIONAL[kind]
        if len(values) > len(names):
            raise CatalogError(f"{kind} takes at most {len(names)} parameters")
        params = {k: (int(v) if k in ("dim", "k") else v) for k, v in zip(names, values)}
        return catalog(kind, params)
    if arg.startswith("{"):
        return from_spec(json.loads(arg))
    return from_spec(json.loads(Path(arg).read_text()))
