"""Signed distance to the boundary, nearest-point projection and boundary curvatures.

Sign conventions: delta < 0 inside D, grad(delta) is the outward unit normal,
and principal curvatures are taken with respect to the inner normal, so the
unit sphere has all curvatures +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .domains import G_MIN, ImplicitDomain
from .errors import DegenerateGradient, NotOnBoundary, ProjectionError
from .fields import ScalarField
from .linalg import complement_basis, eigh

TOL_BD = 1e-8
MAX_ITER = 100
HESS_STEP = 1e-5
MAX_TRACE = 200  # sphere-tracing steps before giving up on a ray (grazing rays)


@dataclass(frozen=True)
class Projection:
    point: np.ndarray
    foot: np.ndarray
    delta: float
    normal: np.ndarray  # outward unit normal at the foot, equal to grad(delta)
    iterations: int


@dataclass(frozen=True)
class BoundaryPoint:
    point: np.ndarray
    inner_normal: np.ndarray
    principal_curvatures: np.ndarray
    principal_directions: np.ndarray  # n x (n-1), columns
    shape_matrix: np.ndarray  # second fundamental form extended by zero along the normal
    gradient_norm: float

    @property
    def normal(self) -> np.ndarray:
        return -self.inner_normal


def _first_crossing(dom, x, d, r, reach, probes: int = 8):
    """First sign change of rho0 along x + s d, s in (0, reach], or None.

    Each round looks ahead to a local Newton-type estimate of the crossing
    (at least two Lipschitz-safe steps), checks the sign at ``probes`` evenly
    spaced points up to there and brackets the first change for brentq. If
    none is seen the ray advances by one safe step |rho0| / L, which cannot
    jump over the boundary because L bounds |grad rho0| on the box.
    """
    rho = dom.rho0
    L = dom.gradient_bound
    s, ry = 0.0, r
    for _ in range(MAX_TRACE):
        safe = abs(ry) / L
        slope = abs(rho.gradient(x + s * d) @ d)
        local = 1.5 * abs(ry) / slope if slope > 0.0 else reach
        span = max(2.0 * safe, min(local, reach))
        prev = s
        for k in range(1, probes + 1):
            u = s + span * k / probes
            if np.sign(rho.value(x + u * d)) != np.sign(r):
                return brentq(lambda w: rho.value(x + w * d), prev, u, xtol=1e-15, rtol=1e-15)
            prev = u
        s += safe
        if s > reach:
            return None
        ry = rho.value(x + s * d)
        if ry == 0.0:
            return s
    return None


def _ray_start(dom: ImplicitDomain, x: np.ndarray) -> np.ndarray:
    """A boundary point near x: first crossing along the gradient line, else toward an interior point."""
    rho = dom.rho0
    r = rho.value(x)
    if r == 0.0:
        return x.copy()
    g = rho.gradient(x)
    gn = np.linalg.norm(g)
    if gn < G_MIN:
        raise ProjectionError(f"gradient of rho0 vanishes at {x.tolist()}")
    d = -np.sign(r) * g / gn
    reach = 4.0 * float(np.linalg.norm(dom.bbox[:, 1] - dom.bbox[:, 0]))
    t = _first_crossing(dom, x, d, r, reach)
    if t is not None:
        return x + t * d
    if r > 0.0:
        anchors = dom.interior_points
        a = anchors[np.argmin(np.linalg.norm(anchors - x, axis=1))]
        seg = a - x
        t = brentq(lambda u: rho.value(x + u * seg), 0.0, 1.0, xtol=1e-15, rtol=1e-15)
        return x + t * seg
    raise ProjectionError(f"no boundary crossing along the normal ray from {x.tolist()}")


def _onto_surface(dom: ImplicitDomain, y: np.ndarray) -> np.ndarray:
    for _ in range(50):
        r = dom.rho0.value(y)
        g = dom.rho0.gradient(y)
        step = r * g / (g @ g)
        y = y - step
        if np.linalg.norm(step) <= 1e-15 * (1.0 + np.linalg.norm(y)):
            break
    return y


def _newton(dom, x, q, max_iter):
    """Damped Newton on q - x + mu grad(q) = 0, rho0(q) = 0. Returns (q, iterations, converged)."""
    rho = dom.rho0
    n = len(x)
    g = rho.gradient(q)
    mu = (x - q) @ g / (g @ g)
    scale = 1.0 + np.linalg.norm(x)

    def residual(q, mu):
        g = rho.gradient(q)
        return np.concatenate([q - x + mu * g, [rho.value(q) / np.linalg.norm(g)]]), g

    F, g = residual(q, mu)
    for it in range(1, max_iter + 1):
        J = np.zeros((n + 1, n + 1))
        J[:n, :n] = np.eye(n) + mu * rho.hessian(q)
        J[:n, n] = g
        J[n, :n] = g / np.linalg.norm(g)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return q, it, False
        if not np.all(np.isfinite(step)):
            return q, it, False
        t, f0 = 1.0, np.linalg.norm(F)
        while True:
            qn, mun = q + t * step[:n], mu + t * step[n]
            try:
                Fn, gn = residual(qn, mun)
            except ArithmeticError:
                Fn = None
            if Fn is not None and np.all(np.isfinite(Fn)) and (
                np.linalg.norm(Fn) <= (1.0 - 1e-4 * t) * f0 or np.linalg.norm(Fn) <= 1e-15 * scale
            ):
                break
            t *= 0.5
            if t < 1e-6:
                return q, it, False
        q, mu, F, g = qn, mun, Fn, gn
        if np.linalg.norm(t * step[:n]) <= 1e-14 * scale or np.linalg.norm(F) <= 1e-15 * scale:
            return q, it, True
    return q, max_iter, False


def _tangent_descent(dom, x, q, max_iter):
    """Fallback: step along the tangential part of x - q and re-project onto {rho0 = 0}."""
    scale = 1.0 + np.linalg.norm(x)
    for it in range(max_iter):
        g = dom.rho0.gradient(q)
        nrm = g / np.linalg.norm(g)
        v = x - q
        vt = v - (v @ nrm) * nrm
        if np.linalg.norm(vt) <= 1e-13 * scale:
            break
        q = _onto_surface(dom, q + vt)
    return q


def _accept(dom, x, q) -> bool:
    g = dom.rho0.gradient(q)
    gn = np.linalg.norm(g)
    if gn < G_MIN:
        return False
    r = dom.rho0.value(q)
    if abs(r) > 1e-10 or abs(r) / gn > TOL_BD:
        return False
    v = x - q
    vn = np.linalg.norm(v)
    if vn > 1e-12:
        cosang = abs(v @ g) / (vn * gn)
        if np.arccos(min(1.0, cosang)) > 1e-6:
            return False
    return True


def project(dom: ImplicitDomain, x, max_iter: int = MAX_ITER) -> Projection:
    """Nearest boundary point of ``x`` with signed distance and normal.

    Starts from the first crossing of {rho0 = 0} along the gradient line of x,
    runs damped Newton on the Lagrange system and falls back to tangential
    descent with re-projection if Newton stalls.

    Raises:
        ProjectionError: no convergence within ``max_iter`` iterations.
    """
    x = np.asarray(x, dtype=float)
    try:
        q0 = _ray_start(dom, x)
        q, it, ok = _newton(dom, x, q0, max_iter)
        if not (ok and _accept(dom, x, q)):
            q = _tangent_descent(dom, x, q0, max_iter)
            q, it2, ok = _newton(dom, x, q, max_iter)
            it += it2
    except (ArithmeticError, ValueError) as exc:
        if isinstance(exc, ProjectionError):
            raise
        raise ProjectionError(f"projection failed at {x.tolist()}: {exc}") from None
    if not _accept(dom, x, q):
        raise ProjectionError(f"projection did not converge from {x.tolist()}")
    g = dom.rho0.gradient(q)
    r = dom.rho0.value(x)
    delta = float(np.sign(r) * np.linalg.norm(x - q))
    return Projection(x, q, delta, g / np.linalg.norm(g), it)


def project_to_boundary(dom: ImplicitDomain, x) -> np.ndarray:
    return project(dom, x).foot


def signed_distance(dom: ImplicitDomain, x) -> float:
    """Signed distance to the boundary: negative inside D, positive outside."""
    return project(dom, x).delta


def principal_curvatures(dom: ImplicitDomain, q) -> BoundaryPoint:
    """Principal curvatures of bD at ``q`` from the analytic Hessian of rho0 / |grad rho0|."""
    q = np.asarray(q, dtype=float)
    g = dom.rho0.gradient(q)
    gn = float(np.linalg.norm(g))
    if gn < G_MIN:
        raise DegenerateGradient(f"|grad rho0| = {gn:.2e} at {q.tolist()}", point=q)
    if abs(dom.rho0.value(q)) / gn > TOL_BD:
        raise NotOnBoundary(f"point {q.tolist()} is not on the boundary")
    nrm = g / gn
    T = complement_basis(nrm)
    S_t = T.T @ dom.rho0.hessian(q) @ T / gn
    spec = eigh(S_t)
    dirs = T @ spec.eigenvectors
    shape = T @ (0.5 * (S_t + S_t.T)) @ T.T
    return BoundaryPoint(q, -nrm, spec.eigenvalues, dirs, shape, gn)


def second_order_ok(curvatures, delta: float) -> bool:
    """The foot point is a strict local minimizer of the distance iff 1 + delta * nu_i > 0 for all i."""
    return bool(np.all(1.0 + delta * np.asarray(curvatures) > 0.0))


def in_collar(dom: ImplicitDomain, x) -> bool:
    try:
        pr = project(dom, x)
        bp = principal_curvatures(dom, pr.foot)
    except (ProjectionError, DegenerateGradient, NotOnBoundary):
        return False
    return second_order_ok(bp.principal_curvatures, pr.delta)


class DistanceField(ScalarField):
    """The signed distance as a ScalarField.

    Gradient is the unit normal at the foot point. The Hessian is a central
    difference of that normal field (step ``1e-5 * (1 + |x|)``), symmetrized.
    Projections are memoized per point.
    """

    def __init__(self, dom: ImplicitDomain, hess_step: float = HESS_STEP, cache_size: int = 4096):
        self.dom = dom
        self.hess_step = hess_step
        self._proj = lru_cache(maxsize=cache_size)(self._project_bytes)
        super().__init__(dom.n, self._value_impl, self._grad_impl, self._hess_impl, name=f"delta[{dom.name}]")

    def _project_bytes(self, key: bytes) -> Projection:
        return project(self.dom, np.frombuffer(key, dtype=float))

    def projection(self, x) -> Projection:
        return self._proj(np.ascontiguousarray(x, dtype=float).tobytes())

    def _value_impl(self, x):
        return self.projection(x).delta

    def _grad_impl(self, x):
        return self.projection(x).normal.copy()

    def _hess_impl(self, x):
        n = len(x)
        h = self.hess_step * (1.0 + np.linalg.norm(x))
        H = np.empty((n, n))
        for i in range(n):
            e = np.zeros(n)
            e[i] = h
            H[:, i] = (self.projection(x + e).normal - self.projection(x - e).normal) / (2.0 * h)
        return 0.5 * (H + H.T)


def delta_field(dom: ImplicitDomain, exact: bool = False) -> ScalarField:
    """Signed distance field; ``exact=True`` uses the domain's closed form when it has one."""
    if exact:
        if dom.exact_delta is None:
            raise ValueError(f"domain {dom.name} has no closed-form signed distance")
        return dom.exact_delta
    return DistanceField(dom)


def restricted_eigenvalues(H, normal) -> np.ndarray:
    """Eigenvalues of H restricted to the orthogonal complement of ``normal``."""
    T = complement_basis(normal)
    return eigh(T.T @ H @ T).eigenvalues


def curvature_transport_check(dom: ImplicitDomain, q, t_values, field: ScalarField | None = None) -> dict:
    """Compare Hessian eigenvalues of delta along the normal line with nu_i / (1 + t nu_i).

    For each t the point x = q + t * grad(delta)(q) is formed, the Hessian of
    ``field`` (default: the finite-difference distance field) at x is
    restricted to the normal complement, and its sorted eigenvalues are
    compared with the transported boundary curvatures.
    """
    field = DistanceField(dom) if field is None else field
    bp = principal_curvatures(dom, q)
    nu = bp.principal_curvatures
    rows = []
    for t in t_values:
        t = float(t)
        predicted = nu / (1.0 + t * nu)
        if t == 0.0:
            measured = nu.copy()
            normal_eig = 0.0
        else:
            x = bp.point + t * bp.normal
            H = field.hessian(x)
            measured = restricted_eigenvalues(H, bp.normal)
            normal_eig = float(bp.normal @ H @ bp.normal)
        rel = np.abs(measured - predicted) / np.maximum(np.abs(predicted), 1e-6)
        rows.append(
            {
                "t": t,
                "predicted": predicted.tolist(),
                "measured": measured.tolist(),
                "max_rel_error": float(rel.max()),
                "normal_eigenvalue": normal_eig,
            }
        )
    return {
        "point": bp.point.tolist(),
        "curvatures": nu.tolist(),
        "rows": rows,
        "max_rel_error": max(r["max_rel_error"] for r in rows) if rows else 0.0,
    }
