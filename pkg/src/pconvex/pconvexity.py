"""Certification of p-convex boundaries and p-plurisubharmonic functions.

A boundary is p-convex at q when the sum s_p of its p smallest principal
curvatures (inner normal) is nonnegative, and a C^2 function is p-psh at x
when the p smallest Hessian eigenvalues have nonnegative sum. Certification
is sampling based: the report records every sample so that the location of
the minimum can be inspected and refined.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .distance import (
    DistanceField,
    NotOnBoundary,
    ProjectionError,
    principal_curvatures,
    project,
)
from .domains import ImplicitDomain
from .errors import DegenerateGradient, FrameError, InvalidP, SamplingError
from .fields import ScalarField
from .linalg import complement_basis, eigh, min_trace_p, partial_sums
from .parallel import pmap

TOL_FLAT = 1e-6
TOL_CERT = 1e-6
TOL_STRICT = 1e-6
WITNESS_FACTOR = 10.0
TOL_TANGENT = 1e-8

VERDICTS = ("strongly-p-convex", "p-convex", "not-p-convex", "inconclusive")


def sample_boundary(dom: ImplicitDomain, count: int, seed: int = 0, budget: int = 20) -> list[np.ndarray]:
    """Deterministic quasi-random points on bD.

    Scrambled Halton points of the bounding box are projected onto the
    boundary; points whose projection fails (e.g. near the medial axis) are
    skipped.

    Raises:
        SamplingError: fewer than ``count`` points after ``budget * count`` candidates.
    """
    if count <= 0:
        return []
    gen = qmc.Halton(dom.n, scramble=True, seed=seed)
    out: list[np.ndarray] = []
    tried = 0
    while len(out) < count and tried < budget * count:
        m = min(count - len(out) + 16, budget * count - tried)
        cands = qmc.scale(gen.random(m), dom.bbox[:, 0], dom.bbox[:, 1])
        tried += m
        for x in cands:
            try:
                out.append(project(dom, x).foot)
            except (ProjectionError, ArithmeticError):
                continue
            if len(out) == count:
                break
    if len(out) < count:
        raise SamplingError(f"found {len(out)} of {count} boundary points on {dom.name}")
    return out


@dataclass(frozen=True)
class BoundarySample:
    point: np.ndarray
    curvatures: np.ndarray
    s_p: float
    refined: bool = False


@dataclass
class PConvexityReport:
    p: int
    samples: list[BoundarySample]
    min_sp: float
    argmin: int
    p_flat_points: list[np.ndarray]
    verdict: str
    domain: dict = field(default_factory=dict)

    @property
    def witness(self) -> np.ndarray:
        return self.samples[self.argmin].point

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "domain": self.domain,
            "verdict": self.verdict,
            "min_sp": self.min_sp,
            "argmin_point": self.witness.tolist(),
            "sample_count": len(self.samples),
            "refined_count": sum(s.refined for s in self.samples),
            "p_flat_points": [q.tolist() for q in self.p_flat_points],
            "samples": [
                {"point": s.point.tolist(), "curvatures": s.curvatures.tolist(), "s_p": s.s_p, "refined": s.refined}
                for s in self.samples
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = len(self.samples[0].point) if self.samples else 0
        w.writerow([f"x{i + 1}" for i in range(n)] + [f"nu{i + 1}" for i in range(n - 1)] + ["s_p", "refined"])
        for s in self.samples:
            w.writerow([repr(float(v)) for v in s.point] + [repr(float(v)) for v in s.curvatures] + [repr(s.s_p), int(s.refined)])
        return buf.getvalue()


def _check_p(p, n):
    if not isinstance(p, (int, np.integer)) or not 1 <= p <= n - 1:
        raise InvalidP(f"p must be an integer in [1, {n - 1}], got {p!r}")


def refine_on_boundary(dom: ImplicitDomain, q0, objective, radius: float = 0.05, maxiter: int = 400):
    """Locally minimize ``objective(q)`` over bD near ``q0``.

    Nelder-Mead in tangent coordinates at q0, each trial point lifted back to
    the boundary by projection. Returns ``(q, value)``.
    """
    q0 = np.asarray(q0, dtype=float)
    T = complement_basis(dom.rho0.gradient(q0))
    k = T.shape[1]

    def lift(y):
        return project(dom, q0 + T @ y).foot

    def obj(y):
        try:
            return float(objective(lift(y)))
        except (ProjectionError, ArithmeticError, NotOnBoundary):
            return np.inf

    simplex = np.vstack([np.zeros(k), radius * np.eye(k)])
    res = minimize(
        obj,
        np.zeros(k),
        method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": 1e-10, "fatol": 1e-13, "maxiter": maxiter},
    )
    if not np.isfinite(res.fun):
        return q0, float(objective(q0))
    return lift(res.x), float(res.fun)


def _sp_at(dom, q, p):
    nu = principal_curvatures(dom, q).principal_curvatures
    return partial_sums(nu, p)


def certify_boundary(
    dom: ImplicitDomain,
    p: int,
    samples,
    refine: int = 5,
    tol_cert: float = TOL_CERT,
    tol_flat: float = TOL_FLAT,
    tol_strict: float = TOL_STRICT,
) -> PConvexityReport:
    """Sample-based p-convexity verdict for bD.

    Computes s_p = nu_1 + ... + nu_p at each sample. With ``refine > 0`` the
    ``refine`` lowest samples seed a local minimization of s_p over the
    boundary; the refined points are appended to the sample list.

    Verdicts: ``not-p-convex`` needs a witness with s_p < -10 * tol_cert;
    ``p-convex`` needs min s_p >= -tol_cert; ``strongly-p-convex`` in addition
    needs min s_p > tol_strict and no p-flat sample. Anything in between is
    ``inconclusive``.

    Raises:
        DegenerateGradient: at a sample where |grad rho0| is below G_MIN.
    """
    _check_p(p, dom.n)

    def one(q):
        bp = principal_curvatures(dom, q)
        nu = bp.principal_curvatures
        return BoundarySample(bp.point, nu, partial_sums(nu, p))

    recs = pmap(one, [np.asarray(q, dtype=float) for q in samples])
    if refine and recs:
        order = np.argsort([r.s_p for r in recs], kind="stable")[:refine]
        for i in order:
            try:
                q, _ = refine_on_boundary(dom, recs[i].point, lambda q: _sp_at(dom, q, p))
                r = one(q)
            except (ProjectionError, DegenerateGradient, NotOnBoundary):
                continue
            recs.append(BoundarySample(r.point, r.curvatures, r.s_p, refined=True))
    if not recs:
        raise SamplingError("no boundary samples to certify")
    sp = np.array([r.s_p for r in recs])
    i_min = int(np.argmin(sp))  # first occurrence: stable tie-break
    min_sp = float(sp[i_min])
    flats = [r.point for r in recs if np.max(np.abs(r.curvatures[:p])) <= tol_flat]
    if min_sp < -WITNESS_FACTOR * tol_cert:
        verdict = "not-p-convex"
    elif min_sp >= -tol_cert:
        verdict = "strongly-p-convex" if (min_sp > tol_strict and not flats) else "p-convex"
    else:
        verdict = "inconclusive"
    return PConvexityReport(p, recs, min_sp, i_min, flats, verdict, dom.to_json())


def is_p_psh_at(f: ScalarField, x, p: int) -> float:
    """min over p-planes of the restricted Hessian trace of f at x (>= 0 means p-psh there)."""
    return min_trace_p(f.hessian(x), p)


def sectional_curvatures(dom: ImplicitDomain, q, frame) -> tuple[float, float]:
    """Mean and Gauss curvature (H, K) of the normal section of bD through the tangent 2-plane ``frame``.

    H is the trace and K the determinant of the second fundamental form
    restricted to the plane.

    Raises:
        FrameError: the frame is not a tangent 2-plane at q.
    """
    B = frame.basis if hasattr(frame, "basis") else np.asarray(frame, dtype=float)
    if B.ndim != 2 or B.shape[1] != 2 or B.shape[0] != dom.n:
        raise FrameError(f"expected an {dom.n} x 2 frame, got shape {B.shape}")
    if np.max(np.abs(B.T @ B - np.eye(2))) > 1e-10:
        raise FrameError("frame is not orthonormal")
    bp = principal_curvatures(dom, q)
    leak = np.max(np.abs(B.T @ bp.inner_normal))
    if leak > TOL_TANGENT:
        raise FrameError(f"frame is not tangent to bD (normal component {leak:.2e})")
    M = B.T @ bp.shape_matrix @ B
    mu = eigh(M).eigenvalues
    return float(mu[0] + mu[1]), float(mu[0] * mu[1])


def collar_samples(dom: ImplicitDomain, boundary_points, depth: float, seed: int = 0) -> list[np.ndarray]:
    """Interior points q - s * n(q) with s uniform in (0, depth] for each boundary point q."""
    rng = np.random.default_rng(seed)
    out = []
    for q in boundary_points:
        g = dom.rho0.gradient(q)
        s = depth * (1.0 - rng.random())
        out.append(np.asarray(q) - s * g / np.linalg.norm(g))
    return out


def neg_log_dist_check(dom: ImplicitDomain, p: int, points, field: ScalarField | None = None) -> dict:
    """Evaluate min_trace_p of Hess(-log(-delta)) at interior collar points.

    Uses Hess(-log(-d)) = -Hess d / d + grad d grad d^T / d^2. Points where the
    distance cannot be evaluated are counted as skipped.
    """
    _check_p(p, dom.n)
    field = DistanceField(dom) if field is None else field

    def one(x):
        try:
            d = field.value(x)
            if d >= 0.0:
                return None
            g = field.gradient(x)
            H = -field.hessian(x) / d + np.outer(g, g) / (d * d)
            return min_trace_p(H, p)
        except (ProjectionError, ArithmeticError):
            return None

    vals = pmap(one, [np.asarray(x, dtype=float) for x in points])
    ok = [(i, v) for i, v in enumerate(vals) if v is not None]
    if not ok:
        raise SamplingError("no collar point could be evaluated")
    i, v = min(ok, key=lambda t: t[1])
    return {
        "p": p,
        "minimum": float(v),
        "argmin_point": np.asarray(points[i]).tolist(),
        "evaluated": len(ok),
        "skipped": len(vals) - len(ok),
    }
