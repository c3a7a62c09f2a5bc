"""Levi form, complex tangent spaces and strong pseudoconvexity of interior level sets.

R^(2m) is identified with C^m through z_k = x_(2k-1) + i x_(2k), so the
complex structure J sends e_(2k-1) to e_(2k) and e_(2k) to -e_(2k-1).

Normalization: the Levi form of f at x on the complex line C v is the real
Hessian trace over span{v, Jv},

    L_f(x; v) = Hess f(x)(v, v) + Hess f(x)(Jv, Jv),

which is 4 times the complex Hessian sum_{jk} f_{z_j zbar_k} v_j vbar_k.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .distance import DistanceField, ProjectionError, principal_curvatures
from .domains import ImplicitDomain
from .errors import DimensionError
from .fields import ScalarField
from .linalg import Frame, complement_basis, eigh
from .parallel import pmap
from .pconvexity import refine_on_boundary, sectional_curvatures

TOL_LEVI = 1e-6
TOL_K = 1e-6
SCAN_ANGLES = 64


@dataclass(frozen=True)
class ComplexStructure:
    n_real: int

    def __post_init__(self):
        if self.n_real < 2 or self.n_real % 2:
            raise DimensionError(f"complex structure needs an even dimension, got {self.n_real}")

    @cached_property
    def J(self) -> np.ndarray:
        J = np.zeros((self.n_real, self.n_real))
        for k in range(0, self.n_real, 2):
            J[k + 1, k] = 1.0
            J[k, k + 1] = -1.0
        return J

    def __call__(self, v) -> np.ndarray:
        return self.J @ np.asarray(v, dtype=float)


def J_matrix(n: int) -> np.ndarray:
    return ComplexStructure(n).J


def levi_matrix(H) -> np.ndarray:
    """M with v^T M v = H(v, v) + H(Jv, Jv), i.e. H + J^T H J."""
    H = np.asarray(H, dtype=float)
    J = J_matrix(H.shape[0])
    return H + J.T @ H @ J


def levi_form(f: ScalarField, x, v) -> float:
    """Real-trace Levi form of f at x on the complex line through the unit vector v."""
    if f.n % 2:
        raise DimensionError(f"Levi form needs an even dimension, got {f.n}")
    v = np.asarray(v, dtype=float)
    H = f.hessian(x)
    Jv = J_matrix(f.n) @ v
    return float(v @ H @ v + Jv @ H @ Jv)


def complex_tangent_frame(dom: ImplicitDomain, q) -> Frame:
    """Orthonormal basis of T_q bD cap J(T_q bD) arranged in pairs (w, Jw).

    Raises:
        DimensionError: odd dimension or n < 4.
        DegenerateGradient: |grad rho0(q)| below G_MIN.
    """
    n = dom.n
    if n % 2 or n < 4:
        raise DimensionError(f"complex tangent spaces need even n >= 4, got {n}")
    nu = principal_curvatures(dom, q).normal
    J = J_matrix(n)
    taken = [nu, J @ nu]
    cols = []
    for w in complement_basis(nu).T:
        for _ in range(2):
            for u in taken:
                w = w - (u @ w) * u
        r = np.linalg.norm(w)
        if r < 1e-8:
            continue
        w = w / r
        Jw = J @ w
        taken += [w, Jw]
        cols += [w, Jw]
        if len(cols) == n - 2:
            break
    return Frame(np.column_stack(cols))


def _line_candidates(W: np.ndarray, M: np.ndarray, angles: int) -> list[np.ndarray]:
    """Unit vectors spanning candidate complex lines in the column span of W."""
    m = W.shape[1] // 2
    lead = [W[:, 2 * i] for i in range(m)]
    cands = [w for w in lead]
    th = np.linspace(0.0, np.pi, angles, endpoint=False)
    for i in range(m):
        for j in range(i + 1, m):
            cands += [np.cos(a) * lead[i] + np.sin(a) * lead[j] for a in th]
    spec = eigh(W.T @ M @ W)
    cands += [W @ spec.eigenvectors[:, k] for k in range(W.shape[1])]
    J = J_matrix(W.shape[0])
    out: list[np.ndarray] = []
    for c in cands:
        c = c / np.linalg.norm(c)
        # same complex line as an earlier candidate iff c lies in span{u, Ju}
        if all((c @ u) ** 2 + (c @ (J @ u)) ** 2 < 1.0 - 1e-10 for u in out):
            out.append(c)
    return out


def _min_levi(W, M):
    return float(eigh(W.T @ M @ W).eigenvalues[0])


def levi_degenerate_candidates(dom: ImplicitDomain, samples, refine: int = 5) -> list[np.ndarray]:
    """Boundary points where the Levi form of bD is smallest: the lowest samples, locally refined."""
    def boundary_min(q):
        bp = principal_curvatures(dom, q)
        W = complex_tangent_frame(dom, q).basis
        return _min_levi(W, levi_matrix(bp.shape_matrix))

    vals = [boundary_min(q) for q in samples]
    out = []
    for i in np.argsort(vals, kind="stable")[:refine]:
        try:
            q, _ = refine_on_boundary(dom, samples[i], boundary_min, radius=0.05)
        except (ProjectionError, ArithmeticError):
            continue
        out.append(q)
    return out


def levi_level_check(
    dom: ImplicitDomain,
    t_values,
    samples,
    field: Optional[ScalarField] = None,
    tol_levi: float = TOL_LEVI,
    tol_K: float = TOL_K,
    angles: int = SCAN_ANGLES,
) -> dict:
    """Levi-degenerate lines of bD, their sectional curvature K, and Levi minima on interior level sets.

    For each boundary sample q the complex tangent lines are scanned (angle
    sweep plus eigen-directions of the restricted Levi matrix). Lines with
    |L| <= tol_levi are degenerate; for those K = det of the second
    fundamental form on span{v, Jv}. The strong-pseudoconvexity hypothesis
    holds when every degenerate line has |K| > tol_K.

    For each t the Levi form of delta at q + t n(q) on the complex tangent
    lines of q is evaluated; the report gives the minimum over all lines, the
    minimum over degenerate lines, and the smallest slack L(t) - L(0) (the
    transport inequality predicts slack >= 0 for t < 0).
    """
    if dom.n % 2 or dom.n < 4:
        raise DimensionError(f"Levi level check needs even n >= 4, got {dom.n}")
    field = DistanceField(dom) if field is None else field
    J = J_matrix(dom.n)

    def per_sample(q):
        bp = principal_curvatures(dom, q)
        W = complex_tangent_frame(dom, bp.point).basis
        M0 = levi_matrix(bp.shape_matrix)
        lines = _line_candidates(W, M0, angles)
        levi0 = [float(v @ M0 @ v) for v in lines]
        degenerate = []
        for v, L in zip(lines, levi0):
            if abs(L) <= tol_levi:
                _, K = sectional_curvatures(dom, bp.point, np.column_stack([v, J @ v]))
                degenerate.append({"direction": v.tolist(), "levi": L, "K": K})
        per_t = []
        for t in t_values:
            x = bp.point + float(t) * bp.normal
            try:
                Mt = levi_matrix(field.hessian(x))
            except ProjectionError:
                per_t.append(None)
                continue
            lt = [float(v @ Mt @ v) for v in lines]
            per_t.append(
                {
                    "min": min(_min_levi(W, Mt), min(lt)),
                    "min_degenerate": min((lt[i] for i, L in enumerate(levi0) if abs(L) <= tol_levi), default=None),
                    "min_slack": min(a - b for a, b in zip(lt, levi0)),
                }
            )
        return {
            "point": bp.point.tolist(),
            "boundary_min_levi": min(_min_levi(W, M0), min(levi0)),
            "degenerate": degenerate,
            "per_t": per_t,
        }

    recs = pmap(per_sample, [np.asarray(q, dtype=float) for q in samples])
    degenerate = [dict(d, point=r["point"]) for r in recs for d in r["degenerate"]]
    Ks = [d["K"] for d in degenerate]
    rows = []
    for k, t in enumerate(t_values):
        vals = [r["per_t"][k] for r in recs if r["per_t"][k] is not None]
        degs = [v["min_degenerate"] for v in vals if v["min_degenerate"] is not None]
        rows.append(
            {
                "t": float(t),
                "min_levi": min(v["min"] for v in vals) if vals else None,
                "min_levi_degenerate": min(degs) if degs else None,
                "min_slack": min(v["min_slack"] for v in vals) if vals else None,
                "evaluated": len(vals),
            }
        )
    boundary_min = min(r["boundary_min_levi"] for r in recs)
    hypothesis = all(abs(K) > tol_K for K in Ks)
    return {
        "samples": len(recs),
        "boundary_min_levi": boundary_min,
        "pseudoconvex": bool(boundary_min >= -tol_levi),
        "degenerate_lines": degenerate,
        "K_values": Ks,
        "hypothesis_holds": bool(hypothesis),
        "levels": rows,
        "strongly_pseudoconvex_levels": [
            r["t"] for r in rows if r["min_levi"] is not None and r["min_levi"] > tol_levi
        ],
    }
