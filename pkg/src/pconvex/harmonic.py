"""Subharmonicity of rho o f along conformal harmonic patches.

For a conformal harmonic map f(u, v) the Laplacian of rho o f is

    Hess rho(f_u, f_u) + Hess rho(f_v, f_v) + grad rho . (f_uu + f_vv)
        = |f_u|^2 * tr_L Hess rho,

with L = span(f_u, f_v) (the last term vanishes since f is harmonic). So a
2-psh rho pulls back to a subharmonic function on every minimal surface.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .domains import ImplicitDomain
from .errors import CatalogError, ImageOutsideDomain, MapError, RankError
from .fields import ScalarField
from .linalg import orthonormalize, trace_on_plane
from .parallel import pmap

TOL_MAP = 1e-8
TOL_BD = 1e-8
STENCIL_STEP = 1e-3
TOL_STENCIL = 1e-3


@dataclass(frozen=True)
class MapJet:
    point: np.ndarray
    fu: np.ndarray
    fv: np.ndarray
    fuu: np.ndarray
    fuv: np.ndarray
    fvv: np.ndarray


def _catenoid(u, v):
    cu, su, ch, sh = np.cos(u), np.sin(u), np.cosh(v), np.sinh(v)
    return (
        np.array([ch * cu, ch * su, v]),
        np.array([-ch * su, ch * cu, 0.0]),
        np.array([sh * cu, sh * su, 1.0]),
        np.array([-ch * cu, -ch * su, 0.0]),
        np.array([-sh * su, sh * cu, 0.0]),
        np.array([ch * cu, ch * su, 0.0]),
    )


def _helicoid(u, v):
    cu, su, ch, sh = np.cos(u), np.sin(u), np.cosh(v), np.sinh(v)
    return (
        np.array([sh * cu, sh * su, u]),
        np.array([-sh * su, sh * cu, 1.0]),
        np.array([ch * cu, ch * su, 0.0]),
        np.array([-sh * cu, -sh * su, 0.0]),
        np.array([-ch * su, ch * cu, 0.0]),
        np.array([sh * cu, sh * su, 0.0]),
    )


def _enneper(u, v):
    return (
        np.array([u - u**3 / 3 + u * v * v, v - v**3 / 3 + v * u * u, u * u - v * v]),
        np.array([1 - u * u + v * v, 2 * u * v, 2 * u]),
        np.array([2 * u * v, 1 - v * v + u * u, -2 * v]),
        np.array([-2 * u, 2 * v, 2.0]),
        np.array([2 * v, 2 * u, 0.0]),
        np.array([2 * u, -2 * v, -2.0]),
    )


@dataclass(frozen=True, eq=False)
class ConformalHarmonicMap:
    """A parametrized patch x = offset + scale * Q f(u, v) over a parameter rectangle.

    ``Q`` has orthonormal columns, so rescaling, rotating and translating a
    conformal harmonic f keeps it conformal and harmonic.
    """

    tag: str
    raw: Callable = field(repr=False)
    rect: tuple = ((0.0, 1.0), (0.0, 1.0))
    scale: float = 1.0
    offset: np.ndarray = None
    Q: np.ndarray = None

    def __post_init__(self):
        k = len(self.raw(0.5 * sum(self.rect[0]), 0.5 * sum(self.rect[1]))[0])
        Q = np.eye(k) if self.Q is None else np.asarray(self.Q, dtype=float)
        if np.max(np.abs(Q.T @ Q - np.eye(Q.shape[1]))) > 1e-12:
            raise MapError("embedding Q must have orthonormal columns")
        off = np.zeros(Q.shape[0]) if self.offset is None else np.asarray(self.offset, dtype=float)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "offset", off)

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    def __call__(self, u: float, v: float) -> np.ndarray:
        return self.offset + self.scale * (self.Q @ self.raw(u, v)[0])

    def jet(self, u: float, v: float) -> MapJet:
        parts = self.raw(u, v)
        s, Q = self.scale, self.Q
        return MapJet(self.offset + s * (Q @ parts[0]), *(s * (Q @ w) for w in parts[1:]))

    def residuals(self, u: float, v: float) -> tuple[float, float, float]:
        """(|f_uu + f_vv|, ||f_u|^2 - |f_v|^2|, |f_u . f_v|)."""
        j = self.jet(u, v)
        return (
            float(np.linalg.norm(j.fuu + j.fvv)),
            float(abs(j.fu @ j.fu - j.fv @ j.fv)),
            float(abs(j.fu @ j.fv)),
        )

    def check(self, params, tol: float = TOL_MAP) -> None:
        """Raise MapError if harmonicity or conformality fails at any of ``params``."""
        for u, v in params:
            res = self.residuals(u, v)
            if max(res) > tol:
                raise MapError(f"{self.tag} is not conformal harmonic at (u, v) = ({u}, {v}): residuals {res}")

    def samples(self, count: int, seed: int = 0) -> np.ndarray:
        """``count`` uniform random parameter points in the rectangle."""
        rng = np.random.default_rng(seed)
        (u0, u1), (v0, v1) = self.rect
        r = rng.random((count, 2))
        return np.column_stack([u0 + (u1 - u0) * r[:, 0], v0 + (v1 - v0) * r[:, 1]])

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "rect": [list(map(float, r)) for r in self.rect],
            "scale": float(self.scale),
            "offset": self.offset.tolist(),
            "Q": self.Q.tolist(),
        }


def catenoid_patch(scale=1.0, offset=None, rect=((0.0, 2 * np.pi), (-0.5, 0.5)), Q=None) -> ConformalHarmonicMap:
    """(cosh v cos u, cosh v sin u, v)."""
    return ConformalHarmonicMap("catenoid_patch", _catenoid, rect, scale, offset, Q)


def helicoid_patch(scale=1.0, offset=None, rect=((-0.5, 0.5), (-0.5, 0.5)), Q=None) -> ConformalHarmonicMap:
    """(sinh v cos u, sinh v sin u, u)."""
    return ConformalHarmonicMap("helicoid_patch", _helicoid, rect, scale, offset, Q)


def enneper_patch(scale=1.0, offset=None, rect=((-1.0, 1.0), (-1.0, 1.0)), Q=None) -> ConformalHarmonicMap:
    """(u - u^3/3 + u v^2, v - v^3/3 + v u^2, u^2 - v^2)."""
    return ConformalHarmonicMap("enneper_patch", _enneper, rect, scale, offset, Q)


def affine_plane(origin, e1, e2, rect=((-0.5, 0.5), (-0.5, 0.5))) -> ConformalHarmonicMap:
    """origin + u e1 + v e2 for orthonormal e1, e2 (an isometric, hence conformal harmonic, map)."""
    try:
        Q = orthonormalize([e1, e2]).basis
    except RankError as exc:
        raise MapError(f"affine plane needs independent directions: {exc}") from None

    def raw(u, v):
        z = np.zeros(2)
        return np.array([u, v]), np.array([1.0, 0.0]), np.array([0.0, 1.0]), z, z, z

    return ConformalHarmonicMap("affine_plane", raw, rect, 1.0, np.asarray(origin, float), Q)


def with_bump(f: ConformalHarmonicMap, amp: float = 0.05, width: float = 0.2, direction=None) -> ConformalHarmonicMap:
    """f plus a Gaussian bump centred in the rectangle: a non-harmonic negative control."""
    (u0, u1), (v0, v1) = f.rect
    uc, vc = 0.5 * (u0 + u1), 0.5 * (v0 + v1)
    e = np.zeros(f.n) if direction is None else np.asarray(direction, float)
    if direction is None:
        e[-1] = 1.0
    w2 = width * width

    def raw(u, v):
        j = f.jet(u, v)
        du, dv = u - uc, v - vc
        b = amp * np.exp(-(du * du + dv * dv) / w2)
        bu, bv = -2 * du / w2 * b, -2 * dv / w2 * b
        buu = (4 * du * du / w2 - 2) / w2 * b
        bvv = (4 * dv * dv / w2 - 2) / w2 * b
        buv = 4 * du * dv / (w2 * w2) * b
        return (j.point + b * e, j.fu + bu * e, j.fv + bv * e, j.fuu + buu * e, j.fuv + buv * e, j.fvv + bvv * e)

    return ConformalHarmonicMap(f.tag + "+bump", raw, f.rect)


MAP_BUILDERS = {
    "catenoid_patch": catenoid_patch,
    "helicoid_patch": helicoid_patch,
    "enneper_patch": enneper_patch,
}


def default_patches(dom: ImplicitDomain) -> list[ConformalHarmonicMap]:
    """Catalog patches placed inside ball and solid_torus catalog domains."""
    cat = dom.spec.get("catalog", {})
    kind, prm = cat.get("kind"), cat.get("params", {})
    if kind == "ball" and dom.n == 3:
        R = float(prm.get("R", 1.0))
        return [
            catenoid_patch(0.5 * R, rect=((0.0, 2 * np.pi), (-0.5, 0.5))),
            helicoid_patch(0.4 * R, rect=((-1.0, 1.0), (-0.5, 0.5))),
            enneper_patch(0.3 * R),
            affine_plane([0.0, 0.0, 0.0], [R, 0, 0], [0, R, 0], rect=((-0.5 * R, 0.5 * R), (-0.5 * R, 0.5 * R))),
            affine_plane([0.0, 0.0, 0.9 * R], [1, 0, 0], [0, 1, 0], rect=((-0.3 * R, 0.3 * R), (-0.3 * R, 0.3 * R))),
        ]
    if kind == "solid_torus":
        R, r = float(prm.get("R_ring", 2.5)), float(prm.get("r_tube", 1.0))
        vmax = min(0.5 * r / R, np.arccosh(1.0 + 0.5 * r / R))
        return [
            catenoid_patch(R, rect=((0.0, 2 * np.pi), (-vmax, vmax))),
            helicoid_patch(1.0, rect=((-0.5 * r, 0.5 * r), (np.arcsinh(R - 0.5 * r), np.arcsinh(R + 0.5 * r)))),
            enneper_patch(0.3 * r, offset=[R, 0.0, 0.0]),
            affine_plane([R, 0.0, 0.0], [1, 0, 0], [0, 1, 0], rect=((-0.5 * r, 0.5 * r), (-0.5 * r, 0.5 * r))),
            affine_plane([R, 0.0, 0.9 * r], [1, 0, 0], [0, 1, 0], rect=((-0.3 * r, 0.3 * r), (-0.3 * r, 0.3 * r))),
        ]
    raise CatalogError(f"no default minimal patches for domain {dom.name}; pass patches explicitly")


def pullback_laplacian(rho: ScalarField, f: ConformalHarmonicMap, uv, check: bool = True) -> float:
    """Laplacian of rho o f at (u, v) by the chain rule.

    With ``check`` the value is compared with |f_u|^2 * tr_L Hess rho on the
    normalized tangent plane L; a mismatch above 1e-8 (relative) means f is not
    conformal harmonic there and raises MapError.
    """
    u, v = uv
    j = f.jet(u, v)
    H = rho.hessian(j.point)
    chain = float(j.fu @ H @ j.fu + j.fv @ H @ j.fv + rho.gradient(j.point) @ (j.fuu + j.fvv))
    if check:
        conf = conformal_form(H, j)
        if abs(chain - conf) > TOL_MAP * (1.0 + abs(chain)):
            raise MapError(
                f"{f.tag}: chain-rule Laplacian {chain:.6g} != conformal form {conf:.6g} at (u, v) = ({u}, {v})"
            )
    return chain


def conformal_form(H, j: MapJet) -> float:
    """|f_u|^2 times the trace of H on the plane spanned by f_u, f_v."""
    return float(j.fu @ j.fu) * trace_on_plane(H, orthonormalize([j.fu, j.fv]))


def stencil_laplacian(rho: ScalarField, f: ConformalHarmonicMap, uv, h: float = STENCIL_STEP) -> float:
    """Five-point finite-difference Laplacian of rho o f."""
    u, v = uv
    g = lambda a, b: rho.value(f(a, b))  # noqa: E731
    return (g(u + h, v) + g(u - h, v) + g(u, v + h) + g(u, v - h) - 4.0 * g(u, v)) / (h * h)


def _contained(rho, f, params, tol_bd):
    vals = []
    for u, v in params:
        x = f(u, v)
        val = rho.value(x)
        if val > tol_bd:
            raise ImageOutsideDomain(
                f"{f.tag}({u:.6g}, {v:.6g}) = {x.tolist()} lies outside the domain (rho = {val:.3e})",
                witness={"u": float(u), "v": float(v), "point": x.tolist(), "value": float(val)},
            )
        vals.append(val)
    return np.array(vals)


@dataclass
class SweepReport:
    tag: str
    rows: list  # (u, v, rho(f), chain-rule Laplacian, conformal form, stencil Laplacian)
    min_laplacian: float
    argmin_uv: list
    max_conformal_gap: float
    max_stencil_gap: float
    stencil_ok: bool
    map: dict = field(default_factory=dict)

    def to_dict(self, include_rows: bool = False) -> dict:
        d = {
            "tag": self.tag,
            "samples": len(self.rows),
            "min_laplacian": self.min_laplacian,
            "argmin_uv": self.argmin_uv,
            "max_conformal_gap": self.max_conformal_gap,
            "max_stencil_gap": self.max_stencil_gap,
            "stencil_ok": self.stencil_ok,
            "map": self.map,
        }
        if include_rows:
            d["rows"] = [list(r) for r in self.rows]
        return d

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["u", "v", "rho_f", "laplacian", "conformal_form", "stencil"])
        for r in self.rows:
            w.writerow([repr(float(x)) for x in r])
        return buf.getvalue()


def subharmonicity_sweep(
    rho: ScalarField,
    f: ConformalHarmonicMap,
    params=None,
    count: int = 500,
    seed: int = 0,
    stencil_step: float = STENCIL_STEP,
    tol_bd: float = TOL_BD,
) -> SweepReport:
    """Minimum of the pullback Laplacian of rho along f, with stencil and conformal-form cross-checks.

    Raises:
        ImageOutsideDomain: some f(u, v) has rho > tol_bd (witness attached).
        MapError: the conformal-factor identity fails (f not conformal harmonic).
    """
    params = f.samples(count, seed) if params is None else np.asarray(params, dtype=float)
    values = _contained(rho, f, params, tol_bd)

    def one(uv):
        j = f.jet(*uv)
        H = rho.hessian(j.point)
        chain = float(j.fu @ H @ j.fu + j.fv @ H @ j.fv + rho.gradient(j.point) @ (j.fuu + j.fvv))
        return chain, conformal_form(H, j), stencil_laplacian(rho, f, uv, stencil_step)

    out = pmap(one, list(params))
    rows = [(u, v, val, *o) for (u, v), val, o in zip(params, values, out)]
    chain = np.array([r[3] for r in rows])
    conf_gap = np.array([abs(r[3] - r[4]) / (1.0 + abs(r[3])) for r in rows])
    st_gap = np.array([abs(r[3] - r[5]) for r in rows])
    worst = int(np.argmax(conf_gap))
    if conf_gap[worst] > TOL_MAP:
        u, v = params[worst]
        raise MapError(f"{f.tag}: conformal-factor identity fails at (u, v) = ({u}, {v}), gap {conf_gap[worst]:.3e}")
    k = int(np.argmin(chain))
    return SweepReport(
        f.tag,
        rows,
        float(chain[k]),
        params[k].tolist(),
        float(conf_gap.max()),
        float(st_gap.max()),
        bool(st_gap.max() <= TOL_STENCIL),
        f.to_dict(),
    )


def dichotomy_flag(rho: ScalarField, f: ConformalHarmonicMap, params=None, count: int = 500, seed: int = 0,
                   tol_bd: float = TOL_BD) -> dict:
    """Classify f(M) as lying in the interior, in the boundary, or both ("mixed").

    ``mixed`` reports the parameter point where rho o f is largest (the touch point).
    """
    params = f.samples(count, seed) if params is None else np.asarray(params, dtype=float)
    vals = _contained(rho, f, params, tol_bd)
    k = int(np.argmax(vals))
    if vals[k] < -tol_bd:
        flag = "interior"
    elif np.all(np.abs(vals) <= tol_bd):
        flag = "boundary"
    else:
        flag = "mixed"
    return {
        "flag": flag,
        "max_value": float(vals[k]),
        "touch_uv": params[k].tolist(),
        "touch_point": f(*params[k]).tolist(),
    }
