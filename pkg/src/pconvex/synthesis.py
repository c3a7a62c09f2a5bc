"""Construction of a p-plurisubharmonic defining function for a p-convex domain.

The defining function is

    rho~(x) = phi(h(delta(x))) + eps * chi(delta(x)) * |x|^2

where delta is the signed distance, h(t) = (exp(a t) - 1) / a convexifies
the normal direction, phi freezes the function to the constant 2c/3 deep
inside (h <= c) and is the identity near the boundary (h >= c/2), and the
cutoff chi (1 for delta <= c/3, 0 for delta >= c/6) adds a small strictly
p-psh term away from the boundary.

Pipeline: certify the boundary, choose a from the curvatures, probe the
collar to choose c, build a verification grid, pick eps by halving, verify.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass
from dataclasses import field as dc_field
from math import exp, log
from typing import Callable, Optional

import numpy as np

from .distance import (
    DistanceField,
    principal_curvatures,
    project,
    restricted_eigenvalues,
    second_order_ok,
)
from .domains import ImplicitDomain, from_spec
from .errors import (
    ConstructionError,
    DegenerateGradient,
    NotOnBoundary,
    NotPConvex,
    ProjectionError,
)
from .fields import ScalarField
from .linalg import eigh, min_trace_p, partial_sums, random_frame, trace_on_plane
from .parallel import pmap
from .pconvexity import certify_boundary, sample_boundary

SCHEMA_VERSION = 1
TOL_CERT = 1e-6


# -- one-dimensional profiles --------------------------------------------------------------


@dataclass(frozen=True)
class Profile:
    """A C^2 function of one variable with its first two derivatives."""

    name: str
    f: Callable[[float], float]
    df: Callable[[float], float]
    ddf: Callable[[float], float]

    def __call__(self, t: float) -> float:
        return self.f(t)

    def jet(self, t: float) -> tuple[float, float, float]:
        return self.f(t), self.df(t), self.ddf(t)


def smoothstep(u: float) -> float:
    """Quintic smoothstep 6u^5 - 15u^4 + 10u^3, clamped to [0, 1] outside the unit interval."""
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u))


def smoothstep_d1(u: float) -> float:
    if u <= 0.0 or u >= 1.0:
        return 0.0
    return 30.0 * u * u * (1.0 - u) ** 2


def smoothstep_d2(u: float) -> float:
    if u <= 0.0 or u >= 1.0:
        return 0.0
    return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)


def smoothstep_integral(u: float) -> float:
    """Antiderivative of the smoothstep vanishing at 0 (equals u - 1/2 for u >= 1)."""
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return u - 0.5
    return u**4 * (2.5 + u * (-3.0 + u))


def h_func(a: float) -> Profile:
    """h(t) = (exp(a t) - 1) / a, so h(0) = 0, h'(0) = 1, h'' = a h' > 0."""
    if not a > 0.0:
        raise ConstructionError(f"h needs a > 0, got {a}")
    return Profile(
        f"h[a={a:g}]",
        lambda t: (exp(a * t) - 1.0) / a,
        lambda t: exp(a * t),
        lambda t: a * exp(a * t),
    )


def h_inverse(a: float, y: float) -> float:
    """Inverse of h; needs 1 + a y > 0."""
    if 1.0 + a * y <= 0.0:
        raise ConstructionError(f"h^-1({y}) undefined for a = {a}")
    return log(1.0 + a * y) / a


def phi_func(c: float, check_points: int = 10_000) -> Profile:
    """Convex, non-decreasing phi with phi = 2c/3 on (-inf, c] and phi(t) = t on [c/2, inf).

    phi' is a quintic smoothstep that rises from 0 to 1 over the last two
    thirds of [c, c/2]; on the first third phi stays at 2c/3. The average of
    phi' over [c, c/2] is then 1/3, which is exactly what phi(c/2) = c/2
    requires. The result is C^3.

    Raises:
        ConstructionError: if c >= 0 or the sampled convexity check fails.
    """
    if not c < 0.0:
        raise ConstructionError(f"phi needs c < 0, got {c}")
    L = -0.5 * c  # length of [c, c/2]
    k = 1.5 / L  # du/dt

    def u_of(t):
        return 1.5 * (t - c) / L - 0.5

    def f(t):
        if t >= 0.5 * c:
            return t
        return 2.0 * c / 3.0 + smoothstep_integral(u_of(t)) / k

    def df(t):
        return 1.0 if t >= 0.5 * c else smoothstep(u_of(t))

    def ddf(t):
        return 0.0 if t >= 0.5 * c else k * smoothstep_d1(u_of(t))

    prof = Profile(f"phi[c={c:g}]", f, df, ddf)
    ts = np.linspace(2.0 * c, 1.0, check_points)
    d1 = np.array([df(t) for t in ts])
    d2 = np.array([ddf(t) for t in ts])
    if d2.min() < -1e-10 or d1.min() < 0.0 or d1.max() > 1.0:
        raise ConstructionError("phi failed the sampled convexity / monotonicity check")
    return prof


def chi_profile(c: float) -> Profile:
    """Cutoff in delta-units: 1 for delta <= c/3, 0 for delta >= c/6, smoothstep in between."""
    if not c < 0.0:
        raise ConstructionError(f"chi needs c < 0, got {c}")
    lo, hi = c / 6.0, c / 6.0 - c / 3.0  # u = (c/6 - delta) / (c/6 - c/3)
    k = -1.0 / hi

    return Profile(
        f"chi[c={c:g}]",
        lambda d: smoothstep((lo - d) / hi),
        lambda d: k * smoothstep_d1((lo - d) / hi),
        lambda d: k * k * smoothstep_d2((lo - d) / hi),
    )


def chi_func(dom: ImplicitDomain, c: float, delta: Optional[ScalarField] = None) -> ScalarField:
    """x -> chi(delta(x)) as a ScalarField with chain-rule derivatives."""
    delta = DistanceField(dom) if delta is None else delta
    chi = chi_profile(c)

    def grad(x):
        return chi.df(delta.value(x)) * delta.gradient(x)

    def hess(x):
        d = delta.value(x)
        g = delta.gradient(x)
        return chi.ddf(d) * np.outer(g, g) + chi.df(d) * delta.hessian(x)

    return ScalarField(dom.n, lambda x: chi(delta.value(x)), grad, hess, name=chi.name)


def composite_hessian(h: Profile, delta: ScalarField, x) -> np.ndarray:
    """Hess(h o delta)(x) = h'(delta) Hess(delta) + h''(delta) grad(delta) grad(delta)^T."""
    d = delta.value(x)
    g = delta.gradient(x)
    return h.df(d) * delta.hessian(x) + h.ddf(d) * np.outer(g, g)


# -- parameters -----------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Stratified verification samples of the closed domain."""

    n_interior: int = 2000
    n_collar: int = 2000
    n_boundary: int = 500
    seed: int = 0


@dataclass(frozen=True)
class SynthesisConfig:
    """Knobs of the synthesis pipeline (everything that is not derived from the domain)."""

    margin_a: float = 0.1
    n_certify: int = 500
    n_probe: int = 50
    probe_steps: int = 40
    probe_fraction: float = 0.5  # ladder goes down to this fraction of the smallest box width
    c_factor: float = 0.25
    eps0: float = 1.0
    max_halvings: int = 40
    tol_cert: float = TOL_CERT
    exact_delta: bool = True
    seed: int = 0
    grid: GridSpec = dc_field(default_factory=GridSpec)


@dataclass(frozen=True)
class SynthesisParams:
    """The parameters that pin down rho~ for a given domain."""

    a: float
    c: float
    eps: float
    margin_a: float = 0.1
    collar_depth: float = 0.0
    grid: GridSpec = dc_field(default_factory=GridSpec)
    exact_delta: bool = True

    def __post_init__(self):
        if not (self.a > 0.0 and self.c < 0.0 and self.eps >= 0.0):
            raise ConstructionError(f"need a > 0, c < 0, eps >= 0; got a={self.a}, c={self.c}, eps={self.eps}")

    @property
    def chi_transition(self) -> tuple[float, float]:
        return (self.c / 3.0, self.c / 6.0)

    @property
    def delta_deep(self) -> float:
        """delta below which h(delta) <= c and rho~ is 2c/3 + eps |x|^2."""
        return h_inverse(self.a, self.c)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["chi_transition"] = list(self.chi_transition)
        d["delta_deep"] = self.delta_deep
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SynthesisParams":
        keys = ("a", "c", "eps", "margin_a", "collar_depth", "exact_delta")
        return cls(**{k: d[k] for k in keys if k in d}, grid=GridSpec(**d.get("grid", {})))


# -- the composite field --------------------------------------------------------------------


@dataclass(frozen=True)
class Jet:
    """rho~ = base + eps * pert, with value, gradient and Hessian of both parts."""

    base: tuple
    pert: tuple
    deep: bool
    delta: Optional[float]

    def combine(self, eps: float):
        return tuple(None if b is None else b + eps * q for b, q in zip(self.base, self.pert))

    def hessian(self, eps: float) -> np.ndarray:
        return self.base[2] + eps * self.pert[2]


class CompositeField(ScalarField):
    """rho~ = phi(h(delta)) + eps chi(delta) |x|^2 with chain-rule gradient and Hessian."""

    def __init__(self, dom: ImplicitDomain, params: SynthesisParams, delta: Optional[ScalarField] = None):
        self.dom = dom
        self.params = params
        if delta is None:
            use_exact = params.exact_delta and dom.exact_delta is not None
            delta = dom.exact_delta if use_exact else DistanceField(dom)
        self.delta = delta
        self.h = h_func(params.a)
        self.phi = phi_func(params.c)
        self.chi = chi_profile(params.c)
        self.delta_deep = params.delta_deep
        super().__init__(
            dom.n,
            lambda x: self.jet(x, 0).combine(self.params.eps)[0],
            lambda x: self.jet(x, 1).combine(self.params.eps)[1],
            lambda x: self.jet(x, 2).combine(self.params.eps)[2],
            name=f"rho~[{dom.name}]",
        )

    def with_eps(self, eps: float) -> "CompositeField":
        p = SynthesisParams(**{**asdict(self.params), "eps": eps, "grid": self.params.grid})
        return CompositeField(self.dom, p, self.delta)

    def _is_deep(self, x):
        """True when delta(x) <= delta_deep is certain; otherwise returns the signed distance."""
        r = self.dom.rho0.value(x)
        if r < 0.0 and -r / self.dom.gradient_bound >= -self.delta_deep:
            return True, None
        try:
            d = self.delta.value(x)
        except ProjectionError:
            if r < 0.0:
                # beyond the probed collar, which reaches far below delta_deep
                return True, None
            raise
        return d <= self.delta_deep, d

    def jet(self, x, order: int = 2) -> Jet:
        """Value (order 0), gradient (1) and Hessian (2) of both parts; higher orders left as None."""
        x = np.asarray(x, dtype=float)
        n = len(x)
        r2 = float(x @ x)
        deep, d = self._is_deep(x)
        if deep:
            c = self.params.c
            return Jet((2.0 * c / 3.0, np.zeros(n), np.zeros((n, n))), (r2, 2.0 * x, 2.0 * np.eye(n)), True, d)
        hv, h1, h2 = self.h.jet(d)
        F, p1, p2 = self.phi.jet(hv)
        X, X1, X2 = self.chi.jet(d)
        g = self.delta.gradient(x) if order >= 1 else None
        Hd = self.delta.hessian(x) if order >= 2 else None
        base = [F, None, None]
        pert = [X * r2, None, None]
        if order >= 1:
            F1 = p1 * h1
            base[1] = F1 * g
            pert[1] = X1 * r2 * g + 2.0 * X * x
        if order >= 2:
            nn = np.outer(g, g)
            base[2] = F1 * Hd + (p2 * h1 * h1 + p1 * h2) * nn
            xg = np.outer(g, x)
            pert[2] = X2 * r2 * nn + X1 * r2 * Hd + 2.0 * X1 * (xg + xg.T) + 2.0 * X * np.eye(n)
        return Jet(tuple(base), tuple(pert), False, d)


# -- pipeline steps -------------------------------------------------------------------------


def choose_a(dom: ImplicitDomain, samples, margin_a: float = 0.1, p: int = 2) -> float:
    """a = max(0, -min over samples of (nu_1 + ... + nu_{p-1})) + margin_a.

    For p = 2 this is max(0, -min nu_1) + margin_a. ``samples`` are boundary
    points or objects with a ``curvatures`` attribute.
    """
    worst = np.inf
    for s in samples:
        nu = s.curvatures if hasattr(s, "curvatures") else principal_curvatures(dom, s).principal_curvatures
        worst = min(worst, partial_sums(nu, max(p - 1, 1)) if p > 1 else 0.0)
    return max(0.0, -worst) + margin_a


def probe_collar(dom: ImplicitDomain, boundary_points, steps: int = 40, fraction: float = 0.5) -> float:
    """Largest ladder depth d such that every probe q - s n(q), s <= d, projects back to q.

    The ladder is d_k = d_max k / steps with d_max = fraction * (smallest box
    width). A probe passes when the projection converges to its own foot q
    and the second-order test 1 - s nu_i(q) > 0 holds.

    Raises:
        ProjectionError: if even the first rung fails.
    """
    d_max = fraction * float(np.min(dom.bbox[:, 1] - dom.bbox[:, 0]))
    feet = []
    for q in boundary_points:
        bp = principal_curvatures(dom, q)
        feet.append((bp.point, bp.normal, bp.principal_curvatures))
    best = 0.0
    for k in range(1, steps + 1):
        d = d_max * k / steps
        for q, nrm, nu in feet:
            if not second_order_ok(nu, -d):
                return _collar_result(best, dom)
            try:
                pr = project(dom, q - d * nrm)
            except ProjectionError:
                return _collar_result(best, dom)
            if np.linalg.norm(pr.foot - q) > 1e-6 * (1.0 + d):
                return _collar_result(best, dom)
        best = d
    return best


def _collar_result(best, dom):
    if best <= 0.0:
        raise ProjectionError(f"collar of {dom.name} is thinner than the first probe depth")
    return best


def choose_c(a: float, depth: float, factor: float = 0.25) -> float:
    """c = -factor * depth, shrunk until 1 + a c > 0 and h^-1(c) stays within half the probed depth."""
    c = -factor * depth
    for _ in range(200):
        if 1.0 + a * c > 0.0 and h_inverse(a, c) >= -0.5 * depth:
            return c
        c *= 0.8
    raise ConstructionError("could not fit the phi transition inside the collar")


@dataclass
class Grid:
    interior: np.ndarray
    collar: np.ndarray
    boundary: np.ndarray
    spec: GridSpec

    def all_points(self) -> np.ndarray:
        return np.vstack([self.interior, self.collar, self.boundary])

    def labels(self) -> list[str]:
        return ["interior"] * len(self.interior) + ["collar"] * len(self.collar) + ["boundary"] * len(self.boundary)


def build_grid(dom: ImplicitDomain, c: float, spec: GridSpec = GridSpec()) -> Grid:
    """Interior points by rejection from the box, collar points at depth in (0, |c|], boundary samples."""
    rng = np.random.default_rng(spec.seed)
    lo, hi = dom.bbox[:, 0], dom.bbox[:, 1]
    interior = []
    while len(interior) < spec.n_interior:
        for x in lo + (hi - lo) * rng.random((max(64, spec.n_interior), dom.n)):
            if dom.rho0.value(x) < 0.0:
                interior.append(x)
                if len(interior) == spec.n_interior:
                    break
    collar = []
    for q in sample_boundary(dom, spec.n_collar, seed=spec.seed + 1):
        g = dom.rho0.gradient(q)
        s = -c * (1.0 - rng.random())
        collar.append(q - s * g / np.linalg.norm(g))
    boundary = sample_boundary(dom, spec.n_boundary, seed=spec.seed + 2)
    shape = (0, dom.n)
    return Grid(
        np.array(interior).reshape(-1, dom.n) if interior else np.empty(shape),
        np.array(collar).reshape(-1, dom.n) if collar else np.empty(shape),
        np.array(boundary).reshape(-1, dom.n) if boundary else np.empty(shape),
        spec,
    )


def grid_jets(field: CompositeField, grid: Grid) -> list[Optional[Jet]]:
    def one(x):
        try:
            return field.jet(x)
        except (ProjectionError, ArithmeticError):
            return None

    return pmap(one, list(grid.all_points()))


def _batched_min_trace(H: np.ndarray, p: int) -> np.ndarray:
    return np.sort(np.linalg.eigvalsh(H), axis=1)[:, :p].sum(axis=1)


def choose_epsilon(
    dom: ImplicitDomain,
    p: int,
    field: CompositeField,
    grid: Grid,
    eps0: float = 1.0,
    max_halvings: int = 40,
    tol_cert: float = TOL_CERT,
    jets=None,
) -> float:
    """Largest eps = eps0 2^-k (k = 0..max_halvings) making rho~ strictly p-psh on the interior grid.

    Acceptance: min over interior samples of min_trace_p > 0 and min over
    collar and boundary samples >= -tol_cert. Returns 0.0 with a warning when
    no candidate passes.
    """
    jets = grid_jets(field, grid) if jets is None else jets
    labels = grid.labels()
    keep = [i for i, j in enumerate(jets) if j is not None]
    Hb = np.array([jets[i].base[2] for i in keep]).reshape(-1, dom.n, dom.n)
    Hc = np.array([jets[i].pert[2] for i in keep]).reshape(-1, dom.n, dom.n)
    is_int = np.array([labels[i] == "interior" for i in keep], dtype=bool)
    for k in range(max_halvings + 1):
        eps = eps0 * 2.0**-k
        vals = _batched_min_trace(Hb + eps * Hc, p)
        int_ok = not is_int.any() or vals[is_int].min() > 0.0
        col_ok = is_int.all() or vals[~is_int].min() >= -tol_cert
        if int_ok and col_ok:
            return eps
    warnings.warn(f"no eps in eps0 * 2^-k, k <= {max_halvings}, passed on {dom.name}", RuntimeWarning)
    return 0.0


def verify(df: "DefiningFunction", p: int, grid: Optional[Grid] = None, jets=None, seed: int = 0) -> dict:
    """Grid certificate for rho~: minima of min_trace_p(Hess rho~) by stratum and a random-frame spot check."""
    field = df.field
    grid = df.grid if grid is None else grid
    if jets is None:
        jets = grid_jets(field, grid)
    eps = field.params.eps
    labels = grid.labels()
    pts = grid.all_points()
    vals = np.full(len(pts), np.nan)
    values = np.full(len(pts), np.nan)
    grad_norms = np.full(len(pts), np.nan)
    for i, j in enumerate(jets):
        if j is None:
            continue
        v, g, H = j.combine(eps)
        vals[i] = min_trace_p(H, p)
        values[i] = v
        grad_norms[i] = np.linalg.norm(g)

    def stratum(names):
        idx = [i for i, lab in enumerate(labels) if lab in names and np.isfinite(vals[i])]
        if not idx:
            return None, None
        k = min(idx, key=lambda i: vals[i])
        return float(vals[k]), pts[k].tolist()

    dbar_min, dbar_arg = stratum({"interior", "collar", "boundary"})
    int_min, int_arg = stratum({"interior"})
    inside_min, _ = stratum({"interior", "collar"})
    col_min, _ = stratum({"collar"})
    bd_min, _ = stratum({"boundary"})
    # spot check: random frames at the global argmin never beat the eigenvalue formula
    spot = None
    if dbar_arg is not None:
        H = field.hessian(np.array(dbar_arg))
        formula = min_trace_p(H, p)
        rng = np.random.default_rng(seed)
        if p < field.n:
            frame_min = min(trace_on_plane(H, random_frame(field.n, p, rng)) for _ in range(1000))
            eig_frame = trace_on_plane(H, eigh(H).eigenvectors[:, :p])
        else:  # the only n-plane is R^n itself
            frame_min = eig_frame = float(np.trace(H))
        spot = {
            "formula": formula,
            "random_frame_min": float(frame_min),
            "eigenframe_trace": float(eig_frame),
            "ok": bool(frame_min >= formula - 1e-8 and abs(eig_frame - formula) <= 1e-8),
        }
    is_bd = np.array([lab == "boundary" for lab in labels])
    inside = np.array([lab != "boundary" for lab in labels])
    fin = np.isfinite(values)
    sign_ok = bool(np.all(values[inside & fin] < 0.0))
    bd_abs = float(np.max(np.abs(values[is_bd & fin]))) if np.any(is_bd & fin) else 0.0
    bd_grad = float(np.min(grad_norms[is_bd & fin])) if np.any(is_bd & fin) else None
    strict_expected = not df.p_flat
    passed = (
        dbar_min is not None
        and dbar_min >= -TOL_CERT
        and (int_min is None or int_min > 0.0 or not strict_expected)
    )
    return {
        "p": p,
        "eps": eps,
        "dbar_min": dbar_min,
        "dbar_argmin": dbar_arg,
        "interior_min": int_min,
        "interior_argmin": int_arg,
        "inside_min": inside_min,
        "collar_min": col_min,
        "boundary_min": bd_min,
        "counts": {
            "interior": len(grid.interior),
            "collar": len(grid.collar),
            "boundary": len(grid.boundary),
            "skipped": int(np.sum(~np.isfinite(vals))),
        },
        "deep_points": int(sum(1 for j in jets if j is not None and j.deep)),
        "sign_ok": sign_ok,
        "boundary_max_abs_value": bd_abs,
        "boundary_min_grad_norm": bd_grad,
        "strict_expected": strict_expected,
        "spot_check": spot,
        "grid": asdict(grid.spec),
        "passed": bool(passed),
    }


@dataclass
class DefiningFunction:
    """The synthesized rho~ together with how it was obtained and its certificate."""

    dom: ImplicitDomain
    p: int
    params: SynthesisParams
    field: CompositeField
    certificate: dict = dc_field(default_factory=dict)
    boundary: dict = dc_field(default_factory=dict)
    p_flat: bool = False
    grid: Optional[Grid] = None

    def __call__(self, x) -> float:
        return self.field.value(x)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "defining_function",
            "domain": self.dom.to_json(),
            "p": self.p,
            "params": self.params.to_dict(),
            "boundary": self.boundary,
            "certificate": self.certificate,
        }

    @classmethod
    def from_json(cls, record: dict) -> "DefiningFunction":
        """Rebuild rho~ exactly from an exported record (no re-verification)."""
        dom = from_spec(record["domain"])
        params = SynthesisParams.from_dict(record["params"])
        return cls(
            dom,
            int(record["p"]),
            params,
            CompositeField(dom, params),
            dict(record.get("certificate", {})),
            dict(record.get("boundary", {})),
            bool(record.get("boundary", {}).get("p_flat_count", 0)),
        )


def synthesize(dom: ImplicitDomain, p: int, config: Optional[SynthesisConfig] = None) -> DefiningFunction:
    """Build and certify rho~ for a p-convex domain.

    Raises:
        NotPConvex: if the boundary certification does not come out p-convex.
        ProjectionError: if the collar is too thin to probe.
    """
    cfg = SynthesisConfig() if config is None else config
    samples = sample_boundary(dom, cfg.n_certify, seed=cfg.seed)
    report = certify_boundary(dom, p, samples, tol_cert=cfg.tol_cert)
    if report.verdict not in ("p-convex", "strongly-p-convex"):
        raise NotPConvex(f"{dom.name} is {report.verdict} for p={p} (min s_p = {report.min_sp:.6g})", report)
    a = choose_a(dom, report.samples, cfg.margin_a, p)
    depth = probe_collar(dom, samples[: cfg.n_probe], cfg.probe_steps, cfg.probe_fraction)
    c = choose_c(a, depth, cfg.c_factor)
    params = SynthesisParams(a, c, cfg.eps0, cfg.margin_a, depth, cfg.grid, cfg.exact_delta)
    field0 = CompositeField(dom, params)
    grid = build_grid(dom, c, cfg.grid)
    jets = grid_jets(field0, grid)
    eps = choose_epsilon(dom, p, field0, grid, cfg.eps0, cfg.max_halvings, cfg.tol_cert, jets=jets)
    field1 = field0.with_eps(eps)
    boundary = {
        "verdict": report.verdict,
        "min_sp": report.min_sp,
        "argmin_point": report.witness.tolist(),
        "sample_count": len(report.samples),
        "p_flat_count": len(report.p_flat_points),
    }
    df = DefiningFunction(dom, p, field1.params, field1, {}, boundary, bool(report.p_flat_points), grid)
    df.certificate = verify(df, p, grid, jets=jets, seed=cfg.seed)
    return df


def level_set_family_check(
    dom: ImplicitDomain,
    p: int,
    t_values,
    samples,
    field: Optional[ScalarField] = None,
) -> dict:
    """min s_p over the level sets {delta = t}, reached by marching inward from boundary samples.

    At t = 0 the boundary curvatures are used directly; for t != 0 the
    Hessian of delta at q + t n(q) is restricted to n(q)^perp.
    """
    field = DistanceField(dom) if field is None else field
    pts = [np.asarray(getattr(s, "point", s), dtype=float) for s in samples]
    bps = [principal_curvatures(dom, q) for q in pts]
    rows = []
    for t in t_values:
        t = float(t)

        def one(bp):
            if t == 0.0:
                return partial_sums(bp.principal_curvatures, p)
            try:
                H = field.hessian(bp.point + t * bp.normal)
            except ProjectionError:
                return None
            return partial_sums(restricted_eigenvalues(H, bp.normal), p)

        vals = pmap(one, bps)
        ok = [(i, v) for i, v in enumerate(vals) if v is not None]
        i, v = min(ok, key=lambda z: z[1])
        rows.append({"t": t, "min_sp": float(v), "argmin_point": (bps[i].point + t * bps[i].normal).tolist(),
                     "evaluated": len(ok)})
    order = sorted(rows, key=lambda r: -r["t"])  # t decreasing: moving inward
    steps = [b["min_sp"] - a["min_sp"] for a, b in zip(order, order[1:])]
    return {
        "p": p,
        "rows": rows,
        "min_step": min(steps) if steps else None,
        "monotone": all(s >= -1e-6 for s in steps),
    }
