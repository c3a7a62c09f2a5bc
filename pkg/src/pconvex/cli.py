"""Command-line front end.

    pconvex analyze    --domain catalog:solid_torus:2.5,1 --p 2 --samples 500 --seed 1
    pconvex synthesize --domain catalog:ball:1 --p 2 --out rho.json
    pconvex verify     --input rho.json
    pconvex transport  --domain catalog:ellipsoid:1,2,3 --t-values -0.2,-0.1,0.05
    pconvex levi       --domain catalog:hartogs_example --t-values -0.05,-0.1
    pconvex harmonic   --domain catalog:solid_torus:2.5,1 --p 2

Exit status: 0 for a certified-positive result, 1 for a negative or
inconclusive one, 2 for errors. Reports are deterministic for a fixed seed
and embed the resolved configuration. ``PCONVEX_THREADS`` caps the number of
worker threads used for sample sweeps.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .distance import DistanceField, curvature_transport_check
from .domains import parse_domain_arg
from .errors import NotPConvex, PConvexError
from .harmonic import default_patches, subharmonicity_sweep
from .levi import levi_degenerate_candidates, levi_level_check
from .pconvexity import certify_boundary, sample_boundary
from .synthesis import (
    SCHEMA_VERSION,
    DefiningFunction,
    GridSpec,
    SynthesisConfig,
    build_grid,
    synthesize,
    verify,
)

COMMANDS = ("analyze", "synthesize", "verify", "transport", "levi", "harmonic")
EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    domain: Optional[str] = None
    input: Optional[str] = None
    p: int = 2
    seed: int = 0
    samples: int = 500
    t_values: list = field(default_factory=lambda: [-0.2, -0.1, -0.05, 0.05])
    grid_interior: int = 2000
    grid_collar: int = 2000
    grid_boundary: int = 500
    map_samples: int = 500
    out: Optional[str] = None
    format: str = "json"

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.command == "verify":
            if not self.input:
                raise ValueError("verify needs --input (a synthesized defining-function record)")
        elif not self.domain:
            raise ValueError(f"{self.command} needs --domain")
        if self.format not in ("json", "csv"):
            raise ValueError(f"format must be json or csv, got {self.format!r}")
        if self.samples < 1 or self.p < 1:
            raise ValueError("samples and p must be positive")


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pconvex", description="p-convexity certification and p-psh synthesis")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--domain", help="catalog:kind:p1,p2 | inline JSON | path to a JSON domain spec")
    ap.add_argument("--input", help="defining-function record (verify)")
    ap.add_argument("--p", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--samples", type=int, help="number of boundary samples")
    ap.add_argument("--t-values", type=_floats, help="comma-separated level offsets, e.g. -0.1,-0.05")
    ap.add_argument("--grid-interior", type=int)
    ap.add_argument("--grid-collar", type=int)
    ap.add_argument("--grid-boundary", type=int)
    ap.add_argument("--map-samples", type=int)
    ap.add_argument("--out", help="output file (default: standard output)")
    ap.add_argument("--format", choices=("json", "csv"))
    ap.add_argument("--config", help="JSON file with RunConfig fields; explicit flags take precedence")
    return ap


def resolve_config(args: argparse.Namespace) -> RunConfig:
    base: dict = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
        unknown = set(base) - {f.name for f in fields(RunConfig)}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    base["command"] = args.command
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None and f.name != "command":
            base[f.name] = v
    cfg = RunConfig(**base)
    cfg.validate()
    return cfg


# -- commands -------------------------------------------------------------------------------


def _grid(cfg: RunConfig) -> GridSpec:
    return GridSpec(cfg.grid_interior, cfg.grid_collar, cfg.grid_boundary, cfg.seed)


def cmd_analyze(cfg: RunConfig, dom):
    S = sample_boundary(dom, cfg.samples, seed=cfg.seed)
    rep = certify_boundary(dom, cfg.p, S)
    status = EXIT_OK if rep.verdict in ("p-convex", "strongly-p-convex") else EXIT_NEGATIVE
    return status, rep.to_dict(), rep.to_csv()


def _synthesis_config(cfg: RunConfig) -> SynthesisConfig:
    return SynthesisConfig(n_certify=cfg.samples, seed=cfg.seed, grid=_grid(cfg))


def cmd_synthesize(cfg: RunConfig, dom):
    try:
        df = synthesize(dom, cfg.p, _synthesis_config(cfg))
    except NotPConvex as exc:
        return EXIT_NEGATIVE, {"error": str(exc), "boundary": exc.report.to_dict() if exc.report else None}, None
    rec = df.to_json()
    status = EXIT_OK if df.certificate["passed"] else EXIT_NEGATIVE
    return status, rec, _flat_csv(df.certificate)


def cmd_verify(cfg: RunConfig, _dom):
    rec = json.loads(Path(cfg.input).read_text())
    if rec.get("kind") != "defining_function":
        raise ValueError(f"{cfg.input} is not a defining-function record")
    rec = rec.get("result", rec)
    df = DefiningFunction.from_json(rec)
    grid = build_grid(df.dom, df.params.c, _grid(cfg))
    cert = verify(df, df.p, grid, seed=cfg.seed)
    status = EXIT_OK if cert["passed"] else EXIT_NEGATIVE
    return status, {"domain": df.dom.to_json(), "params": df.params.to_dict(), "certificate": cert}, _flat_csv(cert)


def cmd_transport(cfg: RunConfig, dom):
    S = sample_boundary(dom, cfg.samples, seed=cfg.seed)
    field_ = dom.exact_delta if dom.exact_delta is not None else DistanceField(dom)
    reports = [curvature_transport_check(dom, q, cfg.t_values, field=field_) for q in S]
    worst = max(r["max_rel_error"] for r in reports)
    tol = 1e-6 if dom.exact_delta is not None else 1e-3
    res = {"max_rel_error": worst, "tolerance": tol, "exact_delta": dom.exact_delta is not None, "points": reports}
    rows = [["x" + str(i + 1) for i in range(dom.n)] + ["t", "max_rel_error", "normal_eigenvalue"]]
    for r in reports:
        for row in r["rows"]:
            rows.append(list(r["point"]) + [row["t"], row["max_rel_error"], row["normal_eigenvalue"]])
    return (EXIT_OK if worst <= tol else EXIT_NEGATIVE), res, _rows_csv(rows)


def cmd_levi(cfg: RunConfig, dom):
    S = sample_boundary(dom, cfg.samples, seed=cfg.seed)
    S = S + levi_degenerate_candidates(dom, S)
    res = levi_level_check(dom, cfg.t_values, S)
    inner = [t for t in cfg.t_values if t < 0]
    ok = res["pseudoconvex"] and res["hypothesis_holds"] and set(inner) <= set(res["strongly_pseudoconvex_levels"])
    rows = [["t", "min_levi", "min_levi_degenerate", "min_slack"]]
    rows += [[r["t"], r["min_levi"], r["min_levi_degenerate"], r["min_slack"]] for r in res["levels"]]
    return (EXIT_OK if ok else EXIT_NEGATIVE), res, _rows_csv(rows)


def cmd_harmonic(cfg: RunConfig, dom):
    df = synthesize(dom, cfg.p, _synthesis_config(cfg))
    sweeps = [subharmonicity_sweep(df.field, f, count=cfg.map_samples, seed=cfg.seed) for f in default_patches(dom)]
    ok = all(s.min_laplacian >= -1e-5 and s.stencil_ok for s in sweeps)
    res = {"params": df.params.to_dict(), "sweeps": [s.to_dict() for s in sweeps]}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["patch", "u", "v", "rho_f", "laplacian", "conformal_form", "stencil"])
    for s in sweeps:
        for r in s.rows:
            w.writerow([s.tag] + [repr(float(x)) for x in r])
    return (EXIT_OK if ok else EXIT_NEGATIVE), res, buf.getvalue()


HANDLERS = {
    "analyze": cmd_analyze,
    "synthesize": cmd_synthesize,
    "verify": cmd_verify,
    "transport": cmd_transport,
    "levi": cmd_levi,
    "harmonic": cmd_harmonic,
}


def _rows_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _flat_csv(d: dict) -> str:
    rows = [["key", "value"]]

    def walk(prefix, v):
        if isinstance(v, dict):
            for k in sorted(v):
                walk(f"{prefix}.{k}" if prefix else k, v[k])
        else:
            rows.append([prefix, json.dumps(v)])

    walk("", d)
    return _rows_csv(rows)


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"not serializable: {type(o).__name__}")


def run(cfg: RunConfig) -> int:
    """Execute one command and write its report; returns the exit status."""
    dom = parse_domain_arg(cfg.domain) if cfg.domain else None
    status, result, table = HANDLERS[cfg.command](cfg, dom)
    if cfg.format == "csv" and table is not None:
        text = table
    else:
        report = {
            "schema_version": SCHEMA_VERSION,
            "command": cfg.command,
            "config": dict(asdict(cfg), domain_spec=dom.to_json() if dom is not None else None),
            "status": status,
            "result": result,
        }
        if cfg.command == "synthesize":
            report["kind"] = "defining_function"
        text = json.dumps(report, sort_keys=True, indent=2, default=_jsonable) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return run(cfg)
    except (PConvexError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"pconvex: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
