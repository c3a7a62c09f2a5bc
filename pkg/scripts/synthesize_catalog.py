"""Synthesize and certify p-psh defining functions for the convex-ish catalog domains.

    python3 scripts/synthesize_catalog.py --p 2 --out-dir results/
"""

import argparse
import json
import time
from pathlib import Path

from pconvex import domains
from pconvex.errors import NotPConvex
from pconvex.synthesis import GridSpec, SynthesisConfig, synthesize

TARGETS = [
    ("ball", {"R": 1.0}),
    ("ellipsoid", {"axes": [1.0, 2.0, 3.0]}),
    ("solid_torus", {"R_ring": 2.5, "r_tube": 1.0}),
    ("solid_torus", {"R_ring": 2.0, "r_tube": 1.0}),
    ("solid_torus", {"R_ring": 1.5, "r_tube": 1.0}),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--grid", type=int, nargs=3, default=[2000, 2000, 500], metavar=("INT", "COLLAR", "BD"))
    ap.add_argument("--out-dir", type=Path)
    args = ap.parse_args()
    cfg = SynthesisConfig(grid=GridSpec(*args.grid))
    print(f"{'domain':<34} {'a':>8} {'c':>9} {'eps':>10} {'dbar_min':>10} {'int_min':>10} {'time':>6}")
    for kind, params in TARGETS:
        dom = domains.catalog(kind, params)
        label = f"{kind}{tuple(params.get('axes', params.values()))}"
        t0 = time.perf_counter()
        try:
            df = synthesize(dom, args.p, cfg)
        except NotPConvex as exc:
            print(f"{label:<34} not p-convex: {exc}")
            continue
        c = df.certificate
        print(f"{label:<34} {df.params.a:8.4f} {df.params.c:9.5f} {df.params.eps:10.3e} "
              f"{c['dbar_min']:10.3e} {c['interior_min']:10.3e} {time.perf_counter() - t0:5.1f}s")
        if args.out_dir:
            args.out_dir.mkdir(parents=True, exist_ok=True)
            name = label.replace(" ", "").replace("(", "_").replace(")", "").replace(",", "_")
            (args.out_dir / f"{name}.json").write_text(json.dumps(df.to_json(), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
