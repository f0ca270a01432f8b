#!/usr/bin/env python3
"""Recover designed roughness exponents from the annulus coefficients.

For cusp fields the exponent is read off at the singular point; for the
lacunary cosine sums it is read off the mean over all centers.

Example:
    python scripts/run_regularity_sweep.py --n 8192
"""

import argparse
import json
import sys

from msq.coeffs import make_ladder
from msq.corpus import CorpusSpec, generate, roughness_exponent
from msq.field import make_grid


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=8192)
    ap.add_argument("--gammas", default="0.3,0.5,0.7")
    ap.add_argument("--betas", default="0.3,0.5")
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    grid = make_grid(1, args.n, 1.0)
    ladder = make_ladder(grid, top_radius=1.0 / 8.0)
    rows = []
    print(f"{'family':<14}{'target':>8}{'slope':>10}{'rel err':>10}")
    for gamma in (float(t) for t in args.gammas.split(",")):
        f = generate(CorpusSpec(family="cusp", grid=grid, gamma=gamma))
        slope = roughness_exponent(f, ladder, center=(args.n // 2,))
        rows.append({"family": "cusp", "target": gamma, "slope": slope})
        print(f"{'cusp':<14}{gamma:>8}{slope:>10.4f}{abs(slope - gamma) / gamma:>10.3f}")
    for beta_w in (float(t) for t in args.betas.split(",")):
        f = generate(
            CorpusSpec(family="weierstrass", grid=grid, beta_w=beta_w, levels=8)
        )
        slope = roughness_exponent(f, ladder)
        rows.append({"family": "weierstrass", "target": beta_w, "slope": slope})
        print(f"{'weierstrass':<14}{beta_w:>8}{slope:>10.4f}{abs(slope - beta_w) / beta_w:>10.3f}")

    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"n": args.n, "rows": rows}, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
