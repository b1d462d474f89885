#!/usr/bin/env python3
"""Point and plane zoom limits on the bundled mass-shell model, written as CSV and a log-log SVG."""

import argparse
import csv
from pathlib import Path

import numpy as np

from emtransfer.bounds import (
    corollary_plane_limit, corollary_point_limit, far_plane_offset, far_point, gaussian_hat, generic_plane_offset,
    generic_point,
)
from emtransfer.plots import svg_loglog
from emtransfer.toymodel import G_t, bundled_mass_shell, random_field


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/decay")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--k", type=float, default=1.0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    model = bundled_mass_shell()
    b = random_field(model, rng)
    g = G_t(1.0)
    normal = np.array([0.0, 1.0, 0.0, 0.0])
    curves = {
        "point, generic q": corollary_point_limit(b, args.k, generic_point(model, rng), 0.5, g),
        "point, q far away": corollary_point_limit(b, args.k, far_point(model), 0.5, g, phi_hat=gaussian_hat(1.0)),
        "plane, generic r": corollary_plane_limit(b, args.k, normal, generic_plane_offset(model, normal, rng), g),
        "plane, r far away": corollary_plane_limit(b, args.k, normal, far_plane_offset(model, normal), g),
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "curves.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["curve", "gamma", "value"])
        for label, c in curves.items():
            w.writerows([label, x, y] for x, y in zip(c.gammas, c.values))
    svg = svg_loglog([{"label": k, "x": c.gammas, "y": c.values} for k, c in curves.items()],
                     title="zoom limits", ylabel="weighted norm")
    (out / "curves.svg").write_text(svg)
    for label, c in curves.items():
        print(f"{label:20s} final/initial = {c.final_over_initial:.2e}  {'PASS' if c.passed else 'FAIL'}")


if __name__ == "__main__":
    main()
