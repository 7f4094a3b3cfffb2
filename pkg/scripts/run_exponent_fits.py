#!/usr/bin/env python3
"""Run every scaling-exponent verifier at its default desk-scale configuration
and write one merged JSON report."""

import argparse

import numpy as np

from dlab import estimates as E
from dlab.cli import write_report
from dlab.grid import SpectralGrid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="exponent_fits.json")
    args = ap.parse_args()

    g = SpectralGrid(m=32, L=4 * np.pi)
    reports = []

    rep, control = E.verify_unit_maximal()
    reports += [rep.to_dict(), control.to_dict()]

    for p, q in ((2, np.inf), (np.inf, 2), (4, 4)):
        reports.append(E.verify_lateral_dyadic(g, (1.0, 2.0, 4.0), p, q, 1).to_dict())

    reports.append(
        E.verify_local_smoothing(g, (1.0, 2.0, 4.0), (1.0, 2.0, 4.0)).to_dict()
    )
    reports.append(
        E.verify_local_smoothing(
            g, (1.0, 2.0, 4.0), (0.5, 1.0, 2.0), T0=4.0, flow="halfwave"
        ).to_dict()
    )
    reports.append(E.verify_bernstein(SpectralGrid(m=32, L=4.0)).to_dict())

    write_report(args.out, {"reports": reports})
    for r in reports:
        status = "pass" if r["passed"] else "FAIL"
        print(f"[{status}] {r['name']}: slope {r['slope']:.3f} (target {r['predicted']})")
    print(f"-> {args.out}")


if __name__ == "__main__":
    main()
