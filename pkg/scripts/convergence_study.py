#!/usr/bin/env python3
"""Refinement study of the harmonic regression on the curved ball.

Decomposes the sampled harmonic 1-form on geodesic balls of H^2(-1) at three
resolutions and writes the residual/deficit table to convergence.csv.
"""

import sys

from hodgedec.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "convergence.csv"
    sys.exit(
        main(
            [
                "convergence",
                "--curvature", "1",
                "--radius", "3",
                "--levels", "3",
                "--edge", "0.2",
                "--form", "builtin:dx",
                "--space", "h1",
                "--out", out,
            ]
        )
    )
