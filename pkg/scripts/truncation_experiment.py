#!/usr/bin/env python3
"""Cutoff truncation experiment on a large curved ball.

Multiplies the sampled harmonic 1-form by cutoffs phi_R of growing scale and
reports the distances |gamma - phi_R gamma|; they shrink as the cutoff keeps
more of the field.
"""

import sys

from hodgedec.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "truncation.json"
    sys.exit(
        main(
            [
                "truncate",
                "--radii", "1.5,2.0,2.5",
                "--curvature", "1",
                "--radius", "6",
                "--edge", "0.15",
                "--form", "builtin:dx",
                "--space", "h1",
                "--out", out,
            ]
        )
    )
