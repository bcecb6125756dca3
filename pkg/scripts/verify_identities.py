#!/usr/bin/env python3
"""Full exact-rational verification of the constant-curvature identities:
Riemann symmetries, Ricci contraction, the antisymmetric-tensor curvature
sums, and the double Hodge star sign, for 2 <= N <= 5 and all degrees.
"""

import sys

from hodgedec.cli import main

if __name__ == "__main__":
    args = ["verify-tensor", "--max-dim", "5", "--trials", "50", "--seed", "0"]
    if len(sys.argv) > 1:
        args += ["--out", sys.argv[1]]
    sys.exit(main(args))
