#!/usr/bin/env python3
"""Full binary-geometry report: census, projections, stabilizer and the
Steiner system, printed in the text format."""

import sys

from ringgeom.cli import main

if __name__ == "__main__":
    rc = main(["m10", "--census", "--zerosum", "--projections",
               "--stabilizer", "--witt", "--format", "text"] + sys.argv[1:])
    sys.exit(rc)
