#!/usr/bin/env python3
"""Run the full verification suite over the standard small algebras and
write one JSON report per algebra next to this script."""

import pathlib
import sys

from ringgeom.cli import main

ALGEBRAS = ["CD(F2,0)", "CD(F3,0)", "F4", "CD(F3,-1)"]


if __name__ == "__main__":
    out_dir = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 \
        else pathlib.Path(".")
    status = 0
    for expr in ALGEBRAS:
        out = out_dir / ("verify_%s.json" % expr.replace("(", "_")
                         .replace(")", "").replace(",", "_"))
        rc = main(["verify-all", "--algebra", expr, "--out", str(out),
                   "--format", "json"])
        print("%-12s -> %s (exit %d)" % (expr, out, rc))
        status = status or rc
    sys.exit(status)
