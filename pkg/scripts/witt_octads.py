#!/usr/bin/env python3
"""Dump the 759 octads of the lifted 24-point set as CSV (8 point indices
per row) for cross-checking against external Golay-code data."""

import sys

from ringgeom.cli import main

if __name__ == "__main__":
    args = ["witt", "--format", "csv"]
    if len(sys.argv) > 1:
        args += ["--out", sys.argv[1]]
    sys.exit(main(args))
