"""Median wall time per method over the benchmark grid (thin wrapper over ``compoisson bench``)."""

import sys

from compoisson.cli import main

if __name__ == "__main__":
    argv = sys.argv[1:] or ["--grid", "default"]
    sys.exit(main(["bench", *argv]))
