#!/usr/bin/env python3
"""Launcher so the renderer runs as `python plot.py <kind> <input> <outdir>`
without installing the package."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent / "src"))

from spillover_plots.render import main

if __name__ == "__main__":
    sys.exit(main())
