#!/usr/bin/env python3
"""Run one of the bundled experiment presets end to end.

Usage: python scripts/run_demo.py fig2 [--scale 1.0] [--out runs]

fig2   1d chemotaxis, learned operator replayed in Cartesian and warped charts
fig3a  2d excitable medium on a warped periodic grid, trained in 1d
fig3b  3d excitable medium with no-flux walls, trained in 1d
fig4   excitable medium on a spherical cap, geographic truth vs stereographic
       learned rollout
"""

import sys

from chartfree.cli import main

if __name__ == "__main__":
    sys.exit(main(["demo"] + sys.argv[1:]))
