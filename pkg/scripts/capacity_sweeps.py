#!/usr/bin/env python3
"""Regenerate the capacity-bound sweep data sets.

Writes results/fig3_velocity_sweep.csv (capacity vs velocity limit for
d = 1, 2, 3 at micron spacing) and results/fig4_coupling_heatmap.csv
(1D capacity over coupling x squared-speed-limit at millimeter spacing).
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from qram_bounds.cli import fig3_grid, fig4_grid, run_sweep


def main() -> None:
    out_dir = Path(__file__).resolve().parents[1] / "results"
    out_dir.mkdir(exist_ok=True)
    for name, grid in (("fig3_velocity_sweep.csv", fig3_grid()),
                       ("fig4_coupling_heatmap.csv", fig4_grid())):
        path = out_dir / name
        rows = run_sweep(grid, path)
        print(f"wrote {rows} rows to {path}")


if __name__ == "__main__":
    main()
