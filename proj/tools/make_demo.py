#!/usr/bin/env python3
"""Regenerate the demo dataset under demo/.

Writes three covariate rasters, a region mask, the true intensity raster and
a checkerboard mask, then draws presences from the true intensity with the
`ppm simulate` command so the demo pattern is reproducible from a seed.

usage: tools/make_demo.py [path/to/ppm]
"""
import json
import os
import subprocess
import sys

import numpy as np

NCOLS, NROWS, CELL = 60, 40, 1.0
NODATA = -9999
EXPECTED_N = 600.0
SEED = 20240611

HERE = os.path.dirname(os.path.abspath(__file__))
DEMO = os.path.join(os.path.dirname(HERE), "demo")


def write_grid(path, values, cell=CELL, fmt="{:.4f}"):
    """values[row, col] with row 0 southernmost; np.nan marks nodata."""
    nrows, ncols = values.shape
    with open(path, "w") as f:
        f.write(f"ncols {ncols}\nnrows {nrows}\nxllcorner 0\nyllcorner 0\n")
        f.write(f"cellsize {cell:g}\nNODATA_value {NODATA}\n")
        for row in range(nrows - 1, -1, -1):
            f.write(" ".join(str(NODATA) if np.isnan(v) else fmt.format(v)
                             for v in values[row]) + "\n")


def main():
    os.makedirs(DEMO, exist_ok=True)
    col = np.arange(NCOLS) + 0.5
    row = np.arange(NROWS) + 0.5
    X, Y = np.meshgrid(col * CELL, row * CELL)

    mask = np.ones((NROWS, NCOLS), dtype=bool)
    mask[28:, 45:] = False          # north-east corner outside the region
    mask[:6, :8] = False            # south-west corner outside the region

    temp = np.round(2.0 * X / (NCOLS * CELL) - 1.0 + 0.3 * np.sin(Y / 7.0), 4)
    rain = np.round(Y / (NROWS * CELL) + 0.25 * np.cos(X / 9.0), 4)
    soil = np.round(np.cos(X / 11.0) * np.sin(Y / 5.0), 4)

    eta = 0.8 * temp - 1.2 * temp ** 2 + 1.0 * rain + 0.6 * temp * rain
    lam = np.exp(eta)
    b0 = np.log(EXPECTED_N / (lam[mask].sum() * CELL * CELL))
    lam = np.where(mask, np.exp(b0 + eta), np.nan)

    for name, grid in (("temp", temp), ("rain", rain), ("soil", soil)):
        write_grid(os.path.join(DEMO, f"{name}.asc"), grid)
    write_grid(os.path.join(DEMO, "mask.asc"), np.where(mask, 1.0, np.nan), fmt="{:.0f}")
    write_grid(os.path.join(DEMO, "lambda.asc"), lam, fmt="{:.10g}")

    checker = np.array([[(3 * r + 7 * c) % 5 != 0 for c in range(12)] for r in range(9)])
    checker[6:, 9:] = False
    write_grid(os.path.join(DEMO, "checker.asc"), np.where(checker, 1.0, np.nan),
               cell=2.0, fmt="{:.0f}")

    with open(os.path.join(DEMO, "truth.json"), "w") as f:
        json.dump({"intercept": b0, "temp": 0.8, "temp^2": -1.2, "rain": 1.0,
                   "temp:rain": 0.6, "seed": SEED}, f, indent=2)
        f.write("\n")

    ppm = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(HERE), "build", "tools", "ppm")
    cfg = os.path.join(DEMO, "simulate_truth.json")
    with open(cfg, "w") as f:
        json.dump({"mask": "mask.asc", "simulate": {"intensity": "lambda.asc"},
                   "seed": SEED, "output": "truth_sim"}, f, indent=2)
        f.write("\n")
    subprocess.run([ppm, "simulate", "--config", cfg], check=True)
    sim = os.path.join(DEMO, "truth_sim")
    os.replace(os.path.join(sim, "simulated.csv"), os.path.join(DEMO, "presences.csv"))
    for leftover in os.listdir(sim):
        os.remove(os.path.join(sim, leftover))
    os.rmdir(sim)


if __name__ == "__main__":
    main()
