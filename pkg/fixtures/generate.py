"""Regenerate the bundled example series from the builtin scenarios.

The files are model reconstructions at the published parameter values,
sampled yearly and rounded, standing in for the original survey data
which is not publicly tabulated.
"""

import csv
from pathlib import Path

import numpy as np

from plckit import BUILTIN_SCENARIOS, assemble

HERE = Path(__file__).parent


def write(name, years, values, digits):
    with open(HERE / name, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(years, values):
            w.writerow([int(t), format(round(float(v), digits), f".{digits}f")])


def yearly(series, years):
    return np.interp(years, series.times, series.values)


def main():
    for name, price_years in (("bw_tv", 13), ("colour_tv", 13)):
        sc = BUILTIN_SCENARIOS[name]
        comp = assemble(sc, 33.0, 0.05)
        years = sc.launch_year + np.arange(33)
        pen = yearly(comp["bass_adopters"], years) + yearly(
            comp["gompertz_adopters"], years
        )
        write(f"{name}_penetration.csv", years, pen, 3)
        t = np.arange(price_years)
        pm = sc.pm_over_p0
        price = pm + (1.0 - pm) * np.exp(-sc.a * t)
        write(f"{name}_price.csv", sc.launch_year + t, price, 4)
    for name in ("mb_c_class", "mb_s_class"):
        sc = BUILTIN_SCENARIOS[name]
        comp = assemble(sc, 33.0, 0.05)
        years = sc.launch_year + np.arange(33)
        sales = sc.market_size * yearly(comp["total"], years)
        write(f"{name.removeprefix('mb_')}_sales.csv", years, sales, 0)


if __name__ == "__main__":
    main()
