#!/usr/bin/env python3
# ------------------------------------------------------------------------------
#
#   Copyright 2026 The flexclinch authors
#
#   Licensed under the Apache License, Version 2.0 (the "License");
#   you may not use this file except in compliance with the License.
#   You may obtain a copy of the License at
#
#       http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS,
#   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#   See the License for the specific language governing permissions and
#   limitations under the License.
#
# ------------------------------------------------------------------------------
"""Plot the CSV files the flexclinch CLI writes.

Point it at the directory passed to the CLI's --out flag; it renders one PNG
per recognized file:

  cheat_*.csv          utility and operator profit against the reported
                       coefficient (log x-axis, truth at the center)
  profit_ratio_*.csv   operator profit ratio against the discomfort scale
  epsilon_sweep.csv    measured proportional welfare loss against the price
                       step, with its closed-form ceiling (log-log)
  day_profile.csv      per-slot load with and without demand response
"""

import argparse
import csv
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def read_csv(path: pathlib.Path):
    with path.open(newline="") as handle:
        rows = list(csv.DictReader(handle))
    return rows


def column(rows, name):
    return [float(row[name]) for row in rows]


def plot_cheat(path: pathlib.Path, out_dir: pathlib.Path) -> pathlib.Path:
    rows = read_csv(path)
    omega = column(rows, "omega")
    fig, left = plt.subplots(figsize=(7, 4.5))
    left.set_xscale("log")
    left.plot(omega, column(rows, "utility"), color="tab:blue", label="cheater utility")
    left.set_xlabel("reported discomfort coefficient")
    left.set_ylabel("cheater utility", color="tab:blue")
    right = left.twinx()
    right.plot(omega, column(rows, "profit"), color="tab:red", alpha=0.7,
               label="operator profit")
    right.set_ylabel("operator profit", color="tab:red")
    left.axvline(omega[len(omega) // 2], color="gray", linestyle=":",
                 label="truthful report")
    left.set_title(path.stem.replace("_", " "))
    fig.tight_layout()
    target = out_dir / (path.stem + ".png")
    fig.savefig(target, dpi=130)
    plt.close(fig)
    return target


def plot_profit_ratio(path: pathlib.Path, out_dir: pathlib.Path) -> pathlib.Path:
    rows = read_csv(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(column(rows, "omega_f"), column(rows, "profit_ratio"), marker="o")
    ax.axhline(1.0, color="gray", linestyle=":")
    ax.set_xlabel("discomfort scale factor")
    ax.set_ylabel("profit under the best lie / truthful profit")
    ax.set_title(path.stem.replace("_", " "))
    fig.tight_layout()
    target = out_dir / (path.stem + ".png")
    fig.savefig(target, dpi=130)
    plt.close(fig)
    return target


def plot_epsilon(path: pathlib.Path, out_dir: pathlib.Path) -> pathlib.Path:
    rows = read_csv(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(column(rows, "epsilon"), column(rows, "mean_loss"), marker="o",
              label="measured mean loss")
    ax.loglog(column(rows, "epsilon"), column(rows, "bound"), marker="s",
              linestyle="--", label="closed-form ceiling")
    ax.set_xlabel("price step")
    ax.set_ylabel("proportional welfare loss")
    ax.legend()
    ax.set_title("welfare loss against the price step")
    fig.tight_layout()
    target = out_dir / (path.stem + ".png")
    fig.savefig(target, dpi=130)
    plt.close(fig)
    return target


def plot_day(path: pathlib.Path, out_dir: pathlib.Path) -> pathlib.Path:
    rows = read_csv(path)
    slots = column(rows, "slot")
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.step(slots, column(rows, "load_no_dr"), where="mid", label="baseline load")
    ax.step(slots, column(rows, "load_with_dr"), where="mid",
            label="load with demand response")
    ax.set_xlabel("hour of day")
    ax.set_ylabel("aggregate load (kWh)")
    ax.legend()
    ax.set_title("one simulated day")
    fig.tight_layout()
    target = out_dir / (path.stem + ".png")
    fig.savefig(target, dpi=130)
    plt.close(fig)
    return target


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("results_dir", type=pathlib.Path,
                        help="directory the CLI wrote its CSV files into")
    parser.add_argument("--out", type=pathlib.Path, default=None,
                        help="directory for the PNGs (default: results_dir)")
    args = parser.parse_args()

    out_dir = args.out or args.results_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    rendered = []
    for path in sorted(args.results_dir.glob("*.csv")):
        if path.name.startswith("cheat_"):
            rendered.append(plot_cheat(path, out_dir))
        elif path.name.startswith("profit_ratio_"):
            rendered.append(plot_profit_ratio(path, out_dir))
        elif path.name == "epsilon_sweep.csv":
            rendered.append(plot_epsilon(path, out_dir))
        elif path.name == "day_profile.csv":
            rendered.append(plot_day(path, out_dir))

    if not rendered:
        print(f"no recognized CSV files in {args.results_dir}", file=sys.stderr)
        return 1
    for target in rendered:
        print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
