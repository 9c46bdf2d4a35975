"""Run every scenario under scenarios/ and print a one-line summary per file.

    python3 scripts/run_scenarios.py [--out reports]
"""
import argparse
import glob
import os

from maslovkit.report import run_scenario
from maslovkit.scenario import Scenario

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--out", default=None, help="write each bundle under this directory")
    args = p.parse_args()
    for path in sorted(glob.glob(os.path.join(ROOT, "scenarios", "*.json"))):
        sc = Scenario.load(path)
        bundle = run_scenario(sc)
        meta = bundle.meta
        print(f"{sc.name:14s} regime={meta['regime']:10s} conjugate={len(bundle.events):2d} "
              f"focal={len(bundle.focal_events):2d} t0={meta['t0']} tP={meta['tP']} exit={bundle.exit_code}")
        if args.out:
            bundle.write(os.path.join(args.out, sc.name))


if __name__ == "__main__":
    main()
