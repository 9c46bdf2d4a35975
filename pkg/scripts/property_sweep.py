"""Randomized property suite over a range of seeds and dimensions."""
import sys

from maslovkit.properties import property_suite

seeds = range(int(sys.argv[1]) if len(sys.argv) > 1 else 3)
bad = 0
for seed in seeds:
    summary = property_suite(seed, trials=20, dims=(1, 2, 3, 4))
    for line in summary.lines():
        print(line)
    bad += len(summary.counterexamples)
print(f"total violations: {bad}")
sys.exit(1 if bad else 0)
