"""Conjugate instants on the unit sphere versus integration step.

Exact instants are k*pi; the error should fall with the step until it hits
the localization floor.
"""
import numpy as np

from maslovkit.comparison import run_comparison
from maslovkit.scenario import builtin_model

for step in (4e-2, 2e-2, 1e-2, 5e-3, 2e-3):
    sc = builtin_model("sphere", n=3, interval=(0.0, 3 * np.pi - 0.5), step=step)
    sys = sc.system()
    rep = run_comparison(sys, sc.submanifold_data(), seed=sc.seed)
    ts = np.array([e.t for e in rep.conjugate_events])
    err = np.max(np.abs(ts - np.pi * np.round(ts / np.pi))) if len(ts) else np.nan
    print(f"step={step:7.0e}  events={len(ts)}  max|t-k*pi|={err:.2e}  mu_L0={rep.mu('L0', sys.a, sys.b)}")
