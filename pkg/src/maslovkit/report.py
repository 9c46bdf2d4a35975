"""Run a scenario end to end and write its report bundle.

Files written to the output directory:

* ``events.csv`` / ``focal_events.csv``: ``t, multiplicity, n_minus, n_plus, signature, degenerate``
* ``maslov.csv``: ``interval_lo, interval_hi, reference, convention, value_times_two``
* ``verdicts.csv``: ``id, left, right, holds, slack``
* ``run.json``: scenario, versions, tolerances and summary (no timestamps)

Floats are written with 17 significant digits so the files round-trip exactly.
"""
from __future__ import annotations

import csv
import io
import json
import os
import platform
from dataclasses import dataclass
from importlib import metadata

import numpy as np
import scipy

from .comparison import check_shifted_criteria, localization_tol, run_comparison
from .jacobi import (
    EVENT_TOL,
    endpoint_contributions,
    integrate_flow,
    lagrangian_from_submanifold,
    lagrangian_path_from_flow,
)
from .lagrangian import TRANSVERSALITY_FLOOR
from .maslov import maslov_index
from .scenario import Scenario
from .symforms import default_tol
from .verdict import Verdict, inequality, not_applicable

EVENT_COLUMNS = ("t", "multiplicity", "n_minus", "n_plus", "signature", "degenerate")
MASLOV_COLUMNS = ("interval_lo", "interval_hi", "reference", "convention", "value_times_two")
VERDICT_COLUMNS = ("id", "left", "right", "holds", "slack")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x.is_integer() and abs(x) < 2**53:
            return str(int(x))
        return format(x, ".17g")
    return str(x)


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _version():
    try:
        return metadata.version("maslovkit")
    except metadata.PackageNotFoundError:
        return "unknown"


@dataclass(frozen=True)
class ReportBundle:
    scenario: Scenario
    events: tuple
    focal_events: tuple
    maslov: tuple
    verdicts: tuple
    meta: dict

    @property
    def failed(self):
        return [v for v in self.verdicts if v.asserted and not v.holds]

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def files(self) -> dict:
        ev = [(e.t, e.multiplicity, e.n_minus, e.n_plus, e.signature, e.degenerate) for e in self.events]
        fe = [(e.t, e.multiplicity, e.n_minus, e.n_plus, e.signature, e.degenerate) for e in self.focal_events]
        vr = [(v.id, v.left, v.right, v.holds, v.slack) for v in self.verdicts]
        meta = dict(self.meta, exit_code=self.exit_code, failed=[v.id for v in self.failed])
        return {
            "events.csv": _csv(EVENT_COLUMNS, ev),
            "focal_events.csv": _csv(EVENT_COLUMNS, fe),
            "maslov.csv": _csv(MASLOV_COLUMNS, self.maslov),
            "verdicts.csv": _csv(VERDICT_COLUMNS, vr),
            "run.json": json.dumps(meta, indent=2, sort_keys=True, default=float) + "\n",
        }

    def write(self, out_dir):
        os.makedirs(out_dir, exist_ok=True)
        for name, text in self.files().items():
            with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="") as fh:
                fh.write(text)


def _ledger_verdict(id, sys, data, events, mu_full):
    if any(e.degenerate for e in events):
        return not_applicable(id, "degenerate events present", kind="not_evaluable")
    total = endpoint_contributions(sys, data, events).total
    return inequality(id, abs(total - mu_full), 0, detail=f"ledger={total} chart={mu_full}")


def run_scenario(scenario: Scenario, step=None) -> ReportBundle:
    """Integrate, detect, compare.  Raises ``InvalidInputError`` / ``DriftError`` on bad input."""
    sys = scenario.system(step)
    data = scenario.submanifold_data()
    flow = integrate_flow(sys)
    rep = run_comparison(sys, data, scenario.subintervals, scenario.seed, flow)
    a, b = sys.a, sys.b
    verdicts = list(rep.verdicts)
    verdicts.append(_ledger_verdict("conjugate_ledger_matches_chart", sys, None, rep.conjugate_events,
                                    rep.mu("L0", a, b)))
    verdicts.append(_ledger_verdict("focal_ledger_matches_chart", sys, data, rep.focal_events, rep.mu("LP", a, b)))

    shifted = []
    for ap in scenario.shifted_points:
        tag = f"[a'={ap:.6g}]"
        sr = check_shifted_criteria(sys, ap, None, scenario.seed, flow)
        for v in sr.verdicts:
            verdicts.append(Verdict(v.id + tag, v.left, v.right, v.holds, v.kind, v.conclusion, v.tol, v.detail))
        shifted.append({"a_prime": ap, "t0": sr.t0, "t_prime": sr.t_prime, "hypotheses": sr.hypotheses,
                        "conclusion": sr.conclusion, "mu_L0": sr.mu_L0, "epsilon": sr.epsilon})

    path = lagrangian_path_from_flow(flow)
    refs = {"L0": sys.L0, "LP": lagrangian_from_submanifold(sys, data)}
    rows = []
    for r in rep.maslov:
        rows.append((r.lo, r.hi, r.reference, "paper", r.result.value_times_two))
        piece = path if (r.lo, r.hi) == (a, b) else path.restrict(r.lo, r.hi)
        rs = maslov_index(piece, refs[r.reference], "robbin_salamon", scenario.seed)
        rows.append((r.lo, r.hi, r.reference, "robbin_salamon", rs.value_times_two))

    meta = {
        "scenario": scenario.to_dict(),
        "step": sys.step,
        "versions": {
            "maslovkit": _version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "tolerances": {
            "rank": default_tol(),
            "event": EVENT_TOL,
            "localization": localization_tol(sys),
            "transversality_floor": TRANSVERSALITY_FLOOR,
        },
        "seed": scenario.seed,
        "epsilon": rep.epsilon,
        "regime": rep.regime,
        "t0": rep.t0,
        "tP": rep.tP,
        "max_drift": flow.max_drift,
        "coincident": [{"t": c.t, "conjugate": c.conjugate_multiplicity, "focal": c.focal_multiplicity}
                       for c in rep.mul_t],
        "shifted": shifted,
    }
    return ReportBundle(scenario, rep.conjugate_events, rep.focal_events, tuple(rows), tuple(verdicts), meta)
