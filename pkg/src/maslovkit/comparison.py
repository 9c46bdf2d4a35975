"""Comparison between conjugate instants and focal instants of an initial submanifold.

``run_comparison`` integrates the Jacobi flow once, detects conjugate and focal
instants, evaluates ``mu_{L0}`` and ``mu_{LP}`` on the requested subintervals
and checks every bound relating them.  Each bound is a ``Verdict`` whose
``left``/``right`` are recorded so it can be re-checked by plain arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .jacobi import (
    FocalEvent,
    JacobiSystem,
    SubmanifoldData,
    detect_focal_instants,
    integrate_flow,
    lagrangian_from_submanifold,
    lagrangian_path_from_flow,
)
from .lagrangian import LagrangianFrame
from .maslov import MaslovResult, maslov_index
from .verdict import Verdict, implication, inequality, not_applicable


def localization_tol(sys: JacobiSystem) -> float:
    return 1e-10 * max(1.0, abs(sys.b - sys.a))


def coincidence_tol(sys: JacobiSystem) -> float:
    return 10 * localization_tol(sys)


def regime(sys: JacobiSystem) -> str:
    """``"riemannian"``, ``"timelike"`` (one negative entry, on the geodesic slot) or ``"other"``."""
    neg = np.flatnonzero(sys.g < 0)
    if neg.size == 0:
        return "riemannian"
    if neg.size == 1 and neg[0] == 0:
        return "timelike"
    return "other"


def choose_epsilon(sys: JacobiSystem, events) -> float:
    """Half the distance to the first event, at least ``10 * step`` but never past that event."""
    length = sys.b - sys.a
    if not events:
        return min(10 * sys.step, length / 4)
    first = min(e.t for e in events) - sys.a
    eps = max(first / 2, 10 * sys.step)
    if eps >= first:
        eps = first / 2
    return eps


@dataclass(frozen=True)
class MaslovRecord:
    lo: float
    hi: float
    reference: str  # "L0" or "LP"
    result: MaslovResult

    @property
    def value(self) -> int:
        return int(self.result)


@dataclass(frozen=True)
class CoincidentInstant:
    t: float
    conjugate_multiplicity: int
    focal_multiplicity: int


@dataclass(frozen=True)
class ComparisonReport:
    epsilon: float
    conjugate_events: tuple
    focal_events: tuple
    maslov: tuple
    t0: float | None
    tP: float | None
    mul_t: tuple
    verdicts: tuple
    regime: str
    dim_P: int
    n_minus_P: int
    meta: dict = field(default_factory=dict)

    def mu(self, reference, lo, hi) -> int:
        for r in self.maslov:
            if r.reference == reference and math.isclose(r.lo, lo, abs_tol=1e-12) and math.isclose(r.hi, hi, abs_tol=1e-12):
                return r.value
        raise KeyError((reference, lo, hi))

    @property
    def mu_L0(self) -> dict:
        return {(r.lo, r.hi): r.value for r in self.maslov if r.reference == "L0"}

    @property
    def mu_LP(self) -> dict:
        return {(r.lo, r.hi): r.value for r in self.maslov if r.reference == "LP"}

    def verdict(self, id) -> Verdict:
        for v in self.verdicts:
            if v.id == id:
                return v
        raise KeyError(id)

    @property
    def holds(self) -> bool:
        return all(v.holds for v in self.verdicts if v.asserted)

    @property
    def reproducible(self) -> bool:
        return all(v.recheck() == v.holds for v in self.verdicts)


def _label(id, lo, hi):
    return f"{id}[{lo:.6g},{hi:.6g}]"


def _events_in(events, lo, hi, tol):
    return [e for e in events if lo - tol <= e.t <= hi + tol]


def _count(events):
    return sum(e.multiplicity for e in events)


def run_comparison(sys: JacobiSystem, data: SubmanifoldData, subintervals=(), seed=0, flow=None) -> ComparisonReport:
    """Evaluate all conjugate/focal comparison bounds on ``sys`` with initial submanifold ``data``.

    ``subintervals`` are ``(alpha, beta)`` pairs inside ``]a, b]``; the
    intervals ``[a, b]`` and ``[a + eps, b]`` are always evaluated.
    """
    if sys.b <= sys.a:
        raise InvalidInputError("comparison needs a forward interval")
    a, b = sys.a, sys.b
    for lo, hi in subintervals:
        if not (a < lo < hi <= b):
            raise InvalidInputError(f"subinterval [{lo}, {hi}] must lie in ]{a}, {b}]")
    flow = integrate_flow(sys) if flow is None else flow
    path = lagrangian_path_from_flow(flow)
    LP = lagrangian_from_submanifold(sys, data)
    conj = tuple(detect_focal_instants(path, sys.L0, sys))
    foc = tuple(detect_focal_instants(path, LP, sys))
    eps = choose_epsilon(sys, conj + foc)
    tol = coincidence_tol(sys)
    dimP, nmP = data.dim, data.n_minus

    intervals = [(a, b), (a + eps, b)] + [(float(lo), float(hi)) for lo, hi in subintervals]
    records = []
    for lo, hi in dict.fromkeys(intervals):
        piece = path if (lo, hi) == (a, b) else path.restrict(lo, hi)
        for name, ref in (("L0", sys.L0), ("LP", LP)):
            records.append(MaslovRecord(lo, hi, name, maslov_index(piece, ref, "paper", seed)))

    def mu(name, lo, hi):
        return next(r.value for r in records if r.reference == name and r.lo == lo and r.hi == hi)

    verdicts = []
    inner = [(lo, hi) for lo, hi in dict.fromkeys(intervals) if lo > a]
    for lo, hi in dict.fromkeys(intervals):
        m0, mP = mu("L0", lo, hi), mu("LP", lo, hi)
        verdicts.append(inequality(_label("maslov_gap_bound", lo, hi), abs(m0 - mP), dimP))

    lo, hi = a + eps, b
    diff = mu("LP", lo, hi) - mu("L0", lo, hi)
    verdicts.append(inequality("focal_minus_conjugate_lower", -nmP, diff))
    verdicts.append(inequality("focal_minus_conjugate_upper", diff, dimP))

    for lo, hi in inner:
        m0, mP = mu("L0", lo, hi), mu("LP", lo, hi)
        has_focal = bool(_events_in(foc, lo, hi, tol))
        has_conj = bool(_events_in(conj, lo, hi, tol))
        verdicts.append(implication(_label("focal_existence", lo, hi), abs(m0), dimP, has_focal))
        verdicts.append(implication(_label("conjugate_existence", lo, hi), abs(mP), dimP, has_conj))
        if conj:
            verdicts.append(not_applicable(_label("no_conjugate_bound", lo, hi), "conjugate instants present"))
        else:
            verdicts.append(inequality(_label("no_conjugate_bound", lo, hi), abs(mP), dimP))
        if foc:
            verdicts.append(not_applicable(_label("no_focal_bound", lo, hi), "focal instants present"))
        else:
            verdicts.append(inequality(_label("no_focal_bound", lo, hi), abs(m0), dimP))

    # existence after epsilon: mu_{L0} outside [-dim P, n_-(g,P)] forces a focal instant, and twin
    lo, hi = a + eps, b
    m0, mP = mu("L0", lo, hi), mu("LP", lo, hi)
    has_focal = bool(_events_in(foc, lo, hi, tol))
    has_conj = bool(_events_in(conj, lo, hi, tol))
    verdicts.append(implication("focal_existence_after_epsilon_upper", m0, nmP, has_focal))
    verdicts.append(implication("focal_existence_after_epsilon_lower", -m0, dimP, has_focal))
    verdicts.append(implication("conjugate_existence_after_epsilon_lower", -mP, nmP, has_conj))
    verdicts.append(implication("conjugate_existence_after_epsilon_upper", mP, dimP, has_conj))

    reg = regime(sys)
    t0 = conj[0].t if conj else None
    tP = foc[0].t if foc else None
    mul_t = []
    for e in conj:
        for f in foc:
            if abs(e.t - f.t) <= tol:
                mul_t.append(CoincidentInstant(e.t, e.multiplicity, f.multiplicity))
    ordered = reg != "other" and (reg == "riemannian" or nmP == 0)
    if not ordered:
        why = "needs Riemannian g, or timelike geodesic with spacelike P"
        for id in ("first_focal_before_conjugate", "coincident_multiplicity", "focal_count_excess_lower",
                   "focal_count_excess_upper"):
            verdicts.append(not_applicable(id, why))
    elif any(e.degenerate for e in conj + foc):
        for id in ("first_focal_before_conjugate", "coincident_multiplicity", "focal_count_excess_lower",
                   "focal_count_excess_upper"):
            verdicts.append(not_applicable(id, "degenerate events present", kind="not_evaluable"))
    else:
        # suprema of the event-free initial intervals
        s0 = b if t0 is None else t0
        sP = b if tP is None else tP
        verdicts.append(inequality("first_focal_before_conjugate", sP, s0, tol=tol))
        if abs(sP - s0) <= tol and (conj or foc):
            mul0 = sum(e.multiplicity for e in conj if abs(e.t - s0) <= tol)
            mulP = sum(f.multiplicity for f in foc if abs(f.t - sP) <= tol)
            verdicts.append(inequality("coincident_multiplicity", mul0, mulP))
        else:
            verdicts.append(not_applicable("coincident_multiplicity", "first instants differ"))
        excess = _count(foc) - _count(conj)
        verdicts.append(inequality("focal_count_excess_lower", 0, excess))
        verdicts.append(inequality("focal_count_excess_upper", excess, dimP))

    meta = {"seed": seed, "max_drift": flow.max_drift, "localization_tol": localization_tol(sys)}
    return ComparisonReport(eps, conj, foc, tuple(records), t0, tP, tuple(mul_t), tuple(verdicts), reg, dimP,
                            nmP, meta)


# ---------------------------------------------------------------------------
# shifted initial instant


@dataclass(frozen=True)
class ShiftedLagrangian:
    """Initial data at ``a`` of the Jacobi fields vanishing at ``a_prime < a``."""

    a_prime: float
    frame: LagrangianFrame


def shifted_start_lagrangian(sys: JacobiSystem, a_prime) -> ShiftedLagrangian:
    a_prime = float(a_prime)
    if not a_prime < sys.a:
        raise InvalidInputError(f"a_prime={a_prime} must be smaller than a={sys.a}")
    back = integrate_flow(sys.with_interval(sys.a, a_prime))
    Psi = back[-1].Phi
    omega = sys.space.omega
    n = sys.n
    inv = np.linalg.solve(omega, Psi.T @ omega)
    return ShiftedLagrangian(a_prime, LagrangianFrame(sys.space, inv @ np.vstack([np.zeros((n, n)), np.eye(n)])))


@dataclass(frozen=True)
class ShiftedReport:
    a_prime: float
    t0: float | None
    epsilon: float | None
    mu_L0: int | None
    multiplicity: int
    hypotheses: dict
    conclusion: bool
    t_prime: float | None
    instants: tuple
    verdicts: tuple

    @property
    def holds(self) -> bool:
        return all(v.holds for v in self.verdicts if v.asserted)


SHIFTED_IDS = ("shifted_multiplicity_hypothesis", "shifted_negative_index_hypothesis", "first_conjugate_hypothesis")


def check_shifted_criteria(sys: JacobiSystem, a_prime, t0=None, seed=0, flow=None) -> ShiftedReport:
    """Check that the conjugate instant ``t0`` forces an instant in ``[a, t0]`` conjugate to ``a_prime``.

    ``t0`` defaults to the first conjugate instant; without conjugate instants
    every verdict is "not applicable".

    Hypotheses (each reported separately):
    ``mul(t0) > n_-(g) - mu_{L0}([a+eps, t0])``, ``mu_{L0}([a+eps, t0]) < -n_+(g)``,
    and, when ``t0`` is the first conjugate instant and nondegenerate,
    ``mul(t0) > n_-(g) + n_-(g, t0)``.  The conclusion is checked by locating
    ``t'`` in ``[a, t0]`` where ``l(t')`` meets the shifted Lagrangian.
    """
    if sys.b <= sys.a:
        raise InvalidInputError("shifted criteria need a forward interval")
    if not float(a_prime) < sys.a:
        raise InvalidInputError(f"a_prime={a_prime} must be smaller than a={sys.a}")
    flow = integrate_flow(sys) if flow is None else flow
    path = lagrangian_path_from_flow(flow)
    tol = coincidence_tol(sys)
    conj = detect_focal_instants(path, sys.L0, sys)
    if t0 is None:
        if not conj:
            verdicts = tuple(not_applicable(id, "no conjugate instant") for id in SHIFTED_IDS)
            return ShiftedReport(float(a_prime), None, None, None, 0, {}, False, None, (), verdicts)
        t0 = conj[0].t
    t0 = float(t0)
    if not sys.a < t0 <= sys.b:
        raise InvalidInputError(f"t0={t0} must lie in ]{sys.a}, {sys.b}]")
    at_t0 = [e for e in conj if abs(e.t - t0) <= max(tol, 1e-7)]
    if not at_t0:
        raise InvalidInputError(f"t0={t0} is not a detected conjugate instant")
    event = at_t0[0]
    t0 = event.t
    before = [e for e in conj if e.t < t0 - tol]
    eps = choose_epsilon(sys, conj)
    piece = path.restrict(sys.a + eps, t0)
    m0 = int(maslov_index(piece, sys.L0, "paper", seed))
    mul = event.multiplicity

    shifted = shifted_start_lagrangian(sys, a_prime)
    head = path.restrict(sys.a, t0) if t0 < path.b else path
    hits = detect_focal_instants(head, shifted.frame, sys, include_start=True)
    conclusion = bool(hits)
    t_prime = hits[0].t if hits else None

    verdicts = [
        implication("shifted_multiplicity_hypothesis", mul, sys.n_minus - m0, conclusion),
        implication("shifted_negative_index_hypothesis", -m0, sys.n_plus, conclusion),
    ]
    hyp = {
        "multiplicity": mul > sys.n_minus - m0,
        "negative_index": m0 < -sys.n_plus,
    }
    if before:
        verdicts.append(not_applicable("first_conjugate_hypothesis", "t0 is not the first conjugate instant"))
        hyp["first_conjugate"] = None
    elif event.degenerate:
        verdicts.append(not_applicable("first_conjugate_hypothesis", "t0 is degenerate"))
        hyp["first_conjugate"] = None
    else:
        right = sys.n_minus + event.n_minus
        verdicts.append(implication("first_conjugate_hypothesis", mul, right, conclusion))
        hyp["first_conjugate"] = mul > right
    return ShiftedReport(float(a_prime), t0, eps, m0, mul, hyp, conclusion, t_prime, tuple(hits), tuple(verdicts))


__all__ = [
    "ComparisonReport",
    "CoincidentInstant",
    "FocalEvent",
    "MaslovRecord",
    "ShiftedLagrangian",
    "ShiftedReport",
    "check_shifted_criteria",
    "choose_epsilon",
    "regime",
    "run_comparison",
    "shifted_start_lagrangian",
]
