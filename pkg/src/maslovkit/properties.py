"""Random instances and the randomized property suite.

Every check draws its data from ``np.random.default_rng([seed, dim, trial, k])``
so a failing instance can be regenerated from the counterexample record alone.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .lagrangian import (
    Chart,
    LagrangianFrame,
    SymplecticSpace,
    chart_apply,
    intersection_dimension,
    random_lagrangian,
    random_lagrangian_meeting,
    standard_space,
    transition_reference,
)
from .maslov import (
    HormanderQuery,
    LagrangianPath,
    check_estimates,
    concatenate,
    connecting_path,
    hormander_index,
    kashiwara_index,
)
from .symforms import check_perturbation_bounds, inertia, n_plus

CHECKS = (
    "perturbation_bounds",
    "maslov_estimates",
    "opposite_form_relation",
    "hormander_antisymmetry",
    "hormander_symmetry_corrected",
    "kashiwara_decomposition",
    "hormander_path_independence",
    "transition_identity",
    "chart_kernel_identity",
)


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_symmetric(d, rng, rank=None):
    """Gaussian symmetric ``d x d`` matrix, optionally of prescribed rank."""
    rng = _rng(rng)
    if rank is None:
        A = rng.standard_normal((d, d))
        return A + A.T
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    w = rng.uniform(0.5, 2.0, d) * rng.choice([-1.0, 1.0], d)
    w[rank:] = 0.0
    return (Q * w) @ Q.T


def random_hamiltonian(space: SymplecticSpace, rng, scale=1.0):
    """``Omega^{-1} H`` with ``H`` random symmetric: generator of a symplectic one-parameter group."""
    H = random_symmetric(space.dim, rng) * scale
    return np.linalg.solve(space.omega, H)


def symplectic_arc(start: LagrangianFrame, X, num=33) -> LagrangianPath:
    """``s -> expm(s X) start`` on ``[0, 1]``."""
    F0 = start.frame

    def func(s):
        return expm(s * X) @ F0

    # samples by repeated multiplication with one step of the flow
    ts = np.linspace(0.0, 1.0, int(num))
    step = expm(X / (num - 1))
    frames = [F0]
    for _ in range(num - 1):
        frames.append(step @ frames[-1])
    return LagrangianPath(start.space, ts, np.stack(frames), func)


def _maybe_meeting(L, rng, p):
    if rng.random() < p:
        k = int(rng.integers(1, L.n + 1))
        return random_lagrangian_meeting(L, k, rng)
    return None


def random_path(space: SymplecticSpace, rng, references=()) -> LagrangianPath:
    """A random continuous path: a symplectic arc, sometimes followed by a chart segment.

    With positive probability the path starts or ends on a Lagrangian meeting
    one of ``references`` nontrivially, so endpoint corrections get exercised.
    """
    rng = _rng(rng)
    refs = list(references)
    start = None
    if refs:
        start = _maybe_meeting(refs[int(rng.integers(len(refs)))], rng, 0.3)
    if start is None:
        start = random_lagrangian(space, rng)
    X = random_hamiltonian(space, rng, rng.uniform(0.5, 2.5))
    path = symplectic_arc(start, X)
    if refs:
        target = _maybe_meeting(refs[int(rng.integers(len(refs)))], rng, 0.4)
        if target is not None:
            path = concatenate(path, connecting_path(path.end, target, rng))
    return path


@dataclass
class CheckStats:
    passed: int = 0
    total: int = 0
    worst_slack: float | None = None

    def record(self, ok, slack=None):
        self.total += 1
        self.passed += bool(ok)
        if slack is not None and (self.worst_slack is None or slack < self.worst_slack):
            self.worst_slack = float(slack)


@dataclass
class PropertySummary:
    seed: int
    trials: int
    dims: tuple
    stats: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def lines(self):
        out = [f"seed={self.seed} trials={self.trials} dims={','.join(map(str, self.dims))}"]
        for name in CHECKS:
            s = self.stats.get(name)
            if s is None or s.total == 0:
                continue
            worst = "-" if s.worst_slack is None else f"{s.worst_slack:g}"
            out.append(f"{name:32s} {s.passed:5d}/{s.total:<5d} worst_slack={worst}")
        out.append("all checks passed" if self.ok else f"{len(self.counterexamples)} violation(s)")
        return out


def _frames(*Ls):
    return [L.frame.tolist() for L in Ls]


def _check_perturbation(d, rng, stats, fail):
    rank_B = int(rng.integers(0, d + 1)) if rng.random() < 0.5 else None
    rank_C = int(rng.integers(0, d + 1)) if rng.random() < 0.5 else None
    B = random_symmetric(d, rng, rank_B)
    C = random_symmetric(d, rng, rank_C)
    v = check_perturbation_bounds(B, C)
    stats["perturbation_bounds"].record(v.holds, min(v.lower_slack, v.upper_slack))
    if not v.holds:
        fail("perturbation_bounds", {"B": B.tolist(), "C": C.tolist()})


def _check_estimates(space, rng, stats, fail):
    L0 = random_lagrangian(space, rng)
    L1 = _maybe_meeting(L0, rng, 0.5) or random_lagrangian(space, rng)
    path = random_path(space, rng, (L0, L1))
    rep = check_estimates(path, L0, L1, int(rng.integers(2**31)))
    slack = min(v.slack for v in rep.verdicts)
    stats["maslov_estimates"].record(all(v.holds for v in rep.verdicts), slack)
    stats["opposite_form_relation"].record(rep.opposite_relation)
    if not rep.holds:
        fail("maslov_estimates", {"L0": L0.frame.tolist(), "L1": L1.frame.tolist(), "ts": path.ts.tolist(),
                                  "frames": path.frames.tolist()})


def _check_hormander(space, rng, stats, fail):
    s = int(rng.integers(2**31))
    A, B, C, D = (random_lagrangian(space, rng) for _ in range(4))
    q = hormander_index(HormanderQuery(A, B, C, D), s)
    qs = hormander_index(HormanderQuery(C, D, A, B), s + 1)
    stats["hormander_antisymmetry"].record(q == -qs)
    if q != -qs:
        fail("hormander_antisymmetry", {"L": _frames(A, B, C, D), "q": q, "q_swapped": qs})

    # quadruples with forced intersections: the symmetry picks up dimension terms
    A2 = random_lagrangian(space, rng)
    B2 = _maybe_meeting(A2, rng, 0.7) or random_lagrangian(space, rng)
    C2 = _maybe_meeting(A2, rng, 0.5) or random_lagrangian(space, rng)
    D2 = _maybe_meeting(B2, rng, 0.5) or random_lagrangian(space, rng)
    q = hormander_index(HormanderQuery(A2, B2, C2, D2), s)
    qs = hormander_index(HormanderQuery(C2, D2, A2, B2), s + 1)
    dim = intersection_dimension
    corr = dim(A2, C2) + dim(B2, D2) - dim(B2, C2) - dim(A2, D2)
    stats["hormander_symmetry_corrected"].record(qs == -q + corr)
    if qs != -q + corr:
        fail("hormander_symmetry_corrected", {"L": _frames(A2, B2, C2, D2), "q": q, "q_swapped": qs})

    tau_c = kashiwara_index(A, B, C, s, check=False)
    tau_d = kashiwara_index(A, B, D, s, check=False)
    q = hormander_index(HormanderQuery(A, B, C, D), s)
    stats["kashiwara_decomposition"].record(q == tau_c - tau_d)
    if q != tau_c - tau_d:
        fail("kashiwara_decomposition", {"L": _frames(A, B, C, D), "q": q, "tau": [tau_c, tau_d]})

    M = random_lagrangian(space, rng)
    direct = connecting_path(C, D, s)
    detour = concatenate(connecting_path(C, M, s + 1), connecting_path(M, D, s + 2))
    q1 = hormander_index(HormanderQuery(A, B, C, D), s, direct)
    q2 = hormander_index(HormanderQuery(A, B, C, D), s, detour)
    stats["hormander_path_independence"].record(q1 == q2)
    if q1 != q2:
        fail("hormander_path_independence", {"L": _frames(A, B, C, D, M), "values": [q1, q2]})


def _check_transition(space, rng, stats, fail):
    L = random_lagrangian(space, rng)
    L0 = random_lagrangian(space, rng, transverse_to=[L])
    k = int(rng.integers(0, space.n + 1))
    L1 = random_lagrangian_meeting(L0, k, rng, transverse_to=[L])
    alpha = random_lagrangian(space, rng, transverse_to=[L])
    C = transition_reference(L0, L1, L)
    lhs = n_plus(chart_apply(Chart(L1, L), alpha))
    rhs = n_plus(chart_apply(Chart(L0, L), alpha) + C)
    ok = lhs == rhs and inertia(C).nullity == intersection_dimension(L0, L1)
    stats["transition_identity"].record(ok)
    if not ok:
        fail("transition_identity", {"L": _frames(L0, L1, L, alpha)})
    nullity = inertia(chart_apply(Chart(L0, L), L1)).nullity
    stats["chart_kernel_identity"].record(nullity == k)
    if nullity != k:
        fail("chart_kernel_identity", {"L": _frames(L0, L1, L), "k": k, "nullity": nullity})


def property_suite(seed=0, trials=10, dims=(1, 2, 3)) -> PropertySummary:
    """Run every randomized check ``trials`` times per dimension."""
    if int(trials) < 1:
        raise ValueError("trials must be at least 1")
    dims = tuple(int(d) for d in dims)
    if not dims or min(dims) < 1:
        raise ValueError("dimensions must be positive integers")
    summary = PropertySummary(int(seed), int(trials), dims, {name: CheckStats() for name in CHECKS})
    steps = (
        lambda d, rng, st, f: _check_perturbation(d, rng, st, f),
        lambda d, rng, st, f: _check_estimates(standard_space(d), rng, st, f),
        lambda d, rng, st, f: _check_hormander(standard_space(d), rng, st, f),
        lambda d, rng, st, f: _check_transition(standard_space(d), rng, st, f),
    )
    for d in dims:
        for trial in range(int(trials)):
            for k, step in enumerate(steps):
                rng = np.random.default_rng([int(seed), d, trial, k])

                def fail(check, data, d=d, trial=trial):
                    summary.counterexamples.append(
                        {"check": check, "seed": int(seed), "dim": d, "trial": trial, "data": data}
                    )

                step(d, rng, summary.stats, fail)
    return summary


def dump_counterexamples(summary: PropertySummary) -> str:
    return json.dumps(summary.counterexamples, indent=1, sort_keys=True)
