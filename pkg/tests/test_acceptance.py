"""Acceptance criteria, one test each.

Every test records a single ``PASS``/``FAIL`` line; the lines are printed in
the pytest terminal summary and when this file is run as a script.
"""
import math
import time

import numpy as np

from maslovkit.comparison import check_shifted_criteria, run_comparison
from maslovkit.errors import DegenerateCrossingError
from maslovkit.jacobi import (
    JacobiSystem,
    SubmanifoldData,
    detect_focal_instants,
    integrate_flow,
    lagrangian_path_from_flow,
)
from maslovkit.lagrangian import (
    Chart,
    chart_apply,
    intersection_dimension,
    random_lagrangian,
    random_lagrangian_meeting,
    standard_space,
    transition_reference,
)
from maslovkit.maslov import (
    HormanderQuery,
    check_estimates,
    concatenate,
    connecting_path,
    hormander_index,
    kashiwara_index,
    maslov_index,
    maslov_index_crossings,
    mu,
)
from maslovkit.properties import random_hamiltonian, random_path, random_symmetric, symplectic_arc
from maslovkit.scenario import builtin_model
from maslovkit.symforms import check_perturbation_bounds, inertia, n_plus

LINES = []
SEED = 20240901


def record(number, title, ok, detail, started):
    line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {detail} ({time.perf_counter() - started:.1f}s)"
    LINES.append(line)
    print(line)
    return ok


def rng_for(*key):
    return np.random.default_rng([SEED, *key])


def sphere_system(interval, step=1e-3):
    M = np.diag([0.0, -1.0, -1.0])
    return JacobiSystem(np.ones(3), lambda t: M, interval, step)


def test_01_perturbation_bounds():
    start = time.perf_counter()
    violations = 0
    for k in range(1000):
        rng = rng_for(1, k)
        d = 1 + k % 8
        rB = int(rng.integers(0, d + 1)) if k % 2 else None
        rC = int(rng.integers(0, d + 1)) if k % 3 else None
        v = check_perturbation_bounds(random_symmetric(d, rng, rB), random_symmetric(d, rng, rC))
        violations += not v.holds
    ok = record(1, "coindex perturbation bounds", violations == 0,
                f"1000 pairs, dims 1-8, {violations} violations", start)
    assert ok


def test_02_maslov_difference_estimates():
    start = time.perf_counter()
    violations = {}
    for n in (1, 2, 3, 4):
        sp = standard_space(n)
        for k in range(500):
            rng = rng_for(2, n, k)
            L0 = random_lagrangian(sp, rng)
            L1 = random_lagrangian_meeting(L0, int(rng.integers(0, n + 1)), rng) if rng.random() < 0.5 \
                else random_lagrangian(sp, rng)
            rep = check_estimates(random_path(sp, rng, (L0, L1)), L0, L1, k)
            for v in rep.verdicts:
                if not v.holds:
                    violations[v.id] = violations.get(v.id, 0) + 1
    total = sum(violations.values())
    ok = record(2, "Maslov index difference estimates (4 bounds)", total == 0,
                f"500 paths per n in 1..4, {total} violations {violations or ''}".rstrip(), start)
    assert ok


def test_03_opposite_form_relation():
    start = time.perf_counter()
    bad = 0
    for k in range(200):
        rng = rng_for(3, k)
        n = 1 + k % 4
        sp = standard_space(n)
        L0 = random_lagrangian(sp, rng)
        path = random_path(sp, rng, (L0,))
        m = mu(path, L0)
        m_opp = int(maslov_index(path, L0, "opposite_form"))
        expected = -m + intersection_dimension(path.start, L0) - intersection_dimension(path.end, L0)
        bad += m_opp != expected
    ok = record(3, "index under the opposite form", bad == 0, f"200 paths, {bad} mismatches", start)
    assert ok


def test_04_hormander_and_kashiwara():
    start = time.perf_counter()
    anti = deco = indep = 0
    for k in range(200):
        rng = rng_for(4, k)
        sp = standard_space(1 + k % 4)
        A, B, C, D = (random_lagrangian(sp, rng) for _ in range(4))
        q = hormander_index(HormanderQuery(A, B, C, D), k)
        anti += hormander_index(HormanderQuery(C, D, A, B), k + 1) != -q
        deco += q != kashiwara_index(A, B, C, k, check=False) - kashiwara_index(A, B, D, k, check=False)
        if k < 100:
            M = random_lagrangian(sp, rng)
            detour = concatenate(connecting_path(C, M, k + 2), connecting_path(M, D, k + 3))
            indep += hormander_index(HormanderQuery(A, B, C, D), k, detour) != q
    ok = record(4, "Hormander antisymmetry, Kashiwara decomposition, path independence",
                anti == deco == indep == 0,
                f"{anti}/200 antisymmetry, {deco}/200 decomposition, {indep}/100 path-independence failures",
                start)
    assert ok


def test_05_transition_and_chart_kernel():
    start = time.perf_counter()
    trans = kern = 0
    for k in range(200):
        rng = rng_for(5, k)
        n = 1 + k % 4
        sp = standard_space(n)
        L = random_lagrangian(sp, rng)
        L0 = random_lagrangian(sp, rng, transverse_to=[L])
        j = int(rng.integers(0, n + 1))
        L1 = random_lagrangian_meeting(L0, j, rng, transverse_to=[L])
        alpha = random_lagrangian(sp, rng, transverse_to=[L])
        C = transition_reference(L0, L1, L)
        same = n_plus(chart_apply(Chart(L1, L), alpha)) == n_plus(chart_apply(Chart(L0, L), alpha) + C)
        trans += not (same and inertia(C).nullity == intersection_dimension(L0, L1))
        kern += inertia(chart_apply(Chart(L0, L), L1)).nullity != j
    ok = record(5, "transition identity and chart kernel", trans == kern == 0,
                f"200 configurations, {trans} transition / {kern} kernel failures", start)
    assert ok


def test_06_sphere_model():
    start = time.perf_counter()
    b = 3.5 * math.pi
    sys = sphere_system((0.0, b))
    flow = integrate_flow(sys)
    rep = run_comparison(sys, SubmanifoldData.point(sys.g), flow=flow)
    ev = rep.conjugate_events
    times_ok = len(ev) == 3 and all(abs(e.t - (i + 1) * math.pi) <= 1e-6 for i, e in enumerate(ev))
    mult_ok = all(e.multiplicity == 2 and e.signature == 2 and not e.degenerate for e in ev)
    mu_eps = rep.mu("L0", rep.epsilon, b)
    mu_full = rep.mu("L0", 0.0, b)
    ok = times_ok and mult_ok and mu_eps == 6 and mu_full == 9 and flow.max_drift <= 1e-8
    err = max((abs(e.t - (i + 1) * math.pi) for i, e in enumerate(ev)), default=float("nan"))
    record(6, "sphere S^3 conjugate instants", ok,
           f"{len(ev)} instants (max error {err:.1e}), multiplicities {[e.multiplicity for e in ev]}, "
           f"signatures {[e.signature for e in ev]}, mu[eps,b]={mu_eps}, mu[a,b]={mu_full}, "
           f"drift {flow.max_drift:.1e}", start)
    assert ok


def test_07_flat_space_round_submanifold():
    start = time.perf_counter()
    sys = JacobiSystem(np.ones(3), lambda t: np.zeros((3, 3)), (0.0, 3.0), 1e-3)
    data = SubmanifoldData(sys.g, np.eye(3)[:, 1:], 0.5 * np.eye(2))
    rep = run_comparison(sys, data)
    fe = rep.focal_events
    event_ok = (len(fe) == 1 and abs(fe[0].t - 2.0) <= 1e-8 and fe[0].multiplicity == 2
                and fe[0].signature == 2 and not rep.conjugate_events)
    m0, mP = rep.mu("L0", rep.epsilon, 3.0), rep.mu("LP", rep.epsilon, 3.0)
    upper = rep.verdict("focal_minus_conjugate_upper")
    count = rep.verdict("focal_count_excess_upper")
    bounds_ok = rep.holds and upper.slack == 0 and count.slack == 0
    ok = event_ok and m0 == 0 and mP == 2 and bounds_ok
    t = fe[0].t if fe else float("nan")
    record(7, "flat R^3, round initial submanifold", ok,
           f"focal t={t:.10f}, mu_L0={m0}, mu_LP={mP}, upper slacks {upper.slack:g}/{count.slack:g}", start)
    assert ok


def test_08_equator_focal_before_conjugate():
    start = time.perf_counter()
    sys = sphere_system((0.0, 4.0))
    rep = run_comparison(sys, SubmanifoldData(sys.g, np.eye(3)[:, 1:], np.zeros((2, 2))))
    tP, t0 = rep.tP, rep.t0
    v = rep.verdict("first_focal_before_conjugate")
    ok = (tP is not None and t0 is not None and abs(tP - math.pi / 2) <= 1e-6 and abs(t0 - math.pi) <= 1e-6
          and tP < t0 and v.holds)
    record(8, "equatorial submanifold: first focal before first conjugate", ok,
           f"tP={tP}, t0={t0}, verdict {'holds' if v.holds else 'fails'}", start)
    assert ok


def test_09_shifted_initial_instant():
    start = time.perf_counter()
    sys = sphere_system((0.0, 4.0))
    rep = check_shifted_criteria(sys, -math.pi / 2, math.pi)
    applicable = rep.hypotheses.get("first_conjugate") is True
    tp = rep.t_prime
    ok = (applicable and rep.conclusion and tp is not None and abs(tp - math.pi / 2) <= 1e-6 and rep.holds
          and abs(rep.t0 - math.pi) <= 1e-6)
    record(9, "shifted initial instant a'=-pi/2", ok,
           f"hypothesis {'met' if applicable else 'not met'}, t'={tp}", start)
    assert ok


def test_10_chart_vs_crossing_method():
    start = time.perf_counter()
    mismatch = redrawn = 0
    done = 0
    k = 0
    while done < 100:
        rng = rng_for(10, k)
        k += 1
        sp = standard_space(1 + k % 4)
        L0 = random_lagrangian(sp, rng)
        path = symplectic_arc(random_lagrangian(sp, rng), random_hamiltonian(sp, rng, rng.uniform(1.0, 3.0)))
        try:
            c = maslov_index_crossings(path, L0)
        except DegenerateCrossingError:
            redrawn += 1
            continue
        mismatch += c.value_times_two != maslov_index(path, L0).value_times_two
        done += 1
    ok = record(10, "chart method vs crossing method", mismatch == 0,
                f"100 paths, {mismatch} mismatches, {redrawn} degenerate draws replaced", start)
    assert ok


def test_11_lorentzian_initial_contribution():
    start = time.perf_counter()
    sc = builtin_model("lorentz-flat", 3)
    sys = sc.system()
    flow = integrate_flow(sys)
    path = lagrangian_path_from_flow(flow)
    eps = run_comparison(sys, sc.submanifold_data(), flow=flow).epsilon
    head = mu(path.restrict(sys.a, sys.a + eps), sys.L0)
    ok = head == 2 == sys.n_plus and not detect_focal_instants(path, sys.L0, sys)
    record(11, "Lorentzian initial contribution", ok, f"mu_L0[a,a+eps]={head}, n_+(g)={sys.n_plus}", start)
    assert ok


if __name__ == "__main__":
    import sys as _sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    _sys.exit(1 if failed else 0)
