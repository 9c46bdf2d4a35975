import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maslovkit.comparison import (
    SHIFTED_IDS,
    check_shifted_criteria,
    choose_epsilon,
    regime,
    run_comparison,
    shifted_start_lagrangian,
)
from maslovkit.errors import InvalidInputError
from maslovkit.jacobi import FocalEvent, JacobiSystem, SubmanifoldData, integrate_flow
from maslovkit.lagrangian import same_subspace, span
from maslovkit.properties import random_symmetric
from maslovkit.symforms import Inertia


def constant_system(g, M, interval, step=1e-2):
    M = np.asarray(M, float)
    return JacobiSystem(np.asarray(g, float), lambda t: M, interval, step)


def sphere_system(interval, step=5e-3):
    return constant_system(np.ones(3), np.diag([0.0, -1.0, -1.0]), interval, step)


def P_data(g, shape):
    n = len(g)
    return SubmanifoldData(np.asarray(g, float), np.eye(n)[:, 1:], shape)


def test_regime_classification():
    z = np.zeros((3, 3))
    assert regime(constant_system([1, 1, 1], z, (0, 1))) == "riemannian"
    assert regime(constant_system([-1, 1, 1], z, (0, 1))) == "timelike"
    assert regime(constant_system([1, -1, 1], z, (0, 1))) == "other"


def test_epsilon_policy():
    sys = constant_system([1, 1], np.zeros((2, 2)), (0.0, 4.0), 1e-3)
    assert choose_epsilon(sys, []) == pytest.approx(1e-2)
    ev = FocalEvent(1.0, 1, np.zeros((2, 1)), Inertia(0, 1, 0), False)
    assert choose_epsilon(sys, [ev]) == pytest.approx(0.5)
    near = FocalEvent(5e-3, 1, np.zeros((2, 1)), Inertia(0, 1, 0), False)
    assert choose_epsilon(sys, [near]) == pytest.approx(2.5e-3)
    short = constant_system([1, 1], np.zeros((2, 2)), (0.0, 0.02), 1e-2)
    assert choose_epsilon(short, []) == pytest.approx(5e-3)


def test_flat_focal_example():
    sys = constant_system(np.ones(3), np.zeros((3, 3)), (0.0, 3.0), 1e-3)
    rep = run_comparison(sys, P_data(sys.g, 0.5 * np.eye(2)))
    assert rep.conjugate_events == ()
    assert len(rep.focal_events) == 1 and rep.focal_events[0].t == pytest.approx(2.0, abs=1e-8)
    eps = rep.epsilon
    assert rep.mu("L0", eps, 3.0) == 0
    assert rep.mu("LP", eps, 3.0) == 2
    assert rep.verdict("focal_minus_conjugate_upper").slack == 0
    assert rep.verdict("focal_count_excess_upper").slack == 0
    assert rep.verdict("first_focal_before_conjugate").holds
    assert rep.holds and rep.reproducible


def test_equator_focal_before_conjugate():
    sys = sphere_system((0.0, 4.0))
    rep = run_comparison(sys, P_data(sys.g, np.zeros((2, 2))))
    assert rep.tP == pytest.approx(math.pi / 2, abs=1e-6)
    assert rep.t0 == pytest.approx(math.pi, abs=1e-6)
    v = rep.verdict("first_focal_before_conjugate")
    assert v.holds and v.left < v.right
    assert rep.holds


def test_point_submanifold_focal_equals_conjugate():
    sys = sphere_system((0.0, 4.0), 1e-2)
    rep = run_comparison(sys, SubmanifoldData.point(sys.g))
    assert [e.t for e in rep.focal_events] == [e.t for e in rep.conjugate_events]
    assert rep.verdict("coincident_multiplicity").holds
    assert rep.verdict("focal_count_excess_upper").left == 0
    assert len(rep.mul_t) == 1


def test_subintervals_and_validation():
    sys = sphere_system((0.0, 4.0), 1e-2)
    data = P_data(sys.g, np.zeros((2, 2)))
    rep = run_comparison(sys, data, subintervals=[(1.0, 2.0), (2.0, 4.0)])
    assert rep.mu("LP", 1.0, 2.0) == 2
    assert rep.mu("L0", 1.0, 2.0) == 0
    assert rep.mu("L0", 2.0, 4.0) == 2
    assert rep.verdict("focal_existence[1,2]").asserted
    with pytest.raises(InvalidInputError):
        run_comparison(sys, data, subintervals=[(0.0, 1.0)])
    with pytest.raises(InvalidInputError):
        run_comparison(sys.with_interval(4.0, 0.0), data)


def test_other_regime_marks_ordering_not_applicable():
    sys = constant_system([1, -1, 1], np.diag([0.0, 1.0, -1.0]), (0.0, 4.0))
    rep = run_comparison(sys, P_data(sys.g, np.zeros((2, 2))))
    assert rep.regime == "other"
    for id in ("first_focal_before_conjugate", "coincident_multiplicity", "focal_count_excess_lower"):
        assert rep.verdict(id).kind == "not_applicable"
        assert not rep.verdict(id).asserted
    assert rep.holds


def _random_constant_curvature(n, rng, g):
    """A g-symmetric curvature ``M`` with ``M e_1 = 0`` and ``e_1^T g M = 0``."""
    K = np.zeros((n, n))
    K[1:, 1:] = random_symmetric(n - 1, rng) * rng.uniform(0.3, 1.5)
    return g[:, None] * K  # g M = K is symmetric


def _random_P(n, rng, g):
    k = int(rng.integers(0, n))
    if k == 0:
        return SubmanifoldData.point(g)
    P = np.zeros((n, k))
    P[1:] = np.linalg.qr(rng.standard_normal((n - 1, n - 1)))[0][:, :k]
    Gp = P.T @ (g[:, None] * P)
    shape = np.linalg.solve(Gp, random_symmetric(k, rng))  # shape^T G symmetric
    return SubmanifoldData(g, P, shape)


@settings(max_examples=12)
@given(st.integers(2, 4), st.integers(0, 2**31 - 1))
def test_random_riemannian_scenarios(n, seed):
    rng = np.random.default_rng(seed)
    g = np.ones(n)
    sys = constant_system(g, _random_constant_curvature(n, rng, g), (0.0, float(rng.uniform(2.0, 5.0))))
    rep = run_comparison(sys, _random_P(n, rng, g), seed=seed)
    assert rep.holds, [v for v in rep.verdicts if v.asserted and not v.holds]
    assert rep.reproducible


@settings(max_examples=12)
@given(st.integers(2, 4), st.integers(0, 2**31 - 1))
def test_random_timelike_scenarios(n, seed):
    rng = np.random.default_rng(seed)
    g = np.ones(n)
    g[0] = -1.0
    sys = constant_system(g, _random_constant_curvature(n, rng, g), (0.0, float(rng.uniform(2.0, 5.0))))
    rep = run_comparison(sys, _random_P(n, rng, g), seed=seed)
    assert rep.regime == "timelike"
    assert rep.holds, [v for v in rep.verdicts if v.asserted and not v.holds]


def test_shifted_start_lagrangian_flat():
    sys = constant_system(np.ones(2), np.zeros((2, 2)), (0.0, 1.0))
    L = shifted_start_lagrangian(sys, -1.0).frame
    assert same_subspace(L, span(sys.space, np.vstack([np.eye(2), np.eye(2)])))
    with pytest.raises(InvalidInputError):
        shifted_start_lagrangian(sys, 0.5)


def test_shifted_criteria_on_sphere():
    sys = sphere_system((0.0, 4.0))
    flow = integrate_flow(sys)
    rep = check_shifted_criteria(sys, -math.pi / 2, None, 0, flow)
    assert rep.t0 == pytest.approx(math.pi, abs=1e-6)
    assert rep.hypotheses["first_conjugate"] is True
    assert rep.conclusion
    assert rep.t_prime == pytest.approx(math.pi / 2, abs=1e-6)
    assert rep.holds
    explicit = check_shifted_criteria(sys, -math.pi / 2, math.pi, 0, flow)
    assert explicit.t_prime == pytest.approx(rep.t_prime)


def test_shifted_criteria_validation_and_not_applicable():
    sys = sphere_system((0.0, 4.0), 1e-2)
    flow = integrate_flow(sys)
    with pytest.raises(InvalidInputError):
        check_shifted_criteria(sys, 1.0, None, 0, flow)
    with pytest.raises(InvalidInputError):
        check_shifted_criteria(sys, -1.0, 2.0, 0, flow)
    flat = constant_system(np.ones(3), np.zeros((3, 3)), (0.0, 2.0))
    rep = check_shifted_criteria(flat, -1.0)
    assert [v.id for v in rep.verdicts] == list(SHIFTED_IDS)
    assert all(v.kind == "not_applicable" for v in rep.verdicts)
    assert rep.t0 is None and not rep.conclusion


def test_shifted_non_first_instant():
    sys = sphere_system((0.0, 7.0), 1e-2)
    flow = integrate_flow(sys)
    rep = check_shifted_criteria(sys, -0.3, 2 * math.pi, 0, flow)
    assert rep.verdicts[-1].kind == "not_applicable"
    assert rep.hypotheses["first_conjugate"] is None
