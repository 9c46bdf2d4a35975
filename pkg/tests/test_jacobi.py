import math
import warnings

import numpy as np
import pytest

from maslovkit.errors import AccumulationWarning, DriftError, InvalidInputError, RankDeficiencyError
from maslovkit.jacobi import (
    JacobiSystem,
    SubmanifoldData,
    detect_focal_instants,
    endpoint_contributions,
    integrate_flow,
    lagrangian_from_submanifold,
    lagrangian_path_from_flow,
)
from maslovkit.lagrangian import intersection_dimension
from maslovkit.maslov import maslov_index_crossings, mu


def sphere(n=3, interval=(0.0, 3.5 * math.pi), step=5e-3):
    M = -np.eye(n)
    M[0, 0] = 0.0
    return JacobiSystem(np.ones(n), lambda t: M, interval, step)


def flat(g, interval, step=1e-2):
    n = len(g)
    return JacobiSystem(np.asarray(g, float), lambda t: np.zeros((n, n)), interval, step)


def transverse_P(n):
    return np.eye(n)[:, 1:]


def test_flat_flow_is_exact():
    sys = flat([1.0, 1.0], (0.0, 2.0), 0.1)
    flow = integrate_flow(sys)
    for t in (0.3, 1.0, 2.0):
        expected = np.block([[np.eye(2), t * np.eye(2)], [np.zeros((2, 2)), np.eye(2)]])
        assert np.allclose(flow.at(t), expected, atol=1e-13)


def test_harmonic_flow_matches_closed_form():
    sys = JacobiSystem(np.ones(2), lambda t: -np.eye(2), (0.0, 4.0), 1e-3)
    flow = integrate_flow(sys)
    for t in (0.5, 2.0, 4.0):
        c, s = math.cos(t), math.sin(t)
        expected = np.block([[c * np.eye(2), s * np.eye(2)], [-s * np.eye(2), c * np.eye(2)]])
        assert np.allclose(flow.at(t), expected, atol=1e-10)
    assert flow.max_drift < 1e-10


def test_flow_at_between_grid_points_and_bounds():
    sys = sphere(2, (0.0, 1.0), 0.05)
    flow = integrate_flow(sys)
    t = 0.4321
    c, s = math.cos(t), math.sin(t)
    assert flow.at(t)[1, 1] == pytest.approx(c, abs=1e-7)
    assert flow.at(t)[1, 3] == pytest.approx(s, abs=1e-7)
    with pytest.raises(InvalidInputError):
        flow.at(1.5)


def test_backward_flow():
    sys = sphere(2, (0.0, -1.0), 0.01)
    flow = integrate_flow(sys)
    assert flow.ts[-1] == -1.0
    assert flow.at(-0.5)[1, 1] == pytest.approx(math.cos(0.5), abs=1e-9)
    with pytest.raises(InvalidInputError):
        lagrangian_path_from_flow(flow)


def test_path_starts_at_vertical_lagrangian():
    sys = sphere(3, (0.0, 1.0))
    path = lagrangian_path_from_flow(integrate_flow(sys))
    assert intersection_dimension(path.start, sys.L0) == 3


def test_sphere_conjugate_instants_and_index():
    sys = sphere()
    path = lagrangian_path_from_flow(integrate_flow(sys))
    events = detect_focal_instants(path, sys.L0, sys)
    assert [round(e.t / math.pi, 6) for e in events] == [1.0, 2.0, 3.0]
    for e in events:
        assert e.multiplicity == 2
        assert e.inertia_on_A.as_tuple() == (0, 2, 0)
        assert not e.degenerate
    ledger = endpoint_contributions(sys, None, events)
    assert (ledger.initial, ledger.final) == (3, 0)
    assert ledger.total == mu(path, sys.L0) == 9


def test_event_at_final_instant():
    sys = sphere(3, (0.0, 2 * math.pi))
    path = lagrangian_path_from_flow(integrate_flow(sys))
    events = detect_focal_instants(path, sys.L0, sys)
    assert events[-1].t == pytest.approx(2 * math.pi, abs=1e-8)
    ledger = endpoint_contributions(sys, None, events)
    assert len(ledger.interior) == 1 and ledger.final == 0
    assert ledger.total == mu(path, sys.L0) == 5


def test_crossing_forms_match_event_signatures():
    sys = sphere(3, (0.0, 2.5 * math.pi), 1e-2)
    path = lagrangian_path_from_flow(integrate_flow(sys))
    res = maslov_index_crossings(path, sys.L0)
    interior = [c for c in res.crossings if c.position == "interior"]
    events = detect_focal_instants(path, sys.L0, sys)
    assert [round(c.t, 5) for c in interior] == [round(e.t, 5) for e in events]
    assert [c.contribution for c in interior] == [e.signature for e in events]
    assert int(res) == mu(path, sys.L0)


def test_lorentzian_initial_contribution():
    sys = flat([-1.0, 1.0, 1.0], (0.0, 1.0))
    path = lagrangian_path_from_flow(integrate_flow(sys))
    assert detect_focal_instants(path, sys.L0, sys) == []
    assert mu(path.restrict(0.0, 0.1), sys.L0) == 2 == sys.n_plus
    assert endpoint_contributions(sys, None, []).total == mu(path, sys.L0)


def test_lorentzian_events_with_negative_signature():
    g = np.array([1.0, -1.0, 1.0])
    M = np.diag([0.0, -1.0, -2.0])
    sys = JacobiSystem(g, lambda t: M, (0.0, 5.0), 5e-3)
    path = lagrangian_path_from_flow(integrate_flow(sys))
    events = detect_focal_instants(path, sys.L0, sys)
    expected = [math.pi / math.sqrt(2), math.pi, 2 * math.pi / math.sqrt(2)]
    assert np.allclose([e.t for e in events], expected, atol=1e-7)
    assert [e.signature for e in events] == [1, -1, 1]
    assert endpoint_contributions(sys, None, events).total == mu(path, sys.L0) == 3


def test_focal_instant_of_round_sphere_submanifold():
    sys = flat([1.0, 1.0, 1.0], (0.0, 3.0), 1e-3)
    data = SubmanifoldData(sys.g, transverse_P(3), 0.5 * np.eye(2))
    LP = lagrangian_from_submanifold(sys, data)
    path = lagrangian_path_from_flow(integrate_flow(sys))
    events = detect_focal_instants(path, LP, sys)
    assert len(events) == 1
    assert events[0].t == pytest.approx(2.0, abs=1e-8)
    assert events[0].multiplicity == 2 and events[0].signature == 2
    ledger = endpoint_contributions(sys, data, events)
    assert ledger.initial == 1
    assert ledger.total == mu(path, LP) == 3
    assert detect_focal_instants(path, sys.L0, sys) == []


def test_concave_submanifold_has_no_focal_instant():
    sys = flat([1.0, 1.0, 1.0], (0.0, 3.0), 1e-2)
    data = SubmanifoldData(sys.g, transverse_P(3), -0.5 * np.eye(2))
    path = lagrangian_path_from_flow(integrate_flow(sys))
    assert detect_focal_instants(path, lagrangian_from_submanifold(sys, data), sys) == []


def test_point_submanifold_gives_vertical_lagrangian():
    sys = sphere(3, (0.0, 1.0))
    data = SubmanifoldData.point(sys.g)
    assert data.is_point and data.codim == 3
    assert intersection_dimension(lagrangian_from_submanifold(sys, data), sys.L0) == 3


def test_submanifold_shape_in_non_orthonormal_basis():
    g = np.ones(3)
    P = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 2.0]])
    data = SubmanifoldData(g, P, 0.5 * np.eye(2))
    assert np.allclose(data.shape, 0.5 * np.eye(2))
    assert np.allclose(data.P_basis.T @ data.P_basis, np.eye(2))


def test_submanifold_validation():
    g = np.ones(3)
    with pytest.raises(InvalidInputError):
        SubmanifoldData(g, np.eye(3)[:, :2], np.zeros((2, 2)))  # contains e_1
    with pytest.raises(InvalidInputError):
        SubmanifoldData(g, transverse_P(3), np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(InvalidInputError):
        SubmanifoldData([1.0, -1.0, 1.0], np.array([[0.0], [1.0], [1.0]]), [[0.0]])
    with pytest.raises(RankDeficiencyError):
        SubmanifoldData(g, np.array([[0.0, 0.0], [1.0, 2.0], [1.0, 2.0]]), np.zeros((2, 2)))
    sys = flat([-1.0, 1.0, 1.0], (0.0, 1.0))
    with pytest.raises(InvalidInputError):
        lagrangian_from_submanifold(sys, SubmanifoldData(g, transverse_P(3), np.zeros((2, 2))))


def test_lorentzian_submanifold_signs():
    data = SubmanifoldData([1.0, -1.0, 1.0], transverse_P(3), np.zeros((2, 2)))
    assert (data.n_minus, data.n_plus) == (1, 1)


def test_system_validation():
    with pytest.raises(InvalidInputError):
        JacobiSystem([1.0, 2.0], lambda t: np.zeros((2, 2)), (0.0, 1.0))
    with pytest.raises(InvalidInputError):
        JacobiSystem([1.0, 1.0], lambda t: np.array([[0.0, 1.0], [0.0, 0.0]]), (0.0, 1.0))
    with pytest.raises(InvalidInputError):
        JacobiSystem([1.0, 1.0], lambda t: np.zeros((3, 3)), (0.0, 1.0))
    with pytest.raises(InvalidInputError):
        JacobiSystem([1.0, 1.0], lambda t: np.zeros((2, 2)), (1.0, 1.0))
    with pytest.raises(InvalidInputError):
        JacobiSystem([1.0, 1.0], lambda t: np.zeros((2, 2)), (0.0, 1.0), step=0.0)
    # g-symmetric but not symmetric: allowed in the Lorentzian case
    JacobiSystem([-1.0, 1.0], lambda t: np.array([[0.0, 1.0], [-1.0, 0.0]]), (0.0, 1.0))


def test_drift_error_on_coarse_step():
    sys = JacobiSystem(np.ones(2), lambda t: np.diag([0.0, -1e4]), (0.0, 5.0), 0.1)
    with pytest.raises(DriftError):
        integrate_flow(sys)


def test_accumulation_warning():
    w = 200.0
    sys = JacobiSystem(np.ones(2), lambda t: np.diag([0.0, -w * w]), (0.0, 1.2), 1e-4)
    path = lagrangian_path_from_flow(integrate_flow(sys))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        events = detect_focal_instants(path, sys.L0, sys)
    assert any(issubclass(c.category, AccumulationWarning) for c in caught)
    assert len(events) == 64


def test_degenerate_events_block_the_ledger():
    sys = sphere(3, (0.0, 1.0))
    from maslovkit.jacobi import FocalEvent
    from maslovkit.symforms import Inertia

    ev = FocalEvent(0.5, 1, np.zeros((3, 1)), Inertia(0, 0, 1), True)
    with pytest.raises(InvalidInputError):
        endpoint_contributions(sys, None, [ev])
