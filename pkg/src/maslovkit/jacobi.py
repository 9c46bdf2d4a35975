"""Jacobi flow along a geodesic in a parallel frame, and conjugate / focal instants.

A geodesic is represented only through its parallel-frame data: the diagonal
metric signature ``g`` (entries +-1, with ``e_1`` the geodesic direction), the
curvature operator ``M(t) v = R(gamma', v) gamma'`` and an interval ``[a, b]``.
Jacobi fields solve ``J'' = M(t) J``.  The flow ``Phi_t`` maps initial data
``(J(a), J'(a))`` to ``(J(t), J'(t))`` and preserves

    omega((v1, w1), (v2, w2)) = g(v2, w1) - g(v1, w2).

The unit sphere is ``M = diag(0, -1, ..., -1)`` with ``g = I``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    AccumulationWarning,
    DriftError,
    InvalidInputError,
    RankDeficiencyError,
)
from .lagrangian import LagrangianFrame, SymplecticSpace, margins_batch, orthonormalize
from .maslov import LagrangianPath
from .symforms import Inertia, SymmetricForm, inertia, restrict_form

EVENT_TOL = 1e-7
MAX_EVENTS = 64
SYMMETRY_TOL = 1e-12


def jacobi_space(g) -> SymplecticSpace:
    G = np.diag(np.asarray(g, dtype=float))
    Z = np.zeros_like(G)
    return SymplecticSpace(np.block([[Z, -G], [G, Z]]))


@dataclass(frozen=True, eq=False)
class JacobiSystem:
    """Metric signature, curvature profile and interval of a geodesic.

    ``curvature(t)`` returns the ``n x n`` matrix ``M(t)``; ``g @ M(t)`` must be
    symmetric.  ``interval`` may be reversed (``b < a``) for backward flows.
    """

    g: np.ndarray
    curvature: Callable[[float], np.ndarray]
    interval: tuple
    step: float = 1e-3
    drift_bound: float = 1e-8

    def __post_init__(self):
        g = np.array(self.g, dtype=float).reshape(-1)
        if g.size == 0 or not np.all(np.isin(g, (-1.0, 1.0))):
            raise InvalidInputError(f"signature entries must be +1 or -1, got {g.tolist()}")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)
        a, b = (float(x) for x in self.interval)
        if not (math.isfinite(a) and math.isfinite(b)) or a == b:
            raise InvalidInputError(f"invalid interval {self.interval!r}")
        object.__setattr__(self, "interval", (a, b))
        if not self.step > 0:
            raise InvalidInputError("step must be positive")
        self.curvature_at(a)

    @property
    def n(self) -> int:
        return self.g.size

    @property
    def a(self) -> float:
        return self.interval[0]

    @property
    def b(self) -> float:
        return self.interval[1]

    @property
    def gmat(self):
        return np.diag(self.g)

    @cached_property
    def space(self) -> SymplecticSpace:
        return jacobi_space(self.g)

    @cached_property
    def L0(self) -> LagrangianFrame:
        """``{0} + R^n``: initial data of Jacobi fields vanishing at ``a``."""
        n = self.n
        return LagrangianFrame(self.space, np.vstack([np.zeros((n, n)), np.eye(n)]))

    @property
    def n_plus(self) -> int:
        return int(np.sum(self.g > 0))

    @property
    def n_minus(self) -> int:
        return int(np.sum(self.g < 0))

    def curvature_at(self, t):
        M = np.asarray(self.curvature(t), dtype=float)
        if M.shape != (self.n, self.n) or not np.all(np.isfinite(M)):
            raise InvalidInputError(f"curvature at t={t} must be a finite {self.n}x{self.n} matrix")
        gM = self.g[:, None] * M
        if np.max(np.abs(gM - gM.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(M))):
            raise InvalidInputError(f"g @ M(t) is not symmetric at t={t}")
        return M

    def with_interval(self, a, b) -> "JacobiSystem":
        return JacobiSystem(self.g, self.curvature, (a, b), self.step, self.drift_bound)


@dataclass(frozen=True)
class FlowSample:
    t: float
    Phi: np.ndarray
    drift: float


def _rk4(sys, t, Phi, h):
    n = sys.n

    def rhs(s, X):
        return np.vstack([X[n:], sys.curvature_at(s) @ X[:n]])

    k1 = rhs(t, Phi)
    k2 = rhs(t + h / 2, Phi + h / 2 * k1)
    k3 = rhs(t + h / 2, Phi + h / 2 * k2)
    k4 = rhs(t + h, Phi + h * k3)
    return Phi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _propagate(sys, t0, Phi, t1):
    """Integrate from ``t0`` to ``t1`` with steps no longer than ``sys.step``."""
    if t1 == t0:
        return Phi
    m = max(1, math.ceil(abs(t1 - t0) / sys.step - 1e-9))
    h = (t1 - t0) / m
    t = t0
    for _ in range(m):
        Phi = _rk4(sys, t, Phi, h)
        t += h
    return Phi


def _drift(omega, Phi):
    return float(np.max(np.abs(Phi.T @ omega @ Phi - omega)))


@dataclass(frozen=True, eq=False)
class Flow:
    """Integrated flow on a uniform grid: ``ts`` (N,), ``Phis`` (N, 2n, 2n), ``drifts`` (N,)."""

    system: JacobiSystem
    ts: np.ndarray
    Phis: np.ndarray
    drifts: np.ndarray

    def __len__(self):
        return len(self.ts)

    def __getitem__(self, i) -> FlowSample:
        return FlowSample(float(self.ts[i]), self.Phis[i], float(self.drifts[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def max_drift(self) -> float:
        return float(np.max(self.drifts))

    def at(self, t) -> np.ndarray:
        """``Phi_t`` at an arbitrary ``t``, integrated from the nearest preceding grid point."""
        ts = self.ts
        forward = ts[-1] > ts[0]
        lo, hi = (ts[0], ts[-1]) if forward else (ts[-1], ts[0])
        if not (lo - 1e-12 <= t <= hi + 1e-12):
            raise InvalidInputError(f"t={t} outside the integrated interval")
        if forward:
            k = int(np.searchsorted(ts, t, side="right")) - 1
        else:
            k = int(np.searchsorted(-ts, -t, side="right")) - 1
        k = min(max(k, 0), len(ts) - 1)
        return _propagate(self.system, float(ts[k]), self.Phis[k], float(t))


def integrate_flow(sys: JacobiSystem) -> Flow:
    """Fixed-step RK4 integration of ``(J, J')' = (J', M(t) J)`` with ``Phi_a = I``.

    Raises ``DriftError`` when the symplecticity residual exceeds
    ``drift_bound * max(1, |Phi|_max^2)``.
    """
    a, b = sys.a, sys.b
    m = max(1, math.ceil(abs(b - a) / sys.step - 1e-9))
    h = (b - a) / m
    n2 = 2 * sys.n
    omega = sys.space.omega
    ts = a + h * np.arange(m + 1)
    ts[-1] = b
    Phis = np.empty((m + 1, n2, n2))
    drifts = np.empty(m + 1)
    Phi = np.eye(n2)
    Phis[0], drifts[0] = Phi, 0.0
    for k in range(m):
        Phi = _rk4(sys, ts[k], Phi, h)
        Phis[k + 1] = Phi
        d = _drift(omega, Phi)
        drifts[k + 1] = d
        if d > sys.drift_bound * max(1.0, float(np.max(np.abs(Phi))) ** 2):
            raise DriftError(f"symplectic drift {d:.3e} at t={ts[k + 1]:.6g}; use a smaller step than {sys.step}")
    return Flow(sys, ts, Phis, drifts)


def _inverse(space_omega, Phi):
    """Symplectic inverse ``Omega^{-1} Phi^T Omega``."""
    return np.linalg.solve(space_omega, Phi.T @ space_omega)


def _path_frames(sys, Phis):
    """Frames of ``Phi_t^{-1}({0} + R^n)`` for a stack of flow matrices."""
    omega = sys.space.omega
    n = sys.n
    omega_inv = np.linalg.inv(omega)
    top = np.vstack([np.zeros((n, n)), np.eye(n)])
    return omega_inv @ np.swapaxes(Phis, -1, -2) @ (omega @ top)


class FlowEvaluator:
    """Evaluator for the Lagrangian path of a flow; also exposes ``phi(t)``."""

    def __init__(self, flow: Flow):
        self.flow = flow

    def phi(self, t):
        return self.flow.at(t)

    def __call__(self, t):
        return _path_frames(self.flow.system, self.phi(t)[None])[0]


def lagrangian_path_from_flow(flow: Flow) -> LagrangianPath:
    """The path ``l(t) = Phi_t^{-1}({0} + R^n)``; ``l(a)`` is exactly ``{0} + R^n``."""
    sys = flow.system
    ts, Phis = flow.ts, flow.Phis
    if ts[-1] < ts[0]:
        raise InvalidInputError("paths are built from forward flows")
    return LagrangianPath(sys.space, ts, _path_frames(sys, Phis), FlowEvaluator(flow))


# ---------------------------------------------------------------------------
# initial submanifolds


@dataclass(frozen=True, eq=False)
class SubmanifoldData:
    """Tangent space ``P`` (orthonormal columns) and shape operator of an initial submanifold.

    ``shape`` is the matrix of the second fundamental form ``S`` as an operator
    on ``P`` in the basis ``P_basis``: ``S p_i = sum_j shape[j, i] p_j``.
    """

    g: np.ndarray
    P_basis: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        g = np.array(self.g, dtype=float).reshape(-1)
        n = g.size
        P = np.array(self.P_basis, dtype=float).reshape(n, -1)
        k = P.shape[1]
        shp = np.array(self.shape, dtype=float).reshape(k, k)
        if k:
            if np.linalg.svd(P, compute_uv=False)[-1] < 1e-10:
                raise RankDeficiencyError("P basis is linearly dependent")
            P = orthonormalize(P)
            if np.max(np.abs(g[0] * P[0])) > 1e-12:
                raise InvalidInputError("P must be orthogonal to the geodesic direction e_1")
        G = P.T @ (g[:, None] * P)
        # shape was given in the caller's basis; move it to the orthonormalized one
        if k:
            R = np.linalg.lstsq(P, np.array(self.P_basis, dtype=float).reshape(n, k), rcond=None)[0]
            shp = R @ shp @ np.linalg.inv(R)
            if inertia(SymmetricForm(G, scale=1.0)).nullity:
                raise InvalidInputError("the metric restricted to P is degenerate")
            form = shp.T @ G
            if np.max(np.abs(form - form.T)) > 1e-9 * max(1.0, np.max(np.abs(form))):
                raise InvalidInputError("shape operator is not g-symmetric on P")
        for arr in (g, P, shp):
            arr.setflags(write=False)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "P_basis", P)
        object.__setattr__(self, "shape", shp)

    @classmethod
    def point(cls, g):
        n = np.size(g)
        return cls(g, np.zeros((n, 0)), np.zeros((0, 0)))

    @property
    def dim(self) -> int:
        return self.P_basis.shape[1]

    @property
    def codim(self) -> int:
        return self.g.size - self.dim

    @property
    def restricted_metric(self) -> SymmetricForm:
        return restrict_form(SymmetricForm(np.diag(self.g), scale=1.0), self.P_basis)

    @property
    def n_minus(self) -> int:
        return inertia(self.restricted_metric).index

    @property
    def n_plus(self) -> int:
        return inertia(self.restricted_metric).coindex

    @property
    def is_point(self) -> bool:
        return self.dim == 0


def lagrangian_from_submanifold(sys: JacobiSystem, data: SubmanifoldData) -> LagrangianFrame:
    """``{(v, w) : v in P, w + S v in P^perp}`` with ``perp`` taken for ``g``."""
    n = sys.n
    if data.g.size != n or not np.array_equal(data.g, sys.g):
        raise InvalidInputError("submanifold data was built for another metric")
    P = data.P_basis
    k = data.dim
    if k == 0:
        return sys.L0
    # P^perp = null space of P^T g
    _, _, Vt = np.linalg.svd(P.T * sys.g[None, :])
    perp = Vt[k:].T
    cols = [np.vstack([np.zeros((n, n - k)), perp]), np.vstack([P, -(P @ data.shape)])]
    return LagrangianFrame(sys.space, np.hstack(cols))


# ---------------------------------------------------------------------------
# conjugate and focal instants


@dataclass(frozen=True)
class FocalEvent:
    t: float
    multiplicity: int
    A_basis: np.ndarray
    inertia_on_A: Inertia
    degenerate: bool

    @property
    def n_minus(self) -> int:
        return self.inertia_on_A.index

    @property
    def n_plus(self) -> int:
        return self.inertia_on_A.coindex

    @property
    def signature(self) -> int:
        return self.inertia_on_A.signature


def _phi_at(path, sys, t):
    ev = path.evaluator
    if isinstance(ev, FlowEvaluator):
        return ev.phi(t)
    return integrate_flow(sys.with_interval(sys.a, t))[-1].Phi if t != sys.a else np.eye(2 * sys.n)


def _event_at(path, L_ref, sys, t, tol):
    F = path.evaluate(t)
    s = np.linalg.svd(np.hstack([F, L_ref.frame]), compute_uv=False)
    mult = int(np.count_nonzero(s < tol))
    if mult == 0:
        return None
    n = sys.n
    image = _phi_at(path, sys, t) @ L_ref.frame
    U, W = image[:n], image[n:]
    _, _, Vt = np.linalg.svd(U)
    A = orthonormalize(W @ Vt[-mult:].T)
    inn = inertia(restrict_form(SymmetricForm(np.diag(sys.g), scale=1.0), A))
    return FocalEvent(float(t), mult, A, inn, inn.nullity > 0)


def sigma_min_profile(path, L_ref):
    return margins_batch(path.frames, L_ref.frame)


def detect_focal_instants(path: LagrangianPath, L_ref: LagrangianFrame, sys: JacobiSystem, tol=EVENT_TOL,
                          include_start=False):
    """Instants ``t`` in ``]a, b]`` where ``l(t)`` meets ``L_ref``.

    Local minima of the smallest singular value of ``[l(t) | L_ref]`` on the
    sample grid are refined by bounded scalar minimization; an instant is an
    event when that value drops below ``tol``.  Events closer than the
    localization tolerance are merged and flagged degenerate.  More than
    ``MAX_EVENTS`` events trigger an ``AccumulationWarning`` and a truncated list.
    """
    ts = path.ts
    s = sigma_min_profile(path, L_ref)
    span = abs(path.b - path.a)
    xatol = 1e-12 * max(1.0, span)
    cluster = 1e-8 * max(1.0, span)
    N = len(ts)
    candidates = []
    first = 0 if include_start else 1
    for k in range(first, N):
        left = s[k - 1] if k > 0 else np.inf
        right = s[k + 1] if k < N - 1 else np.inf
        if s[k] < left and s[k] <= right:
            candidates.append(k)

    def f(t):
        return float(np.linalg.svd(np.hstack([path.evaluate(t), L_ref.frame]), compute_uv=False)[-1])

    times = []
    for k in candidates:
        if s[k] < tol * 1e-3:
            times.append(float(ts[k]))
            continue
        lo = ts[max(k - 1, 0)]
        hi = ts[min(k + 1, N - 1)]
        if k == 0 and not include_start:
            continue
        res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": xatol, "maxiter": 500})
        t_best, v_best = float(res.x), float(res.fun)
        for edge in (lo, hi):
            if (edge == path.b or (include_start and edge == path.a)) and f(edge) <= v_best:
                t_best, v_best = float(edge), f(edge)
        if v_best < tol:
            times.append(t_best)
    times.sort()
    events = []
    for t in times:
        if events and abs(t - events[-1].t) <= cluster:
            prev = events[-1]
            events[-1] = FocalEvent(prev.t, prev.multiplicity, prev.A_basis, prev.inertia_on_A, True)
            continue
        if not include_start and t <= path.a:
            continue
        ev = _event_at(path, L_ref, sys, t, tol)
        if ev is not None:
            events.append(ev)
        if len(events) > MAX_EVENTS:
            warnings.warn(
                f"more than {MAX_EVENTS} intersection instants: accumulation suspected", AccumulationWarning,
                stacklevel=2,
            )
            return events[:MAX_EVENTS]
    return events


@dataclass(frozen=True)
class ContributionLedger:
    initial: int
    interior: tuple
    final: int

    @property
    def total(self) -> int:
        return self.initial + sum(c for _, c in self.interior) + self.final


def endpoint_contributions(sys: JacobiSystem, data: SubmanifoldData | None, events, b=None, tol=None) -> ContributionLedger:
    """Closed-form Maslov index of the flow path relative to ``L_P`` from its event list.

    Initial contribution ``n_+(g) - n_+(g|P)``, interior events add the
    signature of ``g`` on the event's derivative space, an event at the final
    instant adds minus its index.
    """
    b = sys.b if b is None else b
    tol = 1e-8 * max(1.0, abs(b - sys.a)) if tol is None else tol
    if any(e.degenerate for e in events):
        raise InvalidInputError("degenerate events present: no closed-form contribution ledger")
    n_plus_P = 0 if data is None else data.n_plus
    initial = sys.n_plus - n_plus_P
    interior = tuple((e.t, e.signature) for e in events if sys.a < e.t < b - tol)
    final = sum(-e.n_minus for e in events if abs(e.t - b) <= tol)
    return ContributionLedger(initial, interior, final)
