"""Symplectic spaces, Lagrangian frames and the chart atlas of the Lagrangian Grassmannian.

A symplectic space is ``R^{2n}`` with ``omega(x, y) = x @ Omega @ y``.  Lagrangian
subspaces are stored as ``2n x n`` frames with orthonormal columns.  For a
Lagrangian decomposition ``(L0, L1)`` the chart sends a Lagrangian ``L``
transverse to ``L1`` to the symmetric form ``omega(T., .)`` on ``L0``, where
``T: L0 -> L1`` is the linear map whose graph is ``L``.  Forms are expressed in
the stored (orthonormal) basis of ``L0``.

With the standard form on ``R^2`` (``omega(e1, e2) = 1``) the chart
``(span e1, span e2)`` sends ``span (1, s)`` to the 1x1 form ``[-s]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidInputError,
    NotInChartDomainError,
    NotLagrangianError,
    RankDeficiencyError,
    TransversalityError,
)
from .symforms import SymmetricForm, inertia

INTERSECTION_TOL = 1e-8
ISOTROPY_TOL = 1e-8
TRANSVERSALITY_FLOOR = 1e-6


def orthonormalize(frame):
    """Orthonormal basis of the column span, via QR with a positive-diagonal R.

    Works on a single ``(m, k)`` array or a stack ``(N, m, k)``.
    """
    Q, R = np.linalg.qr(frame)
    d = np.sign(np.diagonal(R, axis1=-2, axis2=-1))
    d = np.where(d == 0, 1.0, d)
    return Q * d[..., None, :]


@dataclass(frozen=True, eq=False)
class SymplecticSpace:
    omega: np.ndarray

    def __post_init__(self):
        w = np.array(self.omega, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] % 2 or w.shape[0] == 0:
            raise InvalidInputError(f"omega must be a nonempty even square matrix, got {w.shape}")
        if not np.all(np.isfinite(w)):
            raise InvalidInputError("omega has non-finite entries")
        if np.max(np.abs(w + w.T)) > 1e-12 * max(1.0, np.max(np.abs(w))):
            raise InvalidInputError("omega is not antisymmetric")
        if np.linalg.matrix_rank(w) < w.shape[0]:
            raise InvalidInputError("omega is degenerate")
        w.setflags(write=False)
        object.__setattr__(self, "omega", w)

    @property
    def n(self) -> int:
        return self.omega.shape[0] // 2

    @property
    def dim(self) -> int:
        return self.omega.shape[0]

    def form(self, x, y) -> float:
        return float(np.asarray(x) @ self.omega @ np.asarray(y))

    def opposite(self) -> "SymplecticSpace":
        return SymplecticSpace(-self.omega)

    def same_as(self, other) -> bool:
        return other is self or np.array_equal(self.omega, other.omega)

    def is_symplectic(self, A, tol=1e-10) -> bool:
        A = np.asarray(A, dtype=float)
        return bool(np.max(np.abs(A.T @ self.omega @ A - self.omega)) <= tol)

    @cached_property
    def darboux(self) -> np.ndarray:
        """Matrix ``D`` with ``D.T @ omega @ D`` equal to the standard form.

        Built by symplectic Gram-Schmidt on the canonical basis.
        """
        n, w = self.n, self.omega
        pool = [v for v in np.eye(self.dim)]
        es, fs = [], []
        for _ in range(n):
            e = max(pool, key=lambda v: np.linalg.norm(v))
            pool = [v for v in pool if v is not e]
            pairings = [abs(e @ w @ v) for v in pool]
            j = int(np.argmax(pairings))
            f = pool.pop(j)
            f = f / (e @ w @ f)
            es.append(e)
            fs.append(f)
            pool = [v - (v @ w @ f) * e + (v @ w @ e) * f for v in pool]
        return np.column_stack(es + fs)

    @cached_property
    def complex_structure(self) -> np.ndarray:
        """``D J0 D^{-1}``: maps every Lagrangian to a Lagrangian complement of it."""
        n = self.n
        J0 = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
        D = self.darboux
        return D @ J0 @ np.linalg.inv(D)


def standard_space(n: int) -> SymplecticSpace:
    """``R^{2n}`` with ``omega(e_i, e_{n+i}) = 1``."""
    if int(n) != n or n < 1:
        raise InvalidInputError(f"half-dimension must be a positive integer, got {n!r}")
    n = int(n)
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return SymplecticSpace(np.block([[zero, eye], [-eye, zero]]))


@dataclass(frozen=True, eq=False)
class LagrangianFrame:
    space: SymplecticSpace
    frame: np.ndarray

    def __post_init__(self):
        F = np.array(self.frame, dtype=float)
        if F.ndim == 1:
            F = F.reshape(-1, 1)
        n = self.space.n
        if F.shape != (2 * n, n):
            raise DimensionMismatchError(f"expected a ({2 * n}, {n}) frame, got {F.shape}")
        if not np.all(np.isfinite(F)):
            raise InvalidInputError("frame has non-finite entries")
        s = np.linalg.svd(F, compute_uv=False)
        if s[-1] <= 1e-12 * s[0]:
            raise RankDeficiencyError("frame does not have full column rank")
        Q = orthonormalize(F)
        residual = np.max(np.abs(Q.T @ self.space.omega @ Q))
        if residual > ISOTROPY_TOL * max(1.0, np.max(np.abs(self.space.omega))):
            raise NotLagrangianError(f"frame is not isotropic (residual {residual:.3e})")
        Q.setflags(write=False)
        object.__setattr__(self, "frame", Q)

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def isotropy_residual(self) -> float:
        return float(np.max(np.abs(self.frame.T @ self.space.omega @ self.frame)))

    def projector(self):
        return self.frame @ self.frame.T

    def contains(self, v, tol=1e-9) -> bool:
        v = np.asarray(v, dtype=float)
        return bool(np.linalg.norm(v - self.projector() @ v) <= tol * max(1.0, np.linalg.norm(v)))


def span(space: SymplecticSpace, *vectors) -> LagrangianFrame:
    """Lagrangian spanned by the given vectors (or by the columns of one array)."""
    if len(vectors) == 1 and np.ndim(vectors[0]) == 2:
        return LagrangianFrame(space, vectors[0])
    return LagrangianFrame(space, np.column_stack(vectors))


def complement(L: LagrangianFrame) -> LagrangianFrame:
    """A Lagrangian transverse to ``L`` (the Euclidean orthogonal one for the standard form)."""
    return LagrangianFrame(L.space, L.space.complex_structure @ L.frame)


def _same_space(L, M):
    if not L.space.same_as(M.space):
        raise DimensionMismatchError("Lagrangians live in different symplectic spaces")


def transversality_margin(L, M) -> float:
    """Smallest singular value of the concatenated orthonormal frames."""
    _same_space(L, M)
    return float(np.linalg.svd(np.hstack([L.frame, M.frame]), compute_uv=False)[-1])


def margins_batch(frames, G, exact=True) -> np.ndarray:
    """Transversality margins of a stack of orthonormal frames against frame ``G``.

    With ``exact=False`` the margin is read off ``1 - sigma_max(F^T G)``, which
    equals the squared margin for orthonormal frames; this is much cheaper but
    loses all accuracy below about ``1e-8``, so use it only for threshold
    tests well above that.
    """
    frames = np.asarray(frames)
    if not exact:
        C = np.swapaxes(frames, -1, -2) @ G
        top = np.linalg.eigvalsh(C @ np.swapaxes(C, -1, -2))[..., -1]
        return np.sqrt(np.clip(1.0 - np.sqrt(np.clip(top, 0.0, None)), 0.0, None))
    stacked = np.concatenate([frames, np.broadcast_to(G, frames.shape[:-1] + (G.shape[1],))], axis=-1)
    return np.linalg.svd(stacked, compute_uv=False)[..., -1]


def intersection_dimension(L, M, tol=INTERSECTION_TOL) -> int:
    """``dim(L cap M) = 2n - rank [L | M]``."""
    _same_space(L, M)
    s = np.linalg.svd(np.hstack([L.frame, M.frame]), compute_uv=False)
    return int(np.count_nonzero(s < tol))


def intersection_basis(L, M, tol=INTERSECTION_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of ``L cap M``."""
    _same_space(L, M)
    n = L.n
    _, s, Vt = np.linalg.svd(np.hstack([L.frame, M.frame]))
    k = int(np.count_nonzero(s < tol))
    if k == 0:
        return np.zeros((2 * n, 0))
    coeffs = Vt[-k:].T
    return orthonormalize(L.frame @ coeffs[:n])


def subspace_distance(L, M) -> float:
    """Sine of the largest principal angle between ``L`` and ``M``."""
    A, B = L.frame, M.frame
    return float(np.linalg.norm(B - A @ (A.T @ B), 2))


def same_subspace(L, M, tol=1e-8) -> bool:
    return subspace_distance(L, M) <= tol


@dataclass(frozen=True, eq=False)
class Chart:
    """The chart of Lagrangians transverse to ``L1``, centred at ``L0``."""

    L0: LagrangianFrame
    L1: LagrangianFrame

    def __post_init__(self):
        _same_space(self.L0, self.L1)
        if intersection_dimension(self.L0, self.L1) != 0:
            raise TransversalityError("chart requires transverse L0 and L1")

    @property
    def space(self):
        return self.L0.space

    @cached_property
    def basis(self):
        return np.hstack([self.L0.frame, self.L1.frame])

    @cached_property
    def pairing(self):
        """``K[j, i] = omega(b_j, a_i)`` for ``a`` in ``L0`` and ``b`` in ``L1``."""
        return self.L1.frame.T @ self.space.omega @ self.L0.frame


def chart_forms(omega, A, B, frames):
    """Chart matrices of a stack of frames; returns ``(forms, domain_margins)``.

    ``A`` and ``B`` are the frames of the centre and of the complement.  The
    domain margin is the smallest singular value of the ``A``-coefficient block.
    """
    n = A.shape[1]
    coeffs = np.linalg.solve(np.hstack([A, B]), frames)
    X = coeffs[..., :n, :]
    Y = coeffs[..., n:, :]
    K = B.T @ omega @ A
    Xt = np.swapaxes(X, -1, -2)
    S = np.linalg.solve(Xt, np.swapaxes(Y, -1, -2) @ K)
    S = 0.5 * (S + np.swapaxes(S, -1, -2))
    margins = np.linalg.svd(X, compute_uv=False)[..., -1]
    return S, margins


def chart_apply(c: Chart, L: LagrangianFrame) -> SymmetricForm:
    _same_space(c.L0, L)
    if intersection_dimension(L, c.L1) != 0:
        raise NotInChartDomainError("Lagrangian is not transverse to the chart complement")
    S, _ = chart_forms(c.space.omega, c.L0.frame, c.L1.frame, L.frame)
    return SymmetricForm(S, scale=1.0)


def chart_invert(c: Chart, B) -> LagrangianFrame:
    """The Lagrangian ``L`` with ``chart_apply(c, L) == B``."""
    M = B.matrix if isinstance(B, SymmetricForm) else np.asarray(B, dtype=float)
    n = c.space.n
    if M.shape != (n, n):
        raise DimensionMismatchError(f"expected an {n}x{n} form, got {M.shape}")
    M = 0.5 * (M + M.T)
    # T a_i = sum_j Z[j, i] b_j with Z.T @ K = M
    Z = np.linalg.solve(c.pairing.T, M)
    return LagrangianFrame(c.space, c.L0.frame + c.L1.frame @ Z)


def transition_reference(L0, L1, L) -> SymmetricForm:
    """The constant form ``C`` on ``L0`` relating the charts centred at ``L0`` and ``L1``.

    For every ``alpha`` transverse to ``L``:
    ``n_+(chart_{L1,L}(alpha)) == n_+(chart_{L0,L}(alpha) + C)``.
    ``C`` is the push-forward, along the projection ``L1 -> L0`` with kernel
    ``L``, of the form ``chart_{L1,L}(L0)``.
    """
    _same_space(L0, L1)
    _same_space(L0, L)
    if intersection_dimension(L, L0) or intersection_dimension(L, L1):
        raise TransversalityError("L must be transverse to both L0 and L1")
    n = L0.n
    Q = chart_apply(Chart(L1, L), L0).matrix
    # eta(b_j) = L0-component of b_j in the splitting L0 + L
    E = np.linalg.solve(np.hstack([L0.frame, L.frame]), L1.frame)[:n]
    Einv = np.linalg.inv(E)
    return SymmetricForm(Einv.T @ Q @ Einv, scale=1.0)


@dataclass(frozen=True, eq=False)
class PSData:
    """A subspace ``P`` of the complement ``L1`` (basis as columns) and a form ``S`` on it."""

    P_basis: np.ndarray
    S: SymmetricForm

    def __post_init__(self):
        P = np.array(self.P_basis, dtype=float)
        if P.ndim == 1:
            P = P.reshape(-1, 1)
        S = self.S if isinstance(self.S, SymmetricForm) else SymmetricForm(np.reshape(self.S, (P.shape[1],) * 2))
        if S.dim != P.shape[1]:
            raise DimensionMismatchError("S must be a form on P")
        if P.shape[1] and np.linalg.svd(P, compute_uv=False)[-1] <= 1e-12:
            raise RankDeficiencyError("P basis is linearly dependent")
        object.__setattr__(self, "P_basis", P)
        object.__setattr__(self, "S", S)

    @property
    def dim(self) -> int:
        return self.P_basis.shape[1]


def lagrangian_from_ps(c: Chart, data: PSData) -> LagrangianFrame:
    """``{v + w : v in P, w in L0, omega(w, .)|_P + S(v, .) = 0}``."""
    P = data.P_basis
    A = c.L0.frame
    n, k = c.space.n, data.dim
    if P.shape[0] != 2 * n:
        raise DimensionMismatchError("P vectors have the wrong length")
    if k and np.max(np.linalg.norm(P - c.L1.frame @ (c.L1.frame.T @ P), axis=0)) > 1e-9 * max(
        1.0, np.max(np.linalg.norm(P, axis=0))
    ):
        raise InvalidInputError("P is not contained in the chart complement L1")
    if k == 0:
        return LagrangianFrame(c.space, A)
    G = A.T @ c.space.omega @ P  # omega(a_i, p_j)
    system = np.hstack([data.S.matrix, G.T])  # unknowns (coefficients on P, coefficients on L0)
    _, s, Vt = np.linalg.svd(system)
    null = Vt[k:].T
    frame = P @ null[:k] + A @ null[k:]
    return LagrangianFrame(c.space, frame)


def ps_from_lagrangian(c: Chart, L: LagrangianFrame, tol=INTERSECTION_TOL) -> PSData:
    """Inverse of ``lagrangian_from_ps``: ``P`` is the projection of ``L`` to ``L1`` along ``L0``."""
    _same_space(c.L0, L)
    n = c.space.n
    coeffs = np.linalg.solve(c.basis, L.frame)
    X, Y = coeffs[:n], coeffs[n:]
    U, s, Vt = np.linalg.svd(Y)
    r = int(np.count_nonzero(s > tol))
    if r == 0:
        return PSData(np.zeros((2 * n, 0)), SymmetricForm(np.zeros((0, 0))))
    P = c.L1.frame @ U[:, :r]
    Z = Vt[:r].T / s[:r]  # Y @ Z = U[:, :r]
    W = c.L0.frame @ (X @ Z)
    S = -(W.T @ c.space.omega @ P)
    return PSData(P, SymmetricForm(S, scale=1.0))


def haar_lagrangian_std(n, rng) -> np.ndarray:
    """Frame ``[Re U; Im U]`` of a Haar-random unitary ``U`` (a Lagrangian for the standard form)."""
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    Q = Q * (np.diagonal(R) / np.abs(np.diagonal(R)))
    return np.vstack([Q.real, Q.imag])


def random_lagrangian(space, seed=None, transverse_to=(), floor=TRANSVERSALITY_FLOOR, max_tries=64):
    """A pseudo-random Lagrangian transverse to every frame in ``transverse_to``.

    Draws are deterministic in ``seed`` and are repeated until every
    transversality margin exceeds ``floor``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    D = space.darboux
    for other in transverse_to:
        if not other.space.same_as(space):
            raise DimensionMismatchError("constraint Lagrangian lives in another space")
    for _ in range(max_tries):
        L = LagrangianFrame(space, D @ haar_lagrangian_std(space.n, rng))
        if all(transversality_margin(L, M) > floor for M in transverse_to):
            return L
    raise TransversalityError(f"no transverse Lagrangian found in {max_tries} draws")


def random_lagrangian_meeting(L, k, seed=None, transverse_to=()):
    """A random Lagrangian meeting ``L`` in exactly ``k`` dimensions.

    Built in a chart centred at ``L`` as the preimage of a random symmetric
    form of nullity ``k``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = L.n
    if not 0 <= k <= n:
        raise InvalidInputError(f"intersection dimension must lie in [0, {n}]")
    for _ in range(64):
        comp = random_lagrangian(L.space, rng, transverse_to=[L])
        Q = orthonormalize(rng.standard_normal((n, n)))
        d = rng.uniform(0.5, 2.0, n) * rng.choice([-1.0, 1.0], n)
        d[:k] = 0.0
        M = chart_invert(Chart(L, comp), (Q * d) @ Q.T)
        if all(transversality_margin(M, X) > TRANSVERSALITY_FLOOR for X in transverse_to):
            return M
    raise TransversalityError("could not satisfy the extra transversality constraints")
