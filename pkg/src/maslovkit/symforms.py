"""Symmetric bilinear forms: inertia, kernels, restrictions and perturbation bounds.

Rank decisions use the eigenvalue cut ``tol_rank * max(rho, scale)`` where
``rho`` is the spectral radius of the form and ``scale`` an optional absolute
magnitude (zero by default, i.e. a purely relative cut).  Forms built from
orthonormal frames carry ``scale = 1`` so that a form that vanishes up to
roundoff is recognised as zero.  The default ``tol_rank`` is ``1e-9`` and may
be overridden through the ``MASLOVKIT_TOL`` environment variable.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError, RankDeficiencyError

DEFAULT_TOL = 1e-9
MARGINAL_FACTOR = 10.0


def default_tol():
    raw = os.environ.get("MASLOVKIT_TOL")
    if not raw:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise InvalidInputError(f"MASLOVKIT_TOL is not a number: {raw!r}") from None
    if not np.isfinite(tol) or tol < 0:
        raise InvalidInputError(f"MASLOVKIT_TOL must be a nonnegative float, got {raw!r}")
    return tol


@dataclass(frozen=True)
class Inertia:
    """Index (negative count), coindex (positive count) and nullity of a form."""

    index: int
    coindex: int
    nullity: int
    marginal: bool = False

    @property
    def signature(self) -> int:
        return self.coindex - self.index

    @property
    def dim(self) -> int:
        return self.index + self.coindex + self.nullity

    def as_tuple(self):
        return (self.index, self.coindex, self.nullity)


def _count_eigenvalues(w, tol, scale=0.0):
    """Inertia of a form from its eigenvalues ``w``."""
    d = len(w)
    if d == 0:
        return Inertia(0, 0, 0)
    ref = max(float(np.max(np.abs(w))), scale)
    if ref == 0.0:
        return Inertia(0, 0, d)
    cut = tol * ref
    pos = int(np.count_nonzero(w > cut))
    neg = int(np.count_nonzero(w < -cut))
    a = np.abs(w)
    marginal = bool(np.any((a > cut / MARGINAL_FACTOR) & (a < cut * MARGINAL_FACTOR)))
    return Inertia(neg, pos, d - pos - neg, marginal)


@dataclass(frozen=True, eq=False)
class SymmetricForm:
    """A real symmetric bilinear form given by its Gram matrix.

    The matrix is symmetrized as ``(M + M.T) / 2`` on construction and stored
    read-only.
    """

    matrix: np.ndarray
    tol_rank: float | None = None
    scale: float = 0.0

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInputError(f"expected a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidInputError("form has non-finite entries")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        tol = default_tol() if self.tol_rank is None else float(self.tol_rank)
        if tol < 0:
            raise InvalidInputError("tol_rank must be nonnegative")
        object.__setattr__(self, "tol_rank", tol)
        if not self.scale >= 0:
            raise InvalidInputError("scale must be nonnegative")
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def _eigh(self):
        if self.dim == 0:
            return np.zeros(0), np.zeros((0, 0))
        return np.linalg.eigh(self.matrix)

    @property
    def eigenvalues(self):
        return self._eigh[0]

    @property
    def cut(self) -> float:
        w = self.eigenvalues
        return self.tol_rank * max(float(np.max(np.abs(w))), self.scale) if len(w) else 0.0

    def __call__(self, u, v):
        return float(np.asarray(u) @ self.matrix @ np.asarray(v))

    def __add__(self, other):
        if not isinstance(other, SymmetricForm):
            return NotImplemented
        _check_same_dim(self, other)
        return SymmetricForm(self.matrix + other.matrix, self.tol_rank, max(self.scale, other.scale))

    def __sub__(self, other):
        if not isinstance(other, SymmetricForm):
            return NotImplemented
        _check_same_dim(self, other)
        return SymmetricForm(self.matrix - other.matrix, self.tol_rank, max(self.scale, other.scale))

    def __neg__(self):
        return SymmetricForm(-self.matrix, self.tol_rank, self.scale)

    def __mul__(self, scalar):
        return SymmetricForm(float(scalar) * self.matrix, self.tol_rank, abs(float(scalar)) * self.scale)

    __rmul__ = __mul__

    def congruent(self, A):
        """The form ``A.T @ B @ A``."""
        A = np.asarray(A, dtype=float)
        grow = float(np.linalg.norm(A, 2)) ** 2 if A.size else 0.0
        return SymmetricForm(A.T @ self.matrix @ A, self.tol_rank, self.scale * grow)

    def __repr__(self):
        return f"SymmetricForm(dim={self.dim}, inertia={inertia(self).as_tuple()})"


def as_form(B, tol_rank=None) -> SymmetricForm:
    if isinstance(B, SymmetricForm):
        return B
    return SymmetricForm(B, tol_rank)


def _check_same_dim(B, C):
    if B.dim != C.dim:
        raise DimensionMismatchError(f"forms have dimensions {B.dim} and {C.dim}")


def inertia(B) -> Inertia:
    B = as_form(B)
    return _count_eigenvalues(B.eigenvalues, B.tol_rank, B.scale)


def n_plus(B) -> int:
    return inertia(B).coindex


def n_minus(B) -> int:
    return inertia(B).index


def signature(B) -> int:
    return inertia(B).signature


def inertia_batch(matrices, tol=None, scale=0.0):
    """Inertias of a stack of symmetric matrices of shape ``(N, d, d)``."""
    tol = default_tol() if tol is None else tol
    matrices = np.asarray(matrices, dtype=float)
    if matrices.shape[-1] == 0:
        return [Inertia(0, 0, 0) for _ in range(matrices.shape[0])]
    sym = 0.5 * (matrices + np.swapaxes(matrices, -1, -2))
    w = np.linalg.eigvalsh(sym)
    return [_count_eigenvalues(row, tol, scale) for row in w]


def kernel_basis(B) -> np.ndarray:
    """Orthonormal basis of the numerical kernel, as the columns of a ``(d, k)`` array."""
    B = as_form(B)
    w, V = B._eigh
    if B.dim == 0:
        return np.zeros((0, 0))
    ref = max(float(np.max(np.abs(w))), B.scale)
    if ref == 0.0:
        return np.eye(B.dim)
    mask = np.abs(w) <= B.tol_rank * ref
    return V[:, mask].copy()


def restrict_form(B, W) -> SymmetricForm:
    """Restriction of ``B`` to the span of the columns of ``W``.

    Entry ``(i, j)`` of the result is ``B(w_i, w_j)``.
    """
    B = as_form(B)
    W = np.asarray(W, dtype=float)
    if W.ndim == 1:
        W = W.reshape(-1, 1)
    if W.size == 0:
        return SymmetricForm(np.zeros((0, 0)), B.tol_rank, B.scale)
    if W.shape[0] != B.dim:
        raise DimensionMismatchError(f"vectors of length {W.shape[0]} for a form of dim {B.dim}")
    s = np.linalg.svd(W, compute_uv=False)
    if s[-1] <= 1e-12 * max(s[0], 1e-300) or W.shape[1] > W.shape[0]:
        raise RankDeficiencyError("restriction vectors are linearly dependent")
    return SymmetricForm(W.T @ B.matrix @ W, B.tol_rank, B.scale * s[0] ** 2)


@dataclass(frozen=True)
class PerturbationVerdict:
    """Outcome of ``-n_-(C) <= n_+(B+C) - n_+(B) <= n_+(C)``."""

    difference: int
    lower: int
    upper: int
    marginal: bool = False

    @property
    def lower_slack(self) -> int:
        return self.difference - self.lower

    @property
    def upper_slack(self) -> int:
        return self.upper - self.difference

    @property
    def holds(self) -> bool:
        return self.lower_slack >= 0 and self.upper_slack >= 0


def check_perturbation_bounds(B, C) -> PerturbationVerdict:
    B, C = as_form(B), as_form(C)
    _check_same_dim(B, C)
    iB, iC, iBC = inertia(B), inertia(C), inertia(B + C)
    return PerturbationVerdict(
        difference=iBC.coindex - iB.coindex,
        lower=-iC.index,
        upper=iC.coindex,
        marginal=iB.marginal or iC.marginal or iBC.marginal,
    )


@dataclass(frozen=True)
class DifferenceVerdict:
    left: int
    right: int
    marginal: bool = False

    @property
    def slack(self) -> int:
        return self.right - self.left

    @property
    def holds(self) -> bool:
        return self.left <= self.right


def check_difference_bound(B1, B2, C) -> DifferenceVerdict:
    """``|n+(B1) - n+(B2) - n+(B1+C) + n+(B2+C)| <= n-(C) + n+(C)``."""
    B1, B2, C = as_form(B1), as_form(B2), as_form(C)
    _check_same_dim(B1, B2)
    _check_same_dim(B1, C)
    parts = [inertia(B1), inertia(B2), inertia(B1 + C), inertia(B2 + C), inertia(C)]
    i1, i2, i1c, i2c, ic = parts
    left = abs(i1.coindex - i2.coindex - i1c.coindex + i2c.coindex)
    return DifferenceVerdict(left, ic.index + ic.coindex, any(p.marginal for p in parts))
