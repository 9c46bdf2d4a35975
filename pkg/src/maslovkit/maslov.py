"""Maslov index of sampled Lagrangian paths, crossing forms, Hörmander and Kashiwara indices.

The chart method splits ``[a, b]`` into pieces, picks on each piece a Lagrangian
``L1`` transverse to ``L0`` and to every sample of the piece, and adds up

    n_+(chart_{L0,L1}(l(end))) - n_+(chart_{L0,L1}(l(start)))

over the pieces.  No nondegeneracy is needed.  Values are kept doubled so that
the half-signature convention stays integral.
"""
from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import (
    DegenerateCrossingError,
    DimensionMismatchError,
    InconsistencyError,
    InvalidInputError,
    NotLagrangianError,
    RefinementError,
)
from .lagrangian import (
    TRANSVERSALITY_FLOOR,
    Chart,
    LagrangianFrame,
    SymplecticSpace,
    chart_apply,
    chart_forms,
    chart_invert,
    intersection_dimension,
    margins_batch,
    orthonormalize,
    random_lagrangian,
    subspace_distance,
    transversality_margin,
)
from .symforms import Inertia, SymmetricForm, default_tol, inertia, inertia_batch
from .verdict import Verdict, inequality

CONVENTIONS = ("paper", "robbin_salamon", "opposite_form")

MAX_GAP = 0.25          # continuity bound on consecutive samples (sine of largest principal angle)
TARGET_GAP = 0.02       # samples closer than this are thinned out before partitioning
SAFETY = 2.0            # margin must exceed SAFETY * local gap
MAX_DRAWS = 16
MAX_REFINEMENTS = 4000


def _gaps(frames):
    if len(frames) < 2:
        return np.zeros(0)
    C = np.swapaxes(frames[:-1], -1, -2) @ frames[1:]
    s = np.linalg.svd(C, compute_uv=False)[..., -1]
    return np.sqrt(np.clip(1.0 - s**2, 0.0, None))


def _isotropy(frames, omega):
    return np.max(np.abs(np.swapaxes(frames, -1, -2) @ omega @ frames), axis=(-2, -1))


@dataclass(frozen=True, eq=False)
class LagrangianPath:
    """A sampled curve ``[a, b] -> Lagrangian Grassmannian``.

    ``frames`` has shape ``(N, 2n, n)``; ``evaluator``, when present, maps a time
    in ``[a, b]`` to a (not necessarily orthonormal) frame of the path there.
    """

    space: SymplecticSpace
    ts: np.ndarray
    frames: np.ndarray
    evaluator: Callable[[float], np.ndarray] | None = None

    def __post_init__(self):
        ts = np.array(self.ts, dtype=float)
        F = np.array(self.frames, dtype=float)
        n = self.space.n
        if ts.ndim != 1 or len(ts) < 2:
            raise InvalidInputError("a path needs at least two samples")
        if not np.all(np.diff(ts) > 0):
            raise InvalidInputError("sample times must be strictly increasing")
        if F.shape != (len(ts), 2 * n, n):
            raise DimensionMismatchError(f"frames must have shape {(len(ts), 2 * n, n)}, got {F.shape}")
        F = orthonormalize(F)
        scale = max(1.0, float(np.max(np.abs(self.space.omega))))
        if np.max(_isotropy(F, self.space.omega)) > 1e-8 * scale:
            raise NotLagrangianError("path samples are not Lagrangian")
        ts.setflags(write=False)
        F.setflags(write=False)
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "frames", F)

    @classmethod
    def from_frames(cls, ts, frames, evaluator=None):
        frames = list(frames)
        return cls(frames[0].space, ts, np.stack([L.frame for L in frames]), evaluator)

    @classmethod
    def from_function(cls, space, func, a, b, num=65):
        ts = np.linspace(a, b, int(num))
        return cls(space, ts, np.stack([func(t) for t in ts]), func)

    @property
    def a(self) -> float:
        return float(self.ts[0])

    @property
    def b(self) -> float:
        return float(self.ts[-1])

    @property
    def n(self) -> int:
        return self.space.n

    def __len__(self):
        return len(self.ts)

    def frame_at(self, i) -> LagrangianFrame:
        return LagrangianFrame(self.space, self.frames[i])

    @property
    def start(self) -> LagrangianFrame:
        return self.frame_at(0)

    @property
    def end(self) -> LagrangianFrame:
        return self.frame_at(-1)

    @property
    def samples(self):
        return [(float(t), self.frame_at(i)) for i, t in enumerate(self.ts)]

    def evaluate(self, t) -> np.ndarray:
        """Orthonormal frame at time ``t`` (exact sample if ``t`` is a sample time)."""
        i = int(np.searchsorted(self.ts, t))
        if i < len(self.ts) and self.ts[i] == t:
            return self.frames[i]
        if self.evaluator is None:
            raise RefinementError("path has no evaluator; cannot sample between stored points")
        return orthonormalize(np.asarray(self.evaluator(float(t)), dtype=float))

    def restrict(self, alpha, beta) -> "LagrangianPath":
        """The sub-path on ``[alpha, beta]``; endpoints come from the evaluator when needed."""
        if not (self.a <= alpha < beta <= self.b):
            raise InvalidInputError(f"[{alpha}, {beta}] is not a subinterval of [{self.a}, {self.b}]")
        inside = (self.ts > alpha) & (self.ts < beta)
        ts = np.concatenate([[alpha], self.ts[inside], [beta]])
        frames = np.concatenate([[self.evaluate(alpha)], self.frames[inside], [self.evaluate(beta)]])
        return LagrangianPath(self.space, ts, frames, self.evaluator)

    def reversed(self) -> "LagrangianPath":
        a, b = self.a, self.b
        ev = None
        if self.evaluator is not None:
            inner = self.evaluator
            ev = lambda t: inner(a + b - t)  # noqa: E731
        return LagrangianPath(self.space, (a + b - self.ts)[::-1], self.frames[::-1], ev)


def concatenate(first: LagrangianPath, second: LagrangianPath) -> LagrangianPath:
    """Path that runs ``first`` then ``second`` (time-shifted to start at ``first.b``)."""
    if not first.space.same_as(second.space):
        raise DimensionMismatchError("paths live in different spaces")
    if subspace_distance(first.end, second.start) > 1e-8:
        raise InvalidInputError("paths do not share the junction Lagrangian")
    shift = first.b - second.a
    ts = np.concatenate([first.ts, second.ts[1:] + shift])
    frames = np.concatenate([first.frames, second.frames[1:]])
    ev = None
    if first.evaluator is not None and second.evaluator is not None:
        f_ev, s_ev, b = first.evaluator, second.evaluator, first.b

        def ev(t):
            return f_ev(t) if t <= b else s_ev(t - shift)

    return LagrangianPath(first.space, ts, frames, ev)


@dataclass(frozen=True)
class Segment:
    """One piece of the chart method: its interval, the complement used and the endpoint inertias."""

    t_start: float
    t_end: float
    reference: np.ndarray = field(repr=False)
    start: Inertia
    end: Inertia
    margin: float


@dataclass(frozen=True)
class Crossing:
    t: float
    kernel_dim: int
    form: Inertia
    contribution: int
    position: str  # "initial", "interior" or "final"


@dataclass(frozen=True)
class MaslovResult:
    value_times_two: int
    convention: str
    segment_log: tuple = ()
    degenerate_endpoints: tuple = ()
    crossings: tuple = ()
    marginal: bool = False

    @property
    def value(self) -> Fraction:
        return Fraction(self.value_times_two, 2)

    def __int__(self):
        if self.value_times_two % 2:
            raise ValueError(f"index {self.value} is not an integer")
        return self.value_times_two // 2


# ---------------------------------------------------------------------------
# sampling and partition


def _prepare_grid(path, max_gap=MAX_GAP, target_gap=TARGET_GAP):
    """Thin out over-dense samples and refine gaps above ``max_gap``."""
    ts = np.array(path.ts)
    frames = np.array(path.frames)
    budget = MAX_REFINEMENTS
    gaps = _gaps(frames)
    while np.any(gaps > max_gap):
        bad = np.flatnonzero(gaps > max_gap)
        if path.evaluator is None:
            k = int(bad[0])
            raise RefinementError(
                f"consecutive samples at t={ts[k]:.6g} are {gaps[k]:.3g} apart and the path has no evaluator"
            )
        budget -= len(bad)
        if budget < 0:
            raise RefinementError("refinement budget exhausted")
        tm = 0.5 * (ts[bad] + ts[bad + 1])
        ts = np.insert(ts, bad + 1, tm)
        frames = np.insert(frames, bad + 1, np.stack([path.evaluate(t) for t in tm]), axis=0)
        gaps = _gaps(frames)
    # thin: keep a sample whenever the distance from the last kept one would exceed target_gap
    N = len(ts)
    if N > 2 and np.max(gaps) < 0.5 * target_gap:
        keep = [0]
        last = 0
        k = 1
        while k < N - 1:
            # sample k is kept when its successor is too far from the last kept one
            ahead = frames[k + 1 : min(N, k + 257)]
            s = np.linalg.svd(frames[last].T @ ahead, compute_uv=False)[..., -1]
            over = np.flatnonzero(np.sqrt(np.clip(1.0 - s**2, 0.0, None)) > target_gap)
            if over.size:
                last = k + int(over[0])
                keep.append(last)
                k = last + 1
            else:
                k += len(ahead)
        keep.append(N - 1)
        ts, frames = ts[keep], frames[keep]
    return ts, frames


def _need(gaps, floor, safety):
    local = np.zeros(len(gaps) + 1)
    if len(gaps):
        local[:-1] = gaps
        local[1:] = np.maximum(local[1:], gaps)
    return np.maximum(floor, safety * local)


def _reach(frames, need, L1, i, chunk=64):
    """Last index ``j >= i`` such that samples ``i..j`` all clear their margin with ``L1``."""
    N = len(frames)
    j = i - 1
    start = i
    while start < N:
        stop = min(N, start + chunk)
        ok = margins_batch(frames[start:stop], L1, exact=False) >= need[start:stop]
        bad = np.flatnonzero(~ok)
        if bad.size:
            return j if bad[0] == 0 else start + int(bad[0]) - 1
        j = stop - 1
        start = stop
    return j


def _candidate(space, L0, seed, piece, draw, floor, anchor):
    """Frame of a complement for a piece.

    First the complement of ``anchor``, then tilted versions of it, then random
    draws; each must clear ``floor`` against ``L0``.
    """
    floor = max(floor, 1e-3)
    rng = np.random.default_rng([int(seed), int(piece), int(draw)])
    if draw < MAX_DRAWS // 2:
        base = space.complex_structure @ anchor
        if draw:
            # graph of a small symmetric map from the complement to the anchor
            n = space.n
            tilt = rng.standard_normal((n, n)) * (0.1 * draw)
            K = anchor.T @ space.omega @ base
            base = base + anchor @ np.linalg.solve(K.T, tilt + tilt.T)
        base = orthonormalize(base)
        if margins_batch(base[None], L0.frame, exact=False)[0] > floor:
            return base
    return random_lagrangian(space, rng, transverse_to=[L0], floor=floor).frame


_PARTITIONS = weakref.WeakKeyDictionary()


def _partition(path, L0, space, seed=0, floor=TRANSVERSALITY_FLOOR, safety=SAFETY, max_draws=MAX_DRAWS):
    """Split the (refined, thinned) grid into pieces each covered by one chart complement.

    Returns ``(ts, frames, pieces)`` with pieces ``(i, j, L1_frame, min_margin)``.
    Results are cached per path, keyed by the reference frame and the seed.
    """
    key = (L0.frame.tobytes(), int(seed), floor, safety, max_draws)
    cache = _PARTITIONS.setdefault(path, {})
    if key not in cache:
        cache[key] = _compute_partition(path, L0, space, seed, floor, safety, max_draws)
    return cache[key]


def _compute_partition(path, L0, space, seed, floor, safety, max_draws):
    ts, frames = _prepare_grid(path)
    pieces = []
    refinements = 0
    i = 0
    need = _need(_gaps(frames), floor, safety)
    while i < len(ts) - 1:
        best_j, best = i, None
        for draw in range(max_draws):
            anchor = frames[i] if draw % 2 == 0 or best_j == i else frames[(i + best_j + 1) // 2]
            L1 = _candidate(space, L0, seed, len(pieces), draw, floor, anchor)
            j = _reach(frames, need, L1, i)
            if j > best_j:
                best_j, best = j, L1
            if best_j == len(ts) - 1 or (best is not None and draw >= 3):
                break
        if best is None:
            if path.evaluator is None:
                raise RefinementError(f"no transverse chart covers the samples at t={ts[i]:.6g}; path too coarse")
            refinements += 1
            if refinements > MAX_REFINEMENTS:
                raise RefinementError("refinement budget exhausted")
            tm = 0.5 * (ts[i] + ts[i + 1])
            ts = np.insert(ts, i + 1, tm)
            frames = np.insert(frames, i + 1, path.evaluate(tm), axis=0)
            need = _need(_gaps(frames), floor, safety)
            continue
        m = float(np.min(margins_batch(frames[i : best_j + 1], best)))
        pieces.append((i, best_j, best, m))
        i = best_j
    return ts, frames, pieces


def _check_reference(path, L0):
    if not path.space.same_as(L0.space):
        raise DimensionMismatchError("reference Lagrangian lives in another space")


def maslov_index(path: LagrangianPath, L0: LagrangianFrame, convention="paper", seed=0, tol=None) -> MaslovResult:
    """Maslov index of ``path`` relative to ``L0`` by the chart method.

    ``convention`` is ``"paper"`` (coindex differences), ``"robbin_salamon"``
    (half signature differences) or ``"opposite_form"`` (coindex differences
    computed with ``-omega``).
    """
    if convention not in CONVENTIONS:
        raise InvalidInputError(f"unknown convention {convention!r}")
    _check_reference(path, L0)
    tol = default_tol() if tol is None else tol
    omega = -path.space.omega if convention == "opposite_form" else path.space.omega
    ts, frames, pieces = _partition(path, L0, path.space, seed)
    A = L0.frame
    total = 0
    log = []
    marginal = False
    for i, j, B, m in pieces:
        S, _ = chart_forms(omega, A, B, np.stack([frames[i], frames[j]]))
        start, end = inertia_batch(S, tol, scale=1.0)
        marginal |= start.marginal or end.marginal
        if convention == "robbin_salamon":
            total += end.signature - start.signature
        else:
            total += 2 * (end.coindex - start.coindex)
        log.append(Segment(float(ts[i]), float(ts[j]), B, start, end, m))
    degenerate = []
    if log and log[0].start.nullity:
        degenerate.append("initial")
    if log and log[-1].end.nullity:
        degenerate.append("final")
    return MaslovResult(total, convention, tuple(log), tuple(degenerate), marginal=marginal)


def mu(path, L0, seed=0) -> int:
    """Integer Maslov index under the coindex convention."""
    return int(maslov_index(path, L0, "paper", seed))


# ---------------------------------------------------------------------------
# crossing forms


def _derivative(Bfun, t, h, lo, hi):
    if t - h >= lo and t + h <= hi:
        return (Bfun(t + h) - Bfun(t - h)) / (2 * h)
    if t + 2 * h <= hi:
        return (-3 * Bfun(t) + 4 * Bfun(t + h) - Bfun(t + 2 * h)) / (2 * h)
    return (3 * Bfun(t) - 4 * Bfun(t - h) + Bfun(t - 2 * h)) / (2 * h)


def crossing_form(Bfun, t0, h, lo, hi, kernel_scale):
    """Restriction of ``B'(t0)`` to the numerical kernel of ``B(t0)``.

    Returns ``(B0 matrix, kernel basis)``.  Eigenvalues of ``B(t0)`` below
    ``kernel_scale * |B'(t0)|`` count as kernel.
    """
    D = _derivative(Bfun, t0, h, lo, hi)
    D = 0.5 * (D + D.T)
    w, V = np.linalg.eigh(Bfun(t0))
    dn = max(np.linalg.norm(D, 2), 1e-300)
    mask = np.abs(w) <= kernel_scale * dn + default_tol() * np.max(np.abs(w))
    if not np.any(mask):
        mask = np.abs(w) == np.min(np.abs(w))
    K = V[:, mask]
    return K.T @ D @ K, K, dn


def _state(i: Inertia):
    return (i.coindex, i.index)


def maslov_index_crossings(path: LagrangianPath, L0: LagrangianFrame, seed=0, tol=None) -> MaslovResult:
    """Maslov index as a sum of crossing-form contributions.

    Interior crossings add the signature of the crossing form, a crossing at
    the initial endpoint adds its coindex and one at the final endpoint
    subtracts its index.  Raises ``DegenerateCrossingError`` when a crossing
    form is singular.
    """
    _check_reference(path, L0)
    if path.evaluator is None:
        raise RefinementError("the crossing method needs a path evaluator")
    tol = default_tol() if tol is None else tol
    omega = path.space.omega
    a, b = path.a, path.b
    span_ = b - a
    h = 1e-5 * span_
    t_tol = 1e-10 * span_
    A = L0.frame

    # nudge interior samples that sit exactly on a crossing
    work = path
    for _ in range(8):
        ts, frames, pieces = _partition(work, L0, path.space, seed)
        bad = []
        for i, j, B, _m in pieces:
            S, _ = chart_forms(omega, A, B, frames[i : j + 1])
            for k, inn in enumerate(inertia_batch(S, tol, scale=1.0)):
                if inn.nullity and 0 < i + k < len(ts) - 1:
                    bad.append(i + k)
        if not bad:
            break
        ts = ts.copy()
        new_frames = frames.copy()
        for k in sorted(set(bad)):
            step = 1e-3 * min(ts[k] - ts[k - 1], ts[k + 1] - ts[k])
            ts[k] += step
            new_frames[k] = path.evaluate(ts[k])
        work = LagrangianPath(path.space, ts, new_frames, path.evaluator)
    else:
        raise RefinementError("could not move samples off crossing instants")

    crossings = []
    log = []
    for i, j, B, m in pieces:

        def Bfun(t, B=B):
            S, _ = chart_forms(omega, A, B, work.evaluate(t))
            return S

        S, _ = chart_forms(omega, A, B, frames[i : j + 1])
        states = inertia_batch(S, tol, scale=1.0)
        log.append(Segment(float(ts[i]), float(ts[j]), B, states[0], states[-1], m))
        slopes = np.linalg.norm(np.diff(S, axis=0), ord=2, axis=(1, 2)) / np.diff(ts[i : j + 1])
        lo_state = _state(states[0])
        if i == 0 and states[0].nullity:
            B0, K, dn = crossing_form(Bfun, a, h, a, b, 1e-6 * span_)
            c = _nondegenerate(B0, dn, a, slopes[0])
            crossings.append(Crossing(a, K.shape[1], c, c.coindex, "initial"))
            lo_state = (states[0].coindex + c.coindex, states[0].index + c.index)
        for k in range(i, j):
            hi_inn = states[k + 1 - i]
            hi_state = _state(hi_inn)
            final = None
            if k + 1 == len(ts) - 1 and hi_inn.nullity:
                B0, K, dn = crossing_form(Bfun, b, h, a, b, 1e-6 * span_)
                c = _nondegenerate(B0, dn, b, slopes[-1])
                final = Crossing(b, K.shape[1], c, -c.index, "final")
                hi_state = (hi_inn.coindex + c.index, hi_inn.index + c.coindex)
            if lo_state != hi_state:
                found = _bisect(Bfun, float(ts[k]), float(ts[k + 1]), lo_state, hi_state, t_tol, tol)
                jump = 0
                for t0 in found:
                    B0, K, dn = crossing_form(Bfun, t0, h, a, b, 1e-6 * span_)
                    c = _nondegenerate(B0, dn, t0, slopes[k - i])
                    crossings.append(Crossing(t0, K.shape[1], c, c.signature, "interior"))
                    jump += c.signature
                if jump != hi_state[0] - lo_state[0]:
                    raise InconsistencyError(
                        f"crossing forms near t={ts[k]:.6g} do not match the coindex jump"
                    )
            if final is not None:
                crossings.append(final)
            lo_state = _state(hi_inn)
    total = sum(c.contribution for c in crossings)
    return MaslovResult(2 * total, "paper", tuple(log), crossings=tuple(crossings))


def _nondegenerate(B0, scale, t0, slope=0.0):
    """Inertia of a crossing form; singular means below ``1e-6 * |B'|`` or ``1e-4 * slope``.

    ``slope`` is the mean rate of change of the chart image over the sample
    interval around the crossing, so a derivative that vanishes at the
    crossing is caught even when ``|B'|`` itself is tiny there.
    """
    w = np.linalg.eigvalsh(0.5 * (B0 + B0.T))
    if w.size == 0 or np.min(np.abs(w)) <= max(1e-6 * scale, 1e-4 * slope):
        raise DegenerateCrossingError(t0)
    return Inertia(int(np.sum(w < 0)), int(np.sum(w > 0)), 0)


def _bisect(Bfun, lo, hi, lo_state, hi_state, t_tol, tol, depth=0):
    """Times in ``(lo, hi)`` where the inertia of ``B`` changes.

    Eigenvalue signs are read exactly (no rank cut) so the search converges
    to the sign change itself rather than to the edge of the band where the
    form is numerically singular; ``tol`` is unused and kept for callers.
    """
    if hi - lo <= t_tol or depth > 200:
        return [0.5 * (lo + hi)]
    mid = 0.5 * (lo + hi)
    inn = inertia(SymmetricForm(Bfun(mid), 0.0))
    nudge = 0
    while inn.nullity and nudge < 5:
        nudge += 1
        mid = lo + (0.5 + 0.07 * nudge) * (hi - lo)
        inn = inertia(SymmetricForm(Bfun(mid), 0.0))
    if inn.nullity:
        return [mid]
    st = _state(inn)
    out = []
    if st != lo_state:
        out += _bisect(Bfun, lo, mid, lo_state, st, t_tol, tol, depth + 1)
    if st != hi_state:
        out += _bisect(Bfun, mid, hi, st, hi_state, t_tol, tol, depth + 1)
    return out


# ---------------------------------------------------------------------------
# Hörmander and Kashiwara indices


@dataclass(frozen=True)
class HormanderQuery:
    """References ``L0``, ``L1`` and path endpoints ``La``, ``Lb``."""

    L0: LagrangianFrame
    L1: LagrangianFrame
    La: LagrangianFrame
    Lb: LagrangianFrame

    def __post_init__(self):
        for L in (self.L1, self.La, self.Lb):
            if not L.space.same_as(self.L0.space):
                raise DimensionMismatchError("Hörmander query mixes symplectic spaces")


def connecting_path(La, Lb, seed=0, through=None, num=None) -> LagrangianPath:
    """Straight line in a chart centred at ``La`` whose complement is transverse to both endpoints."""
    space = La.space
    L = through if through is not None else random_lagrangian(space, seed, transverse_to=[La, Lb], floor=1e-2)
    c = Chart(La, L)
    Bb = chart_apply(c, Lb).matrix

    def func(s):
        return chart_invert(c, s * Bb).frame

    if num is None:
        num = max(17, int(math.ceil(8 * np.linalg.norm(Bb, 2))) + 1)
    ts = np.linspace(0.0, 1.0, int(num))
    # chart_invert(c, s * Bb) has the frame La + s * L1 Z, affine in s
    D = c.L1.frame @ np.linalg.solve(c.pairing.T, Bb)
    frames = La.frame[None] + ts[:, None, None] * D[None]
    frames[0], frames[-1] = La.frame, Lb.frame
    return LagrangianPath(space, ts, frames, func)


def hormander_index(q: HormanderQuery, seed=0, path=None) -> int:
    """``mu_{L0}(path) - mu_{L1}(path)`` for a path from ``La`` to ``Lb``."""
    if path is None:
        path = connecting_path(q.La, q.Lb, seed)
    elif subspace_distance(path.start, q.La) > 1e-8 or subspace_distance(path.end, q.Lb) > 1e-8:
        raise InvalidInputError("path does not join La to Lb")
    return mu(path, q.L0, seed) - mu(path, q.L1, seed)


def kashiwara_index(L0, L1, L2, seed=0, check=True) -> int:
    """``q(L0, L1; L2, L0)``; with ``check`` also compares against ``-q(L0, L1; L0, L2)``."""
    tau = hormander_index(HormanderQuery(L0, L1, L2, L0), seed)
    if check:
        other = -hormander_index(HormanderQuery(L0, L1, L0, L2), seed + 1)
        if other != tau:
            raise InconsistencyError(f"Kashiwara index routes disagree: {tau} vs {other}")
    return tau


# ---------------------------------------------------------------------------
# estimates on the difference of Maslov indices


@dataclass(frozen=True)
class EstimateReport:
    mu0: int
    mu1: int
    mu0_opposite: int
    mu1_opposite: int
    n: int
    dims: dict
    verdicts: tuple
    opposite_relation: bool

    @property
    def holds(self) -> bool:
        return all(v.holds for v in self.verdicts) and self.opposite_relation

    def verdict(self, id) -> Verdict:
        return next(v for v in self.verdicts if v.id == id)


def check_estimates(path: LagrangianPath, L0, L1, seed=0) -> EstimateReport:
    """Evaluate the four bounds on ``|mu_{L0} - mu_{L1}|`` (plain and endpoint-corrected)."""
    n = path.n
    La, Lb = path.start, path.end
    mu0 = mu(path, L0, seed)
    mu1 = mu(path, L1, seed)
    mu0m = int(maslov_index(path, L0, "opposite_form", seed))
    mu1m = int(maslov_index(path, L1, "opposite_form", seed))
    d = {
        "L0L1": intersection_dimension(L0, L1),
        "ab": intersection_dimension(La, Lb),
        "a0": intersection_dimension(La, L0),
        "a1": intersection_dimension(La, L1),
        "b0": intersection_dimension(Lb, L0),
        "b1": intersection_dimension(Lb, L1),
    }
    diff = mu0 - mu1
    corrected = diff - d["a0"] + d["a1"] + d["b0"] - d["b1"]
    verdicts = (
        inequality("difference_vs_reference_overlap", abs(diff), n - d["L0L1"]),
        inequality("difference_vs_endpoint_overlap", abs(diff), n - d["ab"]),
        inequality("corrected_difference_vs_reference_overlap", abs(corrected), n - d["L0L1"]),
        inequality("corrected_difference_vs_endpoint_overlap", abs(corrected), n - d["ab"]),
    )
    relation = mu0m == -mu0 + d["a0"] - d["b0"] and mu1m == -mu1 + d["a1"] - d["b1"]
    return EstimateReport(mu0, mu1, mu0m, mu1m, n, d, verdicts, relation)
