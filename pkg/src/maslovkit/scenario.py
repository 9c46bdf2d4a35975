"""Scenario files: declarative JSON descriptions of a geodesic's parallel-frame data.

A scenario looks like::

    {
      "name": "sphere",
      "dimension": 3,
      "signature": [1, 1, 1],
      "curvature": {"kind": "constant", "coefficients": [[0, 0, 0], [0, -1, 0], [0, 0, -1]]},
      "interval": [0, 10.995574287564276],
      "step": 0.001,
      "submanifold": "point",
      "subintervals": [[1.0, 4.0]],
      "shifted_points": [-1.5707963267948966],
      "seed": 0
    }

Curvature descriptors (``M(t)`` is ``n x n``; ``g @ M(t)`` must be symmetric):

* ``constant``: ``coefficients`` is the matrix ``M``.
* ``diagonal-profile``: ``coefficients[i]`` lists polynomial coefficients
  ``c_0, c_1, ...`` of the diagonal entry ``M_ii(t) = sum_k c_k t^k``.
* ``polynomial``: ``coefficients`` is a list of matrices ``C_k`` with
  ``M(t) = sum_k C_k t^k``.
* ``fourier``: ``coefficients`` is ``{"frequency": w, "constant": C,
  "cos": [A_1, ...], "sin": [B_1, ...]}`` with
  ``M(t) = C + sum_k A_k cos(k w t) + B_k sin(k w t)``.

The submanifold is ``"point"`` or ``{"P": rows, "S": matrix}`` where the rows
of ``P`` span the tangent space (orthogonal to ``e_1``) and ``S`` is the shape
operator in that basis.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InvalidInputError, ScenarioError
from .jacobi import JacobiSystem, SubmanifoldData

KINDS = ("constant", "diagonal-profile", "polynomial", "fourier")
MODELS = ("flat", "sphere", "hyperbolic", "lorentz-flat", "lorentz-const")


def _matrix(value, n, where):
    try:
        M = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ScenarioError(where, "expected a numeric matrix") from None
    if M.shape != (n, n):
        raise ScenarioError(where, f"expected a {n}x{n} matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ScenarioError(where, "non-finite entries")
    return M


def _check_g_symmetric(M, g, where):
    gM = g[:, None] * M
    if np.max(np.abs(gM - gM.T), initial=0.0) > 1e-12 * max(1.0, float(np.max(np.abs(M), initial=0.0))):
        raise ScenarioError(where, "g @ M is not symmetric")


@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    """Callable ``t -> M(t)`` built from a declarative descriptor."""

    kind: str
    coefficients: object
    n: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ScenarioError("curvature.kind", f"unknown kind {self.kind!r}; expected one of {', '.join(KINDS)}")

    def terms(self, g):
        """Validated coefficient arrays; every matrix term is checked for g-symmetry."""
        n, c, kind = self.n, self.coefficients, self.kind
        where = "curvature.coefficients"
        if kind == "constant":
            M = _matrix(c, n, where)
            _check_g_symmetric(M, g, where)
            return {"C": [M]}
        if kind == "polynomial":
            if not isinstance(c, list) or not c:
                raise ScenarioError(where, "expected a nonempty list of matrices")
            Cs = [_matrix(m, n, f"{where}[{k}]") for k, m in enumerate(c)]
            for k, M in enumerate(Cs):
                _check_g_symmetric(M, g, f"{where}[{k}]")
            return {"C": Cs}
        if kind == "diagonal-profile":
            if not isinstance(c, list) or len(c) != n:
                raise ScenarioError(where, f"expected {n} coefficient lists, one per diagonal entry")
            rows = []
            for i, r in enumerate(c):
                try:
                    arr = np.array(r, dtype=float).reshape(-1)
                except (TypeError, ValueError):
                    raise ScenarioError(f"{where}[{i}]", "expected a list of numbers") from None
                if arr.size == 0 or not np.all(np.isfinite(arr)):
                    raise ScenarioError(f"{where}[{i}]", "expected a nonempty list of finite numbers")
                rows.append(arr)
            return {"diag": rows}
        # fourier
        if not isinstance(c, dict):
            raise ScenarioError(where, "expected an object with frequency, constant, cos, sin")
        try:
            w = float(c.get("frequency", 1.0))
        except (TypeError, ValueError):
            raise ScenarioError(f"{where}.frequency", "expected a number") from None
        if not math.isfinite(w):
            raise ScenarioError(f"{where}.frequency", "must be finite")
        C = _matrix(c.get("constant", np.zeros((n, n))), n, f"{where}.constant")
        _check_g_symmetric(C, g, f"{where}.constant")
        out = {"w": w, "C": C, "cos": [], "sin": []}
        for name in ("cos", "sin"):
            lst = c.get(name, [])
            if not isinstance(lst, list):
                raise ScenarioError(f"{where}.{name}", "expected a list of matrices")
            for k, m in enumerate(lst):
                M = _matrix(m, n, f"{where}.{name}[{k}]")
                _check_g_symmetric(M, g, f"{where}.{name}[{k}]")
                out[name].append(M)
        return out

    def build(self, g):
        t_ = self.terms(np.asarray(g, dtype=float))
        kind = self.kind
        if kind in ("constant", "polynomial"):
            Cs = np.stack(t_["C"])

            def M(t):
                powers = t ** np.arange(len(Cs))
                return np.tensordot(powers, Cs, axes=1)

        elif kind == "diagonal-profile":
            rows = t_["diag"]

            def M(t):
                return np.diag([np.polynomial.polynomial.polyval(t, r) for r in rows])

        else:
            w, C, A, B = t_["w"], t_["C"], t_["cos"], t_["sin"]

            def M(t):
                out = C.copy()
                for k, Ak in enumerate(A, start=1):
                    out = out + Ak * math.cos(k * w * t)
                for k, Bk in enumerate(B, start=1):
                    out = out + Bk * math.sin(k * w * t)
                return out

        return M


def _to_jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, dict):
        return {k: _to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_to_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


@dataclass(frozen=True)
class Scenario:
    name: str
    dimension: int
    signature: tuple
    curvature: dict
    interval: tuple
    step: float = 1e-3
    submanifold: object = "point"
    subintervals: tuple = ()
    shifted_points: tuple = ()
    seed: int = 0
    notes: str = field(default="", compare=False)

    @classmethod
    def from_dict(cls, d) -> "Scenario":
        if not isinstance(d, dict):
            raise ScenarioError("<root>", "scenario must be a JSON object")
        known = {"name", "dimension", "signature", "curvature", "interval", "step", "submanifold",
                 "subintervals", "shifted_points", "seed", "notes"}
        extra = sorted(set(d) - known)
        if extra:
            raise ScenarioError(extra[0], "unknown field")
        for req in ("dimension", "signature", "curvature", "interval"):
            if req not in d:
                raise ScenarioError(req, "missing required field")
        name = d.get("name", "scenario")
        if not isinstance(name, str) or not name:
            raise ScenarioError("name", "expected a nonempty string")
        n = d["dimension"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ScenarioError("dimension", f"expected a positive integer, got {n!r}")
        sig = d["signature"]
        if not isinstance(sig, list) or len(sig) != n:
            raise ScenarioError("signature", f"expected a list of {n} entries")
        for i, s in enumerate(sig):
            if isinstance(s, bool) or s not in (1, -1):
                raise ScenarioError(f"signature[{i}]", f"entries must be +1 or -1, got {s!r}")
        curv = d["curvature"]
        if not isinstance(curv, dict) or "kind" not in curv or "coefficients" not in curv:
            raise ScenarioError("curvature", "expected an object with 'kind' and 'coefficients'")
        interval = d["interval"]
        if (not isinstance(interval, list) or len(interval) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in interval)):
            raise ScenarioError("interval", "expected [a, b] with numbers")
        a, b = (float(v) for v in interval)
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ScenarioError("interval", "expected finite a < b")
        step = d.get("step", 1e-3)
        if isinstance(step, bool) or not isinstance(step, (int, float)) or not 0 < step <= (b - a):
            raise ScenarioError("step", "expected a positive number no larger than the interval")
        sub = d.get("submanifold", "point")
        if sub != "point" and not (isinstance(sub, dict) and "P" in sub and "S" in sub):
            raise ScenarioError("submanifold", "expected \"point\" or an object with P and S")
        subintervals = d.get("subintervals", [])
        if not isinstance(subintervals, list):
            raise ScenarioError("subintervals", "expected a list of [alpha, beta] pairs")
        pairs = []
        for i, p in enumerate(subintervals):
            if not (isinstance(p, list) and len(p) == 2 and all(isinstance(v, (int, float)) for v in p)):
                raise ScenarioError(f"subintervals[{i}]", "expected [alpha, beta]")
            lo, hi = float(p[0]), float(p[1])
            if not a < lo < hi <= b:
                raise ScenarioError(f"subintervals[{i}]", f"must satisfy {a} < alpha < beta <= {b}")
            pairs.append((lo, hi))
        shifted = d.get("shifted_points", [])
        if not isinstance(shifted, list):
            raise ScenarioError("shifted_points", "expected a list of numbers")
        for i, v in enumerate(shifted):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not v < a:
                raise ScenarioError(f"shifted_points[{i}]", f"expected a number smaller than a={a}")
        seed = d.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ScenarioError("seed", "expected a nonnegative integer")
        notes = d.get("notes", "")
        sc = cls(name, n, tuple(int(s) for s in sig), curv, (a, b), float(step), sub, tuple(pairs),
                 tuple(float(v) for v in shifted), seed, notes)
        sc.system()
        sc.submanifold_data()
        return sc

    @classmethod
    def from_json(cls, text) -> "Scenario":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"line {e.lineno}", e.msg) from None
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "Scenario":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def to_dict(self):
        d = _to_jsonable(asdict(self))
        d["interval"] = list(self.interval)
        d["subintervals"] = [list(p) for p in self.subintervals]
        d["shifted_points"] = list(self.shifted_points)
        if not self.notes:
            d.pop("notes")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def dump(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @property
    def g(self):
        return np.array(self.signature, dtype=float)

    def curvature_function(self):
        prof = CurvatureProfile(self.curvature["kind"], self.curvature["coefficients"], self.dimension)
        return prof.build(self.g)

    def system(self, step=None) -> JacobiSystem:
        try:
            return JacobiSystem(self.g, self.curvature_function(), self.interval, self.step if step is None else step)
        except ScenarioError:
            raise
        except InvalidInputError as e:
            raise ScenarioError("curvature", str(e)) from None

    def submanifold_data(self) -> SubmanifoldData:
        if self.submanifold == "point":
            return SubmanifoldData.point(self.g)
        n = self.dimension
        try:
            P = np.array(self.submanifold["P"], dtype=float)
            S = np.array(self.submanifold["S"], dtype=float)
        except (TypeError, ValueError):
            raise ScenarioError("submanifold", "P and S must be numeric") from None
        if P.ndim != 2 or P.shape[1] != n or P.shape[0] > n - 1:
            raise ScenarioError("submanifold.P", f"expected k rows of length {n} with k < {n}")
        k = P.shape[0]
        if S.shape != (k, k):
            raise ScenarioError("submanifold.S", f"expected a {k}x{k} matrix")
        try:
            return SubmanifoldData(self.g, P.T, S)
        except InvalidInputError as e:
            raise ScenarioError("submanifold", str(e)) from None


def builtin_model(name, n=3, interval=None, step=1e-3) -> Scenario:
    """Bundled closed-form models.

    * ``flat``: ``M = 0``, ``g = I``, default interval ``[0, 5]``.
    * ``sphere``: ``M = diag(0, -1, ..., -1)``, ``g = I``, ``[0, 3.5 pi]``.
    * ``hyperbolic``: ``M = diag(0, 1, ..., 1)``, ``g = I``, ``[0, 10]``.
    * ``lorentz-flat``: ``M = 0``, ``g = diag(-1, 1, ..., 1)``, ``[0, 5]``.
    * ``lorentz-const``: ``g = diag(1, -1, 1, ..., 1)`` (spacelike geodesic,
      timelike second frame vector), ``M = diag(0, -1, -2, ..., -(n-1))``, so
      ``g M`` has mixed inertia; ``[0, 5]``.  Conjugate instants at
      ``k pi / sqrt(j)`` for frame slot ``j``; slot 2 is timelike, so its
      events carry signature ``-1``.
    """
    if name not in MODELS:
        raise InvalidInputError(f"unknown model {name!r}; expected one of {', '.join(MODELS)}")
    n = int(n)
    if n < 1:
        raise InvalidInputError("n must be positive")
    sig = [1] * n
    diag = [0.0] * n
    default = (0.0, 5.0)
    if name == "sphere":
        diag = [0.0] + [-1.0] * (n - 1)
        default = (0.0, 3.5 * math.pi)
    elif name == "hyperbolic":
        diag = [0.0] + [1.0] * (n - 1)
        default = (0.0, 10.0)
    elif name == "lorentz-flat":
        sig[0] = -1
    elif name == "lorentz-const":
        if n < 2:
            raise InvalidInputError("lorentz-const needs n >= 2")
        sig[1] = -1
        diag = [0.0] + [-float(j) for j in range(1, n)]
    a, b = default if interval is None else (float(interval[0]), float(interval[1]))
    M = np.diag(diag).tolist()
    return Scenario.from_dict({
        "name": name,
        "dimension": n,
        "signature": sig,
        "curvature": {"kind": "constant", "coefficients": M},
        "interval": [a, b],
        "step": step,
    })
