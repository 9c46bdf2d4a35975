"""Named inequality verdicts shared by the estimate and comparison reports."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Verdict:
    """One checked statement.

    ``kind`` is ``"le"`` for ``left <= right + tol``, ``"implication"`` when the
    statement reads "if left > right then conclusion", and ``"not_applicable"``
    / ``"not_evaluable"`` for statements that could not be asserted.
    """

    id: str
    left: float
    right: float
    holds: bool
    kind: str = "le"
    conclusion: bool | None = None
    tol: float = 0.0
    detail: str = ""

    @property
    def slack(self) -> float:
        return self.right - self.left

    @property
    def asserted(self) -> bool:
        return self.kind in ("le", "implication")

    def recheck(self) -> bool:
        """Recompute ``holds`` from the logged numbers."""
        if self.kind == "le":
            return self.left <= self.right + self.tol
        if self.kind == "implication":
            return self.left <= self.right + self.tol or bool(self.conclusion)
        return True


def inequality(id, left, right, tol=0.0, detail=""):
    return Verdict(id, left, right, left <= right + tol, "le", tol=tol, detail=detail)


def implication(id, left, right, conclusion, detail=""):
    return Verdict(id, left, right, left <= right or bool(conclusion), "implication", conclusion, detail=detail)


def not_applicable(id, detail="", kind="not_applicable"):
    return Verdict(id, float("nan"), float("nan"), True, kind, detail=detail)
