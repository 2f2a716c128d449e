"""The read-only population view behind ``vector.current`` / ``vector.best``,
and a Python entry point to the vector instructions (which run in the
compiled core).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SwarmView:
    """Current and best points of every member, as seen by member ``self_index``."""

    current: np.ndarray
    best: np.ndarray
    self_index: int = 0

    def __post_init__(self):
        cur = np.asarray(self.current, dtype=np.float64)
        best = np.asarray(self.best, dtype=np.float64)
        if cur.ndim != 2 or cur.shape != best.shape or cur.shape[0] < 1:
            raise ValueError("current and best must be (popsize, D) arrays of equal shape")
        object.__setattr__(self, "current", cur)
        object.__setattr__(self, "best", best)

    @property
    def popsize(self) -> int:
        return self.current.shape[0]

    @property
    def dim(self) -> int:
        return self.current.shape[1]

    @classmethod
    def solo(cls, dim: int) -> "SwarmView":
        """A one-member view with both points at the origin."""
        z = np.zeros((1, dim))
        return cls(z, z.copy(), 0)


def member_index(index, popsize, self_index):
    if index < 0:
        return self_index
    return index % popsize


def swarm_view_lookup(view: SwarmView, which: str, index: int | None) -> np.ndarray:
    """Copy of member ``index``'s current or best point.

    Negative or missing indices resolve to the viewing member itself.
    """
    if which not in ("current", "best"):
        raise ValueError(f"which must be 'current' or 'best', not {which!r}")
    idx = view.self_index if index is None else member_index(index, view.popsize, view.self_index)
    source = view.current if which == "current" else view.best
    return source[idx].copy()


def vector_instruction(name: str, state, ctx: SwarmView | None = None):
    """Apply vector instruction ``name`` (e.g. ``"dim+"`` or ``"vector.dim+"``) to ``state``."""
    from .interpreter.state import execute_instruction
    if not name.startswith("vector."):
        name = "vector." + name
    return execute_instruction(state, name, ctx)
