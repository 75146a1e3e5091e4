"""Problem containers and the residual algebra shared by every solver component.

The problem: pick one value per variable from a finite sorted set so that the
worst-case violation ``max_k |(Ax - b)_k|`` is as small as possible.  Solutions
store the residual ``s = Ax - b`` and keep it consistent under single-variable
shifts and pairwise value swaps without recomputing the full product.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

# Incremental residual updates drift at roundoff scale; refresh from scratch
# after this many of them.
REFRESH_PERIOD = 1000


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class ValueSet:
    """Finite, strictly increasing set of values a variable may take.

    Also serves as the quantization grid, the gray-level set, and the
    fixed-point coefficient set of the instance builders.
    """

    def __init__(self, levels) -> None:
        arr = np.array(levels, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("levels must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError("levels must be finite")
        if arr.size > 1 and not np.all(np.diff(arr) > 0):
            raise ValueError("levels must be strictly increasing (duplicates forbidden)")
        self.levels = _readonly(arr)

    def __len__(self) -> int:
        return int(self.levels.size)

    def __getitem__(self, k: int) -> float:
        return float(self.levels[k])

    def __repr__(self) -> str:
        return f"ValueSet({self.levels.tolist()!r})"


def round_to_nearest(values: ValueSet, v: float) -> int:
    """Index of the level nearest to ``v``; ties go to the lower level.

    Ties include computed-distance ties, so argmin over the ascending
    levels (first minimum wins) is exactly the rule.
    """
    return int(np.argmin(np.abs(values.levels - v)))


def two_nearest(values: ValueSet, v: float) -> tuple[int, int]:
    """Indices of the two distinct levels nearest to ``v``.

    Ordered by distance, then by level value on distance ties.  Needs at
    least two levels.
    """
    lv = values.levels
    if lv.size < 2:
        raise ValueError("two_nearest needs at least two levels")
    order = np.argsort(np.abs(lv - v), kind="stable")
    return int(order[0]), int(order[1])


class Instance:
    """One problem: matrix ``A``, target ``b``, and the per-variable value set.

    Immutable after construction (arrays are marked read-only) so it can be
    shared freely across worker threads.  ``continuous_init`` optionally
    carries an unrounded warm start from one of the builders.
    """

    def __init__(self, A, b, values: ValueSet, continuous_init=None) -> None:
        A = np.array(A, dtype=float, order="C")
        b = np.array(b, dtype=float)
        if A.ndim != 2:
            raise ValueError("A must be a 2-d matrix")
        m, n = A.shape
        if m < 1 or n < 1:
            raise ValueError("A must have at least one row and one column")
        if b.shape != (m,):
            raise ValueError(f"b has length {b.size}, expected m={m} rows of A")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("A and b must be finite")
        if not isinstance(values, ValueSet):
            values = ValueSet(values)
        if continuous_init is not None:
            continuous_init = np.array(continuous_init, dtype=float)
            if continuous_init.shape != (n,):
                raise ValueError(
                    f"continuous_init has length {continuous_init.size}, expected n={n}"
                )
            continuous_init = _readonly(continuous_init)
        self.A = _readonly(A)
        self.b = _readonly(b)
        self.values = values
        self.continuous_init = continuous_init

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @cached_property
    def screen(self) -> "RowScreen":
        """Per-row swap screen, computed once and cached."""
        return row_screen(self)

    def __repr__(self) -> str:
        return f"Instance(m={self.m}, n={self.n}, levels={len(self.values)})"


@dataclass
class RowScreen:
    """Row-wise extremes of pairwise column differences.

    ``a_plus[k]`` is the largest possible ``A[k, j] - A[k, i]`` over column
    pairs, i.e. row max minus row min; ``a_minus`` is its negation.  Rows
    whose screen interval sits strictly inside the improvement interval can
    be skipped when testing a swap.
    """

    a_minus: np.ndarray
    a_plus: np.ndarray


def row_screen(inst: Instance) -> RowScreen:
    a_plus = inst.A.max(axis=1) - inst.A.min(axis=1)
    return RowScreen(a_minus=_readonly(-a_plus), a_plus=_readonly(a_plus))


class Solution:
    """Level assignment plus its cached residual and objective.

    Mutable and owned by a single thread; use :meth:`copy` to branch.
    """

    __slots__ = ("idx", "residual", "objective", "updates_since_refresh")

    def __init__(self, idx, residual, objective, updates_since_refresh=0) -> None:
        self.idx = np.asarray(idx, dtype=np.intp)
        self.residual = np.asarray(residual, dtype=float)
        self.objective = float(objective)
        self.updates_since_refresh = int(updates_since_refresh)

    @classmethod
    def from_indices(cls, inst: Instance, idx) -> "Solution":
        residual, objective = compute_residual(inst, idx)
        return cls(np.array(idx, dtype=np.intp), residual, objective)

    def values(self, inst: Instance) -> np.ndarray:
        """The assignment as level values."""
        return inst.values.levels[self.idx]

    def copy(self) -> "Solution":
        return Solution(
            self.idx.copy(), self.residual.copy(), self.objective, self.updates_since_refresh
        )

    def refresh(self, inst: Instance) -> None:
        """Recompute residual and objective from scratch."""
        self.residual = inst.A @ inst.values.levels[self.idx] - inst.b
        self.objective = float(np.max(np.abs(self.residual)))
        self.updates_since_refresh = 0

    def __repr__(self) -> str:
        return f"Solution(objective={self.objective!r})"


def compute_residual(inst: Instance, idx) -> tuple[np.ndarray, float]:
    """Residual ``s = Ax - b`` and objective ``max |s_k|`` for an assignment.

    ``idx`` holds one level index per variable.  The reported objective is
    exactly the max over the returned residual; np.max scans in index order,
    so a tied maximum is attained first at the lowest row index.
    """
    idx = np.asarray(idx, dtype=np.intp)
    if idx.shape != (inst.n,):
        raise ValueError(f"idx has length {idx.size}, expected n={inst.n}")
    nlev = len(inst.values)
    if idx.size and (idx.min() < 0 or idx.max() >= nlev):
        raise ValueError(f"idx entries must lie in [0, {nlev})")
    s = inst.A @ inst.values.levels[idx] - inst.b
    return s, float(np.max(np.abs(s)))


def _bump(inst: Instance, sol: Solution) -> None:
    sol.updates_since_refresh += 1
    if sol.updates_since_refresh >= REFRESH_PERIOD:
        sol.refresh(inst)
    else:
        sol.objective = float(np.max(np.abs(sol.residual)))


def apply_shift(inst: Instance, sol: Solution, j: int, new_level: int) -> Solution:
    """Move variable ``j`` to ``new_level``, updating the residual in place.

    Uses the rank-one identity ``s' = s + (x_j' - x_j) * A[:, j]``; shifting
    to the current level is a no-op.
    """
    if not 0 <= j < inst.n:
        raise ValueError(f"variable index {j} out of range for n={inst.n}")
    if not 0 <= new_level < len(inst.values):
        raise ValueError(f"level index {new_level} out of range for {len(inst.values)} levels")
    old_level = int(sol.idx[j])
    if new_level == old_level:
        return sol
    diff = inst.values[new_level] - inst.values[old_level]
    sol.residual += diff * inst.A[:, j]
    sol.idx[j] = new_level
    _bump(inst, sol)
    return sol


def apply_swap(inst: Instance, sol: Solution, i: int, j: int) -> Solution:
    """Exchange the values of variables ``i`` and ``j`` in place.

    With ``delta = x_i - x_j`` the residual moves by ``delta * (A[:, j] -
    A[:, i])``.  The two variables must currently hold distinct values.
    """
    if i == j:
        raise ValueError("swap needs two distinct variables")
    if not (0 <= i < inst.n and 0 <= j < inst.n):
        raise ValueError(f"swap indices ({i}, {j}) out of range for n={inst.n}")
    xi = inst.values[int(sol.idx[i])]
    xj = inst.values[int(sol.idx[j])]
    if xi == xj:
        raise ValueError("swap of equal values is undefined; pick distinct-valued variables")
    sol.residual += (xi - xj) * (inst.A[:, j] - inst.A[:, i])
    sol.idx[i], sol.idx[j] = sol.idx[j], sol.idx[i]
    _bump(inst, sol)
    return sol
