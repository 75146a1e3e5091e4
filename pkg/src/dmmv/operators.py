"""Destroy and repair operators for the adaptive search loop.

Destroy operators pick which variables to reassign; repair operators put them
back one at a time, reading the residual left by the previous reassignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Instance, Solution, apply_shift, two_nearest


@dataclass
class DestroySet:
    """Variables chosen for reassignment, with their prior level indices.

    ``removed`` is ascending; ``saved_idx[k]`` is the level variable
    ``removed[k]`` held before repair, the anchor the repair operators
    search around.
    """

    removed: np.ndarray
    saved_idx: np.ndarray


def _make_destroy_set(sol: Solution, picked: np.ndarray) -> DestroySet:
    removed = np.sort(np.asarray(picked, dtype=np.intp))
    return DestroySet(removed=removed, saved_idx=sol.idx[removed].copy())


def random_destroy(sol: Solution, r: int, rng: np.random.Generator) -> DestroySet:
    """Pick ``r`` distinct variables uniformly without replacement."""
    n = sol.idx.size
    if not 1 <= r <= n:
        raise ValueError(f"removal count r={r} must be in [1, n={n}]")
    return _make_destroy_set(sol, rng.choice(n, size=r, replace=False))


@dataclass
class ImpactScores:
    """Per-variable blame scores in [0, 1] for the current residual.

    A variable scores high when the rows it strongly touches have little
    slack before they would overtake the current objective.
    """

    d: np.ndarray
    alpha: float


def impact_scores(inst: Instance, sol: Solution, alpha: float) -> ImpactScores:
    """Score each variable's potential to relieve the residual.

    For row ``k`` and variable ``j`` with ``A[k, j] != 0`` the slack before
    row ``k`` hits the objective is ``(t - |s_k|) / |A[k, j]|``; its
    contribution is ``|s_k| * exp(-alpha * slack)``, zero when the entry is
    zero.  Scores are the column sums normalized by ``sum |s_k|``.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    t = sol.objective
    if t <= 0:
        raise ValueError("impact scores are undefined at zero objective")
    abs_s = np.abs(sol.residual)
    abs_a = np.abs(inst.A)
    nz = abs_a > 0
    slack = t - abs_s  # >= 0 by definition of t
    decay = np.zeros_like(inst.A)
    decay[nz] = np.exp(-alpha * np.broadcast_to(slack[:, None], inst.A.shape)[nz] / abs_a[nz])
    d = (abs_s[:, None] * decay).sum(axis=0) / abs_s.sum()
    return ImpactScores(d=d, alpha=float(alpha))


def worst_remove_destroy(
    inst: Instance, sol: Solution, r: int, alpha: float, rng: np.random.Generator
) -> DestroySet:
    """Pick ``r`` variables with probability proportional to impact score.

    Draws one index at a time, zeroing its score and renormalizing before
    the next draw.  Falls back to uniform picks when no score mass remains.
    """
    n = sol.idx.size
    if not 1 <= r <= n:
        raise ValueError(f"removal count r={r} must be in [1, n={n}]")
    if sol.objective <= 0:
        return random_destroy(sol, r, rng)
    d = impact_scores(inst, sol, alpha).d.copy()
    if d.sum() <= 0:
        return random_destroy(sol, r, rng)
    picked: list[int] = []
    for _ in range(r):
        total = d.sum()
        if total <= 0:
            # score mass exhausted mid-draw: finish uniformly over the rest
            rest = np.setdiff1d(np.arange(n), np.asarray(picked, dtype=np.intp))
            fill = rng.choice(rest, size=r - len(picked), replace=False)
            picked.extend(int(k) for k in fill)
            break
        k = int(rng.choice(n, p=d / total))
        picked.append(k)
        d[k] = 0.0
    return _make_destroy_set(sol, np.asarray(picked, dtype=np.intp))


def random_repair(
    inst: Instance, sol: Solution, destroyed: DestroySet, rng: np.random.Generator
) -> Solution:
    """Reassign each destroyed variable to one of the two levels nearest its
    prior value, chosen by a fair coin, in ascending variable order."""
    for pos, j in enumerate(destroyed.removed):
        old_value = inst.values[int(destroyed.saved_idx[pos])]
        cands = two_nearest(inst.values, old_value)
        apply_shift(inst, sol, int(j), cands[int(rng.integers(2))])
    return sol


def greedy_repair(inst: Instance, sol: Solution, destroyed: DestroySet) -> Solution:
    """Reassign each destroyed variable to whichever of the two nearest
    levels leaves the smaller objective, ties to the lower level.

    Variables are processed in ascending index order; each choice is made
    on the residual left by the previous one.
    """
    lv = inst.values.levels
    for pos, j in enumerate(destroyed.removed):
        j = int(j)
        old_value = inst.values[int(destroyed.saved_idx[pos])]
        c1, c2 = two_nearest(inst.values, old_value)
        apply_shift(inst, sol, j, c1)
        t1 = sol.objective
        apply_shift(inst, sol, j, c2)
        t2 = sol.objective
        if t1 < t2 or (t1 == t2 and lv[c1] < lv[c2]):
            apply_shift(inst, sol, j, c1)
    return sol
