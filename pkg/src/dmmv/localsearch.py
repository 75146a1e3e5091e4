"""Local search: adjacent-level shifts plus filtered pairwise value swaps.

A swap of the values of variables ``i`` and ``j`` (with ``delta = x_i - x_j
> 0``) strictly improves the objective if and only if every row ``k``
satisfies ``(-t - s_k)/delta < A[k, j] - A[k, i] < (t - s_k)/delta``.  The
candidate filter keeps only pairs that pass the binding half of that test on
the largest-residual rows, and a per-row screen skips rows that can never
fail it.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import Instance, Solution, apply_shift, apply_swap

ONE_OPT_MAX_SWEEPS = 10
LOCAL_SEARCH_MAX_ROUNDS = 20


@dataclass
class SwapCandidate:
    """Ordered pair ``(i, j)`` with ``x_i > x_j``, i.e. ``delta > 0``."""

    i: int
    j: int
    delta: float
    predicted_t: float | None = None


@dataclass
class FilterConfig:
    """Knobs for candidate generation and swap evaluation.

    ``k_eps`` rows with the largest residual magnitudes feed the filter;
    ``max_candidates`` caps the surviving list (None for no cap);
    ``workers`` fans candidate evaluation out over threads;
    ``l2_tiebreak`` breaks exact objective ties by the smaller l2 residual
    before falling back to lexicographic pair order.
    """

    k_eps: int = 100
    max_candidates: int | None = 5000
    workers: int = 1
    l2_tiebreak: bool = False

    def __post_init__(self) -> None:
        if self.k_eps < 1:
            raise ValueError("k_eps must be at least 1")
        if self.max_candidates is not None and self.max_candidates < 1:
            raise ValueError("max_candidates must be positive or None")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


def one_opt(inst: Instance, sol: Solution, max_sweeps: int = ONE_OPT_MAX_SWEEPS) -> Solution:
    """Sweep variables in ascending order, moving each to an adjacent level
    when that strictly lowers the objective.

    For each variable both neighbors are evaluated and the better one is
    applied immediately (ties to the lower level).  Stops after a sweep
    with no change, or after ``max_sweeps`` sweeps.
    """
    lv = inst.values.levels
    nlev = lv.size
    for _ in range(max_sweeps):
        changed = False
        for j in range(inst.n):
            k = int(sol.idx[j])
            col = inst.A[:, j]
            best_level = -1
            best_t = sol.objective
            for cand in (k - 1, k + 1):
                if not 0 <= cand < nlev:
                    continue
                t_cand = float(np.max(np.abs(sol.residual + (lv[cand] - lv[k]) * col)))
                if t_cand < best_t:
                    best_t = t_cand
                    best_level = cand
            if best_level >= 0:
                apply_shift(inst, sol, j, best_level)
                changed = True
        if not changed:
            break
    return sol


def is_improving(
    inst: Instance,
    sol: Solution,
    cand: SwapCandidate,
    use_screen: bool = True,
    check_screen: bool = False,
) -> bool:
    """Exact strict-improvement test for one swap candidate.

    With the screen on, rows whose extreme column differences already fit
    strictly inside the improvement interval are skipped without touching
    the pair's own entries.  ``check_screen`` re-evaluates skipped rows and
    raises if any would have failed (debug aid; the screen is sound by
    construction).
    """
    t = sol.objective
    s = sol.residual
    delta = cand.delta
    if delta <= 0:
        raise ValueError("swap candidates need delta = x_i - x_j > 0")
    lo = (-t - s) / delta
    hi = (t - s) / delta
    if not use_screen:
        diff = inst.A[:, cand.j] - inst.A[:, cand.i]
        return bool(np.all((lo < diff) & (diff < hi)))
    screen = inst.screen
    skip = (lo < screen.a_minus) & (screen.a_plus < hi)
    keep = ~skip
    diff = inst.A[keep, cand.j] - inst.A[keep, cand.i]
    verdict = bool(np.all((lo[keep] < diff) & (diff < hi[keep])))
    if check_screen and skip.any():
        diff_s = inst.A[skip, cand.j] - inst.A[skip, cand.i]
        if not np.all((lo[skip] < diff_s) & (diff_s < hi[skip])):
            raise AssertionError("row screen skipped a row that fails the swap test")
    return verdict


def find_candidates(inst: Instance, sol: Solution, cfg: FilterConfig) -> list[SwapCandidate]:
    """Generate swap candidates surviving the one-sided interval filter.

    Only the ``k_eps`` rows with the largest ``|s_k|`` filter (ties on
    magnitude keep the lowest row index); rows with ``s_k = 0`` impose no
    condition.  Survivors come back ordered by descending ``delta``, then
    by pair index, truncated to ``max_candidates``.
    """
    t = sol.objective
    if t <= 0:
        raise ValueError("candidate generation needs a positive objective")
    s = sol.residual
    rows = np.argsort(-np.abs(s), kind="stable")[: min(cfg.k_eps, inst.m)]

    x = sol.values(inst)
    diff_x = x[:, None] - x[None, :]
    i_idx, j_idx = np.nonzero(diff_x > 0)
    if i_idx.size == 0:
        return []
    delta = diff_x[i_idx, j_idx]

    for k in rows:
        sk = s[k]
        if sk == 0.0 or i_idx.size == 0:
            continue
        eps = t - abs(sk)
        a = inst.A[k]
        diff_a = a[j_idx] - a[i_idx]
        bound = eps / delta
        alive = diff_a < bound if sk > 0 else diff_a > -bound
        # compress the survivor list so later rows touch fewer pairs
        if not alive.all():
            i_idx = i_idx[alive]
            j_idx = j_idx[alive]
            delta = delta[alive]

    order = np.lexsort((j_idx, i_idx, -delta))
    if cfg.max_candidates is not None:
        order = order[: cfg.max_candidates]
    return [
        SwapCandidate(int(i_idx[k]), int(j_idx[k]), float(delta[k])) for k in order
    ]


@dataclass
class _ChunkBest:
    t: float
    i: int
    j: int
    delta: float
    l2: float = field(default=np.inf)


def _evaluate_chunk(
    inst: Instance,
    sol: Solution,
    ii: np.ndarray,
    jj: np.ndarray,
    dd: np.ndarray,
    want_l2: bool,
) -> _ChunkBest | None:
    """Best strictly improving swap within one candidate chunk."""
    t = sol.objective
    shifted = sol.residual[None, :] + dd[:, None] * (inst.A[:, jj].T - inst.A[:, ii].T)
    t_new = np.max(np.abs(shifted), axis=1)
    improving = t_new < t
    if not improving.any():
        return None
    t_min = float(t_new[improving].min())
    tied = np.nonzero(improving & (t_new == t_min))[0]
    if want_l2 and tied.size > 1:
        norms = np.linalg.norm(shifted[tied], axis=1)
        best = min(
            zip(norms, ii[tied], jj[tied], tied),
            key=lambda z: (z[0], z[1], z[2]),
        )
        k = int(best[3])
        return _ChunkBest(t_min, int(ii[k]), int(jj[k]), float(dd[k]), float(best[0]))
    k = int(min(tied, key=lambda z: (ii[z], jj[z])))
    l2 = float(np.linalg.norm(shifted[k])) if want_l2 else np.inf
    return _ChunkBest(t_min, int(ii[k]), int(jj[k]), float(dd[k]), l2)


def best_swap(inst: Instance, sol: Solution, cfg: FilterConfig) -> SwapCandidate | None:
    """The filtered swap with the lowest post-swap objective, if any improves.

    Candidates are evaluated in chunks with the rank-one update identity;
    chunk winners merge by objective, then (optionally) l2 residual, then
    lexicographic pair order, so the result is independent of chunking and
    of ``workers``.
    """
    if sol.objective <= 0:
        return None
    cands = find_candidates(inst, sol, cfg)
    if not cands:
        return None
    ii = np.array([c.i for c in cands], dtype=np.intp)
    jj = np.array([c.j for c in cands], dtype=np.intp)
    dd = np.array([c.delta for c in cands])

    chunks = np.array_split(np.arange(ii.size), min(cfg.workers, ii.size))
    if cfg.workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(
                pool.map(
                    lambda part: _evaluate_chunk(
                        inst, sol, ii[part], jj[part], dd[part], cfg.l2_tiebreak
                    ),
                    chunks,
                )
            )
    else:
        results = [_evaluate_chunk(inst, sol, ii, jj, dd, cfg.l2_tiebreak)]

    winners = [r for r in results if r is not None]
    if not winners:
        return None
    top = min(winners, key=lambda r: (r.t, r.l2, r.i, r.j))
    return SwapCandidate(top.i, top.j, top.delta, predicted_t=top.t)


def local_search(
    inst: Instance,
    sol: Solution,
    cfg: FilterConfig | None = None,
    max_rounds: int = LOCAL_SEARCH_MAX_ROUNDS,
) -> Solution:
    """Interleave adjacent-level sweeps with best filtered swaps.

    Runs ``one_opt`` first, then up to ``max_rounds`` rounds of (apply best
    swap, re-run ``one_opt``), stopping early once no swap improves.  The
    objective never increases.
    """
    cfg = cfg or FilterConfig()
    one_opt(inst, sol)
    for _ in range(max_rounds):
        cand = best_swap(inst, sol, cfg)
        if cand is None:
            break
        apply_swap(inst, sol, cand.i, cand.j)
        one_opt(inst, sol)
    return sol
