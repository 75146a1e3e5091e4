"""Adaptive outer loop: destroy, repair, local search, accept, adapt.

Each iteration picks one destroy/repair pair by roulette wheel over adaptive
weights, perturbs a copy of the current solution, polishes it with local
search, and accepts it only if it strictly improves the objective (or ties
it with a smaller l2 residual when that tie-break is enabled).
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import Instance, Solution
from .localsearch import FilterConfig, local_search
from .operators import greedy_repair, random_destroy, random_repair, worst_remove_destroy

# destroy/repair pairs, in roulette-wheel slot order
PAIRS: tuple[tuple[str, str], ...] = (
    ("random", "random"),
    ("random", "greedy"),
    ("worst", "random"),
    ("worst", "greedy"),
)

N_SEGMENT = 50
WEIGHT_FLOOR = 1e-3
ACCEPT_TIE_TOL = 1e-12


@dataclass
class SolverConfig:
    """Tuning knobs for :func:`solve`; defaults follow the reference setup."""

    destroy_rate: float = 0.005
    alpha: float = 0.3
    k_eps: int = 100
    max_iters: int = 1000
    time_limit: float | None = None
    seed: int = 0
    sigma1: float = 3.0
    sigma2: float = 2.0
    sigma3: float = 1.0
    decay: float = 0.8
    l2_tiebreak: bool = True
    max_candidates: int | None = 5000
    workers: int = 1

    def __post_init__(self) -> None:
        if not 0 < self.destroy_rate <= 1:
            raise ValueError("destroy_rate must lie in (0, 1]")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")
        if not self.sigma1 >= self.sigma2 >= self.sigma3 >= 0:
            raise ValueError("rewards must satisfy sigma1 >= sigma2 >= sigma3 >= 0")
        if not 0 < self.decay <= 1:
            raise ValueError("decay must lie in (0, 1]")

    def filter_config(self) -> FilterConfig:
        return FilterConfig(
            k_eps=self.k_eps, max_candidates=self.max_candidates, workers=self.workers
        )


class OperatorBank:
    """Adaptive weights, segment scores, and usage counts per operator pair."""

    def __init__(self, decay: float = 0.8) -> None:
        if not 0 < decay <= 1:
            raise ValueError("decay must lie in (0, 1]")
        self.decay = float(decay)
        self.weights = np.ones(len(PAIRS))
        self.scores = np.zeros(len(PAIRS))
        self.segment_uses = np.zeros(len(PAIRS), dtype=int)
        self.lifetime_uses = np.zeros(len(PAIRS), dtype=int)
        self.iteration = 0

    def probabilities(self) -> np.ndarray:
        return self.weights / self.weights.sum()


def select_operators(bank: OperatorBank, rng: np.random.Generator) -> int:
    """Roulette-wheel pick of a destroy/repair pair; returns its slot."""
    return int(rng.choice(len(PAIRS), p=bank.probabilities()))


OUTCOME_NEW_BEST = "new_best"
OUTCOME_IMPROVED = "improved"
OUTCOME_ACCEPTED = "accepted"
OUTCOME_REJECTED = "rejected"


def update_weights(
    bank: OperatorBank, pair_id: int, outcome: str, cfg: SolverConfig | None = None
) -> OperatorBank:
    """Score the pair for this iteration's outcome; decay at segment ends.

    Rewards are sigma1/sigma2/sigma3 for a new best, an improvement over
    the current solution, and a mere acceptance; rejections score 0.  Every
    ``N_SEGMENT`` iterations each weight moves toward its pair's score per
    use and segment counters reset; weights never drop below the floor.
    """
    cfg = cfg or SolverConfig()
    points = {
        OUTCOME_NEW_BEST: cfg.sigma1,
        OUTCOME_IMPROVED: cfg.sigma2,
        OUTCOME_ACCEPTED: cfg.sigma3,
        OUTCOME_REJECTED: 0.0,
    }[outcome]
    bank.scores[pair_id] += points
    bank.segment_uses[pair_id] += 1
    bank.lifetime_uses[pair_id] += 1
    bank.iteration += 1
    if bank.iteration % N_SEGMENT == 0:
        normalized = np.divide(
            bank.scores,
            bank.segment_uses,
            out=np.zeros_like(bank.scores),
            where=bank.segment_uses > 0,
        )
        bank.weights = bank.decay * bank.weights + (1 - bank.decay) * normalized
        np.maximum(bank.weights, WEIGHT_FLOOR, out=bank.weights)
        bank.scores[:] = 0.0
        bank.segment_uses[:] = 0
    return bank


def initial_solution(inst: Instance) -> Solution:
    """Round the continuous warm start, or a regularized least-squares fit.

    Without a warm start, solves ``(A^T A + 1e-8 I) x = A^T b`` and rounds
    each component to the nearest level.  A singular system falls back to
    the all-zeros vector (rounded), with a warning.
    """
    if inst.continuous_init is not None:
        target = inst.continuous_init
    else:
        gram = inst.A.T @ inst.A + 1e-8 * np.eye(inst.n)
        try:
            target = np.linalg.solve(gram, inst.A.T @ inst.b)
        except np.linalg.LinAlgError:
            warnings.warn("least-squares start failed; starting from zeros", stacklevel=2)
            target = np.zeros(inst.n)
        if not np.all(np.isfinite(target)):
            warnings.warn("least-squares start not finite; starting from zeros", stacklevel=2)
            target = np.zeros(inst.n)
    idx = _nearest_level_indices(inst.values.levels, target)
    return Solution.from_indices(inst, idx)


def _nearest_level_indices(levels: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """Vectorized nearest-level rounding, ties to the lower level.

    Matches round_to_nearest elementwise, including computed-distance
    ties, which argmin over ascending levels resolves downward.
    """
    vec = np.asarray(vec, dtype=float)
    dist = np.abs(vec[:, None] - levels[None, :])
    return np.argmin(dist, axis=1).astype(np.intp)


def accept(current: Solution, candidate: Solution, cfg: SolverConfig) -> bool:
    """Strict-improvement acceptance, with an optional l2 tie-break.

    A candidate whose objective ties the current one (within a tiny
    tolerance) is still accepted when the tie-break is on and its l2
    residual is strictly smaller.
    """
    if candidate.objective < current.objective:
        return True
    if (
        cfg.l2_tiebreak
        and candidate.objective <= current.objective + ACCEPT_TIE_TOL
        and np.linalg.norm(candidate.residual) < np.linalg.norm(current.residual)
    ):
        return True
    return False


class TraceEntry(NamedTuple):
    iteration: int
    current_t: float
    best_t: float
    op_pair: str
    accepted: bool


@dataclass
class SolveReport:
    """Everything a run produces: best solution, trace, timing, usage."""

    best: Solution
    trace: list[TraceEntry]
    wall_time: float
    iterations: int
    initial_objective: float
    operator_uses: dict[str, int] = field(default_factory=dict)


def removal_count(destroy_rate: float, n: int) -> int:
    """Number of variables one destroy call reassigns: ``max(1, round(rate*n))``."""
    return max(1, int(round(destroy_rate * n)))


def solve(inst: Instance, cfg: SolverConfig | None = None) -> SolveReport:
    """Run the adaptive destroy/repair/local-search loop.

    Deterministic for a fixed seed and config: one generator drives
    operator selection, destruction, and repair, and candidate evaluation
    merges deterministically regardless of ``workers``.  Stops at
    ``max_iters``, at ``time_limit`` seconds, or as soon as the objective
    hits zero.
    """
    cfg = cfg or SolverConfig()
    rng = np.random.default_rng(cfg.seed)
    started = time.perf_counter()

    current = initial_solution(inst)
    best = current.copy()
    initial_objective = current.objective
    bank = OperatorBank(decay=cfg.decay)
    fcfg = cfg.filter_config()
    r = removal_count(cfg.destroy_rate, inst.n)
    trace: list[TraceEntry] = []

    iterations = 0
    while iterations < cfg.max_iters:
        if best.objective == 0.0:
            break
        if cfg.time_limit is not None and time.perf_counter() - started > cfg.time_limit:
            break
        iterations += 1

        pair_id = select_operators(bank, rng)
        destroy_name, repair_name = PAIRS[pair_id]
        candidate = current.copy()
        if destroy_name == "random":
            destroyed = random_destroy(candidate, r, rng)
        else:
            destroyed = worst_remove_destroy(inst, candidate, r, cfg.alpha, rng)
        if repair_name == "random":
            random_repair(inst, candidate, destroyed, rng)
        else:
            greedy_repair(inst, candidate, destroyed)
        local_search(inst, candidate, fcfg)

        accepted = accept(current, candidate, cfg)
        if accepted and candidate.objective < best.objective:
            outcome = OUTCOME_NEW_BEST
        elif accepted and candidate.objective < current.objective:
            outcome = OUTCOME_IMPROVED
        elif accepted:
            outcome = OUTCOME_ACCEPTED
        else:
            outcome = OUTCOME_REJECTED
        if accepted:
            current = candidate
            if current.objective < best.objective:
                best = current.copy()
        update_weights(bank, pair_id, outcome, cfg)
        trace.append(
            TraceEntry(
                iterations,
                current.objective,
                best.objective,
                f"{destroy_name}+{repair_name}",
                accepted,
            )
        )

    return SolveReport(
        best=best,
        trace=trace,
        wall_time=time.perf_counter() - started,
        iterations=iterations,
        initial_objective=initial_objective,
        operator_uses={
            f"{d}+{r_}": int(bank.lifetime_uses[k]) for k, (d, r_) in enumerate(PAIRS)
        },
    )
