"""Shared builders for randomized tests."""

from __future__ import annotations

import numpy as np

from dmmv import Instance, Solution, ValueSet


def random_levels(rng: np.random.Generator, count: int) -> np.ndarray:
    """Strictly increasing random levels in [-1, 1]."""
    while True:
        lv = np.sort(rng.uniform(-1.0, 1.0, count))
        if count == 1 or np.all(np.diff(lv) > 0):
            return lv


def random_instance(
    rng: np.random.Generator,
    m: int | None = None,
    n: int | None = None,
    nlev: int | None = None,
) -> Instance:
    m = int(rng.integers(2, 21)) if m is None else m
    n = int(rng.integers(2, 11)) if n is None else n
    nlev = int(rng.integers(2, 6)) if nlev is None else nlev
    A = rng.uniform(-1.0, 1.0, (m, n))
    b = rng.uniform(-1.0, 1.0, m)
    return Instance(A, b, ValueSet(random_levels(rng, nlev)))


def random_solution(rng: np.random.Generator, inst: Instance) -> Solution:
    idx = rng.integers(0, len(inst.values), inst.n)
    return Solution.from_indices(inst, idx)
