"""Instance builders: FIR filter design, tomography, quantization, subset-sum.

Each builder reduces an application to the same shape, pick one value per
variable from a finite set to minimize the worst-case residual, and supplies
a continuous warm start where the application has a natural one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Instance, Solution, ValueSet

# ---------------------------------------------------------------------------
# FIR filter design


def fixed_point_levels(bits: int) -> np.ndarray:
    """Signed fixed-point coefficient grid: ``k / 2**(bits-1)`` for
    ``k = -2**(bits-1) .. 2**(bits-1) - 1`` (``2**bits`` levels)."""
    if bits < 1:
        raise ValueError("bits must be at least 1")
    half = 2 ** (bits - 1)
    return np.arange(-half, half) / half


@dataclass
class FirSpec:
    """Linear-phase cosine FIR design on a dense frequency grid.

    ``bands`` holds ``(lo, hi, desired)`` or ``(lo, hi, desired, weight)``
    tuples in radians, disjoint and ascending within ``[0, pi]``; the grid
    places ``grid_mult * order`` points across the bands proportionally to
    band length.  ``weight`` only shapes the least-squares warm start.
    """

    order: int
    bits: int
    bands: list[tuple]
    gain: float = 1.0
    grid_mult: int = 16

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError("order must be at least 1")
        if self.bits < 1:
            raise ValueError("bits must be at least 1")
        if self.grid_mult < 1:
            raise ValueError("grid_mult must be at least 1")
        if not self.bands:
            raise ValueError("at least one band is required")
        normalized = []
        prev_hi = -np.inf
        for band in self.bands:
            if len(band) == 3:
                lo, hi, desired = band
                weight = 1.0
            elif len(band) == 4:
                lo, hi, desired, weight = band
            else:
                raise ValueError("bands must be (lo, hi, desired[, weight]) tuples")
            if not 0 <= lo < hi <= np.pi + 1e-12:
                raise ValueError(f"band ({lo}, {hi}) must satisfy 0 <= lo < hi <= pi")
            if lo < prev_hi:
                raise ValueError("bands must be disjoint and ascending")
            if weight <= 0:
                raise ValueError("band weights must be positive")
            prev_hi = hi
            normalized.append((float(lo), float(hi), float(desired), float(weight)))
        self.bands = normalized


def _band_point_counts(spec: FirSpec) -> list[int]:
    lengths = np.array([hi - lo for lo, hi, _, _ in spec.bands])
    target = spec.grid_mult * spec.order
    raw = target * lengths / lengths.sum()
    counts = np.maximum(2, np.floor(raw).astype(int))
    shortfall = target - int(counts.sum())
    if shortfall > 0:
        by_frac = np.argsort(-(raw - np.floor(raw)), kind="stable")
        for k in range(shortfall):
            counts[by_frac[k % len(counts)]] += 1
    return [int(c) for c in counts]


def build_fir(spec: FirSpec) -> Instance:
    """Quantized-coefficient FIR design as a min-max violation instance.

    Rows sample the frequency response ``sum_k h_k cos(k w)`` on the band
    grid (band endpoints included); targets are ``gain * desired``; levels
    are the ``2**bits`` fixed-point values.  The continuous warm start is
    the weighted least-squares fit on the same grid.
    """
    counts = _band_point_counts(spec)
    omegas = []
    desireds = []
    weights = []
    for (lo, hi, desired, weight), cnt in zip(spec.bands, counts):
        omegas.append(np.linspace(lo, hi, cnt))
        desireds.append(np.full(cnt, desired))
        weights.append(np.full(cnt, weight))
    omega = np.concatenate(omegas)
    b = spec.gain * np.concatenate(desireds)
    w = np.concatenate(weights)

    A = np.cos(np.outer(omega, np.arange(spec.order + 1)))
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(A * sw[:, None], b * sw, rcond=None)
    return Instance(A, b, ValueSet(fixed_point_levels(spec.bits)), continuous_init=coef)


def ripple(inst: Instance, sol: Solution) -> float:
    """Peak violation of the design targets; identical to the objective."""
    return float(sol.objective)


def symmetric_taps(coeffs) -> np.ndarray:
    """Causal tap vector whose magnitude response is the designed cosine sum.

    The design models the response as ``sum_k h_k cos(k w)``, which is the
    amplitude of the zero-phase filter with taps ``h_|n|``; folding it into
    a causal filter of length ``2N + 1`` gives ``g[N] = h_0`` and
    ``g[N +/- k] = h_k / 2``.  Feeding the raw ``h`` to :func:`apply_fir`
    would leave the uncontrolled odd part of the response in the output.
    """
    h = np.asarray(coeffs, dtype=float)
    if h.ndim != 1 or h.size == 0:
        raise ValueError("coefficients must be a non-empty 1-d vector")
    n = h.size - 1
    g = np.zeros(2 * n + 1)
    g[n] = h[0]
    if n:
        g[n + 1 :] = h[1:] / 2
        g[:n] = (h[1:] / 2)[::-1]
    return g


def apply_fir(coeffs, signal) -> np.ndarray:
    """Direct-form FIR filtering with zero-padded history.

    ``y[k] = sum_j coeffs[j] * signal[k - j]``, output as long as the input.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    signal = np.asarray(signal, dtype=float)
    if coeffs.ndim != 1 or signal.ndim != 1:
        raise ValueError("coefficients and signal must be 1-d")
    if signal.size == 0:
        return np.zeros(0)
    return np.convolve(signal, coeffs)[: signal.size]


# ---------------------------------------------------------------------------
# Discrete tomography


def build_phantom(kind: str, side: int) -> np.ndarray:
    """Deterministic integer label image (``side x side``).

    ``disk``: centered binary disk; ``squares``: nested square frames with
    labels 0..2; ``checker``: binary checkerboard.
    """
    if side < 1:
        raise ValueError("side must be at least 1")
    if kind == "disk":
        c = (side - 1) / 2.0
        rr, cc = np.mgrid[0:side, 0:side]
        return ((rr - c) ** 2 + (cc - c) ** 2 <= (0.35 * side) ** 2).astype(np.int64)
    if kind == "squares":
        img = np.zeros((side, side), dtype=np.int64)
        m1 = max(1, side // 8)
        m2 = max(2, (3 * side) // 8)
        if side > 2 * m1:
            img[m1 : side - m1, m1 : side - m1] = 1
        if side > 2 * m2:
            img[m2 : side - m2, m2 : side - m2] = 2
        return img
    if kind == "checker":
        block = max(1, side // 8)
        rr, cc = np.mgrid[0:side, 0:side]
        return ((rr // block + cc // block) % 2).astype(np.int64)
    raise ValueError(f"unknown phantom kind {kind!r}; pick disk, squares, or checker")


def _ray_weights(side: int, p0: tuple[float, float], direction: tuple[float, float]):
    """Pixel indices and intersection lengths for one ray through the grid.

    The image occupies ``[-side/2, side/2]^2`` with unit pixels; the ray is
    the line ``p0 + tau * direction`` with a unit direction vector.
    """
    half = side / 2.0
    eps = 1e-12
    t_lo, t_hi = -np.inf, np.inf
    for axis in range(2):
        d = direction[axis]
        p = p0[axis]
        if abs(d) > eps:
            t0 = (-half - p) / d
            t1 = (half - p) / d
            t_lo = max(t_lo, min(t0, t1))
            t_hi = min(t_hi, max(t0, t1))
        elif not -half <= p <= half:
            return np.zeros(0, dtype=np.intp), np.zeros(0)
    if t_hi <= t_lo:
        return np.zeros(0, dtype=np.intp), np.zeros(0)

    crossings = [np.array([t_lo, t_hi])]
    for axis in range(2):
        d = direction[axis]
        if abs(d) > eps:
            planes = (-half + np.arange(side + 1) - p0[axis]) / d
            crossings.append(planes[(planes > t_lo) & (planes < t_hi)])
    taus = np.unique(np.concatenate(crossings))

    lengths = np.diff(taus)
    mids = taus[:-1] + lengths / 2
    mx = p0[0] + mids * direction[0]
    my = p0[1] + mids * direction[1]
    cols = np.clip(np.floor(mx + half).astype(np.intp), 0, side - 1)
    rows = np.clip(np.floor(half - my).astype(np.intp), 0, side - 1)
    keep = lengths > eps
    return (rows[keep] * side + cols[keep]), lengths[keep]


def parallel_beam_matrix(side: int, angles: np.ndarray) -> np.ndarray:
    """Dense projection matrix: one detector per image column, 1-pixel
    spacing, one row per (angle, detector) in that order."""
    offsets = np.arange(side) - (side - 1) / 2.0
    A = np.zeros((len(angles) * side, side * side))
    row = 0
    for theta in angles:
        u = (np.cos(theta), np.sin(theta))
        direction = (-np.sin(theta), np.cos(theta))
        for d in offsets:
            pix, lengths = _ray_weights(side, (d * u[0], d * u[1]), direction)
            np.add.at(A[row], pix, lengths)
            row += 1
    return A


def sirt(A, b, iters: int, lo: float | None = None, hi: float | None = None) -> np.ndarray:
    """Simultaneous iterative reconstruction with row/column normalization.

    ``x <- x + C A^T R (b - A x)`` from ``x = 0``, where ``R`` and ``C``
    hold reciprocal row and column sums; when bounds are given the iterate
    is clamped into ``[lo, hi]`` after every update.  All-zero rows are
    excluded; all-zero columns receive no update.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.shape != (A.shape[0],):
        raise ValueError("A must be 2-d with matching b")
    if np.any(A < 0):
        raise ValueError("the projection matrix must be non-negative")
    if iters < 0:
        raise ValueError("iters must be non-negative")
    rowsum = A.sum(axis=1)
    colsum = A.sum(axis=0)
    live_rows = rowsum > 0
    if not live_rows.any():
        raise ValueError("every row of A is zero")
    if not (colsum > 0).any():
        raise ValueError("every column of A is zero")
    Ar = A[live_rows]
    br = b[live_rows]
    R = 1.0 / rowsum[live_rows]
    C = np.divide(1.0, colsum, out=np.zeros_like(colsum), where=colsum > 0)
    x = np.zeros(A.shape[1])
    for _ in range(iters):
        x = x + C * (Ar.T @ (R * (br - Ar @ x)))
        if lo is not None or hi is not None:
            x = np.clip(x, lo, hi)
    return x


@dataclass
class TomoSpec:
    """Parallel-beam discrete tomography reconstruction problem."""

    side: int
    gray_levels: ValueSet
    n_angles: int
    noise: float
    seed: int = 0
    phantom: str = "disk"
    sirt_iters: int = 500

    def __post_init__(self) -> None:
        if self.side < 1:
            raise ValueError("side must be at least 1")
        if self.n_angles < 1:
            raise ValueError("n_angles must be at least 1")
        if self.noise < 0:
            raise ValueError("noise must be non-negative")
        if self.sirt_iters < 0:
            raise ValueError("sirt_iters must be non-negative")
        if not isinstance(self.gray_levels, ValueSet):
            self.gray_levels = ValueSet(self.gray_levels)


def build_tomo(spec: TomoSpec) -> tuple[Instance, np.ndarray]:
    """Noisy projections of a phantom, with a clamped SIRT warm start.

    Angles are uniform over ``[0, pi)``; noise is iid uniform on
    ``[-noise, +noise]``.  Returns the instance and the ground-truth image
    (level values, ``side x side``).
    """
    labels = build_phantom(spec.phantom, spec.side)
    lv = spec.gray_levels.levels
    truth = lv[np.minimum(labels, lv.size - 1)]
    angles = np.arange(spec.n_angles) * np.pi / spec.n_angles
    A = parallel_beam_matrix(spec.side, angles)
    rng = np.random.default_rng(spec.seed)
    b = A @ truth.ravel() + rng.uniform(-spec.noise, spec.noise, A.shape[0])
    warm = sirt(A, b, spec.sirt_iters, lo=float(lv[0]), hi=float(lv[-1]))
    inst = Instance(A, b, spec.gray_levels, continuous_init=warm)
    return inst, truth


def mae(reconstruction, truth) -> float:
    """Mean absolute error between two images or vectors of equal size."""
    reconstruction = np.asarray(reconstruction, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    if reconstruction.size != truth.size:
        raise ValueError(
            f"size mismatch: reconstruction has {reconstruction.size}, truth {truth.size}"
        )
    return float(np.mean(np.abs(reconstruction - truth)))


# ---------------------------------------------------------------------------
# Weight quantization


@dataclass
class QuantSpec:
    """Post-training quantization of one weight row against calibration data."""

    dim: int
    calib: int
    bits: int
    scale: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dim < 1 or self.calib < 1:
            raise ValueError("dim and calib must be at least 1")
        if self.bits < 1:
            raise ValueError("bits must be at least 1")
        if self.scale <= 0:
            raise ValueError("scale must be positive")


def build_quant(spec: QuantSpec) -> tuple[Instance, np.ndarray]:
    """Gaussian calibration matrix, exact targets, uniform grid over the
    weight range.

    ``b = X w`` for Gaussian ``X`` and weights ``w``; the ``2**bits`` levels
    span ``[min w, max w]`` and the warm start is ``w`` itself.  Returns the
    instance and ``w``.
    """
    rng = np.random.default_rng(spec.seed)
    X = rng.standard_normal((spec.calib, spec.dim))
    w = rng.standard_normal(spec.dim) * spec.scale
    lo, hi = float(w.min()), float(w.max())
    if hi - lo < 1e-12:
        # a single weight collapses the range; widen it so levels stay distinct
        lo, hi = lo - 0.5, hi + 0.5
    grid = np.linspace(lo, hi, 2**spec.bits)
    inst = Instance(X, X @ w, ValueSet(grid), continuous_init=w)
    return inst, w


# ---------------------------------------------------------------------------
# Subset sum


@dataclass
class SubsetSumSpec:
    """Subset-sum feasibility: does a subset of ``weights`` sum to ``target``?"""

    weights: tuple[int, ...]
    target: int

    def __post_init__(self) -> None:
        self.weights = tuple(int(w) for w in self.weights)
        if not self.weights:
            raise ValueError("at least one weight is required")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive integers")
        self.target = int(self.target)
        if self.target < 0:
            raise ValueError("target must be non-negative")


def build_subsetsum(spec: SubsetSumSpec) -> Instance:
    """One-row binary instance whose objective is zero exactly when a
    subset of the weights sums to the target."""
    A = np.array([list(spec.weights)], dtype=float)
    return Instance(A, np.array([float(spec.target)]), ValueSet([0.0, 1.0]))
