"""Empty-boxes (occupancy) distribution and binomial sampling primitives.

EmpBox(b, c) is the law of the number of empty boxes after b balls are
thrown independently and uniformly into c boxes.  The exact pmf uses the
alternating inclusion-exclusion sum, which cancels catastrophically for
large c, so it is hard-capped at EXACT_PMF_CAP boxes; at scale callers
must use the samplers instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

EXACT_PMF_CAP = 64


class PmfUnavailableError(ValueError):
    """Exact pmf requested beyond the box-count cap; use the sampler."""


@dataclass(frozen=True)
class OccupancySpec:
    """Ball/box counts parameterizing the empty-boxes distribution."""

    balls: int
    boxes: int

    def __post_init__(self):
        if self.balls < 0:
            raise ValueError(f"balls must be >= 0, got {self.balls}")
        if self.boxes < 1:
            raise ValueError(f"boxes must be >= 1, got {self.boxes}")


def _ratio_pow(c: int, j: int, b: int) -> float:
    # ((c-j)/c)^b as exp(b*log1p(-j/c)), with 0^0 = 1; stable for b ~ 1e6.
    if b == 0:
        return 1.0
    if c - j <= 0:
        return 0.0
    return math.exp(b * math.log1p(-j / c))


def empbox_pmf(spec: OccupancySpec) -> np.ndarray:
    """Exact pmf of EmpBox(b, c), indexed x = 0..c.

    The alternating inclusion-exclusion sum cancels catastrophically in
    floating point already for moderate c, so the terms are accumulated
    in exact rational arithmetic and rounded once at the end; the box
    count is capped because the cost grows with c (and at scale only the
    samplers are needed anyway).
    """
    b, c = spec.balls, spec.boxes
    if c > EXACT_PMF_CAP:
        raise PmfUnavailableError(
            f"pmf-unavailable: boxes={c} exceeds exact cap {EXACT_PMF_CAP}; "
            "use sample_empbox instead"
        )
    denom = c**b
    pmf = np.zeros(c + 1)
    for x in range(c + 1):
        acc = 0
        for i in range(c - x + 1):
            k = x + i
            term = math.comb(k, i) * math.comb(c, k) * (c - k) ** b
            acc = acc - term if i % 2 else acc + term
        pmf[x] = float(Fraction(acc, denom))
    return pmf


def empbox_mean(spec: OccupancySpec) -> float:
    """E(X) = c ((c-1)/c)^b for X ~ EmpBox(b, c)."""
    b, c = spec.balls, spec.boxes
    return c * _ratio_pow(c, 1, b)


def empbox_variance(spec: OccupancySpec) -> float:
    """Var(X) = c(c-1)((c-2)/c)^b + c((c-1)/c)^b - c^2((c-1)/c)^(2b)."""
    b, c = spec.balls, spec.boxes
    return (
        c * (c - 1) * _ratio_pow(c, 2, b)
        + c * _ratio_pow(c, 1, b)
        - c * c * _ratio_pow(c, 1, 2 * b)
    )


def sample_empbox(spec: OccupancySpec, rng: np.random.Generator) -> int:
    """One exact draw from EmpBox(b, c) by direct ball-throwing, O(b + c)."""
    b, c = spec.balls, spec.boxes
    if b == 0:
        return c
    occupied = np.zeros(c, dtype=bool)
    occupied[rng.integers(0, c, size=b)] = True
    return int(c - occupied.sum())


def sample_empbox_many(spec: OccupancySpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """`size` independent EmpBox(b, c) draws (row-sorted distinct count)."""
    b, c = spec.balls, spec.boxes
    if b == 0:
        return np.full(size, c, dtype=np.int64)
    draws = np.sort(rng.integers(0, c, size=(size, b)), axis=1)
    distinct = 1 + (np.diff(draws, axis=1) > 0).sum(axis=1)
    return c - distinct


def sample_empbox_batch(balls: np.ndarray, boxes: int, rng: np.random.Generator) -> np.ndarray:
    """Independent EmpBox(balls[j], boxes) draws sharing one box count.

    Throws all balls at once with per-draw key offsets and counts distinct
    keys per draw; O(total log total) for total = sum(balls).
    """
    balls = np.asarray(balls, dtype=np.int64)
    if boxes < 1:
        raise ValueError("boxes must be >= 1")
    out = np.full(balls.shape, boxes, dtype=np.int64)
    total = int(balls.sum())
    if total == 0:
        return out
    rep = np.repeat(np.arange(balls.size), balls)
    keys = rep * boxes + rng.integers(0, boxes, size=total)
    hit = np.bincount(np.unique(keys) // boxes, minlength=balls.size)
    return out - hit.reshape(balls.shape)


def sample_binomial(n: int, q: float, rng: np.random.Generator) -> int:
    """Exact Binomial(n, q) draw; degenerate for q in {0, 1}."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    if q == 0.0:
        return 0
    if q == 1.0:
        return n
    return int(rng.binomial(n, q))
