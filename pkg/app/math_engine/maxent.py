"""Solution-set geometry for two-premise entailment, maximum entropy, and eccentricity.

Four-component vectors are ordered (p(A & B), p(A & !B), p(!A & B), p(!A & !B))
for conjunction and (p(P & Q), p(P & !Q), p(!P & Q), p(!P & !Q)) for modus
ponens. Eccentricity measures how far a point estimate sits from the centroid
of the solution set, relative to the farthest point of the set.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import entr

from app.config import get_settings
from app.exceptions import (
    DegenerateSegmentError,
    InconsistentInputsError,
    InvalidInputError,
    PointNotInSetError,
    UnsupportedDimensionError,
)
from app.logger import session_logger as logger
from app.math_engine.kernel import (
    ONE,
    ZERO,
    LinearSystem,
    RationalLike,
    Sense,
    eq,
    format_rational,
    lp_optimize,
    lp_solve,
    parse_rational,
)

Vector = Tuple[Fraction, ...]


def _vector(values: Sequence[RationalLike]) -> Vector:
    return tuple(parse_rational(v) for v in values)


def _probability(value: RationalLike, name: str) -> Fraction:
    v = parse_rational(value)
    if not ZERO <= v <= ONE:
        raise InvalidInputError(f"{name} must lie in [0, 1]", {name: format_rational(v)})
    return v


@dataclass(frozen=True)
class SegmentSet:
    """Solution set that is a point (v1 == v2) or the segment between two vertices."""

    v1: Vector
    v2: Vector

    def __post_init__(self) -> None:
        v1, v2 = _vector(self.v1), _vector(self.v2)
        if len(v1) != len(v2):
            raise InvalidInputError("Segment vertices differ in length")
        for vertex in (v1, v2):
            if any(c < 0 for c in vertex) or sum(vertex, ZERO) != ONE:
                raise InvalidInputError(
                    "Segment vertices must be probability vectors",
                    {"vertex": [format_rational(c) for c in vertex]},
                )
        object.__setattr__(self, "v1", v1)
        object.__setattr__(self, "v2", v2)

    @property
    def is_degenerate(self) -> bool:
        return self.v1 == self.v2

    @property
    def direction(self) -> Vector:
        return tuple(b - a for a, b in zip(self.v1, self.v2))

    def at(self, t: RationalLike) -> Vector:
        t = parse_rational(t)
        return tuple(a + t * d for a, d in zip(self.v1, self.direction))

    def swapped(self) -> "SegmentSet":
        return SegmentSet(self.v2, self.v1)


@dataclass(frozen=True)
class EccentricityReport:
    point: Vector
    centroid: Vector
    ecc_squared: Fraction

    @property
    def ecc(self) -> float:
        return math.sqrt(self.ecc_squared)


def modus_ponens_segment(x: RationalLike, y: RationalLike) -> SegmentSet:
    """Solution set of p(P) = x, p(P -> Q) = y."""
    x = _probability(x, "x")
    y = _probability(y, "y")
    if y < ONE - x:
        raise InconsistentInputsError(
            "p(P -> Q) must be at least 1 - p(P)",
            {"x": format_rational(x), "y": format_rational(y)},
        )
    common = (y - (ONE - x), ONE - y)
    return SegmentSet(common + (ONE - x, ZERO), common + (ZERO, ONE - x))


def conjunction_segment(a: RationalLike, b: RationalLike) -> SegmentSet:
    """Solution set of p(A) = a, p(B) = b, from the lowest to the highest p(A & B)."""
    a = _probability(a, "a")
    b = _probability(b, "b")

    def vertex(t: Fraction) -> Vector:
        return (t, a - t, b - t, ONE - a - b + t)

    return SegmentSet(vertex(max(ZERO, a + b - ONE)), vertex(min(a, b)))


def modus_ponens_system(x: RationalLike, y: RationalLike) -> LinearSystem:
    return LinearSystem(4, (eq((1, 1, 0, 0), x), eq((1, 0, 1, 1), y)))


def conjunction_system(a: RationalLike, b: RationalLike) -> LinearSystem:
    return LinearSystem(4, (eq((1, 1, 0, 0), a), eq((1, 0, 1, 0), b)))


def centroid(seg: SegmentSet) -> Vector:
    return tuple((a + b) / 2 for a, b in zip(seg.v1, seg.v2))


def maxent_conjunction(a: RationalLike, b: RationalLike) -> Vector:
    """Independence distribution, which is the maximum-entropy point for conjunction."""
    a = _probability(a, "a")
    b = _probability(b, "b")
    return (a * b, a * (ONE - b), (ONE - a) * b, (ONE - a) * (ONE - b))


def entropy(p: Sequence[Union[float, Fraction]]) -> float:
    """Shannon entropy in nats with 0 log 0 = 0."""
    return float(np.sum(entr(np.asarray([float(v) for v in p], dtype=float))))


# Open interval for the root search; the endpoints themselves are checked first
_T_LOW = 1e-300
_T_HIGH = 1.0 - 2.0**-53


def maxent_on_segment(seg: SegmentSet, xtol: float = 1e-13) -> Tuple[float, ...]:
    """Entropy-maximizing point of a non-degenerate segment.

    Along ``p(t) = v1 + t d`` the entropy ``H(t)`` is concave, and since both
    endpoints sum to one, ``sum d_i = 0`` and ``H'(t) = -sum d_i log p_i(t)``.
    Concavity makes ``H'`` nonincreasing in ``t``. If ``H'`` is already
    nonpositive at the start, ``H`` only falls and ``v1`` is the maximizer; if
    it is still nonnegative at the end, ``v2`` is. Otherwise ``H'`` changes
    sign exactly once, ``H`` rises before that point and falls after it, so the
    root brentq brackets is the maximizer.
    """
    if seg.is_degenerate:
        raise DegenerateSegmentError(
            "Segment is a single point", {"point": [format_rational(c) for c in seg.v1]}
        )
    v1 = np.array([float(c) for c in seg.v1])
    v2 = np.array([float(c) for c in seg.v2])
    d = np.array([float(c) for c in seg.direction])
    moving = d != 0

    def point_array(t: float) -> np.ndarray:
        return (1.0 - t) * v1 + t * v2

    def slope(t: float) -> float:
        return float(-np.sum(d[moving] * np.log(point_array(t)[moving])))

    def point(t: float) -> Tuple[float, ...]:
        return tuple(float(v) for v in point_array(t))

    if slope(_T_LOW) <= 0:
        return point(0.0)
    if slope(_T_HIGH) >= 0:
        return point(1.0)
    t_star = brentq(slope, _T_LOW, _T_HIGH, xtol=xtol, maxiter=500)
    return point(float(t_star))


def _parameter(p: Vector, seg: SegmentSet) -> Fraction:
    """The t with p = v1 + t (v2 - v1); raises PointNotInSetError otherwise."""
    direction = seg.direction
    pivot = next(j for j, dj in enumerate(direction) if dj != 0)
    t = (p[pivot] - seg.v1[pivot]) / direction[pivot]
    if not ZERO <= t <= ONE or seg.at(t) != p:
        raise PointNotInSetError(
            "Point does not lie on the segment", {"point": [format_rational(c) for c in p]}
        )
    return t


def eccentricity_squared(p: Sequence[RationalLike], seg: SegmentSet) -> Fraction:
    """Exact squared eccentricity |p - ce|^2 / |v1 - ce|^2."""
    if seg.is_degenerate:
        raise DegenerateSegmentError(
            "Eccentricity is undefined on a single point",
            {"point": [format_rational(c) for c in seg.v1]},
        )
    point = _vector(p)
    if len(point) != len(seg.v1):
        raise PointNotInSetError("Point has the wrong dimension", {"length": len(point)})
    _parameter(point, seg)
    ce = centroid(seg)
    numerator = sum(((a - c) ** 2 for a, c in zip(point, ce)), ZERO)
    denominator = sum(((a - c) ** 2 for a, c in zip(seg.v1, ce)), ZERO)
    return numerator / denominator


def eccentricity(p: Sequence[RationalLike], seg: SegmentSet) -> float:
    return math.sqrt(eccentricity_squared(p, seg))


def eccentricity_report(p: Sequence[RationalLike], seg: SegmentSet) -> EccentricityReport:
    return EccentricityReport(_vector(p), centroid(seg), eccentricity_squared(p, seg))


def segment_from_system(system: LinearSystem) -> SegmentSet:
    """Recover the vertices of a solution set of dimension at most one by LP probes.

    Raises InfeasibleError for an empty set and UnsupportedDimensionError when
    the set is not contained in a line.
    """
    n = system.variable_count
    probes: List[Vector] = []
    for j in range(n):
        unit = [ZERO] * n
        unit[j] = ONE
        for sense in (Sense.MIN, Sense.MAX):
            probes.append(lp_solve(system, unit, sense).point)
    anchor = probes[0]
    other = next((q for q in probes if q != anchor), None)
    if other is None:
        return SegmentSet(anchor, anchor)

    d = [b - a for a, b in zip(anchor, other)]
    pivot = next(j for j, dj in enumerate(d) if dj != 0)
    for k in range(n):
        if k == pivot:
            continue
        normal = [ZERO] * n
        normal[k] = ONE
        normal[pivot] = -d[k] / d[pivot]
        if lp_optimize(system, normal, Sense.MIN) != lp_optimize(system, normal, Sense.MAX):
            raise UnsupportedDimensionError(
                "Solution set has dimension greater than one", {"variables": n}
            )
    low = lp_solve(system, d, Sense.MIN).point
    high = lp_solve(system, d, Sense.MAX).point
    return SegmentSet(low, high)


def ecc_sweep(steps: int) -> List[Tuple[Fraction, Fraction, float]]:
    """ecc of the maxent point on the interior grid k/(steps+1) for both marginals."""
    if steps < 1:
        raise InvalidInputError("Sweep needs at least one step", {"steps": steps})
    grid = [Fraction(k, steps + 1) for k in range(1, steps + 1)]
    return [
        (a, b, eccentricity(maxent_conjunction(a, b), conjunction_segment(a, b)))
        for a in grid
        for b in grid
    ]


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

MODE_MAXENT = "maxent_point"
MODE_UNIFORM = "uniform_point"
_MODES = (MODE_MAXENT, MODE_UNIFORM)


@dataclass(frozen=True)
class MonteCarloEstimate:
    mode: str
    mean: float
    samples: int
    std_error: float
    seed: Optional[int]


def _draw_marginals(rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
    """Uniform (a, b) on the open square; draws with a degenerate segment are redrawn."""
    a = rng.random(size)
    b = rng.random(size)
    while True:
        bad = np.minimum.reduce([a, b, 1.0 - a, 1.0 - b]) <= 0.0
        if not bad.any():
            return a, b
        count = int(bad.sum())
        a[bad] = rng.random(count)
        b[bad] = rng.random(count)


def _chunk_eccentricity(mode: str, seed: np.random.SeedSequence, size: int) -> Tuple[float, float]:
    rng = np.random.default_rng(seed)
    a, b = _draw_marginals(rng, size)
    low = np.maximum(0.0, a + b - 1.0)
    high = np.minimum(a, b)

    def vertex(t: np.ndarray) -> np.ndarray:
        return np.stack([t, a - t, b - t, 1.0 - a - b + t], axis=1)

    v1, v2 = vertex(low), vertex(high)
    ce = (v1 + v2) / 2.0
    if mode == MODE_MAXENT:
        p = np.stack([a * b, a * (1.0 - b), (1.0 - a) * b, (1.0 - a) * (1.0 - b)], axis=1)
    else:
        t = rng.random(size)[:, None]
        p = v1 + t * (v2 - v1)
    ecc = np.linalg.norm(p - ce, axis=1) / np.linalg.norm(v1 - ce, axis=1)
    return float(ecc.sum()), float(np.square(ecc).sum())


def expected_ecc_mc(
    mode: str,
    samples: int,
    seed: Optional[int] = None,
    chunk_size: Optional[int] = None,
    workers: Optional[int] = None,
) -> MonteCarloEstimate:
    """Monte Carlo mean eccentricity with p(A), p(B) uniform on (0,1)^2.

    Chunks draw from substreams spawned off ``seed``, and partial sums are
    combined in chunk order, so the estimate does not depend on ``workers``.
    """
    if mode not in _MODES:
        raise InvalidInputError("Unknown Monte Carlo mode", {"mode": mode, "modes": list(_MODES)})
    if samples < 1:
        raise InvalidInputError("Need at least one sample", {"samples": samples})
    settings = get_settings()
    chunk = chunk_size or settings.mc_chunk_size
    sizes = [min(chunk, samples - start) for start in range(0, samples, chunk)]
    streams = np.random.SeedSequence(seed).spawn(len(sizes))

    with ThreadPoolExecutor(max_workers=workers or settings.mc_workers) as pool:
        partials = list(pool.map(lambda args: _chunk_eccentricity(mode, *args), zip(streams, sizes)))

    total = sum(p[0] for p in partials)
    total_sq = sum(p[1] for p in partials)
    mean = total / samples
    variance = max(total_sq / samples - mean * mean, 0.0)
    std_error = math.sqrt(variance / samples)
    logger.info(
        "Monte Carlo estimate",
        mode=mode,
        samples=samples,
        chunks=len(sizes),
        mean=round(mean, 6),
        std_error=round(std_error, 6),
    )
    return MonteCarloEstimate(mode, mean, samples, std_error, seed)


__all__ = [
    "EccentricityReport",
    "MODE_MAXENT",
    "MODE_UNIFORM",
    "MonteCarloEstimate",
    "SegmentSet",
    "centroid",
    "conjunction_segment",
    "conjunction_system",
    "ecc_sweep",
    "eccentricity",
    "eccentricity_report",
    "eccentricity_squared",
    "entropy",
    "expected_ecc_mc",
    "maxent_conjunction",
    "maxent_on_segment",
    "modus_ponens_segment",
    "modus_ponens_system",
    "segment_from_system",
]
