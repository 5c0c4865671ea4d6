"""Permutations that almost commute with the canonical n-cycle.

``a`` below is always ``canonical_cycle(n)``: ``i -> i + 1 mod n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import factorial, floor

from . import kernels
from .perm import Permutation, canonical_cycle, hamming_perm

EXHAUSTIVE_MAX_DEGREE = 10
BCYC_MAX_DEGREE = 8


@dataclass(frozen=True)
class SegmentSpec:
    """Cut ``0..n-1`` at ``breakpoints`` and reorder the segments.

    ``breakpoints[0] == 0``; segment ``j`` is ``[b_j, b_{j+1})`` with ``b_k = n``.
    Segment ``j`` lands at position ``order[j]`` of the new arrangement.
    """

    n: int
    breakpoints: tuple[int, ...]
    order: tuple[int, ...]

    def __post_init__(self):
        b = tuple(self.breakpoints)
        if not b or b[0] != 0:
            raise ValueError("breakpoints must start at 0")
        if any(x >= y for x, y in zip(b, b[1:])) or b[-1] >= self.n:
            raise ValueError(f"breakpoints must be strictly increasing below n={self.n}")
        if sorted(self.order) != list(range(len(b))):
            raise ValueError("order must be a permutation of the segment indices")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "order", tuple(self.order))

    @property
    def k(self) -> int:
        return len(self.breakpoints)

    def lengths(self) -> list[int]:
        ends = list(self.breakpoints[1:]) + [self.n]
        return [e - s for s, e in zip(self.breakpoints, ends)]


def build_segment_permutation(spec: SegmentSpec) -> Permutation:
    lengths = spec.lengths()
    start = [0] * spec.k
    pos = 0
    for j in sorted(range(spec.k), key=lambda j: spec.order[j]):
        start[j] = pos
        pos += lengths[j]
    images = []
    for j, (b, length) in enumerate(zip(spec.breakpoints, lengths)):
        images.extend(start[j] + t for t in range(length))
    return Permutation(images, check=False)


def commutation_defect(y: Permutation) -> Fraction:
    """``d_H(a y, y a)`` for the canonical cycle ``a``."""
    a = canonical_cycle(y.n)
    return hamming_perm(a * y, y * a)


def segment_specs(n: int, max_segments: int):
    for k in range(1, min(max_segments, n) + 1):
        for cuts in combinations(range(1, n), k - 1):
            for order in permutations(range(k)):
                yield SegmentSpec(n, (0,) + cuts, order)


def construct_near_commuting(n: int, max_segments: int, cyclic: bool = True) -> set[Permutation]:
    """Segment permutations with at most ``max_segments`` segments.

    With ``cyclic`` the cuts are taken on the cycle rather than the line: the
    first segment may start anywhere, i.e. each ``y`` is followed by every
    rotation ``a^m``. Rotations commute with ``a``, so the defect is unchanged;
    without them the rotations themselves (all of the commutant) need two
    segments and the ``k = 1`` ball is missed.
    """
    linear = {build_segment_permutation(s) for s in segment_specs(n, max_segments)}
    if not cyclic:
        return linear
    a = canonical_cycle(n)
    rotations = [a**m for m in range(n)]
    return {y * rot for y in linear for rot in rotations}


@dataclass
class NearCommutingResult:
    n: int
    k: int
    ball: set[Permutation]
    constructed: set[Permutation]

    @property
    def constructed_in_ball(self) -> set[Permutation]:
        """Constructed permutations that meet the ball's defect bound."""
        return self.constructed & self.ball

    @property
    def missing(self) -> set[Permutation]:
        """Ball elements the construction does not produce (counterexamples)."""
        return self.ball - self.constructed

    @property
    def complete(self) -> bool:
        return not self.missing

    @property
    def equal(self) -> bool:
        """Construction, filtered by the defect bound, equals the ball."""
        return self.constructed_in_ball == self.ball


def enumerate_near_commuting(n: int, k: int, cyclic: bool = True) -> NearCommutingResult:
    """Exhaustive ball ``{y : d_H(ay, ya) <= (k-1)/n}`` next to the segment
    construction with at most ``k`` segments."""
    if n > EXHAUSTIVE_MAX_DEGREE:
        raise ValueError(f"n={n} exceeds exhaustive limit {EXHAUSTIVE_MAX_DEGREE}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    ball = {Permutation(w, check=False) for w in kernels.near_commuting(n, k - 1)}
    return NearCommutingResult(n, k, ball, construct_near_commuting(n, k, cyclic))


def count_bound(n: int, epsilon) -> int:
    """``n ** (floor(epsilon * n) + 1)``."""
    epsilon = Fraction(epsilon)
    if not 0 <= epsilon <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    return n ** (floor(epsilon * n) + 1)


@dataclass
class BcycResult:
    n: int
    epsilon: Fraction
    witnesses: dict[Permutation, list[Permutation]] = field(default_factory=dict)

    @property
    def cycles(self) -> set[Permutation]:
        return set(self.witnesses)

    @property
    def size(self) -> int:
        return len(self.witnesses)

    @property
    def reference(self) -> Fraction:
        """``(n-1)!/n``, the count the asymptotic statement compares against."""
        return Fraction(factorial(self.n - 1), self.n)

    @property
    def below_reference(self) -> bool:
        return self.size < self.reference


def bcyc_enumerate(n: int, epsilon) -> BcycResult:
    """Cycles ``c = w a w^-1`` with ``d_H(w^2 a, a w^2) < epsilon``."""
    if n > BCYC_MAX_DEGREE:
        raise ValueError(f"n={n} exceeds exhaustive limit {BCYC_MAX_DEGREE}")
    if n < 2:
        raise ValueError("need n >= 2")
    epsilon = Fraction(epsilon)
    # defect count m satisfies m/n < epsilon  <=>  m <= ceil(epsilon*n) - 1
    num = epsilon * n
    max_defects = -(-num.numerator // num.denominator) - 1
    result = BcycResult(n, epsilon)
    a = canonical_cycle(n)
    for w in kernels.near_commuting(n, min(max_defects, n), square=True):
        w = Permutation(w, check=False)
        c = w * a * w.inverse()
        result.witnesses.setdefault(c, []).append(w)
    return result
