"""Counting solutions of ``x^2 = y`` in Sym(n) from the cycle type of ``y``."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from . import kernels
from .perm import Permutation

BRUTEFORCE_MAX_DEGREE = 9


@dataclass(frozen=True)
class CycleType:
    """Cycle lengths with multiplicities, stored as sorted ``(length, count)``."""

    counts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        items = tuple(sorted((int(k), int(v)) for k, v in dict(self.counts).items() if v))
        for length, count in items:
            if length < 1 or count < 0:
                raise ValueError(f"bad cycle type entry {length}^{count}")
        object.__setattr__(self, "counts", items)

    @classmethod
    def from_dict(cls, counts: dict[int, int]) -> CycleType:
        return cls(tuple(counts.items()))

    @classmethod
    def parse(cls, text: str) -> CycleType:
        """Parse ``"2^2 3^1"``; a bare ``"3"`` means one cycle of length 3."""
        counts: dict[int, int] = {}
        for tok in text.replace(",", " ").split():
            m = re.fullmatch(r"(\d+)(?:\^(\d+))?", tok)
            if not m:
                raise ValueError(f"bad cycle type token {tok!r}")
            length = int(m.group(1))
            counts[length] = counts.get(length, 0) + int(m.group(2) or 1)
        if not counts:
            raise ValueError("empty cycle type")
        return cls.from_dict(counts)

    @property
    def degree(self) -> int:
        return sum(k * v for k, v in self.counts)

    def as_dict(self) -> dict[int, int]:
        return dict(self.counts)

    def count(self, length: int) -> int:
        return self.as_dict().get(length, 0)

    def representative(self) -> Permutation:
        """A permutation of this type: consecutive blocks, lengths ascending."""
        images = []
        start = 0
        for length, count in self.counts:
            for _ in range(count):
                images.extend(start + (t + 1) % length for t in range(length))
                start += length
        return Permutation(images, check=False)

    def __str__(self) -> str:
        return " ".join(f"{k}^{v}" for k, v in self.counts)


def cycle_type(p: Permutation) -> CycleType:
    counts: dict[int, int] = {}
    for cyc in p.cycles():
        counts[len(cyc)] = counts.get(len(cyc), 0) + 1
    return CycleType.from_dict(counts)


def partitions(n: int, largest: int | None = None):
    """Cycle types of degree ``n``, in reverse lexicographic order of parts."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for part in range(min(n, largest), 0, -1):
        for rest in partitions(n - part, part):
            yield (part,) + rest


def all_cycle_types(n: int) -> list[CycleType]:
    out = []
    for parts in partitions(n):
        counts: dict[int, int] = {}
        for part in parts:
            counts[part] = counts.get(part, 0) + 1
        out.append(CycleType.from_dict(counts))
    return out


def _odd_factor(length: int, count: int) -> int:
    # pair 2k of the cycles; each pair interleaves in `length` ways
    return sum(
        factorial(count) * length**k // (factorial(count - 2 * k) * factorial(k) * 2**k)
        for k in range(count // 2 + 1)
    )


def _even_factor(length: int, count: int) -> int:
    if count % 2:
        return 0
    half = count // 2
    return factorial(count) * (length // 2) ** half // factorial(half)


def sqrt_count_exact(t: CycleType) -> int:
    total = 1
    for length, count in t.counts:
        if length % 2:
            total *= _odd_factor(length, count)
        else:
            total *= _even_factor(length, count)
        if total == 0:
            return 0
    return total


def sqrt_count_bruteforce(y: Permutation) -> int:
    if y.n > BRUTEFORCE_MAX_DEGREE:
        raise ValueError(f"degree {y.n} exceeds brute-force limit {BRUTEFORCE_MAX_DEGREE}")
    return kernels.count_square_roots(y.images)


@lru_cache(maxsize=None)
def involution_sum(n: int) -> int:
    """Number of involutions (including the identity) in Sym(n)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return sum(
        factorial(n) // (factorial(n - 2 * k) * factorial(k) * 2**k) for k in range(n // 2 + 1)
    )


def involution_recurrence(n: int) -> int:
    """``I(n) = I(n-1) + (n-1) I(n-2)``, an independent route to ``involution_sum``."""
    prev, cur = 1, 1
    if n == 0:
        return 1
    for m in range(2, n + 1):
        prev, cur = cur, cur + (m - 1) * prev
    return cur


def sqrt_bound_check(n: int) -> tuple[int, Fraction, bool]:
    """Compare ``S_2(Id_n)`` with ``floor(n/2) * n! / floor(n/3)!``."""
    if n < 3:
        raise ValueError("bound is stated for n >= 3")
    lhs = involution_sum(n)
    rhs = Fraction((n // 2) * factorial(n), factorial(n // 3))
    return lhs, rhs, lhs < rhs


def random_square_root(y: Permutation, rng) -> Permutation | None:
    """A random ``x`` with ``x * x == y``, or ``None`` if none exists.

    Cycles of equal length are randomly paired and interleaved with a random
    offset; unpaired odd cycles get their unique root. Every root has positive
    probability, though the distribution is not uniform.
    """
    by_length: dict[int, list[tuple[int, ...]]] = {}
    for cyc in y.cycles():
        by_length.setdefault(len(cyc), []).append(cyc)
    images = [0] * y.n
    for length, cycles in by_length.items():
        if length % 2 == 0 and len(cycles) % 2:
            return None
        order = rng.permutation(len(cycles)).tolist()
        cycles = [cycles[k] for k in order]
        pairs = len(cycles) // 2 if length % 2 == 0 else int(rng.integers(0, len(cycles) // 2 + 1))
        for k in range(pairs):
            c1, c2 = cycles[2 * k], cycles[2 * k + 1]
            s = int(rng.integers(0, length))
            for i in range(length):
                images[c1[i]] = c2[(i + s) % length]
                images[c2[(i + s) % length]] = c1[(i + 1) % length]
        half = (length + 1) // 2
        for cyc in cycles[2 * pairs:]:
            for i in range(length):
                images[cyc[i]] = cyc[(i + half) % length]
    return Permutation(images)
