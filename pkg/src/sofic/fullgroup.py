"""Exact-rational piecewise translations of [0, 1) modulo 1.

An :class:`IntervalTranslationMap` is a finite list of half-open pieces
``[l, u)`` each translated by a rational ``q`` modulo 1, with images that tile
[0, 1). These are the finitely-described elements of the full group of the
relation ``x ~ y iff x - y is rational``.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .perm import DiagProjection, Permutation

ZERO = Fraction(0)
ONE = Fraction(1)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class IntervalTranslationMap:
    """``pieces`` are ``(l, u, q)``: points of ``[l, u)`` move to ``x + q mod 1``.

    The constructor validates and canonicalizes: pieces sorted and contiguous
    from 0 to 1, neighbours with equal shift merged, shifts reduced into [0, 1).
    """

    pieces: tuple[tuple[Fraction, Fraction, Fraction], ...]

    def __post_init__(self):
        raw = sorted((_frac(l), _frac(u), _frac(q) % 1) for l, u, q in self.pieces)
        if not raw:
            raise ValueError("a map needs at least one piece")
        merged: list[tuple[Fraction, Fraction, Fraction]] = []
        pos = ZERO
        for l, u, q in raw:
            if l != pos:
                raise ValueError(f"pieces do not tile [0, 1): gap or overlap at {pos}")
            if u <= l:
                raise ValueError(f"empty or reversed piece [{l}, {u})")
            if merged and merged[-1][2] == q:
                merged[-1] = (merged[-1][0], u, q)
            else:
                merged.append((l, u, q))
            pos = u
        if pos != ONE:
            raise ValueError(f"pieces cover [0, {pos}) instead of [0, 1)")
        object.__setattr__(self, "pieces", tuple(merged))
        _check_images_tile(self.pieces)

    @classmethod
    def identity(cls) -> IntervalTranslationMap:
        return cls(((ZERO, ONE, ZERO),))

    @classmethod
    def rotation(cls, q) -> IntervalTranslationMap:
        return cls(((ZERO, ONE, _frac(q)),))

    @classmethod
    def parse(cls, text: str) -> IntervalTranslationMap:
        """Lines ``"l u q"`` with rationals written ``p/q``; ``#`` starts a comment."""
        pieces = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            if len(toks) != 3:
                raise ValueError(f"line {lineno}: expected 'l u q', got {line!r}")
            pieces.append(tuple(Fraction(t) for t in toks))
        return cls(tuple(pieces))

    def format(self) -> str:
        return "".join(f"{l} {u} {q}\n" for l, u, q in self.pieces)

    def breakpoints(self) -> list[Fraction]:
        return [l for l, _, _ in self.pieces] + [ONE]

    def shift_at(self, x) -> Fraction:
        x = _frac(x) % 1
        starts = [l for l, _, _ in self.pieces]
        return self.pieces[bisect.bisect_right(starts, x) - 1][2]

    def __call__(self, x) -> Fraction:
        x = _frac(x) % 1
        return (x + self.shift_at(x)) % 1

    def __mul__(self, other: IntervalTranslationMap) -> IntervalTranslationMap:
        return compose_itm(self, other)

    def inverse(self) -> IntervalTranslationMap:
        return inverse_itm(self)

    def shift_masses(self) -> dict[Fraction, Fraction]:
        """Measure of each shift class ``A_q = {x : u(x) = x + q mod 1}``."""
        out: dict[Fraction, Fraction] = {}
        for l, u, q in self.pieces:
            out[q] = out.get(q, ZERO) + (u - l)
        return out

    def denominators(self) -> set[int]:
        return {f.denominator for piece in self.pieces for f in piece}


def _image_intervals(pieces):
    for l, u, q in pieces:
        a, b = l + q, u + q
        if b <= 1:
            yield a, b
        elif a >= 1:
            yield a - 1, b - 1
        else:
            yield a, ONE
            yield ZERO, b - 1


def _check_images_tile(pieces) -> None:
    pos = ZERO
    for a, b in sorted(_image_intervals(pieces)):
        if a != pos:
            raise ValueError(f"images do not tile [0, 1): not a bijection near {pos}")
        pos = b
    if pos != ONE:
        raise ValueError("images do not cover [0, 1)")


def compose_itm(u: IntervalTranslationMap, v: IntervalTranslationMap) -> IntervalTranslationMap:
    """``u ∘ v``: apply ``v`` first."""
    lifted = u.breakpoints()[:-1]
    lifted = lifted + [b + 1 for b in lifted] + [Fraction(2)]
    out = []
    for l, r, q in v.pieces:
        cuts = sorted({l, r} | {b - q for b in lifted if l < b - q < r})
        for s, t in zip(cuts, cuts[1:]):
            mid = (s + t) / 2
            out.append((s, t, (q + u.shift_at(mid + q)) % 1))
    return IntervalTranslationMap(tuple(out))


def inverse_itm(u: IntervalTranslationMap) -> IntervalTranslationMap:
    out = []
    for l, r, q in u.pieces:
        a, b = l + q, r + q
        if b <= 1 or a >= 1:
            shift = a % 1 - l
            out.append((a % 1, a % 1 + (r - l), -shift))
        else:
            out.append((a, ONE, -q))
            out.append((ZERO, b - 1, -q))
    return IntervalTranslationMap(tuple(out))


def _refine(u: IntervalTranslationMap, v: IntervalTranslationMap):
    points = sorted(set(u.breakpoints()) | set(v.breakpoints()))
    for s, t in zip(points, points[1:]):
        yield s, t, u.shift_at(s), v.shift_at(s)


def hamming_itm(u: IntervalTranslationMap, v: IntervalTranslationMap) -> Fraction:
    """Lebesgue measure of ``{x : u(x) != v(x)}``."""
    return sum((t - s for s, t, qu, qv in _refine(u, v) if qu != qv), ZERO)


def embed_perm_itm(p: Permutation) -> IntervalTranslationMap:
    """``x -> (p(floor(n x)) + frac(n x)) / n``: permute the n equal cells."""
    n = p.n
    return IntervalTranslationMap(
        tuple((Fraction(j, n), Fraction(j + 1, n), Fraction(p(j) - j, n)) for j in range(n))
    )


@dataclass
class ApproximationResult:
    n: int
    p: Permutation
    distance: Fraction
    kept_shifts: list[Fraction]
    kept_mass: Fraction
    dropped_cells: int = 0


def _kept_shifts(phi: IntervalTranslationMap, epsilon: Fraction) -> list[Fraction]:
    masses = sorted(phi.shift_masses().items(), key=lambda kv: (-kv[1], kv[0]))
    kept, mass = [], ZERO
    for q, m in masses:
        if mass > 1 - epsilon:
            break
        kept.append(q)
        mass += m
    return kept


def approximate_itm(
    phi: IntervalTranslationMap, epsilon, n: int | None = None
) -> ApproximationResult:
    """Find ``n`` and ``p`` in Sym(n) with ``d_H(Phi_n(p), phi) < 2 epsilon``.

    Shift classes are kept, heaviest first, until their mass exceeds
    ``1 - epsilon``. By default ``n`` is the lcm of every denominator in
    ``phi`` so each kept class is a union of grid cells and ``Phi_n(p)`` agrees
    with ``phi`` on all of them. A coarser ``n`` may be forced (every kept
    shift must then be a multiple of ``1/n``): cells go to the kept class
    covering most of them, colliding images are dropped, and the rest is
    completed in ascending order. Only the default mode carries the
    ``< 2 epsilon`` guarantee; the achieved distance is always reported.
    """
    epsilon = _frac(epsilon)
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    kept = _kept_shifts(phi, epsilon)
    kept_set = set(kept)
    if n is None:
        n = lcm(*phi.denominators())
    for q in kept:
        if (q * n).denominator != 1:
            raise ValueError(f"kept shift {q} is not a multiple of 1/{n}")

    images: list[int | None] = [None] * n
    taken = [False] * n
    dropped = 0
    for cell in range(n):
        lo, hi = Fraction(cell, n), Fraction(cell + 1, n)
        cover: dict[Fraction, Fraction] = {}
        for l, u, q in phi.pieces:
            if q in kept_set:
                overlap = min(u, hi) - max(l, lo)
                if overlap > 0:
                    cover[q] = cover.get(q, ZERO) + overlap
        if not cover:
            continue
        q = max(cover, key=lambda s: (cover[s], -s))
        target = (cell + int(q * n)) % n
        if taken[target]:
            dropped += 1
            continue
        taken[target] = True
        images[cell] = target
    free = iter(v for v in range(n) if not taken[v])
    p = Permutation([next(free) if v is None else v for v in images])
    distance = hamming_itm(embed_perm_itm(p), phi)
    kept_mass = sum((phi.shift_masses()[q] for q in kept), ZERO)
    return ApproximationResult(n, p, distance, kept, kept_mass, dropped)


def a_lambda(lam, n: int | None = None):
    """Indicator of ``[0, lam)``: a projection of degree ``n`` when ``n`` is
    given (``lam * n`` must be an integer), else the interval itself."""
    lam = _frac(lam)
    if not 0 <= lam <= 1:
        raise ValueError("lambda must lie in [0, 1]")
    if n is None:
        return (ZERO, lam)
    size = lam * n
    if size.denominator != 1:
        raise ValueError(f"lambda * n = {size} is not an integer")
    return DiagProjection(n, range(int(size)))


def random_itm(rng: np.random.Generator, max_pieces: int = 8, max_den: int = 12) -> IntervalTranslationMap:
    """Random interval exchange followed by a rotation; breakpoints and the
    rotation have denominators at most ``max_den``."""
    grid = sorted({Fraction(a, b) for b in range(2, max_den + 1) for a in range(1, b)})
    k = int(rng.integers(1, max_pieces))
    cuts = sorted(grid[i] for i in rng.choice(len(grid), size=k - 1, replace=False)) if k > 1 else []
    ends = [ZERO] + cuts + [ONE]
    intervals = list(zip(ends, ends[1:]))
    order = rng.permutation(k).tolist()
    pieces, pos = [], ZERO
    starts = {}
    for j in order:
        starts[j] = pos
        pos += intervals[j][1] - intervals[j][0]
    for j, (l, u) in enumerate(intervals):
        pieces.append((l, u, starts[j] - l))
    iet = IntervalTranslationMap(tuple(pieces))
    b = int(rng.integers(1, max_den + 1))
    rot = IntervalTranslationMap.rotation(Fraction(int(rng.integers(0, b)), b))
    return compose_itm(rot, iet)
