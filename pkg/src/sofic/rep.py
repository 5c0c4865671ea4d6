"""Finite-level sofic representations: generators sent to permutations.

Words are tuples of ``(generator, exponent)`` with exponent ``+1`` or ``-1``.
A word ``g1 g2 ... gk`` evaluates to ``Θ(g1) ∘ Θ(g2) ∘ ... ∘ Θ(gk)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .perm import (
    DiagProjection,
    Permutation,
    direct_sum,
    hamming_count,
    random_permutation,
    tensor_identity,
)

Word = tuple[tuple[str, int], ...]


def parse_word(text: str) -> Word:
    """``"b a^-1 b"``; ``a-`` and ``a⁻¹`` also mean ``a^-1``."""
    out = []
    for tok in text.replace("⁻¹", "^-1").split():
        if tok.endswith("^-1"):
            out.append((tok[:-3], -1))
        elif tok.endswith("-"):
            out.append((tok[:-1], -1))
        else:
            out.append((tok.removesuffix("^1"), 1))
    return tuple(out)


def format_word(word: Word) -> str:
    return " ".join(g if e == 1 else f"{g}^-1" for g, e in word)


def invert_word(word: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


def free_reduce(word: Sequence[tuple[str, int]]) -> Word:
    stack: list[tuple[str, int]] = []
    for letter in word:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


@dataclass(frozen=True)
class FiniteSoficRep:
    generators: tuple[str, ...]
    images: dict[str, Permutation]
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(tuple(r) for r in self.relators))
        if set(self.images) != set(self.generators):
            raise ValueError("images must be given for exactly the declared generators")
        degrees = {p.n for p in self.images.values()}
        if len(degrees) != 1:
            raise ValueError(f"generator images have different degrees: {sorted(degrees)}")
        for rel in self.relators:
            for g, e in rel:
                if g not in self.images or e not in (1, -1):
                    raise ValueError(f"relator uses unknown letter {g}^{e}")

    @property
    def degree(self) -> int:
        return next(iter(self.images.values())).n

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteSoficRep)
            and self.generators == other.generators
            and all(self.images[g] == other.images[g] for g in self.generators)
            and self.relators == other.relators
        )

    def map_images(self, fn) -> FiniteSoficRep:
        return FiniteSoficRep(self.generators, {g: fn(self.images[g]) for g in self.generators}, self.relators)

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "degree": self.degree,
            "images": {g: list(self.images[g].images) for g in self.generators},
            "relators": [format_word(r) for r in self.relators],
        }

    @classmethod
    def from_json(cls, data: dict) -> FiniteSoficRep:
        gens = data["generators"]
        images = {g: Permutation(data["images"][g]) for g in gens}
        rep = cls(gens, images, tuple(parse_word(r) for r in data.get("relators", [])))
        if "degree" in data and data["degree"] != rep.degree:
            raise ValueError(f"declared degree {data['degree']} != actual {rep.degree}")
        return rep

    @classmethod
    def load(cls, path) -> FiniteSoficRep:
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")


def evaluate_word(rep: FiniteSoficRep, word) -> Permutation:
    if isinstance(word, str):
        word = parse_word(word)
    result = Permutation.identity(rep.degree)
    for g, e in word:
        if g not in rep.images:
            raise KeyError(f"unknown generator {g!r}")
        img = rep.images[g]
        result = result * (img if e == 1 else img.inverse())
    return result


def reduced_words(generators: Sequence[str], max_length: int) -> list[Word]:
    """Nonempty freely reduced words, shortlex order (``g`` before ``g^-1``,
    generators in declared order)."""
    letters = [(g, e) for g in generators for e in (1, -1)]
    out: list[Word] = []
    level: list[Word] = [()]
    for _ in range(max_length):
        nxt = []
        for w in level:
            for letter in letters:
                if w and w[-1][0] == letter[0] and w[-1][1] == -letter[1]:
                    continue
                nxt.append(w + (letter,))
        out.extend(nxt)
        level = nxt
    return out


def _rotations(word: Word) -> set[Word]:
    return {word[i:] + word[:i] for i in range(len(word))} if word else set()


def is_trivial_by_relators(word: Word, relators: Iterable[Word]) -> bool:
    """Sound but incomplete triviality test: repeatedly delete occurrences of
    cyclic rotations of relators (and their inverses) and free-reduce."""
    patterns = set()
    for rel in relators:
        rel = free_reduce(rel)
        patterns |= _rotations(rel) | _rotations(invert_word(rel))
    patterns = sorted((p for p in patterns if p), key=len, reverse=True)
    word = free_reduce(word)
    changed = True
    while word and changed:
        changed = False
        for pat in patterns:
            m = len(pat)
            for i in range(len(word) - m + 1):
                if word[i:i + m] == pat:
                    word = free_reduce(word[:i] + word[i + m:])
                    changed = True
                    break
            if changed:
                break
    return not word


def trace_defect(rep: FiniteSoficRep, max_length: int) -> Fraction:
    """Largest fixed-point fraction over nontrivial reduced words of length
    ``<= max_length``. Words recognised as trivial via the relators are skipped."""
    if max_length < 1:
        raise ValueError("max_length must be >= 1")
    worst = Fraction(0)
    for word in reduced_words(rep.generators, max_length):
        if rep.relators and is_trivial_by_relators(word, rep.relators):
            continue
        worst = max(worst, evaluate_word(rep, word).fixed_fraction())
    return worst


def amplify(rep: FiniteSoficRep, r: int) -> FiniteSoficRep:
    return rep.map_images(lambda p: tensor_identity(p, r))


def convex_combine(rep1: FiniteSoficRep, rep2: FiniteSoficRep, lam) -> FiniteSoficRep:
    """Weighted direct sum: ``rep1 ⊗ 1_{s n2} ⊕ rep2 ⊗ 1_{t n1}`` with
    ``lam = s/(s+t)`` in lowest terms. The first ``n1 n2 s`` points form an
    invariant block of trace exactly ``lam``."""
    lam = Fraction(lam)
    if not 0 <= lam <= 1:
        raise ValueError("lambda must lie in [0, 1]")
    if rep1.generators != rep2.generators:
        raise ValueError("representations must share their generators")
    n1, n2 = rep1.degree, rep2.degree
    s, t = lam.numerator, lam.denominator - lam.numerator
    if t == 0:
        return amplify(rep1, n2)
    if s == 0:
        return amplify(rep2, n1)
    left, right = amplify(rep1, s * n2), amplify(rep2, t * n1)
    return FiniteSoficRep(
        rep1.generators,
        {g: direct_sum(left.images[g], right.images[g]) for g in rep1.generators},
        rep1.relators,
    )


def first_block(rep1: FiniteSoficRep, rep2: FiniteSoficRep, lam) -> DiagProjection:
    """The invariant block of ``convex_combine(rep1, rep2, lam)`` carrying ``rep1``."""
    lam = Fraction(lam)
    size = rep1.degree * rep2.degree * lam.numerator
    total = rep1.degree * rep2.degree * lam.denominator
    return DiagProjection(total, range(size))


def fine_block(n: int, r: int, fine: int = 0) -> DiagProjection:
    """Points ``v*r + fine`` of an ``r``-fold amplification of degree ``n``."""
    return DiagProjection(n * r, (v * r + fine for v in range(n)))


def commuting_projection_check(rep: FiniteSoficRep, p: DiagProjection) -> bool:
    if p.n != rep.degree:
        raise ValueError(f"degree mismatch: {p.n} != {rep.degree}")
    return all(p.conjugate(rep.images[g]) == p for g in rep.generators)


def cut_rep(rep: FiniteSoficRep, p: DiagProjection) -> FiniteSoficRep:
    """Restrict to the invariant set of ``p``, relabelled in increasing order."""
    if not p.subset:
        raise ValueError("cannot cut by the empty projection")
    if not commuting_projection_check(rep, p):
        raise ValueError("projection does not commute with the representation")
    points = sorted(p.subset)
    index = {v: k for k, v in enumerate(points)}
    return rep.map_images(lambda img: Permutation([index[img(v)] for v in points], check=False))


@dataclass(frozen=True)
class WordWeightScheme:
    """The first words of a shortlex enumeration, weighted ``4^-i`` (i from 1)."""

    words: tuple[Word, ...]

    @classmethod
    def shortlex(cls, generators: Sequence[str], max_length: int) -> WordWeightScheme:
        return cls(tuple(reduced_words(generators, max_length)))

    def weights(self) -> list[Fraction]:
        return [Fraction(1, 4**i) for i in range(1, len(self.words) + 1)]

    def tail_bound(self) -> Fraction:
        """Upper bound on the omitted terms: ``sum_{i>K} 4^-i * 4``."""
        return Fraction(4, 3 * 4 ** len(self.words))


def l2_squared(p: Permutation, q: Permutation) -> Fraction:
    """Normalized ``||p - q||_2^2 = Tr((p-q)(p-q)*)``, which equals ``2 d_H(p, q)``."""
    return Fraction(2 * hamming_count(p, q), p.n)


@dataclass
class DistanceSearchResult:
    squared: Fraction
    conjugator: Permutation
    evaluations: int
    tail_bound: Fraction
    history: list[Fraction] = field(default_factory=list)

    @property
    def value(self) -> float:
        return math.sqrt(self.squared)


class _Objective:
    def __init__(self, rep1, rep2, scheme):
        self.targets = [evaluate_word(rep1, w).images for w in scheme.words]
        self.sources = [evaluate_word(rep2, w).images for w in scheme.words]
        self.weights = scheme.weights()
        self.n = rep1.degree
        self.calls = 0

    def __call__(self, u: list[int]) -> Fraction:
        # sum_i 4^-i * 2 d_H(T_i, u S_i u^-1); (u S u^-1)(u(v)) = u(S(v))
        self.calls += 1
        total = Fraction(0)
        for weight, target, source in zip(self.weights, self.targets, self.sources):
            bad = sum(1 for v in range(self.n) if target[u[v]] != u[source[v]])
            if bad:
                total += weight * Fraction(2 * bad, self.n)
        return total


def _aligned_conjugator(p: Permutation, q: Permutation, rng) -> list[int] | None:
    """Random ``u`` with ``u q u^-1 = p`` (cycles matched by length), if any."""
    by_len: dict[int, list] = {}
    for cyc in p.cycles():
        by_len.setdefault(len(cyc), []).append(cyc)
    u = [0] * p.n
    pools = {k: list(v) for k, v in by_len.items()}
    for cyc in q.cycles():
        pool = pools.get(len(cyc))
        if not pool:
            return None
        target = pool.pop(int(rng.integers(0, len(pool))))
        shift = int(rng.integers(0, len(cyc)))
        for i, v in enumerate(cyc):
            u[v] = target[(i + shift) % len(cyc)]
    return u


def rep_distance_upper(
    rep1: FiniteSoficRep,
    rep2: FiniteSoficRep,
    scheme: WordWeightScheme,
    budget: int,
    seed: int = 0,
) -> DistanceSearchResult:
    """Upper bound on ``inf_u (sum_i 4^-i ||Θ1(g_i) - u Θ2(g_i) u*||_2^2)^(1/2)``.

    Random restarts (uniform, or aligned with the cycle structure of one word's
    images) followed by greedy first-improvement transposition descent.
    ``budget`` caps the number of objective evaluations.
    """
    if rep1.degree != rep2.degree:
        raise ValueError(f"degree mismatch: {rep1.degree} != {rep2.degree}")
    if rep1.generators != rep2.generators:
        raise ValueError("representations must share their generators")
    rng = np.random.default_rng(seed)
    n = rep1.degree
    f = _Objective(rep1, rep2, scheme)
    best_u = list(range(n))
    best = f(best_u)
    history = [best]
    restart = 0
    while best > 0 and f.calls < budget:
        if restart % 2 == 0 or not scheme.words:
            u = random_permutation(n, rng).images
            u = list(u)
        else:
            k = min(int(rng.geometric(0.5)) - 1, len(scheme.words) - 1)
            u = _aligned_conjugator(
                Permutation(f.targets[k], check=False), Permutation(f.sources[k], check=False), rng
            ) or list(random_permutation(n, rng).images)
        restart += 1
        cur = f(u)
        improved = True
        while improved and cur > 0 and f.calls < budget:
            improved = False
            for i in range(n):
                for j in range(i + 1, n):
                    if f.calls >= budget:
                        break
                    u[i], u[j] = u[j], u[i]
                    val = f(u)
                    if val < cur:
                        cur = val
                        improved = True
                    else:
                        u[i], u[j] = u[j], u[i]
        if cur < best:
            best, best_u = cur, list(u)
        history.append(best)
    return DistanceSearchResult(best, Permutation(best_u), f.calls, scheme.tail_bound(), history)


def random_free_rep(n: int, rng, generators=("a", "c")) -> FiniteSoficRep:
    """Each generator sent to an independent uniform n-cycle."""
    from .perm import random_cycle

    return FiniteSoficRep(tuple(generators), {g: random_cycle(n, rng) for g in generators})


def conjugate_rep(rep: FiniteSoficRep, v: Permutation) -> FiniteSoficRep:
    vinv = v.inverse()
    return rep.map_images(lambda p: v * p * vinv)
