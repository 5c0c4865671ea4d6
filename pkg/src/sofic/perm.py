"""Permutations, pieces of permutations and diagonal projections.

Conventions used throughout the package:

* points are ``0 .. n-1``;
* ``(p * q)(i) == p(q(i))``, which matches the matrix product when the
  permutation matrix of ``p`` has a 1 in row ``p(j)`` of column ``j``;
* amplification ``p ⊗ 1_r`` acts on the global index ``coarse * r + fine``.

A piece of permutation is stored column-wise (``images[w]`` is the row of the
unique 1 in column ``w``, or ``None``). Hamming distances on matrices count
rows, so they are computed from the row-wise (inverse) view.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


class Permutation:
    """An element of Sym(n), immutable and hashable."""

    __slots__ = ("_images",)

    def __init__(self, images: Iterable[int], check: bool = True):
        images = tuple(int(v) for v in images)
        if check:
            _check_bijection(images)
        self._images = images

    @classmethod
    def identity(cls, n: int) -> Permutation:
        if n < 1:
            raise ValueError(f"degree must be positive, got {n}")
        return cls(range(n), check=False)

    @classmethod
    def parse(cls, text: str) -> Permutation:
        """Parse the one-line text format, e.g. ``"1 2 0"``."""
        try:
            images = [int(tok) for tok in text.split()]
        except ValueError as exc:
            raise ValueError(f"non-integer token in permutation text: {exc}") from None
        return cls(images)

    @property
    def images(self) -> tuple[int, ...]:
        return self._images

    @property
    def n(self) -> int:
        return len(self._images)

    def __len__(self) -> int:
        return len(self._images)

    def __call__(self, i: int) -> int:
        return self._images[i]

    def __getitem__(self, i: int) -> int:
        return self._images[i]

    def __iter__(self):
        return iter(self._images)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self._images == other._images

    def __lt__(self, other: Permutation) -> bool:
        return self._images < other._images

    def __hash__(self) -> int:
        return hash(self._images)

    def __repr__(self) -> str:
        return f"Permutation({list(self._images)})"

    def __str__(self) -> str:
        return " ".join(map(str, self._images))

    def __mul__(self, other):
        if isinstance(other, Permutation):
            return compose(self, other)
        if isinstance(other, (PartialPermutation, DiagProjection)):
            return PartialPermutation.from_permutation(self) * other
        return NotImplemented

    def __pow__(self, k: int) -> Permutation:
        if k < 0:
            return self.inverse() ** (-k)
        result = Permutation.identity(self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for i, v in enumerate(self._images):
            inv[v] = i
        return Permutation(inv, check=False)

    def fixed_points(self) -> int:
        return sum(1 for i, v in enumerate(self._images) if i == v)

    def fixed_fraction(self) -> Fraction:
        """Normalized trace of the permutation matrix."""
        return Fraction(self.fixed_points(), self.n)

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycles, each starting at its smallest point, sorted by start."""
        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            cyc = []
            v = start
            while not seen[v]:
                seen[v] = True
                cyc.append(v)
                v = self._images[v]
            out.append(tuple(cyc))
        return out

    def is_n_cycle(self) -> bool:
        return len(self.cycles()) == 1

    def is_involution(self) -> bool:
        im = self._images
        return all(im[im[i]] == i for i in range(self.n))

    def matrix(self) -> np.ndarray:
        """0/1 matrix with ``M[p(j), j] = 1``."""
        m = np.zeros((self.n, self.n), dtype=np.int64)
        m[list(self._images), list(range(self.n))] = 1
        return m


def _check_bijection(images: Sequence[int]) -> None:
    n = len(images)
    if n < 1:
        raise ValueError("degree must be positive")
    seen = [False] * n
    for i, v in enumerate(images):
        if not 0 <= v < n:
            raise ValueError(f"image {v} at index {i} is out of range for degree {n}")
        if seen[v]:
            raise ValueError(f"image {v} at index {i} is repeated; not a bijection")
        seen[v] = True


def _check_degrees(p, q) -> None:
    if p.n != q.n:
        raise ValueError(f"degree mismatch: {p.n} != {q.n}")


def compose(p: Permutation, q: Permutation) -> Permutation:
    """``p ∘ q``: apply ``q`` first."""
    _check_degrees(p, q)
    pim = p.images
    return Permutation([pim[v] for v in q.images], check=False)


def inverse(p: Permutation) -> Permutation:
    return p.inverse()


def canonical_cycle(n: int) -> Permutation:
    """The cycle ``i -> i + 1 mod n``."""
    return Permutation([(i + 1) % n for i in range(n)], check=False)


def transposition(n: int, i: int, j: int) -> Permutation:
    images = list(range(n))
    images[i], images[j] = j, i
    return Permutation(images)


def hamming_perm(p: Permutation, q: Permutation) -> Fraction:
    _check_degrees(p, q)
    moved = sum(1 for a, b in zip(p.images, q.images) if a != b)
    return Fraction(moved, p.n)


def hamming_count(p: Permutation, q: Permutation) -> int:
    """Number of points where ``p`` and ``q`` differ."""
    _check_degrees(p, q)
    return sum(1 for a, b in zip(p.images, q.images) if a != b)


class PartialPermutation:
    """Injective partial map of ``{0..n-1}``; a 0/1 matrix with at most one 1
    per row and column. ``images[w]`` is ``None`` off the domain."""

    __slots__ = ("_images", "_n")

    def __init__(self, n: int, images: Iterable[int | None], check: bool = True):
        images = tuple(None if v is None else int(v) for v in images)
        if len(images) != n:
            raise ValueError(f"expected {n} entries, got {len(images)}")
        if check:
            seen = set()
            for w, v in enumerate(images):
                if v is None:
                    continue
                if not 0 <= v < n:
                    raise ValueError(f"image {v} at index {w} out of range")
                if v in seen:
                    raise ValueError(f"image {v} at index {w} repeated; not injective")
                seen.add(v)
        self._n = n
        self._images = images

    @classmethod
    def from_mapping(cls, n: int, mapping: dict[int, int]) -> PartialPermutation:
        images = [None] * n
        for w, v in mapping.items():
            images[w] = v
        return cls(n, images)

    @classmethod
    def from_permutation(cls, p: Permutation) -> PartialPermutation:
        return cls(p.n, p.images, check=False)

    @classmethod
    def empty(cls, n: int) -> PartialPermutation:
        return cls(n, [None] * n, check=False)

    @property
    def n(self) -> int:
        return self._n

    @property
    def images(self) -> tuple[int | None, ...]:
        return self._images

    def domain(self) -> frozenset[int]:
        return frozenset(w for w, v in enumerate(self._images) if v is not None)

    def image(self) -> frozenset[int]:
        return frozenset(v for v in self._images if v is not None)

    def mapping(self) -> dict[int, int]:
        return {w: v for w, v in enumerate(self._images) if v is not None}

    def size(self) -> int:
        return sum(1 for v in self._images if v is not None)

    def trace_size(self) -> Fraction:
        """``|domain| / n``."""
        return Fraction(self.size(), self._n)

    def rows(self) -> tuple[int | None, ...]:
        """Row-wise view: entry ``v`` is the column holding the 1 of row ``v``."""
        out: list[int | None] = [None] * self._n
        for w, v in enumerate(self._images):
            if v is not None:
                out[v] = w
        return tuple(out)

    def transpose(self) -> PartialPermutation:
        return PartialPermutation(self._n, self.rows(), check=False)

    def is_full(self) -> bool:
        return all(v is not None for v in self._images)

    def to_permutation(self) -> Permutation:
        if not self.is_full():
            raise ValueError("piece is not a full permutation")
        return Permutation(self._images, check=False)

    def restrict(self, subset: Iterable[int]) -> PartialPermutation:
        keep = set(subset)
        return PartialPermutation(
            self._n, [v if w in keep else None for w, v in enumerate(self._images)], check=False
        )

    def __mul__(self, other):
        other = as_piece(other)
        if other is NotImplemented:
            return NotImplemented
        if other.n != self._n:
            raise ValueError(f"degree mismatch: {self._n} != {other.n}")
        mine = self._images
        return PartialPermutation(
            self._n, [None if v is None else mine[v] for v in other.images], check=False
        )

    def __rmul__(self, other):
        other = as_piece(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PartialPermutation)
            and self._n == other._n
            and self._images == other._images
        )

    def __hash__(self) -> int:
        return hash((self._n, self._images))

    def __repr__(self) -> str:
        return f"PartialPermutation({self._n}, {self.mapping()})"

    def matrix(self) -> np.ndarray:
        m = np.zeros((self._n, self._n), dtype=np.int64)
        for w, v in enumerate(self._images):
            if v is not None:
                m[v, w] = 1
        return m


class DiagProjection:
    """Diagonal 0/1 projection onto the coordinates in ``subset``."""

    __slots__ = ("_n", "_subset")

    def __init__(self, n: int, subset: Iterable[int]):
        subset = frozenset(int(v) for v in subset)
        if n < 1:
            raise ValueError("degree must be positive")
        for v in subset:
            if not 0 <= v < n:
                raise ValueError(f"index {v} out of range for degree {n}")
        self._n = n
        self._subset = subset

    @property
    def n(self) -> int:
        return self._n

    @property
    def subset(self) -> frozenset[int]:
        return self._subset

    def trace(self) -> Fraction:
        return Fraction(len(self._subset), self._n)

    def conjugate(self, x: Permutation) -> DiagProjection:
        """``x p x*``: projection onto ``x(S)``."""
        return DiagProjection(self._n, (x(v) for v in self._subset))

    def as_piece(self) -> PartialPermutation:
        return PartialPermutation(
            self._n, [w if w in self._subset else None for w in range(self._n)], check=False
        )

    def __mul__(self, other):
        return self.as_piece() * other

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DiagProjection)
            and self._n == other._n
            and self._subset == other._subset
        )

    def __hash__(self) -> int:
        return hash((self._n, self._subset))

    def __repr__(self) -> str:
        return f"DiagProjection({self._n}, {sorted(self._subset)})"


def as_piece(x) -> PartialPermutation:
    if isinstance(x, PartialPermutation):
        return x
    if isinstance(x, Permutation):
        return PartialPermutation.from_permutation(x)
    if isinstance(x, DiagProjection):
        return x.as_piece()
    return NotImplemented


def hamming_rows(x, y) -> Fraction:
    """Fraction of matrix rows on which ``x`` and ``y`` differ.

    Accepts permutations, pieces and diagonal projections in any mix.
    """
    px, py = as_piece(x), as_piece(y)
    if px is NotImplemented or py is NotImplemented:
        raise TypeError("operands must be permutations, pieces or diagonal projections")
    if px.n != py.n:
        raise ValueError(f"degree mismatch: {px.n} != {py.n}")
    differing = sum(1 for a, b in zip(px.rows(), py.rows()) if a != b)
    return Fraction(differing, px.n)


def tensor_identity(p: Permutation, r: int) -> Permutation:
    """``p ⊗ 1_r``: ``v*r + i -> p(v)*r + i``."""
    if r < 1:
        raise ValueError(f"r must be positive, got {r}")
    return Permutation(
        [p(v) * r + i for v in range(p.n) for i in range(r)], check=False
    )


def direct_sum(p: Permutation, q: Permutation) -> Permutation:
    shift = p.n
    return Permutation(list(p.images) + [v + shift for v in q.images], check=False)


def block_piece(y: Permutation, n: int, r: int, i: int, j: int) -> PartialPermutation:
    """Block ``(i, j)`` of ``y`` viewed as an ``r x r`` array of ``n x n`` matrices.

    ``piece(w) = v`` exactly when ``y(w*r + j) == v*r + i``.
    """
    if n * r != y.n:
        raise ValueError(f"n*r = {n * r} does not match degree {y.n}")
    if not (0 <= i < r and 0 <= j < r):
        raise IndexError(f"block index ({i}, {j}) out of range for r = {r}")
    images: list[int | None] = [None] * n
    yim = y.images
    for w in range(n):
        target = yim[w * r + j]
        if target % r == i:
            images[w] = target // r
    return PartialPermutation(n, images, check=False)


class BlockView:
    """``y`` of degree ``n*r`` seen as a function ``{0..r-1}^2 -> M_n``."""

    def __init__(self, y: Permutation, n: int, r: int):
        if n < 1 or r < 1 or n * r != y.n:
            raise ValueError(f"cannot view degree {y.n} as {r}x{r} blocks of size {n}")
        self.y = y
        self.n = n
        self.r = r
        self._cache: dict[tuple[int, int], PartialPermutation] = {}

    def piece(self, i: int, j: int) -> PartialPermutation:
        key = (i, j)
        if key not in self._cache:
            self._cache[key] = block_piece(self.y, self.n, self.r, i, j)
        return self._cache[key]

    def pieces(self) -> dict[tuple[int, int], PartialPermutation]:
        return {(i, j): self.piece(i, j) for i in range(self.r) for j in range(self.r)}

    def reassemble(self) -> Permutation:
        n, r = self.n, self.r
        images = [None] * (n * r)
        for (i, j), q in self.pieces().items():
            for w, v in q.mapping().items():
                images[w * r + j] = v * r + i
        return Permutation(images)


def complete_piece(q: PartialPermutation) -> Permutation:
    """Extend ``q`` to a permutation; leftover points are matched to leftover
    images in ascending order."""
    free_images = sorted(set(range(q.n)) - q.image())
    it = iter(free_images)
    return Permutation([next(it) if v is None else v for v in q.images], check=False)


def piecewise_glue(pieces: Sequence[tuple[DiagProjection, Permutation]]) -> Permutation:
    """Glue permutations along a partition: the result is ``u_k`` on ``p_k``."""
    if not pieces:
        raise ValueError("no pieces given")
    n = pieces[0][0].n
    images: list[int | None] = [None] * n
    hit: dict[int, int] = {}
    for k, (proj, u) in enumerate(pieces):
        if proj.n != n or u.n != n:
            raise ValueError("degree mismatch among pieces")
        for w in sorted(proj.subset):
            if images[w] is not None:
                raise ValueError(f"domains overlap at index {w}")
            v = u(w)
            if v in hit:
                raise ValueError(f"images collide at index {v} (pieces {hit[v]} and {k})")
            hit[v] = k
            images[w] = v
    missing = [w for w, v in enumerate(images) if v is None]
    if missing:
        raise ValueError(f"domains do not cover index {missing[0]}")
    return Permutation(images, check=False)


def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    return Permutation(rng.permutation(n).tolist(), check=False)


def random_cycle(n: int, rng: np.random.Generator) -> Permutation:
    """Uniform n-cycle, as a uniform conjugate of the canonical cycle."""
    if n < 2:
        raise ValueError(f"n-cycles need n >= 2, got {n}")
    u = random_permutation(n, rng)
    return u * canonical_cycle(n) * u.inverse()
