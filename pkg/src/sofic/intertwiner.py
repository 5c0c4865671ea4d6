"""Extracting a near-conjugator in P_n from an involutive near-intertwiner in P_{nr}.

Given ``x, z`` of degree ``n`` and an involution ``y`` of degree ``n*r`` with
``d_H(y (x ⊗ 1_r), (z ⊗ 1_r) y) = eps``, and ``lam`` such that every projection
``p`` with ``Tr(p) < 1/2`` has ``lam Tr(p) < d_H(p, x p x*) + d_H(p, z p z*)``,
:func:`extract` finds ``w`` with ``d_H(wx, zw)`` and ``d_H(xw, wz)`` below
``72 eps / lam``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

import numpy as np

from .expander import CHEEGER_MAX_DEGREE, expansion_below_half, spectral_lambda
from .sqrt_count import random_square_root
from .perm import (
    BlockView,
    DiagProjection,
    PartialPermutation,
    Permutation,
    canonical_cycle,
    complete_piece,
    hamming_perm,
    hamming_rows,
    random_permutation,
    tensor_identity,
    transposition,
)

CONDITION2_MAX_DEGREE = 9


@dataclass(frozen=True)
class DefectMeasurement:
    forward: Fraction  # d_H(y (x⊗1), (z⊗1) y)
    mirrored: Fraction  # d_H((x⊗1) y, y (z⊗1))

    @property
    def epsilon(self) -> Fraction:
        return max(self.forward, self.mirrored)


@dataclass
class RowSelection:
    i: int
    sums: tuple[Fraction, Fraction, Fraction, Fraction]
    eps1: list[list[Fraction]]
    eps2: list[list[Fraction]]


@dataclass
class ExtractionReport:
    epsilon: Fraction
    lam: Fraction
    selected_row: int
    row_sums: tuple[Fraction, ...]
    piece_traces: list[Fraction]
    selected_piece: int | None
    w: Permutation | None
    achieved_wx_zw: Fraction | None
    achieved_xw_wz: Fraction | None
    certified_bound: Fraction
    succeeded: bool
    row_sums_below_8eps: bool = field(default=False)

    @property
    def certificate_holds(self) -> bool:
        """Both achieved distances sit strictly below ``72 eps / lam``
        (or are 0 when ``eps == 0``)."""
        if not self.succeeded:
            return False
        if self.epsilon == 0:
            return self.achieved_wx_zw == 0 and self.achieved_xw_wz == 0
        return (
            self.achieved_wx_zw < self.certified_bound
            and self.achieved_xw_wz < self.certified_bound
        )

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "lambda": self.lam,
            "selected_row": self.selected_row,
            "row_sums": list(self.row_sums),
            "row_sums_below_8eps": self.row_sums_below_8eps,
            "piece_traces": list(self.piece_traces),
            "selected_piece": self.selected_piece,
            "w": None if self.w is None else list(self.w.images),
            "achieved_wx_zw": self.achieved_wx_zw,
            "achieved_xw_wz": self.achieved_xw_wz,
            "certified_bound": self.certified_bound,
            "succeeded": self.succeeded,
            "certificate_holds": self.certificate_holds,
        }


def swap_amplification(y: Permutation) -> Permutation:
    """The involution ``[[0, y], [y^-1, 0]]`` of degree ``2n``.

    It carries ``x ⊗ 1_2`` exactly to ``z ⊗ 1_2`` when ``y x y^-1 = z`` and
    ``y^2`` commutes with ``x``.

    With the ``coarse*2 + fine`` index: ``2w+1 -> 2y(w)`` and ``2w -> 2y^-1(w)+1``.
    """
    yinv = y.inverse()
    images = [0] * (2 * y.n)
    for w in range(y.n):
        images[2 * w + 1] = 2 * y(w)
        images[2 * w] = 2 * yinv(w) + 1
    return Permutation(images, check=False)


def _degrees(x: Permutation, z: Permutation, y: Permutation) -> int:
    if x.n != z.n:
        raise ValueError(f"degree mismatch between x and z: {x.n} != {z.n}")
    if y.n % x.n:
        raise ValueError(f"degree {y.n} of y is not a multiple of n = {x.n}")
    if not y.is_involution():
        raise ValueError("y must satisfy y^2 = id")
    return y.n // x.n


def measure_defect(x: Permutation, z: Permutation, y: Permutation) -> DefectMeasurement:
    r = _degrees(x, z, y)
    xr, zr = tensor_identity(x, r), tensor_identity(z, r)
    return DefectMeasurement(hamming_perm(y * xr, zr * y), hamming_perm(xr * y, y * zr))


def select_row(x: Permutation, z: Permutation, y: Permutation) -> RowSelection:
    """Pick the block row ``i`` minimizing the largest of the four row/column
    sums of block defects (smallest ``i`` on ties)."""
    r = _degrees(x, z, y)
    blocks = BlockView(y, x.n, r)
    eps1 = [[Fraction(0)] * r for _ in range(r)]
    eps2 = [[Fraction(0)] * r for _ in range(r)]
    for i in range(r):
        for j in range(r):
            q = blocks.piece(i, j)
            eps1[i][j] = hamming_rows(q * x, z * q)
            eps2[i][j] = hamming_rows(x * q, q * z)
    best = None
    for i in range(r):
        sums = (
            sum(eps1[i], Fraction(0)),
            sum(eps2[i], Fraction(0)),
            sum((eps1[j][i] for j in range(r)), Fraction(0)),
            sum((eps2[j][i] for j in range(r)), Fraction(0)),
        )
        if best is None or max(sums) < max(best[1]):
            best = (i, sums)
    return RowSelection(best[0], best[1], eps1, eps2)


def row_projections(y: Permutation, n: int, r: int, i: int) -> list[PartialPermutation]:
    """``p_j = y(i,j) y(j,i)``; diagonal and summing to the identity when ``y^2 = id``."""
    blocks = BlockView(y, n, r)
    return [blocks.piece(i, j) * blocks.piece(j, i) for j in range(r)]


def extract(x: Permutation, z: Permutation, y: Permutation, lam) -> ExtractionReport:
    lam = Fraction(lam)
    if not 0 < lam <= 1:
        raise ValueError(f"lambda must lie in (0, 1], got {lam}")
    eps = measure_defect(x, z, y).epsilon
    n = x.n
    r = y.n // n
    sel = select_row(x, z, y)
    blocks = BlockView(y, n, r)
    projections = row_projections(y, n, r, sel.i)
    traces = [p.trace_size() for p in projections]
    bound = 72 * eps / lam
    threshold = 1 - 32 * eps / lam

    candidates = [j for j, t in enumerate(traces) if (t > threshold if eps else t == 1)]
    report = ExtractionReport(
        epsilon=eps,
        lam=lam,
        selected_row=sel.i,
        row_sums=sel.sums,
        piece_traces=traces,
        selected_piece=None,
        w=None,
        achieved_wx_zw=None,
        achieved_xw_wz=None,
        certified_bound=bound,
        succeeded=False,
        row_sums_below_8eps=all(s < 8 * eps for s in sel.sums) if eps else all(
            s == 0 for s in sel.sums
        ),
    )
    if not candidates:
        return report
    j = max(candidates, key=lambda j: (traces[j], -j))
    w = complete_piece(blocks.piece(sel.i, j))
    report.selected_piece = j
    report.w = w
    report.achieved_wx_zw = hamming_perm(w * x, z * w)
    report.achieved_xw_wz = hamming_perm(x * w, w * z)
    report.succeeded = True
    return report


def check_condition2(x: Permutation, z: Permutation, tol) -> Permutation | None:
    """Exhaustive search for ``w`` with ``w x w^-1 = z`` and
    ``d_H(w^2 x, x w^2) < tol``; first witness in lexicographic order.

    ``tol = 0`` asks for exact commutation ``w^2 x = x w^2`` (the strict
    inequality would be empty).
    """
    if x.n != z.n:
        raise ValueError("degree mismatch")
    if x.n > CONDITION2_MAX_DEGREE:
        raise ValueError(f"n={x.n} exceeds exhaustive limit {CONDITION2_MAX_DEGREE}")
    tol = Fraction(tol)
    n = x.n
    xi, zi = x.images, z.images
    for images in permutations(range(n)):
        if any(images[xi[v]] != zi[images[v]] for v in range(n)):
            continue
        w = Permutation(images, check=False)
        w2 = w * w
        d = hamming_perm(w2 * x, x * w2)
        if d < tol or (tol == 0 and d == 0):
            return w
    return None


def admissible_lambda(x: Permutation, z: Permutation, exact_limit: int = CHEEGER_MAX_DEGREE) -> Fraction:
    """A ``lam`` in ``(0, 1]`` satisfying the expander hypothesis for ``(x, z)``.

    Up to ``exact_limit`` points the exact expansion over ``|S| < n/2`` is used
    (``lam = 1`` if it exceeds 1, else shaded by ``1023/1024`` to keep the
    inequality strict); above it the certified spectral bound is used.
    """
    if x.n <= exact_limit:
        best = expansion_below_half(x, z)
        if best is None or best.h > 1:
            return Fraction(1)
        if best.h == 0:
            raise ValueError("pair is not an expander: some small set has empty boundary")
        return best.h * Fraction(1023, 1024)
    return spectral_lambda(x, z)


def perturb_involution(y: Permutation, t: int, rng: np.random.Generator) -> Permutation:
    """Conjugate ``y`` by ``t`` random transpositions; keeps ``y^2 = id``."""
    for _ in range(t):
        i, j = rng.choice(y.n, size=2, replace=False).tolist()
        s = transposition(y.n, i, j)
        y = s * y * s
    return y


@dataclass
class PlantedInstance:
    x: Permutation
    z: Permutation
    u: Permutation
    y: Permutation


def planted_conjugator(x: Permutation, rng: np.random.Generator) -> Permutation:
    """Random ``u`` with ``u^2`` a power of ``x``, so that ``u^2`` commutes with ``x``."""
    while True:
        u = random_square_root(x ** int(rng.integers(0, x.n)), rng)
        if u is not None:
            return u


def planted_instance(
    n: int, rng: np.random.Generator, perturb: int = 0, commuting_square: bool = True
) -> PlantedInstance:
    """``x`` the canonical cycle, ``z = u x u^-1`` and ``y`` the swap
    amplification of ``u`` after ``perturb`` transpositions.

    With ``commuting_square`` the conjugator has ``u^2 x = x u^2`` and the
    unperturbed ``y`` intertwines ``x ⊗ 1_2`` and ``z ⊗ 1_2`` exactly; otherwise
    ``u`` is uniform and ``y`` is only an approximate intertwiner.
    """
    x = canonical_cycle(n)
    u = planted_conjugator(x, rng) if commuting_square else random_permutation(n, rng)
    z = u * x * u.inverse()
    y = perturb_involution(swap_amplification(u), perturb, rng)
    return PlantedInstance(x, z, u, y)


def projection_subset_sum(projections, subset) -> DiagProjection:
    n = projections[0].n
    points = set()
    for j in subset:
        points |= projections[j].domain()
    return DiagProjection(n, points)
