"""Four-regular graphs built from two n-cycles, their spectra and Cheeger constants.

Boundary convention: ``|∂S| = |S Δ a(S)| + |S Δ c(S)|``. This is the edge
boundary of the graph whose adjacency is ``M_a + M_a^T + M_c + M_c^T``, and it
equals ``n * (d_H(p, a p a*) + d_H(p, c p c*))`` for the projection ``p`` onto
``S``. ``boundary_degree`` gives the doubled count of the multiset edge list
that names every edge once through ``a`` and once through ``a^-1``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .perm import DiagProjection, Permutation, canonical_cycle, hamming_rows, random_cycle

# exact enumeration visits all 2^n subsets: ~2 s at n = 28 compiled, ~5 s at n = 20 in Python
CHEEGER_MAX_DEGREE = 28 if kernels.BACKEND == "cython" else 20
EIGEN_TOL = 1e-9
FRIEDMAN_THRESHOLD = 3.6
DEFAULT_LAMBDA = Fraction(1, 5)


class SpectrumError(RuntimeError):
    pass


@dataclass(frozen=True)
class CyclePairGraph:
    n: int
    a: Permutation
    c: Permutation
    adjacency: np.ndarray

    def matrix_hash(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.adjacency).tobytes()).hexdigest()[:16]


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray  # descending
    tolerance: float = EIGEN_TOL

    @property
    def lambda1(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda2(self) -> float:
        return float(self.eigenvalues[1]) if len(self.eigenvalues) > 1 else float("nan")

    @property
    def max_nontrivial(self) -> float:
        """``max_{i>1} |lambda_i|``."""
        return float(np.max(np.abs(self.eigenvalues[1:]))) if len(self.eigenvalues) > 1 else 0.0

    @property
    def cheeger_lower_bound(self) -> float:
        return (4.0 - self.lambda2) / 2.0


@dataclass(frozen=True)
class CheegerResult:
    h: Fraction
    witness: frozenset[int]
    boundary: int


def build_graph(a: Permutation, c: Permutation) -> CyclePairGraph:
    if a.n != c.n:
        raise ValueError(f"degree mismatch: {a.n} != {c.n}")
    if not a.is_n_cycle() or not c.is_n_cycle():
        raise ValueError("both generators must be single n-cycles")
    n = a.n
    adj = np.zeros((n, n), dtype=np.int64)
    idx = np.arange(n)
    for g in (a, c):
        m = np.zeros((n, n), dtype=np.int64)
        m[list(g.images), idx] = 1
        adj += m + m.T
    return CyclePairGraph(n, a, c, adj)


def spectrum(g: CyclePairGraph) -> Spectrum:
    adj = g.adjacency.astype(float)
    if not np.allclose(adj, adj.T, atol=EIGEN_TOL):
        raise SpectrumError(f"adjacency not symmetric (matrix {g.matrix_hash()})")
    try:
        vals = np.linalg.eigvalsh(adj)
    except np.linalg.LinAlgError as exc:
        raise SpectrumError(f"eigensolve failed for matrix {g.matrix_hash()}: {exc}") from exc
    vals = vals[::-1].copy()
    if abs(vals[0] - 4.0) > EIGEN_TOL:
        raise SpectrumError(
            f"top eigenvalue {vals[0]!r} differs from 4 (matrix {g.matrix_hash()})"
        )
    return Spectrum(vals)


def boundary_size(a: Permutation, c: Permutation, subset) -> int:
    s = set(subset)
    moved_a = {a(v) for v in s}
    moved_c = {c(v) for v in s}
    return len(s ^ moved_a) + len(s ^ moved_c)


def boundary_degree(a: Permutation, c: Permutation, subset) -> int:
    """Boundary in the multiset edge list with each edge named twice."""
    return 2 * boundary_size(a, c, subset)


def _mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(v for v in range(mask.bit_length()) if mask >> v & 1)


def _min_ratio(a: Permutation, c: Permutation, max_size: int) -> CheegerResult | None:
    if a.n > CHEEGER_MAX_DEGREE:
        raise ValueError(f"n={a.n} exceeds exact enumeration limit {CHEEGER_MAX_DEGREE}")
    best = kernels.min_boundary_ratio(a.images, c.images, max_size)
    if best is None:
        return None
    b, size, mask = best
    return CheegerResult(Fraction(b, size), _mask_to_set(mask), b)


def cheeger_exact(g: CyclePairGraph) -> CheegerResult:
    """Exact ``min_{0 < |S| <= n/2} |∂S| / |S|`` with the minimizing set
    (smallest bitmask among ties)."""
    result = _min_ratio(g.a, g.c, g.n // 2)
    if result is None:
        raise ValueError("graph too small for a Cheeger constant (n < 2)")
    return result


def expansion_below_half(a: Permutation, c: Permutation) -> CheegerResult | None:
    """Same minimum restricted to ``|S| < n/2``, the range the expander
    condition quantifies over. ``None`` when no such ``S`` exists."""
    return _min_ratio(a, c, (a.n - 1) // 2)


def projection_displacement(p: DiagProjection, a: Permutation, c: Permutation) -> Fraction:
    """``d_H(p, a p a*) + d_H(p, c p c*)``."""
    return hamming_rows(p, p.conjugate(a)) + hamming_rows(p, p.conjugate(c))


def expander_condition(a: Permutation, c: Permutation, lam, p: DiagProjection) -> bool:
    """``lam * Tr(p) < d_H(p, a p a*) + d_H(p, c p c*)`` for one projection."""
    lam = Fraction(lam)
    if not p.subset:
        raise ValueError("empty projection is not a valid input")
    if p.trace() >= Fraction(1, 2):
        raise ValueError(f"condition needs Tr(p) < 1/2, got {p.trace()}")
    return lam * p.trace() < projection_displacement(p, a, c)


def expander_condition_all(a: Permutation, c: Permutation, lam, mode: str = "exact"):
    """Check the condition for every projection with ``Tr(p) < 1/2``.

    ``exact`` enumerates every subset and returns ``(holds, witness)`` with a
    violating projection when it fails. ``spectral`` only certifies: it
    returns ``(True, None)`` when ``lam < (4 - lambda_2)/2 - tol <= h`` and
    ``(False, None)`` otherwise, which means "not certified".
    """
    lam = Fraction(lam)
    if mode == "exact":
        best = expansion_below_half(a, c)
        if best is None or lam < best.h:
            return True, None
        return False, DiagProjection(a.n, best.witness)
    if mode == "spectral":
        bound = spectrum(build_graph(a, c)).cheeger_lower_bound
        return float(lam) < bound - EIGEN_TOL, None
    raise ValueError(f"unknown mode {mode!r}")


def spectral_lambda(a: Permutation, c: Permutation, cap=Fraction(1)) -> Fraction:
    """Rational ``lam <= cap`` strictly below the certified bound ``(4 - lambda_2)/2``."""
    bound = spectrum(build_graph(a, c)).cheeger_lower_bound - 1e-6
    if bound <= 0:
        raise ValueError("spectral gap too small to certify any positive lambda")
    lam = Fraction(int(bound * 10**6), 10**6)
    return min(lam, Fraction(cap))


def sample_pair(n: int, rng: np.random.Generator) -> tuple[Permutation, Permutation]:
    """Canonical cycle and a uniform random n-cycle."""
    return canonical_cycle(n), random_cycle(n, rng)
