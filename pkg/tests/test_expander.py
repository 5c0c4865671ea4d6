from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sofic.expander import (
    CHEEGER_MAX_DEGREE,
    DEFAULT_LAMBDA,
    boundary_size,
    build_graph,
    cheeger_exact,
    expander_condition,
    expander_condition_all,
    expansion_below_half,
    projection_displacement,
    sample_pair,
    spectral_lambda,
    spectrum,
)
from sofic.perm import DiagProjection, Permutation, canonical_cycle, random_cycle


def edge_boundary(adj, s):
    # edges (with multiplicity) from S to its complement
    s = sorted(s)
    comp = [v for v in range(len(adj)) if v not in set(s)]
    return int(adj[np.ix_(s, comp)].sum())


def cheeger_oracle(adj):
    n = len(adj)
    best = None
    for k in range(1, n // 2 + 1):
        for s in combinations(range(n), k):
            ratio = Fraction(edge_boundary(adj, s), k)
            if best is None or ratio < best:
                best = ratio
    return best


def test_doubled_four_cycle():
    a = canonical_cycle(4)
    g = build_graph(a, a)
    ring = np.zeros((4, 4), dtype=int)
    for v in range(4):
        ring[v, (v + 1) % 4] = ring[(v + 1) % 4, v] = 1
    assert np.array_equal(g.adjacency, 2 * ring)
    assert np.allclose(spectrum(g).eigenvalues, [4, 0, 0, -4])
    res = cheeger_exact(g)
    assert res.h == 2 and res.witness == {0, 1}


def test_three_cycle_graph():
    a = canonical_cycle(3)
    adj = build_graph(a, a).adjacency
    assert (adj.sum(axis=1) == 4).all()
    assert all(adj[i, j] >= 1 for i in range(3) for j in range(3) if i != j)


def test_non_cycle_rejected():
    with pytest.raises(ValueError):
        build_graph(Permutation([1, 0, 2]), canonical_cycle(3))


def test_expander_condition_examples():
    a = canonical_cycle(4)
    p = DiagProjection(4, {0})
    assert projection_displacement(p, a, a) == 1
    assert expander_condition(a, a, Fraction(1, 5), p)
    with pytest.raises(ValueError):
        expander_condition(a, a, Fraction(1, 5), DiagProjection(4, set()))
    assert expander_condition_all(a, a, DEFAULT_LAMBDA) == (True, None)
    assert expander_condition_all(a, a, 0)[0]


def test_condition_fails_above_expansion():
    rng = np.random.default_rng(3)
    a, c = sample_pair(11, rng)
    h = expansion_below_half(a, c).h
    holds, witness = expander_condition_all(a, c, h)
    assert not holds
    assert not expander_condition(a, c, h, witness)
    assert expander_condition_all(a, c, h * Fraction(99, 100))[0]


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 12), st.integers(0, 2**32))
def test_cheeger_matches_oracle_and_inequality(n, seed):
    a, c = sample_pair(n, np.random.default_rng(seed))
    g = build_graph(a, c)
    res = cheeger_exact(g)
    assert res.h == cheeger_oracle(g.adjacency)
    assert float(res.h) >= spectrum(g).cheeger_lower_bound - 1e-9
    assert Fraction(boundary_size(a, c, res.witness), len(res.witness)) == res.h


@given(st.integers(3, 16), st.integers(0, 2**32), st.data())
def test_boundary_identity(n, seed, data):
    a, c = sample_pair(n, np.random.default_rng(seed))
    s = data.draw(st.sets(st.integers(0, n - 1), min_size=1))
    p = DiagProjection(n, s)
    assert projection_displacement(p, a, c) == Fraction(boundary_size(a, c, s), n)
    assert boundary_size(a, c, s) == edge_boundary(build_graph(a, c).adjacency, s)


@given(st.integers(3, 40), st.integers(0, 2**32))
def test_top_eigenvalue(n, seed):
    a, c = sample_pair(n, np.random.default_rng(seed))
    spec = spectrum(build_graph(a, c))
    assert abs(spec.lambda1 - 4) < 1e-9
    assert spec.lambda2 <= 4 + 1e-9


def test_spectral_lambda_certifies():
    rng = np.random.default_rng(11)
    for n in (14, 16, 18):
        a, c = sample_pair(n, rng)
        lam = spectral_lambda(a, c)
        assert 0 < lam <= 1
        assert expander_condition_all(a, c, lam, mode="exact")[0]
        assert expander_condition_all(a, c, lam, mode="spectral")[0]


def test_cheeger_size_limit():
    n = CHEEGER_MAX_DEGREE + 1
    a = canonical_cycle(n)
    with pytest.raises(ValueError):
        cheeger_exact(build_graph(a, random_cycle(n, np.random.default_rng(0))))


def test_matrix_hash_stable():
    a = canonical_cycle(5)
    assert build_graph(a, a).matrix_hash() == build_graph(a, a).matrix_hash()


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 30), st.integers(0, 2**32))
def test_perron_vector_constant(n, seed):
    a, c = sample_pair(n, np.random.default_rng(seed))
    adj = build_graph(a, c).adjacency.astype(float)
    assert np.allclose(adj, adj.T)
    vals, vecs = np.linalg.eigh(adj)
    top = vecs[:, -1] * np.sign(vecs[0, -1])
    assert np.allclose(top, 1 / np.sqrt(n), atol=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 16), st.integers(0, 2**32))
def test_expansion_implies_condition(n, seed):
    a, c = sample_pair(n, np.random.default_rng(seed))
    h = cheeger_exact(build_graph(a, c)).h
    below = expansion_below_half(a, c)
    # strict: any lam < h passes; lam = h fails exactly when a set with |S| < n/2 attains h
    assert expander_condition_all(a, c, h * Fraction(999, 1000))[0]
    assert expander_condition_all(a, c, h)[0] == (below is None or below.h > h)
