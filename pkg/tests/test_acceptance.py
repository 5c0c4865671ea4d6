"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary block at the
end of the run lists every criterion with its measured values.
"""
import time
from fractions import Fraction
from itertools import permutations
from math import factorial

import numpy as np
import pytest

from sofic.almost_commute import bcyc_enumerate, count_bound, enumerate_near_commuting
from sofic.expander import CHEEGER_MAX_DEGREE, build_graph, cheeger_exact, sample_pair, spectrum
from sofic.fullgroup import approximate_itm, embed_perm_itm, hamming_itm, random_itm
from sofic.harness import ExperimentManifest, derive_seed, emit, run_manifest
from sofic.intertwiner import admissible_lambda, extract, perturb_involution, planted_instance
from sofic.perm import (
    BlockView,
    Permutation,
    canonical_cycle,
    hamming_perm,
    hamming_rows,
    random_permutation,
    tensor_identity,
)
from sofic.rep import (
    WordWeightScheme,
    amplify,
    conjugate_rep,
    convex_combine,
    cut_rep,
    fine_block,
    first_block,
    l2_squared,
    random_free_rep,
    rep_distance_upper,
    trace_defect,
)
from sofic.sqrt_count import (
    CycleType,
    all_cycle_types,
    involution_recurrence,
    involution_sum,
    sqrt_bound_check,
    sqrt_count_bruteforce,
    sqrt_count_exact,
)

pytestmark = pytest.mark.acceptance

RESULTS: list[str] = []
MASTER = 20240607


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {title} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def rng_for(number: int, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_seed(MASTER + number, index))


def test_criterion_01_sqrt_formula():
    start = time.perf_counter()
    checked, bad = 0, []
    for n in range(1, 9):
        for t in all_cycle_types(n):
            checked += 1
            if sqrt_count_exact(t) != sqrt_count_bruteforce(t.representative()):
                bad.append(str(t))
    elapsed = time.perf_counter() - start
    report(1, "square-root formula vs brute force, degree <= 8", not bad and elapsed < 60,
           f"{checked} cycle types, mismatches={bad}, {elapsed:.2f}s")


def test_criterion_02_identity_maximal():
    start = time.perf_counter()
    bad = []
    for n in range(1, 9):
        counts = {t: sqrt_count_exact(t) for t in all_cycle_types(n)}
        best = max(counts.values())
        argmax = {t for t, c in counts.items() if c == best}
        if argmax != {CycleType.from_dict({1: n})}:
            bad.append(n)
    elapsed = time.perf_counter() - start
    report(2, "identity uniquely maximizes S_2, n <= 8", not bad and elapsed < 10, f"bad n={bad}, {elapsed:.3f}s")


def test_criterion_03_involutions():
    rec_bad = [n for n in range(0, 26) if involution_sum(n) != involution_recurrence(n)]
    bound_bad = [n for n in range(3, 31) if not sqrt_bound_check(n)[2]]
    report(3, "involution sum = recurrence (n <= 25), bound holds (3 <= n <= 30)",
           not rec_bad and not bound_bad, f"recurrence mismatches={rec_bad}, bound failures={bound_bad}")


def test_criterion_04_cheeger_inequality():
    start = time.perf_counter()
    worst = None
    violations = 0
    for i in range(200):
        rng = rng_for(4, i)
        n = 8 + i % 9
        g = build_graph(*sample_pair(n, rng))
        h = cheeger_exact(g).h
        slack = float(h) - spectrum(g).cheeger_lower_bound
        worst = slack if worst is None else min(worst, slack)
        violations += slack < -1e-9
    elapsed = time.perf_counter() - start
    report(4, "exact h >= (4 - lambda_2)/2 - 1e-9 on 200 pairs, n in 8..16", violations == 0 and elapsed < 300,
           f"violations={violations}, min slack={worst:.4f}, {elapsed:.2f}s")


def test_criterion_05_eigenvalue_threshold():
    start = time.perf_counter()
    m = ExperimentManifest("expander", {"n": 100, "threshold": 3.6}, seed=MASTER, trials=200)
    res = run_manifest(m)
    freq = res.summary["frequency_below_threshold"]
    elapsed = time.perf_counter() - start
    report(5, "max nontrivial |lambda| <= 3.6 at n=100, 200 pairs", freq >= Fraction(95, 100) and elapsed < 300,
           f"frequency={freq} = {float(freq):.3f}, errors={res.summary['errors']}, {elapsed:.2f}s")


def test_criterion_06_extraction():
    start = time.perf_counter()
    target_eps = Fraction(1, 4)
    r = 2
    runs = succeeded = certified = exact_ok = 0
    exact_lambda = 0
    failures = []
    for n in range(20, 61):
        rng = rng_for(6, n)
        inst = planted_instance(n, rng)
        lam = admissible_lambda(inst.x, inst.z)
        exact_lambda += n <= CHEEGER_MAX_DEGREE
        clean = extract(inst.x, inst.z, inst.y, lam)
        if clean.epsilon == 0 and clean.certificate_holds and clean.achieved_wx_zw == 0 and clean.achieved_xw_wz == 0:
            exact_ok += 1
        else:
            failures.append(("exact", n))
        t_max = int(target_eps * n * r / 4)
        for t in range(1, t_max + 1):
            y = perturb_involution(inst.y, t, rng)
            rep = extract(inst.x, inst.z, y, lam)
            runs += 1
            if rep.succeeded:
                succeeded += 1
                if rep.certificate_holds:
                    certified += 1
                else:
                    failures.append((n, t))
    elapsed = time.perf_counter() - start
    ok = exact_ok == 41 and certified == succeeded and not failures and elapsed < 120
    report(6, "extraction certificate d_H < 72 eps/lambda, n in 20..60, r=2", ok,
           f"unperturbed exact {exact_ok}/41; perturbed runs={runs}, succeeded={succeeded}, certified={certified}; "
           f"lambda exact for {exact_lambda} sizes, spectral above n={CHEEGER_MAX_DEGREE}; {elapsed:.2f}s")


def test_criterion_07_near_commuting():
    bad = []
    for n in range(1, 9):
        for k in range(1, min(3, n) + 1):
            res = enumerate_near_commuting(n, k)
            if not res.equal or len(res.ball) > n**k:
                bad.append((n, k))
    # the bound as a function of epsilon: k - 1 = floor(eps n)
    bound_bad = [
        (n, k) for n in range(1, 9) for k in range(1, min(3, n) + 1)
        if len(enumerate_near_commuting(n, k).ball) > count_bound(n, Fraction(k - 1, n))
    ]
    report(7, "construction (filtered by the bound) = exhaustive ball, |ball| <= n^k, n <= 8, k <= 3",
           not bad and not bound_bad, f"mismatches={bad}, bound failures={bound_bad}")


def bcyc_oracle(n, eps):
    a = canonical_cycle(n)
    out = set()
    for w in permutations(range(n)):
        w = Permutation(w)
        w2 = w * w
        if hamming_perm(w2 * a, a * w2) < eps:
            out.add(w * a * w.inverse())
    return out


def test_criterion_08_bcyc():
    bad = []
    for n in range(2, 8):
        for eps in (Fraction(0), Fraction(1, n), Fraction(2, n), Fraction(n + 1, n)):
            got = bcyc_enumerate(n, eps).cycles
            if got != bcyc_oracle(n, eps):
                bad.append((n, str(eps)))
            if eps == 0 and got:
                bad.append((n, "nonempty at 0"))
            if eps > 1 and len(got) != factorial(n - 1):
                bad.append((n, "not all cycles"))
    report(8, "Bcyc exact for n <= 7 at eps in {0, 1/n, 2/n, >1}", not bad, f"mismatches={bad}")


def test_criterion_09_direct_limit():
    bad = []
    worst = Fraction(0)
    for i in range(50):
        phi = random_itm(rng_for(9, i), max_pieces=8, max_den=12)
        for eps in (Fraction(1, 4), Fraction(1, 10)):
            res = approximate_itm(phi, eps)
            d = hamming_itm(embed_perm_itm(res.p), phi)
            worst = max(worst, d / (2 * eps))
            if not d < 2 * eps:
                bad.append((i, str(eps), str(d)))
    image_bad = []
    for i in range(50):
        rng = rng_for(9, 100 + i)
        q = random_permutation(int(rng.integers(1, 13)), rng)
        if approximate_itm(embed_perm_itm(q), Fraction(1, 10)).distance != 0:
            image_bad.append(i)
    report(9, "approximation within 2 eps for 50 maps x 2 eps; exact on the image of Phi_m", not bad and not image_bad,
           f"violations={bad}, image failures={image_bad}, max distance/(2 eps)={float(worst):.3f}")


def test_criterion_10_embedding():
    bad = []
    for i in range(100):
        rng = rng_for(10, i)
        n = int(rng.integers(1, 13))
        r = int(rng.integers(1, 5))
        p, q = random_permutation(n, rng), random_permutation(n, rng)
        if hamming_itm(embed_perm_itm(p), embed_perm_itm(q)) != hamming_perm(p, q):
            bad.append((i, "isometry"))
        if embed_perm_itm(p) != embed_perm_itm(tensor_identity(p, r)):
            bad.append((i, "compatibility"))
    report(10, "Phi_n isometric and Phi_n(p) = Phi_nr(p x 1_r), 100 samples", not bad, f"failures={bad}")


def test_criterion_11_round_trips():
    bad = []
    for i in range(20):
        rng = rng_for(11, i)
        n1, n2 = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        rep1, rep2 = random_free_rep(max(n1, 2), rng), random_free_rep(max(n2, 2), rng)
        den = int(rng.integers(2, 6))
        lam = Fraction(int(rng.integers(1, den)), den)
        combined = convex_combine(rep1, rep2, lam)
        if cut_rep(combined, first_block(rep1, rep2, lam)) != amplify(rep1, lam.numerator * rep2.degree):
            bad.append((i, "convex cut"))
        r = int(rng.integers(1, 5))
        if cut_rep(amplify(rep1, r), fine_block(rep1.degree, r, 0)) != rep1:
            bad.append((i, "amplify cut"))
        for L in range(1, 7):
            if trace_defect(amplify(rep1, r), L) != trace_defect(rep1, L):
                bad.append((i, f"trace defect L={L}"))
    report(11, "convex/cut and amplify/cut round trips; amplify keeps trace defect, L <= 6", not bad,
           f"failures={bad}")


def test_criterion_12_block_row_sums():
    bad = 0
    for i in range(500):
        rng = rng_for(12, i)
        n, r = int(rng.integers(1, 11)), int(rng.integers(1, 11))
        a, b = random_permutation(n * r, rng), random_permutation(n * r, rng)
        va, vb = BlockView(a, n, r), BlockView(b, n, r)
        total = sum(hamming_rows(va.piece(i, j), vb.piece(i, j)) for i in range(r) for j in range(r))
        bad += not (2 * hamming_perm(a, b) >= total / r)
    report(12, "2 d_H(A,B) >= (1/r) sum_ij d_H(A(i,j), B(i,j)), 500 pairs", bad == 0, f"violations={bad}")


def test_criterion_13_metric_search():
    worst_evals = 0
    misses = []
    for i in range(20):
        rng = rng_for(13, i)
        n = 3 + i % 6
        rep1 = random_free_rep(n, rng)
        rep2 = conjugate_rep(rep1, random_permutation(n, rng))
        res = rep_distance_upper(rep1, rep2, WordWeightScheme.shortlex(rep1.generators, 2), 10_000, seed=i)
        worst_evals = max(worst_evals, res.evaluations)
        if res.squared != 0:
            misses.append(n)
    l2_bad = 0
    for i in range(100):
        rng = rng_for(13, 1000 + i)
        n = int(rng.integers(1, 20))
        p, q = random_permutation(n, rng), random_permutation(n, rng)
        diff = p.matrix().astype(int) - q.matrix().astype(int)
        trace = Fraction(int(np.trace(diff @ diff.T)), n)
        l2_bad += not (l2_squared(p, q) == trace == 2 * hamming_perm(p, q))
    report(13, "planted conjugators found (n <= 8, budget 1e4); ||p-q||_2^2 = 2 d_H", not misses and l2_bad == 0,
           f"misses={misses}, max evaluations={worst_evals}, l2 failures={l2_bad}")


def test_criterion_14_determinism():
    manifests = [
        ExperimentManifest("expander", {"n": 30}, seed=7, trials=8),
        ExperimentManifest("expander", {"n": 12, "mode": "exact"}, seed=7, trials=8),
        ExperimentManifest("extract", {"n": 16, "perturb": -3}, seed=7, trials=8),
        ExperimentManifest("fullgroup", {"epsilon": "1/10"}, seed=7, trials=8),
        ExperimentManifest("rep", {"n": 6, "budget": 3000}, seed=7, trials=8),
    ]
    bad = []
    for m in manifests:
        outputs = set()
        for jobs in (1, 2, 4):
            res = run_manifest(m, jobs=jobs)
            outputs.add((emit(res, "json"), emit(res, "csv")))
        if len(outputs) != 1:
            bad.append(m.subcommand)
    report(14, "byte-identical output at jobs 1, 2, 4", not bad, f"{len(manifests)} manifests, differing={bad}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
