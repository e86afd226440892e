"""One test per acceptance criterion; each records a PASS/FAIL line that is
printed in the terminal summary."""

import time
from itertools import product

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from tensorcodes import channels as ch
from tensorcodes import cli
from tensorcodes import combinatorics as cb
from tensorcodes import decoders as dec
from tensorcodes import linalg, metrics
from tensorcodes import tensor_codes as tc
from tensorcodes.finite_field import FieldBasis, PrimeField, make_field, polynomial_basis
from tensorcodes.qpolynomials import LinPoly, MultilinPoly, box, compose_left, factor_left

import oracles

CONFIGS = [(2, 6, 1), (2, 8, 2), (3, 5, 1)]
TRIALS = 300


def record(num, title, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {title}"
    ACCEPTANCE_LINES[str(num)] = line + (f" [{detail}]" if detail else "")


def sample_verified(model, F, n, m, rng, exact_wF=None):
    while True:
        E = model.sample(F, n, m, rng)
        assert model.verify(F, E)
        if exact_wF is None or metrics.rank_fq(F, E) == exact_wF:
            return E


def trial_suite(spec, alg, model_for, trials, seed, t=None, check=None):
    """Number of trials in which alg returns the transmitted codeword."""
    F = spec.field
    good = 0
    for k in range(trials):
        rng = ch.trial_rng(seed, k)
        C = tc.encode(spec, tc.random_message(spec, rng))
        model, wF = model_for(rng)
        E = sample_verified(model, F, spec.n, spec.m, rng, wF)
        out = dec.run_decoder(spec, F.add(C, E), alg, t=t)
        ok = out.ok and np.array_equal(out.codeword, C)
        if ok and check is not None:
            ok = check(out, E)
        good += ok
    return good


# 1 -------------------------------------------------------------------------------------


def gf8_instance():
    F = make_field(2, 3)
    a = int(F.power(F.x, 3))
    alpha = FieldBasis(F, [a, int(F.power(a, 2)), int(F.power(a, 4))])
    f = MultilinPoly(F, 2, {(1, 2): a, (0, 1): 1, (1, 0): int(F.mul(a, a))})
    return tc.CodeSpec(F, alpha, 2, box((2, 2))), f


# entries as powers of b, None for 0
PUBLISHED_EV = [[4, 5, 0], [4, 0, 4], [0, None, 5]]


def gf8_parts():
    t0 = time.perf_counter()
    spec, f = gf8_instance()
    F = spec.field
    W = tc.encode(spec, f)
    direct = oracles.naive_codeword(F, spec.basis.elements.tolist(), f.coeffs, 2)
    roundtrip = np.array_equal(W, direct) and tc.decode_to_message(spec, W) == f
    published = np.array([[0 if e is None else int(F.power(F.x, e)) for e in row] for row in PUBLISHED_EV])
    return roundtrip, np.array_equal(W, published), time.perf_counter() - t0


def test_criterion_01_gf8_encoding_round_trip():
    roundtrip, _, dt = gf8_parts()
    assert roundtrip and dt < 1


@pytest.mark.xfail(strict=True, reason="published GF(8) evaluation matrix disagrees with its polynomial")
def test_criterion_01_gf8_published_matrix():
    roundtrip, exact, dt = gf8_parts()
    record(1, "GF(8) golden encoding", roundtrip and exact and dt < 1,
           f"direct evaluation and decode round trip {'ok' if roundtrip else 'broken'}; "
           f"published matrix {'matches' if exact else 'differs'}")
    assert exact


# 2 -------------------------------------------------------------------------------------


def test_criterion_02_weights_of_gf9_examples():
    t0 = time.perf_counter()
    F = make_field(3, 2)
    omega = polynomial_basis(F)

    def outer(a, b, c):
        return np.einsum("i,j,k->ijk", np.array(a), np.array(b), np.array(c)) % 3

    gammas = [
        outer([1, 1], [1, 2], [1, 2]),
        (outer([1, 1], [1, 1], [1, 1]) + outer([0, 2], [1, 1], [1, 0])) % 3,
        (outer([1, 0], [1, 0], [1, 0]) + outer([0, 1], [0, 1], [1, 0]) + outer([1, 0], [0, 1], [0, 1])) % 3,
    ]
    got_w, got_r = [], []
    for g in gammas:
        rep = metrics.weights(F, tc.from_ground(g, omega))
        got_w.append(rep.slice_weights + (rep.fibre_weight,))
        got_r.append(metrics.tensor_rank_exact(g, F.base))
    table = oracles.tensor_rank_table(3, (2, 2, 2))
    oracle_r = [table[tuple(int(x) for x in g.reshape(-1))] for g in gammas]
    dt = time.perf_counter() - t0
    ok = got_w == [(1, 1, 1), (2, 1, 2), (2, 2, 2)] and got_r == oracle_r == [1, 2, 3] and dt < 5
    record(2, "weights and tensor ranks of the GF(9) examples", ok, f"weights {got_w}, ranks {got_r}")
    assert ok


# 3 -------------------------------------------------------------------------------------


def test_criterion_03_error_count_ratio():
    t0 = time.perf_counter()
    b = cb.alg_error_lowerbounds(2, 10, 5, 5)
    grid = cb.figure3_grid(2, 10)
    dt = time.perf_counter() - t0
    ok = abs(b.log10_ratio - 39.3) <= 0.1 and len(grid) == 64 and dt < 10
    record(3, "log10(N2/N1) at q=2, n=10, mu=(5,5) and the 8x8 grid", ok,
           f"ratio {b.log10_ratio:.4f}, grid {dt:.2f}s")
    assert ok


# 4 -------------------------------------------------------------------------------------


def test_criterion_04_fibre_decoder_examples():
    t0 = time.perf_counter()
    spec = tc.make_spec(3, 5, mus=2)
    a = [int(x) for x in spec.basis.elements]
    E1 = np.array([a] + [[a[0], a[1], 0, 0, a[4]]] * 4)
    E2 = np.array([a] + [[a[0], a[1], 0, 0, a[4 - i]] for i in range(1, 5)])
    zero = np.zeros((5, 5), dtype=np.int64)
    r1 = dec.decode_columnwise(spec, E1)
    r2 = dec.decode_twoway(spec, E2)
    r3 = dec.decode_twoway(spec, E2, first="rows")
    dt = time.perf_counter() - t0
    ok = (r1.ok and np.array_equal(r1.codeword, zero) and r2.ok and np.array_equal(r2.codeword, zero)
          and not np.array_equal(r3.output, zero) and dt < 10)
    record(4, "column decoder on E1, two-way on E2, row-first fails on E2", ok)
    assert ok


# 5 -------------------------------------------------------------------------------------


def test_criterion_05_low_rank_counts():
    t0 = time.perf_counter()
    rows = []
    for q, k, m, n in [(2, 2, 2, 2), (2, 2, 2, 3), (2, 2, 3, 3), (3, 2, 2, 2)]:
        brute = oracles.rank_le2_counts(q, (k, m, n))
        formula = [1, cb.count_trank1(q, k, m, n), cb.count_trank2(q, k, m, n)]
        library = cb.low_rank_tensor_counts(q, (k, m, n))
        rows.append(brute == formula == library)
    # full rank tables where they are small
    for q, dims in [(2, (2, 2, 2)), (2, (2, 2, 3)), (3, (2, 2, 2))]:
        hist = np.bincount(list(oracles.tensor_rank_table(q, dims).values()))
        rows.append(list(hist[:3]) == [1, cb.count_trank1(q, *dims), cb.count_trank2(q, *dims)])
    roth = [cb.roth_trank2_count(q, 2) == cb.count_trank2(q, 2, 2, 2) + cb.count_trank1(q, 2, 2, 2) + 1
            for q in (2, 3, 5)]
    dt = time.perf_counter() - t0
    ok = all(rows) and all(roth) and cb.roth_trank2_count(2, 2) == 190 and dt < 300
    record(5, "rank-one and rank-two counts equal exhaustive enumeration", ok, f"{dt:.1f}s")
    assert ok


# 6 -------------------------------------------------------------------------------------


def test_criterion_06_worst_case_decoder_suites():
    t0 = time.perf_counter()
    results = {}
    for q, n, mu in CONFIGS:
        spec = tc.make_spec(q, n, mus=mu)
        radius = (n - mu - 1) // 2
        kappa = -(-(n + mu + 1) // 2)
        col = ch.ChannelModel("col-rank", {"radius": radius})
        results[(q, n, mu, "alg1")] = trial_suite(spec, "col", lambda r: (col, None), TRIALS, 1)
        sub = ch.ChannelModel("subsetJ", {"radius": radius, "kappa": kappa})
        results[(q, n, mu, "alg2")] = trial_suite(spec, "twoway", lambda r: (sub, None), TRIALS, 2)
        for t in range(n - mu):
            def model_t(r, t=t):
                mode = int(r.integers(1, 3))
                return ch.ChannelModel("slice-fibre", {"a": n - mu - 1 - t, "b": t, "mode": mode}), None
            results[(q, n, mu, f"alg3_t{t}")] = trial_suite(spec, "radical-fixed", model_t, TRIALS, 3 + t, t=t)

        def model_sigma(r):
            b = int(r.integers(0, n - mu))
            mode = int(r.integers(1, 3))
            return ch.ChannelModel("slice-fibre", {"a": n - mu - 1 - b, "b": b, "mode": mode}), None

        results[(q, n, mu, "alg4")] = trial_suite(
            spec, "radical", model_sigma, TRIALS, 20,
            check=lambda out, E: out.diagnostics["delta"] == metrics.rank_fq(spec.field, E))
    dt = time.perf_counter() - t0
    bad = {k: v for k, v in results.items() if v != TRIALS}
    ok = not bad and dt < 300
    record(6, f"decoders 1-4 inside their guarantee regions, {TRIALS} trials per suite", ok,
           f"{len(results)} suites, {dt:.1f}s" + (f", short: {bad}" if bad else ""))
    assert ok


# 7 -------------------------------------------------------------------------------------


def test_criterion_07_factoring_round_trip():
    t0 = time.perf_counter()
    good = total = 0
    for idx, (q, n, m) in enumerate([(2, 5, 2), (3, 3, 2), (2, 5, 3), (3, 3, 3)]):
        F = make_field(q, n)
        rng = np.random.default_rng(700 + idx)
        for trial in range(125):
            mu = trial % 3
            full = sorted(box((mu,) * m))
            if trial % 2:
                keep = rng.random(len(full)) < 0.6
                S = frozenset(s for s, k in zip(full, keep) if k) or frozenset(full[:1])
            else:
                S = frozenset(full)
            while True:
                V = LinPoly(F, {ell: int(rng.integers(0, F.order)) for ell in range(int(rng.integers(0, n)) + 1)})
                if not V.is_zero():
                    break
            f = MultilinPoly(F, m, {s: int(rng.integers(1, F.order)) for s in sorted(S) if rng.random() < 0.7})
            N = compose_left(V, f)
            total += 1
            good += factor_left(V, N, S) == f and oracles.ore_left_divide(F, V.coeffs, N.coeffs) == f.coeffs
    dt = time.perf_counter() - t0
    ok = good == total == 500 and dt < 60
    record(7, "left factoring inverts composition (500 pairs, two routes)", ok, f"{good}/{total}")
    assert ok


# 8 -------------------------------------------------------------------------------------


def _inequalities_hold(F, w, omega, trank):
    rep = metrics.weights(F, w)
    gamma = tc.ground_tensor(w, omega)
    K = F.base
    slice_dims = [oracles.gf_rank_prime(np.moveaxis(gamma, j, 0).reshape(F.n, -1).tolist(), F.q)
                  for j in range(2)]
    fibre_dim = oracles.gf_rank_prime(np.moveaxis(gamma, 2, 0).reshape(F.n, -1).tolist(), F.q)
    return (
        rep.fibre_weight <= trank and max(rep.slice_weights) <= trank          # rank bounds
        and max(rep.max_fibre_ranks) <= trank                                   # fibre ranks
        and list(rep.slice_weights) == slice_dims and rep.fibre_weight == fibre_dim  # ground spaces
        and all(r <= s for r, s in zip(rep.max_fibre_ranks, rep.slice_weights))      # fibre vs slice
        and tuple(metrics.slice_space_dims(K, gamma)) == tuple(slice_dims) + (fibre_dim,)
        and metrics.verify_weight_bounds(F, w, omega)
    )


def test_criterion_08_weight_rank_inequalities():
    t0 = time.perf_counter()
    F4 = make_field(2, 2)
    omega4 = polynomial_basis(F4)
    table = oracles.tensor_rank_table(2, (2, 2, 2))
    exhaustive = all(
        _inequalities_hold(F4, tc.from_ground(np.array(key).reshape(2, 2, 2), omega4), omega4, r)
        and metrics.tensor_rank_exact(np.array(key).reshape(2, 2, 2), PrimeField(2)) == r
        for key, r in table.items()
    )
    F8 = make_field(2, 3)
    omega8 = polynomial_basis(F8)
    rng = np.random.default_rng(8)
    rand_ok = 0
    for _ in range(1000):
        w = rng.integers(0, 8, size=(3, 3))
        gamma = tc.ground_tensor(w, omega8)
        terms = metrics.tensor_rank_decomposition(gamma, F8.base)
        certified = np.array_equal(metrics.reconstruct(F8.base, terms, gamma.shape), gamma)
        rand_ok += certified and _inequalities_hold(F8, w, omega8, len(terms))
    dt = time.perf_counter() - t0
    ok = exhaustive and rand_ok == 1000 and len(table) == 256 and dt < 120
    record(8, "weight and rank inequalities (256 exhaustive, 1000 random)", ok, f"{rand_ok}/1000, {dt:.1f}s")
    assert ok


# 9 -------------------------------------------------------------------------------------


def test_criterion_09_duality():
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    good = 0
    for k in range(50):
        n = 3 + k % 2
        S = {tuple(int(x) for x in p) for p in rng.integers(0, n, size=(int(rng.integers(1, n * n)), 2))}
        spec = tc.make_spec(2, n, support=S)
        F = spec.field
        dual = tc.dual_code(spec)
        G = np.array([w.reshape(-1) for w in tc.generator_words(spec)])
        H = np.array([w.reshape(-1) for w in tc.generator_words(dual)])
        orth = not np.any(F.matmul(G, H.T))
        dims = spec.dimension + dual.dimension == n * n
        # the orthogonal complement by elimination lies in the dual code
        comp = linalg.nullspace(F, G)
        inside = all(tc.membership(dual, v.reshape(n, n)) for v in comp) and len(comp) == dual.dimension
        good += orth and dims and inside and tc.dual_code(dual) == spec
    dt = time.perf_counter() - t0
    ok = good == 50 and dt < 60
    record(9, "dual code orthogonality and dimension (50 supports)", ok, f"{good}/50")
    assert ok


# 10 ------------------------------------------------------------------------------------


def test_criterion_10_order3_decoders():
    t0 = time.perf_counter()
    spec = tc.make_spec(2, 5, 3, mus=1)
    F = spec.field
    fib = ch.ChannelModel("col-rank", {"radius": 1, "mode": 1})
    two = ch.ChannelModel("subsetJ", {"radius": 1, "kappa": 4, "fibre_mode": 1, "subset_mode": 2})

    def sigma(r):
        b = int(r.integers(0, 4))
        return ch.ChannelModel("slice-fibre", {"a": 3 - b, "b": b, "mode": int(r.integers(1, 4))}), None

    counts = {}
    good = 0
    for k in range(100):
        rng = ch.trial_rng(10, k)
        C = tc.encode(spec, tc.random_message(spec, rng))
        E = sample_verified(fib, F, 5, 3, rng)
        out = dec.decode_fibrewise_m(spec, F.add(C, E), 1)
        good += out.ok and np.array_equal(out.codeword, C)
    counts["mode1"] = good
    counts["allmodes"] = trial_suite(spec, "allmodes-m", lambda r: (two, None), 100, 11)
    counts["radical"] = trial_suite(spec, "radical-m", sigma, 100, 12)
    E2 = ch.first_rows_pattern(spec.basis, 3, 2)
    C = tc.encode(spec, tc.random_message(spec, np.random.default_rng(10)))
    out = dec.decode_radical(spec, F.add(C, E2))
    pattern = out.ok and np.array_equal(out.codeword, C)
    dt = time.perf_counter() - t0
    ok = all(v == 100 for v in counts.values()) and pattern and dt < 300
    record(10, "order-3 fibre, all-mode and radical decoders", ok, f"{counts}, pattern {pattern}")
    assert ok


# 11 ------------------------------------------------------------------------------------


def test_criterion_11_supercode_success_rate():
    t0 = time.perf_counter()
    spec = tc.make_spec(2, 8, mus=2)
    model = ch.ChannelModel("slice-fibre", {"a": 8, "b": 5})
    good = trial_suite(spec, "supercode", lambda r: (model, 5), 200, 11, t=5)
    rate = good / 200
    dt = time.perf_counter() - t0
    ok = rate > 0.5 and dt < 120
    record(11, "supercode decoder at q=2, n=8, mu=2, t=5, fibre weight 5", ok, f"rate {rate:.3f}, {dt:.1f}s")
    assert ok


# 12 ------------------------------------------------------------------------------------


def test_criterion_12_bench_determinism(tmp_path, capsys):
    spec_path = tmp_path / "c.spec"
    cli.main(["gen", "--q", "2", "--n", "6", "--mu", "1", "--out", str(spec_path)])
    outs = []
    for k, workers in enumerate(("1", "1", "4")):
        path = tmp_path / f"b{k}.csv"
        cli.main(["bench", "--code", str(spec_path), "--alg", "col,twoway,radical", "--trials", "20",
                  "--seed", "42", "--model", "slice-fibre", "--a", "2", "--b", "2",
                  "--workers", workers, "--out", str(path)])
        outs.append(path.read_bytes())
    capsys.readouterr()
    ok = outs[0] == outs[1] == outs[2] and outs[0].count(b"\n") == 61
    record(12, "bench CSV is byte-identical across runs", ok)
    assert ok
