from itertools import product

import numpy as np
import pytest

from tensorcodes import channels as ch
from tensorcodes import decoders as dec
from tensorcodes import metrics
from tensorcodes import tensor_codes as tc
from tensorcodes.finite_field import make_field, polynomial_basis
from tensorcodes.qpolynomials import factor_left

import oracles


def codeword(spec, rng):
    return tc.encode(spec, tc.random_message(spec, rng))


def check_outcome(spec, R, out):
    """A success must carry a codeword and the matching error."""
    if out.ok:
        assert tc.membership(spec, out.codeword)
        assert np.array_equal(spec.field.add(out.codeword, out.error), R)
        assert np.array_equal(tc.encode(spec, out.message), out.codeword)
    else:
        assert out.codeword is None and out.message is None


def exact_weight_error(spec, a, b, rng, mode=1):
    """slice-fibre sample with fibre weight exactly b."""
    F = spec.field
    while True:
        E = ch.slice_fibre_error(F, spec.n, spec.m, mode, a, b, rng)
        if metrics.rank_fq(F, E) == b:
            return E


# -- Gabidulin fibre decoder ---------------------------------------------------------


def test_gab_dec_corrects_rank_one_errors():
    F = make_field(2, 5)
    alpha = polynomial_basis(F)
    rng = np.random.default_rng(1)
    for _ in range(500):
        c = tc.gabidulin_encode(alpha, 2, rng.integers(0, 32, size=2))
        e = ch.rank_bounded_vector(F, 5, 1, rng)
        out, ok = dec.gab_dec(F.add(c, e), 2, alpha)
        assert ok and np.array_equal(out, c)


def test_gab_dec_codeword_is_fixed_point():
    F = make_field(3, 3)
    alpha = polynomial_basis(F)
    rng = np.random.default_rng(2)
    for k in (1, 2, 3):
        c = tc.gabidulin_encode(alpha, k, rng.integers(0, 27, size=k))
        out, ok = dec.gab_dec(c, k, alpha)
        assert ok and np.array_equal(out, c)


def test_gab_dec_beyond_radius_never_mislabels():
    F = make_field(2, 5)
    alpha = polynomial_basis(F)
    rng = np.random.default_rng(3)
    failures = 0
    for _ in range(200):
        c = tc.gabidulin_encode(alpha, 2, rng.integers(0, 32, size=2))
        e = ch.rank_bounded_vector(F, 5, 2, rng, exact=True)  # radius is 1
        r = F.add(c, e)
        out, ok = dec.gab_dec(r, 2, alpha)
        if ok:
            assert tc.gabidulin_member(alpha, 2, out)
            assert metrics.rank_fq(F, F.sub(r, out)) <= 1
        else:
            assert np.array_equal(out, r)
            failures += 1
    assert failures > 0


def test_gab_dec_rejects_bad_k():
    alpha = polynomial_basis(make_field(2, 3))
    with pytest.raises(ValueError):
        dec.gab_dec([0, 0, 0], 0, alpha)


# -- fixed points and outcome invariants ---------------------------------------------------


@pytest.mark.parametrize("alg,t", [
    ("col", None), ("row", None), ("twoway", None), ("radical", None),
    ("radical-fixed", 0), ("radical-fixed", 2), ("supercode", 0), ("supercode", 2),
])
def test_codewords_are_fixed_points(alg, t):
    spec = tc.make_spec(2, 6, mus=2)
    rng = np.random.default_rng(4)
    for _ in range(5):
        C = codeword(spec, rng)
        out = dec.run_decoder(spec, C, alg, t=t)
        assert out.ok and np.array_equal(out.codeword, C)
        assert not np.any(out.error)


@pytest.mark.parametrize("alg", ["fibrewise-m", "allmodes-m", "radical-m"])
def test_order3_codewords_are_fixed_points(alg):
    spec = tc.make_spec(2, 5, 3, mus=1)
    rng = np.random.default_rng(5)
    for _ in range(3):
        C = codeword(spec, rng)
        out = dec.run_decoder(spec, C, alg, mode=2)
        assert out.ok and np.array_equal(out.codeword, C)


def test_random_words_never_mislabel():
    spec = tc.make_spec(2, 5, mus=1)
    rng = np.random.default_rng(6)
    for alg in ("col", "twoway", "radical", "radical-fixed"):
        for _ in range(15):
            R = ch.uniform_error(spec.field, 5, 2, rng)
            check_outcome(spec, R, dec.run_decoder(spec, R, alg, t=1))


# -- fibre-wise decoders -----------------------------------------------------------


def example5():
    spec = tc.make_spec(3, 5, mus=2)
    a = [int(x) for x in spec.basis.elements]
    E1 = np.array([a] + [[a[0], a[1], 0, 0, a[4]]] * 4)
    E2 = np.array([a] + [[a[0], a[1], 0, 0, a[4 - i]] for i in range(1, 5)])
    return spec, E1, E2


def test_example_errors_have_stated_shapes():
    spec, E1, E2 = example5()
    F = spec.field
    assert metrics.max_fibre_rank(F, E1, 1) == 1
    assert metrics.rank_fq(F, E2[:, 4]) == 5
    assert ch.subset_criterion(F, E2, 1, 2, 4, 1)
    # rows 4 and 5 repeat an entry, so every row has rank >= 2, above the row radius 1
    assert sorted(metrics.rank_fq(F, row) for row in E2) == [2, 2, 3, 3, 5]


def test_example_column_decoder_on_rank_one_columns():
    spec, E1, _ = example5()
    out = dec.decode_columnwise(spec, E1)
    assert out.ok and not np.any(out.codeword)


def test_example_two_way_decoder_and_order_sensitivity():
    spec, _, E2 = example5()
    out = dec.decode_twoway(spec, E2)
    assert out.ok and not np.any(out.codeword)
    rows_first = dec.decode_twoway(spec, E2, first="rows")
    assert not np.array_equal(rows_first.output, np.zeros_like(E2))


def test_column_decoder_on_bounded_column_errors():
    rng = np.random.default_rng(7)
    for q, n, mu in [(2, 6, 1), (3, 5, 1), (2, 7, (2, 4))]:
        spec = tc.make_spec(q, n, mus=mu)
        radius = (n - spec.max_projection(1) - 1) // 2
        for _ in range(25):
            C = codeword(spec, rng)
            E = ch.fibre_rank_error(spec.field, n, 2, 1, radius, rng)
            R = spec.field.add(C, E)
            for alg in ("col", "twoway"):  # anything the column pass fixes, two-way fixes
                out = dec.run_decoder(spec, R, alg)
                assert out.ok and np.array_equal(out.codeword, C)


def test_row_decoder_on_bounded_row_errors():
    rng = np.random.default_rng(8)
    spec = tc.make_spec(2, 6, mus=(3, 1))
    for _ in range(25):
        C = codeword(spec, rng)
        E = ch.fibre_rank_error(spec.field, 6, 2, 2, 2, rng)
        out = dec.decode_rowwise(spec, spec.field.add(C, E))
        assert out.ok and np.array_equal(out.codeword, C)


def test_two_way_region_exhaustive_small():
    # q=2, n=4, mu=(0,0): three zero columns plus any rank <= 1 column
    spec = tc.make_spec(2, 4, mus=0)
    F = spec.field
    rng = np.random.default_rng(9)
    cols = [np.array(v) for v in product(range(16), repeat=4) if metrics.rank_fq(F, v) <= 1]
    assert len(cols) == 226
    for pos in range(4):
        for v in cols:
            E = np.zeros((4, 4), dtype=np.int64)
            E[:, pos] = v
            C = codeword(spec, rng)
            out = dec.decode_twoway(spec, F.add(C, E))
            assert out.ok and np.array_equal(out.codeword, C)


def test_two_way_region_with_arbitrary_bad_column():
    spec = tc.make_spec(2, 4, mus=0)
    F = spec.field
    rng = np.random.default_rng(10)
    for _ in range(200):
        E = ch.subset_error(F, 4, 2, 1, 2, 3, 1, rng)
        C = codeword(spec, rng)
        out = dec.decode_twoway(spec, F.add(C, E))
        assert out.ok and np.array_equal(out.codeword, C)


def test_fibre_decoder_errors():
    with pytest.raises(tc.SupportError):
        dec.decode_columnwise(tc.make_spec(2, 3, 3, mus=1), np.zeros((3, 3, 3), dtype=np.int64))
    with pytest.raises(tc.SupportError):
        dec.decode_twoway(tc.make_spec(2, 3, support=[(0, 1)]), np.zeros((3, 3), dtype=np.int64))
    with pytest.raises(tc.SupportError):
        dec.decode_fibrewise_m(tc.make_spec(2, 3, support=[]), np.zeros((3, 3), dtype=np.int64), 1)
    with pytest.raises(ValueError):
        dec.decode_fibrewise_m(tc.make_spec(2, 3, mus=1), np.zeros((3, 3), dtype=np.int64), 3)
    with pytest.raises(ValueError):
        dec.decode_twoway(tc.make_spec(2, 3, mus=1), np.zeros((3, 3), dtype=np.int64), first="diag")


# -- the linearised system and radical decoders -------------------------------------------


def test_linearised_system_layout():
    spec = tc.make_spec(2, 4, mus=1)
    R = codeword(spec, np.random.default_rng(11))
    system = dec.build_linearised_system(spec, R, 1)
    assert system.matrix.shape == (16, 2 + 7)  # [0,1]^2 shifted along the diagonal by 0 and 1
    assert system.support_N == tuple(sorted(system.support_N))
    F, A = spec.field, spec.basis.moore
    i1, i2 = 2, 3
    row = system.matrix[i1 * 4 + i2]
    assert int(row[1]) == int(F.frobenius(R[i1, i2], 1))
    k = system.support_N.index((2, 1))
    assert int(row[2 + k]) == int(F.neg(F.mul(A[2, i1], A[1, i2])))
    with pytest.raises(ValueError):
        dec.build_linearised_system(spec, R, 4)
    with pytest.raises(ValueError):
        dec.build_linearised_system(spec, R, 3)  # S + [0, 3] wraps


def test_solution_exists_exactly_from_fibre_weight():
    spec = tc.make_spec(2, 6, mus=1)
    F = spec.field
    rng = np.random.default_rng(12)
    for b in range(4):
        for _ in range(4):
            E = exact_weight_error(spec, 1, b, rng)
            R = F.add(codeword(spec, rng), E)
            for t in range(0, 6 - 1 - 1):  # min slice weight 1 <= n - mu - 1 - t
                _, sol = dec.solve_linearised(spec, R, t)
                assert (len(sol) > 0) == (t >= b)


def test_every_solution_factors_to_the_same_codeword():
    spec = tc.make_spec(2, 6, mus=1)
    F = spec.field
    rng = np.random.default_rng(13)
    for b in (1, 2, 3):
        for _ in range(4):
            C = codeword(spec, rng)
            R = F.add(C, exact_weight_error(spec, 1, b, rng))
            system, sol = dec.solve_linearised(spec, R, b)
            assert len(sol) >= 1
            for vec in sol:
                V, N = system.split(vec, F)
                assert np.array_equal(tc.encode(spec, factor_left(V, N, spec.support)), C)


def test_radical_fixed_recovers_low_weight_errors():
    rng = np.random.default_rng(14)
    for q, n, mu in [(2, 6, 1), (3, 5, 1), (2, 7, 2)]:
        spec = tc.make_spec(q, n, mus=mu)
        F = spec.field
        for t in range(0, n - mu - 1):
            for _ in range(4):
                C = codeword(spec, rng)
                E = ch.slice_fibre_error(F, n, 2, 1 + (t % 2), n - mu - 1 - t, t, rng)
                out = dec.decode_radical_fixed(spec, F.add(C, E), t)
                assert out.ok and np.array_equal(out.codeword, C)


def test_radical_fixed_zero_error():
    spec = tc.make_spec(2, 5, mus=1)
    C = codeword(spec, np.random.default_rng(15))
    out = dec.decode_radical_fixed(spec, C, 0)
    assert out.ok and np.array_equal(out.codeword, C)


def test_radical_recovers_first_rows_pattern():
    for q, n, mu in [(2, 6, 1), (3, 5, 1), (2, 7, 2)]:
        spec = tc.make_spec(q, n, mus=mu)
        a = n - mu - 2
        E = ch.first_rows_pattern(spec.basis, 2, a)
        rep = metrics.weights(spec.field, E)
        assert rep.slice_weights == (a, 1) and rep.fibre_weight == a
        C = codeword(spec, np.random.default_rng(16))
        out = dec.decode_radical(spec, spec.field.add(C, E))
        assert out.ok and np.array_equal(out.codeword, C)
        assert out.diagnostics["delta"] == a


def test_radical_recovers_sigma_bounded_errors_with_least_delta():
    rng = np.random.default_rng(17)
    for q, n, mu in [(2, 6, 1), (2, 8, 2), (3, 5, 1)]:
        spec = tc.make_spec(q, n, mus=mu)
        F = spec.field
        for _ in range(12):
            b = int(rng.integers(0, n - mu))
            a = n - mu - 1 - b
            E = ch.slice_fibre_error(F, n, 2, int(rng.integers(1, 3)), a, b, rng)
            C = codeword(spec, rng)
            out = dec.decode_radical(spec, F.add(C, E))
            assert out.ok and np.array_equal(out.codeword, C)
            assert out.diagnostics["delta"] == metrics.rank_fq(F, E)


def test_radical_on_full_code_and_errors():
    spec = tc.make_spec(2, 3, mus=2)
    R = ch.uniform_error(spec.field, 3, 2, np.random.default_rng(0))
    out = dec.decode_radical(spec, R)
    assert out.ok and np.array_equal(out.codeword, R)
    with pytest.raises(tc.SupportError):
        dec.decode_radical(tc.make_spec(2, 4, mus=(1, 2)), np.zeros((4, 4), dtype=np.int64))
    with pytest.raises(ValueError):
        dec.run_decoder(spec, R, "radical-fixed")
    with pytest.raises(ValueError):
        dec.run_decoder(spec, R, "nearest")


def test_low_tensor_rank_errors_corrected_by_all_decoders():
    # q=2, n=3, mu=0: every error of tensor rank <= 1 lies in every guarantee region
    spec = tc.make_spec(2, 3, mus=0)
    F = spec.field
    omega = polynomial_basis(F)
    rng = np.random.default_rng(18)
    ones = sorted(oracles.rank_one_tensors(2, (3, 3, 3)))
    assert len(ones) == 343
    for g in ones:
        E = tc.from_ground(np.array(g).reshape(3, 3, 3), omega)
        assert metrics.word_tensor_rank(F, E, omega) == 1
        C = codeword(spec, rng)
        R = F.add(C, E)
        for alg in ("col", "row", "twoway", "radical"):
            out = dec.run_decoder(spec, R, alg)
            assert out.ok and np.array_equal(out.codeword, C), alg


# -- supercode ------------------------------------------------------------------------


def test_supercode_matches_radical_inside_half_radius():
    spec = tc.make_spec(2, 6, mus=1)
    F = spec.field
    rng = np.random.default_rng(19)
    for _ in range(15):
        b = int(rng.integers(0, 3))  # floor((n - mu - 1)/2) = 2
        E = exact_weight_error(spec, 6, b, rng)
        C = codeword(spec, rng)
        R = F.add(C, E)
        sup = dec.decode_supercode(spec, R, b)
        rad = dec.decode_radical(spec, R)
        assert sup.ok and rad.ok
        assert np.array_equal(sup.codeword, C) and np.array_equal(rad.codeword, C)


def test_supercode_outcomes_are_consistent_beyond_half_radius():
    spec = tc.make_spec(2, 6, mus=1)
    F = spec.field
    rng = np.random.default_rng(20)
    wins = 0
    for _ in range(15):
        E = exact_weight_error(spec, 1, 4, rng)
        C = codeword(spec, rng)
        R = F.add(C, E)
        out = dec.decode_supercode(spec, R, 4)
        check_outcome(spec, R, out)
        wins += out.ok and np.array_equal(out.codeword, C)
    assert wins > 0


def test_supercode_errors():
    spec = tc.make_spec(2, 5, mus=1)
    R = np.zeros((5, 5), dtype=np.int64)
    with pytest.raises(ValueError):
        dec.decode_supercode(spec, R, 4)
    with pytest.raises(tc.SupportError):
        dec.decode_supercode(tc.make_spec(2, 5, 3, mus=1), np.zeros((5,) * 3, dtype=np.int64), 1)


# -- order 3 --------------------------------------------------------------------------


def test_order3_mode_decoder_on_bounded_fibres():
    spec = tc.make_spec(2, 5, 3, mus=1)
    F = spec.field
    rng = np.random.default_rng(21)
    for mode in (1, 3):
        for _ in range(5):
            C = codeword(spec, rng)
            E = ch.fibre_rank_error(F, 5, 3, mode, 1, rng)
            out = dec.decode_fibrewise_m(spec, F.add(C, E), mode)
            assert out.ok and np.array_equal(out.codeword, C)


def test_order3_all_modes_on_two_mode_errors():
    spec = tc.make_spec(2, 5, 3, mus=1)
    F = spec.field
    rng = np.random.default_rng(22)
    for _ in range(5):
        C = codeword(spec, rng)
        E = ch.subset_error(F, 5, 3, 1, 2, 4, 1, rng)
        out = dec.decode_allmodes_m(spec, F.add(C, E))
        assert out.ok and np.array_equal(out.codeword, C)


def test_order3_radical_on_first_index_pattern():
    spec = tc.make_spec(2, 5, 3, mus=1)
    F = spec.field
    E = ch.first_rows_pattern(spec.basis, 3, 2)
    rep = metrics.weights(F, E)
    assert rep.fibre_weight == 2 and rep.slice_weights[1:] == (1, 1)
    C = codeword(spec, np.random.default_rng(23))
    out = dec.decode_radical(spec, F.add(C, E))
    assert out.ok and np.array_equal(out.codeword, C) and out.diagnostics["delta"] == 2


def test_order3_radical_on_sigma_bounded_errors():
    spec = tc.make_spec(2, 5, 3, mus=1)
    F = spec.field
    rng = np.random.default_rng(24)
    for _ in range(8):
        b = int(rng.integers(0, 4))
        E = ch.slice_fibre_error(F, 5, 3, int(rng.integers(1, 4)), 3 - b, b, rng)
        C = codeword(spec, rng)
        out = dec.decode_radical(spec, F.add(C, E))
        assert out.ok and np.array_equal(out.codeword, C)
