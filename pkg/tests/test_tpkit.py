from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from narayana_tp.errors import MethodError, ResourceError
from narayana_tp.exactmat import ExactMatrix, MinorSpec, diag_scale, mat_mul, transpose
from narayana_tp.families import Explicit, build_matrix, family, sequence
from narayana_tp.tpkit import (
    check_stp, check_tp, constant_sequence, hankel_truncation, is_pf_truncated,
    is_sm_truncated, neville_elimination, seq_transform, toeplitz_truncation,
)

from oracles import bidiagonal_product, first_bad_minor

M = ExactMatrix.from_rows

FAMILY_SHAPES = [
    (family("pascal"), "triangle"), (family("pascal"), "square"),
    (family("narayana-a"), "triangle"), (family("narayana-a"), "square"),
    (family("narayana-b"), "triangle"), (family("narayana-b"), "square"),
    (family("m-narayana", 2), "triangle"), (family("m-narayana", 2), "reversed-triangle"),
    (family("m-narayana", 1), "square"), (family("fuss-narayana-a", 2), "reversed-triangle"),
    (family("fuss-narayana-b", 3), "triangle"), (family("delannoy"), "triangle"),
    (family("delannoy"), "square"), (family("eulerian"), "square"), (family("eulerian"), "triangle"),
]

LIBRARY_SM = [sequence("factorial"), sequence("factorial-shift-product"), sequence("factorial-squared")]


def nonneg_matrices(max_n=4, hi=6):
    return st.tuples(st.integers(1, max_n), st.integers(1, max_n)).flatmap(
        lambda rc: st.lists(st.lists(st.integers(0, hi), min_size=rc[1], max_size=rc[1]),
                            min_size=rc[0], max_size=rc[0]))


def square_matrices(max_n=5, lo=0, hi=6):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n))


@st.composite
def tp_matrices(draw, max_n=6):
    n = draw(st.integers(2, max_n))
    factors = draw(st.lists(st.tuples(st.booleans(), st.integers(0, n - 2), st.integers(0, 3)),
                            max_size=3 * n))
    m = bidiagonal_product(n, factors)
    diag = draw(st.lists(st.integers(1, 3), min_size=n, max_size=n))
    return [[m[i][j] * diag[j] for j in range(n)] for i in range(n)]


# --- examples ---------------------------------------------------------------------

def test_tp_examples():
    assert check_tp(build_matrix("narayana-a", "triangle", 6), "brute").holds
    v = check_tp(M([[1, 2], [3, 1]]), "brute")
    assert v.status == "fails"
    assert v.witness == MinorSpec((0, 1), (0, 1))
    assert v.witness_value == -5
    assert check_tp(M([[0]])).holds and check_tp(M([[7]]), "neville").holds
    assert check_tp(M([[-1]])).witness_value == -1


def test_fekete_rejected_for_tp():
    with pytest.raises(MethodError):
        check_tp(M([[1]]), "fekete")
    with pytest.raises(MethodError):
        check_tp(M([[1]]), "newton")


def test_stp_examples():
    assert check_stp(build_matrix("narayana-b", "square", 4)).holds
    assert check_stp(build_matrix("pascal", "square", 4)).holds
    v = check_stp(build_matrix("narayana-a", "triangle", 3))
    assert v.status == "fails"
    assert v.witness == MinorSpec((0,), (1,)) and v.witness_value == 0
    assert check_stp(M([[5]])).holds


def test_stp_fekete_failure_reports_global_minimum():
    # first failing solid minor is rows {0,1} x cols {1,2}; the non-solid cols {0,2} one precedes it
    m = M([[1, 1, 3], [1, 2, 1], [1, 3, 5]])
    assert check_stp(m, "fekete").witness == MinorSpec((0, 1), (0, 2))
    v_f, v_b = check_stp(m, "fekete"), check_stp(m, "brute")
    assert v_f.status == v_b.status == "fails"
    assert v_f.witness == v_b.witness
    assert first_bad_minor(m.to_lists(), strict=True)[:2] == (v_b.witness.rows, v_b.witness.cols)


def test_brute_budget_guard():
    with pytest.raises(ResourceError):
        check_tp(build_matrix("pascal", "square", 14), "brute")
    # bounded order keeps it within budget
    assert check_tp(build_matrix("pascal", "square", 14), "brute", max_order=3).max_minor_order == 3


def test_neville_fallback_on_singular():
    m = M([[1, 1], [1, 1]])
    v = check_tp(m, "neville")
    assert v.holds and v.fallback
    big = ExactMatrix.from_function(9, 9, lambda i, j: 1)
    with pytest.raises(ResourceError):
        check_tp(big, "neville")


def test_neville_elimination_zero_pattern():
    ok, _, _ = neville_elimination([[1, 0], [0, 1], [1, 1]])
    assert not ok
    ok, mults, pivots = neville_elimination([[1, 0, 0], [1, 1, 0], [1, 2, 1]])
    assert ok and pivots == [1, 1, 1]
    assert mults[0] == [1, 1]


def test_toeplitz_and_hankel_examples():
    assert toeplitz_truncation(sequence("inv-factorial"), 3) == M([[1, 0, 0], [1, 1, 0], ["1/2", 1, 1]])
    assert toeplitz_truncation(sequence("inv-factorial-squared"), 1) == M([[1]])
    assert toeplitz_truncation(sequence("factorial"), 2) == M([[1, 0], [1, 1]])
    assert hankel_truncation(sequence("factorial"), 3) == M([[1, 1, 2], [1, 2, 6], [2, 6, 24]])
    assert hankel_truncation(sequence("factorial"), 1, 1) == M([[1]])
    assert hankel_truncation(sequence("factorial-squared"), 2) == M([[1, 1], [1, 4]])
    assert hankel_truncation(sequence("factorial"), 2, 1) == M([[1, 2], [2, 6]])


def test_pf_examples():
    assert is_pf_truncated(sequence("inv-factorial"), 6).holds
    assert is_pf_truncated(sequence("inv-pochhammer-factorial", 2), 6).holds
    v = is_pf_truncated(Explicit((1, 0, 1)), 3, method="brute")
    assert v.status == "fails"
    assert v.tp_verdict.witness == MinorSpec((1, 2), (0, 1))
    assert v.tp_verdict.witness_value == -1
    assert is_pf_truncated(Explicit((1, 0, 1)), 3, method="neville").status == "fails"


def test_sm_examples():
    assert is_sm_truncated(sequence("factorial"), 5).holds
    assert is_sm_truncated(sequence("factorial-shift-product"), 5).holds
    assert is_sm_truncated(sequence("factorial-squared"), 5).holds
    v = is_sm_truncated(constant_sequence(1), 2)
    assert v.status == "fails"
    assert v.witness == MinorSpec((0, 1), (0, 1)) and v.witness_value == 0 and v.witness_offset == 0
    assert is_sm_truncated(Explicit((1, 1, 2), fill=0), 3).witness_offset == 0


def test_seq_transform():
    fac = sequence("factorial")
    assert seq_transform("shift", fac).term(2) == 6
    hs = seq_transform("hadamard", fac, seq_transform("shift", fac))
    sq = seq_transform("hadamard", fac, fac)
    for n in range(11):
        assert hs.term(n) == sequence("factorial-shift-product").term(n)
        assert sq.term(n) == sequence("factorial-squared").term(n)
    with pytest.raises(ValueError):
        seq_transform("hadamard", fac)


def test_verdict_json():
    j = check_tp(M([[1, 2], [3, 1]])).to_json()
    assert j["witness"] == {"rows": [0, 1], "cols": [0, 1], "value": "-5"}
    assert j["property"] == "TP" and j["status"] == "fails"


# --- properties ---------------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(nonneg_matrices(4))
def test_brute_matches_naive_enumeration_tp(rows):
    m = M(rows)
    v = check_tp(m, "brute")
    bad = first_bad_minor(m.to_lists(), strict=False)
    if bad is None:
        assert v.holds
    else:
        assert (v.witness.rows, v.witness.cols, v.witness_value) == bad


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(
    st.lists(st.fractions(min_value=-3, max_value=10, max_denominator=5), min_size=n, max_size=n),
    min_size=n, max_size=n)))
def test_brute_matches_naive_enumeration_stp(rows):
    m = M(rows)
    v = check_stp(m, "brute")
    bad = first_bad_minor(m.to_lists(), strict=True)
    if bad is None:
        assert v.holds
    else:
        assert (v.witness.rows, v.witness.cols, v.witness_value) == bad


@settings(max_examples=200, deadline=None)
@given(square_matrices(5))
def test_neville_agrees_with_brute_random(rows):
    m = M(rows)
    vb, vn = check_tp(m, "brute"), check_tp(m, "neville")
    assert vb.status == vn.status
    assert vb.witness == vn.witness


@settings(max_examples=200, deadline=None)
@given(tp_matrices())
def test_neville_agrees_with_brute_on_tp_products(rows):
    m = M(rows)
    vb, vn = check_tp(m, "brute"), check_tp(m, "neville")
    assert vb.holds and vn.holds


@settings(max_examples=100, deadline=None)
@given(tp_matrices(5), st.integers(0, 4), st.integers(0, 4))
def test_neville_detects_perturbation(rows, i, j):
    n = len(rows)
    rows[i % n][j % n] += 1 if (i + j) % 2 else -1
    m = M(rows)
    assert check_tp(m, "brute").status == check_tp(m, "neville").status


@pytest.mark.parametrize("fid, shape", FAMILY_SHAPES)
def test_methods_agree_on_families(fid, shape):
    for n in range(1, 7):
        m = build_matrix(fid, shape, n)
        assert check_tp(m, "brute").status == check_tp(m, "neville").status
        if all(x > 0 for x in m.entries):
            assert check_stp(m, "brute").status == check_stp(m, "fekete").status


@settings(max_examples=150, deadline=None)
@given(square_matrices(5, 1, 9))
def test_fekete_agrees_with_brute_positive(rows):
    m = M(rows)
    vb, vf = check_stp(m, "brute"), check_stp(m, "fekete")
    assert vb.status == vf.status
    assert vb.witness == vf.witness


@settings(max_examples=100, deadline=None)
@given(tp_matrices(5))
def test_fekete_agrees_with_brute_on_tp_products(rows):
    m = M(rows)
    if all(x > 0 for x in m.entries):
        assert check_stp(m, "brute").status == check_stp(m, "fekete").status


@pytest.mark.parametrize("rows", [
    [[1, 2], [3, 1]],
    [[1, 1, 3], [1, 2, 1], [1, 3, 5]],
    [[2, 1, 0, 1], [1, 2, 1, 0], [0, 1, 2, 1], [1, 0, 1, 2]],
])
def test_parallel_witness_is_deterministic(rows):
    m = M(rows)
    serial = check_tp(m, "brute", workers=1)
    for _ in range(2):
        assert check_tp(m, "brute", workers=2) == serial
    assert check_stp(m, "brute", workers=2) == check_stp(m, "brute", workers=1)


def test_parallel_env(monkeypatch):
    monkeypatch.setenv("NARAYANA_TP_WORKERS", "2")
    m = build_matrix("narayana-a", "triangle", 5)
    assert check_tp(m, "brute").holds
    monkeypatch.setenv("NARAYANA_TP_WORKERS", "two")
    with pytest.raises(ValueError):
        check_tp(m, "brute")


@settings(max_examples=25, deadline=None)
@given(square_matrices(5, 0, 5),
       st.lists(st.fractions(min_value=Fraction(1, 20), max_value=20), min_size=5, max_size=5),
       st.lists(st.fractions(min_value=Fraction(1, 20), max_value=20), min_size=5, max_size=5))
def test_scaling_equivalence(rows, a, b):
    m = M(rows)
    n = m.rows
    s = diag_scale(m, a[:n], b[:n])
    v, w = check_tp(m, "brute"), check_tp(s, "brute")
    assert v.status == w.status and v.witness == w.witness
    if v.witness is not None:
        assert (v.witness_value < 0) == (w.witness_value < 0)


@pytest.mark.parametrize("fid, shape", [f for f in FAMILY_SHAPES if f[1] != "square"][:6])
def test_transpose_and_products_stay_tp(fid, shape):
    a = build_matrix(fid, shape, 5)
    b = build_matrix(family("narayana-b"), "square", 5)
    assert check_tp(transpose(a), "brute").holds
    assert check_tp(mat_mul(a, b), "brute").holds
    assert check_tp(mat_mul(b, a), "brute").holds
    assert check_tp(mat_mul(a, transpose(a)), "brute").holds


@pytest.mark.parametrize("seq", LIBRARY_SM)
def test_sm_shift_closure(seq):
    for n in range(2, 9):
        assert is_sm_truncated(seq, n).holds
        assert is_sm_truncated(seq_transform("shift", seq), n - 1).holds


def test_sm_hadamard_closure():
    for i, a in enumerate(LIBRARY_SM):
        for b in LIBRARY_SM[i:]:
            assert is_sm_truncated(seq_transform("hadamard", a, b), 6).holds


def test_pf_pipeline_scaling_reproduces_triangles():
    import math
    n = 7
    t = toeplitz_truncation(sequence("inv-factorial-shift-product"), n)
    na = diag_scale(t, [math.factorial(i) * math.factorial(i + 1) for i in range(n)],
                    [Fraction(1, math.factorial(k) * math.factorial(k + 1)) for k in range(n)])
    assert na == build_matrix("narayana-a", "triangle", n)
    t = toeplitz_truncation(sequence("inv-factorial-squared"), n)
    nb = diag_scale(t, [math.factorial(i) ** 2 for i in range(n)],
                    [Fraction(1, math.factorial(k) ** 2) for k in range(n)])
    assert nb == build_matrix("narayana-b", "triangle", n)
