"""Exact integer matrix layer: determinants, Smith form, completions, padding.

Reference values here were computed by hand or with the slow cofactor
expansion below, never by the code under test.
"""

import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from linremoval import (
    IntMatrix,
    PreconditionError,
    complete_to_square,
    determinantal_divisor,
    is_n_good,
    n_good_padding,
    smith_normal_form,
)
from linremoval.intmat import _xgcd, adjugate, det


def cofactor_det(rows):
    # independent oracle: textbook expansion along the first row
    size = len(rows)
    if size == 1:
        return rows[0][0]
    total = 0
    for j in range(size):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * cofactor_det(minor)
        total += term if j % 2 == 0 else -term
    return total


def minor_gcd(matrix, k):
    # gcd of all k x k minors via the oracle determinant
    g = 0
    for rsel in itertools.combinations(range(matrix.rows), k):
        for csel in itertools.combinations(range(matrix.cols), k):
            sub = [[matrix.data[i][j] for j in csel] for i in rsel]
            g = math.gcd(g, abs(cofactor_det(sub)))
    return g


small_entries = st.integers(min_value=-9, max_value=9)


def matrices(max_rows=4, max_cols=4, entries=small_entries):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(
                st.lists(entries, min_size=c, max_size=c),
                min_size=r,
                max_size=r,
            ).map(IntMatrix)
        )
    )


# ---------------------------------------------------------------- IntMatrix


def test_matrix_is_immutable_and_hashable():
    m = IntMatrix([[1, 2], [3, 4]])
    assert m.data == ((1, 2), (3, 4))
    assert hash(m) == hash(IntMatrix([[1, 2], [3, 4]]))
    with pytest.raises(AttributeError):
        m.data = ((0, 0), (0, 0))


def test_matrix_shape_validation():
    with pytest.raises(PreconditionError):
        IntMatrix([[1, 2], [3]])
    with pytest.raises(PreconditionError):
        IntMatrix([])
    with pytest.raises(PreconditionError):
        IntMatrix([[]])


def test_matrix_basic_ops():
    m = IntMatrix([[1, 2], [3, 4]])
    assert m.transpose().data == ((1, 3), (2, 4))
    assert m.row(1) == (3, 4)
    assert m.column(0) == (1, 3)
    assert (m @ IntMatrix.identity(2)) == m
    assert (IntMatrix.identity(2) @ m) == m
    assert m.hstack(IntMatrix.identity(2)).data == ((1, 2, 1, 0), (3, 4, 0, 1))
    assert m.vstack(IntMatrix.zero(1, 2)).data == ((1, 2), (3, 4), (0, 0))
    assert m.submatrix([1], [0, 1]).data == ((3, 4),)
    assert m.scale(-2).data == ((-2, -4), (-6, -8))
    assert m.mod(3).data == ((1, 2), (0, 1))


def test_matmul_against_hand_product():
    a = IntMatrix([[1, 2, 0], [0, 1, -1]])
    b = IntMatrix([[2, 1], [1, 0], [3, 3]])
    assert (a @ b).data == ((4, 1), (-2, -3))


def test_xgcd_identity():
    # g may carry a sign; callers normalize where needed
    for a, b in [(12, 18), (-4, 6), (0, 5), (7, 0), (0, 0), (-9, -6)]:
        g, x, y = _xgcd(a, b)
        assert abs(g) == math.gcd(a, b)
        assert x * a + y * b == g


# -------------------------------------------------------------- determinant


def test_det_frozen_values():
    assert det(IntMatrix([[1, 1], [2, 0]])) == -2
    assert det(IntMatrix([[5]])) == 5
    assert det(IntMatrix.identity(4)) == 1
    with pytest.raises(PreconditionError):
        det(IntMatrix([[1, 2, 3]]))


@given(matrices(max_rows=4, max_cols=4).filter(lambda m: m.rows == m.cols))
@settings(max_examples=80, deadline=None)
def test_det_matches_cofactor_expansion(m):
    assert det(m) == cofactor_det([list(r) for r in m.data])


@given(matrices(max_rows=3, max_cols=3).filter(lambda m: m.rows == m.cols))
@settings(max_examples=60, deadline=None)
def test_adjugate_identity(m):
    d = det(m)
    assert (m @ adjugate(m)) == IntMatrix.identity(m.rows).scale(d)
    assert (adjugate(m) @ m) == IntMatrix.identity(m.rows).scale(d)


# -------------------------------------------------------------- Smith form


def test_smith_form_frozen_example():
    res = smith_normal_form(IntMatrix([[2, 4], [0, 6]]))
    assert res.S.data == ((2, 0), (0, 6))
    assert res.U.data == ((1, 0), (0, 1))
    assert res.V.data == ((1, -2), (0, 1))


def check_smith(matrix):
    res = smith_normal_form(matrix)
    u, s, v = res.U, res.S, res.V
    assert abs(cofactor_det([list(r) for r in u.data])) == 1
    assert abs(cofactor_det([list(r) for r in v.data])) == 1
    assert (u @ matrix) @ v == s
    diag = [s.data[i][i] for i in range(min(s.rows, s.cols))]
    for i in range(s.rows):
        for j in range(s.cols):
            if i != j:
                assert s.data[i][j] == 0
    assert all(x >= 0 for x in diag)
    for a, b in zip(diag, diag[1:]):
        if a == 0:
            assert b == 0
        else:
            assert b % a == 0
    return diag


def test_smith_form_known_shapes():
    assert check_smith(IntMatrix([[6]])) == [6]
    assert check_smith(IntMatrix([[2, 0], [0, 3]])) == [1, 6]
    assert check_smith(IntMatrix([[4, 6], [6, 9]])) == [1, 0]
    assert check_smith(IntMatrix([[1, 2, 3]])) == [1]
    assert check_smith(IntMatrix([[0, 0], [0, 0]])) == [0, 0]


@given(matrices(max_rows=4, max_cols=4))
@settings(max_examples=80, deadline=None)
def test_smith_form_invariants(m):
    diag = check_smith(m)
    # diagonal entries multiply to the determinantal divisors
    prod = 1
    for k, entry in enumerate(diag, start=1):
        prod *= entry
        assert prod == minor_gcd(m, k) or (prod == 0 and minor_gcd(m, k) == 0)


# --------------------------------------------------- determinantal divisors


def test_determinantal_divisor_frozen_values():
    a = IntMatrix([[2, 4], [0, 6]])
    assert determinantal_divisor(a, 1) == 2
    assert determinantal_divisor(a, 2) == 12
    b = IntMatrix([[1, 1, 1]])
    assert determinantal_divisor(b, 1) == 1
    with pytest.raises(PreconditionError):
        determinantal_divisor(a, 3)
    with pytest.raises(PreconditionError):
        determinantal_divisor(a, 0)


@given(matrices(max_rows=4, max_cols=5))
@settings(max_examples=60, deadline=None)
def test_determinantal_divisor_matches_minor_gcd(m):
    for k in range(1, min(m.rows, m.cols) + 1):
        assert determinantal_divisor(m, k) == minor_gcd(m, k)


# -------------------------------------------------------------- completion


def test_complete_to_square_frozen_example():
    c = complete_to_square(IntMatrix([[1, 1, 1]]))
    assert c.data == ((1, 1, 1), (0, 1, 0), (0, 0, 1))
    assert det(c) == 1


def test_complete_to_square_postconditions():
    cases = [
        IntMatrix([[2, 4], [0, 6]]).submatrix([0], [0, 1]),
        IntMatrix([[3, 1, 0], [1, 2, 5]]),
        IntMatrix([[0, 2, 0, 4]]),
        IntMatrix([[1, 0, 0], [0, 2, 0]]),
    ]
    for a in cases:
        dk = determinantal_divisor(a, a.rows)
        c = complete_to_square(a)
        assert c.rows == c.cols == a.cols
        assert c.data[: a.rows] == a.data
        assert det(c) == dk


def test_complete_to_square_square_input_returns_copy():
    sq = IntMatrix([[0, 1], [1, 0]])
    c = complete_to_square(sq)
    assert c == sq
    # determinant keeps its sign here, so it can differ from the divisor
    assert det(c) == -1
    assert determinantal_divisor(sq, 2) == 1


def test_complete_to_square_rejects_rank_deficient():
    with pytest.raises(PreconditionError):
        complete_to_square(IntMatrix([[2, 4], [1, 2]]))
    with pytest.raises(PreconditionError):
        complete_to_square(IntMatrix([[0, 0, 0]]))


@given(matrices(max_rows=3, max_cols=4).filter(lambda m: m.rows <= m.cols))
@settings(max_examples=60, deadline=None)
def test_complete_to_square_property(m):
    try:
        dk = determinantal_divisor(m, m.rows)
    except PreconditionError:
        return
    if dk == 0:
        with pytest.raises(PreconditionError):
            complete_to_square(m)
        return
    c = complete_to_square(m)
    assert c.data[: m.rows] == m.data
    if m.rows < m.cols:
        assert det(c) == dk


# ------------------------------------------------------------------ padding


def test_is_n_good_windows():
    m = IntMatrix([[2], [1]])
    assert is_n_good(m, 3)
    assert not is_n_good(m, 4)  # the 1x1 window [2] shares a factor with 4
    assert is_n_good(IntMatrix.identity(2), 12)
    with pytest.raises(PreconditionError):
        is_n_good(IntMatrix([[1, 0]]), 5)


def test_padding_frozen_r1():
    p = n_good_padding(IntMatrix([[3]]), 10)
    assert p.data == ((1,), (3,), (1,))


def test_padding_frozen_r2():
    p = n_good_padding(IntMatrix([[2, 3], [1, 2]]), 5)
    assert p.data == (
        (1, 0),
        (0, 1),
        (2, 0),
        (0, 1),
        (2, 3),
        (1, 2),
        (1, 1),
        (0, 1),
        (1, 0),
        (0, 1),
    )


def check_padding(matrix, n):
    r = matrix.rows
    p = n_good_padding(matrix, n)
    assert p.rows == r * (2 * r + 1)
    assert p.cols == r
    ident = IntMatrix.identity(r).data
    assert p.data[:r] == ident
    assert p.data[-r:] == ident
    assert p.data[r * r : r * r + r] == matrix.data
    # every window of r consecutive rows stays invertible mod n
    for start in range(p.rows - r + 1):
        window = [list(p.data[start + i]) for i in range(r)]
        assert math.gcd(cofactor_det(window), n) == 1


def test_padding_rejects_bad_input():
    with pytest.raises(PreconditionError):
        n_good_padding(IntMatrix([[1, 0]]), 5)
    with pytest.raises(PreconditionError):
        n_good_padding(IntMatrix([[2]]), 4)
    with pytest.raises(PreconditionError):
        n_good_padding(IntMatrix([[1]]), 0)


def test_padding_various_sizes():
    check_padding(IntMatrix([[1]]), 2)
    check_padding(IntMatrix([[7]]), 12)
    check_padding(IntMatrix([[1, 4], [0, 1]]), 9)
    check_padding(IntMatrix([[2, 3], [1, 2]]), 6)
    check_padding(IntMatrix([[1, 0, 0], [4, 1, 0], [2, 5, 1]]), 10)
    check_padding(IntMatrix([[3, 1, 1], [1, 1, 0], [2, 1, 1]]), 7)


def test_padding_modulus_one_keeps_shape():
    p = n_good_padding(IntMatrix([[4, 1], [1, 0]]), 1)
    assert p.rows == 10
    assert is_n_good(p, 1)


@given(
    st.integers(2, 12),
    st.lists(st.lists(st.integers(-4, 4), min_size=2, max_size=2), min_size=2, max_size=2),
)
@settings(max_examples=60, deadline=None)
def test_padding_property_r2(n, rows):
    m = IntMatrix(rows)
    if math.gcd(cofactor_det(rows), n) != 1:
        with pytest.raises(PreconditionError):
            n_good_padding(m, n)
        return
    check_padding(m, n)
