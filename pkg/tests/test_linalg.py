from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from csl_lab import linalg


def residue_index(H, mod_x=None):
    """Count residues mod det(H) hit by the column span: an independent index oracle."""
    d = abs(linalg.det(H))
    pts = {((a * H[0][0] + b * H[0][1]) % d, (a * H[1][0] + b * H[1][1]) % d)
           for a in range(d) for b in range(d)}
    return d * d // len(pts)


def test_hnf_examples():
    assert linalg.hnf([[2, 0], [0, 3]])[0] == ((2, 0), (0, 3))
    assert linalg.hnf([[1, 0, 2], [0, 1, 1]])[0] == ((1, 0), (0, 1))
    H, U = linalg.hnf([[2, -1], [1, 2]])
    assert H == ((5, 2), (0, 1))


def test_hnf_residue_oracle():
    # both generators satisfy x = 2y mod 5 and that congruence cuts out index 5
    members = {(x % 5, y % 5) for x in range(5) for y in range(5) if (x - 2 * y) % 5 == 0}
    assert len(members) == 5
    for v in [(2, 1), (-1, 2), (5, 0), (2, 1)]:
        assert (v[0] - 2 * v[1]) % 5 == 0
    H, _ = linalg.hnf([[2, -1], [1, 2]])
    assert residue_index(H) == 5
    for a, b in product(range(-3, 4), repeat=2):
        x, y = a * H[0][0] + b * H[0][1], a * H[1][0] + b * H[1][1]
        assert (x - 2 * y) % 5 == 0


def test_hnf_unimodular_record():
    M = [[4, 6, 1], [2, 8, 3]]
    H, U = linalg.hnf(M)
    assert abs(linalg.det(U)) == 1
    MU = linalg.matmul(M, U)
    assert tuple(tuple(r[:2]) for r in MU) == H
    assert all(r[2] == 0 for r in MU)


def test_hnf_rank_deficient():
    with pytest.raises(ValueError, match="rank deficient"):
        linalg.hnf([[1, 2], [2, 4]])


def test_det_examples():
    assert linalg.det(linalg.identity(3)) == 1
    assert linalg.det([[2, 0], [0, 3]]) == 6
    R = linalg.rat_matrix([["3/5", "-4/5"], ["4/5", "3/5"]])
    assert linalg.det(R) == 1
    with pytest.raises(ValueError):
        linalg.det([[1, 2, 3], [4, 5, 6]])


def test_kernel_examples():
    assert linalg.integer_kernel([[1, -1]]) == ((1,), (1,))
    assert linalg.integer_kernel([[1, 0], [0, 1]]) == ()
    assert linalg.integer_kernel([[2, -3]]) == ((3,), (2,))


def test_inverse_examples():
    assert linalg.inverse(linalg.identity(2)) == linalg.rat_matrix(linalg.identity(2))
    assert linalg.inverse([[2, 0], [0, 3]]) == ((Fraction(1, 2), 0), (0, Fraction(1, 3)))
    R = linalg.rat_matrix([["3/5", "-4/5"], ["4/5", "3/5"]])
    assert linalg.inverse(R) == linalg.transpose(R)
    with pytest.raises(ValueError, match="singular"):
        linalg.inverse([[1, 2], [2, 4]])


def test_matrix_json_roundtrip():
    M = linalg.rat_matrix([["1/2", "-3"], ["0", "7/9"]])
    obj = linalg.matrix_to_json(M)
    assert obj == {"rows": 2, "cols": 2, "entries": [["1/2", "-3"], ["0", "7/9"]]}
    assert linalg.matrix_from_json(obj) == M


small = st.integers(-6, 6)


def square_int(d):
    return st.lists(st.lists(small, min_size=d, max_size=d), min_size=d, max_size=d)


def unimodular(d):
    # product of elementary column operations
    ops = st.lists(st.tuples(st.integers(0, d - 1), st.integers(0, d - 1), st.integers(-3, 3)),
                   max_size=8)

    def build(seq):
        U = [list(r) for r in linalg.identity(d)]
        for i, j, c in seq:
            if i != j:
                for r in range(d):
                    U[r][j] += c * U[r][i]
        return U
    return ops.map(build)


@settings(max_examples=150, deadline=None)
@given(square_int(3), unimodular(3))
def test_hnf_basis_independent(M, U):
    if linalg.det(M) == 0:
        return
    H, _ = linalg.hnf(M)
    assert linalg.hnf(linalg.matmul(M, U))[0] == H
    assert linalg.hnf(H)[0] == H
    assert H[0][0] * H[1][1] * H[2][2] == abs(linalg.det(M))
    for i in range(3):
        for j in range(i + 1, 3):
            assert 0 <= H[i][j] < H[i][i]
        for j in range(i):
            assert H[i][j] == 0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=2, max_size=2))
def test_hnf_wide_is_minor_gcd(M):
    from math import gcd
    from itertools import combinations
    g = 0
    for a, b in combinations(range(4), 2):
        g = gcd(g, M[0][a] * M[1][b] - M[0][b] * M[1][a])
    if g == 0:
        return
    H, _ = linalg.hnf(M)
    assert H[0][0] * H[1][1] == g


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=2, max_size=2))
def test_kernel_columns(M):
    K = linalg.integer_kernel(M)
    if K == ():
        return
    r = len(K[0])
    for j in range(r):
        col = [K[i][j] for i in range(4)]
        assert all(sum(M[i][k] * col[k] for k in range(4)) == 0 for i in range(2))
        assert linalg.content([col]) == 1


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7),
                         min_size=3, max_size=3), min_size=3, max_size=3))
def test_inverse_involution(M):
    M = linalg.rat_matrix(M)
    dt = linalg.det(M)
    if dt == 0:
        return
    Mi = linalg.inverse(M)
    assert linalg.matmul(M, Mi) == linalg.rat_matrix(linalg.identity(3))
    assert linalg.inverse(Mi) == M
    assert linalg.det(Mi) == 1 / dt
