from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from csl_lab import linalg
from csl_lab.lattice import (Lattice, commensurate, contains_point, diagonal, index, intersect,
                             is_sublattice, lattice_from_basis, lattice_sum, preset, preset_name,
                             scale, transform)

Z2 = preset("square")
R5 = (("3/5", "-4/5"), ("4/5", "3/5"))


def residue_csl():
    """{(x, y) : x = 2y mod 5} built from its residue description only."""
    pts = [(x, y) for x in range(5) for y in range(5) if (x - 2 * y) % 5 == 0]
    assert len(pts) == 5
    return lattice_from_basis([[5, 2], [0, 1]]), pts


def test_from_basis_examples():
    assert lattice_from_basis(linalg.identity(2)) == Lattice(2, 1, ((1, 0), (0, 1)))
    assert lattice_from_basis([[2, -1], [1, 2]]) == Lattice(2, 1, ((5, 2), (0, 1)))
    half = [[Fraction(1, 2), 0], [0, Fraction(1, 2)]]
    assert lattice_from_basis(half) == Lattice(2, 2, ((1, 0), (0, 1)))
    with pytest.raises(ValueError):
        lattice_from_basis([[1, 2], [2, 4]])


def test_residue_oracle_membership():
    C, pts = residue_csl()
    for x, y in product(range(-10, 11), repeat=2):
        assert contains_point(C, (x, y)) == ((x - 2 * y) % 5 == 0)
    assert is_sublattice(C, Z2)
    assert index(C, Z2) == 5


def test_sublattice_and_index():
    Z2x2 = scale(Z2, 2)
    assert is_sublattice(Z2x2, Z2)
    assert not is_sublattice(Z2, Z2x2)
    assert index(Z2x2, Z2) == 4
    assert index(Z2, Z2) == 1
    with pytest.raises(ValueError, match="not a sublattice"):
        index(Z2, Z2x2)
    with pytest.raises(ValueError):
        is_sublattice(Z2, preset("cubic"))


def test_intersect_examples():
    assert intersect(Z2, Z2) == Z2
    got = intersect(Z2, transform(Z2, linalg.rat_matrix(R5)))
    assert got == Lattice(2, 1, ((5, 2), (0, 1)))
    # fundamental-domain oracle: points of Z^2 in [0,5)^2 that are also in R Z^2
    RL = transform(Z2, linalg.rat_matrix(R5))
    common = [(x, y) for x, y in product(range(5), repeat=2) if contains_point(RL, (x, y))]
    assert len(common) == 5 and all((x - 2 * y) % 5 == 0 for x, y in common)
    assert intersect(diagonal(2, 1), diagonal(1, 3)) == preset("2zx3z")


def test_sum_examples():
    assert lattice_sum(diagonal(2, 1), diagonal(1, 3)) == Z2
    assert lattice_sum(Z2, Z2) == Z2


def test_scale_and_transform_examples():
    assert scale(Z2, 2) == diagonal(2, 2)
    assert scale(Z2, 1) == Z2
    L = lattice_from_basis([[2, -1], [1, 2]])
    assert scale(scale(L, 2), Fraction(1, 2)) == L
    with pytest.raises(ValueError):
        scale(Z2, 0)
    assert transform(Z2, ((0, -1), (1, 0))) == Z2
    assert transform(Z2, linalg.rat_matrix(R5)).den == 5
    assert transform(L, linalg.identity(2)) == L
    with pytest.raises(ValueError):
        transform(Z2, ((1, 1), (1, 1)))


def test_commensurate():
    assert commensurate(Z2, scale(Z2, 2))
    assert commensurate(Z2, scale(Z2, Fraction(1, 7)))
    with pytest.raises(ValueError):
        commensurate(Z2, preset("cubic"))


def test_json_and_presets():
    L = lattice_from_basis([[Fraction(1, 3), 1], [0, 2]])
    assert Lattice.from_json(L.to_json()) == L
    assert L.to_json()["mat"][0] == ["1", "0"]
    for name in ("square", "2zx3z", "zx5z", "cubic"):
        assert preset_name(preset(name)) == name
    with pytest.raises(ValueError, match="unknown lattice preset"):
        preset("hexagonal")
    with pytest.raises(ValueError, match="malformed"):
        Lattice.from_json({"dim": 2})


ent = st.integers(-4, 4)


@st.composite
def unimodular(draw, d):
    U = [list(r) for r in linalg.identity(d)]
    for _ in range(draw(st.integers(0, 6))):
        i, j = draw(st.integers(0, d - 1)), draw(st.integers(0, d - 1))
        c = draw(st.integers(-3, 3))
        if i != j:
            for r in range(d):
                U[r][j] += c * U[r][i]
    return U


@st.composite
def lattices(draw, d=None):
    # every lattice has a triangular basis; the rebasing scrambles it
    d = d or draw(st.integers(1, 3))
    den = draw(st.integers(1, 4))
    T = [[0] * d for _ in range(d)]
    for i in range(d):
        T[i][i] = draw(st.integers(1, 5))
        for j in range(i + 1, d):
            T[i][j] = draw(ent)
    U = draw(unimodular(d))
    B = linalg.matmul(T, U)
    return lattice_from_basis([[Fraction(x, den) for x in row] for row in B])


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_lattice_algebra_laws(data):
    d = data.draw(st.integers(1, 3))
    A, B, C = (data.draw(lattices(d)) for _ in range(3))
    assert intersect(A, B) == intersect(B, A)
    assert lattice_sum(A, B) == lattice_sum(B, A)
    assert intersect(A, intersect(B, C)) == intersect(intersect(A, B), C)
    assert lattice_sum(A, lattice_sum(B, C)) == lattice_sum(lattice_sum(A, B), C)
    assert intersect(A, A) == A and lattice_sum(A, A) == A
    I, S = intersect(A, B), lattice_sum(A, B)
    assert is_sublattice(I, A) and is_sublattice(I, B)
    assert is_sublattice(A, S) and is_sublattice(B, S)
    # second isomorphism theorem
    assert index(I, B) == index(A, S)
    # tower multiplicativity
    assert index(I, S) == index(I, A) * index(A, S)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_intersection_is_largest(data):
    d = data.draw(st.integers(1, 3))
    A, B = data.draw(lattices(d)), data.draw(lattices(d))
    I, S = intersect(A, B), lattice_sum(A, B)
    q = A.den * B.den
    for _ in range(10):
        v = [Fraction(data.draw(st.integers(-12, 12)), q) for _ in range(d)]
        assert contains_point(I, v) == (contains_point(A, v) and contains_point(B, v))
        if contains_point(A, v) or contains_point(B, v):
            assert contains_point(S, v)


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_canonical_under_rebasing(data):
    d = data.draw(st.integers(1, 3))
    L = data.draw(lattices(d))
    U = data.draw(unimodular(d))
    assert lattice_from_basis(linalg.matmul(L.basis(), U)) == L
    assert lattice_from_basis(L.basis()) == L
