from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from csl_lab import linalg
from csl_lab.csl import csl_lattice
from csl_lab.enumeration import enumerate_square
from csl_lab.isometry import (Isometry, den, identity_isometry, is_orientation_preserving,
                              make_isometry, point_group, preset_isometry, symmetry_class)
from csl_lab.lattice import diagonal, preset, transform

R5 = make_isometry([["3/5", "-4/5"], ["4/5", "3/5"]])


def brute_point_group(L):
    """Integer matrices with entries in {-1, 0, 1} preserving the Gram matrix."""
    G = L.gram()
    d = L.dim
    out = set()
    for flat in product((-1, 0, 1), repeat=d * d):
        T = tuple(tuple(flat[i * d:(i + 1) * d]) for i in range(d))
        if linalg.matmul(linalg.matmul(linalg.transpose(T), G), T) == G:
            B = L.basis()
            out.add(make_isometry(linalg.matmul(linalg.matmul(B, T), linalg.inverse(B))))
    return out


@pytest.mark.parametrize("name,order,rot", [("square", 8, 4), ("2zx3z", 4, 2),
                                            ("zx5z", 4, 2), ("cubic", 48, 24)])
def test_point_group_orders_against_brute(name, order, rot):
    L = preset(name)
    P = point_group(L)
    assert (P.order, P.rotation_order) == (order, rot)
    assert set(P.elements) == brute_point_group(L)


@pytest.mark.parametrize("name", ["square", "2zx3z", "zx5z", "cubic"])
def test_point_group_closed(name):
    L = preset(name)
    P = point_group(L)
    assert identity_isometry(L.dim) in P
    for A in P.elements:
        assert transform(L, A) == L
        assert A.inverse() in P
        for B in P.elements:
            assert A @ B in P
    if P.has_reflection:
        assert 2 * P.rotation_order == P.order


def test_point_group_dimension_guard():
    with pytest.raises(ValueError, match="unsupported dimension"):
        point_group(diagonal(1, 1, 1, 1, 1))


def test_make_isometry():
    assert make_isometry(linalg.identity(2)) == identity_isometry(2)
    assert R5.det == 1
    with pytest.raises(ValueError, match="not an isometry"):
        make_isometry([[1, 1], [0, 1]])
    with pytest.raises(ValueError, match="not an isometry"):
        make_isometry([["3/5", "4/5"], ["4/5", "3/5"]])


def test_json_roundtrip():
    assert Isometry.from_json(R5.to_json()) == R5
    assert R5.to_json() == {"dim": 2, "mat": [["3/5", "-4/5"], ["4/5", "3/5"]]}
    with pytest.raises(ValueError, match="malformed"):
        Isometry.from_json({"mat": [["x"]]})


def test_symmetry_class_basics():
    Z2 = preset("square")
    P = point_group(Z2)
    for Q in P.elements:
        assert symmetry_class(Q, P) == symmetry_class(identity_isometry(2), P)
        assert symmetry_class(R5 @ Q, P) == symmetry_class(R5, P)


def test_symmetry_class_of_the_two_index5_rotations():
    # R^-1 R' is the rotation by arctan(7/24), not in the point group, so the
    # two Σ=5 rotations lie in different cosets and give different CSLs
    Z2 = preset("square")
    P = point_group(Z2)
    R2 = make_isometry([["4/5", "-3/5"], ["3/5", "4/5"]])
    assert (R5.inverse() @ R2).mat == linalg.rat_matrix([["24/25", "7/25"], ["-7/25", "24/25"]])
    assert R5.inverse() @ R2 not in P
    assert symmetry_class(R5, P) != symmetry_class(R2, P)
    assert csl_lattice(Z2, R5) != csl_lattice(Z2, R2)
    # R2 is rot90 composed with R^-1
    assert R2 == preset_isometry("rot90") @ R5.inverse()


def test_symmetry_class_injective_across_cosets():
    Z2 = preset("square")
    P = point_group(Z2)
    isos = {rec.R @ Q for rec in enumerate_square(30).records for Q in P.elements}
    for A in isos:
        for B in isos:
            same = (A.inverse() @ B) in P
            assert (symmetry_class(A, P) == symmetry_class(B, P)) == same


def test_symmetry_class_generic_path_agrees():
    # zx5z is not hyperoctahedral; compare against a direct minimum over the coset
    L = preset("zx5z")
    P = point_group(L)
    assert not P.is_hyperoctahedral
    for R in (R5, preset_isometry("rot90"), make_isometry([["5/13", "-12/13"], ["12/13", "5/13"]])):
        want = min(R @ Q for Q in P.elements)
        assert symmetry_class(R, P).representative == want
    C = preset("cubic")
    PC = point_group(C)
    R = preset_isometry("cub3")
    assert symmetry_class(R, PC).representative == min(R @ Q for Q in PC.elements)


def test_den_examples():
    Z2 = preset("square")
    assert den(Z2, identity_isometry(2)) == 1
    assert den(Z2, R5) == 5
    assert den(Z2, preset_isometry("rot90")) == 1
    assert den(preset("2zx3z"), preset_isometry("rot90")) == 6


def test_orientation():
    assert is_orientation_preserving(identity_isometry(2))
    assert not is_orientation_preserving(preset_isometry("refl-x"))
    assert is_orientation_preserving(R5)


@settings(max_examples=40, deadline=None)
@given(st.integers(-6, 6), st.integers(-6, 6), st.sampled_from(["square", "2zx3z", "zx5z"]))
def test_den_constant_on_cosets(a, b, name):
    if a * a + b * b == 0:
        return
    m = a * a + b * b
    R = make_isometry([[Fraction(a * a - b * b, m), Fraction(-2 * a * b, m)],
                       [Fraction(2 * a * b, m), Fraction(a * a - b * b, m)]])
    L = preset(name)
    P = point_group(L)
    for Q in P.elements:
        assert den(L, R @ Q) == den(L, R)
