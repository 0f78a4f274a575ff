from itertools import permutations, product

import pytest

from csl_lab.csl import csl, csl_lattice, generators_of_csl, is_coincidence, mcsl, sigma
from csl_lab.enumeration import enumerate_conjugated, enumerate_cubic, enumerate_square
from csl_lab.isometry import identity_isometry, make_isometry, point_group, preset_isometry
from csl_lab.lattice import Lattice, contains_point, index, is_sublattice, preset, transform

Z2 = preset("square")
R5 = preset_isometry("sq5")
R13 = preset_isometry("sq13")
ROT90 = preset_isometry("rot90")


def residue_sigma(L, R, box):
    """Index of L ∩ RL from membership tests alone, for diagonal L.

    ``box`` must be a multiple of the CSL's periods in lattice coordinates,
    so the box is a union of CSL cosets and the hit ratio is exact.
    """
    a, b = L.mat[0][0], L.mat[1][1]
    RL = transform(L, R)
    inside = sum(1 for i, j in product(range(box), repeat=2) if contains_point(RL, (a * i, b * j)))
    return box * box // inside


def test_is_coincidence():
    assert is_coincidence(Z2, identity_isometry(2))
    assert is_coincidence(Z2, R5)
    assert is_coincidence(preset("2zx3z"), ROT90)
    with pytest.raises(ValueError, match="dimension mismatch"):
        is_coincidence(Z2, preset_isometry("identity3"))


def test_csl_examples():
    rec = csl(Z2, identity_isometry(2))
    assert rec.csl == Z2 and rec.sigma == 1
    rec = csl(Z2, R5)
    assert rec.sigma == 5 and rec.csl == Lattice(2, 1, ((5, 2), (0, 1)))
    assert csl(preset("2zx3z"), ROT90).sigma == 6


def test_2zx3z_rot90_residue_oracle():
    # a 6 x 6 block of lattice coordinates is a union of cosets of the CSL
    assert residue_sigma(preset("2zx3z"), ROT90, 6) == 6


def test_sigma_examples():
    assert sigma(Z2, identity_isometry(2)) == 1
    assert sigma(Z2, R5) == sigma(Z2, R5.inverse()) == 5
    assert sigma(Z2, ROT90) == 1


def test_mcsl_examples():
    assert mcsl(Z2, [identity_isometry(2)]).mcsl == Z2
    assert mcsl(Z2, [R5, R5]).mcsl == csl_lattice(Z2, R5)
    M = mcsl(Z2, [R5, R13])
    assert M.sigma_multi == 65
    # oracle: the intersection of the two CSLs, computed independently
    C5, C13 = csl_lattice(Z2, R5), csl_lattice(Z2, R13)
    for x, y in product(range(65), range(3)):
        assert contains_point(M.mcsl, (x, y)) == (contains_point(C5, (x, y)) and contains_point(C13, (x, y)))
    with pytest.raises(ValueError):
        mcsl(Z2, [])


def test_mcsl_order_independent():
    Rs = [R5, R13, ROT90 @ R5.inverse()]
    results = {mcsl(Z2, perm).mcsl for perm in permutations(Rs)}
    assert len(results) == 1


def test_generators_of_csl():
    pool = enumerate_square(25).records
    assert generators_of_csl(Z2, Z2, [r for r in pool if r.sigma == 1]) == {pool[0].sym_class}
    target = csl_lattice(Z2, R5)
    assert len(generators_of_csl(Z2, target, pool)) == 1
    assert generators_of_csl(Z2, preset("2zx3z"), pool) == set()


def test_generators_of_csl_one_class_on_square_cubic_2zx3z():
    for enum in (enumerate_square(100), enumerate_cubic(25), enumerate_conjugated(preset("2zx3z"), 24)):
        for rec in enum.records:
            assert len(generators_of_csl(enum.lattice, rec.csl, enum.records)) == 1


def test_zx5z_has_csl_with_two_generating_classes():
    # found by sweep: at index 25 a reflection and a rotation differing by the
    # coordinate swap (not a symmetry of Z x 5Z) generate the same CSL
    L = preset("zx5z")
    enum = enumerate_conjugated(L, 30)
    multi = {rec.sigma for rec in enum.records
             if len(generators_of_csl(L, rec.csl, enum.records)) > 1}
    assert multi == {25}
    A = make_isometry([["-4/5", "-3/5"], ["-3/5", "4/5"]])
    B = make_isometry([["-3/5", "-4/5"], ["4/5", "-3/5"]])
    assert csl_lattice(L, A) == csl_lattice(L, B) == Lattice(2, 1, ((25, 15), (0, 5)))
    assert A.inverse() @ B == preset_isometry("swap")
    assert preset_isometry("swap") not in point_group(L)
    # the same coincidence seen by point membership in a box
    AL, BL = transform(L, A), transform(L, B)
    for x, y in product(range(-20, 21), repeat=2):
        assert contains_point(AL, (x, 5 * y)) == contains_point(BL, (x, 5 * y))


@pytest.mark.parametrize("enum", [enumerate_square(50), enumerate_cubic(15),
                                  enumerate_conjugated(preset("2zx3z"), 24)],
                         ids=["square", "cubic", "2zx3z"])
def test_record_invariants(enum):
    L = enum.lattice
    P = point_group(L)
    recs = enum.records
    for rec in recs:
        assert is_sublattice(rec.csl, L)
        assert is_sublattice(rec.csl, transform(L, rec.R))
        assert index(rec.csl, L) == rec.sigma
        assert sigma(L, rec.R.inverse()) == rec.sigma
        for Q in P.elements[:8]:
            assert csl_lattice(L, rec.R @ Q) == rec.csl
    for a, b in zip(recs[:10], recs[-10:]):
        # group property: products and inverses are coincidence isometries
        assert is_coincidence(L, a.R @ b.R) and sigma(L, a.R @ b.R) >= 1


def test_record_json():
    obj = csl(Z2, R5).to_json()
    assert set(obj) == {"sigma", "csl", "isometry", "class_rep"}
    assert obj["sigma"] == 5
