"""Coincidence site lattices, their indices and multiple CSLs."""

from dataclasses import dataclass
from functools import reduce

from .isometry import Isometry, point_group, symmetry_class
from .lattice import index, intersect, transform


@dataclass(frozen=True)
class CoincidenceRecord:
    R: Isometry
    csl: object
    sigma: int
    sym_class: object

    def to_json(self):
        return {"sigma": self.sigma, "csl": self.csl.to_json(),
                "isometry": self.R.to_json(),
                "class_rep": self.sym_class.representative.to_json()}


@dataclass(frozen=True)
class MCSLRecord:
    isometries: tuple
    mcsl: object
    sigma_multi: int

    def to_json(self):
        return {"sigma": self.sigma_multi, "mcsl": self.mcsl.to_json(),
                "isometries": [R.to_json() for R in self.isometries]}


def _check(L, R):
    if L.dim != R.dim:
        raise ValueError(f"dimension mismatch: lattice {L.dim}, isometry {R.dim}")


def is_coincidence(L, R):
    """Whether ``L ∩ R L`` has finite index in ``L``.

    With a rational basis and a rational ``R`` the conjugate ``B^-1 R B`` is
    rational, which is exactly the finite-index condition, so this only
    validates dimensions.
    """
    _check(L, R)
    return True


def csl_lattice(L, R):
    _check(L, R)
    return intersect(L, transform(L, R))


def sigma(L, R):
    return index(csl_lattice(L, R), L)


def csl(L, R, P=None):
    if not is_coincidence(L, R):
        raise ValueError("not a coincidence isometry")
    if P is None:
        P = point_group(L)
    C = csl_lattice(L, R)
    return CoincidenceRecord(R, C, index(C, L), symmetry_class(R, P))


def mcsl(L, Rs):
    """``L ∩ R_1 L ∩ ... ∩ R_n L`` as a left fold of pairwise intersections."""
    Rs = tuple(Rs)
    if not Rs:
        raise ValueError("need at least one isometry")
    for R in Rs:
        _check(L, R)
    M = reduce(intersect, (transform(L, R) for R in Rs), L)
    return MCSLRecord(Rs, M, index(M, L))


def generators_of_csl(L, target, pool):
    """Symmetry classes among ``pool`` whose CSL is ``target``."""
    return {rec.sym_class for rec in pool if rec.csl == target}
