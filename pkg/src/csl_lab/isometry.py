"""Exact orthogonal maps, lattice point groups and symmetry classes."""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import factorial, gcd, isqrt, lcm

from . import linalg
from .lattice import Lattice


@dataclass(frozen=True)
class Isometry:
    """A linear isometry stored as ``num / den`` with ``num`` integral.

    ``(den, num)`` is kept in lowest terms, so equality is entrywise
    equality of the rational matrix.  Use :func:`make_isometry` for
    untrusted input; products and inverses of isometries skip validation.
    """

    dim: int
    den: int
    num: tuple

    @classmethod
    def _from_int(cls, den, num):
        g = gcd(den, linalg.content(num))
        if g > 1:
            den //= g
            num = tuple(tuple(x // g for x in row) for row in num)
        return cls(len(num), den, num)

    @cached_property
    def mat(self):
        q = self.den
        return tuple(tuple(Fraction(x, q) for x in row) for row in self.num)

    @cached_property
    def det(self):
        return linalg.det(self.num) // self.den ** self.dim

    @property
    def is_rotation(self):
        return self.det == 1

    def inverse(self):
        return Isometry(self.dim, self.den, linalg.transpose(self.num))

    def __matmul__(self, other):
        if not isinstance(other, Isometry):
            return NotImplemented
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return Isometry._from_int(self.den * other.den, linalg.matmul(self.num, other.num))

    def sort_key(self):
        return linalg.flatten(self.mat)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def to_json(self):
        return {"dim": self.dim,
                "mat": [[linalg.fraction_str(x) for x in row] for row in self.mat]}

    @classmethod
    def from_json(cls, obj):
        try:
            M = linalg.rat_matrix(obj["mat"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed isometry JSON: {exc}") from None
        iso = make_isometry(M)
        if "dim" in obj and obj["dim"] != iso.dim:
            raise ValueError("malformed isometry JSON: dim does not match matrix")
        return iso

    def __repr__(self):
        rows = "; ".join(", ".join(linalg.fraction_str(x) for x in row) for row in self.mat)
        return f"Isometry([{rows}])"


def make_isometry(M):
    """Validate ``M`` as an exact orthogonal matrix."""
    M = linalg.rat_matrix(getattr(M, "mat", M))
    r, c = linalg.shape(M)
    if r != c:
        raise ValueError("not an isometry: matrix is not square")
    q, N = linalg.split_denominator(M)
    NtN = linalg.matmul(linalg.transpose(N), N)
    if NtN != linalg.scalar_mul(q * q, linalg.identity(r)):
        raise ValueError("not an isometry")
    return Isometry(r, q, N)


def identity_isometry(d):
    return Isometry(d, 1, linalg.identity(d))


def is_orientation_preserving(R):
    return R.det == 1


@dataclass(frozen=True)
class PointGroup:
    lattice: Lattice
    elements: tuple
    order: int
    rotation_order: int

    @cached_property
    def _int_form(self):
        c = 1
        for Q in self.elements:
            c = lcm(c, Q.den)
        return c, tuple(linalg.scalar_mul(c // Q.den, Q.num) for Q in self.elements)

    @cached_property
    def _members(self):
        return frozenset(self.elements)

    def __contains__(self, R):
        return R in self._members

    @cached_property
    def is_hyperoctahedral(self):
        """True when the group is all ``2^d d!`` signed permutation matrices."""
        d = self.lattice.dim
        if self.order != 2 ** d * factorial(d):
            return False
        return all(Q.den == 1 and sorted(map(abs, linalg.flatten(Q.num))) == [0] * (d * d - d) + [1] * d
                   for Q in self.elements)

    @property
    def has_reflection(self):
        return self.rotation_order < self.order

    def to_json(self):
        return [Q.to_json() for Q in self.elements]


def _ldl(G):
    """Exact symmetric decomposition ``q(x) = sum D_i (x_i + sum_{j>i} u_ij x_j)^2``."""
    d = len(G)
    A = [[Fraction(x) for x in row] for row in G]
    D = [Fraction(0)] * d
    u = [[Fraction(0)] * d for _ in range(d)]
    for i in range(d):
        D[i] = A[i][i]
        if D[i] <= 0:
            raise ValueError("Gram matrix is not positive definite")
        for j in range(i + 1, d):
            u[i][j] = A[i][j] / D[i]
        for j in range(i + 1, d):
            for k in range(i + 1, d):
                A[j][k] -= A[i][j] * A[i][k] / D[i]
    return D, u


def vectors_of_norm(G, norm):
    """All integer vectors ``x`` with ``x^T G x == norm`` (exact Fincke–Pohst)."""
    norm = Fraction(norm)
    d = len(G)
    D, u = _ldl(G)
    out = []
    x = [0] * d

    def rec(i, budget):
        if i < 0:
            if budget == 0:
                out.append(tuple(x))
            return
        c = -sum((u[i][j] * x[j] for j in range(i + 1, d)), Fraction(0))
        r2 = budget / D[i]
        s = isqrt(r2.numerator // r2.denominator) + 1
        lo = (c.numerator // c.denominator) - s
        hi = -((-c.numerator) // c.denominator) + s
        for t in range(lo, hi + 1):
            diff = t - c
            used = D[i] * diff * diff
            if used <= budget:
                x[i] = t
                rec(i - 1, budget - used)
        x[i] = 0

    rec(d - 1, norm)
    return out


def gram_equivalences(G_from, G_to, first_only=False):
    """Integer matrices ``U`` with ``U^T G_from U == G_to``.

    Columns of ``U`` are built one at a time from vectors of the required
    norm, pruned by the off-diagonal Gram constraints.
    """
    G_from = [[Fraction(x) for x in row] for row in G_from]
    G_to = [[Fraction(x) for x in row] for row in G_to]
    d = len(G_from)
    cands = {}
    for j in range(d):
        n = G_to[j][j]
        if n not in cands:
            cands[n] = vectors_of_norm(G_from, n)
    # G_from * x, reused for every inner product test
    gx = {}
    for vs in cands.values():
        for v in vs:
            if v not in gx:
                gx[v] = tuple(sum(G_from[i][k] * v[k] for k in range(d)) for i in range(d))
    found = []
    chosen = []

    def rec(j):
        if j == d:
            found.append(linalg.transpose(chosen))
            return first_only
        for v in cands[G_to[j][j]]:
            if all(sum(a * b for a, b in zip(gx[w], v)) == G_to[i][j]
                   for i, w in enumerate(chosen)):
                chosen.append(v)
                stop = rec(j + 1)
                chosen.pop()
                if stop:
                    return True
        return False

    rec(0)
    return found


@lru_cache(maxsize=None)
def _basis_pair(L):
    B = L.basis()
    return B, linalg.inverse(B)


@lru_cache(maxsize=None)
def point_group(L):
    """Full point group ``{R orthogonal : R L = L}`` for ``dim <= 4``."""
    if L.dim > 4:
        raise ValueError("unsupported dimension")
    G = L.gram()
    B, Binv = _basis_pair(L)
    elements = []
    for U in gram_equivalences(G, G):
        R = linalg.matmul(linalg.matmul(B, U), Binv)
        q, N = linalg.split_denominator(R)
        elements.append(Isometry(L.dim, q, N))
    elements.sort()
    rot = sum(1 for Q in elements if Q.det == 1)
    return PointGroup(L, tuple(elements), len(elements), rot)


@dataclass(frozen=True)
class SymmetryClass:
    """The coset ``R P``, named by its lexicographically smallest member."""

    representative: Isometry

    def sort_key(self):
        return self.representative.sort_key()

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()


def coset(R, P):
    return [R @ Q for Q in P.elements]


def _signed_permutation_min(num):
    # right multiplication by a signed permutation permutes the columns and
    # flips their signs independently: make each column's first nonzero entry
    # negative, then sort the columns
    cols = []
    for col in zip(*num):
        lead = next(x for x in col if x)
        cols.append(col if lead < 0 else tuple(-x for x in col))
    cols.sort()
    return tuple(zip(*cols))


def symmetry_class(R, P):
    if P.is_hyperoctahedral:
        return SymmetryClass(Isometry(R.dim, R.den, _signed_permutation_min(R.num)))
    c, Qs = P._int_form
    best = None
    for Qn in Qs:
        cand = linalg.matmul(R.num, Qn)
        if best is None or cand < best:
            best = cand
    # every coset member shares the denominator R.den * c, so integer
    # numerators order exactly like the rational entries
    return SymmetryClass(Isometry._from_int(R.den * c, best))


def den(L, R):
    """Smallest positive ``n`` with ``n R L ⊆ L``."""
    B, Binv = _basis_pair(L)
    T = linalg.matmul(linalg.matmul(Binv, R.mat), B)
    return linalg.common_denominator(T)


PRESET_ISOMETRIES = {
    "identity": ((1, 0), (0, 1)),
    "rot90": ((0, -1), (1, 0)),
    "refl-x": ((1, 0), (0, -1)),
    "swap": ((0, 1), (1, 0)),
    "sq5": (("3/5", "-4/5"), ("4/5", "3/5")),
    "sq13": (("5/13", "-12/13"), ("12/13", "5/13")),
    "identity3": ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    "cub3": (("2/3", "-1/3", "2/3"), ("2/3", "2/3", "-1/3"), ("-1/3", "2/3", "2/3")),
}


def preset_isometry(name):
    try:
        return make_isometry(PRESET_ISOMETRIES[name])
    except KeyError:
        raise ValueError(f"unknown isometry preset {name!r}; known: {sorted(PRESET_ISOMETRIES)}") from None
