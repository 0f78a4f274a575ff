"""Full-rank lattices in R^d kept in a canonical scaled-HNF form."""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm, prod

from . import linalg


@dataclass(frozen=True)
class Lattice:
    """The lattice ``(1/den) * mat * Z^d``.

    ``mat`` is the column HNF of an integer basis and ``(den, mat)`` is in
    lowest terms, so two instances compare equal exactly when they describe
    the same point set.  Build instances with :func:`lattice_from_basis` or
    the operations below rather than by hand.
    """

    dim: int
    den: int
    mat: tuple

    def basis(self):
        q = Fraction(1, self.den)
        return tuple(tuple(q * x for x in row) for row in self.mat)

    def gram(self):
        B = self.basis()
        return linalg.matmul(linalg.transpose(B), B)

    @property
    def volume(self):
        """Unit-cell volume ``|det B|`` as an exact rational."""
        return Fraction(prod(self.mat[i][i] for i in range(self.dim)), self.den ** self.dim)

    def to_json(self):
        cols = linalg.transpose(self.mat)
        return {"dim": self.dim, "den": self.den,
                "mat": [[str(x) for x in col] for col in cols]}

    @classmethod
    def from_json(cls, obj):
        try:
            d = int(obj["dim"])
            q = int(obj.get("den", 1))
            cols = [[int(x) for x in col] for col in obj["mat"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed lattice JSON: {exc}") from None
        if q <= 0 or len(cols) != d or any(len(c) != d for c in cols):
            raise ValueError("malformed lattice JSON: shape or denominator")
        return _canonical(q, linalg.transpose(cols))


def _canonical(den, N):
    """Canonical lattice for ``(1/den) * N * Z^d`` with ``N`` integral."""
    D = abs(linalg.det(N))
    if D == 0:
        raise ValueError("singular basis")
    H = linalg.hnf_mod(N, D)
    g = gcd(den, linalg.content(H))
    if g > 1:
        H = tuple(tuple(x // g for x in row) for row in H)
        den //= g
    return Lattice(len(H), den, H)


def lattice_from_basis(B):
    """Canonical lattice spanned by the columns of the rational matrix ``B``."""
    B = linalg.rat_matrix(B)
    r, c = linalg.shape(B)
    if r != c:
        raise ValueError("basis must be square")
    q, N = linalg.split_denominator(B)
    return _canonical(q, N)


def _same_dim(L1, L2):
    if L1.dim != L2.dim:
        raise ValueError(f"dimension mismatch: {L1.dim} vs {L2.dim}")


def _common(L1, L2):
    q = lcm(L1.den, L2.den)
    a, b = q // L1.den, q // L2.den
    A1 = L1.mat if a == 1 else linalg.scalar_mul(a, L1.mat)
    A2 = L2.mat if b == 1 else linalg.scalar_mul(b, L2.mat)
    return q, A1, A2


def _in_upper_span(H, v):
    """True when the integer vector ``v`` is an integer combination of the
    columns of the upper-triangular ``H``."""
    d = len(H)
    v = list(v)
    for i in reversed(range(d)):
        x, r = divmod(v[i], H[i][i])
        if r:
            return False
        if x:
            for k in range(i + 1):
                v[k] -= x * H[k][i]
    return True


def is_sublattice(L1, L2):
    """``L1 ⊆ L2``."""
    _same_dim(L1, L2)
    _, A1, A2 = _common(L1, L2)
    return all(_in_upper_span(A2, col) for col in zip(*A1))


def contains_point(L, v):
    """Whether the rational vector ``v`` lies in ``L``."""
    w = [Fraction(x) * L.den for x in v]
    if any(x.denominator != 1 for x in w):
        return False
    return _in_upper_span(L.mat, [int(x) for x in w])


def index(Lsub, L):
    """Group index ``[L : Lsub]``; ``Lsub`` must be a sublattice of ``L``."""
    if not is_sublattice(Lsub, L):
        raise ValueError("not a sublattice")
    ratio = Lsub.volume / L.volume
    assert ratio.denominator == 1
    return ratio.numerator


@lru_cache(maxsize=65536)
def intersect(L1, L2):
    _same_dim(L1, L2)
    if L1 == L2:
        return L1
    d = L1.dim
    q, A1, A2 = _common(L1, L2)
    # B1 x = B2 y over Z, i.e. ker [A1 | -A2]
    K = linalg.integer_kernel(linalg.hstack(A1, linalg.scalar_mul(-1, A2)))
    X = K[:d]
    return _canonical(q, linalg.matmul(A1, X))


@lru_cache(maxsize=65536)
def lattice_sum(L1, L2):
    """Smallest lattice containing both ``L1`` and ``L2``."""
    _same_dim(L1, L2)
    if L1 == L2:
        return L1
    q, A1, A2 = _common(L1, L2)
    D = prod(A1[i][i] for i in range(L1.dim))
    H = linalg.hnf_mod(linalg.hstack(A1, A2), D)
    g = gcd(q, linalg.content(H))
    if g > 1:
        H = tuple(tuple(x // g for x in row) for row in H)
        q //= g
    return Lattice(L1.dim, q, H)


def scale(L, c):
    c = linalg.as_rational(c)
    if c <= 0:
        raise ValueError("scale factor must be positive")
    den = L.den * c.denominator
    M = linalg.scalar_mul(c.numerator, L.mat)
    g = gcd(den, linalg.content(M))
    return Lattice(L.dim, den // g, tuple(tuple(x // g for x in row) for row in M))


@lru_cache(maxsize=65536)
def _transform(L, R):
    r, N = linalg.split_denominator(R)
    return _canonical(r * L.den, linalg.matmul(N, L.mat))


def transform(L, R):
    """The image lattice ``R L`` for a nonsingular rational matrix ``R``."""
    R = getattr(R, "mat", R)
    R = linalg.rat_matrix(R)
    if linalg.shape(R) != (L.dim, L.dim):
        raise ValueError("dimension mismatch")
    if linalg.det(R) == 0:
        raise ValueError("singular matrix")
    return _transform(L, R)


def commensurate(L1, L2):
    """Whether ``L1 ∩ L2`` has finite index in both.

    Every lattice here has a rational basis, so the answer is always yes;
    the predicate exists so that callers state the precondition explicitly.
    """
    _same_dim(L1, L2)
    return True


def exponent(L):
    """Smallest ``e`` such that ``e * M^-1`` is integral for the integer
    basis ``M`` of ``L`` (the exponent of ``Z^d / M Z^d``)."""
    return linalg.common_denominator(linalg.inverse(L.mat))


def diagonal(*entries):
    d = len(entries)
    return lattice_from_basis([[entries[i] if i == j else 0 for j in range(d)] for i in range(d)])


PRESETS = {
    "square": lambda: diagonal(1, 1),
    "2zx3z": lambda: diagonal(2, 3),
    "zx5z": lambda: diagonal(1, 5),
    "cubic": lambda: diagonal(1, 1, 1),
}


def preset(name):
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown lattice preset {name!r}; known: {sorted(PRESETS)}") from None


def preset_name(L):
    for name, make in PRESETS.items():
        if make() == L:
            return name
    return None
