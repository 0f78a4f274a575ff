"""Multiplicity functions f_iso, f_rot, f and their arithmetic properties.

Multiplicativity can only be observed on a finite range, so every checker
works on the table's range and says nothing beyond it.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from math import gcd

from sympy import factorint, primerange

MULTIPLICATIVE_VIOLATION = "multiplicative-violation"
STRICT_SUPER = "strict-supermultiplicative"


@dataclass(frozen=True)
class MultiplicityTable:
    lattice: object
    max_index: int
    rows: dict  # m -> (f_iso, f_rot, f)
    pg_order: int
    pg_rotation_order: int

    def series(self, which="f"):
        col = {"f_iso": 0, "f_rot": 1, "f": 2}[which]
        return {m: r[col] for m, r in self.rows.items()}

    def to_csv(self):
        lines = ["m,f_iso,f_rot,f"]
        lines += [f"{m},{a},{b},{c}" for m, (a, b, c) in sorted(self.rows.items())]
        return "\n".join(lines) + "\n"

    def to_json(self):
        return {"lattice": self.lattice.to_json(), "max_index": self.max_index,
                "pg_order": self.pg_order, "pg_rotation_order": self.pg_rotation_order,
                "rows": [{"m": m, "f_iso": a, "f_rot": b, "f": c}
                         for m, (a, b, c) in sorted(self.rows.items())]}


@dataclass(frozen=True)
class DirichletData:
    coefficients: dict
    truncation: int
    euler_primes: list = field(default_factory=list)

    def to_json(self):
        return {"truncation": self.truncation, "euler_primes": list(self.euler_primes),
                "coefficients": [[m, c] for m, c in sorted(self.coefficients.items())]}


@dataclass(frozen=True)
class Witness:
    """A coprime pair where ``f(mn) != f(m) f(n)``.

    ``kind`` is ``strict-supermultiplicative`` when ``f(mn) > f(m) f(n)`` and
    ``multiplicative-violation`` when ``f(mn) < f(m) f(n)``; the latter
    contradicts supermultiplicativity and means something is broken.
    """

    m: int
    n: int
    lhs: int
    rhs: int
    kind: str

    def to_json(self):
        return {"m": self.m, "n": self.n, "lhs": self.lhs, "rhs": self.rhs, "kind": self.kind}


def multiplicity_table(enum, P):
    """Aggregate a complete enumeration into per-index counts.

    ``f_iso`` counts symmetry classes, ``f`` distinct CSLs, and ``f_rot`` is
    the number of coincidence rotations divided by ``|P'|``.  Rotation counts
    come from the enumerator's raw isometries when it reports them, otherwise
    from the coset structure (``R P`` holds ``|P'|`` rotations when ``P`` has
    a reflection, else ``|P|`` or none depending on ``det R``).
    """
    if not enum.complete:
        raise ValueError("incomplete enumeration: counts would be meaningless")
    N = enum.max_sigma
    classes = defaultdict(int)
    csls = defaultdict(set)
    rot_from_cosets = defaultdict(int)
    for rec in enum.records:
        classes[rec.sigma] += 1
        csls[rec.sigma].add(rec.csl)
        if P.has_reflection:
            rot_from_cosets[rec.sigma] += P.rotation_order
        elif rec.R.det == 1:
            rot_from_cosets[rec.sigma] += P.order
    raw = enum.raw_counts
    rows = {}
    for m in range(1, N + 1):
        n_cls = classes.get(m, 0)
        if raw is not None:
            n_iso, n_rot = raw.get(m, (0, 0))
            if n_iso != n_cls * P.order:
                raise ValueError(f"raw isometry count {n_iso} at index {m} is not |P| * classes")
        else:
            n_rot = rot_from_cosets.get(m, 0)
        if n_rot % P.rotation_order:
            raise ValueError(f"rotation count {n_rot} at index {m} not divisible by |P'|")
        rows[m] = (n_cls, n_rot // P.rotation_order, len(csls.get(m, ())))
    return MultiplicityTable(enum.lattice, N, rows, P.order, P.rotation_order)


def square_formula(m):
    """Number of CSLs of index ``m`` of the square lattice."""
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return 1
    f = factorint(m)
    if any(p % 4 != 1 for p in f):
        return 0
    return 2 ** len(f)


def _values(T, which):
    if isinstance(T, dict):
        return T
    if which == "g":
        return T.rows
    return T.series(which)


def coprime_pairs(N):
    """Pairs ``1 < m < n`` with ``gcd(m, n) = 1`` and ``m n <= N``."""
    for m in range(2, N + 1):
        if m * (m + 1) > N:
            break
        for n in range(m + 1, N // m + 1):
            if gcd(m, n) == 1:
                yield m, n


def check_multiplicative(T, which="f"):
    """All coprime pairs in range where multiplicativity fails."""
    vals = _values(T, which)
    N = max(vals)
    out = []
    for m, n in coprime_pairs(N):
        lhs, rhs = vals[m * n], vals[m] * vals[n]
        if lhs != rhs:
            kind = STRICT_SUPER if lhs > rhs else MULTIPLICATIVE_VIOLATION
            out.append(Witness(m, n, lhs, rhs, kind))
    return out


def check_supermultiplicative(T, which="f"):
    """First coprime pair with ``f(mn) < f(m) f(n)``, or ``None``."""
    vals = _values(T, which)
    N = max(vals)
    for m, n in coprime_pairs(N):
        lhs, rhs = vals[m * n], vals[m] * vals[n]
        if lhs < rhs:
            return Witness(m, n, lhs, rhs, MULTIPLICATIVE_VIOLATION)
    return None


def dirichlet_coefficients(T, which="f"):
    vals = _values(T, which)
    return DirichletData({m: c for m, c in sorted(vals.items()) if c}, max(vals))


def euler_product_square(truncation):
    """Coefficients of prod_{p = 1 mod 4} (1 + p^-s) / (1 - p^-s) up to ``truncation``.

    Each local factor is ``1 + 2 p^-s + 2 p^-2s + ...``; the product is
    expanded by exact integer convolution.
    """
    coeffs = {1: 1}
    primes = [p for p in primerange(2, truncation + 1) if p % 4 == 1]
    for p in primes:
        new = dict(coeffs)
        for m, c in coeffs.items():
            pk = p
            while m * pk <= truncation:
                new[m * pk] = new.get(m * pk, 0) + 2 * c
                pk *= p
        coeffs = new
    return DirichletData(dict(sorted(coeffs.items())), truncation, primes)
