"""Similar sublattices ``c R L ⊆ L`` and their counting function g(m)."""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, prod

from sympy import divisors, factorint

from . import linalg
from .counting import check_multiplicative, check_supermultiplicative
from .isometry import den, gram_equivalences
from .lattice import Lattice, index, is_sublattice, lattice_from_basis, scale, transform


@dataclass(frozen=True)
class SimilarityRecord:
    R: object
    c: Fraction
    sublattice: Lattice
    index: int


@dataclass(frozen=True)
class SSLTable:
    lattice: Lattice
    max_index: int
    rows: dict  # m -> g(m)

    def to_csv(self):
        return "m,g\n" + "".join(f"{m},{g}\n" for m, g in sorted(self.rows.items()))

    def to_json(self):
        return {"lattice": self.lattice.to_json(), "max_index": self.max_index,
                "rows": [{"m": m, "g": g} for m, g in sorted(self.rows.items())]}


MAX_SUBLATTICE_INDEX = 2000


def hnf_matrices(m, d):
    """Every d x d column HNF with determinant ``m``."""
    def diagonals(rest, k):
        if k == 1:
            yield (rest,)
            return
        for a in divisors(rest):
            for tail in diagonals(rest // a, k - 1):
                yield (a,) + tail

    for diag in diagonals(m, d):
        # entry (i, j), j > i, ranges over [0, diag[i])
        slots = [(i, j) for j in range(d) for i in range(j)]
        for vals in product(*(range(diag[i]) for i, _ in slots)):
            H = [[0] * d for _ in range(d)]
            for i in range(d):
                H[i][i] = diag[i]
            for (i, j), v in zip(slots, vals):
                H[i][j] = v
            yield tuple(map(tuple, H))


def sublattice_count(m, d):
    """Number of index-``m`` sublattices of ``Z^d`` (closed form)."""
    total = 1
    for p, e in factorint(m).items():
        # Gaussian-binomial style product; only the full quotient is integral
        total *= prod(p ** (e + i) - 1 for i in range(1, d)) // prod(p ** i - 1 for i in range(1, d))
    return total


def enumerate_sublattices(L, m, max_index=MAX_SUBLATTICE_INDEX):
    if m < 1:
        raise ValueError("index must be positive")
    if L.dim > 3 or m > max_index:
        raise ValueError(f"guard exceeded: dim {L.dim}, index {m} (limit {max_index})")
    B = L.basis()
    return [lattice_from_basis(linalg.matmul(B, H)) for H in hnf_matrices(m, L.dim)]


def reduce_binary_form(a, b, c):
    """Lagrange–Gauss reduction of the positive form with Gram [[a, b], [b, c]].

    Returns the GL2(Z)-canonical triple ``(a, |b|, c)`` with
    ``2|b| <= a <= c``.
    """
    if a <= 0 or a * c - b * b <= 0:
        raise ValueError("form is not positive definite")
    while True:
        if a > c:
            a, c = c, a
        q = (2 * b + a) // (2 * a)
        if q:
            c = c - 2 * q * b + q * q * a
            b = b - q * a
            continue
        return a, abs(b), c


def _integral_root(x, k):
    """``y`` with ``y**k == x`` if it exists, else ``None``."""
    lo, hi = 0, 1
    while hi ** k < x:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** k < x:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** k == x else None


def _scaled_gram_pair(G_sub, G_target):
    q = linalg.common_denominator(tuple(G_sub) + tuple(G_target))
    return ([[int(x * q) for x in row] for row in G_sub],
            [[int(x * q) for x in row] for row in G_target])


def _form_content(G):
    """gcd of ``G_ii`` and ``2 G_ij``, an equivalence invariant."""
    d = len(G)
    q = linalg.common_denominator(G)
    g = 0
    for i in range(d):
        for j in range(d):
            g = gcd(g, int(G[i][j] * q) * (1 if i == j else 2))
    return Fraction(g, q)


def _forms_equivalent(G_sub, G_target):
    d = len(G_sub)
    if _form_content(G_sub) != _form_content(G_target):
        return False
    if d == 1:
        return G_sub[0][0] == G_target[0][0]
    if d == 2:
        A, T = _scaled_gram_pair(G_sub, G_target)
        return reduce_binary_form(A[0][0], A[0][1], A[1][1]) == \
            reduce_binary_form(T[0][0], T[0][1], T[1][1])
    return bool(gram_equivalences(G_sub, G_target, first_only=True))


def _similarity_factor(m, d):
    """``m^(2/d)`` if rational (it is then an integer), else ``None``."""
    return _integral_root(m * m, d)


def is_similar(L, Lsub):
    """Whether ``Lsub = c R L`` for some orthogonal ``R`` and scalar ``c``."""
    m = index(Lsub, L)
    c2 = _similarity_factor(m, L.dim)
    if c2 is None:
        return False
    G_t = linalg.scalar_mul(c2, L.gram())
    return _forms_equivalent(Lsub.gram(), G_t)


def ssl_table(L, N, max_index=MAX_SUBLATTICE_INDEX):
    """g(m) for ``1 <= m <= N``.

    Works on Gram matrices ``H^T G H`` directly instead of building a
    canonical lattice for every candidate.
    """
    if N > max_index:
        raise ValueError(f"guard exceeded: N {N} > {max_index}")
    G = L.gram()
    d = L.dim
    rows = {}
    for m in range(1, N + 1):
        c2 = _similarity_factor(m, d)
        if c2 is None:
            rows[m] = 0
            continue
        G_t = linalg.scalar_mul(c2, G)
        if d == 2:
            q = linalg.common_denominator(G)
            Gi = [[int(x * q) for x in row] for row in G]
            target = reduce_binary_form(*(int(x * q) for x in (G_t[0][0], G_t[0][1], G_t[1][1])))
            count = 0
            for H in hnf_matrices(m, 2):
                (h00, h01), (_, h11) = H
                # Gram of the columns (h00, 0) and (h01, h11) in basis coordinates
                a = h00 * h00 * Gi[0][0]
                b = h00 * (h01 * Gi[0][0] + h11 * Gi[0][1])
                c = h01 * h01 * Gi[0][0] + 2 * h01 * h11 * Gi[0][1] + h11 * h11 * Gi[1][1]
                if reduce_binary_form(a, b, c) == target:
                    count += 1
        else:
            count = 0
            for H in hnf_matrices(m, d):
                G_s = linalg.matmul(linalg.matmul(linalg.transpose(H), G), H)
                if _forms_equivalent(G_s, G_t):
                    count += 1
        rows[m] = count
    return SSLTable(L, N, rows)


def primitive_ssl(L, R):
    """The similar sublattice ``den(R) R L``; its index is ``den(R)^d``."""
    n = den(L, R)
    S = scale(transform(L, R), n)
    if not is_sublattice(S, L):
        raise RuntimeError(f"{n} R L is not a sublattice for {R}")
    idx = index(S, L)
    if idx != n ** L.dim:
        raise RuntimeError(f"primitive similar sublattice index {idx} != den^d = {n ** L.dim}")
    return SimilarityRecord(R, Fraction(n), S, idx)


def g_witness_search(L, start=200, ceiling=800):
    """Escalate the range until g shows a multiplicativity witness.

    Returns a dict with the final range, the witnesses found there (empty
    when none turned up below ``ceiling``), any supermultiplicativity
    counterexample, and every range tried.
    """
    N = start
    tried = []
    while True:
        table = ssl_table(L, N)
        tried.append(N)
        witnesses = check_multiplicative(table.rows, "g")
        if witnesses or N >= ceiling:
            return {"range": N, "tried": tried, "table": table,
                    "witnesses": witnesses,
                    "super_violation": check_supermultiplicative(table.rows, "g")}
        N = min(2 * N, ceiling)
