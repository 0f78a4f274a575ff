"""Exact rational and integer matrix routines.

Matrices are plain tuples of row tuples.  Integer matrices hold ``int``
entries, rational ones hold :class:`fractions.Fraction`.  Lattice generators
are always matrix *columns*.
"""

from fractions import Fraction
from math import gcd, lcm

Rational = Fraction


def as_rational(x):
    """Parse ``x`` (int, Fraction, or a ``"p/q"`` string) into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rat_matrix(rows):
    rows = tuple(tuple(as_rational(x) for x in row) for row in rows)
    _check_rect(rows)
    return rows


def int_matrix(rows):
    out = []
    for row in rows:
        r = []
        for x in row:
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"non-integer entry {x}")
                x = x.numerator
            r.append(int(x))
        out.append(tuple(r))
    out = tuple(out)
    _check_rect(out)
    return out


def _check_rect(rows):
    if not rows or not rows[0]:
        raise ValueError("empty matrix")
    k = len(rows[0])
    if any(len(r) != k for r in rows):
        raise ValueError("ragged matrix")


def shape(M):
    return len(M), len(M[0])


def identity(d, one=1):
    return tuple(tuple(one if i == j else 0 * one for j in range(d)) for i in range(d))


def transpose(M):
    return tuple(zip(*M))


def matmul(A, B):
    Bt = tuple(zip(*B))
    if len(A[0]) != len(Bt[0]):
        raise ValueError("shape mismatch in matmul")
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def scalar_mul(c, M):
    return tuple(tuple(c * x for x in row) for row in M)


def hstack(A, B):
    if len(A) != len(B):
        raise ValueError("row mismatch in hstack")
    return tuple(ra + rb for ra, rb in zip(A, B))


def flatten(M):
    return tuple(x for row in M for x in row)


def common_denominator(M):
    """Smallest positive integer ``q`` such that ``q*M`` is integral."""
    q = 1
    for row in M:
        for x in row:
            if isinstance(x, Fraction):
                q = lcm(q, x.denominator)
    return q


def split_denominator(M):
    """Write a rational matrix as ``(q, N)`` with ``M = N / q``, ``q`` minimal."""
    q = common_denominator(M)
    N = tuple(tuple(int(x * q) for x in row) for row in M)
    return q, N


def content(M):
    g = 0
    for row in M:
        for x in row:
            g = gcd(g, x)
    return g


def det(M):
    """Exact determinant.

    Integer input goes through Bareiss fraction-free elimination and returns
    an int; anything with a Fraction entry falls back to rational Gaussian
    elimination.
    """
    n, k = shape(M)
    if n != k:
        raise ValueError("determinant of a non-square matrix")
    if all(isinstance(x, int) for row in M for x in row):
        return _bareiss(M)
    A = [list(map(Fraction, row)) for row in M]
    sign = 1
    result = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            sign = -sign
        piv = A[c][c]
        result *= piv
        for r in range(c + 1, n):
            f = A[r][c] / piv
            if f:
                for j in range(c, n):
                    A[r][j] -= f * A[c][j]
    return sign * result


def _bareiss(M):
    n = len(M)
    A = [list(row) for row in M]
    sign = 1
    prev = 1
    for c in range(n - 1):
        if A[c][c] == 0:
            p = next((r for r in range(c + 1, n) if A[r][c] != 0), None)
            if p is None:
                return 0
            A[c], A[p] = A[p], A[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                A[i][j] = (A[i][j] * A[c][c] - A[i][c] * A[c][j]) // prev
        prev = A[c][c]
    return sign * A[n - 1][n - 1]


def inverse(M):
    n, k = shape(M)
    if n != k:
        raise ValueError("inverse of a non-square matrix")
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            raise ValueError("singular matrix")
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [x / piv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return tuple(tuple(row[n:]) for row in A)


def xgcd(a, b):
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _echelon(M, track=True):
    """Column-reduce ``M`` from the bottom row up.

    Returns ``(cols, U, pivots)``: ``cols`` are the transformed columns,
    ``U`` the accumulated unimodular transform (as columns, ``None`` when not
    tracked) and ``pivots`` maps each row to the column holding its pivot
    (``None`` for rows without one).  Columns that never became pivots are
    zero.
    """
    d, k = shape(M)
    cols = [list(c) for c in zip(*M)]
    U = [[int(i == j) for i in range(k)] for j in range(k)] if track else None
    active = list(range(k))
    pivots = [None] * d
    for i in reversed(range(d)):
        nz = [j for j in active if cols[j][i] != 0]
        if not nz:
            continue
        p = nz[0]
        for j in nz[1:]:
            a, b = cols[p][i], cols[j][i]
            g, x, y = xgcd(a, b)
            ag, bg = a // g, b // g
            cp, cj = cols[p], cols[j]
            cols[p] = [x * s + y * t for s, t in zip(cp, cj)]
            cols[j] = [bg * s - ag * t for s, t in zip(cp, cj)]
            if track:
                up, uj = U[p], U[j]
                U[p] = [x * s + y * t for s, t in zip(up, uj)]
                U[j] = [bg * s - ag * t for s, t in zip(up, uj)]
        if cols[p][i] < 0:
            cols[p] = [-s for s in cols[p]]
            if track:
                U[p] = [-s for s in U[p]]
        pivots[i] = p
        active.remove(p)
    # off-pivot reduction: row i entries of later pivot columns into [0, h_ii)
    prow = [i for i in range(d) if pivots[i] is not None]
    for jj, j in enumerate(prow):
        cj = pivots[j]
        for i in reversed(prow[:jj]):
            ci = pivots[i]
            q = cols[cj][i] // cols[ci][i]
            if q:
                cols[cj] = [s - q * t for s, t in zip(cols[cj], cols[ci])]
                if track:
                    U[cj] = [s - q * t for s, t in zip(U[cj], U[ci])]
    return cols, U, pivots


def hnf(M):
    """Column Hermite normal form of a full-row-rank integer matrix.

    ``M`` is d x k with rank d.  Returns ``(H, U)`` where ``H`` is the d x d
    upper-triangular HNF of the column span (positive diagonal, entries right
    of the diagonal reduced into ``[0, h_ii)``) and ``U`` is a k x k
    unimodular matrix with ``M U = [H | 0]``.
    """
    M = int_matrix(M)
    d, k = shape(M)
    cols, U, pivots = _echelon(M)
    if any(p is None for p in pivots):
        raise ValueError("rank deficient")
    order = list(pivots) + [j for j in range(k) if j not in pivots]
    H = transpose([cols[p] for p in pivots])
    Umat = transpose([U[j] for j in order])
    return tuple(map(tuple, H)), tuple(map(tuple, Umat))


def hnf_mod(M, D):
    """HNF of the column span of ``M`` computed modulo ``D``.

    ``D`` must be a positive multiple of the determinant of the lattice
    spanned by the columns of ``M`` (so that ``D * Z^d`` lies inside it).
    Keeps every intermediate entry below ``D`` in absolute value.
    """
    M = int_matrix(M)
    d, k = shape(M)
    if D <= 0:
        raise ValueError("modulus must be positive")
    A = [[x % D for x in col] for col in zip(*M)]
    W = [None] * d
    R = D
    for i in reversed(range(d)):
        # fold every column with a nonzero row-i residue into the first one
        piv = None
        for j in range(len(A)):
            if A[j][i] % R == 0:
                continue
            if piv is None:
                piv = j
                continue
            a, b = A[piv][i], A[j][i]
            g, x, y = xgcd(a, b)
            ag, bg = a // g, b // g
            cp, cj = A[piv], A[j]
            A[piv] = [(x * s + y * t) % R for s, t in zip(cp, cj)]
            A[j] = [(bg * t2 - ag * s2) for s2, t2 in zip(cj, cp)]
            A[j] = [v % R for v in A[j]]
        if piv is None:
            w = [0] * d
            w[i] = R
            g = R
        else:
            col = A.pop(piv)
            g, u, _ = xgcd(col[i], R)
            w = [(u * s) % R for s in col]
            if w[i] == 0:
                w[i] = R
        for r in range(i + 1, d):
            w[r] = 0
        W[i] = w
        for j in range(i + 1, d):
            q = W[j][i] // W[i][i]
            if q:
                W[j] = [s - q * t for s, t in zip(W[j], W[i])]
        R //= g
    return tuple(tuple(W[j][i] for j in range(d)) for i in range(d))


def integer_kernel(M):
    """Basis (as columns of a k x r matrix) of ``{x in Z^k : M x = 0}``.

    Returns an empty tuple when the kernel is trivial.  The basis is put in
    the same bottom-up echelon shape as :func:`hnf`, which makes it
    canonical.
    """
    M = int_matrix(M)
    d, k = shape(M)
    cols, U, pivots = _echelon(M)
    used = {p for p in pivots if p is not None}
    kern = [U[j] for j in range(k) if j not in used]
    if not kern:
        return ()
    kcols, _, kpiv = _echelon(transpose(kern), track=False)
    basis = [kcols[p] for p in kpiv if p is not None]
    return tuple(tuple(c[i] for c in basis) for i in range(k))


def fraction_str(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def matrix_to_json(M):
    r, c = shape(M)
    return {"rows": r, "cols": c,
            "entries": [[fraction_str(x) for x in row] for row in M]}


def matrix_from_json(obj):
    try:
        rows = obj["entries"]
        M = rat_matrix(rows)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from None
    if shape(M) != (obj["rows"], obj["cols"]):
        raise ValueError("malformed matrix JSON: declared shape does not match entries")
    return M
