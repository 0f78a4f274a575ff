"""Complete lists of coincidence isometries up to an index bound.

Three routes: Gaussian-integer parametrisation for the square lattice,
quaternion parametrisation for the cubic lattice, and a generic search over
rational orthogonal matrices of bounded denominator that serves as the
independent oracle for both.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from math import gcd, isqrt

from . import linalg
from .csl import CoincidenceRecord, csl_lattice
from .isometry import Isometry, point_group, symmetry_class
from .lattice import exponent, index, preset, preset_name


@dataclass(frozen=True)
class EnumerationResult:
    lattice: object
    max_sigma: int
    records: tuple
    complete: bool
    # m -> (isometries, rotations) actually produced by the enumerator, when
    # it produces raw isometries rather than only class representatives
    raw_counts: dict = field(default=None, compare=False)
    method: str = ""

    def by_sigma(self):
        out = defaultdict(list)
        for rec in self.records:
            out[rec.sigma].append(rec)
        return dict(out)

    def classes(self, m=None):
        return [rec.sym_class for rec in self.records if m is None or rec.sigma == m]

    def to_json(self):
        return {"lattice": self.lattice.to_json(), "max_sigma": self.max_sigma,
                "complete": self.complete, "method": self.method,
                "records": [r.to_json() for r in self.records]}


def _assemble(L, isometries, max_sigma, complete, method, expect_sigma=None, raw_counts=True):
    """Group raw isometries into symmetry classes and attach CSLs.

    ``expect_sigma`` optionally maps an isometry to the index its
    parametrisation predicts; a mismatch with the exact computation aborts.
    """
    P = point_group(L)
    classes = {}
    members = defaultdict(set)
    for R in isometries:
        cls = symmetry_class(R, P)
        members[cls].add(R)
        classes.setdefault(cls, R)
    records = []
    raw = defaultdict(lambda: [0, 0])
    for cls, R in classes.items():
        rep = cls.representative
        C = csl_lattice(L, rep)
        s = index(C, L)
        if expect_sigma is not None:
            want = expect_sigma(R)
            if want != s:
                raise RuntimeError(f"parametrised index {want} disagrees with exact index {s} for {R}")
        if s > max_sigma:
            continue
        records.append(CoincidenceRecord(rep, C, s, cls))
        raw[s][0] += len(members[cls])
        raw[s][1] += sum(1 for Q in members[cls] if Q.det == 1)
    records.sort(key=lambda r: (r.sigma, r.sym_class.sort_key()))
    raw = {m: tuple(v) for m, v in sorted(raw.items())} if raw_counts else None
    return EnumerationResult(L, max_sigma, tuple(records), complete, raw, method)


def square_rotation(a, b):
    """The rotation ``(a + bi)^2 / (a^2 + b^2)`` as an exact isometry."""
    m = a * a + b * b
    return Isometry._from_int(m, ((a * a - b * b, -2 * a * b), (2 * a * b, a * a - b * b)))


def enumerate_square(max_sigma):
    """All coincidence isometries of Z^2 with index at most ``max_sigma``.

    Coincidence rotations are ``u (a + bi)^2 / (a^2 + b^2)`` with ``a, b``
    coprime and ``u`` a unit; the index is the odd norm ``a^2 + b^2``.  Each
    rotation is also composed with a fixed reflection of the point group.
    """
    L = preset("square")
    P = point_group(L)
    rotations_P = [Q for Q in P.elements if Q.det == 1]
    reflection = next(Q for Q in P.elements if Q.det == -1)
    s = isqrt(max_sigma)
    gen = set()
    for a in range(-s, s + 1):
        for b in range(-s, s + 1):
            m = a * a + b * b
            if m == 0 or m > max_sigma or m % 2 == 0 or gcd(a, b) != 1:
                continue
            gen.add(square_rotation(a, b))
    rotations = {R @ Q for R in gen for Q in rotations_P}
    isometries = rotations | {R @ reflection for R in rotations}
    return _assemble(L, isometries, max_sigma, True, "gaussian",
                     expect_sigma=lambda R: R.den)


def quaternion_rotation(q):
    """Rotation matrix of the integer quaternion ``q = (k, l, m, n)``, exact."""
    k, l, m, n = q
    norm = k * k + l * l + m * m + n * n
    if norm == 0:
        raise ValueError("zero quaternion")
    num = (
        (k*k + l*l - m*m - n*n, 2 * (l*m - k*n), 2 * (l*n + k*m)),
        (2 * (l*m + k*n), k*k - l*l + m*m - n*n, 2 * (m*n - k*l)),
        (2 * (l*n - k*m), 2 * (m*n + k*l), k*k - l*l - m*m + n*n),
    )
    return Isometry._from_int(norm, num)


def odd_part(n):
    while n and n % 2 == 0:
        n //= 2
    return n


def quaternion_sigma(q):
    """Cubic-lattice index of ``R(q)``: the odd part of ``|q|^2``."""
    return odd_part(sum(x * x for x in q))


def _primitive_quaternions(max_norm, odd_only):
    s = isqrt(max_norm)
    rng = range(-s, s + 1)
    for k in rng:
        for l in rng:
            kl = k * k + l * l
            if kl > max_norm:
                continue
            for m in rng:
                klm = kl + m * m
                if klm > max_norm:
                    continue
                for n in rng:
                    norm = klm + n * n
                    if norm == 0 or norm > max_norm or (odd_only and norm % 2 == 0):
                        continue
                    q = (k, l, m, n)
                    # q and -q give the same rotation
                    if next(x for x in q if x) < 0:
                        continue
                    if gcd(gcd(k, l), gcd(m, n)) != 1:
                        continue
                    yield q


def enumerate_cubic(max_sigma, odd_norms_only=True):
    """All coincidence isometries of Z^3 with index at most ``max_sigma``.

    Every class has a representative ``R(q)`` with ``q`` primitive of odd
    norm equal to the index (even-norm quaternions differ from such a ``q``
    by a unit quaternion of the cubic point group).  Pass
    ``odd_norms_only=False`` to scan all norms up to ``4 * max_sigma`` with
    repeated halving instead; both give the same classes.
    """
    L = preset("cubic")
    max_norm = max_sigma if odd_norms_only else 4 * max_sigma
    rots = {}
    for q in _primitive_quaternions(max_norm, odd_norms_only):
        s = quaternion_sigma(q)
        if s <= max_sigma:
            rots.setdefault(quaternion_rotation(q), s)
    # classes contain -I composites, so the O(3) extension is automatic
    # only one rotation per quaternion is generated, not whole cosets, so
    # there are no meaningful raw counts here
    return _assemble(L, rots, max_sigma, True, "quaternion",
                     expect_sigma=lambda R: rots[R], raw_counts=False)


def sphere_points(n, d):
    """Integer vectors of Euclidean norm ``n`` in dimension ``d``."""
    n2 = n * n
    if d == 1:
        return [(n,), (-n,)]
    if d == 2:
        out = []
        for x in range(-n, n + 1):
            r = n2 - x * x
            y = isqrt(r)
            if y * y == r:
                out.append((x, y))
                if y:
                    out.append((x, -y))
        return out
    if d == 3:
        out = []
        for x in range(-n, n + 1):
            rx = n2 - x * x
            t = isqrt(rx)
            for y in range(-t, t + 1):
                r = rx - y * y
                z = isqrt(r)
                if z * z == r:
                    out.append((x, y, z))
                    if z:
                        out.append((x, y, -z))
        return out
    raise ValueError("unsupported dimension")


def orthogonal_matrices(n, d):
    """Integer matrices ``X`` with ``X^T X = n^2 I`` and ``gcd(X, n) = 1``,
    i.e. rational orthogonal matrices of exact denominator ``n``."""
    S = sphere_points(n, d)
    out = []
    if d == 1:
        cands = [((x,),) for (x,) in S]
    elif d == 2:
        cands = []
        for x, y in S:
            cands.append(((x, -y), (y, x)))
            cands.append(((x, y), (y, -x)))
    else:
        cands = []
        for c0 in S:
            for c1 in S:
                if c0[0] * c1[0] + c0[1] * c1[1] + c0[2] * c1[2]:
                    continue
                cr = (c0[1] * c1[2] - c0[2] * c1[1],
                      c0[2] * c1[0] - c0[0] * c1[2],
                      c0[0] * c1[1] - c0[1] * c1[0])
                if any(v % n for v in cr):
                    continue
                c2 = tuple(v // n for v in cr)
                for sgn in (1, -1):
                    cols = (c0, c1, tuple(sgn * v for v in c2))
                    cands.append(tuple(zip(*cols)))
    for X in cands:
        if gcd(linalg.content(X), n) == 1:
            out.append(X)
    return out


DEFAULT_DEN_LIMIT = 60


def enumerate_brute(L, max_den, den_limit=DEFAULT_DEN_LIMIT, max_dim=3):
    """Every isometry whose entries have denominator at most ``max_den``.

    For a rational lattice every rational orthogonal matrix is a coincidence
    isometry, so this enumerates ``OC(L)`` restricted by denominator.  With
    ``e`` the exponent of ``Z^d / M Z^d`` for the integer basis ``M``, an
    isometry of index ``s`` has denominator dividing ``e * s``; the result is
    therefore flagged complete (up to ``max_sigma = max_den``) only when
    ``e == 1``.  The bound is re-checked on every record found.
    """
    if L.dim > max_dim:
        raise ValueError(f"guard exceeded: dim {L.dim} > {max_dim}")
    if max_den > den_limit:
        raise ValueError(f"guard exceeded: max_den {max_den} > {den_limit}")
    isometries = []
    for n in range(1, max_den + 1):
        isometries.extend(Isometry(L.dim, n, X) for X in orthogonal_matrices(n, L.dim))
    e = exponent(L)
    result = _assemble(L, isometries, max_den, e == 1, "brute")
    for rec in result.records:
        dn = rec.R.den
        if dn > e * rec.sigma:
            raise RuntimeError(f"denominator bound violated: den {dn} > {e} * sigma {rec.sigma} for {rec.R}")
    return result


def enumerate_conjugated(L, max_sigma, den_limit=None):
    """Complete coincidence spectrum of ``L = A Z^d`` up to ``max_sigma``.

    ``R`` is a coincidence isometry of ``A Z^d`` iff ``A^-1 R A`` is
    rational, which holds for every rational ``R``; the brute-force search is
    run far enough in the denominator (``exponent * max_sigma``) to be
    complete and then cut back to ``max_sigma``.
    """
    e = exponent(L)
    max_den = e * max_sigma
    if den_limit is None:
        den_limit = max(DEFAULT_DEN_LIMIT, max_den) if L.dim <= 2 else DEFAULT_DEN_LIMIT
    full = enumerate_brute(L, max_den, den_limit=den_limit)
    records = tuple(r for r in full.records if r.sigma <= max_sigma)
    raw = {m: c for m, c in full.raw_counts.items() if m <= max_sigma}
    return EnumerationResult(L, max_sigma, records, True, raw, "conjugated")


def enumerate_lattice(L, max_sigma):
    """Pick the parametrised enumerator when one exists for ``L``."""
    name = preset_name(L)
    if name == "square":
        return enumerate_square(max_sigma)
    if name == "cubic":
        return enumerate_cubic(max_sigma)
    return enumerate_conjugated(L, max_sigma)

