"""Executable checks of the index, decomposition and multiplicativity results.

Each check is a pure function of a lattice and a few isometries.  The
``*_sweep`` helpers run them over every pair drawn from a complete
enumeration and collect failures; a failure of a proved statement is a bug
somewhere in this package.
"""

from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations, product
from math import gcd, prod

from sympy import factorint

from .counting import check_multiplicative, multiplicity_table
from .csl import csl_lattice, mcsl, MCSLRecord, sigma
from .enumeration import enumerate_lattice
from .isometry import identity_isometry, point_group, symmetry_class
from .lattice import index, intersect, lattice_sum, preset_name, scale, transform


class PreconditionError(ValueError):
    pass


def _require_coprime(m, n):
    if gcd(m, n) != 1:
        raise PreconditionError(f"precondition: indices {m} and {n} are not coprime")


def check_divisibility(L, R1, R2):
    """Sigma(R1 R2) divides Sigma(R1) Sigma(R2)."""
    return (sigma(L, R1) * sigma(L, R2)) % sigma(L, R1 @ R2) == 0


def check_coprime_multiplicativity(L, R1, R2):
    m, n = sigma(L, R1), sigma(L, R2)
    _require_coprime(m, n)
    return sigma(L, R1 @ R2) == m * n


def check_intersection_identity(L, R1, R2):
    """Gamma(R1 R2) = Gamma ∩ R1 Gamma ∩ R1 R2 Gamma = Gamma(R1) ∩ R1 Gamma(R2)."""
    _require_coprime(sigma(L, R1), sigma(L, R2))
    R12 = R1 @ R2
    C12 = csl_lattice(L, R12)
    triple = intersect(intersect(L, transform(L, R1)), transform(L, R12))
    split = intersect(csl_lattice(L, R1), transform(csl_lattice(L, R2), R1.mat))
    return C12 == triple == split


TOWER_NODES = ("G", "R1G", "R1R2G", "G(R1)", "R1G(R2)", "G(R1R2)",
               "G(R1)+G(R1R2)", "G(R1)+R1G(R2)", "R1G(R2)+G(R1R2)", "G∩R1G∩R1R2G")


@dataclass(frozen=True)
class TowerReport:
    """Every node of the two-step CSL diagram and its edge bookkeeping.

    ``d`` and ``k`` are read off two edges (``d = [R1G : G(R1)+R1G(R2)]``,
    ``k = [G(R1)+G(R1R2) : G(R1)]``); every other edge label is then an
    assertion.  ``failed_edges`` lists ``(upper, lower, expected, actual)``.
    """

    lattices: dict
    m: int
    n: int
    d: int
    k: int
    consistent: bool
    failed_edges: list = field(default_factory=list)

    def to_json(self):
        return {"m": self.m, "n": self.n, "d": self.d, "k": self.k,
                "consistent": self.consistent,
                "failed_edges": [list(map(str, e)) for e in self.failed_edges],
                "lattices": {k: v.to_json() for k, v in self.lattices.items()}}


def _edges(m, n, d, k):
    # (upper, lower, numerator, denominator): [upper : lower] * den == num
    return [
        ("G", "G(R1)+G(R1R2)", m, k),
        ("G(R1)+G(R1R2)", "G(R1R2)", n, d),
        ("G(R1)+G(R1R2)", "G(R1)", k, 1),
        ("R1G", "G(R1)+R1G(R2)", d, 1),
        ("G(R1)+R1G(R2)", "G(R1)", m, d),
        ("G(R1)+R1G(R2)", "R1G(R2)", n, d),
        ("R1R2G", "R1G(R2)+G(R1R2)", n, k),
        ("R1G(R2)+G(R1R2)", "R1G(R2)", k, 1),
        ("R1G(R2)+G(R1R2)", "G(R1R2)", m, d),
        ("G", "G(R1R2)", m * n, d * k),
        ("G", "G(R1)", m, 1),
        ("R1G", "G(R1)", m, 1),
        ("R1G", "R1G(R2)", n, 1),
        ("R1R2G", "R1G(R2)", n, 1),
        ("R1R2G", "G(R1R2)", m * n, d * k),
        ("G(R1)", "G∩R1G∩R1R2G", n, d),
        ("R1G(R2)", "G∩R1G∩R1R2G", m, d),
        ("G(R1R2)", "G∩R1G∩R1R2G", k, 1),
    ]


def build_tower(L, R1, R2):
    R12 = R1 @ R2
    G, R1G, R12G = L, transform(L, R1), transform(L, R12)
    C1 = intersect(G, R1G)
    R1C2 = intersect(R1G, R12G)
    C12 = intersect(G, R12G)
    nodes = {
        "G": G, "R1G": R1G, "R1R2G": R12G,
        "G(R1)": C1, "R1G(R2)": R1C2, "G(R1R2)": C12,
        "G(R1)+G(R1R2)": lattice_sum(C1, C12),
        "G(R1)+R1G(R2)": lattice_sum(C1, R1C2),
        "R1G(R2)+G(R1R2)": lattice_sum(R1C2, C12),
        "G∩R1G∩R1R2G": intersect(C1, R12G),
    }
    m = index(C1, G)
    n = index(R1C2, R1G)
    d = index(nodes["G(R1)+R1G(R2)"], R1G)
    k = index(C1, nodes["G(R1)+G(R1R2)"])
    failed = []
    if R1C2 != transform(csl_lattice(L, R2), R1.mat):
        failed.append(("R1G(R2)", "R1·csl(R2)", "equal", "different"))
    for upper, lower, num, den in _edges(m, n, d, k):
        try:
            actual = index(nodes[lower], nodes[upper])
        except ValueError:
            failed.append((upper, lower, f"{num}/{den}", "not a sublattice"))
            continue
        if actual * den != num:
            failed.append((upper, lower, f"{num}/{den}", actual))
    return TowerReport(nodes, m, n, d, k, not failed, failed)


def fig2_collapse(L, R1, R2):
    """For coprime indices: Gamma(R1) + R1 Gamma(R2) = R1 Gamma and
    Gamma(R1) ∩ R1 Gamma(R2) = Gamma(R1 R2)."""
    _require_coprime(sigma(L, R1), sigma(L, R2))
    R1G = transform(L, R1)
    C1 = csl_lattice(L, R1)
    R1C2 = transform(csl_lattice(L, R2), R1.mat)
    return lattice_sum(C1, R1C2) == R1G and intersect(C1, R1C2) == csl_lattice(L, R1 @ R2)


def check_recovery(L, R, S):
    """Recover Gamma(R) and Gamma(S) from Gamma(RS) by intersecting with
    similar sublattices.  Two scalars are tested for the second identity."""
    m, n = sigma(L, R), sigma(L, S)
    _require_coprime(m, n)
    CRS = csl_lattice(L, R @ S)
    first = intersect(scale(L, n), CRS) == scale(csl_lattice(L, R), n)
    RG = transform(L, R)
    RCS = transform(csl_lattice(L, S), R.mat)
    lhs = intersect(scale(RG, m), CRS)
    return {"first": first,
            "second_m": lhs == scale(RCS, m),
            "second_n": lhs == scale(RCS, n)}


def prime_power_parts(s):
    return {p: p ** e for p, e in factorint(s).items()}


def _require_pool(pool, s):
    if not pool.complete or pool.max_sigma < s:
        raise ValueError(f"incomplete pool: need a complete enumeration up to {s}, "
                         f"have max_sigma={pool.max_sigma} complete={pool.complete}")


@dataclass(frozen=True)
class CSLDecomposition:
    target: object
    parts: tuple
    exact: bool
    unique: bool

    def to_json(self):
        return {"target": self.target.to_json(), "exact": self.exact, "unique": self.unique,
                "parts": [r.to_json() for r in self.parts]}


def decompose_csl(L, target, pool):
    """Write the CSL of ``target`` as an intersection of CSLs of prime-power
    index for distinct primes, searching ``pool`` exhaustively."""
    _require_pool(pool, target.sigma)
    parts = prime_power_parts(target.sigma)
    if len(parts) <= 1:
        return CSLDecomposition(target.csl, (target,), True, True)
    options = []
    for q in parts.values():
        seen = {}
        for rec in pool.records:
            # a constituent must contain the target
            if rec.sigma == q and rec.csl not in seen and intersect(rec.csl, target.csl) == target.csl:
                seen[rec.csl] = rec
        if not seen:
            return None
        options.append(list(seen.values()))
    solutions = [combo for combo in product(*options)
                 if reduce(intersect, (r.csl for r in combo)) == target.csl]
    if not solutions:
        return None
    return CSLDecomposition(target.csl, tuple(solutions[0]), True, len(solutions) == 1)


def decompose_mcsl(L, Rs, pool):
    """Split the MCSL of ``Rs`` into MCSLs of order at most ``len(Rs)`` with
    prime-power indices for distinct primes; ``None`` if impossible."""
    M = mcsl(L, Rs)
    _require_pool(pool, M.sigma_multi)
    parts = prime_power_parts(M.sigma_multi)
    if len(parts) <= 1:
        return [M]
    order = len(M.isometries)
    options = []
    for p, q in parts.items():
        csls = {}
        for rec in pool.records:
            s = rec.sigma
            if q % s == 0 and prime_power_parts(s).keys() <= {p} and s > 1 \
                    and rec.csl not in csls and intersect(rec.csl, M.mcsl) == M.mcsl:
                csls[rec.csl] = rec
        found = {}
        for size in range(1, order + 1):
            for combo in combinations(csls.values(), size):
                lat = reduce(intersect, (r.csl for r in combo))
                if lat not in found and index(lat, L) == q:
                    found[lat] = MCSLRecord(tuple(r.R for r in combo), lat, q)
        if not found:
            return None
        options.append(list(found.values()))
    for combo in product(*options):
        if reduce(intersect, (r.mcsl for r in combo)) == M.mcsl:
            return list(combo)
    return None


@dataclass(frozen=True)
class PiDecomposition:
    ordering: tuple
    factors: tuple
    target: object
    unique: bool

    def to_json(self):
        return {"ordering": list(self.ordering), "unique": self.unique,
                "target": self.target.to_json(),
                "factors": [R.to_json() for R in self.factors]}


def pi_decompose(L, R, pi, pool):
    """Factor ``R = R_1 ... R_n`` with ``Sigma(R_i)`` a power of ``pi[i]``.

    Each factor is drawn from the pool's classes twisted by every point-group
    element.  ``unique`` reports whether all solutions agree up to the point
    group, i.e. every partial product ``R_1 ... R_i`` lies in one coset.
    """
    s = sigma(L, R)
    _require_pool(pool, s)
    pi = tuple(pi)
    parts = prime_power_parts(s)
    missing = set(parts) - set(pi)
    if missing:
        raise ValueError(f"ordering does not cover primes {sorted(missing)}")
    targets = [parts.get(p, 1) for p in pi]
    P = point_group(L)
    by_sigma = pool.by_sigma()
    ident = identity_isometry(L.dim)
    solutions = []

    def rec(i, X, factors):
        rest = prod(targets[i:])
        if i == len(pi) - 1:
            if sigma(L, X) == targets[i]:
                solutions.append(factors + [X])
            return
        if targets[i] == 1:
            rec(i + 1, X, factors + [ident])
            return
        for r in by_sigma.get(targets[i], []):
            for Q in P.elements:
                F = r.R @ Q
                Y = F.inverse() @ X
                if sigma(L, Y) == rest // targets[i]:
                    rec(i + 1, Y, factors + [F])

    rec(0, R, [])
    if not solutions:
        return None
    first = solutions[0]
    assert reduce(lambda a, b: a @ b, first) == R

    def partial_classes(fs):
        out, acc = [], fs[0]
        out.append(symmetry_class(acc, P))
        for F in fs[1:-1]:
            acc = acc @ F
            out.append(symmetry_class(acc, P))
        return tuple(out)

    unique = len({partial_classes(fs) for fs in solutions}) == 1
    return PiDecomposition(pi, tuple(first), R, unique)


def twisted_pairs(L, pool, max_sigma=None, twisted=False):
    """Ordered pairs ``(R1, R2)`` of class representatives.

    Every check depends on ``R2`` only through ``R2 L``, and right factors
    from P leave that unchanged.  Left twists ``Q R2`` by the point group
    therefore only move ``R2`` to another class, and iterating over all
    class pairs already covers every twisted pair.  ``twisted=True`` runs the
    literal ``(R1, Q R2)`` loop instead, which is ``|P|`` times longer.
    """
    P = point_group(L)
    recs = [r for r in pool.records if max_sigma is None or r.sigma <= max_sigma]
    twists = P.elements if twisted else (identity_isometry(L.dim),)
    for r1 in recs:
        for r2 in recs:
            for Q in twists:
                yield r1.R, Q @ r2.R


def theorem_sweep(L, pool, max_sigma=None, twisted=False):
    """Run the index, tower and recovery checks over every twisted pair.

    Returns ``{name: report}``; each report holds the theorem name, lattice,
    range, number of pairs tested and a list of failures.  The recovery
    report also names which scalar reading of the second identity held on
    every coprime pair.
    """
    rng = pool.max_sigma if max_sigma is None else max_sigma
    lat = preset_name(L) or L.to_json()
    names = ("lemma1", "thm2", "cor3", "tower", "fig2", "lemma6")
    reports = {k: {"theorem": k, "lattice": lat, "range": rng, "pairs_tested": 0,
                   "failures": []} for k in names}
    readings = {"m": True, "n": True}
    for R1, R2 in twisted_pairs(L, pool, max_sigma, twisted):
        m, n = sigma(L, R1), sigma(L, R2)
        pair = [R1.to_json()["mat"], R2.to_json()["mat"]]
        reports["lemma1"]["pairs_tested"] += 1
        if not check_divisibility(L, R1, R2):
            reports["lemma1"]["failures"].append(pair)
        reports["tower"]["pairs_tested"] += 1
        tower = build_tower(L, R1, R2)
        if not tower.consistent:
            reports["tower"]["failures"].append({"pair": pair, "edges": [list(map(str, e)) for e in tower.failed_edges]})
        if gcd(m, n) != 1:
            continue
        for key, check in (("thm2", check_coprime_multiplicativity),
                           ("cor3", check_intersection_identity),
                           ("fig2", fig2_collapse)):
            reports[key]["pairs_tested"] += 1
            if not check(L, R1, R2):
                reports[key]["failures"].append(pair)
        if tower.d != 1 or tower.k != 1:
            reports["fig2"]["failures"].append({"pair": pair, "d": tower.d, "k": tower.k})
        reports["lemma6"]["pairs_tested"] += 1
        rec = check_recovery(L, R1, R2)
        if not rec["first"]:
            reports["lemma6"]["failures"].append({"pair": pair, "identity": "first"})
        readings["m"] &= rec["second_m"]
        readings["n"] &= rec["second_n"]
    holding = [k for k, ok in readings.items() if ok]
    reports["lemma6"]["second_identity_reading"] = holding
    if len(holding) != 1:
        reports["lemma6"]["failures"].append({"identity": "second", "readings_holding": holding})
    return reports


def _rotation_member(R, P):
    if R.det == 1:
        return R
    refl = next((Q for Q in P.elements if Q.det == -1), None)
    return None if refl is None else R @ refl


def find_order_warning(L, pool, max_sigma=None, rotations_only=True):
    """Look for ``R = R1 R2`` with coprime indices where
    Gamma(R) != Gamma(R1) ∩ Gamma(R2).  With ``rotations_only`` both factors
    are taken as the rotation members of their classes.  Returns the first
    instance or None."""
    P = point_group(L)
    for R1, R2 in twisted_pairs(L, pool, max_sigma):
        if rotations_only:
            R1, R2 = _rotation_member(R1, P), _rotation_member(R2, P)
            if R1 is None or R2 is None:
                continue
        m, n = sigma(L, R1), sigma(L, R2)
        if m == 1 or n == 1 or gcd(m, n) != 1:
            continue
        if csl_lattice(L, R1 @ R2) != intersect(csl_lattice(L, R1), csl_lattice(L, R2)):
            return {"R1": R1.to_json(), "R2": R2.to_json(), "sigma": [m, n],
                    "commute": R1 @ R2 == R2 @ R1}
    return None


def multiplicativity_status(table):
    return {w: not check_multiplicative(table, w) for w in ("f_iso", "f_rot", "f")}


def open_question_experiment(lattices, N):
    """Look for a lattice whose f is multiplicative in range while f_iso is
    not.  ``N`` is an int or a per-lattice list of ranges.  No flag means
    nothing was found in range, which settles nothing."""
    ranges = N if isinstance(N, (list, tuple)) else [N] * len(lattices)
    rows = []
    for L, n in zip(lattices, ranges):
        pool = enumerate_lattice(L, n)
        status = multiplicativity_status(multiplicity_table(pool, point_group(L)))
        rows.append({"lattice": preset_name(L) or L.to_json(), "range": n,
                     "f_multiplicative": status["f"],
                     "f_iso_multiplicative": status["f_iso"],
                     "flag": status["f"] and not status["f_iso"]})
    # an open question cannot fail, so failures stays empty whatever is found
    return {"theorem": "openq", "question": "f multiplicative but f_iso not?", "rows": rows,
            "lattices": [r["lattice"] for r in rows], "range": list(ranges),
            "pairs_tested": len(rows), "failures": [],
            "any_flag": any(r["flag"] for r in rows),
            "note": "no flag means no counterexample in the tested ranges only"}


def theorem9_check(lattices, N):
    """f_iso multiplicative in range must imply f multiplicative in range."""
    ranges = N if isinstance(N, (list, tuple)) else [N] * len(lattices)
    failures = []
    for L, n in zip(lattices, ranges):
        pool = enumerate_lattice(L, n)
        status = multiplicativity_status(multiplicity_table(pool, point_group(L)))
        if status["f_iso"] and not status["f"]:
            failures.append(preset_name(L) or L.to_json())
    return {"theorem": "thm9", "lattices": [preset_name(L) or L.to_json() for L in lattices],
            "range": list(ranges), "pairs_tested": len(lattices), "failures": failures}
