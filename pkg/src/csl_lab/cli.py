"""Command-line front end: ``csl-lab <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 a checked theorem failed.
"""

import argparse
import json
import os
import sys
import tempfile
from itertools import permutations
from pathlib import Path

from . import linalg
from .counting import (check_multiplicative, coprime_pairs, dirichlet_coefficients,
                       euler_product_square, multiplicity_table)
from .csl import csl
from .enumeration import (enumerate_brute, enumerate_conjugated, enumerate_cubic,
                          enumerate_lattice, enumerate_square)
from .isometry import (Isometry, den, make_isometry, point_group, preset_isometry,
                       PRESET_ISOMETRIES)
from .lattice import Lattice, PRESETS, preset, preset_name
from .ssl import g_witness_search, primitive_ssl, ssl_table
from . import theorems

EXIT_OK, EXIT_USAGE, EXIT_THEOREM = 0, 1, 2
SWEEP_CHECKS = {"lemma1": ("lemma1",), "thm2": ("thm2",), "cor3": ("cor3",),
                "tower": ("tower", "fig2"), "lemma6": ("lemma6",)}
CHECKS = sorted(SWEEP_CHECKS) + ["openq", "thm7", "thm8", "thm9"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for theorem failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {v}")
    return v


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from None


def load_lattice(spec):
    if spec is None:
        raise UsageError("--lattice is required")
    if spec in PRESETS:
        return preset(spec)
    if Path(spec).exists():
        obj = _read_json(spec)
        try:
            return Lattice.from_json(obj)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    raise UsageError(f"unknown lattice preset {spec!r} (and no such file); known: {sorted(PRESETS)}")


def load_isometry(spec):
    """Preset name, JSON file, or an inline matrix such as ``3/5,-4/5;4/5,3/5``."""
    try:
        if spec in PRESET_ISOMETRIES:
            return preset_isometry(spec)
        if Path(spec).exists():
            obj = _read_json(spec)
            return Isometry.from_json(obj)
        stem = Path(spec).stem
        if spec.endswith(".json") and stem in PRESET_ISOMETRIES:
            return preset_isometry(stem)
        if "," in spec or ";" in spec or "/" in spec or spec.lstrip("-").isdigit():
            rows = [r.split(",") for r in spec.split(";")]
            return make_isometry(linalg.rat_matrix([[x.strip() for x in r] for r in rows]))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad isometry {spec!r}: {exc}") from None
    raise UsageError(f"unknown isometry preset {spec!r} (and no such file); known: {sorted(PRESET_ISOMETRIES)}")


def _threads():
    raw = os.environ.get("CSL_LAB_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"CSL_LAB_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"CSL_LAB_THREADS must be a positive integer, got {raw!r}")
    return n


def _lattice_label(L):
    return preset_name(L) or L.to_json()


def _write(args, payload, csv_text=None):
    if args.format == "csv":
        if csv_text is None:
            raise UsageError(f"csv output not available for {args.command}")
        text = csv_text
    else:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if not args.output:
        sys.stdout.write(text)
        return
    target = Path(args.output)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _meta(args, **extra):
    meta = {"command": args.command, "seed": args.seed, "threads": _threads()}
    meta.update(extra)
    return meta


def _need(args, name):
    v = getattr(args, name)
    if v is None:
        raise UsageError(f"--{name.replace('_', '-')} is required for {args.command}")
    return v


def cmd_sigma(args):
    L = load_lattice(args.lattice)
    R = load_isometry(_need(args, "isometry"))
    rec = csl(L, R)
    out = rec.to_json()
    out["den"] = den(L, R)
    _write(args, {"meta": _meta(args), "result": out},
           f"sigma,den\n{rec.sigma},{out['den']}\n")
    return EXIT_OK


def _enumerate(L, N, method):
    if method == "auto":
        return enumerate_lattice(L, N)
    if method == "square":
        if preset_name(L) != "square":
            raise UsageError("the gaussian method only applies to the square lattice")
        return enumerate_square(N)
    if method == "cubic":
        if preset_name(L) != "cubic":
            raise UsageError("the quaternion method only applies to the cubic lattice")
        return enumerate_cubic(N)
    if method == "brute":
        return enumerate_brute(L, N)
    return enumerate_conjugated(L, N)


def cmd_enumerate(args):
    L = load_lattice(args.lattice)
    N = args.max_sigma or args.max_den
    if N is None:
        raise UsageError("--max-sigma (or --max-den for the brute method) is required")
    res = _enumerate(L, N, args.method)
    csv = "sigma,isometry,class_rep\n" + "".join(
        f"{r.sigma},{_inline(r.R)},{_inline(r.sym_class.representative)}\n" for r in res.records)
    _write(args, {"meta": _meta(args), "result": res.to_json()}, csv)
    return EXIT_OK


def _inline(R):
    return ";".join(" ".join(linalg.fraction_str(x) for x in row) for row in R.mat)


def cmd_count(args):
    L = load_lattice(args.lattice)
    N = _need(args, "max_index")
    table = multiplicity_table(_enumerate(L, N, args.method), point_group(L))
    result = table.to_json()
    result["witnesses"] = {w: [x.to_json() for x in check_multiplicative(table, w)]
                           for w in ("f_iso", "f_rot", "f")}
    _write(args, {"meta": _meta(args), "result": result}, table.to_csv())
    return EXIT_OK


def cmd_series(args):
    L = load_lattice(args.lattice)
    N = _need(args, "terms")
    table = multiplicity_table(enumerate_lattice(L, N), point_group(L))
    data = dirichlet_coefficients(table, "f")
    result = {"dirichlet": data.to_json()}
    if preset_name(L) == "square":
        euler = euler_product_square(N)
        result["euler_product"] = euler.to_json()
        result["euler_agrees"] = euler.coefficients == data.coefficients
    csv = "m,f\n" + "".join(f"{m},{c}\n" for m, c in sorted(data.coefficients.items()))
    _write(args, {"meta": _meta(args), "result": result}, csv)
    if result.get("euler_agrees") is False:
        return EXIT_THEOREM
    return EXIT_OK


def _thm7_report(L, pool):
    """Multiplicativity of f in range must coincide with every composite
    CSL splitting into prime-power CSLs; found splittings must be unique."""
    table = multiplicity_table(pool, point_group(L))
    multiplicative = not check_multiplicative(table, "f")
    undecomposed, failures, tested = [], [], 0
    for rec in pool.records:
        if len(theorems.prime_power_parts(rec.sigma)) < 2:
            continue
        tested += 1
        dec = theorems.decompose_csl(L, rec, pool)
        if dec is None:
            undecomposed.append(rec.sigma)
        elif not dec.unique:
            failures.append({"sigma": rec.sigma, "reason": "decomposition not unique"})
    if multiplicative == bool(undecomposed):
        failures.append({"reason": "multiplicativity and decomposability disagree",
                         "f_multiplicative": multiplicative,
                         "undecomposed_indices": sorted(set(undecomposed))})
    return {"f_multiplicative": multiplicative, "pairs_tested": tested,
            "undecomposed_indices": sorted(set(undecomposed)), "failures": failures}


def _thm8_report(L, pool):
    """With f_iso multiplicative in range, every isometry of composite index
    has a pi-decomposition for every ordering of its primes."""
    table = multiplicity_table(pool, point_group(L))
    iso_mult = not check_multiplicative(table, "f_iso")
    missing, failures, tested = [], [], 0
    for rec in pool.records:
        primes = sorted(theorems.prime_power_parts(rec.sigma))
        if len(primes) < 2:
            continue
        for pi in permutations(primes):
            tested += 1
            dec = theorems.pi_decompose(L, rec.R, pi, pool)
            if dec is None:
                missing.append({"sigma": rec.sigma, "pi": list(pi)})
            elif not dec.unique:
                failures.append({"sigma": rec.sigma, "pi": list(pi), "reason": "not unique up to P"})
    if iso_mult and missing:
        failures.extend(dict(m, reason="no decomposition") for m in missing)
    return {"f_iso_multiplicative": iso_mult, "pairs_tested": tested,
            "missing": missing, "failures": failures}


def _family(args):
    if args.lattice:
        return [load_lattice(args.lattice)]
    return [preset(n) for n in ("square", "cubic", "2zx3z", "zx5z")]


def cmd_check(args):
    N = _need(args, "range")
    name = args.theorem
    if name in ("thm9", "openq"):
        lattices = _family(args)
        fn = theorems.theorem9_check if name == "thm9" else theorems.open_question_experiment
        report = fn(lattices, N)
        report.setdefault("theorem", name)
        reports = [report]
    else:
        L = load_lattice(args.lattice or "square")
        pool = enumerate_lattice(L, N)
        if name in SWEEP_CHECKS:
            sweep = theorems.theorem_sweep(L, pool, twisted=args.twisted)
            reports = [sweep[k] for k in SWEEP_CHECKS[name]]
            if name == "tower" and L.dim == 3:
                reports.append({"theorem": "order-warning", "lattice": _lattice_label(L),
                                "range": N, "instance": theorems.find_order_warning(L, pool),
                                "pairs_tested": None, "failures": []})
        else:
            body = (_thm7_report if name == "thm7" else _thm8_report)(L, pool)
            reports = [dict(body, theorem=name, lattice=_lattice_label(L), range=N)]
    failed = any(r["failures"] for r in reports)
    _write(args, {"meta": _meta(args), "reports": reports})
    return EXIT_THEOREM if failed else EXIT_OK


def cmd_decompose(args):
    L = load_lattice(args.lattice)
    R = load_isometry(_need(args, "isometry"))
    rec = csl(L, R)
    pool = enumerate_lattice(L, max(rec.sigma, 1))
    target = next((r for r in pool.records if r.sym_class == rec.sym_class), rec)
    dec = theorems.decompose_csl(L, target, pool)
    result = {"sigma": rec.sigma, "csl_decomposition": dec.to_json() if dec else None}
    if args.pi:
        try:
            pi = [int(p) for p in args.pi.split(",")]
        except ValueError:
            raise UsageError(f"--pi must be a comma-separated list of primes, got {args.pi!r}") from None
        if len(set(pi)) != len(pi):
            raise UsageError("--pi must not repeat a prime")
        pd = theorems.pi_decompose(L, R, pi, pool)
        result["pi_decomposition"] = pd.to_json() if pd else None
    _write(args, {"meta": _meta(args), "result": result})
    return EXIT_OK


def cmd_ssl(args):
    L = load_lattice(args.lattice)
    N = _need(args, "max_index")
    if args.action == "count":
        table = ssl_table(L, N)
        _write(args, {"meta": _meta(args), "result": table.to_json()}, table.to_csv())
        return EXIT_OK
    ceiling = args.ceiling or N
    if ceiling < N:
        raise UsageError("--ceiling must be at least --max-index")
    search = g_witness_search(L, start=N, ceiling=ceiling)
    sup = search["super_violation"]
    failures = [sup.to_json()] if sup else []
    den_checked = 0
    if args.max_sigma:
        for rec in enumerate_lattice(L, args.max_sigma).records:
            try:
                primitive_ssl(L, rec.R)
            except RuntimeError as exc:
                failures.append({"isometry": rec.R.to_json(), "reason": str(exc)})
            den_checked += 1
    table = multiplicity_table(enumerate_lattice(L, search["range"]), point_group(L))
    report = {"theorem": "ssl", "lattice": _lattice_label(L), "range": search["range"],
              "tried": search["tried"],
              "g_witnesses": [w.to_json() for w in search["witnesses"]],
              "f_witnesses": [w.to_json() for w in check_multiplicative(table, "f")],
              "den_power_checked": den_checked,
              "pairs_tested": sum(1 for _ in coprime_pairs(search["range"])),
              "failures": failures}
    _write(args, {"meta": _meta(args), "reports": [report]})
    return EXIT_THEOREM if failures else EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lattice", help="preset name or path to lattice JSON")
    common.add_argument("--output", help="write here (atomically) instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=_nonneg, default=0,
                        help="recorded in the output header; all sweeps are exhaustive")

    p = _Parser(prog="csl-lab", description="Coincidence site lattice laboratory.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sigma", parents=[common], help="index and CSL of one isometry")
    s.add_argument("--isometry")
    s.set_defaults(func=cmd_sigma)

    s = sub.add_parser("enumerate", parents=[common], help="all classes up to an index")
    s.add_argument("--max-sigma", type=_positive)
    s.add_argument("--max-den", type=_positive)
    s.add_argument("--method", choices=("auto", "square", "cubic", "brute", "conjugated"), default="auto")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("count", parents=[common], help="f_iso, f_rot, f table")
    s.add_argument("--max-index", type=_positive)
    s.add_argument("--method", choices=("auto", "square", "cubic", "conjugated"), default="auto")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("series", parents=[common], help="Dirichlet coefficients of f")
    s.add_argument("--terms", type=_positive)
    s.set_defaults(func=cmd_series)

    s = sub.add_parser("check", parents=[common], help="run a theorem check")
    s.add_argument("theorem", choices=CHECKS)
    s.add_argument("--range", type=_positive)
    s.add_argument("--twisted", action="store_true",
                   help="literal point-group twist loop (redundant, |P| times slower)")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("decompose", parents=[common], help="prime-power decompositions")
    s.add_argument("--isometry")
    s.add_argument("--pi", help="ordering of primes, e.g. 5,13")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("ssl", parents=[common], help="similar sublattices")
    s.add_argument("action", choices=("count", "check"))
    s.add_argument("--max-index", type=_positive)
    s.add_argument("--ceiling", type=_positive, help="escalation ceiling for the g witness search")
    s.add_argument("--max-sigma", type=_positive, help="also check den^d on isometries up to this index")
    s.set_defaults(func=cmd_ssl)
    return p


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"csl-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # guard rails and malformed input surface as ValueError from the library
        print(f"csl-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
