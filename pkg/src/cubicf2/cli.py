"""Command-line front end: census, automorphisms, smoothness, Jordan constants
and the ``verify`` suites."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from functools import cached_property
from pathlib import Path

import numpy as np

from . import __version__
from .checks import Check, CheckFailed

SUITES = ("thm1.2", "thm2.1", "example2.2", "prop3.1", "lemmaA1", "lemmaA2", "corA3")


class Context:
    """Lazily built shared objects so suites in one run reuse each other's work."""

    def __init__(self, cache=None, threads: int = 1, verify_pgl3_f8: bool = False):
        self.cache = cache
        self.threads = threads
        self.verify_pgl3_f8 = verify_pgl3_f8

    @cached_property
    def census(self):
        from .census import run_census

        return run_census(self.cache, threads=self.threads)

    @cached_property
    def pgl4(self):
        from .gf2k import field
        from .groups import pgl

        return pgl(4, field(1))

    @cached_property
    def aut1(self):
        from .forms import s6_form
        from .groups import stabilizer

        return stabilizer(self.pgl4, s6_form())


def _t(name, fn, expected, passed=None) -> Check:
    t = time.perf_counter()
    value = fn()
    ok = (value == expected) if passed is None else passed(value)
    return Check(name, bool(ok), value, expected, time.perf_counter() - t)


def _s6_iso(ctx: Context) -> Check:
    from .recognize import is_isomorphic, symmetric_group

    t = time.perf_counter()
    w = is_isomorphic(ctx.aut1, symmetric_group(6))
    ok = w is not None and w.verified
    return Check("Aut(form 1) isomorphic to S6 (verified witness)", ok,
                 "witness" if ok else "none", "witness", time.perf_counter() - t)


def suite_thm12(ctx: Context) -> list[Check]:
    from .jordan import jordan_constant

    out = []
    for q in (2, 4, 8):
        rep = jordan_constant(q, census=ctx.census if q == 2 else None,
                              verify_pgl3_f8=ctx.verify_pgl3_f8)
        out.extend(replace(c, name=f"q={q}: {c.name}") for c in rep.checks)
    return out


def suite_thm21(ctx: Context) -> list[Check]:
    from .jordan import gcd_checks

    t = time.perf_counter()
    census = ctx.census
    load = time.perf_counter() - t
    out = [replace(c) for c in census.checks]
    if out:
        out[0] = replace(out[0], seconds=out[0].seconds + load)
    out.append(_s6_iso(ctx))
    out.extend(gcd_checks())
    return out


def suite_example22(ctx: Context) -> list[Check]:
    from .forms import contains_line, s6_form
    from .groups import OMEGA, symplectic_group
    from .idealtest import is_smooth
    from .gf2k import field
    from .projspace import LINE_XY, LINE_ZT, are_skew

    f = s6_form()
    out = []
    t = time.perf_counter()
    sp = symplectic_group(OMEGA, ctx.pgl4)
    out.append(Check("{g : g^T Omega g = Omega} has 720 elements", sp.order == 720, sp.order, 720,
                     time.perf_counter() - t))
    same = np.array_equal(sp._sorted, ctx.aut1._sorted)
    out.append(Check("symplectic group equals Stab(form 1) as a set", same, same, True))
    out.append(_s6_iso(ctx))
    out.append(_t("form 1 is smooth", lambda: is_smooth(f).smooth, True))
    out.append(_t("line x=y=0 lies on the surface", lambda: contains_line(f, LINE_XY), True))
    out.append(_t("line z=t=0 lies on the surface", lambda: contains_line(f, LINE_ZT), True))
    out.append(_t("the two lines are skew", lambda: are_skew(LINE_XY, LINE_ZT, field(1)), True))
    return out


def suite_prop31(ctx: Context) -> list[Check]:
    from .jordan import pgl3, wps_aut, wps_aut_enumerate

    out = []
    for q in (2, 4):
        out.append(_t(f"Aut P(1,1,2) over F{q} by enumeration = q^4(q-1)^2(q+1)",
                      lambda q=q: wps_aut_enumerate(q), wps_aut(q)))
    for q in (2, 4, 8):
        b = 2 * wps_aut(q)
        out.append(Check(f"2|Aut P(1,1,2)| < |PGL3(F{q})|", b < pgl3(q), b, f"< {pgl3(q)}"))
    return out


def suite_lemma_a1(ctx: Context) -> list[Check]:
    from .census import fifteen_point_analysis
    from .gf2k import field
    from .projspace import enumerate_lines, enumerate_points

    census = ctx.census
    out = [
        _t("points of P^3(F2)", lambda: len(enumerate_points(3, field(1))), 15),
        _t("lines of P^3(F2)", lambda: len(enumerate_lines(field(1))), 35),
    ]
    out.extend(fifteen_point_analysis(census.partition, census.records, raise_on_failure=False))
    out.extend(replace(c) for c in census.checks if c.name.startswith("aut_order"))
    return out


def suite_lemma_a2(ctx: Context) -> list[Check]:
    from .recognize import uniqueness_certificates

    return uniqueness_certificates(ctx.aut1, raise_on_failure=False)


def suite_cor_a3(ctx: Context) -> list[Check]:
    from .census import s6_orbit_check
    from .forms import fermat_form, s6_form, vanishing_matrix

    census = ctx.census
    out = [_t("S6 automorphisms <=> smooth and through all 15 points",
              lambda: s6_orbit_check(census.partition, census.records, ctx.pgl4), True)]
    by_rep = {r.rep: r for r in census.records}
    for label, f, all15, is720 in (("Fermat", fermat_form(), False, False),
                                   ("form 1", s6_form(), True, True)):
        rec = by_rep[census.partition.root(f.word)]
        through = bool(vanishing_matrix(np.array([f.word], dtype=np.uint32)).all())
        out.append(Check(f"{label}: vanishes on all 15 points", through == all15, through, all15))
        out.append(Check(f"{label}: aut_order {'=' if is720 else '!='} 720",
                         (rec.aut_order == 720) == is720, rec.aut_order,
                         720 if is720 else "!= 720"))
    return out


RUNNERS = {
    "thm1.2": suite_thm12,
    "thm2.1": suite_thm21,
    "example2.2": suite_example22,
    "prop3.1": suite_prop31,
    "lemmaA1": suite_lemma_a1,
    "lemmaA2": suite_lemma_a2,
    "corA3": suite_cor_a3,
}


def run_suite(suite: str, ctx: Context | None = None) -> list[Check]:
    ctx = ctx or Context()
    if suite == "all":
        out = []
        for s in SUITES:
            out.extend(replace(c, name=f"{s}: {c.name}") for c in RUNNERS[s](ctx))
        return out
    if suite not in RUNNERS:
        raise ValueError(f"unknown suite {suite!r}")
    return RUNNERS[suite](ctx)


def report(suite: str, checks: list[Check], timings: bool = True) -> dict:
    ok = all(c.passed for c in checks)
    return {
        "version": __version__,
        "suite": suite,
        "checks": [c.as_json(timings) for c in checks],
        "pass": ok,
    }


def _dump(doc: dict, path) -> None:
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# -- subcommands -----------------------------------------------------

def cmd_verify(args) -> int:
    ctx = Context(args.cache, args.threads, args.verify_pgl3_f8)
    checks = run_suite(args.suite, ctx)
    for c in checks:
        print(c.line())
    doc = report(args.suite, checks, timings=not args.no_timings)
    print(f"suite {args.suite}: {'PASS' if doc['pass'] else 'FAIL'} "
          f"({sum(c.passed for c in checks)}/{len(checks)})")
    if args.json:
        _dump(doc, args.json)
    return 0 if doc["pass"] else 1


def cmd_classify(args) -> int:
    from .census import fifteen_point_analysis, run_census

    census = run_census(args.cache, threads=args.threads)
    census.checks = census.checks + fifteen_point_analysis(
        census.partition, census.records, raise_on_failure=False)
    doc = {"version": __version__, "suite": "classify-cubics"}
    doc.update(census.as_json(timings=not args.no_timings))
    ok = all(c.passed for c in census.checks)
    doc["pass"] = ok
    for c in census.checks:
        print(c.line())
    t = census.totals()
    print(f"{t['orbits']} orbits, {t['smooth_orbits']} smooth; max smooth aut_order "
          f"{census.max_aut.aut_order} at {census.max_aut.rep:05x}")
    if args.json:
        _dump(doc, args.json)
    return 0 if ok else 1


def _parse_form(text: str):
    from .forms import CubicForm

    try:
        f = CubicForm.from_hex(text)
    except ValueError as e:
        raise SystemExit(_usage_error(str(e)))
    if f.is_zero():
        raise SystemExit(_usage_error("the zero form defines no surface"))
    return f


def _usage_error(msg: str) -> int:
    print(f"cubicf2: error: {msg}", file=sys.stderr)
    return 2


def cmd_aut(args) -> int:
    from .groups import stabilizer

    f = _parse_form(args.form)
    g = stabilizer(Context().pgl4, f)
    doc = {"version": __version__, "form": f.hex(), "equation": str(f), "aut_order": str(g.order)}
    if args.elements:
        doc["elements"] = [g.element(i).hex() for i in range(g.order)]
    _dump(doc, args.json)
    return 0


def cmd_smooth(args) -> int:
    from .idealtest import OracleConflict, is_smooth

    f = _parse_form(args.form)
    try:
        verdict = is_smooth(f, method=args.method, kmax=args.kmax)
    except OracleConflict as e:
        print(f"cubicf2: oracle conflict: {e}", file=sys.stderr)
        return 1
    doc = {"version": __version__, "form": f.hex(), "equation": str(f)}
    doc.update(verdict.as_json())
    _dump(doc, args.json)
    return 0


def cmd_jordan(args) -> int:
    from .census import run_census
    from .jordan import jordan_constant

    census = run_census(args.census_cache or args.cache, threads=args.threads) if args.q == 2 else None
    rep = jordan_constant(args.q, census=census, verify_pgl3_f8=args.verify_pgl3_f8)
    doc = {"version": __version__, "suite": f"jordan-q{args.q}"}
    doc.update(rep.as_json(timings=not args.no_timings))
    doc["pass"] = rep.passed
    for c in rep.checks:
        print(c.line(), file=sys.stderr)
    _dump(doc, args.json or "-")
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--json", metavar="PATH", help="write the JSON report here")
    common.add_argument("--cache", metavar="PATH", help="census cache file (read if present, else written)")
    common.add_argument("--threads", type=int, metavar="N", help="worker processes for the census")
    common.add_argument("--no-timings", action="store_true",
                        help="write seconds as 0 so reports are byte-for-byte reproducible")

    p = argparse.ArgumentParser(prog="cubicf2", parents=[common],
                                description="Cubic surfaces over F_2 and Jordan constants of Cr_2(F_q).")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("classify-cubics", parents=[common], help="orbit census of F2 cubic forms")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("aut", parents=[common], help="automorphism group of one form")
    sp.add_argument("--form", required=True, help="20-bit form word in hex, e.g. 02a08")
    sp.add_argument("--elements", action="store_true", help="list the group elements")
    sp.set_defaults(func=cmd_aut)

    sp = sub.add_parser("smooth", parents=[common], help="smoothness verdict of one form")
    sp.add_argument("--form", required=True)
    sp.add_argument("--method", choices=("groebner", "search", "both"), default="both")
    sp.add_argument("--kmax", type=int, default=4, choices=range(1, 5), metavar="K")
    sp.set_defaults(func=cmd_smooth)

    sp = sub.add_parser("jordan", parents=[common], help="Jordan constant of Cr_2(F_q)")
    sp.add_argument("--q", type=int, choices=(2, 4, 8), required=True)
    sp.add_argument("--verify-pgl3-f8", action="store_true",
                    help="materialize PGL3(F8) and check simplicity (minutes, ~GBs)")
    sp.add_argument("--census-cache", metavar="PATH")
    sp.set_defaults(func=cmd_jordan)

    sp = sub.add_parser("verify", parents=[common], help="run a suite of checks")
    sp.add_argument("--suite", choices=SUITES + ("all",), required=True)
    sp.add_argument("--verify-pgl3-f8", action="store_true")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    # shared flags may sit before or after the subcommand
    args = parser.parse_args(argv)
    for name, default in (("json", None), ("cache", None), ("threads", 1), ("no_timings", False)):
        if getattr(args, name, None) is None:
            setattr(args, name, default)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except CheckFailed as e:
        print(f"cubicf2: check failed: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
