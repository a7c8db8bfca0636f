"""Command-line entry point.

    gradedmassey verify <suite> [--p P] [--n N] [--m M] [--k K] [--pmax P] [--pn-max Q]
                                [--seed S] [--jobs J] [--report PATH]
    gradedmassey compute d-table --p P --n N [--m M]
    gradedmassey compute massey FILE
    gradedmassey compute decompose FILE
    gradedmassey compute graded FILE

Exit status: 0 when everything passes, 1 on a failed check (or an improper
instance), 2 on usage and parse errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import graded, groupring, instances, massey, suites
from .gcohom import spaces

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SHOW_TABLE_LIMIT = 27


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gradedmassey", description="Verification suites and computations "
                                 "for Massey products over cyclic p-extensions (finite models).")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", help="one of: " + ", ".join(suites.SUITES))
    for flag in ("--p", "--n", "--m", "--k", "--pmax", "--pn-max"):
        v.add_argument(flag, type=int, default=None)
    v.add_argument("--seed", type=int, default=0, help="seed for randomized suites (default 0)")
    v.add_argument("--jobs", type=int, default=1, help="worker threads")
    v.add_argument("--report", type=Path, default=None, help="write a JSON report here")
    v.add_argument("--quiet", action="store_true", help="print only the summary line")

    c = sub.add_parser("compute", help="compute from parameters or an instance file")
    c.add_argument("what", choices=("d-table", "massey", "decompose", "graded"))
    c.add_argument("file", nargs="?", type=Path)
    c.add_argument("--p", type=int)
    c.add_argument("--n", type=int)
    c.add_argument("--m", type=int, default=None, help="coefficients Z/p^m (default: integers)")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "verify":
            return _verify(args)
        return _compute(args)
    except (instances.ParseError, suites.UnknownSuite, suites.InvalidGrid, _Usage) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


class _Usage(ValueError):
    pass


# verify ----------------------------------------------------------------------------------------

def _verify(args) -> int:
    ov = suites.Overrides(p=args.p, n=args.n, m=args.m, k=args.k, pmax=args.pmax, pn_max=args.pn_max,
                          seed=args.seed, jobs=args.jobs)
    report = suites.run_suite(args.suite, ov)
    print(report.table().splitlines()[0] if args.quiet else report.table())
    if args.report is not None:
        args.report.write_text(report.to_json() + "\n")
    return EXIT_OK if report.ok else EXIT_FAIL


# compute ------------------------------------------------------------------------------------------

def _read(args) -> str:
    if args.file is None:
        raise _Usage(f"compute {args.what} needs an input file")
    try:
        return args.file.read_text()
    except OSError as exc:
        raise _Usage(str(exc)) from None


def _compute(args) -> int:
    if args.what == "d-table":
        return _d_table(args)
    text = _read(args)
    if args.what == "massey":
        return _massey(instances.load_instance(text))
    if args.what == "decompose":
        return _decompose(instances.load_decompose(text))
    return _graded(instances.load_module(text))


def _d_table(args) -> int:
    if args.p is None or args.n is None:
        raise _Usage("d-table needs --p and --n")
    from .residue import is_prime
    if not is_prime(args.p) or args.n < 1 or (args.m is not None and args.m < 1):
        raise _Usage("need a prime p and positive n (and m)")
    R = groupring.GroupRing.cyclic(args.p, args.n, None if args.m is None else args.p**args.m)
    q = args.p**args.n
    rows = [groupring.d_operator(k, R) for k in range(q)]
    width = max(len(str(int(c))) for x in rows for c in x.coeffs)
    coef = "Z" if args.m is None else f"Z/{args.p}^{args.m}"
    print(f"D^(k) in {coef}[C_{q}], coefficients of 1, σ, ..., σ^{q - 1}")
    for k, x in enumerate(rows):
        cells = " ".join(f"{int(c):>{width}}" for c in x.coeffs)
        print(f"k={k:<3} {cells}   {groupring.format_element(x)}")
    return EXIT_OK


def _massey(inst: massey.SyntheticKummerInstance) -> int:
    print(f"instance p={inst.p} n={inst.n} m={inst.m} k={inst.k}  |U|={inst.U.size()}  t={inst.t}")
    try:
        inst.require_proper()
    except massey.NotProper as exc:
        print(f"NotProper: {exc}")
        return EXIT_FAIL
    G = inst.gamma
    print(f"|Gamma| = {G.order}")
    D = massey.proper_defining_system(inst)
    try:
        P = massey.p_group(inst, inst.k - 1)
    except ValueError as exc:
        raise _Usage(f"{exc} (|U| = {inst.U.size()})") from None
    cls = massey.MasseyClass(massey.massey_cocycle(D), P, inst.k)
    tra = massey.massey_via_transgression(inst, check=True)
    sign = massey.transgression_sign(inst.k)
    sp = spaces(inst.module())
    B = sp.B(2)
    denom = B + cls.P
    rep = denom.reduce(cls.cocycle.embedded())
    p_gens = [v for v in (B.reduce(b) for b in cls.P.basis) if v.any()]
    print("proper defining system: conditions verified, top row is the canonical binomial system")
    print(f"P^(k-1): |(P^(k-1) + B^2) / B^2| = {denom.order() // B.order()}, "
          f"{len(p_gens)} generator(s) modulo coboundaries")
    show = G.order <= SHOW_TABLE_LIMIT
    for v in p_gens if show else []:
        print("  " + _ints(v))
    print(f"Massey class zero modulo P^(k-1): {cls.is_zero()}")
    print(f"Massey class = {sign:+d} * Tra[D^(k) y] modulo P^(k-1): {cls.equals(sign * tra.cocycle)}")
    if not show:
        print(f"cochain tables omitted (|Gamma| > {SHOW_TABLE_LIMIT})")
        return EXIT_OK
    print(f"reduced representative (rows g1, columns g2, values in Z/{inst.P}):")
    n = G.order
    for g in range(n):
        print("  " + _ints(rep[g * n:(g + 1) * n] // (sp.L // inst.P)))
    return EXIT_OK


def _decompose(req: instances.DecomposeRequest) -> int:
    st = groupring.projform_setup(req.p, req.n, req.m, req.s, req.k)
    dec = groupring.ProjformDecomposer(st)
    elems = req.elements or [np.asarray(b) for b in st.domain.span.basis]
    source = "given" if req.elements else "generators of the domain"
    print(f"p={req.p} n={req.n} m={req.m} s={req.s} k={req.k}: x = (σ-1)^{req.k} Y + B in "
          f"{st.H}, B a multiple of {groupring.format_element(st.nbar)} ({len(elems)} {source})")
    status = EXIT_OK
    for i, c in enumerate(elems):
        x = st.H.elem(c)
        try:
            Y, Bpart = dec(x)
        except groupring.NotInIdeal as exc:
            print(f"[{i}] x = {groupring.format_element(x)}: NotInIdeal ({exc})")
            status = EXIT_FAIL
            continue
        print(f"[{i}] x = {groupring.format_element(x)}")
        print(f"    Y = {groupring.format_element(Y)}")
        print(f"    B = {groupring.format_element(Bpart)}")
    return status


def _graded(mf: instances.ModuleFile) -> int:
    F = graded.FilteredModule(mf.U)
    D = mf.decomposition_span()
    use_d = bool(mf.decomposition)
    if use_d and not graded.is_sigma_stable(mf.U, D):
        raise _Usage("the decomposition subgroup is not sigma-stable")
    header = f"{'k':>3} {'|I^k M|':>9} {'|gr^k|':>7}  invariants"
    if use_d:
        header += "   |Q^(k)|"
    print(f"|M| = {mf.U.size()}, filtration length {F.length}")
    print(header)
    total = 1
    for k in range(F.length + 1):
        piece = graded.graded_piece(F, k)
        total *= piece.order
        line = f"{k:>3} {F.I(k).order():>9} {piece.order:>7}  {piece.invariants or [1]}"
        if use_d:
            line += f"   {graded.decomposition_free_quotient(F, D, k).order}"
        print(line)
    print(f"product of |gr^k| = {total} = |M|: {total == mf.U.size()}")
    return EXIT_OK if total == mf.U.size() else EXIT_FAIL


def _ints(v) -> str:
    return " ".join(str(int(x)) for x in v)


if __name__ == "__main__":
    sys.exit(main())
