"""The eleven acceptance criteria, each run at its stated time limit.

Every test prints one line ``criterion N: PASS|FAIL ...`` to the terminal.
"""

import time
from collections import Counter, defaultdict

import pytest

from gradedmassey.catalogue import toolkit_cases
from gradedmassey.residue import r_k
from gradedmassey.suites import Overrides, run_suite

LIMITS = {1: 60, 2: 30, 3: 120, 4: 120, 5: 120, 6: 120, 7: 60, 8: 120, 9: 60, 10: 60, 11: 60}


@pytest.fixture
def announce(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    return emit


def timed(name, **overrides):
    start = time.perf_counter()
    rep = run_suite(name, Overrides(**overrides))
    return rep, time.perf_counter() - start


def by_check(rep):
    out = defaultdict(list)
    for r in rep.records:
        out[r.check].append(r)
    return out


def finish(announce, number, rep, wall, coverage_ok=True, extra=""):
    ok = rep.ok and coverage_ok and wall < LIMITS[number]
    announce(number, ok, f"{rep.name}: {rep.passed} passed, {rep.failed} failed, {wall:.1f} s "
                         f"(limit {LIMITS[number]} s){extra}")
    assert rep.ok, rep.counterexample
    assert coverage_ok
    assert wall < LIMITS[number]


def test_criterion_01_duality(announce):
    rep, wall = timed("duality")
    covered = {(pt["G"], pt["N"]) for pt in rep.grid}
    want = {(g, n) for g in ("C2", "C3", "C4", "C2xC2") for n in (2, 3, 4)}
    checks = by_check(rep)
    finish(announce, 1, rep, wall, covered == want and len(checks["isomorphism"]) == len(checks["double-perp"]) == 12)


def test_criterion_02_dk(announce):
    rep, wall = timed("dk")
    pns = {(pt["p"], pt["n"]) for pt in rep.grid}
    want = {(p, n) for p in (2, 3, 5) for n in range(1, 6) if p**n <= 32}
    full = all(sum(1 for pt in rep.grid if (pt["p"], pt["n"]) == (p, n)) == p**n - 1 for p, n in want)
    finish(announce, 2, rep, wall, pns == want and full)


def test_criterion_03_auggen(announce):
    rep, wall = timed("auggen")
    pns = {(pt["p"], pt["n"]) for pt in rep.grid}
    finish(announce, 3, rep, wall, pns == {(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2)})


def test_criterion_04_trivimage(announce):
    rep, wall = timed("trivimage")
    odd = [r for r in rep.records if r.point["p"] != 2]
    two = [r for r in rep.records if r.point["p"] == 2]
    anomalies = sum(r.anomaly for r in two)
    odd_ok = bool(odd) and all(r.ok for r in odd)
    pns = {(pt["p"], pt["n"]) for pt in rep.grid}
    want = {(p, n) for p in (2, 3, 5) for n in range(1, 6) if p**n <= 32}
    finish(announce, 4, rep, wall, odd_ok and pns == want,
           f"; p odd {sum(r.ok for r in odd)}/{len(odd)}, p = 2 anomalies reported: {anomalies}")


def test_criterion_05_projform(announce):
    rep, wall = timed("projform")
    ns = {pt["n"] for pt in rep.grid}
    finish(announce, 5, rep, wall, ns == {1, 2, 3} and {pt["p"] for pt in rep.grid} == {3})


def test_criterion_06_toolkit(announce):
    rep, wall = timed("embedding")
    checks = by_check(rep)
    toolkit = ("delex", "tra", "tralam", "timesp", "unique", "omegalift")
    counts = {c: sum(r.ok for r in checks[c]) for c in toolkit}
    families = Counter(pt["name"].split("<-")[0] for pt in rep.grid if "name" in pt)
    named = (any(f.startswith("C4/C2") for f in families) and any(f.startswith("Heis") for f in families)
             and any(f.startswith("G(k=") for f in families))
    h2 = sorted(r.point["h2"] for r in checks["|H2(Cn,Z/n)|"] if r.ok)
    small = max(c.gamma.order for c in toolkit_cases()) <= 16
    covered = all(v >= 25 for v in counts.values()) and named and small and h2 == [1, 2, 3, 4, 5, 6]
    finish(announce, 6, rep, wall, covered, f"; per check {counts}")


def test_criterion_07_unipotent(announce):
    rep, wall = timed("unipotent")
    pts = rep.grid
    boundary = any(pt["k"] == pt["p"] ** (r_k(pt["k"], pt["p"]) + 1) - 1 for pt in pts)
    small = all(pt["k"] <= 4 and pt["p"] ** pt["m"] <= 9 for pt in pts)
    ks = {pt["k"] for pt in pts}
    checks = by_check(rep)
    five = all(len(checks[c]) == len(pts) for c in ("commutators", "action", "structure",
                                                    "N=R[G]/I^(k+1)", "homomorphy"))
    finish(announce, 7, rep, wall, boundary and small and ks == {1, 2, 3, 4} and five)


def _masseytrans_grid_ok(rep):
    pts = rep.grid
    ks = {pt["k"] for pt in pts}
    pnm = {(pt["p"], pt["n"], pt["m"]) for pt in pts}
    return len(pts) >= 10 and {1, 2, 3} <= ks and {(3, 1, 1), (3, 2, 1), (3, 2, 2), (2, 3, 1)} <= pnm


def test_criterion_08_masseytrans_signed(announce):
    """Massey class = (-1)^(k+1) Tra[D^(k) y] modulo P^(k-1), by two code paths."""
    rep, wall = timed("masseytrans")
    checks = by_check(rep)
    signed = all(r.ok for r in checks["signed"] + checks["two-paths"])
    ok = signed and _masseytrans_grid_ok(rep) and wall < LIMITS[8]
    announce("8 (signed)", ok, f"signed {sum(r.ok for r in checks['signed'])}/{len(checks['signed'])}, "
                               f"two-paths {sum(r.ok for r in checks['two-paths'])}/{len(checks['two-paths'])}, "
                               f"{wall:.1f} s")
    assert signed and _masseytrans_grid_ok(rep) and wall < LIMITS[8]


@pytest.mark.xfail(strict=True, reason="without the sign the classes differ for even k; "
                                       "see the signed variant")
def test_criterion_08_masseytrans_as_stated(announce):
    rep, wall = timed("masseytrans")
    literal = by_check(rep)["as-stated"]
    bad = sorted({r.point["k"] for r in literal if not r.ok})
    ok = all(r.ok for r in literal) and _masseytrans_grid_ok(rep) and wall < LIMITS[8]
    announce("8 (as stated)", ok, f"{sum(r.ok for r in literal)}/{len(literal)} equal without sign; "
                                  f"fails at k in {bad}")
    assert ok


def test_criterion_09_welldef(announce):
    rep, wall = timed("welldef")
    checks = by_check(rep)
    same_grid = _masseytrans_grid_ok(rep)
    every = all(len(checks[c]) == len(rep.grid) for c in ("identity", "zeta-rescale"))
    finish(announce, 9, rep, wall, same_grid and every)


def test_criterion_10_compat(announce):
    rep, wall = timed("compat")
    per_part = defaultdict(set)
    for r in rep.records:
        if r.ok:
            per_part[r.check[:3]].add(r.point["instance"])
    counts = {part: len(per_part[part]) for part in ("(a)", "(b)", "(d)")}
    finish(announce, 10, rep, wall, all(v >= 5 for v in counts.values()), f"; instances per part {counts}")


def test_criterion_11_graded(announce):
    rep, wall = timed("graded-mainthm")
    checks = by_check(rep)
    modules = [pt for pt in rep.grid if "module" in pt]
    sizes_ok = all(int(r.detail.split()[0].split("=")[1]) <= 3**6 for r in checks["telescoping"])
    covered = (len(modules) == 100 and sizes_ok and len(checks["P1<=P2"]) == 1
               and all(len(checks[c]) == 100 for c in ("telescoping", "gr-surjection", "mainthm-map")))
    finish(announce, 11, rep, wall, covered)
