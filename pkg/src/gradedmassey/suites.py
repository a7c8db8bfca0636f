"""Named verification suites: a parameter grid, one or more checks per grid point, a report."""

from __future__ import annotations

import json
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import catalogue, gcohom, graded, groupring, massey, unipotent
from .groups import FiniteGroup
from .residue import is_prime, r_k, r_k0

SUITES = ("duality", "dk", "auggen", "trivimage", "projform", "embedding", "unipotent",
          "masseytrans", "welldef", "compat", "graded-mainthm")


class UnknownSuite(ValueError):
    pass


class InvalidGrid(ValueError):
    pass


@dataclass
class Overrides:
    """Grid filters from the command line; ``None`` keeps the suite default."""

    p: int | None = None
    n: int | None = None
    m: int | None = None
    k: int | None = None
    pmax: int | None = None
    pn_max: int | None = None
    seed: int = 0
    jobs: int = 1

    def validate(self):
        if self.p is not None and not is_prime(self.p):
            raise InvalidGrid(f"--p {self.p} is not prime")
        for name in ("n", "m", "pmax", "pn_max", "jobs"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise InvalidGrid(f"--{name.replace('_', '-')} must be positive")
        if self.k is not None and self.k < 0:
            raise InvalidGrid("--k must be non-negative")

    def keep(self, **params) -> bool:
        """Whether a grid point survives the p/n/m/k filters."""
        for name in ("p", "n", "m", "k"):
            want = getattr(self, name)
            if want is not None and name in params and params[name] != want:
                return False
        return True


@dataclass
class Record:
    point: dict
    check: str
    ok: bool
    detail: str = ""
    anomaly: bool = False        # reported, but not counted as a failure


@dataclass
class SuiteReport:
    name: str
    grid: list
    passed: int
    failed: int
    counterexample: str | None
    wall: float
    records: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def table(self) -> str:
        lines = [f"suite {self.name}: {len(self.grid)} grid points, {self.passed} passed, "
                 f"{self.failed} failed, {self.wall:.2f} s"]
        width = max((len(_point_str(r.point)) for r in self.records), default=0)
        for r in self.records:
            status = "ok" if r.ok else ("ANOMALY" if r.anomaly else "FAIL")
            lines.append(f"  {_point_str(r.point):<{width}}  {r.check:<14} {status:<7} {r.detail}".rstrip())
        for note in self.notes:
            lines.append(f"  note: {note}")
        if self.counterexample:
            lines.append(f"  first counterexample: {self.counterexample}")
        return "\n".join(lines)

    def to_json(self) -> str:
        d = asdict(self)
        d["ok"] = self.ok
        return json.dumps(d, indent=1, default=str)


def _point_str(point: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in point.items())


# registry ---------------------------------------------------------------------------------------

@dataclass
class _Suite:
    grid: Callable[[Overrides], list[dict]]
    run: Callable[[dict, Overrides], list[Record]]
    notes: Callable[[list[Record]], list[str]] = lambda records: []


_REGISTRY: dict[str, _Suite] = {}


def _suite(name: str, grid, notes=None):
    def deco(fn):
        _REGISTRY[name] = _Suite(grid, fn, notes or (lambda records: []))
        return fn
    return deco


def _primes(pmax: int) -> list[int]:
    return [p for p in range(2, pmax + 1) if is_prime(p)]


def _pn_grid(ov: Overrides, default_primes: tuple, default_pn: int) -> list[tuple[int, int]]:
    pn_max = ov.pn_max or default_pn
    ps = [ov.p] if ov.p is not None else (list(default_primes) if ov.pmax is None else _primes(ov.pmax))
    if ov.pmax is not None:
        ps = [p for p in ps if p <= ov.pmax]
    out = []
    for p in ps:
        n = 1
        while p**n <= pn_max:
            if ov.n is None or n == ov.n:
                out.append((p, n))
            n += 1
    return out


def _catch(check: str, point: dict, fn) -> Record:
    try:
        res = fn()
    except Exception as exc:  # a crash inside a check is a failure of that check
        return Record(point, check, False, f"{type(exc).__name__}: {exc}")
    if isinstance(res, Record):
        return res
    ok, detail = (res if isinstance(res, tuple) else (bool(res), ""))
    return Record(point, check, bool(ok), detail)


# duality -----------------------------------------------------------------------------------------

_DUALITY_GROUPS = {"C2": lambda: FiniteGroup.cyclic(2), "C3": lambda: FiniteGroup.cyclic(3),
                   "C4": lambda: FiniteGroup.cyclic(4), "C2xC2": lambda: FiniteGroup.abelian((2, 2))}


def _duality_grid(ov: Overrides) -> list[dict]:
    Ns = (2, 3, 4) if ov.pmax is None else tuple(range(2, ov.pmax + 1))
    return [{"G": g, "N": N} for g in _DUALITY_GROUPS for N in Ns if ov.p is None or N == ov.p]


@_suite("duality", _duality_grid)
def _run_duality(pt: dict, ov: Overrides) -> list[Record]:
    R = groupring.GroupRing(_DUALITY_GROUPS[pt["G"]](), pt["N"])
    ideals = groupring.enumerate_ideals(R)

    def iso():
        bad = [J for J in ideals if not groupring.duality_map(J).verify()]
        return not bad, f"{len(ideals)} ideals"

    def double():
        bad = [J for J in ideals if groupring.perp(groupring.perp(J)) != J]
        return not bad, f"{len(ideals) - len(bad)}/{len(ideals)}"
    return [_catch("isomorphism", pt, iso), _catch("double-perp", pt, double)]


# D^(k) identities ----------------------------------------------------------------------------------

def _dk_grid(ov: Overrides) -> list[dict]:
    out = []
    for p, n in _pn_grid(ov, (2, 3, 5), 32):
        for k in range(1, p**n):
            if ov.k is None or k == ov.k:
                out.append({"p": p, "n": n, "k": k})
    return out


@_suite("dk", _dk_grid)
def _run_dk(pt: dict, ov: Overrides) -> list[Record]:
    R = groupring.GroupRing.cyclic(pt["p"], pt["n"], None)

    def check():
        r = groupring.dk_recursion_check(R, pt["k"])
        first = int(np.abs(r["first"].coeffs).sum())
        second = sum(int(np.abs(res.coeffs).sum()) for res, _ in r["second"].values())
        congs = r["first_congruence"] and all(c for _, c in r["second"].values())
        return first == 0 and second == 0 and congs, f"residuals {first} {second} over j=1..{pt['k']}"
    return [_catch("identities", pt, check)]


# auggen / trivimage -------------------------------------------------------------------------------

def _pnmk_grid(ov: Overrides, primes: tuple, pn_max: int, k_max: Callable[[int, int, int], int],
               k_valid: Callable[[int, int, int, int], bool] = lambda p, n, m, k: True) -> list[dict]:
    out = []
    for p, n in _pn_grid(ov, primes, pn_max):
        for m in range(1, n + 1):
            if ov.m is not None and m != ov.m:
                continue
            for k in range(0, k_max(p, n, m) + 1):
                if (ov.k is None or k == ov.k) and k_valid(p, n, m, k):
                    out.append({"p": p, "n": n, "m": m, "k": k})
    return out


def _auggen_grid(ov):
    return _pnmk_grid(ov, (2, 3, 5), 27, lambda p, n, m: p ** (n - m + 1) - 1,
                      lambda p, n, m, k: m + r_k0(k, p) <= n)


@_suite("auggen", _auggen_grid)
def _run_auggen(pt: dict, ov: Overrides) -> list[Record]:
    return [_catch("ideal=perp", pt, lambda: groupring.auggen_check(pt["p"], pt["n"], pt["m"], pt["k"]))]


def _trivimage_grid(ov):
    return _pnmk_grid(ov, (2, 3, 5), 32, lambda p, n, m: p ** (n - m + 1) - 1)


def _trivimage_notes(records: list[Record]) -> list[str]:
    odd = [r for r in records if r.point["p"] != 2]
    two = [r for r in records if r.point["p"] == 2]
    out = [f"p odd: {sum(r.ok for r in odd)}/{len(odd)} match"]
    if two:
        anomalies = [r for r in two if not r.ok]
        out.append(f"p = 2: {len(two) - len(anomalies)}/{len(two)} match"
                   + ("" if not anomalies else "; anomalies at " + ", ".join(_point_str(r.point) for r in anomalies)))
    return out


@_suite("trivimage", _trivimage_grid, _trivimage_notes)
def _run_trivimage(pt: dict, ov: Overrides) -> list[Record]:
    p, n, m, k = pt["p"], pt["n"], pt["m"], pt["k"]
    boundary = k >= p ** (n - m) * (p - 1)
    rec = _catch("formula", pt, lambda: (groupring.trivimage_check(p, n, m, k),
                                         "second case" if boundary else "zero case"))
    if p == 2 and not rec.ok:
        rec.anomaly = True
    return [rec]


# projform -------------------------------------------------------------------------------------------

PROJFORM_ENUMERATE = 3**6


def _projform_grid(ov: Overrides) -> list[dict]:
    out = []
    for p, n in _pn_grid(ov, (3,), 27):
        for m in range(1, n + 1):
            if ov.m is not None and m != ov.m:
                continue
            for s in range(0, n + 1):
                for k in range(0, p ** (n - m) * (p - 1) + 1):
                    if ov.k is None or k == ov.k:
                        out.append({"p": p, "n": n, "m": m, "s": s, "k": k})
    return out


@_suite("projform", _projform_grid)
def _run_projform(pt: dict, ov: Overrides) -> list[Record]:
    def check():
        st = groupring.projform_setup(pt["p"], pt["n"], pt["m"], pt["s"], pt["k"])
        if not st.domain <= st.target:
            return False, "containment fails"
        dec = groupring.ProjformDecomposer(st)
        if st.domain.order() <= PROJFORM_ENUMERATE:
            elems = st.domain.span.elements()
            how = "every element"
        else:
            elems = list(st.domain.span.basis)
            how = "a generating set"
        for v in elems:
            dec(st.H.elem(v), check_domain=False)
        return True, f"|domain|={st.domain.order()}, decomposed {how} ({len(elems)})"
    return [_catch("decompose", pt, check)]


# embedding-problem toolkit ---------------------------------------------------------------------------

_TOOLKIT_CACHE: dict = {}


def _toolkit_cases():
    if "cases" not in _TOOLKIT_CACHE:
        _TOOLKIT_CACHE["cases"] = catalogue.toolkit_cases()
    return _TOOLKIT_CACHE["cases"]


def _embedding_grid(ov: Overrides) -> list[dict]:
    out = [{"case": i, "name": c.name} for i, c in enumerate(_toolkit_cases())]
    out += [{"h2": n} for n in range(1, 7)]
    return out


@_suite("embedding", _embedding_grid)
def _run_embedding(pt: dict, ov: Overrides) -> list[Record]:
    if "h2" in pt:
        return [_catch("|H2(Cn,Z/n)|", pt, lambda: gcohom.h2_cyclic_order_check(pt["h2"]))]
    c = _toolkit_cases()[pt["case"]]
    rng = np.random.default_rng(ov.seed + pt["case"])
    G, prob = c.gamma, c.prob
    recs = [_catch("delex", pt, lambda: gcohom.delex_check(prob, G, c.rho_bar, rng, sections=10))]
    quot = gcohom.kernel_quotient(G, c.rho_bar)
    recs.append(_catch("tra", pt, lambda: gcohom.tra_check(quot, prob.module(G, prob.sections(G, c.rho_bar)))))
    if c.liftable:
        recs.append(_catch("tralam", pt, lambda: gcohom.tralam_check(prob, G, c.rho)))
        recs.append(_catch("timesp", pt, lambda: gcohom.timesp_check(prob, G, c.rho, rng)))
        recs.append(_catch("unique", pt, lambda: gcohom.unique_check(prob, G, c.rho_bar)))
        recs.append(_catch("omegalift", pt, lambda: (
            all(gcohom.omegalift_check(prob, G, c.rho, om) for om in c.omegas),
            f"{len(c.omegas)} subgroups")))
    return recs


# unipotent --------------------------------------------------------------------------------------

FULL_HOMOMORPHY_LIMIT = 512


def _unipotent_grid(ov: Overrides) -> list[dict]:
    out = []
    for p, m in _pn_grid(Overrides(p=ov.p, pmax=ov.pmax, pn_max=ov.pn_max or 9, n=ov.m), (2, 3), 9):
        for k in range(1, 5):
            if ov.k is None or k == ov.k:
                out.append({"p": p, "m": m, "k": k})
    return out


@_suite("unipotent", _unipotent_grid)
def _run_unipotent(pt: dict, ov: Overrides) -> list[Record]:
    p, m, k = pt["p"], pt["m"], pt["k"]
    n = m + r_k(k, p)
    recs = [_catch("commutators", pt, lambda: unipotent.commutator_chain_check(k, p, m)),
            _catch("action", pt, lambda: all(unipotent.action_check(k, p, m, t) for t in range(p**m)))]

    def structure():
        rep = unipotent.structure_check(k, p, m)
        return rep.ok, (f"|N|={rep.n_order} |H|={rep.h_order} (p^(m+r_k)={rep.expected_h}) "
                        f"split={rep.splits}" + (" enumerated" if rep.enumerated else ""))
    recs.append(_catch("structure", pt, structure))

    def module():
        mod = unipotent.n_module_iso(k, p, m, n)
        ok = mod.order() == mod.quotient_order() and unipotent.intertwining_check(mod, exhaustive=mod.order() <= 5000)
        return ok, f"|N|={mod.order()}"
    recs.append(_catch("N=R[G]/I^(k+1)", pt, module))

    def homomorphy():
        boundary = k == p ** (n - m + 1) - 1
        ts = range(p**m) if boundary else [0]
        full = 0
        for t in ts:
            if not unipotent.defining_relations_check(k, p, m, n, t):
                return False, f"relations fail at t={t}"
            if p ** (m * (k + 1) + n) <= FULL_HOMOMORPHY_LIMIT:
                model, _ = unipotent.semidirect_model(k, p, m, n, t)
                if not unipotent.rho_is_homomorphism(model.gamma, unipotent.build_rho(k, p, m, n, model, check=False)):
                    return False, f"table check fails at t={t}"
                full += 1
        return True, ("boundary, " if boundary else "") + f"{len(ts)} twists, {full} by full table"
    recs.append(_catch("homomorphy", pt, homomorphy))
    return recs


# Kummer models ----------------------------------------------------------------------------------

def _kummer_grid(specs) -> Callable[[Overrides], list[dict]]:
    def grid(ov: Overrides) -> list[dict]:
        return [{"p": s.p, "n": s.n, "m": s.m, "k": s.k, "instance": s.label} for s in specs
                if ov.keep(p=s.p, n=s.n, m=s.m, k=s.k)]
    return grid


def _spec_of(pt: dict) -> catalogue.KummerSpec:
    for s in catalogue.KUMMER_GRID + catalogue.SHRINK_M_GRID + (catalogue.NONZERO_P1,):
        if s.label == pt["instance"]:
            return s
    raise InvalidGrid(f"unknown instance {pt['instance']}")


def _masseytrans_notes(records: list[Record]) -> list[str]:
    lit = [r for r in records if r.check == "as-stated"]
    bad = [r for r in lit if not r.ok]
    if not bad:
        return []
    ks = sorted({r.point["k"] for r in bad})
    return [f"as-stated equality fails at k in {ks}; the classes agree up to the sign (-1)^(k+1)"]


@_suite("masseytrans", _kummer_grid(catalogue.KUMMER_GRID), _masseytrans_notes)
def _run_masseytrans(pt: dict, ov: Overrides) -> list[Record]:
    inst = _spec_of(pt).build()
    cls = massey.massey_class(inst)
    tra = massey.tra_ck(inst)
    sign = massey.transgression_sign(inst.k)

    def as_stated():
        return cls.equals(tra), "[Massey] = Tra[D^(k)y] mod P^(k-1)"

    def signed():
        return cls.equals(sign * tra), f"[Massey] = {sign:+d} Tra[D^(k)y] mod P^(k-1)"

    def two_paths():
        # the cocycle of the defining system against the transgression; on small models the
        # transgression itself is recomputed through the generic extension machinery
        massey.massey_via_transgression(inst, check=True)
        detail = f"|Gamma|={inst.gamma_order()}, class nonzero={not cls.is_zero()}"
        if inst.q * inst.U.size() * inst.central <= massey.GENERIC_TRANSGRESSION_LIMIT:
            detail += ", generic transgression compared"
        return True, detail
    return [_catch("as-stated", pt, as_stated), _catch("signed", pt, signed), _catch("two-paths", pt, two_paths)]


@_suite("welldef", _kummer_grid(catalogue.KUMMER_GRID))
def _run_welldef(pt: dict, ov: Overrides) -> list[Record]:
    inst = _spec_of(pt).build()
    units = [j for j in range(1, inst.q) if j % inst.p]
    return [
        _catch("identity", pt, lambda: (all(massey.rescale_identity(inst.p, inst.n, inst.m, inst.k, j) for j in units),
                                        f"j in {units}")),
        _catch("zeta-rescale", pt, lambda: all(massey.zeta_rescale_check(inst, j) for j in units)),
        _catch("lift", pt, lambda: massey.lift_independence_check(inst)),
    ]


@_suite("compat", _kummer_grid(catalogue.KUMMER_GRID + catalogue.SHRINK_M_GRID))
def _run_compat(pt: dict, ov: Overrides) -> list[Record]:
    inst = _spec_of(pt).build()
    recs = []
    lo = inst.m + r_k0(inst.k, inst.p)
    for n2 in range(lo, inst.n):
        recs.append(_catch(f"(a) n'={n2}", pt, lambda n2=n2: massey.compat_shrink_n(inst, n2)))
    for m2 in range(1, inst.m):
        recs.append(_catch(f"(b) m'={m2}", pt, lambda m2=m2: massey.compat_shrink_m(inst, m2)))
    recs.append(_catch("(d) central", pt, lambda: massey.compat_inflation(inst, inst.with_central(inst.p))))
    return recs


# graded pieces ----------------------------------------------------------------------------------

GRADED_MODULES = 100


def _graded_grid(ov: Overrides) -> list[dict]:
    p = ov.p or 3
    out = [{"p": p, "module": i} for i in range(GRADED_MODULES)]
    out.append({"chain": catalogue.NONZERO_P1.label})
    return out


@_suite("graded-mainthm", _graded_grid)
def _run_graded(pt: dict, ov: Overrides) -> list[Record]:
    if "chain" in pt:
        return [_catch("P1<=P2", pt, lambda: _chain_check(catalogue.NONZERO_P1.build()))]
    p = pt["p"]
    rng = np.random.default_rng([ov.seed, pt["module"]])
    max_log = 6 if p == 3 else max(1, int(6 * np.log(3) / np.log(p)))
    M = graded.random_module(p, 4, rng, max_log=max_log)
    D = graded.random_stable_subgroup(M, rng)
    F = graded.FilteredModule(M)
    detail = f"|M|={M.size()} length={F.length}"

    def pieces():
        if not graded.telescopes(F):
            return False, detail
        orders = [graded.graded_piece(F, k).order for k in range(F.length + 1)]
        return graded.finiteness_cascade(F), detail + f" gr orders {orders}"

    def surj():
        return all(graded.gr_surjection_check(F, k) for k in range(5)), detail

    def mainthm():
        return all(graded.mainthm_map_check(F, k) and graded.mainthm_map_check(F, k, D=D) for k in range(5)), detail
    return [_catch("telescoping", pt, pieces), _catch("gr-surjection", pt, surj), _catch("mainthm-map", pt, mainthm)]


def _chain_check(inst) -> tuple[bool, str]:
    sp = gcohom.spaces(inst.module())
    B = sp.B(2)
    P1, P2 = massey.p_group(inst, 1), massey.p_group(inst, 2)
    nonzero = any(b not in B for b in P1.basis)
    contained = all(b in B + P2 for b in P1.basis)
    return nonzero and contained, f"P^(1) nonzero={nonzero}, contained in P^(2)={contained}"


# driver ----------------------------------------------------------------------------------------

def suite_grid(name: str, overrides: Overrides | None = None) -> list[dict]:
    if name not in _REGISTRY:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    ov = overrides or Overrides()
    ov.validate()
    grid = _REGISTRY[name].grid(ov)
    if not grid:
        raise InvalidGrid("the overrides leave an empty grid")
    return grid


def run_suite(name: str, overrides: Overrides | None = None) -> SuiteReport:
    """Run every check of a suite over its (possibly filtered) grid."""
    ov = overrides or Overrides()
    grid = suite_grid(name, ov)
    suite = _REGISTRY[name]
    start = time.perf_counter()

    def one(pt):
        try:
            return suite.run(pt, ov)
        except Exception as exc:
            return [Record(pt, "setup", False, f"{type(exc).__name__}: {exc}\n{traceback.format_exc(limit=3)}")]
    if ov.jobs > 1:
        with ThreadPoolExecutor(max_workers=ov.jobs) as pool:
            results = list(pool.map(one, grid))
    else:
        results = [one(pt) for pt in grid]
    records = [r for rs in results for r in rs]
    failed = [r for r in records if not r.ok and not r.anomaly]
    counter = None
    if failed:
        r = failed[0]
        counter = json.dumps({"point": r.point, "check": r.check, "detail": r.detail}, default=str)
    return SuiteReport(name, grid, len(records) - len(failed), len(failed), counter,
                       time.perf_counter() - start, records, suite.notes(records))
