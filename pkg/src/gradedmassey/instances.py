"""Plain-text instance files.

A file is a sequence of blocks, each introduced by a line holding only the block
name.  ``#`` starts a comment; blank lines are ignored.

    PARAMS      p m n [k]
    UMODULE     line 1: cyclic orders; then one row per coordinate of the sigma matrix
    Y           coefficients of y
    ZLIFT       the sigma-invariant character z (embedded form)
    OMEGA       line 1: order of the central factor, optionally followed by 0 when W is
                exactly the span of the listed generators (by default W also
                contains D^(k-1)y); then one generator of W per line
    DECOMP      (module files) one generator of the decomposition subgroup per line
    PROJFORM    (decomposition requests) p n m s k
    ELEMENTS    group-ring elements, one per line as ``p m n : c_0 c_1 ...``
    GROUP       line 1: |Gamma|; then the multiplication table, one row per line
    CHI         values of chi on Gamma
    LAMBDA      values of lambda on Gamma

GROUP, CHI and LAMBDA are derived data: they are written for small models and
checked against the recomputed values when read.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import Span
from .massey import NotProper, SyntheticKummerInstance, UModule

BLOCKS = ("PARAMS", "UMODULE", "Y", "ZLIFT", "OMEGA", "DECOMP", "GROUP", "CHI", "LAMBDA",
          "PROJFORM", "ELEMENTS")
DERIVED_LIMIT = 81


class ParseError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


@dataclass
class ModuleFile:
    """A module with an optional decomposition subgroup (generators)."""

    U: UModule
    decomposition: list = field(default_factory=list)

    def decomposition_span(self) -> Span:
        return self.U.closure_span(self.decomposition) if self.decomposition else Span.zero(self.U.P, self.U.rank)

    def __eq__(self, other):
        return (isinstance(other, ModuleFile) and self.U == other.U
                and len(self.decomposition) == len(other.decomposition)
                and all(np.array_equal(a, b) for a, b in zip(self.decomposition, other.decomposition)))


def _ints(v) -> str:
    return " ".join(str(int(x)) for x in v)


def _module_lines(U: UModule) -> list[str]:
    lines = ["UMODULE", _ints(U.orders)]
    lines += [_ints(row) for row in U.S]
    return lines


def dump_instance(inst: SyntheticKummerInstance, derived: bool | None = None) -> str:
    lines = ["PARAMS", _ints([inst.p, inst.m, inst.n, inst.k])]
    lines += _module_lines(inst.U)
    lines += ["Y", _ints(inst.y), "ZLIFT", _ints(inst.z), "OMEGA", str(inst.central) + ("" if inst.auto_w else " 0")]
    lines += [_ints(w) for w in inst.w_gens]
    if derived is None:
        derived = inst.is_proper() and inst.gamma_order() <= DERIVED_LIMIT
    if derived:
        G = inst.gamma
        lines += ["GROUP", str(G.order)] + [_ints(row) for row in G.table]
        lines += ["CHI", _ints(inst.chi), "LAMBDA", _ints(inst.lam)]
    return "\n".join(lines) + "\n"


def dump_module(mf: ModuleFile) -> str:
    U = mf.U
    lines = ["PARAMS", _ints([U.p, U.m, U.n])] + _module_lines(U)
    if mf.decomposition:
        lines += ["DECOMP"] + [_ints(d) for d in mf.decomposition]
    return "\n".join(lines) + "\n"


def _element_tokens(line: str) -> list:
    head, sep, tail = line.partition(":")
    if not sep:
        raise ValueError("missing ':'")
    return [[int(t) for t in head.split()], [int(t) for t in tail.split()]]


def _split_blocks(text: str) -> dict[str, list[tuple[int, list[int]]]]:
    blocks: dict[str, list[tuple[int, list[int]]]] = {}
    current = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.isalpha():
            if line not in BLOCKS:
                raise ParseError(no, f"unknown block {line!r}")
            if line in blocks:
                raise ParseError(no, f"duplicate block {line}")
            current = line
            blocks[current] = []
            blocks[current + "@"] = [(no, [])]     # where the block starts
            continue
        if current is None:
            raise ParseError(no, "data before the first block")
        try:
            row = _element_tokens(line) if current == "ELEMENTS" else [int(tok) for tok in line.split()]
            blocks[current].append((no, row))
        except ValueError:
            want = "'p m n : coefficients'" if current == "ELEMENTS" else "integers"
            raise ParseError(no, f"expected {want}") from None
    return blocks


def _need(blocks, name: str, last_line: int):
    if name not in blocks:
        raise ParseError(last_line, f"missing block {name}")
    return blocks[name]


def _read_module(blocks, p: int, m: int, n: int, at: int) -> UModule:
    rows = _need(blocks, "UMODULE", at)
    if not rows:
        raise ParseError(blocks["UMODULE@"][0][0], "UMODULE needs a line of orders")
    no, orders = rows[0]
    mat = rows[1:]
    if len(mat) != len(orders) or any(len(r) != len(orders) for _, r in mat):
        raise ParseError(no, "sigma matrix must be square of the module's rank")
    try:
        return UModule(p, m, n, orders, np.array([r for _, r in mat], dtype=np.int64).reshape(len(orders), len(orders)))
    except ValueError as exc:
        raise ParseError(no, str(exc)) from None


def _vector(blocks, name: str, rank: int, at: int) -> np.ndarray:
    rows = _need(blocks, name, at)
    if len(rows) != 1 or len(rows[0][1]) != rank:
        line = rows[0][0] if rows else blocks[name + "@"][0][0]
        raise ParseError(line, f"{name} needs one line of {rank} integers")
    return np.array(rows[0][1], dtype=np.int64)


def load_instance(text: str) -> SyntheticKummerInstance:
    blocks = _split_blocks(text)
    end = len(text.splitlines())
    params = _need(blocks, "PARAMS", end)
    if len(params) != 1 or len(params[0][1]) != 4:
        raise ParseError(params[0][0] if params else end, "PARAMS needs 'p m n k'")
    no, (p, m, n, k) = params[0]
    try:
        U = _read_module(blocks, p, m, n, end)
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(no, str(exc)) from None
    y = _vector(blocks, "Y", U.rank, end)
    z = _vector(blocks, "ZLIFT", U.rank, end)
    om = _need(blocks, "OMEGA", end)
    if not om or len(om[0][1]) not in (1, 2) or om[0][1][1:] not in ([], [0], [1]):
        raise ParseError(blocks["OMEGA@"][0][0], "OMEGA starts with the central factor order [and 0|1]")
    central = om[0][1][0]
    auto_w = om[0][1][1:] != [0]
    w = []
    for line_no, row in om[1:]:
        if len(row) != U.rank:
            raise ParseError(line_no, f"W generator needs {U.rank} integers")
        w.append(np.array(row, dtype=np.int64))
    try:
        inst = SyntheticKummerInstance(p, m, n, k, U, y, z, w, central, auto_w)
    except ValueError as exc:
        raise ParseError(no, str(exc)) from None
    if not (np.array_equal(inst.y, y) and np.array_equal(inst.z, z)
            and all(np.array_equal(a, b) for a, b in zip(inst.w_gens, w))):
        raise ParseError(no, "entries must be reduced")
    _check_derived(blocks, inst)
    return inst


def _check_derived(blocks, inst: SyntheticKummerInstance):
    present = [b for b in ("GROUP", "CHI", "LAMBDA") if b in blocks]
    if not present:
        return
    if len(present) != 3:
        raise ParseError(blocks[present[0] + "@"][0][0], "GROUP, CHI and LAMBDA go together")
    at = blocks["GROUP@"][0][0]
    try:
        G = inst.gamma
    except NotProper:
        raise ParseError(at, "derived blocks given for an improper instance") from None
    rows = blocks["GROUP"]
    if not rows or rows[0][1] != [G.order]:
        raise ParseError(at, "group order does not match the model")
    table = [r for _, r in rows[1:]]
    if len(table) != G.order or not np.array_equal(np.array(table), G.table):
        raise ParseError(at, "multiplication table does not match the model")
    for name, want in (("CHI", inst.chi), ("LAMBDA", inst.lam)):
        rows = blocks[name]
        if len(rows) != 1 or rows[0][1] != list(want):
            raise ParseError(blocks[name + "@"][0][0], f"{name} does not match the model")


def load_module(text: str) -> ModuleFile:
    blocks = _split_blocks(text)
    end = len(text.splitlines())
    params = _need(blocks, "PARAMS", end)
    if len(params) != 1 or len(params[0][1]) != 3:
        raise ParseError(params[0][0] if params else end, "PARAMS needs 'p m n'")
    no, (p, m, n) = params[0]
    try:
        U = _read_module(blocks, p, m, n, end)
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(no, str(exc)) from None
    dec = []
    for line_no, row in blocks.get("DECOMP", []):
        if len(row) != U.rank:
            raise ParseError(line_no, f"generator needs {U.rank} integers")
        dec.append(np.array(row, dtype=np.int64))
    return ModuleFile(U, dec)


@dataclass
class DecomposeRequest:
    """Elements of (Z/p^m)[C_(p^(n-s))] to be written as (sigma - 1)^k Y + B."""

    p: int
    n: int
    m: int
    s: int
    k: int
    elements: list = field(default_factory=list)     # coefficient vectors

    def __eq__(self, other):
        return (isinstance(other, DecomposeRequest)
                and (self.p, self.n, self.m, self.s, self.k) == (other.p, other.n, other.m, other.s, other.k)
                and [list(map(int, e)) for e in self.elements] == [list(map(int, e)) for e in other.elements])


def format_group_ring_line(p: int, m: int, n: int, coeffs) -> str:
    return f"{p} {m} {n} : {_ints(coeffs)}"


def dump_decompose(req: DecomposeRequest) -> str:
    lines = ["PROJFORM", _ints([req.p, req.n, req.m, req.s, req.k]), "ELEMENTS"]
    lines += [format_group_ring_line(req.p, req.m, req.n - req.s, e) for e in req.elements]
    return "\n".join(lines) + "\n"


def load_decompose(text: str) -> DecomposeRequest:
    blocks = _split_blocks(text)
    end = len(text.splitlines())
    head = _need(blocks, "PROJFORM", end)
    if len(head) != 1 or len(head[0][1]) != 5:
        raise ParseError(head[0][0] if head else end, "PROJFORM needs 'p n m s k'")
    no, (p, n, m, s, k) = head[0]
    if not (1 <= m <= n and 0 <= s <= n and 0 <= k <= p ** (n - m) * (p - 1)):
        raise ParseError(no, "need 1 <= m <= n, 0 <= s <= n and k <= p^(n-m)(p-1)")
    elems = []
    for line_no, (prefix, coeffs) in blocks.get("ELEMENTS", []):
        if prefix != [p, m, n - s]:
            raise ParseError(line_no, f"element must live in (Z/{p}^{m})[C_{p}^{n - s}]: prefix '{p} {m} {n - s}'")
        if len(coeffs) != p ** (n - s):
            raise ParseError(line_no, f"element needs {p ** (n - s)} coefficients")
        elems.append(np.array(coeffs, dtype=np.int64) % p**m)
    return DecomposeRequest(p, n, m, s, k, elems)
