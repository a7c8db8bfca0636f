"""Augmentation filtration of finite modules over a cyclic p-group.

Modules are :class:`~gradedmassey.massey.UModule` instances: a finite abelian
group ``Z/d_1 x ... x Z/d_r`` (``d_i | p^m``) with the matrix of ``sigma``.  All
subgroups are spans of embedded vectors in ``(Z/p^m)^r``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import Span, kernel_modulo, smith_invariants
from .massey import UModule


def _sigma_minus_one(M: UModule, power: int = 1) -> np.ndarray:
    T = np.eye(M.rank, dtype=np.int64)
    A = M.S - np.eye(M.rank, dtype=np.int64)
    for _ in range(power):
        T = A @ T
    return M._red_cols(T)


def image_span(M: UModule, T: np.ndarray, sub: Span | None = None) -> Span:
    """T applied to a subgroup (default all of M), embedded."""
    if sub is None:
        gens = [np.eye(M.rank, dtype=np.int64)[i] for i in range(M.rank)]
    else:
        gens = [M.unembed(b) for b in sub.basis]
    return Span([M.embed(T @ g) for g in gens], M.P, M.rank)


def full_span(M: UModule) -> Span:
    return Span(np.diag(M.e), M.P, M.rank)


def sum_spans(*spans: Span) -> Span:
    out = spans[0]
    for s in spans[1:]:
        out = out + s
    return out


def is_sigma_stable(M: UModule, S: Span) -> bool:
    return all(M.embed(M.act(1, M.unembed(b))) in S for b in S.basis)


def quotient_invariants(M: UModule, big: Span, small: Span) -> list[int]:
    """Invariant factors of big / (big ∩ small)."""
    gens = [np.asarray(b) for b in big.basis]
    if not gens:
        return []
    rel = kernel_modulo(gens, list(small.basis), M.P)
    rows = [list(map(int, r)) for r in rel.basis]
    rows += [[M.P if i == j else 0 for j in range(len(gens))] for i in range(len(gens))]
    return smith_invariants(rows, len(gens))


@dataclass
class FilteredModule:
    """M with its chain I^k M = (sigma - 1)^k M."""

    M: UModule

    def __post_init__(self):
        chain = [full_span(self.M)]
        A = _sigma_minus_one(self.M)
        while not chain[-1].is_zero():
            nxt = image_span(self.M, A, chain[-1])
            if nxt == chain[-1]:
                raise ValueError("filtration does not reach 0")
            chain.append(nxt)
        self.chain = chain

    def I(self, k: int) -> Span:
        """I_G^k M (zero past the end of the chain)."""
        return self.chain[k] if k < len(self.chain) else self.chain[-1]

    @property
    def length(self) -> int:
        """Least k with I^k M = 0."""
        return len(self.chain) - 1


@dataclass
class GradedPiece:
    k: int
    order: int
    invariants: list[int]
    top: Span
    bottom: Span


def graded_piece(F: FilteredModule, k: int) -> GradedPiece:
    """gr^k = I^k M / I^(k+1) M; sigma acts trivially on it."""
    top, bottom = F.I(k), F.I(k + 1)
    M = F.M
    for b in top.basis:
        if (M.embed(M.act(1, M.unembed(b))) - b) % M.P not in bottom:
            raise AssertionError("sigma acts nontrivially on a graded piece")
    order = top.order() // bottom.order()
    return GradedPiece(k, order, quotient_invariants(M, top, bottom), top, bottom)


def telescopes(F: FilteredModule) -> bool:
    """prod_k |gr^k M| = |M|."""
    total = 1
    for k in range(F.length + 1):
        total *= graded_piece(F, k).order
    return total == F.M.size()


def gr_surjection_check(F: FilteredModule, k: int) -> bool:
    """a (x) sigma^j -> (sigma^j - 1) a is well defined on gr^k (x) G and onto gr^(k+1)."""
    M = F.M
    top, nxt, nxt2 = F.I(k), F.I(k + 1), F.I(k + 2)
    A = _sigma_minus_one(M)
    for b in top.basis:
        a = M.unembed(b)
        base = M.embed(A @ a)
        if base not in nxt:
            return False
        # additivity in the G factor: (sigma^j - 1) a = j (sigma - 1) a modulo I^(k+2)
        for j in range(M.q + 1):
            lhs = M.embed(M.act(j, a) - a)
            if (lhs - j * base) % M.P not in nxt2:
                return False
    image = image_span(M, A, top) + nxt2
    return image == nxt + nxt2


def finiteness_cascade(F: FilteredModule) -> bool:
    """Once a graded piece vanishes every later one does."""
    seen_zero = False
    for k in range(F.length + 2):
        z = graded_piece(F, k).order == 1
        if seen_zero and not z:
            return False
        seen_zero = seen_zero or z
    return True


def j_kernel(F: FilteredModule, k: int, designated: Span | None = None, m_level: int | None = None) -> Span:
    """{a : (sigma - 1)^k a = 0}, or with ``designated`` / ``m_level``:
    {a : (sigma - 1)^k a in designated + p^m' M}."""
    M = F.M
    T = _sigma_minus_one(M, k)
    target = Span.zero(M.P, M.rank) if designated is None else designated
    if m_level is not None:
        target = target + Span([(M.p**m_level * b) % M.P for b in full_span(M).basis], M.P, M.rank)
    return Span([M.embed(g) for g in M.preimage(T, target)], M.P, M.rank)


def decomposition_free_quotient(F: FilteredModule, D: Span, k: int) -> GradedPiece:
    """I^k M / (I^k D + I^(k+1) M)."""
    M = F.M
    if not is_sigma_stable(M, D):
        raise ValueError("decomposition subgroup is not sigma-stable")
    top = F.I(k)
    bottom = image_span(M, _sigma_minus_one(M, k), D) + F.I(k + 1)
    return GradedPiece(k, top.order() // bottom.order(), quotient_invariants(M, top, bottom), top, bottom)


def mainthm_map_check(F: FilteredModule, k: int, D: Span | None = None, J: Span | None = None) -> bool:
    """a -> (sigma - 1)^k a is a bijection M/(J_k + I M [+ D]) -> gr^k M [resp. Q^(k)]."""
    M = F.M
    Jk = j_kernel(F, k)
    if J is not None and not J == Jk:
        return False
    D = Span.zero(M.P, M.rank) if D is None else D
    source_sub = Jk + F.I(1) + D
    piece = decomposition_free_quotient(F, D, k)
    T = _sigma_minus_one(M, k)
    # well defined: the subgroup lands in the denominator
    if not all(M.embed(T @ M.unembed(b)) in piece.bottom for b in source_sub.basis):
        return False
    # onto: the image of M is I^k M
    if not image_span(M, T) + piece.bottom == piece.top + piece.bottom:
        return False
    # injective: the preimage of the denominator is exactly the subgroup
    pre = Span([M.embed(g) for g in M.preimage(T, piece.bottom)], M.P, M.rank)
    if not pre == source_sub:
        return False
    source_order = full_span(M).order() // source_sub.order()
    return source_order == piece.order


def random_module(p: int, n: int, rng: np.random.Generator, max_log: int = 6, max_exponent: int = 2,
                  tries: int = 200) -> UModule:
    """A random module of order at most p^max_log: orders p^e_i, sigma = I + (lower triangular)."""
    for _ in range(tries):
        r = int(rng.integers(1, max_log + 1))
        exps = sorted(int(e) for e in rng.integers(1, max_exponent + 1, size=r))
        if sum(exps) > max_log:
            continue
        m = max(exps)
        if m > n:
            continue
        orders = np.array([p**e for e in exps], dtype=np.int64)
        Nl = np.tril(rng.integers(0, p**m, size=(r, r)), -1)
        S = np.eye(r, dtype=np.int64) + Nl
        # columns must respect the cyclic orders: entry (i, j) scaled when d_j < d_i
        for j in range(r):
            for i in range(r):
                if orders[i] > orders[j]:
                    S[i, j] = (S[i, j] * (orders[i] // orders[j])) % orders[i]
        try:
            return UModule(p, m, n, orders, S)
        except ValueError:
            continue
    raise RuntimeError("no random module found")


def random_stable_subgroup(M: UModule, rng: np.random.Generator) -> Span:
    g = M.reduce(rng.integers(0, M.P, size=M.rank))
    return M.closure_span([g])
