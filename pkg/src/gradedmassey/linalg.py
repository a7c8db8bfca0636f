"""Exact linear algebra over Z/N via Howell normal form.

A :class:`Span` is the subgroup of (Z/N)^d generated by a list of vectors.
Its Howell basis is canonical, so equality of spans is equality of bases,
membership is exact, and reduction modulo a span yields a canonical coset
representative.
"""

from __future__ import annotations

import math
from functools import reduce as _fold
from typing import Iterable, Sequence

import numpy as np


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def unit_normalizer(a: int, N: int) -> int:
    """A unit u of Z/N with u*a = gcd(a, N) (mod N)."""
    a %= N
    g = math.gcd(a, N)
    Np = N // g
    if Np == 1:
        u = 1
    else:
        u = pow(a // g, -1, Np)
    while math.gcd(u, N) != 1:
        u += Np
    return u % N


def lcm(values: Iterable[int]) -> int:
    return _fold(lambda x, y: x * y // math.gcd(x, y), values, 1)


def _as_matrix(rows, ncols: int, N: int) -> np.ndarray:
    if isinstance(rows, np.ndarray):
        A = rows.astype(np.int64, copy=True)
        if A.ndim == 1:
            A = A.reshape(1, -1)
        if A.size == 0:
            return np.zeros((0, ncols), dtype=np.int64)
    else:
        rows = [list(r) for r in rows]
        if not rows:
            return np.zeros((0, ncols), dtype=np.int64)
        A = np.array(rows, dtype=np.int64)
    if A.shape[1] != ncols:
        raise ValueError(f"expected {ncols} columns, got {A.shape[1]}")
    return A % N


def howell_form(rows, ncols: int, N: int) -> tuple[np.ndarray, list[int]]:
    """Howell basis (rows) and pivot columns of the span of ``rows`` in (Z/N)^ncols."""
    A = _as_matrix(rows, ncols, N)
    A = A[A.any(axis=1)]
    basis: list[np.ndarray] = []
    pivots: list[int] = []
    c = 0
    while A.shape[0] and c < ncols:
        nz_cols = np.flatnonzero(A[:, c:].any(axis=0))
        if nz_cols.size == 0:
            break
        c += int(nz_cols[0])
        col = A[:, c]
        idx = np.flatnonzero(col)
        rest = [A[i] for i in np.flatnonzero(col == 0)]
        piv = A[idx[0]].copy()
        for i in idx[1:]:
            r = A[i]
            a, b = int(piv[c]), int(r[c])
            g, s, t = xgcd(a, b)
            new = (s * piv + t * r) % N
            other = ((b // g) * piv - (a // g) * r) % N
            piv = new
            if other.any():
                rest.append(other)
        u = unit_normalizer(int(piv[c]), N)
        piv = (u * piv) % N
        g = int(piv[c])
        ann = ((N // g) * piv) % N
        if ann.any():
            rest.append(ann)
        basis.append(piv)
        pivots.append(c)
        A = np.array(rest, dtype=np.int64).reshape(-1, ncols) if rest else np.zeros((0, ncols), dtype=np.int64)
        A = A[A.any(axis=1)]
        c += 1
    for i in range(len(basis)):
        c = pivots[i]
        g = int(basis[i][c])
        for j in range(i):
            q = int(basis[j][c]) // g
            if q:
                basis[j] = (basis[j] - q * basis[i]) % N
    if basis:
        B = np.array(basis, dtype=np.int64)
    else:
        B = np.zeros((0, ncols), dtype=np.int64)
    return B, pivots


class Span:
    """Subgroup of (Z/N)^dim generated by ``gens``."""

    __slots__ = ("N", "dim", "basis", "pivots", "_key")

    def __init__(self, gens, N: int, dim: int):
        self.N = int(N)
        self.dim = int(dim)
        self.basis, self.pivots = howell_form(gens, self.dim, self.N)
        self._key = None

    @classmethod
    def zero(cls, N: int, dim: int) -> "Span":
        return cls([], N, dim)

    @classmethod
    def full(cls, N: int, dim: int) -> "Span":
        return cls(np.eye(dim, dtype=np.int64), N, dim)

    def reduce(self, v) -> np.ndarray:
        """Canonical representative of ``v`` modulo this span."""
        v = np.asarray(v, dtype=np.int64) % self.N
        for row, c in zip(self.basis, self.pivots):
            q = int(v[c]) // int(row[c])
            if q:
                v = (v - q * row) % self.N
        return v

    def __contains__(self, v) -> bool:
        return not self.reduce(v).any()

    def order(self) -> int:
        return math.prod(self.N // int(row[c]) for row, c in zip(self.basis, self.pivots))

    def log_order(self, p: int) -> int:
        o = self.order()
        e = 0
        while o % p == 0:
            o //= p
            e += 1
        if o != 1:
            raise ValueError("order is not a power of p")
        return e

    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.N, self.dim, tuple(map(tuple, self.basis.tolist())))
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, Span):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __le__(self, other: "Span") -> bool:
        return all(row in other for row in self.basis)

    def __add__(self, other: "Span") -> "Span":
        self._check(other)
        return Span(np.vstack([self.basis, other.basis]), self.N, self.dim)

    def _check(self, other: "Span"):
        if other.N != self.N or other.dim != self.dim:
            raise ValueError("spans live in different ambient groups")

    def is_zero(self) -> bool:
        return self.basis.shape[0] == 0

    def elements(self, limit: int = 1 << 16):
        """Enumerate every element (guarded by ``limit``)."""
        if self.order() > limit:
            raise ValueError(f"span has {self.order()} elements, above limit {limit}")
        ranges = [range(self.N // int(row[c])) for row, c in zip(self.basis, self.pivots)]
        out = []
        import itertools

        for coeffs in itertools.product(*ranges):
            v = np.zeros(self.dim, dtype=np.int64)
            for a, row in zip(coeffs, self.basis):
                if a:
                    v = v + a * row
            out.append(v % self.N)
        return out

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        for row in self.basis:
            v = v + int(rng.integers(self.N)) * row
        return v % self.N

    def __repr__(self):
        return f"Span(N={self.N}, dim={self.dim}, order={self.order()})"


def kernel(mat, N: int) -> Span:
    """All row vectors x with x @ mat = 0 over Z/N."""
    M = np.asarray(mat, dtype=np.int64) % N
    n, m = M.shape
    aug = np.hstack([M, np.eye(n, dtype=np.int64)])
    B, piv = howell_form(aug, m + n, N)
    rows = [B[i, m:] for i, c in enumerate(piv) if c >= m]
    return Span(rows, N, n)


class Solver:
    """Precomputed echelon data for repeated solves against fixed generators."""

    def __init__(self, gens, N: int):
        G = np.asarray(gens, dtype=np.int64) % N
        if G.ndim == 1:
            G = G.reshape(1, -1)
        self.N = N
        self.n, self.m = G.shape
        aug = np.hstack([G, np.eye(self.n, dtype=np.int64)])
        B, piv = howell_form(aug, self.m + self.n, N)
        keep = [i for i, c in enumerate(piv) if c < self.m]
        self.rows = B[keep]
        self.pivots = [piv[i] for i in keep]

    def __call__(self, target) -> np.ndarray | None:
        N, m = self.N, self.m
        v = np.concatenate([np.asarray(target, dtype=np.int64) % N, np.zeros(self.n, dtype=np.int64)])
        for row, c in zip(self.rows, self.pivots):
            q = int(v[c]) // int(row[c])
            if q:
                v = (v - q * row) % N
        if v[:m].any():
            return None
        return (-v[m:]) % N


def solve(gens, target, N: int) -> np.ndarray | None:
    """Coefficients c with sum c_i gens_i = target over Z/N, or None."""
    G = np.asarray(gens, dtype=np.int64)
    if G.size == 0:
        return np.zeros(0, dtype=np.int64) if not (np.asarray(target) % N).any() else None
    return Solver(G, N)(target)


def kernel_modulo(images, modulo, N: int) -> Span:
    """Coefficient vectors c with sum c_i images_i lying in span(modulo)."""
    Im = np.asarray(images, dtype=np.int64) % N
    if Im.ndim == 1:
        Im = Im.reshape(1, -1)
    n, m = Im.shape
    Mo = np.asarray(modulo, dtype=np.int64).reshape(-1, m) % N
    aug = np.vstack([
        np.hstack([Im, np.eye(n, dtype=np.int64)]),
        np.hstack([Mo, np.zeros((Mo.shape[0], n), dtype=np.int64)]),
    ])
    B, piv = howell_form(aug, m + n, N)
    rows = [B[i, m:] for i, c in enumerate(piv) if c >= m]
    return Span(rows, N, n)


def smith_invariants(relations: Sequence[Sequence[int]], ngens: int) -> list[int]:
    """Invariant factors (> 1) of Z^ngens / <relations>; 0 marks a free summand."""
    from sympy import Matrix, ZZ
    from sympy.matrices.normalforms import smith_normal_form

    if ngens == 0:
        return []
    rel = [list(map(int, r)) for r in relations]
    if not rel:
        return [0] * ngens
    S = smith_normal_form(Matrix(rel), domain=ZZ)
    diag = [abs(int(S[i, i])) for i in range(min(S.shape))]
    diag += [0] * (ngens - len(diag))
    return sorted(d for d in diag if d != 1)
