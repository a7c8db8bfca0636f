"""Defining systems, Massey cocycles and their transgression formula on finite Kummer models.

The finite model
----------------
``G = <sigma>`` is cyclic of order ``q = p^n`` and ``R = Z/p^m``.  A finite
``R[G]``-module ``U`` (the model of ``L^x / L^x p^m``) is given by cyclic orders
``d_i | p^m`` and an integer matrix ``S`` for the action of ``sigma``.  Its dual
``U^v = Hom(U, Z/p^m)`` is stored *embedded*: a character is a vector ``v`` in
``(Z/p^m)^r`` with ``v_i`` a multiple of ``p^m / d_i`` and pairing ``v(u) = v . u``.
``sigma`` acts on characters by ``(sigma v)(u) = v(sigma^-1 u)``.

The Galois group of the maximal Kummer extension is modelled by

    Gamma^ = U^v x| <s>,   (v, i)(w, j) = (v + sigma^i w + [i + j >= q] z, i + j mod q)

where ``z`` is a ``sigma``-invariant character (the value of ``s^q``).  A
``sigma``-stable subgroup ``W`` of ``U`` plays the role of the elements that become
``p^m``-th powers in the top field; its annihilator ``W^perp`` is the subgroup
fixing the top field and ``Gamma = Gamma^ / W^perp``.  An optional central cyclic
factor models a top field enlarged by an extension unrelated to ``U``.

Characters: ``chi(v, i) = i`` and ``lambda(v, i) = v(N y) + i z(y)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gcohom import (Cochain, GModule, Quotient, SubgroupCharacter, h2_class_eq,
                     is_cocycle, quotient_representatives, spaces, transgression)
from .groupring import GroupRing, GroupRingElement, d_operator
from .groups import FiniteGroup
from .linalg import Span, kernel, kernel_modulo
from .residue import is_prime, r_k0
from .unipotent import NModule, UnipotentMatrix, twisted_x

U_LIMIT = 3**8
GENERIC_TRANSGRESSION_LIMIT = 512


class NotProper(Exception):
    """D^(k-1) y does not vanish in the model."""


# the module U ---------------------------------------------------------------------------

class UModule:
    """Finite module over (Z/p^m)[C_{p^n}] given by cyclic orders and the matrix of sigma."""

    def __init__(self, p: int, m: int, n: int, orders: Sequence[int], S):
        if not is_prime(p) or not 1 <= m <= n:
            raise ValueError("need p prime and 1 <= m <= n")
        self.p, self.m, self.n = p, m, n
        self.P = p**m
        self.q = p**n
        self.orders = np.array([int(d) for d in orders], dtype=np.int64)
        r = len(self.orders)
        if any(self.P % int(d) for d in self.orders):
            raise ValueError("cyclic orders must divide p^m")
        self.e = self.P // self.orders if r else self.orders.copy()
        S = np.asarray(S, dtype=np.int64).reshape(r, r)
        self.S = self._red_cols(S)
        # column j of S is the image of basis vector j, so it must be killed by d_j
        if r and (self._red_cols(S * self.orders[None, :])).any():
            raise ValueError("sigma matrix is not well defined on the cyclic orders")
        pows = [np.eye(r, dtype=np.int64)]
        for _ in range(self.q):
            pows.append(self._red_cols(self.S @ pows[-1]))
        if not np.array_equal(pows[self.q], self._red_cols(np.eye(r, dtype=np.int64))):
            raise ValueError("sigma^(p^n) does not act trivially")
        self.Spow = pows[: self.q]
        # dual action: (sigma^i v) = (S^-i)^T v on embedded characters
        self.Sdual = [self.Spow[(-i) % self.q].T.copy() for i in range(self.q)]

    def _red_cols(self, A):
        return np.mod(A, self.orders[:, None]) if len(self.orders) else A

    # constructors

    @classmethod
    def truncated_group_ring(cls, p: int, m: int, n: int, s: int, exponent: int | None = None) -> "UModule":
        """(Z/p^e)[x]/(x^s) with sigma = 1 + x, e = ``exponent`` (default m)."""
        e = m if exponent is None else exponent
        S = np.eye(s, dtype=np.int64)
        for j in range(s - 1):
            S[j + 1, j] = 1
        return cls(p, m, n, [p**e] * s, S)

    @classmethod
    def direct_sum(cls, *mods: "UModule") -> "UModule":
        p, m, n = mods[0].p, mods[0].m, mods[0].n
        r = sum(M.rank for M in mods)
        S = np.zeros((r, r), dtype=np.int64)
        at = 0
        for M in mods:
            S[at:at + M.rank, at:at + M.rank] = M.S
            at += M.rank
        return cls(p, m, n, np.concatenate([M.orders for M in mods]), S)

    @classmethod
    def zero(cls, p: int, m: int, n: int) -> "UModule":
        return cls(p, m, n, [], np.zeros((0, 0), dtype=np.int64))

    # basic structure

    @property
    def rank(self) -> int:
        return len(self.orders)

    def size(self) -> int:
        return int(np.prod(self.orders)) if self.rank else 1

    def reduce(self, u) -> np.ndarray:
        return np.mod(np.asarray(u, dtype=np.int64), self.orders)

    def act(self, i: int, u) -> np.ndarray:
        return self.reduce(self.Spow[i % self.q] @ np.asarray(u, dtype=np.int64))

    def operator(self, x) -> np.ndarray:
        """Matrix of a group-ring element (coefficient vector indexed by sigma^i)."""
        c = np.asarray(x.coeffs if isinstance(x, GroupRingElement) else x, dtype=np.int64)
        T = np.zeros((self.rank, self.rank), dtype=np.int64)
        for i, a in enumerate(c):
            if a:
                T = T + int(a) * self.Spow[i % self.q]
        return self._red_cols(T)

    def apply(self, x, u) -> np.ndarray:
        return self.reduce(self.operator(x) @ np.asarray(u, dtype=np.int64))

    def embed(self, u) -> np.ndarray:
        return (self.reduce(u) * self.e) % self.P

    def elements(self):
        for t in itertools.product(*[range(int(d)) for d in self.orders]):
            yield np.array(t, dtype=np.int64)

    def closure_span(self, gens) -> Span:
        """The sigma-stable subgroup generated by ``gens``, embedded in (Z/p^m)^r."""
        rows = [self.embed(self.act(i, g)) for g in gens for i in range(self.q)]
        return Span(rows, self.P, self.rank)

    def unembed(self, w) -> np.ndarray:
        return (np.asarray(w, dtype=np.int64) // self.e) % self.orders

    # the dual

    def dual_span(self) -> Span:
        return Span(np.diag(self.e), self.P, self.rank)

    def dual_act(self, i: int, v) -> np.ndarray:
        return (self.Sdual[i % self.q] @ np.asarray(v, dtype=np.int64)) % self.P

    def pair(self, v, u) -> int:
        return int(np.dot(np.asarray(v, dtype=np.int64), self.reduce(u)) % self.P)

    def annihilator(self, W: Span) -> Span:
        """Embedded characters vanishing on the embedded subgroup ``W``."""
        if not self.rank:
            return Span.zero(self.P, 0)
        # v = e * a; v(w) = sum a_i * w~_i with w~ the embedded element
        mat = np.array(W.basis, dtype=np.int64).reshape(-1, self.rank).T if len(W.basis) else \
            np.zeros((self.rank, 0), dtype=np.int64)
        if mat.shape[1] == 0:
            return self.dual_span()
        K = kernel(mat, self.P)
        rows = [(np.mod(a, self.orders) * self.e) % self.P for a in K.basis]
        return Span(rows, self.P, self.rank)

    def invariant_characters(self) -> Span:
        if not self.rank:
            return Span.zero(self.P, 0)
        D = self.Sdual[1] - np.eye(self.rank, dtype=np.int64)
        rows = np.array([(D @ (self.e * np.eye(self.rank, dtype=np.int64)[i])) % self.P
                         for i in range(self.rank)])
        K = kernel(rows, self.P)
        return Span([(np.mod(a, self.orders) * self.e) % self.P for a in K.basis], self.P, self.rank)

    def preimage(self, T: np.ndarray, target: Span) -> list[np.ndarray]:
        """Generators of {u : T u in target} (``target`` embedded)."""
        images = [self.embed(T[:, i] % self.orders) for i in range(self.rank)]
        if not images:
            return []
        K = kernel_modulo(images, list(target.basis), self.P)
        gens = [self.reduce(a) for a in K.basis]
        gens += [self.reduce(self.orders[i] * np.eye(self.rank, dtype=np.int64)[i]) for i in range(self.rank)]
        return [g for g in gens if g.any()]

    def __eq__(self, other):
        return (isinstance(other, UModule) and (self.p, self.m, self.n) == (other.p, other.m, other.n)
                and np.array_equal(self.orders, other.orders) and np.array_equal(self.S, other.S))

    def __repr__(self):
        return f"UModule(p={self.p}, m={self.m}, n={self.n}, orders={self.orders.tolist()})"


# instances ----------------------------------------------------------------------------------

@dataclass
class SyntheticKummerInstance:
    """(p, m, n, k), the module U, the element y, the invariant character z and W."""

    p: int
    m: int
    n: int
    k: int
    U: UModule
    y: np.ndarray
    z: np.ndarray
    w_gens: list = field(default_factory=list)
    central: int = 1
    auto_w: bool = True            # W also contains D^(k-1)y (so the instance is proper)

    def __post_init__(self):
        p, m, n, k = self.p, self.m, self.n, self.k
        if (self.U.p, self.U.m, self.U.n) != (p, m, n):
            raise ValueError("module parameters differ from instance parameters")
        if k < 1 or k > p**n - 1 or m + r_k0(k, p) > n:
            raise ValueError("need 1 <= k <= p^n - 1 and m + r_k <= n")
        if self.central < 1:
            raise ValueError("central factor order must be positive")
        self.y = self.U.reduce(self.y)
        self.z = np.asarray(self.z, dtype=np.int64) % self.U.P
        if self.z not in self.U.dual_span() or not np.array_equal(self.U.dual_act(1, self.z), self.z):
            raise ValueError("z must be a sigma-invariant character")
        self.w_gens = [self.U.reduce(w) for w in self.w_gens]
        self._cache: dict = {}

    # group-ring data

    @property
    def q(self) -> int:
        return self.p**self.n

    @property
    def P(self) -> int:
        return self.p**self.m

    @property
    def ring(self) -> GroupRing:
        if "ring" not in self._cache:
            self._cache["ring"] = GroupRing.cyclic(self.p, self.n, self.P)
        return self._cache["ring"]

    def D(self, j: int, u=None, power: int = 1) -> np.ndarray:
        """D^(j) (for the generator sigma^power) applied to u (default y)."""
        u = self.y if u is None else u
        return self.U.apply(d_operator(j, self.ring, power), u)

    def norm_y(self) -> np.ndarray:
        return self.D(0)

    @property
    def t(self) -> int:
        return self.U.pair(self.z, self.y)

    @property
    def W(self) -> Span:
        if "W" not in self._cache:
            self._cache["W"] = self.U.closure_span(([self.D(self.k - 1)] if self.auto_w else [])
                                                + list(self.w_gens))
        return self._cache["W"]

    def is_proper(self) -> bool:
        return self.U.embed(self.D(self.k - 1)) in self.W

    def require_proper(self):
        if not self.is_proper():
            raise NotProper("D^(k-1)y nonvanishing")

    # the group Gamma

    @property
    def Wperp(self) -> Span:
        if "Wperp" not in self._cache:
            self._cache["Wperp"] = self.U.annihilator(self.W)
        return self._cache["Wperp"]

    def hat_mul(self, a, b):
        (v1, i1, e1), (v2, i2, e2) = a, b
        v = np.asarray(v1) + self.U.dual_act(i1, v2)
        if i1 + i2 >= self.q:
            v = v + self.z
        return (v % self.P, (i1 + i2) % self.q, (e1 + e2) % self.central)

    def hat_inv(self, a):
        v, i, e = a
        if i == 0:
            return ((-np.asarray(v)) % self.P, 0, (-e) % self.central)
        w = (-self.U.dual_act(-i, v) - self.z) % self.P
        return (w, self.q - i, (-e) % self.central)

    def hat_pow(self, a, e: int):
        if e < 0:
            return self.hat_pow(self.hat_inv(a), -e)
        out = (np.zeros(self.U.rank, dtype=np.int64), 0, 0)
        for _ in range(e):
            out = self.hat_mul(out, a)
        return out

    def canon(self, a):
        v, i, e = a
        return (tuple(self.Wperp.reduce(v).tolist()), i, e)

    @property
    def gamma(self) -> FiniteGroup:
        if "gamma" not in self._cache:
            self.require_proper()
            reps = quotient_representatives(self.U.dual_span(), self.Wperp)
            labels = [(tuple(r.tolist()), i, e) for e in range(self.central) for i in range(self.q) for r in reps]

            def mul(a, b):
                return self.canon(self.hat_mul(a, b))
            self._cache["gamma"] = FiniteGroup(labels, mul, "Gamma")
        return self._cache["gamma"]

    def gamma_order(self) -> int:
        return self.q * self.W.order() * self.central

    def hat(self, g: int):
        v, i, e = self.gamma.labels[g]
        return (np.array(v, dtype=np.int64), i, e)

    @property
    def chi(self) -> list[int]:
        return [lab[1] for lab in self.gamma.labels]

    @property
    def lam(self) -> list[int]:
        Ny = self.norm_y()
        return [(self.U.pair(np.array(v), Ny) + i * self.t) % self.P for v, i, _ in self.gamma.labels]

    def module(self, P: int | None = None) -> GModule:
        """Trivial coefficient module Z/P on Gamma (cached so classes compare)."""
        P = self.P if P is None else P
        key = ("module", P)
        if key not in self._cache:
            self._cache[key] = GModule.trivial(self.gamma, [P])
        return self._cache[key]

    # variations

    def with_w(self, extra) -> "SyntheticKummerInstance":
        return SyntheticKummerInstance(self.p, self.m, self.n, self.k, self.U, self.y, self.z,
                                       list(self.w_gens) + [self.U.reduce(w) for w in extra], self.central,
                                       self.auto_w)

    def with_central(self, order: int) -> "SyntheticKummerInstance":
        return SyntheticKummerInstance(self.p, self.m, self.n, self.k, self.U, self.y, self.z,
                                       list(self.w_gens), order, self.auto_w)

    def with_y(self, y) -> "SyntheticKummerInstance":
        return SyntheticKummerInstance(self.p, self.m, self.n, self.k, self.U, y, self.z,
                                       list(self.w_gens), self.central, self.auto_w)

    def __eq__(self, other):
        return (isinstance(other, SyntheticKummerInstance)
                and (self.p, self.m, self.n, self.k, self.central, self.auto_w)
                == (other.p, other.m, other.n, other.k, other.central, other.auto_w)
                and self.U == other.U and np.array_equal(self.y, other.y) and np.array_equal(self.z, other.z)
                and len(self.w_gens) == len(other.w_gens)
                and all(np.array_equal(a, b) for a, b in zip(self.w_gens, other.w_gens)))


# frames: choices of zeta, of the lift, and of the levels n', m' ----------------------------------

@dataclass(frozen=True)
class Frame:
    """Coordinates in which the product is computed.

    ``power`` j replaces zeta by zeta^j (so sigma by sigma^j and every Kummer value
    by j^-1 times itself); ``lift`` is the character part v0 of the lift
    (v0, 0) s^j of the new sigma; ``n_level`` and ``m_level`` shrink L and the
    coefficient modulus.
    """

    power: int = 1
    lift: tuple | None = None
    lift_central: int = 0
    n_level: int | None = None
    m_level: int | None = None


class _FrameData:
    def __init__(self, inst: SyntheticKummerInstance, frame: Frame):
        p = inst.p
        self.inst, self.frame = inst, frame
        self.n = inst.n if frame.n_level is None else frame.n_level
        self.m = inst.m if frame.m_level is None else frame.m_level
        if not (1 <= self.m <= inst.m and self.m <= self.n <= inst.n):
            raise ValueError("invalid levels")
        if self.m + r_k0(inst.k, p) > self.n:
            raise ValueError("need m' + r_k <= n'")
        if math.gcd(frame.power, p) != 1:
            raise ValueError("zeta power must be prime to p")
        self.q = p**self.n
        self.P = p**self.m
        self.j = frame.power % self.q
        self.jinv = pow(self.j, -1, inst.q)
        U = inst.U
        # elements of the intermediate field L' = fixed field of sigma^q', as norms from L
        self.norm_down = U.operator(_relative_norm(inst, self.n))
        self.y = U.reduce(self.norm_down @ inst.y)
        self.ring = GroupRing.cyclic(p, self.n, self.P)
        zero = np.zeros(U.rank, dtype=np.int64)
        v0 = zero if frame.lift is None else np.asarray(frame.lift, dtype=np.int64) % inst.P
        if v0 not in U.dual_span():
            raise ValueError("lift is not a character")
        self.lift = inst.hat_mul((v0, 0, frame.lift_central % inst.central), inst.hat_pow((zero, 1, 0), self.j))

    def value(self, x: int) -> int:
        """A Kummer value (mod p^m, for zeta) in frame coordinates."""
        return (self.jinv * x) % self.P

    def chi(self, a) -> int:
        return (self.jinv * a[1]) % self.q

    def kummer(self, nu, u) -> int:
        """Kummer character of N_{L/L'} u at nu in G_{L'} (frame coordinates)."""
        v, i, _ = nu
        if i % self.q:
            raise ValueError("element outside G_L'")
        i_rel = i // self.q
        val = self.inst.U.pair(v, self.norm_down @ u) + i_rel * self.inst.U.pair(self.inst.z, u)
        return self.value(val)

    def lam(self, a) -> int:
        v, i, _ = a
        return self.value(self.inst.U.pair(v, self.inst.norm_y()) + i * self.inst.t)

    def D(self, j: int, u) -> np.ndarray:
        """D^(j) over G' = <sigma^power> acting on u in L'."""
        return self.inst.U.apply(_lift_operator(d_operator(j, self.ring, self.j), self.inst.q), u)

    def W_level(self) -> Span:
        """Elements that are p^m'-th powers in the top field."""
        inst = self.inst
        if self.m == inst.m:
            return inst.W
        # u with p^(m-m') v(u) = 0 for every v in W^perp
        U = inst.U
        shift = inst.p ** (inst.m - self.m)
        if len(inst.Wperp.basis) == 0:
            return Span(np.diag(U.e), inst.P, U.rank)
        images = [np.array([(shift * int(v[i])) % inst.P for v in inst.Wperp.basis], dtype=np.int64)
                  for i in range(U.rank)]
        K = kernel_modulo(images, [], inst.P)
        gens = [U.embed(U.reduce(a)) for a in K.basis]
        return Span(gens, inst.P, U.rank)


def _relative_norm(inst: SyntheticKummerInstance, n_level: int) -> GroupRingElement:
    """sum of sigma^(l p^n') over l < p^(n - n')."""
    c = np.zeros(inst.q, dtype=np.int64)
    step = inst.p**n_level
    c[::step] = 1
    return inst.ring.elem(c)


def _lift_operator(x: GroupRingElement, q: int) -> np.ndarray:
    """A group-ring element of a quotient C_q' viewed on sigma^i, i < q'."""
    c = np.zeros(q, dtype=np.int64)
    c[: len(x.coeffs)] = x.coeffs
    return c


# defining systems ----------------------------------------------------------------------------

class DefiningSystem:
    """kappa_{i,j} for 1 <= i < j <= q+1, (i,j) != (1,q+1), as value arrays on the group."""

    def __init__(self, q: int, group: FiniteGroup, N: int, kappa: dict, module: GModule | None = None):
        self.q, self.group, self.N = q, group, N
        self.kappa = {key: np.asarray(v, dtype=np.int64) % N for key, v in kappa.items()}
        want = {(i, j) for i in range(1, q + 1) for j in range(i + 1, q + 2)} - {(1, q + 1)}
        if set(self.kappa) != want:
            raise ValueError("defining system needs every kappa_{i,j} except the corner")
        self.module = module or GModule.trivial(group, [N])

    def condition_c(self) -> bool:
        T = self.group.table
        for (i, j), vals in self.kappa.items():
            lhs = vals[T]
            rhs = vals[:, None] + vals[None, :]
            for l in range(i + 1, j):
                rhs = rhs + np.outer(self.kappa[(i, l)], self.kappa[(l, j)])
            if not np.array_equal(lhs % self.N, rhs % self.N):
                return False
        return True

    def has_characters(self, chars: Sequence[Sequence[int]]) -> bool:
        """kappa_{i,i+1} = chars[i-1]."""
        return all(np.array_equal(self.kappa[(i, i + 1)], np.asarray(chars[i - 1]) % self.N)
                   for i in range(1, self.q + 1))

    def verify(self):
        if not self.condition_c():
            raise ValueError("defining system violates the multiplicativity condition")

    def matrices(self) -> list[UnipotentMatrix]:
        """Each element's matrix in T_{q+1} with corner 0."""
        s = self.q + 1
        out = []
        for g in range(self.group.order):
            a = np.eye(s, dtype=np.int64)
            for (i, j), vals in self.kappa.items():
                a[i - 1, j - 1] = vals[g]
            out.append(UnipotentMatrix(a, self.N))
        return out


def canonical_kappa(chi: Sequence[int], i: int, j: int, p: int, m: int, n: int, k: int | None = None) -> np.ndarray:
    """C(chi~(h), j - i) mod p^m with chi~ in [0, p^n)."""
    if j <= i:
        raise ValueError("need i < j")
    span = j - i if k is None else k
    if j - i > span or m + r_k0(span, p) > n:
        raise ValueError("need j - i <= k and m + r_k <= n")
    return np.array([math.comb(int(c) % p**n, j - i) % p**m for c in chi], dtype=np.int64)


def massey_cocycle(D: DefiningSystem, check: bool = True) -> Cochain:
    """nu(s1, s2) = sum_{i=2}^{q} kappa_{1,i}(s1) kappa_{i,q+1}(s2)."""
    if check:
        D.verify()
    q = D.q
    vals = np.zeros((D.group.order, D.group.order), dtype=np.int64)
    for i in range(2, q + 1):
        vals = (vals + np.outer(D.kappa[(1, i)], D.kappa[(i, q + 1)])) % D.N
    c = Cochain(D.module, 2, vals[..., None])
    if check and not is_cocycle(c):
        raise AssertionError("Massey cochain is not a cocycle")
    return c


def obstruction_cocycle(D: DefiningSystem) -> Cochain:
    """Corner of f(s1) f(s2) f(s1 s2)^-1 for the corner-zero section f; Z is read as 1."""
    mats = D.matrices()
    G = D.group
    s = D.q + 1
    inv = [M.inverse() for M in mats]
    vals = np.zeros((G.order, G.order, 1), dtype=np.int64)
    for a in range(G.order):
        for b in range(G.order):
            X = mats[a] * mats[b] * inv[G.mul(a, b)]
            vals[a, b, 0] = X[1, s]
    return Cochain(D.module, 2, vals)


def cup_product_system(chi1: Sequence[int], chi2: Sequence[int], group: FiniteGroup, N: int,
                       module: GModule | None = None) -> DefiningSystem:
    return DefiningSystem(2, group, N, {(1, 2): chi1, (2, 3): chi2}, module)


# the homomorphism and the proper defining system ------------------------------------------------

class _Rho:
    """rho(a) = V(a s~^-chi(a)) X'^chi(a) on elements of Gamma^."""

    def __init__(self, inst: SyntheticKummerInstance, fd: _FrameData):
        self.inst, self.fd = inst, fd
        self.mod = NModule(inst.k, inst.p, fd.m, fd.n)
        Xp = twisted_x(inst.k, inst.p, fd.m, fd.lam(fd.lift))
        self.powers = [Xp**i for i in range(fd.q)]
        self.lift_inv = [inst.hat_pow(fd.lift, -i) for i in range(fd.q)]
        # kummer() applies N_{L/L'} itself, so these are translates of y in L
        self.ys = [inst.U.act(g * fd.j, inst.y) for g in range(fd.q)]

    def __call__(self, a) -> UnipotentMatrix:
        i = self.fd.chi(a)
        nu = self.inst.hat_mul(a, self.lift_inv[i])
        w = np.array([self.fd.kummer(nu, u) for u in self.ys], dtype=np.int64)
        return self.mod.to_matrix(self.fd.ring.elem(w)) * self.powers[i]


def _rho_matrices(inst: SyntheticKummerInstance, fd: _FrameData) -> list[UnipotentMatrix]:
    rho = _Rho(inst, fd)
    return [rho(inst.hat(g)) for g in range(inst.gamma.order)]


def rho_homomorphism_check(inst: SyntheticKummerInstance, frame: Frame = Frame(), samples: int = 200,
                           seed: int = 0) -> bool:
    """rho^(k) is a homomorphism on Gamma^ (exhaustive on generators when small, else sampled)."""
    rho = _Rho(inst, _FrameData(inst, frame))
    U = inst.U
    zero = np.zeros(U.rank, dtype=np.int64)
    gens = [(np.asarray(v) % inst.P, 0, 0) for v in U.dual_span().basis] + [(zero, 1, 0)]
    if inst.central > 1:
        gens.append((zero, 0, 1))
    rng = np.random.default_rng(seed)
    duals = U.dual_span()
    for _ in range(samples):
        a = (duals.random_element(rng), int(rng.integers(inst.q)), int(rng.integers(inst.central)))
        for g in gens:
            if rho(inst.hat_mul(a, g)) != rho(a) * rho(g):
                return False
    return True


def proper_defining_system(inst: SyntheticKummerInstance, frame: Frame = Frame()) -> DefiningSystem:
    """kappa_{i,j} read off the matrices V(nu) X'^chi of the representatives of Gamma."""
    inst.require_proper()
    fd = _FrameData(inst, frame)
    rho = _rho_matrices(inst, fd)
    k = inst.k
    kappa = {}
    for i in range(1, k + 2):
        for j in range(i + 1, k + 3):
            if (i, j) != (1, k + 2):
                kappa[(i, j)] = np.array([M[i, j] for M in rho], dtype=np.int64)
    D = DefiningSystem(k + 1, inst.gamma, fd.P, kappa, inst.module(fd.P))
    D.verify()
    chi = [fd.chi(inst.hat(g)) for g in range(inst.gamma.order)]
    for i in range(1, k + 1):
        for j in range(i + 1, k + 2):
            if not np.array_equal(kappa[(i, j)], canonical_kappa(chi, i, j, inst.p, fd.m, fd.n, k)):
                raise AssertionError("upper block differs from the binomial system")
    lam = [fd.lam(inst.hat(g)) for g in range(inst.gamma.order)]
    if not D.has_characters([[c % fd.P for c in chi]] * k + [lam]):
        raise AssertionError("defining system has the wrong characters")
    return D


# transgression on the model ------------------------------------------------------------------------

def _tra_section(inst: SyntheticKummerInstance, u, P: int, scale: int = 1) -> Cochain:
    """Tra of v -> scale * v(u) on W^perp: c(g1, g2) = -f(r1 r2 r12^-1)."""
    G = inst.gamma
    n = G.order
    T = G.table
    V = np.array([lab[0] for lab in G.labels], dtype=np.int64)
    I = np.array([lab[1] for lab in G.labels], dtype=np.int64)
    uu = inst.U.reduce(u)
    pv = V @ uu                                  # v(u) for representatives
    # v(sigma^i w) = w(sigma^-i u)
    acted = np.array([inst.U.act(-i, uu) for i in range(inst.q)])
    cross = V @ acted.T                          # cross[b, i] = v_b(sigma^-i u)
    wrap = (I[:, None] + I[None, :]) >= inst.q
    x = pv[:, None] + cross[:, I].T + wrap * inst.U.pair(inst.z, uu)
    tau = x - pv[T]
    vals = (-scale * tau) % P
    return Cochain(inst.module(P), 2, vals.reshape(n, n, 1))


def _tra_generic(inst: SyntheticKummerInstance, u, P: int, scale: int = 1) -> Cochain:
    """Tra through gcohom on the enumerated group Gamma^ (small models)."""
    U = inst.U
    duals = [np.array(v, dtype=np.int64) for v in U.dual_span().elements()]
    zero = tuple([0] * U.rank)
    labels = [(tuple(v.tolist()), i, e) for e in range(inst.central) for i in range(inst.q) for v in duals]
    labels.remove((zero, 0, 0))
    labels.insert(0, (zero, 0, 0))

    def mul(a, b):
        v, i, e = inst.hat_mul(a, b)
        return (tuple(v.tolist()), i, e)
    H = FiniteGroup(labels, mul, "Gamma^")
    N = [H.index[(tuple(v.tolist()), 0, 0)] for v in inst.Wperp.elements()]
    quot = Quotient.of(H, N)
    M = GModule.trivial(H, [P])
    uu = U.reduce(u)
    f = SubgroupCharacter(quot, M, {t: np.array([(scale * U.pair(np.array(H.labels[t][0]), uu)) % P])
                                    for t in quot.N})
    c = transgression(f, check=True)
    # re-index from the quotient to Gamma
    G = inst.gamma
    to_q = [quot.proj[H.index[G.labels[g]]] for g in range(G.order)]
    vals = c.values[np.ix_(to_q, to_q)]
    return Cochain(inst.module(P), 2, vals)


def transgression_class(inst: SyntheticKummerInstance, u, P: int | None = None, scale: int = 1,
                        generic: bool | None = None) -> Cochain:
    """Tra of the Kummer character of u restricted to the top field."""
    P = inst.P if P is None else P
    c = _tra_section(inst, u, P, scale)
    if generic is None:
        generic = inst.q * inst.U.size() * inst.central <= GENERIC_TRANSGRESSION_LIMIT
    if generic:
        g = _tra_generic(inst, u, P, scale)
        if not h2_class_eq(c, g, check=False):
            raise AssertionError("transgression routes disagree")
    return c


# P^(k) and Massey classes ------------------------------------------------------------------------

@dataclass
class MasseyClass:
    cocycle: Cochain
    P: Span
    k: int

    def __eq__(self, other) -> bool:
        return h2_class_eq(self.cocycle, other.cocycle, modulo=self.P + other.P, check=False)

    def equals(self, other: Cochain) -> bool:
        return h2_class_eq(self.cocycle, other, modulo=self.P, check=False)

    def is_zero(self) -> bool:
        sp = spaces(self.cocycle.module)
        return self.cocycle.embedded() in sp.B(2) + self.P


def p_group(inst: SyntheticKummerInstance, j: int, frame: Frame = Frame()) -> Span:
    """P^(j): span of Tra[D^(j) y'] over y' with D^(j-1) y' vanishing in the top field."""
    fd = _FrameData(inst, frame)
    n_cells = inst.gamma.order**2
    if j == 0:
        return Span.zero(fd.P, n_cells)
    if inst.U.size() > U_LIMIT:
        raise ValueError("module too large for P^(k)")
    if fd.m + r_k0(j, inst.p) > fd.n:
        raise ValueError("need m + r_j <= n")
    U = inst.U
    Wl = fd.W_level()
    Dprev = U.operator(_lift_operator(d_operator(j - 1, fd.ring, fd.j), inst.q)) @ fd.norm_down
    gens = U.preimage(U._red_cols(Dprev), Wl)
    rows = []
    for x in gens:
        yprime = U.reduce(fd.norm_down @ x)
        c = transgression_class(inst, fd.D(j, yprime), fd.P, fd.jinv, generic=False)
        rows.append(c.embedded())
    return Span(rows, fd.P, n_cells)


def massey_class(inst: SyntheticKummerInstance, frame: Frame = Frame()) -> MasseyClass:
    """Class of the proper defining system's cocycle modulo P^(k-1)."""
    D = proper_defining_system(inst, frame)
    return MasseyClass(massey_cocycle(D), p_group(inst, inst.k - 1, frame), inst.k)


def tra_ck(inst: SyntheticKummerInstance, frame: Frame = Frame(), generic: bool | None = None) -> Cochain:
    fd = _FrameData(inst, frame)
    return transgression_class(inst, fd.D(inst.k, fd.y), fd.P, fd.jinv, generic=generic)


def transgression_sign(k: int) -> int:
    """Sign e with [Massey cocycle] = e Tra[D^(k) y] on the finite models."""
    return -1 if k % 2 == 0 else 1


def massey_via_transgression(inst: SyntheticKummerInstance, frame: Frame = Frame(),
                             check: bool = True) -> MasseyClass:
    """Tra_Omega [D^(k) y] modulo P^(k-1).

    With ``check`` the class is compared with the cocycle of the proper defining
    system, which it matches up to ``transgression_sign(k)``.
    """
    inst.require_proper()
    P = p_group(inst, inst.k - 1, frame)
    tra = MasseyClass(tra_ck(inst, frame), P, inst.k)
    if check:
        cls = MasseyClass(massey_cocycle(proper_defining_system(inst, frame)), P, inst.k)
        if not cls.equals(transgression_sign(inst.k) * tra.cocycle):
            raise AssertionError("Massey cocycle and transgression disagree")
    return tra


def masseytrans_holds(inst: SyntheticKummerInstance, sign: int = 1, frame: Frame = Frame()) -> bool:
    """[Massey cocycle] == sign * Tra[D^(k) y] modulo P^(k-1)."""
    cls = massey_class(inst, frame)
    return cls.equals(sign * tra_ck(inst, frame))


# independence and compatibility ---------------------------------------------------------------------

def rescale_identity(p: int, n: int, m: int, k: int, j: int) -> bool:
    """j^k (sigma - 1)^k D_{sigma^j}^(k) = N_G in (Z/p^m)[G]."""
    R = GroupRing.cyclic(p, n, p**m)
    lhs = pow(j, k, p**m) * R.aug_gen() ** k * d_operator(k, R, j)
    return lhs == R.norm()


def zeta_rescale_check(inst: SyntheticKummerInstance, j: int) -> bool:
    """Replacing zeta by zeta^j rescales the class by j^(k+1) and keeps P^(k-1)."""
    k = inst.k
    if not rescale_identity(inst.p, inst.n, inst.m, k, j):
        return False
    base = massey_class(inst)
    other = massey_class(inst, Frame(power=j))
    if not base.P == other.P:
        return False
    # values in zeta^j coordinates become j^(k+1) times themselves in zeta coordinates
    return base.equals(pow(j, k + 1, inst.P) * other.cocycle)


def lift_independence_check(inst: SyntheticKummerInstance) -> bool:
    """The class does not depend on the lift of sigma (all lifts in Gamma)."""
    base = massey_class(inst)
    reps = quotient_representatives(inst.U.dual_span(), inst.Wperp)
    for v0 in reps:
        for e in range(inst.central):
            other = massey_cocycle(proper_defining_system(inst, Frame(lift=tuple(v0.tolist()), lift_central=e)))
            if not base.equals(other):
                return False
    return True


def twist_y_check(inst: SyntheticKummerInstance, x) -> bool:
    """y -> y + (sigma - 1) x with D^(k-2) x vanishing moves the class inside P^(k-1)."""
    k = inst.k
    if k >= 2 and inst.U.embed(inst.D(k - 2, x)) not in inst.W:
        raise ValueError("D^(k-2) x does not vanish")
    y2 = inst.U.reduce(inst.y + inst.U.act(1, x) - inst.U.reduce(x))
    other = inst.with_y(y2)
    if not np.array_equal(other.W.basis, inst.W.basis):
        raise AssertionError("twisting y changed the top field")
    a = massey_class(inst)
    b = massey_cocycle(proper_defining_system(other))
    if b.module.group.labels != a.cocycle.module.group.labels:
        raise AssertionError("twisting y changed the group")
    return a.equals(Cochain(a.cocycle.module, 2, b.values))


def _reduce_cochain(c: Cochain, module: GModule) -> Cochain:
    return Cochain(module, c.degree, c.values % module.orders)


def compat_shrink_n(inst: SyntheticKummerInstance, n_level: int) -> bool:
    """L' inside L of degree p^n' over K: the class maps to the class for L'."""
    big = massey_class(inst)
    small = massey_class(inst, Frame(n_level=n_level))
    sp = spaces(inst.module())
    if not all(b in sp.B(2) + small.P for b in big.P.basis):
        return False
    return small.equals(big.cocycle)


def compat_shrink_m(inst: SyntheticKummerInstance, m_level: int) -> bool:
    """Reduction Z/p^m -> Z/p^m' takes the class to the class for m'."""
    big = massey_class(inst)
    small = massey_class(inst, Frame(m_level=m_level))
    M = inst.module(inst.p**m_level)
    sp = spaces(M)
    for b in big.P.basis:
        red = _reduce_cochain(spaces(inst.module()).cochain_from_embedded(b, 2), M)
        if red.embedded() not in sp.B(2) + small.P:
            return False
    return small.equals(_reduce_cochain(big.cocycle, M))


def inflation_map(big: SyntheticKummerInstance, small: SyntheticKummerInstance) -> list[int]:
    """Gamma(big top field) -> Gamma(small top field); W(small) must lie in W(big)."""
    if not all(w in big.W for w in small.W.basis):
        raise ValueError("top fields are not nested")
    G, H = big.gamma, small.gamma
    out = []
    for g in range(G.order):
        v, i, e = big.hat(g)
        out.append(H.index[small.canon((v, i, e % small.central))])
    return out


def compat_inflation(small: SyntheticKummerInstance, big: SyntheticKummerInstance) -> bool:
    """Inflation from the smaller top field takes the class into the larger one's class."""
    from .gcohom import inflate
    proj = inflation_map(big, small)
    a = massey_class(small)
    b = massey_class(big)
    sp = spaces(big.module())
    for row in a.P.basis:
        c = inflate(spaces(small.module()).cochain_from_embedded(row, 2), big.module(), proj)
        if c.embedded() not in sp.B(2) + b.P:
            return False
    return b.equals(inflate(a.cocycle, big.module(), proj))
