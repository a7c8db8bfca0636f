"""Upper unitriangular matrices over Z/p^m and the groups generated by X and Y.

For size ``k + 2`` the named elements are

* ``X = I + sum_{i<=k} E_{i,i+1}``
* ``Y = I + E_{k+1,k+2}``
* ``Z = I + E_{1,k+2}`` (generates the centre)
* ``Y_i = I + E_{k+1-i,k+2}``

Matrix indices in the public API are 1-based, as in ``E_{i,j}``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .groupring import GroupRing, GroupRingElement, aug_power
from .groups import FiniteGroup
from .residue import r_k as _r_k


class UnipotentMatrix:
    __slots__ = ("a", "N")

    def __init__(self, a, N: int):
        a = np.asarray(a, dtype=np.int64) % N
        s = a.shape[0]
        if a.shape != (s, s):
            raise ValueError("matrix must be square")
        if np.tril(a, -1).any() or (np.diag(a) != 1 % N).any():
            raise ValueError("matrix is not upper unitriangular")
        self.a = a
        self.N = N

    @classmethod
    def identity(cls, size: int, N: int) -> "UnipotentMatrix":
        return cls(np.eye(size, dtype=np.int64), N)

    @classmethod
    def from_upper(cls, entries: Sequence[int], size: int, N: int) -> "UnipotentMatrix":
        """Row-major strict upper triangle."""
        a = np.eye(size, dtype=np.int64)
        iu = np.triu_indices(size, 1)
        a[iu] = np.asarray(entries, dtype=np.int64)
        return cls(a, N)

    @property
    def size(self) -> int:
        return self.a.shape[0]

    def upper(self) -> tuple:
        return tuple(self.a[np.triu_indices(self.size, 1)].tolist())

    def __getitem__(self, ij) -> int:
        i, j = ij
        return int(self.a[i - 1, j - 1])

    def __mul__(self, other: "UnipotentMatrix") -> "UnipotentMatrix":
        return UnipotentMatrix(self.a @ other.a, self.N)

    def inverse(self) -> "UnipotentMatrix":
        """Back-substitution: (I + U)^-1 = I - U + U^2 - ... (U nilpotent)."""
        s = self.size
        U = (self.a - np.eye(s, dtype=np.int64)) % self.N
        out = np.eye(s, dtype=np.int64)
        term = np.eye(s, dtype=np.int64)
        for _ in range(1, s):
            term = (-term @ U) % self.N
            out = (out + term) % self.N
        return UnipotentMatrix(out, self.N)

    def __pow__(self, e: int) -> "UnipotentMatrix":
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        out = UnipotentMatrix.identity(self.size, self.N)
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, UnipotentMatrix) and self.N == other.N and np.array_equal(self.a, other.a)

    def __hash__(self):
        return hash((self.N, self.upper()))

    def is_identity(self) -> bool:
        return np.array_equal(self.a, np.eye(self.size, dtype=np.int64))

    def __repr__(self):
        return f"UnipotentMatrix({self.a.tolist()}, N={self.N})"


def commutator(A: UnipotentMatrix, B: UnipotentMatrix) -> UnipotentMatrix:
    """[A, B] = A B A^-1 B^-1."""
    return A * B * A.inverse() * B.inverse()


@dataclass(frozen=True)
class Generators:
    X: UnipotentMatrix
    Y: UnipotentMatrix
    Z: UnipotentMatrix
    Ys: tuple


def elementary(i: int, j: int, size: int, N: int, t: int = 1) -> UnipotentMatrix:
    a = np.eye(size, dtype=np.int64)
    a[i - 1, j - 1] += t
    return UnipotentMatrix(a, N)


def generators(k: int, p: int, m: int) -> Generators:
    N = p**m
    s = k + 2
    a = np.eye(s, dtype=np.int64)
    for i in range(1, k + 1):
        a[i - 1, i] = 1
    X = UnipotentMatrix(a, N)
    Y = elementary(k + 1, k + 2, s, N)
    Z = elementary(1, k + 2, s, N)
    Ys = tuple(elementary(k + 1 - i, k + 2, s, N) for i in range(k + 1))
    return Generators(X, Y, Z, Ys)


def commutator_chain_check(k: int, p: int, m: int) -> bool:
    """Y_i = [X, [X, ... [X, Y]]] with i copies of X, for 0 <= i <= k."""
    g = generators(k, p, m)
    c = g.Y
    for i in range(k + 1):
        if c != g.Ys[i]:
            return False
        c = commutator(g.X, c)
    return True


# subgroups -----------------------------------------------------------------------------

def in_centre(M: UnipotentMatrix) -> bool:
    s = M.size
    off = M.a - np.eye(s, dtype=np.int64)
    off[0, s - 1] = 0
    return not off.any()


def in_last_column(M: UnipotentMatrix) -> bool:
    s = M.size
    off = M.a - np.eye(s, dtype=np.int64)
    off[:, s - 1] = 0
    return not off.any()


def closure(gens: Sequence[UnipotentMatrix], limit: int = 200_000) -> set:
    """Element set (as upper-triangle tuples) generated by ``gens``."""
    ident = UnipotentMatrix.identity(gens[0].size, gens[0].N)
    seen = {ident.upper()}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = x * g
            key = y.upper()
            if key not in seen:
                seen.add(key)
                if len(seen) > limit:
                    raise ValueError("closure exceeds limit")
                queue.append(y)
    return seen


def normal_closure(gens: Sequence[UnipotentMatrix], ambient: Sequence[UnipotentMatrix],
                   limit: int = 200_000) -> set:
    conj_by = list(ambient) + [g.inverse() for g in ambient]
    current = list(gens)
    elems = closure(current, limit)
    changed = True
    while changed:
        changed = False
        for x in list(current):
            for g in conj_by:
                y = g * x * g.inverse()
                if y.upper() not in elems:
                    current.append(y)
                    elems = closure(current, limit)
                    changed = True
    return elems


def x_order(k: int, p: int, m: int) -> int:
    X = generators(k, p, m).X
    e, Y = 1, X
    while not Y.is_identity():
        Y = Y * X
        e += 1
    return e


def quotient_order_h(k: int, p: int, m: int) -> int:
    """Order of X modulo the last-column subgroup (the normal closure of Y)."""
    X = generators(k, p, m).X
    e, Y = 1, X
    while not in_last_column(Y):
        Y = Y * X
        e += 1
    return e


@dataclass
class StructureReport:
    n_order: int
    h_order: int
    expected_h: int
    g_order: int
    splits: bool
    normal_closure_is_last_column: bool
    enumerated: bool

    @property
    def ok(self) -> bool:
        return (self.h_order == self.expected_h and self.splits
                and self.normal_closure_is_last_column
                and self.g_order == self.n_order * self.h_order)


def structure_check(k: int, p: int, m: int, enumerate_limit: int = 20_000) -> StructureReport:
    """Orders of N, H_m and G_m^(k), and the splitting G = N x| <X>."""
    N = p**m
    g = generators(k, p, m)
    n_order = N ** (k + 1)
    h = quotient_order_h(k, p, m)
    expected = p ** (m + _r_k(k, p))
    xo = x_order(k, p, m)
    # <X> meets the last column only in I, and X has the same order as its image
    splits = xo == h
    enumerated = n_order * h <= enumerate_limit
    if enumerated:
        G = closure([g.X, g.Y])
        g_order = len(G)
        Nset = normal_closure([g.Y], [g.X, g.Y])
        last = all(in_last_column(UnipotentMatrix.from_upper(key, k + 2, N)) for key in Nset)
        ncl = last and len(Nset) == n_order
    else:
        # the Y_i lie in G (commutators) and span the last column; it is normal in T
        ncl = commutator_chain_check(k, p, m)
        g_order = n_order * h
    return StructureReport(n_order, h, expected, g_order, splits, ncl, enumerated)


# module identification -------------------------------------------------------------------

class NModule:
    """Last-column subgroup N_m^(k) identified with (Z/p^m)[G]/I^(k+1), Y -> 1.

    Coordinates ``c_0..c_k`` stand for ``sum_j c_j (sigma - 1)^j``; the
    coordinate ``c_j`` sits in matrix entry ``(k+1-j, k+2)``.
    """

    def __init__(self, k: int, p: int, m: int, n: int):
        if m + _r_k(k, p) > n if k >= 1 else m > n:
            raise ValueError("need m + r_k <= n")
        self.k, self.p, self.m, self.n = k, p, m, n
        self.N = p**m
        self.size = k + 2
        self.ring = GroupRing.cyclic(p, n, self.N)
        self.ideal = aug_power(self.ring, k + 1)
        s = self.ring.aug_gen()
        self.powers = [s**j for j in range(k + 1)]
        # coordinates of group-ring elements modulo I^(k+1)
        from .linalg import Solver
        self._solver = Solver(np.array([x.coeffs for x in self.powers] +
                                       [r for r in self.ideal.span.basis]), self.N)

    def matrix(self, c) -> UnipotentMatrix:
        a = np.eye(self.size, dtype=np.int64)
        for j, v in enumerate(c):
            a[self.k - j, self.size - 1] = v
        return UnipotentMatrix(a, self.N)

    def coords(self, M: UnipotentMatrix) -> np.ndarray:
        if not in_last_column(M):
            raise ValueError("matrix is outside the last-column subgroup")
        return np.array([M.a[self.k - j, self.size - 1] for j in range(self.k + 1)], dtype=np.int64)

    def to_ring(self, c) -> GroupRingElement:
        out = self.ring.zero()
        for j, v in enumerate(c):
            out = out + int(v) * self.powers[j]
        return out

    def from_ring(self, x: GroupRingElement) -> np.ndarray:
        sol = self._solver(x.coeffs)
        if sol is None:
            raise ValueError("element has no coordinates")
        return sol[: self.k + 1] % self.N

    def to_matrix(self, x: GroupRingElement) -> UnipotentMatrix:
        return self.matrix(self.from_ring(x))

    def from_matrix(self, M: UnipotentMatrix) -> GroupRingElement:
        return self.to_ring(self.coords(M))

    def order(self) -> int:
        return self.N ** (self.k + 1)

    def quotient_order(self) -> int:
        return self.N**self.ring.dim // self.ideal.order()

    def all_coords(self):
        import itertools
        return itertools.product(range(self.N), repeat=self.k + 1)


def n_module_iso(k: int, p: int, m: int, n: int) -> NModule:
    return NModule(k, p, m, n)


def intertwining_check(mod: NModule, lift: UnipotentMatrix | None = None, exhaustive: bool = True) -> bool:
    """Conjugation by the lift of sigma matches multiplication by sigma."""
    lift = lift or generators(mod.k, mod.p, mod.m).X
    inv = lift.inverse()
    sigma = mod.ring.sigma()
    if exhaustive:
        coords = list(mod.all_coords())
    else:
        coords = [tuple(int(i == j) for i in range(mod.k + 1)) for j in range(mod.k + 1)]
    for c in coords:
        M = mod.matrix(c)
        conj = lift * M * inv
        if not in_last_column(conj):
            return False
        lhs = mod.from_ring(mod.from_matrix(conj))
        rhs = mod.from_ring(sigma * mod.to_ring(c))
        if not np.array_equal(lhs, rhs):
            return False
        if not np.array_equal(mod.from_ring(mod.to_ring(c)), np.asarray(c) % mod.N):
            return False
    return True


def action_check(k: int, p: int, m: int, t: int = 0) -> bool:
    """Y^{(rho(sigma~) - 1)^j} = Y_j for 0 <= j <= k, rho(sigma~) = X + t E_{k+1,k+2}."""
    g = generators(k, p, m)
    lift = twisted_x(k, p, m, t)
    # X + t E_{k+1,k+2} = (I + t E_{k+1,k+2}) X, so it lies in the coset X N
    if lift != elementary(k + 1, k + 2, k + 2, p**m, t) * g.X:
        return False
    inv = lift.inverse()
    v = g.Y
    for j in range(k + 1):
        if v != g.Ys[j]:
            return False
        v = lift * v * inv * v.inverse()     # (g - 1) applied multiplicatively
    return True


def twisted_x(k: int, p: int, m: int, t: int) -> UnipotentMatrix:
    """X + t E_{k+1,k+2}."""
    return UnipotentMatrix((generators(k, p, m).X.a + t * _E(k + 1, k + 2, k + 2)) % p**m, p**m)


def _E(i, j, s):
    a = np.zeros((s, s), dtype=np.int64)
    a[i - 1, j - 1] = 1
    return a


# the homomorphism rho^(k) ---------------------------------------------------------------------

@dataclass
class RhoModel:
    """Finite model of G_{M_k/K} for building rho^(k).

    ``gamma`` has a character ``chi`` onto Z/p^n, ``sigma_lift`` has chi = 1,
    and ``kernel_image`` sends each element with chi = 0 into (Z/p^m)[G].
    """

    gamma: FiniteGroup
    chi: list[int]
    sigma_lift: int
    kernel_image: Callable[[int], GroupRingElement]
    t: int


def build_rho(k: int, p: int, m: int, n: int, model: RhoModel, check: bool = True) -> list[UnipotentMatrix]:
    """rho(g) = V(g sigma~^-chi(g)) (X + t E_{k+1,k+2})^chi(g)."""
    mod = NModule(k, p, m, n)
    G = model.gamma
    q = p**n
    if model.chi[model.sigma_lift] % q != 1:
        raise ValueError("sigma lift must have chi = 1")
    Xp = twisted_x(k, p, m, model.t)
    powers = [Xp**i for i in range(q)]
    inv_powers = [G.power(model.sigma_lift, -i) for i in range(q)]
    rho = []
    for g in range(G.order):
        i = model.chi[g] % q
        nu = G.mul(g, inv_powers[i])
        if model.chi[nu] % q != 0:
            raise ValueError("chi is not a homomorphism")
        rho.append(mod.to_matrix(model.kernel_image(nu)) * powers[i])
    if check and not rho_is_homomorphism(G, rho):
        raise ValueError("rho is not a homomorphism")
    return rho


def rho_is_homomorphism(G: FiniteGroup, rho: Sequence[UnipotentMatrix], full: bool | None = None) -> bool:
    """rho(ab) = rho(a) rho(b); against generators b unless ``full`` (enough by induction)."""
    if full is None:
        full = G.order <= 128
    rights = range(G.order) if full else G.generators()
    if not rho[0].is_identity():
        return False
    return all(rho[G.mul(a, b)] == rho[a] * rho[b] for a in range(G.order) for b in rights)


def semidirect_model(k: int, p: int, m: int, n: int, t: int = 0) -> tuple[RhoModel, NModule]:
    """gamma = (R[G]/I^(k+1)) x| <s> with s^(p^n) = t p^(m-1) (sigma-1)^k at the boundary.

    Elements are (coords, i); s acts on coords through sigma.  The power
    relation makes s map to X + t E_{k+1,k+2}: its p^n-th power is the
    corresponding element of the last column.
    """
    mod = NModule(k, p, m, n)
    q = p**n
    Xp = twisted_x(k, p, m, t)
    top = mod.coords(Xp**q)         # lies in the last column
    sigma = mod.ring.sigma()
    act_cache: dict = {}

    def act(i, c):
        key = (i, c)
        if key not in act_cache:
            act_cache[key] = tuple(mod.from_ring(sigma**i * mod.to_ring(c)).tolist())
        return act_cache[key]

    def mul(a, b):
        (c1, i1), (c2, i2) = a, b
        c = np.array(c1) + np.array(act(i1, c2))
        if i1 + i2 >= q:
            c = c + top
        return (tuple((c % mod.N).tolist()), (i1 + i2) % q)

    labels = [(tuple(c), i) for i in range(q) for c in mod.all_coords()]
    G = FiniteGroup(labels, mul, f"model(k={k},t={t})")
    chi = [lab[1] for lab in G.labels]
    sigma_lift = G.index[(tuple([0] * (k + 1)), 1)]
    model = RhoModel(G, chi, sigma_lift, lambda g: mod.to_ring(G.labels[g][0]), t)
    return model, mod


def defining_relations_check(k: int, p: int, m: int, n: int, t: int = 0) -> bool:
    """rho^(k) respects the defining relations of the semidirect model.

    The model is generated by the abelian group R[G]/I^(k+1) and s subject to
    s c s^-1 = sigma c and s^(p^n) = p^(m-1) t (sigma-1)^k (the term only at the
    boundary k = p^(n-m+1) - 1).  rho sends c to its last-column matrix and s to
    X + t E_{k+1,k+2}; additivity on the last column is automatic, so it remains
    to check conjugation on a basis and the power relation.
    """
    mod = NModule(k, p, m, n)
    Xp = twisted_x(k, p, m, t)
    if not intertwining_check(mod, Xp, exhaustive=False):
        return False
    top = Xp ** (p**n)
    if not in_last_column(top):
        return False
    expected = np.zeros(k + 1, dtype=np.int64)
    if k == p ** (n - m + 1) - 1:
        expected[k] = p ** (m - 1) * t
    return np.array_equal(mod.coords(top) % mod.N, expected % mod.N)
