"""Group rings R[G] over R = Z/N (or Z when ``N is None``) for finite groups.

Elements are coefficient vectors indexed by group-element index.  Left
submodules are stored as :class:`~gradedmassey.linalg.Span` objects of
coefficient vectors closed under left multiplication by ``G``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .groups import FiniteGroup
from .linalg import Solver, Span, kernel
from .residue import is_prime, r_k0


class NotInIdeal(ValueError):
    """The element lies outside the ideal a decomposition was requested for."""


class GroupRing:
    def __init__(self, group: FiniteGroup, N: int | None):
        if N is not None and N < 2:
            raise ValueError("coefficient modulus must be >= 2")
        self.G = group
        self.N = N
        self.dim = group.order
        self.p = None
        self.n = None
        self._lmats: dict[int, np.ndarray] = {}

    @classmethod
    def cyclic(cls, p: int, n: int, N: int | None) -> "GroupRing":
        """R[C_{p^n}] with generator sigma = element 1 (element i is sigma^i)."""
        if not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        R = cls(FiniteGroup.cyclic(p**n, f"C{p ** n}"), N)
        R.p, R.n = p, n
        return R

    @property
    def is_cyclic_pgroup(self) -> bool:
        return self.p is not None

    def _require_cyclic(self):
        if not self.is_cyclic_pgroup:
            raise ValueError("operation needs a cyclic group of p-power order")

    def _red(self, v: np.ndarray) -> np.ndarray:
        return v % self.N if self.N is not None else v

    # constructors ------------------------------------------------------------

    def elem(self, coeffs) -> "GroupRingElement":
        c = np.asarray(coeffs, dtype=np.int64)
        if c.shape != (self.dim,):
            raise ValueError(f"need {self.dim} coefficients")
        return GroupRingElement(self, self._red(c))

    def zero(self) -> "GroupRingElement":
        return self.elem(np.zeros(self.dim, dtype=np.int64))

    def scalar(self, a: int) -> "GroupRingElement":
        return self.basis_elem(0, a)

    def one(self) -> "GroupRingElement":
        return self.scalar(1)

    def basis_elem(self, g: int, a: int = 1) -> "GroupRingElement":
        c = np.zeros(self.dim, dtype=np.int64)
        c[g] = a
        return self.elem(c)

    def sigma(self, e: int = 1) -> "GroupRingElement":
        self._require_cyclic()
        return self.basis_elem(e % self.dim)

    def norm(self) -> "GroupRingElement":
        return self.elem(np.ones(self.dim, dtype=np.int64))

    def aug_gen(self) -> "GroupRingElement":
        """sigma - 1."""
        return self.sigma() - self.one()

    def poly(self, coeffs_by_power: dict[int, int]) -> "GroupRingElement":
        """Element sum a_e sigma^e (exponents taken mod |G|)."""
        self._require_cyclic()
        c = np.zeros(self.dim, dtype=np.int64)
        for e, a in coeffs_by_power.items():
            c[e % self.dim] += a
        return self.elem(c)

    # multiplication ------------------------------------------------------------

    def left_matrix(self, g: int) -> np.ndarray:
        """Permutation matrix P with (x @ P) = coefficients of g*x."""
        if g not in self._lmats:
            P = np.zeros((self.dim, self.dim), dtype=np.int64)
            for h in range(self.dim):
                P[h, self.G.mul(g, h)] = 1
            self._lmats[g] = P
        return self._lmats[g]

    def right_mult_matrix(self, y: "GroupRingElement") -> np.ndarray:
        """Matrix M with (x @ M) = coefficients of x*y."""
        M = np.zeros((self.dim, self.dim), dtype=np.int64)
        for g in range(self.dim):
            for h in np.flatnonzero(y.coeffs):
                M[g, self.G.mul(g, int(h))] += y.coeffs[h]
        return self._red(M)

    def mul(self, x: "GroupRingElement", y: "GroupRingElement") -> "GroupRingElement":
        out = np.zeros(self.dim, dtype=np.int64)
        for g in np.flatnonzero(x.coeffs):
            a = x.coeffs[g]
            for h in np.flatnonzero(y.coeffs):
                out[self.G.mul(int(g), int(h))] += a * y.coeffs[h]
        return self.elem(out)

    def translate(self, g: int, x: "GroupRingElement") -> "GroupRingElement":
        return self.elem(x.coeffs @ self.left_matrix(g))

    # submodules ------------------------------------------------------------------

    def ideal(self, gens: Iterable["GroupRingElement"]) -> "Submodule":
        return Submodule(self, list(gens))

    def whole(self) -> "Submodule":
        return self.ideal([self.one()])

    def zero_ideal(self) -> "Submodule":
        return self.ideal([])

    def __eq__(self, other):
        if not isinstance(other, GroupRing) or self.N != other.N:
            return False
        if self.G is other.G:
            return True
        return self.p is not None and (self.p, self.n) == (other.p, other.n)

    def __hash__(self):
        return hash((self.p, self.n, self.N) if self.p is not None else (id(self.G), self.N))

    def __repr__(self):
        coef = "Z" if self.N is None else f"Z/{self.N}"
        return f"{coef}[{self.G.name}]"


@dataclass(frozen=True, eq=False)
class GroupRingElement:
    ring: GroupRing
    coeffs: np.ndarray

    def _lift(self, other) -> "GroupRingElement":
        if isinstance(other, GroupRingElement):
            if other.ring != self.ring:
                raise ValueError("elements of different group rings")
            return other
        return self.ring.scalar(int(other))

    def __add__(self, other):
        return self.ring.elem(self.coeffs + self._lift(other).coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        return self.ring.elem(self.coeffs - self._lift(other).coeffs)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return self.ring.elem(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, GroupRingElement):
            return self.ring.mul(self, self._lift(other))
        return self.ring.elem(self.coeffs * int(other))

    def __rmul__(self, other):
        return self.ring.elem(self.coeffs * int(other))

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        out, base = self.ring.one(), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            other = self._lift(other)
        return self.ring == other.ring and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(tuple(self.coeffs.tolist()))

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def augmentation(self) -> int:
        s = int(self.coeffs.sum())
        return s % self.ring.N if self.ring.N is not None else s

    def reduce_mod(self, N: int) -> "GroupRingElement":
        """Image in (Z/N)[G] (for elements over Z or over a multiple of N)."""
        R = GroupRing(self.ring.G, N)
        R.p, R.n = self.ring.p, self.ring.n
        return R.elem(self.coeffs)

    def __repr__(self):
        return format_element(self)


def format_element(x: GroupRingElement, symbol: str = "σ") -> str:
    terms = []
    cyclic = x.ring.is_cyclic_pgroup
    for g, a in enumerate(x.coeffs.tolist()):
        if a == 0:
            continue
        if cyclic:
            mono = "" if g == 0 else (symbol if g == 1 else f"{symbol}^{g}")
        else:
            mono = "" if g == 0 else f"[{g}]"
        mag = abs(a)
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}{mono}")
        sign = "-" if a < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


class Submodule:
    """Left R[G]-submodule of R[G] (R = Z/N) generated by ``gens``."""

    def __init__(self, ring: GroupRing, gens: Sequence[GroupRingElement] = (), span: Span | None = None):
        if ring.N is None:
            raise ValueError("submodules need a finite coefficient ring")
        self.ring = ring
        self.gens = list(gens)
        if span is None:
            rows = [x.coeffs @ ring.left_matrix(g) for x in self.gens for g in range(ring.dim)]
            span = Span(rows, ring.N, ring.dim)
        self.span = span

    @classmethod
    def from_span(cls, ring: GroupRing, span: Span) -> "Submodule":
        """Wrap a span already known to be G-stable."""
        return cls(ring, [ring.elem(r) for r in span.basis], span=span)

    def __contains__(self, x: GroupRingElement) -> bool:
        return x.coeffs in self.span

    def __eq__(self, other) -> bool:
        return isinstance(other, Submodule) and self.span == other.span

    def __hash__(self):
        return hash(self.span)

    def __le__(self, other: "Submodule") -> bool:
        return self.span <= other.span

    def __add__(self, other: "Submodule") -> "Submodule":
        return Submodule.from_span(self.ring, self.span + other.span)

    def order(self) -> int:
        return self.span.order()

    def is_closed(self) -> bool:
        return all(self.ring.elem(r @ self.ring.left_matrix(g)) in self
                   for r in self.span.basis for g in range(self.ring.dim))

    def basis_elements(self) -> list[GroupRingElement]:
        return [self.ring.elem(r) for r in self.span.basis]

    def __repr__(self):
        return f"Submodule of {self.ring} of order {self.order()}"


# basic maps ---------------------------------------------------------------------

def iota(x: GroupRingElement) -> GroupRingElement:
    G = x.ring.G
    c = np.zeros_like(x.coeffs)
    for g in range(G.order):
        c[G.inv(g)] = x.coeffs[g]
    return x.ring.elem(c)


def iota_span(J: Submodule) -> Span:
    return Span([iota(x).coeffs for x in J.basis_elements()], J.ring.N, J.ring.dim)


def left_annihilator(J: Submodule) -> Submodule:
    """J^perp: every x with x*j = 0 for all j in J^iota."""
    R = J.ring
    gens = [iota(x) for x in J.basis_elements()]
    if not gens:
        return R.whole()
    M = np.hstack([R.right_mult_matrix(y) for y in gens])
    return Submodule.from_span(R, kernel(M, R.N))


def perp(J: Submodule) -> Submodule:
    return left_annihilator(J)


# duality -------------------------------------------------------------------------

@dataclass
class DualityMap:
    """Characters of R[G]/J (values on the group basis, in (1/N)Z/Z scaled by N) and J^perp."""

    J: Submodule
    characters: Span
    annihilator: Submodule

    def phi(self, f: np.ndarray) -> GroupRingElement:
        return self.J.ring.elem(f)

    def psi(self, a: GroupRingElement) -> np.ndarray:
        return a.coeffs.copy()

    def evaluate(self, f: np.ndarray, r: GroupRingElement) -> int:
        return int(f @ r.coeffs) % self.J.ring.N

    def act(self, h: int, f: np.ndarray) -> np.ndarray:
        """(h f)(g) = f(h^-1 g)."""
        G = self.J.ring.G
        hinv = G.inv(h)
        return np.array([f[G.mul(hinv, g)] for g in range(G.order)], dtype=np.int64)

    def verify(self) -> bool:
        R = self.J.ring
        quotient_order = R.N ** R.dim // self.J.order()
        if self.characters.order() != quotient_order:
            return False
        if any(self.evaluate(f, j) for f in self.characters.basis for j in self.J.basis_elements()):
            return False
        if Span([self.phi(f).coeffs for f in self.characters.basis], R.N, R.dim) != self.annihilator.span:
            return False
        for f in self.characters.basis:
            for h in R.G.generators():
                if self.phi(self.act(h, f)) != R.translate(h, self.phi(f)):
                    return False
        for a in self.annihilator.basis_elements():
            if self.phi(self.psi(a)) != a:
                return False
        return True


def duality_map(J: Submodule) -> DualityMap:
    R = J.ring
    basis = J.span.basis
    if basis.shape[0] == 0:
        chars = Span.full(R.N, R.dim)
    else:
        chars = kernel(basis.T, R.N)
    return DualityMap(J, chars, left_annihilator(J))


def duality_square_commutes(J: Submodule, Jbig: Submodule) -> bool:
    """Restriction of characters along R/J -> R/J' matches J'^perp inside J^perp."""
    if not J <= Jbig:
        raise ValueError("need J contained in J'")
    small, big = duality_map(J), duality_map(Jbig)
    if not big.characters <= small.characters:
        return False
    if not big.annihilator <= small.annihilator:
        return False
    return all(small.phi(f) == big.phi(f) for f in big.characters.basis)


# derivative operators ---------------------------------------------------------------

def d_operator(k: int, ring: GroupRing, generator_power: int = 1) -> GroupRingElement:
    """D^(k) for the generator sigma^j (j = ``generator_power``, prime to p)."""
    ring._require_cyclic()
    q = ring.dim
    if not 0 <= k <= q - 1:
        raise ValueError(f"k={k} outside [0, {q - 1}]")
    if math.gcd(generator_power, ring.p) != 1:
        raise ValueError("generator power must be prime to p")
    c = np.zeros(q, dtype=np.int64)
    sign = -1 if k % 2 else 1
    for i in range(k, q):
        c[((i - k) * generator_power) % q] += sign * math.comb(i, k)
    return ring.elem(c)


def dk_recursion_check(ring: GroupRing, k: int, j: int | None = None) -> dict:
    """Residuals of both displayed identities for D^(k) in Z[G].

    Returns the exact residual elements (zero when the identity holds) and
    whether the congruences modulo p^(n - v_p(k)) and p^(n - r_k) hold.
    """
    if ring.N is not None:
        raise ValueError("identity check runs over Z")
    ring._require_cyclic()
    p, n = ring.p, ring.n
    q = p**n
    if not 1 <= k <= q - 1:
        raise ValueError("need 1 <= k <= p^n - 1")
    s, one = ring.sigma(), ring.one()
    sinv = ring.sigma(-1)
    D = lambda t: d_operator(t, ring)
    first = (s - one) * D(k) - D(k - 1) - ((-1) ** k * math.comb(q, k)) * ring.sigma(-k)
    from .residue import vp, r_k
    mod1 = p ** (n - vp(k, p))
    cong1 = not (((s - one) * D(k) - D(k - 1)).coeffs % mod1).any()
    out = {"first": first, "first_congruence": cong1}
    js = range(1, k + 1) if j is None else [j]
    second = {}
    mod2 = p ** (n - r_k(k, p))
    for jj in js:
        lhs = (s - one) ** jj * D(k)
        e = jj - 1 - k
        pref = ((-1) ** (e % 2)) * ring.sigma(e)
        tail = ring.zero()
        for i in range(jj):
            tail = tail + math.comb(q, k - i) * (sinv - one) ** (jj - 1 - i)
        resid = lhs - D(k - jj) - pref * tail
        cong = not ((lhs - D(k - jj)).coeffs % mod2).any()
        second[jj] = (resid, cong)
    out["second"] = second
    return out


def dk_identities_hold(ring: GroupRing, k: int) -> bool:
    r = dk_recursion_check(ring, k)
    return (r["first"].is_zero() and r["first_congruence"]
            and all(res.is_zero() and cong for res, cong in r["second"].values()))


def aug_power(ring: GroupRing, k: int) -> Submodule:
    """I_G^k (I_G^0 = R[G])."""
    if k == 0:
        return ring.whole()
    if ring.is_cyclic_pgroup:
        return ring.ideal([ring.aug_gen() ** k])
    I = [ring.basis_elem(g) - ring.one() for g in ring.G.generators()]
    gens = [ring.one()]
    for _ in range(k):
        gens = [x * y for x in gens for y in I]
        sub = ring.ideal(gens)
        gens = sub.basis_elements()
    return ring.ideal(gens)


def _check_auggen_params(p: int, n: int, m: int, k: int):
    if m < 1 or n < m:
        raise ValueError("need 1 <= m <= n")
    if not 0 <= k <= p ** (n - m + 1) - 1 or m + r_k0(k, p) > n:
        raise ValueError(f"k={k} outside the range m + r_k <= n")


def auggen_check(p: int, n: int, m: int, k: int) -> bool:
    """ideal(D^(k)) == (I^(k+1))^perp in (Z/p^m)[C_{p^n}]."""
    _check_auggen_params(p, n, m, k)
    R = GroupRing.cyclic(p, n, p**m)
    return R.ideal([d_operator(k, R)]) == left_annihilator(aug_power(R, k + 1))


# quotient maps ---------------------------------------------------------------------

def quotient_ring(ring: GroupRing, s: int) -> GroupRing:
    """R[H] for the quotient H of order p^(n-s)."""
    ring._require_cyclic()
    if not 0 <= s <= ring.n:
        raise ValueError(f"s={s} outside [0, n]")
    return GroupRing.cyclic(ring.p, ring.n - s, ring.N)


def project(x: GroupRingElement, s: int, target: GroupRing | None = None) -> GroupRingElement:
    """Image in R[H], H = G / <sigma^(p^(n-s))>, summing coefficients along cosets."""
    R = x.ring
    H = target or quotient_ring(R, s)
    h = H.dim
    c = np.zeros(h, dtype=np.int64)
    for i, a in enumerate(x.coeffs.tolist()):
        c[i % h] += a
    return H.elem(c)


def project_ideal(J: Submodule, s: int, target: GroupRing | None = None) -> Submodule:
    H = target or quotient_ring(J.ring, s)
    return H.ideal([project(x, s, H) for x in J.basis_elements()])


def trivimage_rhs(p: int, n: int, m: int, k: int) -> GroupRingElement:
    H = GroupRing.cyclic(p, n - m, p**m)
    t = p ** (n - m) * (p - 1)
    if k < t:
        return H.zero()
    return p ** (m - 1) * d_operator(k - t, H)


def trivimage_check(p: int, n: int, m: int, k: int) -> bool:
    if m < 1 or n < m or not 0 <= k <= p ** (n - m + 1) - 1:
        raise ValueError("need 1 <= m <= n and k <= p^(n-m+1) - 1")
    G = GroupRing.cyclic(p, n, p**m)
    H = GroupRing.cyclic(p, n - m, p**m)
    return project(d_operator(k, G), m, H) == trivimage_rhs(p, n, m, k)


# decomposition -------------------------------------------------------------------------

@dataclass
class ProjformSetup:
    G: GroupRing
    H: GroupRing
    s: int
    k: int
    domain: Submodule          # phi((I_G^k)^perp)^perp
    target: Submodule          # I_H^k + J^perp
    nbar: GroupRingElement     # generator of J^perp


def projform_setup(p: int, n: int, m: int, s: int, k: int) -> ProjformSetup:
    if not (1 <= m <= n and 0 <= s <= n and 0 <= k <= p ** (n - m) * (p - 1)):
        raise ValueError("need 1 <= m <= n, s <= n, k <= p^(n-m)(p-1)")
    G = GroupRing.cyclic(p, n, p**m)
    H = GroupRing.cyclic(p, n - s, p**m)
    image = project_ideal(left_annihilator(aug_power(G, k)), s, H)
    domain = left_annihilator(image)
    J = H.ideal([H.sigma(p ** (n - m)) - H.one()])
    Jp = left_annihilator(J)
    if n - m >= n - s:
        nbar = H.one()
    else:
        nbar = H.poly({p ** (n - m) * i: 1 for i in range(p ** (m - s))})
    target = aug_power(H, k) + Jp
    return ProjformSetup(G, H, s, k, domain, target, nbar)


class ProjformDecomposer:
    """Writes x = (sigma - 1)^k Y + B with B in the ideal generated by N-bar."""

    def __init__(self, setup: ProjformSetup):
        H = setup.H
        self.setup = setup
        self.a = H.aug_gen() ** setup.k
        gens = [H.translate(g, self.a) for g in range(H.dim)] + \
               [H.translate(g, setup.nbar) for g in range(H.dim)]
        self.rows = np.array([y.coeffs for y in gens])
        self.solver = Solver(self.rows, H.N)

    def __call__(self, x: GroupRingElement, check_domain: bool = True):
        H = self.setup.H
        if check_domain and x not in self.setup.domain:
            raise NotInIdeal("element is outside phi((I_G^k)^perp)^perp")
        c = self.solver(x.coeffs)
        if c is None:
            raise NotInIdeal("no decomposition (containment fails)")
        Y = H.elem(c[:H.dim])
        B = H.elem(c[H.dim:] @ self.rows[H.dim:])
        if self.a * Y + B != x:
            raise AssertionError("decomposition residual is nonzero")
        return Y, B


def projform_decompose(x: GroupRingElement, setup: ProjformSetup) -> tuple[GroupRingElement, GroupRingElement]:
    return ProjformDecomposer(setup)(x)


def projform_containment(p: int, n: int, m: int, s: int, k: int) -> bool:
    st = projform_setup(p, n, m, s, k)
    return st.domain <= st.target


# ideal enumeration ---------------------------------------------------------------------

def enumerate_ideals(ring: GroupRing, exhaustive_limit: int = 4**4) -> list[Submodule]:
    """Left ideals: all cyclic ideals and their sums, deduplicated.

    When |R[G]| <= ``exhaustive_limit`` every element generates a cyclic
    ideal and sums are closed iteratively, which yields every left ideal.
    Otherwise cyclic ideals of a spread of elements and pairwise sums are used.
    """
    N, d = ring.N, ring.dim
    size = N**d
    if size <= exhaustive_limit:
        elems = itertools.product(range(N), repeat=d)
    else:
        rng = np.random.default_rng(0)
        base = [tuple(int(v) for v in rng.integers(0, N, d)) for _ in range(400)]
        unit = [tuple(int(g == i) for g in range(d)) for i in range(d)]
        elems = unit + base
    seen: dict = {}
    for c in elems:
        J = ring.ideal([ring.elem(c)])
        seen.setdefault(J.span.key(), J)
    cyclic = list(seen.values())
    frontier = list(cyclic)
    rounds = 0 if size > exhaustive_limit else 8
    rounds = max(rounds, 1)
    for _ in range(rounds):
        new = []
        for A in frontier:
            for B in cyclic:
                S = A + B
                if S.span.key() not in seen:
                    seen[S.span.key()] = S
                    new.append(S)
        if not new:
            break
        frontier = new
    return sorted(seen.values(), key=lambda J: (J.order(), J.span.key()))
