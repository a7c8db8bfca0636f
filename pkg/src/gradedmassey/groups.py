"""Finite groups given by labelled elements and a multiplication rule.

Elements are addressed by integer index ``0..order-1``; index 0 is always the
identity.  Small groups keep a dense multiplication table, larger ones
multiply labels on demand.
"""

from __future__ import annotations

import itertools
from collections import deque
from typing import Callable, Hashable, Iterable, Iterator, Sequence

import numpy as np

TABLE_LIMIT = 4096
EAGER_TABLE_LIMIT = 256


class GroupError(ValueError):
    pass


class FiniteGroup:
    def __init__(self, labels: Sequence[Hashable], mul: Callable, name: str = "G"):
        labels = list(labels)
        self.name = name
        self.labels = labels
        self.index = {lab: i for i, lab in enumerate(labels)}
        if len(self.index) != len(labels):
            raise GroupError("duplicate element labels")
        self._mul_label = mul
        self._table = None
        self._inv = None
        if len(labels) <= EAGER_TABLE_LIMIT:
            self._build_table()
        if self.mul(0, 0) != 0 or any(self.mul(0, a) != a for a in range(min(self.order, 64))):
            raise GroupError("element 0 must be the identity")

    def _build_table(self):
        n = len(self.labels)
        labels, index, mul = self.labels, self.index, self._mul_label
        T = np.empty((n, n), dtype=np.int64)
        for a, la in enumerate(labels):
            for b, lb in enumerate(labels):
                try:
                    T[a, b] = index[mul(la, lb)]
                except KeyError as exc:
                    raise GroupError(f"product {la}*{lb} leaves the element set") from exc
        self._table = T

    # construction helpers -------------------------------------------------

    @classmethod
    def from_table(cls, table, name: str = "G", check: bool = True) -> "FiniteGroup":
        T = np.asarray(table, dtype=np.int64)
        n = T.shape[0]
        if T.shape != (n, n):
            raise GroupError("multiplication table must be square")
        if check:
            _check_table(T)
        g = cls.__new__(cls)
        g.name = name
        g.labels = list(range(n))
        g.index = {i: i for i in range(n)}
        g._mul_label = lambda a, b: int(T[a, b])
        g._table = T
        g._inv = None
        return g

    @classmethod
    def generated_by(cls, gens: Iterable[Hashable], mul: Callable, identity: Hashable,
                     name: str = "G", limit: int = 1 << 20) -> "FiniteGroup":
        gens = list(gens)
        seen = {identity: 0}
        order = [identity]
        queue = deque([identity])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = mul(x, g)
                if y not in seen:
                    seen[y] = len(order)
                    order.append(y)
                    queue.append(y)
                    if len(order) > limit:
                        raise GroupError("group larger than enumeration limit")
        return cls(order, mul, name)

    @classmethod
    def cyclic(cls, n: int, name: str | None = None) -> "FiniteGroup":
        return cls(range(n), lambda a, b: (a + b) % n, name or f"C{n}")

    @classmethod
    def abelian(cls, orders: Sequence[int], name: str | None = None) -> "FiniteGroup":
        orders = tuple(orders)
        labels = list(itertools.product(*[range(d) for d in orders]))
        return cls(labels, lambda a, b: tuple((x + y) % d for x, y, d in zip(a, b, orders)),
                   name or "x".join(f"C{d}" for d in orders))

    @classmethod
    def direct_product(cls, *groups: "FiniteGroup", name: str | None = None) -> "FiniteGroup":
        labels = list(itertools.product(*[range(g.order) for g in groups]))
        return cls(labels, lambda a, b: tuple(g.mul(x, y) for g, x, y in zip(groups, a, b)),
                   name or "x".join(g.name for g in groups))

    # basic operations -------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    @property
    def identity(self) -> int:
        return 0

    @property
    def table(self) -> np.ndarray:
        if self._table is None:
            if self.order > TABLE_LIMIT:
                raise GroupError(f"{self.name} is too large for a dense table")
            self._build_table()
        return self._table

    def mul(self, a: int, b: int) -> int:
        if self._table is not None:
            return int(self._table[a, b])
        return self.index[self._mul_label(self.labels[a], self.labels[b])]

    def inv(self, a: int) -> int:
        if self._inv is None:
            self._inv = [None] * self.order
        if self._inv[a] is None:
            x, prev = a, 0
            while x != 0:
                prev = x
                x = self.mul(x, a)
            self._inv[a] = prev if a != 0 else 0
            if a != 0 and self.mul(a, prev) != 0:
                raise GroupError("inverse computation failed")
        return self._inv[a]

    def conj(self, g: int, x: int) -> int:
        """g x g^-1"""
        return self.mul(self.mul(g, x), self.inv(g))

    def power(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        result, base = 0, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def element_order(self, a: int) -> int:
        x, k = a, 1
        while x != 0:
            x = self.mul(x, a)
            k += 1
        return k

    def elements(self) -> range:
        return range(self.order)

    def is_abelian(self) -> bool:
        gens = self.generators()
        return all(self.mul(a, b) == self.mul(b, a) for a in gens for b in gens)

    def closure(self, gens: Iterable[int]) -> list[int]:
        gens = list(gens)
        seen = {0}
        out = [0]
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    out.append(y)
                    queue.append(y)
        return sorted(out)

    def normal_closure(self, gens: Iterable[int]) -> list[int]:
        conj = {self.conj(g, x) for x in gens for g in self.generators()} | set(gens)
        current = self.closure(conj)
        while True:
            more = {self.conj(g, x) for x in current for g in self.generators()}
            if more <= set(current):
                return current
            current = self.closure(set(current) | more)

    def generators(self) -> list[int]:
        """Greedy generating set (deterministic, lowest indices first)."""
        cached = getattr(self, "_gens", None)
        if cached is not None:
            return cached
        gens: list[int] = []
        span = {0}
        by_order = sorted(range(1, self.order), key=lambda a: (-self.element_order(a), a))
        for a in by_order:
            if a not in span:
                gens.append(a)
                span = set(self.closure(gens))
                if len(span) == self.order:
                    break
        self._gens = gens
        return gens

    def is_subgroup(self, elems: Iterable[int]) -> bool:
        s = set(elems)
        return 0 in s and all(self.mul(a, self.inv(b)) in s for a in s for b in s)

    def is_normal(self, elems: Iterable[int]) -> bool:
        s = set(elems)
        return self.is_subgroup(s) and all(self.conj(g, x) in s for g in self.generators() for x in s)

    def center(self) -> list[int]:
        gens = self.generators()
        return [z for z in range(self.order) if all(self.mul(z, g) == self.mul(g, z) for g in gens)]

    # subgroups and quotients ------------------------------------------------

    def subgroup(self, elems: Iterable[int], name: str | None = None) -> tuple["FiniteGroup", list[int]]:
        """The subgroup as a group of its own, plus its inclusion map."""
        elems = sorted(set(elems))
        if not elems or elems[0] != 0:
            raise GroupError("subgroup must contain the identity")
        sub = FiniteGroup(elems, lambda a, b: self.mul(a, b), name or f"sub({self.name})")
        return sub, elems

    def coset_table(self, normal: Iterable[int]) -> tuple[list[int], list[int]]:
        """Cosets of a normal subgroup: (representatives, element -> coset index).

        The representative of each coset is its lowest-index element.
        """
        normal = sorted(set(normal))
        which = [-1] * self.order
        reps: list[int] = []
        for g in range(self.order):
            if which[g] >= 0:
                continue
            ci = len(reps)
            reps.append(g)
            for x in normal:
                which[self.mul(x, g)] = ci
        return reps, which

    def quotient(self, normal: Iterable[int], name: str | None = None) -> tuple["FiniteGroup", list[int]]:
        normal = sorted(set(normal))
        if not self.is_normal(normal):
            raise GroupError("quotient by a non-normal subgroup")
        reps, which = self.coset_table(normal)
        Q = FiniteGroup(range(len(reps)), lambda a, b: which[self.mul(reps[a], reps[b])],
                        name or f"{self.name}/N")
        Q.reps = reps
        return Q, which

    def __repr__(self):
        return f"<FiniteGroup {self.name} of order {self.order}>"


def _check_table(T: np.ndarray):
    n = T.shape[0]
    if ((T < 0) | (T >= n)).any():
        raise GroupError("table entries out of range")
    for row in T:
        if len(set(row.tolist())) != n:
            raise GroupError("table is not a Latin square")
    if not (T[0] == np.arange(n)).all() or not (T[:, 0] == np.arange(n)).all():
        raise GroupError("element 0 is not the identity")
    # associativity
    left = T[T, :]           # left[a, b, c] = (ab)c
    right = T[:, T]          # right[a, b, c] = a(bc)
    if not (left == right).all():
        raise GroupError("table is not associative")


def is_homomorphism(G: FiniteGroup, H: FiniteGroup, f: Sequence[int]) -> bool:
    return all(f[G.mul(a, b)] == H.mul(f[a], f[b]) for a in range(G.order) for b in range(G.order))


def extend_hom(G: FiniteGroup, H: FiniteGroup, gen_images: dict[int, int]) -> list[int] | None:
    """Extend generator images to a homomorphism G -> H, or None if inconsistent."""
    f = [-1] * G.order
    f[0] = 0
    queue = deque([0])
    gens = list(gen_images)
    while queue:
        x = queue.popleft()
        for g in gens:
            y = G.mul(x, g)
            v = H.mul(f[x], gen_images[g])
            if f[y] < 0:
                f[y] = v
                queue.append(y)
            elif f[y] != v:
                return None
    if min(f) < 0:
        return None
    # consistency on generators suffices once f is defined by words, but check fully
    for a in range(G.order):
        for g in gens:
            if f[G.mul(a, g)] != H.mul(f[a], f[g]):
                return None
    return f


def homomorphisms(G: FiniteGroup, H: FiniteGroup,
                  allowed: dict[int, Sequence[int]] | None = None) -> Iterator[list[int]]:
    """All homomorphisms G -> H (optionally restricting generator images)."""
    gens = G.generators()
    choices = []
    for g in gens:
        opts = allowed.get(g) if allowed and g in allowed else range(H.order)
        ordg = G.element_order(g)
        choices.append([h for h in opts if ordg % H.element_order(h) == 0])
    for imgs in itertools.product(*choices):
        f = extend_hom(G, H, dict(zip(gens, imgs)))
        if f is not None:
            yield f


def kernel_of(f: Sequence[int]) -> list[int]:
    return [a for a, b in enumerate(f) if b == 0]


def image_of(f: Sequence[int]) -> list[int]:
    return sorted(set(f))


# catalogue of small groups used by the verification suites -------------------

def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n; labels (r, s) meaning rot^r * ref^s."""
    def mul(a, b):
        r1, s1 = a
        r2, s2 = b
        if s1 == 0:
            return ((r1 + r2) % n, s2)
        return ((r1 - r2) % n, (s1 + s2) % 2)
    return FiniteGroup([(r, s) for s in range(2) for r in range(n)], mul, f"D{2 * n}")


def quaternion() -> FiniteGroup:
    # units +-1, +-i, +-j, +-k encoded as (sign, unit) with unit in 0..3
    table = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }

    def mul(a, b):
        s, u = table[(a[1], b[1])]
        return (a[0] * b[0] * s, u)
    labels = [(1, 0)] + [(s, u) for s in (1, -1) for u in range(4) if (s, u) != (1, 0)]
    return FiniteGroup(labels, mul, "Q8")


def symmetric(n: int) -> FiniteGroup:
    perms = list(itertools.permutations(range(n)))
    return FiniteGroup(perms, lambda a, b: tuple(a[b[i]] for i in range(n)), f"S{n}")
