"""Arithmetic in Z/p^m: residues, p-adic valuations and exact binomials."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class RingParams:
    """Prime ``p``, coefficient exponent ``m`` and (optional) character exponent ``n``."""

    p: int
    m: int
    n: int | None = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.n is not None and self.n < self.m:
            raise ValueError(f"need m <= n, got m={self.m}, n={self.n}")

    @property
    def modulus(self) -> int:
        return self.p**self.m

    def __call__(self, value: int) -> "ResidueElement":
        return ResidueElement(value, self)


@dataclass(frozen=True)
class ResidueElement:
    value: int
    params: RingParams = field(compare=True)

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.params.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, ResidueElement):
            if other.params.p != self.params.p or other.params.m != self.params.m:
                raise ValueError("residues from different rings")
            return other.value
        return int(other)

    def __add__(self, other):
        return ResidueElement(self.value + self._coerce(other), self.params)

    __radd__ = __add__

    def __sub__(self, other):
        return ResidueElement(self.value - self._coerce(other), self.params)

    def __rsub__(self, other):
        return ResidueElement(self._coerce(other) - self.value, self.params)

    def __mul__(self, other):
        return ResidueElement(self.value * self._coerce(other), self.params)

    __rmul__ = __mul__

    def __neg__(self):
        return ResidueElement(-self.value, self.params)

    def __pow__(self, e: int):
        return ResidueElement(pow(self.value, e, self.params.modulus), self.params)

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, ResidueElement):
            return self.value == other.value and self.params.modulus == other.params.modulus
        if isinstance(other, int):
            return (other - self.value) % self.params.modulus == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.params.modulus))

    def is_unit(self) -> bool:
        return self.value % self.params.p != 0

    def inverse(self) -> "ResidueElement":
        return ResidueElement(pow(self.value, -1, self.params.modulus), self.params)

    def valuation(self) -> float:
        """p-adic valuation of the residue, ``m`` for zero is not returned: zero gives ``inf``."""
        if self.value == 0:
            return math.inf
        return vp(self.value, self.params.p)

    def __repr__(self):
        return f"{self.value} (mod {self.params.modulus})"


def binom_mod(a: int, k: int, params: RingParams) -> ResidueElement:
    """C(a, k) reduced mod p^m, computed with exact integers."""
    if a < 0 or k < 0:
        raise ValueError("binom_mod expects nonnegative arguments")
    return ResidueElement(math.comb(a, k), params)


def vp(x: int, p: int) -> int:
    """Largest e with p^e dividing x."""
    if x == 0:
        raise ValueError("vp(0) is infinite")
    x = abs(x)
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e


def r_k(k: int, p: int) -> int:
    """Largest r with p^r <= k (k >= 1)."""
    if k < 1:
        raise ValueError("r_k is only defined for k >= 1")
    r = 0
    while p ** (r + 1) <= k:
        r += 1
    return r


def r_k0(k: int, p: int) -> int:
    # r_0 := 0, used wherever a bound like m + r_k <= n must admit k = 0
    return 0 if k == 0 else r_k(k, p)


def max_k(p: int, n: int, m: int) -> int:
    """Largest k with m + r_k <= n, i.e. p^(n-m+1) - 1."""
    return p ** (n - m + 1) - 1
