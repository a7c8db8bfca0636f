"""Fixed families of small instances used by the verification suites."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gcohom import EmbeddingProblem, NoLift, lift_search
from .groups import FiniteGroup, dihedral, homomorphisms, quaternion
from .massey import SyntheticKummerInstance, UModule
from .unipotent import (UnipotentMatrix, build_rho, generators, in_centre, in_last_column,
                        semidirect_model)


# embedding problems ------------------------------------------------------------------------

def unipotent_group(gens, name: str) -> FiniteGroup:
    """The finite group generated by unipotent matrices, labelled by their upper entries."""
    size, N = gens[0].size, gens[0].N

    def mul(a, b):
        return (UnipotentMatrix.from_upper(a, size, N) * UnipotentMatrix.from_upper(b, size, N)).upper()
    ident = UnipotentMatrix.identity(size, N).upper()
    return FiniteGroup.generated_by([g.upper() for g in gens], mul, ident, name)


def _unipotent_problem(k: int, p: int, m: int, centre: bool) -> tuple[str, EmbeddingProblem]:
    g = generators(k, p, m)
    G = unipotent_group([g.X, g.Y], f"G{k},{p},{m}")
    test = in_centre if centre else in_last_column
    A = [i for i, lab in enumerate(G.labels) if test(UnipotentMatrix.from_upper(lab, k + 2, p**m))]
    name = f"Heis{p}/Z" if centre else f"G(k={k},p={p},m={m})/N"
    return name, EmbeddingProblem.from_normal_subgroup(G, A)


def embedding_targets() -> list[tuple[str, EmbeddingProblem]]:
    """Cyclic towers, Heisenberg groups over their centre, and unipotent groups over the last column."""
    C4, C8 = FiniteGroup.cyclic(4), FiniteGroup.cyclic(8)
    out = [("C4/C2", EmbeddingProblem.from_normal_subgroup(C4, [0, 2])),
           ("C8/C2", EmbeddingProblem.from_normal_subgroup(C8, [0, 4])),
           ("C8/C4", EmbeddingProblem.from_normal_subgroup(C8, [0, 2, 4, 6]))]
    out += [_unipotent_problem(1, p, 1, centre=True) for p in (2, 3)]
    out += [_unipotent_problem(k, p, m, centre=False) for k, p, m in ((1, 2, 1), (1, 3, 1), (2, 2, 1))]
    return out


def source_groups() -> list[FiniteGroup]:
    cyc = [FiniteGroup.cyclic(n) for n in (2, 3, 4, 6, 8, 9, 16)]
    ab = [FiniteGroup.abelian(o) for o in ((2, 2), (2, 4), (3, 3), (2, 2, 2), (4, 4))]
    return cyc + ab + [dihedral(4), quaternion()]


@dataclass
class ToolkitCase:
    name: str
    prob: EmbeddingProblem
    gamma: FiniteGroup
    rho_bar: list
    rho: list | None                     # a lift when one exists
    omegas: list = field(default_factory=list)

    @property
    def liftable(self) -> bool:
        return self.rho is not None


def _normal_subgroups_inside(gamma: FiniteGroup, ker: list[int], limit: int = 3) -> list[list[int]]:
    seen, out = set(), []
    for x in ker:
        N = tuple(gamma.normal_closure([x]))
        if N not in seen:
            seen.add(N)
            out.append(list(N))
    out.sort(key=len)
    if len(out) > limit:
        out = [out[0], out[len(out) // 2], out[-1]]
    return out


def _case(name, prob, gamma, rho_bar, rho=None) -> ToolkitCase:
    if rho is None:
        try:
            rho = lift_search(prob, gamma, rho_bar)
        except NoLift:
            rho = None
    ker = [g for g in range(gamma.order) if rho_bar[g] == 0]
    omegas = _normal_subgroups_inside(gamma, ker) if rho is not None else []
    return ToolkitCase(name, prob, gamma, list(rho_bar), rho, omegas)


def model_cases() -> list[ToolkitCase]:
    """Gamma = the finite model of a split unipotent extension, rho = rho^(k)."""
    out = []
    for k, p, m, n in ((1, 2, 1, 1), (1, 2, 1, 2)):
        model, _ = semidirect_model(k, p, m, n)
        rho = build_rho(k, p, m, n, model)
        name, prob = _unipotent_problem(k, p, m, centre=False)
        idx = [prob.GG.index[r.upper()] for r in rho]
        rho_bar = [prob.phi[x] for x in idx]
        out.append(_case(f"{name}<-model(n={n})", prob, model.gamma, rho_bar, idx))
    return out


def toolkit_cases(per_pair: int = 2) -> list[ToolkitCase]:
    """Every target against every source group, keeping the homomorphisms with largest image."""
    out = []
    for tname, prob in embedding_targets():
        for gamma in source_groups():
            homs = sorted(homomorphisms(gamma, prob.HH), key=lambda f: (-len(set(f)), f))
            for rb in homs[:per_pair]:
                out.append(_case(f"{tname}<-{gamma.name}", prob, gamma, rb))
    return out + model_cases()


# Kummer models -----------------------------------------------------------------------------------

@dataclass(frozen=True)
class KummerSpec:
    """A truncated group ring (Z/p^e)[x]/x^s with sigma = 1 + x, y = 1, z = zc * (invariant)."""

    p: int
    n: int
    m: int
    k: int
    s: int
    exponent: int | None = None
    zc: int = 1
    doubled: bool = False          # U = R[G] + R[G] with the second summand's norm added to W

    def build(self) -> SyntheticKummerInstance:
        p, n, m, k = self.p, self.n, self.m, self.k
        if self.doubled:
            A = UModule.truncated_group_ring(p, m, n, p**n)
            U = UModule.direct_sum(A, A)
        else:
            U = UModule.truncated_group_ring(p, m, n, self.s, self.exponent)
        y = np.zeros(U.rank, dtype=np.int64)
        y[0] = 1
        inv = U.invariant_characters()
        z = np.zeros(U.rank, dtype=np.int64)
        if self.zc and len(inv.basis):
            z = (self.zc * np.asarray(inv.basis[0])) % U.P
        inst = SyntheticKummerInstance(p, m, n, k, U, y, z)
        if self.doubled:
            e2 = np.zeros(U.rank, dtype=np.int64)
            e2[U.rank // 2] = 1
            inst = inst.with_w([inst.D(0, e2)])
        return inst

    @property
    def label(self) -> str:
        if self.doubled:
            return f"(p,n,m,k)=({self.p},{self.n},{self.m},{self.k}) U=R[G]^2"
        e = f" e={self.exponent}" if self.exponent else ""
        return f"(p,n,m,k)=({self.p},{self.n},{self.m},{self.k}) s={self.s}{e} zc={self.zc}"


KUMMER_GRID = (
    KummerSpec(3, 1, 1, 1, 3),
    KummerSpec(3, 1, 1, 2, 3),
    KummerSpec(3, 1, 1, 2, 2, zc=0),
    KummerSpec(3, 2, 1, 1, 9),
    KummerSpec(3, 2, 1, 2, 8),
    KummerSpec(3, 2, 1, 3, 7),
    KummerSpec(3, 2, 2, 1, 3, exponent=2),
    KummerSpec(3, 2, 2, 1, 9, exponent=1),
    KummerSpec(3, 2, 2, 2, 2, exponent=2),
    KummerSpec(3, 2, 2, 2, 8, exponent=1),
    KummerSpec(2, 3, 1, 1, 8),
    KummerSpec(2, 3, 1, 2, 7),
    KummerSpec(2, 3, 1, 3, 6),
    KummerSpec(2, 3, 1, 2, 8, zc=0),
)

# an instance whose P^(1) is nonzero
NONZERO_P1 = KummerSpec(3, 1, 1, 2, 0, zc=0, doubled=True)

# extra instances with m >= 2 for the reduction compatibility
SHRINK_M_GRID = (
    KummerSpec(2, 2, 2, 1, 2, exponent=2),
    KummerSpec(2, 3, 2, 1, 4, exponent=2),
    KummerSpec(2, 3, 2, 2, 3, exponent=2),
)
