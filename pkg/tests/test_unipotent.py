import numpy as np
import pytest
from hypothesis import given, strategies as st

from gradedmassey.groupring import GroupRing, aug_power
from gradedmassey.residue import r_k
from gradedmassey.unipotent import (UnipotentMatrix, action_check, build_rho, closure, commutator,
                                    commutator_chain_check, defining_relations_check, elementary,
                                    generators, in_centre, in_last_column, intertwining_check,
                                    n_module_iso, rho_is_homomorphism, semidirect_model, structure_check,
                                    twisted_x)

SMALL = [(k, p, m) for k in range(1, 5) for p, m in ((2, 1), (2, 2), (2, 3), (3, 1), (3, 2))
         if p**m <= 9]


def test_generators_k1():
    g = generators(1, 2, 1)
    assert g.X == elementary(1, 2, 3, 2)
    assert g.Y == elementary(2, 3, 3, 2)
    assert g.Z == elementary(1, 3, 3, 2)
    assert g.Ys[0] == g.Y
    assert g.Ys[-1] == g.Z
    assert commutator(g.X, g.Y) == g.Z


def test_generators_general():
    for k in range(1, 5):
        g = generators(k, 3, 1)
        assert g.Ys[0] == g.Y and g.Ys[k] == g.Z and len(g.Ys) == k + 1


@pytest.mark.parametrize("k,p,m", SMALL)
def test_commutator_chain(k, p, m):
    assert commutator_chain_check(k, p, m)


@pytest.mark.parametrize("k,p,m", SMALL)
def test_action(k, p, m):
    for t in range(p**m):
        assert action_check(k, p, m, t)


@pytest.mark.parametrize("k,p,m", SMALL)
def test_structure(k, p, m):
    rep = structure_check(k, p, m)
    assert rep.ok
    assert rep.h_order == p ** (m + r_k(k, p))


def test_centre_and_last_column_predicates():
    g = generators(2, 3, 1)
    assert in_centre(g.Z) and not in_centre(g.Y)
    assert in_last_column(g.Y) and not in_last_column(g.X)
    # membership predicates agree with closures of generators
    for k, p, m in ((1, 2, 1), (2, 2, 1), (1, 3, 1), (3, 2, 1)):
        g = generators(k, p, m)
        last = closure(list(g.Ys))
        assert all(in_last_column(UnipotentMatrix.from_upper(u, k + 2, p**m)) for u in last)
        assert len(last) == (p**m) ** (k + 1)
        centre = closure([g.Z])
        assert all(in_centre(UnipotentMatrix.from_upper(u, k + 2, p**m)) for u in centre)


@pytest.mark.parametrize("k,p,m", SMALL)
def test_module_iso(k, p, m):
    n = m + r_k(k, p)
    mod = n_module_iso(k, p, m, n)
    assert intertwining_check(mod, exhaustive=mod.order() <= 729)
    R = GroupRing.cyclic(p, n, p**m)
    assert mod.order() == R.N ** R.dim // aug_power(R, k + 1).order()
    g = generators(k, p, m)
    assert mod.from_matrix(g.Y) == mod.to_ring(mod.coords(g.Y))
    one = np.zeros(k + 1, dtype=np.int64)
    one[0] = 1
    assert np.array_equal(mod.coords(g.Y), one)
    for j in range(k + 1):
        x = (R.sigma() - 1) ** j
        assert np.array_equal(mod.from_ring(x), mod.coords(g.Ys[j]))


def test_module_iso_rejects_bad_parameters():
    with pytest.raises(ValueError):
        n_module_iso(3, 2, 1, 1)


def test_split_model_is_canonical_embedding():
    model, mod = semidirect_model(1, 3, 1, 1, t=0)
    rho = build_rho(1, 3, 1, 1, model)
    assert rho[model.sigma_lift] == generators(1, 3, 1).X
    assert rho_is_homomorphism(model.gamma, rho, full=True)


def test_twisted_power_k1_p3():
    model, _ = semidirect_model(1, 3, 1, 1, t=1)
    rho = build_rho(1, 3, 1, 1, model)
    s = model.sigma_lift
    G = model.gamma
    assert rho[G.power(s, 3)] == rho[s] ** 3
    assert rho_is_homomorphism(G, rho, full=True)


def test_boundary_case_p3_k2():
    for t in range(3):
        model, _ = semidirect_model(2, 3, 1, 1, t=t)
        rho = build_rho(2, 3, 1, 1, model)
        assert rho_is_homomorphism(model.gamma, rho, full=True)
        assert defining_relations_check(2, 3, 1, 1, t)
    # at the boundary the p-th power of the twisted lift is nontrivial when t != 0
    assert not (twisted_x(2, 3, 1, 1) ** 3).is_identity()


@pytest.mark.parametrize("k,p,m", SMALL)
def test_defining_relations(k, p, m):
    n = m + r_k(k, p)
    for t in range(p**m):
        assert defining_relations_check(k, p, m, n, t)


def test_build_rho_rejects_bad_lift():
    model, _ = semidirect_model(1, 2, 1, 1)
    bad = type(model)(model.gamma, model.chi, 0, model.kernel_image, model.t)
    with pytest.raises(ValueError):
        build_rho(1, 2, 1, 1, bad)


@st.composite
def unipotents(draw, size=4, N=9):
    n = size * (size - 1) // 2
    return UnipotentMatrix.from_upper(draw(st.lists(st.integers(0, N - 1), min_size=n, max_size=n)), size, N)


@given(unipotents(), unipotents(), unipotents())
def test_group_laws(a, b, c):
    I = UnipotentMatrix.identity(4, 9)
    assert (a * b) * c == a * (b * c)
    assert a * a.inverse() == I
    assert (a * b).inverse() == b.inverse() * a.inverse()
    assert UnipotentMatrix.from_upper(a.upper(), 4, 9) == a
