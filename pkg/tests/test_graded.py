import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gradedmassey.graded import (FilteredModule, decomposition_free_quotient, finiteness_cascade, full_span,
                                 gr_surjection_check, graded_piece, is_sigma_stable, j_kernel,
                                 mainthm_map_check, random_module, random_stable_subgroup, telescopes)
from gradedmassey.linalg import Span
from gradedmassey.massey import UModule


def group_ring(s, p=3, n=1, m=1):
    return UModule.truncated_group_ring(p, m, n, s)


# brute-force oracle: the chain I^k M as sets of elements

def _elements(M):
    return {tuple(M.reduce(x).tolist()) for x in M.elements()}


def _minus_one(M, x):
    return tuple(M.reduce(M.act(1, np.array(x)) - np.array(x)).tolist())


def brute_chain(M):
    layers = [_elements(M)]
    while len(layers[-1]) > 1:
        gens = {_minus_one(M, x) for x in layers[-1]}
        # (sigma - 1) of a subgroup is a subgroup, so the image set is already closed
        layers.append(gens)
    return [len(L) for L in layers]


def brute_kernel(M, k):
    out = 0
    for x in M.elements():
        y = tuple(M.reduce(x).tolist())
        for _ in range(k):
            y = _minus_one(M, y)
        out += not any(y)
    return out


def test_group_ring_mod_i2():
    F = FilteredModule(group_ring(2))
    assert [graded_piece(F, k).order for k in range(3)] == [3, 3, 1]


def test_trivial_action():
    M = UModule(3, 2, 2, [9, 3], np.eye(2, dtype=np.int64))
    F = FilteredModule(M)
    assert F.length == 1
    assert graded_piece(F, 0).order == M.size() and graded_piece(F, 1).order == 1


@pytest.mark.parametrize("s,p,n,m", [(3, 3, 1, 1), (3, 3, 2, 2), (9, 3, 2, 1), (4, 2, 3, 2), (8, 2, 3, 1)])
def test_chain_matches_enumeration(s, p, n, m):
    M = group_ring(s, p, n, m)
    F = FilteredModule(M)
    sizes = brute_chain(M)
    assert [F.I(k).order() for k in range(len(sizes))] == sizes
    assert telescopes(F) and finiteness_cascade(F)


def test_group_ring_is_surjective_everywhere():
    F = FilteredModule(group_ring(3))
    assert all(gr_surjection_check(F, k) for k in range(4))


def test_j_kernel_examples():
    M = group_ring(3)
    F = FilteredModule(M)
    assert j_kernel(F, 0).is_zero()
    assert j_kernel(F, F.length) == full_span(M)
    K = j_kernel(F, 1)
    assert K.order() == 3 and K.order() == brute_kernel(M, 1)
    norm = M.embed(np.array([0, 0, 1]))          # x^2 = (sigma - 1)^2 is the norm mod 3
    assert norm in K


def test_j_kernel_levels():
    M = group_ring(3, n=2, m=2)
    F = FilteredModule(M)
    assert j_kernel(F, 1, m_level=2) == j_kernel(F, 1)
    assert j_kernel(F, 1, m_level=0) == full_span(M)
    assert j_kernel(F, 1, designated=full_span(M)) == full_span(M)


@pytest.mark.parametrize("s,p,n,m", [(3, 3, 2, 2), (6, 3, 2, 1), (8, 2, 3, 1)])
def test_j_kernel_matches_enumeration(s, p, n, m):
    M = group_ring(s, p, n, m)
    F = FilteredModule(M)
    for k in range(F.length + 1):
        assert j_kernel(F, k).order() == brute_kernel(M, k)


def test_decomposition_free_quotient_extremes():
    M = group_ring(3)
    F = FilteredModule(M)
    for k in range(3):
        assert decomposition_free_quotient(F, Span.zero(M.P, M.rank), k).order == graded_piece(F, k).order
        assert decomposition_free_quotient(F, full_span(M), k).order == 1


def test_unstable_subgroup_rejected():
    M = group_ring(3)
    F = FilteredModule(M)
    S = Span([M.embed(np.array([1, 0, 0]))], M.P, M.rank)
    assert not is_sigma_stable(M, S)
    with pytest.raises(ValueError):
        decomposition_free_quotient(F, S, 1)


def test_mainthm_map_group_ring():
    F = FilteredModule(group_ring(3))
    assert mainthm_map_check(F, 0) and mainthm_map_check(F, 1)
    assert not mainthm_map_check(F, 1, J=Span.zero(F.M.P, F.M.rank))


@settings(max_examples=40)
@given(st.sampled_from([2, 3]), st.integers(0, 2**32 - 1))
def test_random_modules(p, seed):
    rng = np.random.default_rng(seed)
    M = random_module(p, 3, rng, max_log=5)
    F = FilteredModule(M)
    assert telescopes(F) and finiteness_cascade(F)
    assert [F.I(k).order() for k in range(F.length + 1)] == brute_chain(M)
    D = random_stable_subgroup(M, rng)
    for k in range(min(F.length + 1, 4)):
        assert gr_surjection_check(F, k)
        assert mainthm_map_check(F, k)
        assert mainthm_map_check(F, k, D=D)
