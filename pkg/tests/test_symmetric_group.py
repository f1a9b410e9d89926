import numpy as np
import pytest
from hypothesis import given, strategies as st

from eostrata.symmetric_group import (
    Permutation, all_permutations, bruhat_leq, bruhat_leq_chain, compose, cycle,
    identity, inverse, inversions, length, longest_element, longest_element_block2,
    parse, simple_reflection, transposition,
)


def perms(max_n=9):
    return st.integers(1, max_n).flatmap(
        lambda n: st.permutations(list(range(1, n + 1))).map(Permutation))


def perm_pairs(max_n=8):
    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(st.permutations(list(range(1, n + 1))).map(Permutation),
                            st.permutations(list(range(1, n + 1))).map(Permutation)))


# ---------------------------------------------------------------- examples

def test_compose_right_factor_first():
    assert compose(transposition(4, 2, 3), transposition(4, 1, 2)) == Permutation([3, 1, 2, 4])
    g = parse("(2,3)(1,2)", 4)
    assert g(2) == 1 and g(3) == 2


def test_inverse_examples():
    assert inverse(Permutation([3, 1, 2, 4])) == Permutation([2, 3, 1, 4])
    assert inverse(identity(5)) == identity(5)


def test_length_examples():
    assert length(longest_element(4)) == 6
    assert length(Permutation([3, 1, 4, 2])) == 3
    assert inversions(Permutation([3, 1, 4, 2])) == [(1, 2), (1, 4), (3, 4)]
    assert length(identity(7)) == 0


def test_bruhat_examples():
    assert bruhat_leq(identity(4), Permutation([3, 1, 4, 2]))
    assert bruhat_leq(Permutation([3, 1, 4, 2]), longest_element(4))
    assert not bruhat_leq(longest_element(4), Permutation([3, 1, 4, 2]))


def test_longest_elements():
    assert longest_element(5) == Permutation([5, 4, 3, 2, 1])
    assert longest_element_block2(5) == Permutation([2, 1, 5, 4, 3])


def test_block_longest_element_conjugates_simple_reflections():
    q = 7
    c = longest_element_block2(q)
    for k in range(3, q):
        assert compose(compose(c, simple_reflection(q, k)), c) == simple_reflection(q, q + 2 - k)


def test_parse_and_cycles():
    assert parse("[3,1,2,4]") == Permutation([3, 1, 2, 4])
    assert cycle(4, 1, 2, 3) == Permutation([2, 3, 1, 4])
    with pytest.raises(ValueError):
        Permutation([1, 1, 2])
    with pytest.raises(ValueError):
        compose(identity(3), identity(4))


# -------------------------------------------------------------- exhaustive

@pytest.mark.parametrize("n", [3, 4, 5])
def test_bruhat_matches_chain_definition(n):
    ps = list(all_permutations(n))
    for p in ps:
        for r in ps:
            assert bruhat_leq(p, r) == bruhat_leq_chain(p, r), (p, r)


@pytest.fixture(scope="module")
def s6_order():
    ps = list(all_permutations(6))
    index = {p: i for i, p in enumerate(ps)}
    mat = np.array([[bruhat_leq(p, r) for r in ps] for p in ps])
    return ps, index, mat


def test_bruhat_is_partial_order_s6(s6_order):
    ps, _, mat = s6_order
    assert mat.diagonal().all()
    assert not (mat & mat.T & ~np.eye(len(ps), dtype=bool)).any()
    two_step = (mat.astype(np.int32) @ mat.astype(np.int32)) > 0
    assert not (two_step & ~mat).any()


def test_bruhat_inversion_invariance_s6(s6_order):
    ps, index, mat = s6_order
    inv = np.array([index[inverse(p)] for p in ps])
    assert (mat == mat[np.ix_(inv, inv)]).all()


# ---------------------------------------------------------------- properties

@given(perms())
def test_length_changes_by_one_under_simple_reflections(p):
    for i in range(1, p.degree):
        assert abs(length(compose(p, simple_reflection(p.degree, i))) - length(p)) == 1


@given(perms())
def test_length_of_inverse(p):
    assert length(inverse(p)) == length(p)
    assert inverse(inverse(p)) == p
    assert compose(p, inverse(p)) == identity(p.degree)


@given(perm_pairs())
def test_bruhat_implies_length_order(pair):
    p, r = pair
    if bruhat_leq(p, r):
        assert length(p) <= length(r)
    assert bruhat_leq(p, r) == bruhat_leq(inverse(p), inverse(r))


@given(perms())
def test_identity_minimum_longest_maximum(p):
    assert bruhat_leq(identity(p.degree), p)
    assert bruhat_leq(p, longest_element(p.degree))
