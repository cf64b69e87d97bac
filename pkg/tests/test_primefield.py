import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subgroupsums.errors import DivisibilityError, DomainError
from subgroupsums.primefield import (
    Modulus,
    all_subgroups,
    check_closure,
    contains_minus_one,
    cosets,
    discrete_log_table,
    divisors,
    find_primitive_root,
    heilbronn_subgroup,
    invariant_set,
    is_invariant,
    is_prime,
    primes_between,
    random_invariant_set,
    subgroup_of_order,
)

SMALL_PRIMES = [p for p in primes_between(3, 400)]


def test_primality_and_ranges():
    assert primes_between(1, 30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert not is_prime(1) and not is_prime(91) and is_prime(99991)
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    with pytest.raises(DomainError):
        Modulus(15)


@pytest.mark.parametrize("p,g", [(7, 3), (13, 2)])
def test_primitive_root_examples(p, g):
    assert find_primitive_root(p) == g
    assert len({pow(g, k, p) for k in range(p - 1)}) == p - 1


def test_primitive_root_rejects():
    with pytest.raises(DomainError):
        find_primitive_root(2)
    with pytest.raises(DomainError):
        find_primitive_root(21)


@pytest.mark.parametrize(
    "p,t,elems",
    [(7, 3, [1, 2, 4]), (13, 4, [1, 5, 8, 12]), (7, 6, [1, 2, 3, 4, 5, 6])],
)
def test_subgroup_examples(p, t, elems):
    G = subgroup_of_order(p, t)
    assert G.elements.tolist() == elems
    assert sorted(pow(G.generator, k, p) for k in range(t)) == elems


def test_subgroup_divisibility():
    with pytest.raises(DivisibilityError):
        subgroup_of_order(7, 4)


def test_coset_examples():
    assert cosets(subgroup_of_order(7, 3)) == [1, 3]
    assert cosets(subgroup_of_order(7, 6)) == [1]
    # {1,5,8,12}: 3 = 2*8 shares the coset of 2, so the minimal representatives are 1, 2, 4
    assert cosets(subgroup_of_order(13, 4)) == [1, 2, 4]


@pytest.mark.parametrize("p", SMALL_PRIMES[:40])
def test_cosets_partition(p):
    for G in all_subgroups(p):
        reps = cosets(G)
        assert len(reps) == (p - 1) // G.order
        union = np.concatenate([r * G.elements % p for r in reps])
        assert sorted(union.tolist()) == list(range(1, p))
        assert all(r == min((r * G.elements % p).tolist()) for r in reps)
        assert check_closure(G)
        assert G.coset_map[reps].tolist() == list(range(len(reps)))


def test_discrete_log_roundtrip():
    for p in (3, 7, 101, 9973):
        g, dl = find_primitive_root(p), discrete_log_table(p)
        assert all(pow(g, int(dl[x]), p) == x for x in range(1, p))


def test_exponents_match_generator():
    G = subgroup_of_order(101, 20)
    assert all(pow(G.generator, int(k), 101) == int(x) for x, k in zip(G.elements, G.exponents))


def test_invariant_sets():
    G = subgroup_of_order(7, 3)
    Q = random_invariant_set(G, 1, seed=3)
    assert Q.elements.tolist() in ([1, 2, 4], [3, 5, 6])
    assert random_invariant_set(G, 2, seed=0).elements.tolist() == [1, 2, 3, 4, 5, 6]
    assert random_invariant_set(G, 1, seed=11).elements.tolist() == random_invariant_set(G, 1, seed=11).elements.tolist()
    with pytest.raises(DomainError):
        random_invariant_set(G, 3, seed=0)
    with pytest.raises(DomainError):
        invariant_set(G, [1, 2])  # same coset


@given(st.sampled_from(SMALL_PRIMES), st.data())
def test_invariant_set_property(p, data):
    G = data.draw(st.sampled_from(all_subgroups(p)))
    k = data.draw(st.integers(1, G.index))
    Q = random_invariant_set(G, k, data.draw(st.integers(0, 2**63)))
    assert Q.size == k * G.order
    assert is_invariant(Q.elements, G)
    assert np.array_equal(np.unique(Q.elements[:, None] * G.elements[None, :] % p), Q.elements)


def test_is_invariant_rejects():
    G = subgroup_of_order(13, 4)
    assert not is_invariant([1, 5, 8], G)
    assert not is_invariant([1, 5, 8, 12, 2, 10, 3, 7], G)
    assert is_invariant([], G)


def test_minus_one():
    assert contains_minus_one(subgroup_of_order(13, 4))
    assert not contains_minus_one(subgroup_of_order(7, 3))
    assert contains_minus_one(subgroup_of_order(11, 10))


def test_heilbronn_subgroup():
    assert heilbronn_subgroup(3).elements.tolist() == [1, 8]
    assert heilbronn_subgroup(5).elements.tolist() == [1, 7, 18, 24]
    for p in (7, 31, 101):
        H = heilbronn_subgroup(p)
        e = H.elements
        assert len(set(e.tolist())) == p - 1
        assert all(x % p for x in e.tolist())
        assert sorted((e % p).tolist()) == list(range(1, p))
        assert check_closure(H)
    with pytest.raises(DomainError):
        heilbronn_subgroup(2)


def test_prime_square_modulus():
    m = Modulus(5, 2)
    assert (m.n, m.unit_count) == (25, 20)
    with pytest.raises(DomainError):
        subgroup_of_order(m, 4)
    with pytest.raises(DomainError):
        cosets(heilbronn_subgroup(5))
