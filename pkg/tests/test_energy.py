import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subgroupsums import oracles
from subgroupsums.energy import (
    DENSE_C3_LIMIT,
    EnergyLedger,
    convolve_k,
    correlate,
    energy,
    energy_k,
    energy_k_pair,
    energy_ledger,
    mixed_energy_3,
    stepanov_sum,
    t_moment,
    triple_correlation,
)
from subgroupsums.errors import CapacityError, ConsistencyError, InvarianceError
from subgroupsums.primefield import invariant_set, random_invariant_set, subgroup_of_order

from helpers import indicator


def sets(max_n=60, max_size=12):
    return st.integers(2, max_n).flatmap(
        lambda n: st.tuples(st.just(n), st.sets(st.integers(0, n - 1), min_size=1, max_size=min(max_size, n)))
    )


def test_correlation_examples():
    assert correlate(indicator([1, 2, 4], 7), indicator([1, 2, 4], 7)).values.tolist() == [3, 1, 1, 1, 1, 1, 1]
    assert correlate(indicator([1, 4], 5), indicator([1, 4], 5)).values.tolist() == [2, 0, 1, 1, 0]
    g = np.array([3, 0, 2, 5, 1])
    assert correlate(indicator([0], 5), g).values.tolist() == g.tolist()


def test_convolution_examples():
    G = indicator([1, 2, 4], 7)
    c = convolve_k(G, 2)
    assert c.total == 9 and c[2] == 1
    assert convolve_k(G, 1).values.tolist() == G.tolist()
    assert convolve_k(indicator([1, 4], 5), 3).total == 8
    with pytest.raises(ValueError):
        convolve_k(G, 0)


def test_energy_examples():
    G = indicator([1, 2, 4], 7)
    assert energy(G) == 15 and energy(indicator([1, 4], 5)) == 6
    assert energy(indicator([3], 9)) == 1
    assert energy_k(G, 2) == 15 and energy_k(G, 3) == 33
    assert energy_k_pair(G, G, 3) == 33 and energy_k_pair(G, G, 2) == energy(G, G)
    assert t_moment(G, 2) == 15
    assert t_moment(G, 3) == oracles.t_moment_tuples([1, 2, 4], 3, 7) == 111
    assert all(energy_k(indicator([4], 11), k) == 1 for k in (2, 3, 5))
    assert t_moment(indicator([4], 11), 4) == 1


@given(sets(max_n=200, max_size=40))
def test_energy_three_ways(ns):
    n, A = ns
    f = indicator(A, n)
    e = energy(f)
    assert e == oracles.energy_quadruples(sorted(A), sorted(A), n)
    assert e == oracles.energy_fourier(sorted(A), n)
    assert isinstance(e, int)


@given(sets(), sets())
def test_two_set_energy(na, nb):
    n = na[0]
    A, B = na[1], {b % n for b in nb[1]}
    assert energy(indicator(A, n), indicator(B, n)) == oracles.energy_quadruples(sorted(A), sorted(B), n)


@given(sets(max_n=40, max_size=8), st.integers(2, 4))
def test_energy_k_and_t_moment(ns, k):
    n, A = ns
    f = indicator(A, n)
    assert energy_k(f, k) == oracles.energy_k_direct(sorted(A), k, n)
    assert t_moment(f, k) == oracles.t_moment_direct(sorted(A), k, n)


@given(sets(max_n=30, max_size=8))
def test_correlation_invariants(ns):
    n, A = ns
    f = indicator(A, n)
    c = correlate(f, f)
    assert c[0] == len(A) and c.total == len(A) ** 2
    assert np.array_equal(c.values, c.values[(-np.arange(n)) % n])
    assert np.array_equal(c.values, oracles.correlation_pairs(sorted(A), n))


@given(st.integers(1, 300), st.integers(0, 2**32))
def test_correlation_convolution_theorems(n, seed):
    rng = np.random.default_rng(seed)
    f = rng.integers(-5, 6, size=n)
    g = rng.integers(-5, 6, size=n)
    fg = correlate(f, g).values
    direct = np.array([sum(f[y] * g[(y + x) % n] for y in range(n)) for x in range(n)])
    assert np.array_equal(fg, direct)
    assert int(fg.sum()) == int(f.sum()) * int(g.sum())
    F, G = np.fft.fft(f), np.fft.fft(g)
    assert np.allclose(np.fft.fft(fg), np.conj(F) * G, atol=1e-8 * max(1, np.abs(F).max() * np.abs(G).max()))


def test_float_correlation():
    f = np.array([0.5, 1.0, 0.0, 2.0])
    g = np.array([1.0, 0.0, 0.25, 0.0])
    expect = [sum(f[y] * g[(y + x) % 4] for y in range(4)) for x in range(4)]
    assert np.allclose(correlate(f, g).values, expect)


def test_delta_identity():
    # E_k(A, B) equals the ordinary energy of the diagonal of A against B^(k-1)
    A, B = [1, 2], [1, 3]
    fa, fb = indicator(A, 5), indicator(B, 5)
    assert energy_k_pair(fa, fb, 2) == oracles.energy_delta(A, B, 1, 5) == 4
    assert energy_k_pair(fa, fb, 3) == oracles.energy_delta(A, B, 2, 5)


@given(sets(max_n=20, max_size=6), sets(max_n=20, max_size=6), st.integers(2, 3))
def test_delta_identity_property(na, nb, k):
    n = na[0]
    A, B = sorted(na[1]), sorted({b % n for b in nb[1]})
    assert energy_k_pair(indicator(A, n), indicator(B, n), k) == oracles.energy_delta(A, B, k - 1, n)


def test_mixed_energy_3():
    G = indicator([1, 2, 4], 7)
    assert mixed_energy_3(G, G, G) == 33
    rng = np.random.default_rng(4)
    for _ in range(5):
        f, g, h = (rng.integers(0, 2, size=32) for _ in range(3))
        exact = mixed_energy_3(f, g, h)
        assert exact == pytest.approx(oracles.mixed_energy_3_spectral(f, g, h), rel=1e-6)
    phi = rng.random(32)
    assert mixed_energy_3(phi, phi, phi) == pytest.approx(oracles.mixed_energy_3_spectral(phi, phi, phi), rel=1e-9)


def test_triple_correlation_examples():
    C = triple_correlation(indicator([0], 5))
    assert C(0, 0) == 1 and C.total() == 1 and C.square_sum() == 1
    C = triple_correlation(indicator([1, 2, 4], 7))
    assert C.square_sum() == 33 and C(0, 0) == 3 and C.total() == 27


@given(sets(max_n=64, max_size=10))
def test_triple_correlation_oracle(ns):
    n, A = ns
    C = triple_correlation(indicator(A, n))
    ref = oracles.triple_correlation_direct(sorted(A), n)
    a, b, v = C.nonzero()
    assert dict(zip(zip(a.tolist(), b.tolist()), v.tolist())) == ref
    assert C.square_sum() == energy_k(indicator(A, n), 3)


def test_sparse_triple_correlation():
    n = DENSE_C3_LIMIT + 89
    rng = np.random.default_rng(2)
    A = rng.choice(n, size=70, replace=False)
    f = indicator(A, n)
    C = triple_correlation(f)
    assert C.dense is None
    assert C.square_sum() == energy_k(f, 3) and C.total() == 70**3
    assert C(0, 0) == 70 and C(5, 3) == oracles.triple_correlation_direct(A.tolist(), n).get((5, 3), 0)
    with pytest.raises(CapacityError):
        triple_correlation(np.ones(1200, dtype=np.int64))


def test_ledger():
    led = energy_ledger(indicator([1, 2, 4], 7))
    assert led.entries["E"] == {"convolution": 15, "fourier": 15, "direct": 15}
    assert led["E_3"] == 33 and led["T_3"] == 111
    bad = EnergyLedger(7, 3)
    bad.record("E", "direct", 15)
    with pytest.raises(ConsistencyError):
        bad.record("E", "fourier", 16)


def test_stepanov_sum():
    G = subgroup_of_order(7, 3)
    Q = invariant_set(G, [1])
    value, rep = stepanov_sum(G, Q, Q)
    assert value == 3 and rep.name == "stepanov_sum" and rep.mode == "report"
    assert rep.rhs_shape == pytest.approx(3 ** (1 / 3) * 3 ** (4 / 3))
    H = subgroup_of_order(9973, 36)
    for s in range(5):
        Q, Q1 = random_invariant_set(H, 1 + s, s), random_invariant_set(H, 2 + s, 100 + s)
        v, rep = stepanov_sum(H, Q, Q1)
        assert v == int(correlate(Q.indicator, Q1.indicator).values[H.elements].sum())
        assert np.isfinite(rep.ratio)
    with pytest.raises(InvarianceError):
        stepanov_sum(G, invariant_set(subgroup_of_order(7, 1), [1]), Q)
