"""Arithmetic in Z/p and Z/p^2: primitive roots, subgroups, cosets, invariant sets."""

from __future__ import annotations

import math

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DivisibilityError, DomainError
from .rng import SplitMix64

# dense membership bitsets are only built up to this modulus
BITSET_LIMIT = 10**7


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p <= hi (sieve of Eratosthenes)."""
    if hi < 2 or hi < lo:
        return []
    sieve = np.ones(hi + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, int(hi**0.5) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return [int(x) for x in np.flatnonzero(sieve) if x >= lo]


def prime_factors(n: int) -> list[int]:
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


@dataclass(frozen=True)
class Modulus:
    p: int
    exponent: int = 1

    def __post_init__(self):
        if self.exponent not in (1, 2):
            raise DomainError(f"only p and p^2 moduli are supported, got exponent {self.exponent}")
        if not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")

    @property
    def n(self) -> int:
        return self.p**self.exponent

    @property
    def unit_count(self) -> int:
        return (self.p - 1) * self.p ** (self.exponent - 1)


def _as_modulus(m: Modulus | int) -> Modulus:
    return m if isinstance(m, Modulus) else Modulus(int(m))


def find_primitive_root(m: Modulus | int) -> int:
    """Smallest generator of F_p^*."""
    if isinstance(m, int) and not is_prime(m):
        raise DomainError(f"{m} is not prime")
    m = _as_modulus(m)
    if m.exponent != 1:
        raise DomainError("primitive roots are only provided for prime moduli")
    p = m.p
    if p < 3:
        raise DomainError("p must be at least 3")
    qs = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise AssertionError("unreachable: every prime field has a primitive root")


@lru_cache(maxsize=64)
def discrete_log_table(p: int) -> np.ndarray:
    """table[x] = k with g^k = x for the smallest primitive root g; table[0] = -1."""
    g = find_primitive_root(p)
    # baby steps g^0..g^(b-1), giant steps g^(b j); p^2 < 2^63 keeps products exact
    b = math.isqrt(p - 1) + 1
    baby = np.empty(b, dtype=np.int64)
    x = 1
    for i in range(b):
        baby[i] = x
        x = x * g % p
    giant = np.empty(b, dtype=np.int64)
    y = 1
    for j in range(b):
        giant[j] = y
        y = y * x % p
    powers = ((giant[:, None] * baby[None, :]) % p).ravel()[: p - 1]
    table = np.full(p, -1, dtype=np.int64)
    table[powers] = np.arange(p - 1)
    table.setflags(write=False)
    return table


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SubgroupDescriptor:
    modulus: Modulus
    order: int
    generator: int
    elements: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.modulus.n

    @property
    def p(self) -> int:
        return self.modulus.p

    @property
    def index(self) -> int:
        """Number of cosets in the unit group."""
        return self.modulus.unit_count // self.order

    @cached_property
    def mask(self) -> np.ndarray:
        if self.n > BITSET_LIMIT:
            raise MemoryError("modulus too large for a dense bitset")
        m = np.zeros(self.n, dtype=bool)
        m[self.elements] = True
        m.setflags(write=False)
        return m

    @cached_property
    def indicator(self) -> np.ndarray:
        return self.mask.astype(np.int64)

    def __contains__(self, x: int) -> bool:
        x %= self.n
        i = np.searchsorted(self.elements, x)
        return bool(i < self.order and self.elements[i] == x)

    @cached_property
    def exponents(self) -> np.ndarray:
        """k with generator^k = elements[i]; the discrete log inside the subgroup."""
        out = np.empty(self.order, dtype=np.int64)
        x = 1
        pos = {int(e): i for i, e in enumerate(self.elements)}
        for k in range(self.order):
            out[pos[x]] = k
            x = x * self.generator % self.n
        out.setflags(write=False)
        return out

    @cached_property
    def coset_firsts(self) -> np.ndarray:
        """Minimal element of every coset, ascending (prime modulus only)."""
        _require_prime(self)
        cls = discrete_log_table(self.p)[1:] % self.index
        first = np.full(self.index, self.p, dtype=np.int64)
        np.minimum.at(first, cls, np.arange(1, self.p, dtype=np.int64))
        first.sort()
        first.setflags(write=False)
        return first

    @cached_property
    def coset_map(self) -> np.ndarray:
        """coset_map[x] = position of x's coset in cosets(self); -1 at 0 (prime modulus only)."""
        dl = discrete_log_table(self.p)
        rank = np.empty(self.index, dtype=np.int64)
        rank[dl[self.coset_firsts] % self.index] = np.arange(self.index)
        out = np.full(self.p, -1, dtype=np.int64)
        out[1:] = rank[dl[1:] % self.index]
        out.setflags(write=False)
        return out


def _require_prime(G: SubgroupDescriptor) -> None:
    if G.modulus.exponent != 1:
        raise DomainError("operation requires a prime modulus")


def subgroup_of_order(m: Modulus | int, t: int) -> SubgroupDescriptor:
    """The unique subgroup of F_p^* of order t."""
    m = _as_modulus(m)
    if m.exponent != 1:
        raise DomainError("subgroup_of_order works over F_p; use heilbronn_subgroup for Z/p^2")
    p = m.p
    if t < 1 or (p - 1) % t:
        raise DivisibilityError(f"t={t} does not divide p-1={p - 1}")
    if p == 2:
        return SubgroupDescriptor(m, 1, 1, _frozen([1]))
    dl = discrete_log_table(p)
    step = (p - 1) // t
    elems = np.flatnonzero((dl >= 0) & (dl % step == 0))
    gen = pow(find_primitive_root(p), step, p)
    return SubgroupDescriptor(m, t, gen, _frozen(elems))


def all_subgroups(p: int) -> list[SubgroupDescriptor]:
    return [subgroup_of_order(p, t) for t in divisors(p - 1)]


def cosets(G: SubgroupDescriptor) -> list[int]:
    """Minimal representative of each coset of G in F_p^*, ascending."""
    return [int(x) for x in G.coset_firsts]


@dataclass(frozen=True, eq=False)
class InvariantSet:
    modulus: Modulus
    subgroup: SubgroupDescriptor = field(repr=False)
    coset_reps: tuple[int, ...]
    elements: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.elements)

    @cached_property
    def indicator(self) -> np.ndarray:
        v = np.zeros(self.modulus.n, dtype=np.int64)
        v[self.elements] = 1
        return v


def invariant_set(G: SubgroupDescriptor, reps: Iterable[int]) -> InvariantSet:
    """Union of the cosets r*G for r in reps (reps must lie in distinct cosets)."""
    _require_prime(G)
    reps = tuple(int(r) % G.p for r in reps)
    if any(r == 0 for r in reps):
        raise DomainError("coset representatives must be units")
    classes = [int(G.coset_map[r]) for r in reps]
    if len(set(classes)) != len(classes):
        raise DomainError("representatives must lie in pairwise distinct cosets")
    if reps:
        elems = np.unique(np.concatenate([np.asarray(r * G.elements % G.p) for r in reps]))
    else:
        elems = np.empty(0, dtype=np.int64)
    return InvariantSet(G.modulus, G, reps, _frozen(elems))


def random_invariant_set(G: SubgroupDescriptor, k: int, seed: int) -> InvariantSet:
    reps = cosets(G)
    if not 1 <= k <= len(reps):
        raise DomainError(f"coset count k={k} outside [1, {len(reps)}]")
    chosen = SplitMix64(seed).sample(reps, k)
    return invariant_set(G, sorted(chosen))


def is_invariant(elements: Sequence[int] | np.ndarray, G: SubgroupDescriptor) -> bool:
    """True iff elements * G == elements (as sets); multiplying by the generator suffices."""
    s = np.unique(np.asarray(elements, dtype=np.int64) % G.n)
    if len(s) == 0:
        return True
    if len(s) % G.order:
        return False
    return bool(np.array_equal(np.sort(s * G.generator % G.n), s))


def contains_minus_one(G: SubgroupDescriptor) -> bool:
    return (G.n - 1) in G


def heilbronn_subgroup(p: int) -> SubgroupDescriptor:
    """{m^p mod p^2 : 1 <= m <= p-1}, a subgroup of (Z/p^2)^* of order p-1."""
    if p < 3:
        raise DomainError("p must be at least 3")
    m = Modulus(p, 2)
    n = m.n
    elems = sorted(pow(k, p, n) for k in range(1, p))
    gen = pow(find_primitive_root(p), p, n)
    return SubgroupDescriptor(m, p - 1, gen, _frozen(elems))


def check_closure(G: SubgroupDescriptor, seed: int = 0, full_limit: int = 1000, samples: int = 10_000) -> bool:
    """Products of elements stay in G: exhaustive for small G, sampled otherwise."""
    e = G.elements
    if G.order <= full_limit:
        prods = (e[:, None] * e[None, :]) % G.n
        return bool(np.all(np.isin(prods, e)))
    rng = SplitMix64(seed)
    for _ in range(samples):
        a = int(e[rng.below(G.order)])
        b = int(e[rng.below(G.order)])
        if (a * b) % G.n not in G:
            return False
    return True
