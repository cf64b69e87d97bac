"""Brute-force counterparts of the fast routines.

Nothing here goes through the chirp-z transform or the rounding guard; each
function enumerates its definition directly.  Costs are polynomial in the
set sizes and are only meant for desk-scale cross-checks.
"""

from __future__ import annotations

import itertools
from collections import Counter

import numpy as np


def dft_direct(f) -> np.ndarray:
    f = np.asarray(f, dtype=np.complex128)
    n = len(f)
    k = np.arange(n)
    return np.exp(-2j * np.pi * ((k[:, None] * k[None, :]) % n) / n) @ f


def energy_quadruples(A, B, n: int) -> int:
    """#{(a1, a2, b1, b2) : a1 + b1 = a2 + b2} by comparing all pairs of sums."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    s = ((A[:, None] + B[None, :]) % n).ravel()
    return int((s[:, None] == s[None, :]).sum())


def energy_fourier(A, n: int) -> int:
    """(1/N) sum_xi |A^(xi)|^4, rounded; uses numpy's FFT, not the chirp plan."""
    ind = np.zeros(n)
    ind[np.asarray(A, dtype=np.int64) % n] = 1
    return int(round(float(np.sum(np.abs(np.fft.fft(ind)) ** 4)) / n))


def e3_spectral(A, n: int) -> int:
    """(1/N^2) sum_{x,y} |A^(x)|^2 |A^(y)|^2 |A^(x-y)|^2, rounded."""
    ind = np.zeros(n)
    ind[np.asarray(A, dtype=np.int64) % n] = 1
    return int(round(mixed_energy_3_spectral(ind, ind, ind)))


def mixed_energy_3_spectral(f, g, h) -> float:
    """(1/N^2) sum_{a,b} |f^(a-b)|^2 |g^(a)|^2 |h^(b)|^2, the O(N^2) spectral double sum."""
    F, G, H = (np.abs(dft_direct(v)) ** 2 for v in (f, g, h))
    n = len(F)
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return float(np.sum(F[idx] * G[:, None] * H[None, :])) / n**2


def correlation_pairs(A, n: int) -> np.ndarray:
    """(A o A)(x) by enumerating ordered pairs."""
    out = np.zeros(n, dtype=np.int64)
    for a in A:
        for b in A:
            out[(b - a) % n] += 1
    return out


def energy_k_direct(A, k: int, n: int) -> int:
    return int(sum(int(c) ** k for c in correlation_pairs(A, n)))


def sum_representations(A, k: int, n: int) -> Counter:
    """Number of ordered k-tuples from A with each sum mod n."""
    return Counter(sum(c) % n for c in itertools.product(A, repeat=k))


def t_moment_direct(A, k: int, n: int) -> int:
    return sum(r * r for r in sum_representations(A, k, n).values())


def t_moment_tuples(A, k: int, n: int) -> int:
    """T_k by the literal 2k-fold loop; only for very small A."""
    count = 0
    for left in itertools.product(A, repeat=k):
        s = sum(left) % n
        for right in itertools.product(A, repeat=k):
            if sum(right) % n == s:
                count += 1
    return count


def energy_delta(A, B, dim: int, n: int) -> int:
    """E(Delta_dim(A), B^dim) computed in (Z/n)^dim from representation counts of X + Y."""
    reps: Counter = Counter()
    for a in A:
        for bs in itertools.product(B, repeat=dim):
            reps[tuple((a + b) % n for b in bs)] += 1
    return sum(r * r for r in reps.values())


def triple_correlation_direct(A, n: int) -> dict[tuple[int, int], int]:
    out: Counter = Counter()
    for z in A:
        for x in A:
            for y in A:
                out[((x - z) % n, (y - z) % n)] += 1
    return dict(out)


def sumset_direct(G, k: int, n: int) -> set[int]:
    sums = {0}
    for _ in range(k):
        sums = {(s + g) % n for s in sums for g in G}
    return sums


def heilbronn_direct(p: int, a: int) -> complex:
    n = p * p
    return complex(sum(np.exp(2j * np.pi * ((a * pow(m, p, n)) % n) / n) for m in range(1, p + 1)))


def e3_heilbronn_direct(p: int) -> int:
    """E_3 of {m^p mod p^2} by the literal triple loop over pairs."""
    n = p * p
    G = [pow(m, p, n) for m in range(1, p)]
    diff = Counter((b - a) % n for a in G for b in G)
    return sum(c**3 for c in diff.values())


def sigma_loops(T1: np.ndarray, T2: np.ndarray) -> complex:
    """sum_{x,y,z} T1(x,y) conj(T2(x,z)) T2(y,z) by explicit loops."""
    m = T1.shape[0]
    total = 0j
    for x in range(m):
        for y in range(m):
            for z in range(m):
                total += T1[x, y] * np.conj(T2[x, z]) * T2[y, z]
    return total
