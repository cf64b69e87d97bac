"""Fourier analysis on Z/N.

Transforms use the sign convention F(xi) = sum_x f(x) e(-xi x / N) with
e(z) = exp(2 pi i z).  N is typically prime or a prime square, so every
transform goes through a chirp-z (Bluestein) plan with a power-of-two inner
convolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .primefield import SubgroupDescriptor, cosets


class ChirpPlan:
    """Precomputed chirp factors for length-n transforms."""

    def __init__(self, n: int):
        if n < 1:
            raise DomainError("transform length must be positive")
        self.n = n
        k = np.arange(n, dtype=np.int64)
        # k^2 reduced mod 2n keeps the phase argument small and exact
        self.chirp = np.exp(-1j * np.pi * ((k * k) % (2 * n)) / n)
        self.padded = 1 << (2 * n - 2).bit_length()
        kernel = np.zeros(self.padded, dtype=np.complex128)
        kernel[:n] = np.conj(self.chirp)
        if n > 1:
            kernel[self.padded - n + 1 :] = np.conj(self.chirp[1:])[::-1]
        self.kernel_hat = np.fft.fft(kernel)

    def forward(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=np.complex128)
        if f.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}, got shape {f.shape}")
        a = np.zeros(self.padded, dtype=np.complex128)
        a[: self.n] = f * self.chirp
        conv = np.fft.ifft(np.fft.fft(a) * self.kernel_hat)[: self.n]
        return conv * self.chirp

    def inverse(self, F: np.ndarray) -> np.ndarray:
        return np.conj(self.forward(np.conj(np.asarray(F, dtype=np.complex128)))) / self.n


@lru_cache(maxsize=4)
def get_plan(n: int) -> ChirpPlan:
    return ChirpPlan(n)


def dft(f) -> np.ndarray:
    f = np.asarray(f)
    return get_plan(len(f)).forward(f)


def idft(F) -> np.ndarray:
    F = np.asarray(F)
    return get_plan(len(F)).inverse(F)


@lru_cache(maxsize=8)
def root_table(n: int) -> np.ndarray:
    """root_table(n)[k] = e(-k/n)."""
    t = np.exp(-2j * np.pi * np.arange(n) / n)
    t.setflags(write=False)
    return t


@dataclass(frozen=True, eq=False)
class SpectrumTable:
    subgroup: SubgroupDescriptor = field(repr=False)
    zero_value: complex
    coset_reps: np.ndarray
    coset_values: np.ndarray

    def value_at(self, xi: int) -> complex:
        xi %= self.subgroup.p
        if xi == 0:
            return self.zero_value
        return complex(self.coset_values[self.subgroup.coset_map[xi]])

    def full(self) -> np.ndarray:
        """The transform of the subgroup indicator at every frequency of Z/p."""
        out = np.empty(self.subgroup.p, dtype=np.complex128)
        out[0] = self.zero_value
        out[1:] = self.coset_values[self.subgroup.coset_map[1:]]
        return out


def subgroup_spectrum(G: SubgroupDescriptor) -> SpectrumTable:
    """One coefficient per coset, by direct summation: O(p) work in total."""
    if G.modulus.exponent != 1:
        raise DomainError("subgroup_spectrum needs a prime modulus; use dft on Z/p^2")
    p = G.p
    reps = np.asarray(cosets(G), dtype=np.int64)
    roots = root_table(p)
    values = roots[(reps[:, None] * G.elements[None, :]) % p].sum(axis=1)
    return SpectrumTable(G, complex(G.order), reps, values)


def max_nonzero_coefficient(S: SpectrumTable, rtol: float = 1e-12) -> tuple[float, int]:
    """M(G) and the smallest coset representative attaining it."""
    mags = np.abs(S.coset_values)
    top = float(mags.max())
    i = int(np.flatnonzero(mags >= top * (1 - rtol))[0])
    return top, int(S.coset_reps[i])


def moment_sum(S: SpectrumTable, exponent: float) -> float:
    """sum over xi != 0 of |G^(xi)|^exponent."""
    if exponent <= 0:
        raise DomainError("exponent must be positive")
    return float(S.subgroup.order * np.sum(np.abs(S.coset_values) ** exponent))


def generator_powers(G: SubgroupDescriptor) -> np.ndarray:
    """generator^k mod n for k = 0..t-1."""
    out = np.empty(G.order, dtype=np.int64)
    x = 1
    for k in range(G.order):
        out[k] = x
        x = x * G.generator % G.n
    return out


@dataclass(frozen=True, eq=False)
class CharacterTable:
    """chi_alpha(generator^k) = e(alpha k / t); row alpha, column = sorted element order."""

    subgroup: SubgroupDescriptor = field(repr=False)
    characters: np.ndarray

    def __call__(self, alpha: int) -> np.ndarray:
        return self.characters[alpha]


def character_table(G: SubgroupDescriptor) -> CharacterTable:
    t = G.order
    alpha = np.arange(t)[:, None]
    k = G.exponents[None, :]
    return CharacterTable(G, np.exp(2j * np.pi * ((alpha * k) % t) / t))


def character_twisted_max(G: SubgroupDescriptor, alpha: int, table: CharacterTable | None = None) -> float:
    """max over xi != 0 of |sum_{x in G} chi_alpha(x) e(xi x / p)|."""
    if not 0 <= alpha < G.order:
        raise DomainError(f"character index {alpha} outside [0, {G.order})")
    table = table or character_table(G)
    w = np.zeros(G.n, dtype=np.complex128)
    w[G.elements] = table(alpha)
    return float(np.abs(dft(w)[1:]).max())


def character_twisted_maxima(G: SubgroupDescriptor) -> np.ndarray:
    """character_twisted_max for every alpha at once.

    |sum_x chi(x) e(xi x / p)| is constant on cosets of G, so it is enough to
    evaluate one frequency per coset; the alpha-dependence is an inverse DFT over
    the exponent k of x = generator^k.
    """
    if G.modulus.exponent != 1:
        raise DomainError("needs a prime modulus")
    reps = np.asarray(cosets(G), dtype=np.int64)
    powers = generator_powers(G)
    v = np.conj(root_table(G.p)[(reps[:, None] * powers[None, :]) % G.p])  # e(+r g^k / p)
    sums = np.fft.ifft(v, axis=1) * G.order
    return np.abs(sums).max(axis=0)


def character_transforms(G: SubgroupDescriptor, x: int) -> np.ndarray:
    """chi^_alpha(x) = sum_{y in G} chi_alpha(y) e(-x y / p) for every alpha at once."""
    x %= G.n
    if x == 0:
        raise DomainError("x must be nonzero")
    v = root_table(G.n)[(x * generator_powers(G)) % G.n]
    # sum_k e(alpha k / t) v_k is an inverse DFT over k
    return np.fft.ifft(v) * G.order


def character_sixth_moment(G: SubgroupDescriptor, x: int) -> float:
    return float(np.sum(np.abs(character_transforms(G, x)) ** 6))
