"""Heilbronn sums S(a) = sum_{n=1}^p e(a n^p / p^2) and the subgroup behind them.

With G_H = {m^p mod p^2 : 1 <= m < p} the n = p term contributes exactly 1, so
S(a) = 1 + G_H^(-a) where G_H^ is the transform over Z/p^2.  The units of
Z/p^2 split into the p cosets (1 + kp) G_H, and the coset of a unit u is read
off from its Fermat quotient: u^(p-1) = 1 - kp.  Frequencies divisible by p
give G_H^ = -1 exactly, since G_H reduces onto all of F_p^*.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import _power_sum, correlate
from .errors import CapacityError, DomainError
from .primefield import heilbronn_subgroup, is_prime
from .reports import ASSERT, REPORT, SLACK, BoundReport, lg
from .spectral import dft, root_table

MAX_P = 2000
DFT = "dft"
REDUCED = "reduced"
TIE_RTOL = 1e-12


def _check_prime(p: int) -> None:
    if not is_prime(p) or p < 3:
        raise DomainError(f"{p} is not an odd prime")
    if p > MAX_P:
        raise CapacityError(f"p={p} exceeds the desk-scale limit {MAX_P}")


def heilbronn_sum(p: int, a: int) -> complex:
    _check_prime(p)
    if a % p == 0:
        raise DomainError("a must not be divisible by p")
    n = p * p
    powers = np.array([pow(m, p, n) for m in range(1, p + 1)], dtype=np.int64)
    # e(+x/n) is the conjugate of root_table(n)[x]
    return complex(np.conj(root_table(n)[(a % n) * powers % n]).sum())


def _powmod(u: np.ndarray, e: int, n: int) -> np.ndarray:
    # n <= 2000^2, so products of residues stay far below 2^63
    out = np.ones_like(u)
    base = u % n
    while e:
        if e & 1:
            out = out * base % n
        base = base * base % n
        e >>= 1
    return out


def fermat_coset(p: int, u) -> np.ndarray:
    """k with u in (1 + kp) G_H, for units u of Z/p^2."""
    n = p * p
    u = np.atleast_1d(np.asarray(u, dtype=np.int64)) % n
    q = (_powmod(u, p - 1, n) - 1) // p
    return (-q) % p


def _coset_transform(p: int, elems: np.ndarray, chunk: int = 256) -> np.ndarray:
    """G_H^(-(1 + kp)) for k = 0..p-1, i.e. sum_x e((1 + kp) x / p^2)."""
    n = p * p
    roots = np.conj(root_table(n))
    out = np.empty(p, dtype=np.complex128)
    for s in range(0, p, chunk):
        r = 1 + p * np.arange(s, min(p, s + chunk), dtype=np.int64)
        out[s : s + len(r)] = roots[(r[:, None] * elems[None, :]) % n].sum(axis=1)
    return out


@dataclass(frozen=True, eq=False)
class HeilbronnProfile:
    p: int
    values: np.ndarray  # |S(a)| for a = 1..p-1
    max_value: float  # over all a in Z/p^2 with p not dividing a
    argmax: int
    M: float  # max |G_H^(xi)| over xi != 0 in Z/p^2
    pointwise_gap: float  # max over a of | |S(a)| - |G_H^(-a)| |
    method: str

    @property
    def window_max(self) -> float:
        """max of |S(a)| over a = 1..p-1 only."""
        return float(self.values.max())


def heilbronn_profile(p: int, method: str = REDUCED) -> HeilbronnProfile:
    """|S(a)| for every a, by one length-p^2 transform or by one sum per coset."""
    _check_prime(p)
    G = heilbronn_subgroup(p)
    n = p * p
    a = np.arange(n, dtype=np.int64)
    units = a % p != 0
    if method == DFT:
        F = dft(G.indicator)
        g_minus = F[(-a) % n]  # G_H^(-a)
        S = 1 + g_minus
        absS = np.where(units, np.abs(S), -np.inf)
        max_value = float(absS.max())
        argmax = int(np.argmax(absS >= max_value * (1 - TIE_RTOL)))
        M = float(np.abs(F[1:]).max())
        gap = float(np.max(np.abs(np.abs(S[units]) - np.abs(g_minus[units]))))
        values = np.abs(S[1:p])
    elif method == REDUCED:
        per_coset = _coset_transform(p, G.elements)
        S_coset = 1 + per_coset
        absS = np.abs(S_coset)
        max_value = float(absS.max())
        best = absS >= max_value * (1 - TIE_RTOL)
        unit_list = np.flatnonzero(units)
        argmax = int(unit_list[np.argmax(best[fermat_coset(p, unit_list)])])
        # frequencies divisible by p contribute |G_H^| = 1
        M = max(float(np.abs(per_coset).max()), 1.0)
        gap = float(np.max(np.abs(absS - np.abs(per_coset))))
        values = absS[fermat_coset(p, np.arange(1, p))]
    else:
        raise ValueError(f"unknown method {method!r}")
    return HeilbronnProfile(p, values, max_value, argmax, M, gap, method)


def heilbronn_max(p: int, profile: HeilbronnProfile | None = None) -> tuple[float, BoundReport]:
    """max |S(a)| over a not divisible by p, as a ratio against p^(5/6) log^(1/6) p."""
    prof = profile or heilbronn_profile(p)
    v = prof.max_value
    flags = {
        "trivial_bound": v <= p * (1 + SLACK),
        "window_max_equals_max": math.isclose(prof.window_max, v, rel_tol=1e-9),
    }
    rep = BoundReport(
        "heilbronn_max", p, p - 1, v, p ** (5 / 6) * lg(p) ** (1 / 6), REPORT, flags,
        {"argmax": prof.argmax, "window_max": prof.window_max},
    )
    return v, rep


def heilbronn_trivial(p: int, profile: HeilbronnProfile | None = None) -> BoundReport:
    prof = profile or heilbronn_profile(p)
    return BoundReport("heilbronn_trivial", p, p - 1, prof.max_value, float(p), ASSERT, {})


def heilbronn_M_relation(p: int, profile: HeilbronnProfile | None = None) -> list[BoundReport]:
    """|max|S| - M(G_H)| <= 1 and, per a, ||S(a)| - |G_H^(-a)|| <= 1."""
    prof = profile or heilbronn_profile(p)
    gap = abs(prof.max_value - prof.M)
    return [
        BoundReport("heilbronn_gap", p, p - 1, gap, 1.0, ASSERT, {}, {"M": prof.M}),
        BoundReport("heilbronn_pointwise", p, p - 1, prof.pointwise_gap, 1.0, ASSERT, {}),
    ]


def _e3_cosets(p: int) -> int:
    G = heilbronn_subgroup(p)
    n = p * p
    mask = G.mask
    t = G.order
    reps = 1 + p * np.arange(p, dtype=np.int64)
    counts = mask[(G.elements[None, :] + reps[:, None]) % n].sum(axis=1)
    # multiples of p form one orbit of size p - 1 under G_H
    at_p = int(mask[(G.elements + p) % n].sum())
    return t**3 + (p - 1) * at_p**3 + t * _power_sum(counts, 3)


def heilbronn_e3(p: int, method: str = "cosets") -> tuple[int, BoundReport]:
    """E_3(G_H) exactly, with a ratio against p^3 log p."""
    _check_prime(p)
    if method == "cosets":
        e3 = _e3_cosets(p)
    elif method == "correlation":
        ind = heilbronn_subgroup(p).indicator
        e3 = _power_sum(correlate(ind, ind).values, 3)
    else:
        raise ValueError(f"unknown method {method!r}")
    rep = BoundReport("heilbronn_e3", p, p - 1, e3, p**3 * lg(p), REPORT, {"at_least_t3": e3 >= (p - 1) ** 3})
    return e3, rep
