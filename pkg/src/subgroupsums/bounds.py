"""Numerical checkers for the inequalities about multiplicative subgroups of F_p^*.

Inequalities that hold with no hidden constant are emitted in assert mode;
every asymptotic statement becomes a report-mode ratio against its
constant-free right-hand side, with side conditions evaluated at constant 1
and recorded as hypothesis flags.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .energy import _power_sum, energy, energy_k, energy_k_pair
from .errors import InvarianceError
from .primefield import (
    InvariantSet,
    SubgroupDescriptor,
    contains_minus_one,
    cosets,
    is_invariant,
)
from .reports import ASSERT, REPORT, BoundReport, lg
from .spectral import (
    character_sixth_moment,
    character_twisted_maxima,
    dft,
    max_nonzero_coefficient,
    moment_sum,
    subgroup_spectrum,
)


class SubgroupData:
    """Lazily computed quantities of one subgroup, shared between checkers.

    Correlations and convolutions of the indicator are constant on cosets, so
    each is evaluated at one representative per coset with exact integer sums:
    O(p) work per fold and no floating point.
    """

    def __init__(self, G: SubgroupDescriptor):
        self.G = G
        self.p = G.p
        self.t = G.order
        self._folds: dict[int, np.ndarray] = {1: G.indicator}
        self._t_moments: dict[int, int] = {}

    @cached_property
    def spectrum(self):
        return subgroup_spectrum(self.G)

    @cached_property
    def M_and_rep(self) -> tuple[float, int]:
        return max_nonzero_coefficient(self.spectrum)

    @property
    def M(self) -> float:
        return self.M_and_rep[0]

    @cached_property
    def reps(self) -> np.ndarray:
        return np.asarray(cosets(self.G), dtype=np.int64)

    def _spread(self, at_zero: int, per_coset: np.ndarray) -> np.ndarray:
        out = np.empty(self.p, dtype=np.int64)
        out[0] = at_zero
        out[1:] = per_coset[self.G.coset_map[1:]]
        return out

    @cached_property
    def autocorrelation(self) -> np.ndarray:
        """(G o G)(x) = #{a in G : a + x in G}."""
        e, mask = self.G.elements, self.G.mask
        per = mask[(self.reps[:, None] + e[None, :]) % self.p].sum(axis=1)
        return self._spread(self.t, per)

    def fold(self, k: int) -> np.ndarray:
        """k-fold convolution G * ... * G, built one summand at a time."""
        if k < 1:
            raise ValueError("k must be at least 1")
        if self.t ** (k - 1) >= 2**62:
            raise OverflowError("fold values would leave int64")
        j = max(i for i in self._folds if i <= k)
        cur = self._folds[j]
        e = self.G.elements
        while j < k:
            # (f * G)(r) = sum_{a in G} f(r - a)
            per = cur[(self.reps[:, None] - e[None, :]) % self.p].sum(axis=1)
            cur = self._spread(int(cur[(-e) % self.p].sum()), per)
            j += 1
            self._folds[j] = cur
        return cur

    @cached_property
    def E(self) -> int:
        return _power_sum(self.autocorrelation, 2)

    @cached_property
    def E3(self) -> int:
        return _power_sum(self.autocorrelation, 3)

    @cached_property
    def E4(self) -> int:
        return _power_sum(self.autocorrelation, 4)

    def T(self, k: int) -> int:
        if k not in self._t_moments:
            self._t_moments[k] = _power_sum(self.fold(k), 2)
        return self._t_moments[k]


def _data(G) -> SubgroupData:
    return G if isinstance(G, SubgroupData) else SubgroupData(G)


def _max_fourier(Q: InvariantSet) -> float:
    return float(np.abs(dft(Q.indicator)[1:]).max())


def check_invariant_fourier_bounds(G, Q: InvariantSet | None = None, tag: str = "") -> list[BoundReport]:
    """The three bounds on max |Q^(xi)| for a G-invariant set Q (Q = G by default)."""
    d = _data(G)
    p, t = d.p, d.t
    if Q is None:
        q, qhat, EQ = t, d.M, d.E
    else:
        if not is_invariant(Q.elements, d.G):
            raise InvarianceError("Q is not invariant under the subgroup")
        q, qhat, EQ = Q.size, _max_fourier(Q), energy(Q.indicator)
    flags = {"q_is_subgroup": Q is None}
    rhs = [
        math.sqrt(q * p / t),
        q**0.75 * p**0.25 * d.E**0.25 / t,
        p**0.125 * d.E**0.125 * EQ**0.125 * math.sqrt(q / t),
    ]
    names = ["invariant_fourier_parseval", "invariant_fourier_energy", "invariant_fourier_mixed"]
    details = {"q": q, "energy_q": EQ}
    return [BoundReport(n + tag, p, t, qhat, r, ASSERT, flags, details) for n, r in zip(names, rhs)]


def check_M_Tk(G, l: int, m: int) -> BoundReport:
    """M(G) <= p^(1/2lm) T_l^(1/2lm) T_m^(1/2lm) t^(1 - 1/l - 1/m)."""
    if l < 1 or m < 1:
        raise ValueError("l and m must be positive")
    d = _data(G)
    p, t = d.p, d.t
    Tl = t if l == 1 else d.T(l)
    Tm = t if m == 1 else d.T(m)
    e = 1 / (2 * l * m)
    rhs = p**e * float(Tl) ** e * float(Tm) ** e * t ** (1 - 1 / l - 1 / m)
    degenerate = l == 1 or m == 1
    return BoundReport(
        f"m_tk_{l}_{m}", p, t, d.M, rhs, REPORT if degenerate else ASSERT, {"degenerate": degenerate}
    )


def check_character_sixth(G, x: int) -> BoundReport:
    """sum over characters of |chi^_alpha(x)|^6 <= p E_3(G)."""
    d = _data(G)
    lhs = character_sixth_moment(d.G, x)
    return BoundReport("character_sixth_moment", d.p, d.t, lhs, float(d.p * d.E3), ASSERT, {}, {"x": x})


def check_character_twisted(G) -> BoundReport:
    """Largest twisted sum over all characters against t^(1/2) p^(1/6) log^(1/6) t."""
    d = _data(G)
    p, t = d.p, d.t
    worst = float(character_twisted_maxima(d.G).max())
    flags = {"t_le_p23": t <= p ** (2 / 3)}
    return BoundReport("character_twisted", p, t, worst, t**0.5 * p ** (1 / 6) * lg(t) ** (1 / 6), REPORT, flags)


def check_energy_corollary(G) -> list[BoundReport]:
    d = _data(G)
    p, t = d.p, d.t
    flags = {"t_le_p23": t <= p ** (2 / 3)}
    return [
        BoundReport("energy_corollary_e2", p, t, d.E, t**2.5, REPORT, flags),
        BoundReport("energy_corollary_e3", p, t, d.E3, t**3 * lg(t), REPORT, flags),
        BoundReport("energy_corollary_e4", p, t, abs(d.E4 - t**4), t ** (11 / 3), REPORT, flags),
    ]


def check_ordered_convolution_decay(G, d_fold: int) -> list[BoundReport]:
    """Sorted coset values of the d-fold convolution of G, and T_d, against their power shapes."""
    if d_fold < 2:
        raise ValueError("d must be at least 2")
    d = _data(G)
    p, t = d.p, d.t
    conv = d.fold(d_fold)
    per_coset = conv[d.reps]
    # coset-constancy, checked at a second point r*g of every coset from the (d-1)-fold
    prev, e = d.fold(d_fold - 1), d.G.elements
    moved = (d.reps * d.G.generator) % p
    constant = bool(np.array_equal(prev[(moved[:, None] - e[None, :]) % p].sum(axis=1), per_coset))
    ordered = np.sort(per_coset)[::-1].astype(float)
    j = np.arange(1, len(ordered) + 1)
    lhs = float(np.max(ordered * j ** (1 / 3)))
    flags = {"t_lt_sqrt_p": t * t < p, "coset_constant": constant}
    rhs = t ** (d_fold - 2 + (1 + 2.0 ** (2 - d_fold)) / 3)
    T_d = d.T(d_fold)
    return [
        BoundReport(f"ordered_convolution_d{d_fold}", p, t, lhs, rhs, REPORT, flags, {"sorted": ordered}),
        BoundReport(f"t_moment_d{d_fold}", p, t, T_d, t ** (2 * d_fold - 2 + 2.0 ** (1 - d_fold)), REPORT, flags),
    ]


def check_main_theorem(G) -> list[BoundReport]:
    """M(G) against t^(1/2) p^(1/6) log^(1/6) t, plus the unconditional M(G) <= sqrt(p)."""
    d = _data(G)
    p, t = d.p, d.t
    flags = {"t_le_p23": t <= p ** (2 / 3)}
    return [
        BoundReport("main_theorem", p, t, d.M, t**0.5 * p ** (1 / 6) * lg(t) ** (1 / 6), REPORT, flags),
        BoundReport("fourier_sqrt_p", p, t, d.M, math.sqrt(p), ASSERT, {}),
    ]


def not_so_small(p: int, t: int, E: int) -> bool:
    """p^10 <= t^22 E^2 log^9 t, compared in logarithms."""
    return 10 * math.log(p) <= 22 * math.log(t) + 2 * math.log(E) + 9 * math.log(lg(t))


def check_moment_sum(G) -> BoundReport:
    d = _data(G)
    p, t, E = d.p, d.t, d.E
    lhs = moment_sum(d.spectrum, 32 / 5)
    rhs = t ** (16 / 5) * float(E) ** (2 / 5) * p ** (6 / 5) * lg(t) ** (9 / 5)
    flags = {"not_so_small": not_so_small(p, t, E), "t_le_p23": t <= p ** (2 / 3)}
    return BoundReport("moment_sum", p, t, lhs, rhs, REPORT, flags)


def sumset_iterate(G: SubgroupDescriptor, k: int) -> np.ndarray:
    """Support of kG = G + ... + G (k summands), by shifting a bitset once per element."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return _bits_to_array(_sumset_bits(G, k)[-1], G.n)


def _sumset_bits(G: SubgroupDescriptor, k: int, stop_when_full: int | None = None) -> list[int]:
    n = G.n
    full = (1 << n) - 1
    base = 0
    for g in G.elements:
        base |= 1 << int(g)
    layers = [base]
    cur = base
    for _ in range(k - 1):
        if stop_when_full is not None and cur & stop_when_full == stop_when_full:
            break
        nxt = 0
        for g in G.elements:
            g = int(g)
            nxt |= ((cur << g) | (cur >> (n - g))) & full
        cur = nxt
        layers.append(cur)
    return layers


def _bits_to_array(bits: int, n: int) -> np.ndarray:
    raw = np.frombuffer(bits.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.flatnonzero(np.unpackbits(raw, bitorder="little")[:n]).astype(np.int64)


def basis_order(G: SubgroupDescriptor, k_max: int) -> int | None:
    """Least k <= k_max with F_p^* inside kG, or None."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    units = ((1 << G.n) - 1) & ~1
    layers = _sumset_bits(G, k_max, stop_when_full=units)
    for k, bits in enumerate(layers, start=1):
        if bits & units == units:
            return k
    return None


def qualifies_for_basis(G: SubgroupDescriptor) -> bool:
    p = G.p
    return contains_minus_one(G) and G.order >= math.sqrt(p) * lg(p) ** (1 / 3)


def check_basis_order(G, k_max: int = 8) -> list[BoundReport]:
    """Basis order against the guard k_max; qualifying subgroups of order above 5 add a finding row.

    Only subgroups meeting the hypotheses (-1 in G, t >= sqrt(p) lg^(1/3) p) are
    asserted; the rest are reported, since small subgroups need many summands.
    """
    d = _data(G)
    k = basis_order(d.G, k_max)
    found = k is not None
    order = k if found else k_max + 1
    qual = qualifies_for_basis(d.G)
    flags = {"qualifies": qual, "found": found, "order_le_5": order <= 5, "minus_one": contains_minus_one(d.G)}
    rows = [BoundReport("basis_order", d.p, d.t, order, k_max, ASSERT if qual else REPORT, flags)]
    if qual and order > 5:
        rows.append(BoundReport("basis_order_finding", d.p, d.t, order, 5, REPORT, flags))
    return rows


def check_e3_large(G, S: InvariantSet | None = None) -> list[BoundReport]:
    """Normalized errors of the asymptotic formulas for E_3(G), E_3(G, S) and E_3(S)."""
    d = _data(G)
    p, t, M = d.p, d.t, d.M
    L3 = lg(t) ** 3
    flags = {"window": math.sqrt(p) <= t <= p**0.75}
    rows = [
        BoundReport(
            "e3_large", p, t, abs(d.E3 - t**6 / p**2),
            max(t**3 * L3, p ** (1 / 3) * M ** (4 / 3) * t ** (5 / 3) * L3), REPORT, flags,
        )
    ]
    if S is None:
        return rows
    if not is_invariant(S.elements, d.G):
        raise InvarianceError("S is not invariant under the subgroup")
    s = S.size
    is_subgroup = bool(np.array_equal(S.elements, d.G.elements))
    if is_subgroup:
        e3_pair = e3_set = d.E3
    else:
        e3_pair = energy_k_pair(d.G.indicator, S.indicator, 3)
        e3_set = energy_k(S.indicator, 3)
    sflags = dict(flags, s_is_subgroup=is_subgroup)
    rows.append(
        BoundReport(
            "e3_large_pair", p, t, abs(e3_pair - t**2 * s**4 / p**2),
            max(s**2 * t * L3, s**3 * M**2 / p, p ** (2 / 3) * M ** (2 / 3) * s**2 * t ** (-1 / 3) * L3),
            REPORT, sflags,
        )
    )
    rows.append(
        BoundReport(
            "e3_large_set", p, t, abs(e3_set - s**6 / p**2),
            max(s**4 / t, p * s**3 * t ** (-4 / 3) * L3), REPORT, sflags,
        )
    )
    return rows


def check_prior_energy_bound(G) -> BoundReport:
    d = _data(G)
    p, t = d.p, d.t
    L = lg(t)
    first = t ** (32 / 13) * L ** (41 / 65)
    second = t**3 * p ** (-1 / 3) * L + p ** (1 / 26) * t ** (31 / 13) * L ** (8 / 13)
    return BoundReport("prior_energy", p, t, d.E, min(first, second), REPORT, {"t_le_p23": t <= p ** (2 / 3)})


@dataclass
class SubgroupSurvey:
    p_min: int
    p_max: int
    alpha: float
    beta: float
    reports: list[BoundReport] = field(default_factory=list)

    @property
    def max_ratios(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for r in self.reports:
            out[r.name] = max(out.get(r.name, 0.0), r.ratio)
        return out

    @property
    def violations(self) -> list[BoundReport]:
        return [r for r in self.reports if r.mode == ASSERT and not r.passed]
