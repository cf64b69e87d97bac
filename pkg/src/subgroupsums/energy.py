"""Exact convolutions and additive energies on Z/N.

Sets are handled through their indicator vectors, so every routine also
accepts integer weight functions.  Float transform results are rounded and
checked: if any residual reaches GUARD the value is recomputed by direct
summation, so energies are always exact integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, ConsistencyError, InvarianceError
from .primefield import InvariantSet, SubgroupDescriptor, is_invariant
from .reports import REPORT, BoundReport
from .spectral import dft, idft

GUARD = 0.25
# float routes are trusted only while every exact value stays well inside 2^53
FLOAT_EXACT_LIMIT = 2**50
DENSE_C3_LIMIT = 512
MAX_C3_SET = 1000

FOLD = "fold"
CORRELATE = "correlate"


@dataclass(frozen=True, eq=False)
class ConvolutionTable:
    n: int
    values: np.ndarray
    kind: str
    masses: tuple
    method: str

    def __getitem__(self, x):
        return self.values[x]

    @property
    def total(self) -> int:
        return int(self.values.sum())


def _is_integral(a: np.ndarray) -> bool:
    return np.issubdtype(a.dtype, np.integer) or np.issubdtype(a.dtype, np.bool_)


def _as_vector(f) -> np.ndarray:
    f = np.asarray(f)
    if f.ndim != 1:
        raise ValueError("expected a one-dimensional vector")
    return f.astype(np.int64) if f.dtype == np.bool_ else f


def _round_guarded(z: np.ndarray) -> tuple[np.ndarray, bool]:
    r = np.rint(z.real)
    resid = np.maximum(np.abs(z.real - r), np.abs(z.imag)) if np.iscomplexobj(z) else np.abs(z - r)
    return r.astype(np.int64), bool(resid.size == 0 or resid.max() < GUARD)


def _correlate_direct(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    out = np.zeros(len(f), dtype=np.result_type(f, g))
    for y in np.flatnonzero(f):
        out += f[y] * np.roll(g, -int(y))
    return out


def _convolve_direct(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    out = np.zeros(len(f), dtype=np.result_type(f, g))
    for y in np.flatnonzero(f):
        out += f[y] * np.roll(g, int(y))
    return out


def correlate(f, g) -> ConvolutionTable:
    """(f o g)(x) = sum_y f(y) g(y + x)."""
    f, g = _as_vector(f), _as_vector(g)
    if f.shape != g.shape:
        raise ValueError("operands must have equal length")
    n = len(f)
    if not (_is_integral(f) and _is_integral(g)):
        raw = idft(np.conj(dft(np.conj(f))) * dft(g))
        if not (np.iscomplexobj(f) or np.iscomplexobj(g)):
            raw = raw.real
        return ConvolutionTable(n, raw, CORRELATE, (complex(f.sum()), complex(g.sum())), "fourier")
    masses = (int(f.sum()), int(g.sum()))
    bound = int(np.abs(f).sum()) * int(np.abs(g).sum())
    if bound < FLOAT_EXACT_LIMIT:
        F = dft(f)
        G = F if g is f or np.array_equal(f, g) else dft(g)
        vals, ok = _round_guarded(idft(np.conj(F) * G))
        if ok:
            return ConvolutionTable(n, vals, CORRELATE, masses, "fourier")
    vals = _correlate_direct(f, g)
    if int(vals.sum()) != masses[0] * masses[1]:
        raise ConsistencyError("direct correlation lost mass")
    return ConvolutionTable(n, vals, CORRELATE, masses, "direct")


def convolve_k(f, k: int) -> ConvolutionTable:
    """k-fold convolution f * f * ... * f."""
    if k < 1:
        raise ValueError("k must be at least 1")
    f = _as_vector(f)
    n = len(f)
    mass = int(f.sum())
    if k == 1:
        return ConvolutionTable(n, f.astype(np.int64).copy(), FOLD, (mass,), "direct")
    if int(np.abs(f).sum()) ** k < FLOAT_EXACT_LIMIT:
        vals, ok = _round_guarded(idft(dft(f) ** k))
        if ok:
            return ConvolutionTable(n, vals, FOLD, (mass,) * k, "fourier")
    vals = f.astype(object) if int(np.abs(f).sum()) ** k >= 2**62 else f.astype(np.int64)
    acc = vals
    for _ in range(k - 1):
        acc = _convolve_direct(vals, acc)
    if int(sum(acc)) != mass**k:
        raise ConsistencyError("direct convolution lost mass")
    return ConvolutionTable(n, acc, FOLD, (mass,) * k, "direct")


def _power_sum(values: np.ndarray, k: int, weights: np.ndarray | None = None) -> int:
    """sum_x weights(x) * values(x)^k as an exact Python integer."""
    v = np.asarray(values)
    w = np.ones_like(v) if weights is None else np.asarray(weights)
    if v.size == 0:
        return 0
    term_max = int(np.abs(v).max()) ** k * max(int(np.abs(w).max()), 1)
    if v.dtype != object and w.dtype != object and term_max < 2**62:
        terms = w.astype(np.int64) * v.astype(np.int64) ** k
        # every term fits; sum in chunks small enough that no partial sum overflows
        step = max(1, 2**62 // max(term_max, 1))
        return sum(int(terms[i : i + step].sum()) for i in range(0, len(terms), step))
    nz = np.flatnonzero(v)
    return sum(int(w[i]) * int(v[i]) ** k for i in nz)


def energy(A, B=None) -> int:
    """E(A, B) = sum_x (A o A)(x) (B o B)(x)."""
    aa = correlate(A, A).values
    bb = aa if B is None else correlate(B, B).values
    return _power_sum(bb, 1, aa)


def energy_k(A, k: int) -> int:
    """E_k(A) = sum_x (A o A)(x)^k."""
    if k < 2:
        raise ValueError("k must be at least 2")
    return _power_sum(correlate(A, A).values, k)


def energy_k_pair(A, B, k: int) -> int:
    """E_k(A, B) = sum_x (A o A)(x) (B o B)(x)^(k-1)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    return _power_sum(correlate(B, B).values, k - 1, correlate(A, A).values)


def mixed_energy_3(f, g, h):
    """sum_x (f o f)(x) (g o g)(x) (h o h)(x); exact for integer inputs, float otherwise."""
    ff, gg, hh = (correlate(v, v).values for v in (f, g, h))
    if not all(_is_integral(v) for v in (ff, gg, hh)):
        return float(np.real(np.sum(ff * gg * hh)))
    bound = len(ff) * int(np.abs(ff).max()) * int(np.abs(gg).max()) * int(np.abs(hh).max())
    if bound < 2**62:
        return int(np.sum(ff * gg * hh))
    nz = np.flatnonzero((ff != 0) & (gg != 0))
    return sum(int(ff[i]) * int(gg[i]) * int(hh[i]) for i in nz)


def t_moment(A, k: int) -> int:
    """T_k(A): the number of solutions of a_1 + ... + a_k = a'_1 + ... + a'_k."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return _power_sum(convolve_k(A, k).values, 2)


DIRECT, CONVOLUTION, FOURIER = "direct", "convolution", "fourier"


@dataclass
class EnergyLedger:
    """Exact energies of one set, each possibly computed by several methods that must agree."""

    n: int
    size: int
    entries: dict[str, dict[str, int]] = field(default_factory=dict)

    def record(self, name: str, method: str, value: int) -> None:
        slot = self.entries.setdefault(name, {})
        others = set(slot.values())
        if others and others != {int(value)}:
            raise ConsistencyError(f"{name}: {method} gives {value}, other methods {sorted(others)}")
        slot[method] = int(value)

    def __getitem__(self, name: str) -> int:
        return next(iter(self.entries[name].values()))


def _pair_sum_energy(elems: np.ndarray, n: int) -> int:
    """#{a1 + b1 = a2 + b2} from the multiplicities of all pair sums."""
    sums = ((elems[:, None] + elems[None, :]) % n).ravel()
    counts = np.unique(sums, return_counts=True)[1]
    return _power_sum(counts, 2)


def energy_ledger(A, k_max: int = 3, direct_limit: int = 300) -> EnergyLedger:
    """E, E_k (k <= k_max) and T_k by every applicable method, cross-checked on entry."""
    A = _as_vector(A)
    n = len(A)
    elems = np.flatnonzero(A)
    led = EnergyLedger(n, len(elems))
    corr = correlate(A, A).values
    led.record("E", CONVOLUTION, _power_sum(corr, 2))
    led.record("T_2", CONVOLUTION, t_moment(A, 2))
    if led["T_2"] != led["E"]:
        raise ConsistencyError("T_2 differs from E")
    if len(elems) ** 3 < FLOAT_EXACT_LIMIT:
        spec = np.abs(dft(A)) ** 2
        led.record("E", FOURIER, int(round(float(np.sum(spec**2)) / n)))
    if len(elems) <= direct_limit:
        led.record("E", DIRECT, _pair_sum_energy(elems, n))
    for k in range(3, k_max + 1):
        led.record(f"E_{k}", CONVOLUTION, _power_sum(corr, k))
        led.record(f"T_{k}", CONVOLUTION, t_moment(A, k))
    return led


@dataclass(frozen=True, eq=False)
class TripleCorrelation:
    """C_3(A)(a, b) = #{z : z, z + a, z + b all in A}."""

    n: int
    size: int
    dense: np.ndarray | None
    keys: np.ndarray | None  # a * n + b, sparse storage
    counts: np.ndarray | None

    def __call__(self, a: int, b: int) -> int:
        a %= self.n
        b %= self.n
        if self.dense is not None:
            return int(self.dense[a, b])
        i = np.searchsorted(self.keys, a * self.n + b)
        if i < len(self.keys) and self.keys[i] == a * self.n + b:
            return int(self.counts[i])
        return 0

    def nonzero(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(a, b, value) arrays over the support."""
        if self.dense is not None:
            a, b = np.nonzero(self.dense)
            return a, b, self.dense[a, b]
        return self.keys // self.n, self.keys % self.n, self.counts

    def total(self) -> int:
        return int(self.nonzero()[2].sum())

    def square_sum(self) -> int:
        return _power_sum(self.nonzero()[2], 2)


def triple_correlation(A) -> TripleCorrelation:
    A = _as_vector(A)
    n = len(A)
    elems = np.flatnonzero(A)
    if len(elems) > MAX_C3_SET:
        raise CapacityError(f"|A| = {len(elems)} exceeds the triple-correlation limit {MAX_C3_SET}")
    if n <= DENSE_C3_LIMIT:
        idx = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
        W = A[idx]  # W[z, b] = A(z + b)
        C = W.T @ (A[:, None] * W)
        return TripleCorrelation(n, len(elems), C, None, None)
    keys_acc = np.empty(0, dtype=np.int64)
    counts_acc = np.empty(0, dtype=np.int64)
    chunk = max(1, 4_000_000 // max(1, len(elems) ** 2))
    for s in range(0, len(elems), chunk):
        zs = elems[s : s + chunk]
        d = (elems[None, :] - zs[:, None]) % n  # row per z: A - z
        keys = (d[:, :, None] * n + d[:, None, :]).ravel()
        keys = np.concatenate([keys_acc, keys])
        weights = np.concatenate([counts_acc, np.ones(len(keys) - len(keys_acc), dtype=np.int64)])
        keys_acc, inv = np.unique(keys, return_inverse=True)
        counts_acc = np.bincount(inv.ravel(), weights=weights).astype(np.int64)
    return TripleCorrelation(n, len(elems), None, keys_acc, counts_acc)


def stepanov_sum(G: SubgroupDescriptor, Q: InvariantSet, Q1: InvariantSet) -> tuple[int, BoundReport]:
    """sum_{x in G} (Q o Q1)(x) against |G|^(1/3) |Q|^(2/3) |Q1|^(2/3)."""
    for S in (Q, Q1):
        if not is_invariant(S.elements, G):
            raise InvarianceError("Q and Q1 must be invariant under the subgroup")
    corr = correlate(Q.indicator, Q1.indicator).values
    value = int(corr[G.elements].sum())
    t, q, q1, p = G.order, Q.size, Q1.size, G.p
    rhs = t ** (1 / 3) * q ** (2 / 3) * q1 ** (2 / 3)
    flags = {"sizes_vs_t4": q * q1 <= t**4, "sizes_vs_p3": q * q1 * t**2 <= p**3}
    return value, BoundReport("stepanov_sum", p, t, value, rhs, REPORT, flags)
