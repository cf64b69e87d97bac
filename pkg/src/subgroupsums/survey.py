"""Survey orchestration: which subgroups, which checkers, in what order.

Every task is a pure function of (config, seed), so serial and pooled runs
produce the same rows; results are merged in task order and then stably
sorted by (p, t, checker name).
"""

from __future__ import annotations

import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import bounds, heilbronn
from .energy import stepanov_sum
from .operators import (
    build_operator,
    eigendecompose,
    max_coefficient_rayleigh,
    shift_check,
    sigma_report,
    weighted_inequality_check,
)
from .primefield import cosets, divisors, invariant_set, primes_between, random_invariant_set, subgroup_of_order
from .reports import ASSERT, BoundReport
from .rng import SplitMix64, derive_seed
from .spectral import dft

SURVEY, HEILBRONN, OPERATORS = "survey", "heilbronn", "operators"
TEST_MODE_ENV = "SUBGROUPSUMS_TEST_CHECKERS"


@dataclass(frozen=True)
class RunConfig:
    command: str = SURVEY
    p_min: int = 3
    p_max: int = 100
    alpha: float = 0.0
    beta: float = 1.0
    alpha_scale: float = 1.0
    checkers: tuple[str, ...] = ()
    seed: int = 0
    out: str | None = None
    fmt: str = "csv"
    jobs: int = 1
    instances: int = 50
    max_set: int = 200
    plot_data: str | None = None

    def __post_init__(self):
        if self.command not in (SURVEY, HEILBRONN, OPERATORS):
            raise ValueError(f"unknown command {self.command!r}")
        if self.p_min > self.p_max:
            raise ValueError("p_min must not exceed p_max")
        if not 0 <= self.alpha <= self.beta <= 1:
            raise ValueError("window exponents need 0 <= alpha <= beta <= 1")
        if self.alpha_scale <= 0:
            raise ValueError("alpha_scale must be positive")
        if self.fmt not in ("csv", "jsonl"):
            raise ValueError(f"unknown format {self.fmt!r}")
        if self.jobs < 1 or self.instances < 0 or self.max_set < 2:
            raise ValueError("jobs >= 1, instances >= 0 and max_set >= 2 are required")
        known = registry(self.command)
        unknown = [c for c in self.checkers if c not in known]
        if unknown:
            raise ValueError(f"unknown checker(s) for {self.command}: {', '.join(unknown)}")

    @property
    def active_checkers(self) -> tuple[str, ...]:
        return self.checkers or DEFAULTS[self.command]


def in_window(p: int, t: int, alpha: float, beta: float, alpha_scale: float = 1.0) -> bool:
    """alpha_scale * p^alpha <= t <= p^beta, with a relative tolerance for exact powers."""
    lo = alpha_scale * p**alpha
    return lo * (1 - 1e-12) <= t <= p**beta * (1 + 1e-12)


def window_orders(p: int, alpha: float, beta: float, alpha_scale: float = 1.0) -> list[int]:
    return [t for t in divisors(p - 1) if in_window(p, t, alpha, beta, alpha_scale)]


@lru_cache(maxsize=8)
def window_subgroups(p_min: int, p_max: int, alpha: float, beta: float, alpha_scale: float = 1.0):
    """All (p, t) with p an odd prime in range and t | p - 1 inside the window."""
    return tuple(
        (p, t) for p in primes_between(p_min, p_max) if p > 2 for t in window_orders(p, alpha, beta, alpha_scale)
    )


def _key(name: str) -> int:
    # str hashes are salted per process; crc32 is stable
    return zlib.crc32(name.encode())


# ---- survey checkers: (data, seed) -> rows ----------------------------------------


def _invariant_fourier(d: bounds.SubgroupData, seed: int) -> list[BoundReport]:
    rows = bounds.check_invariant_fourier_bounds(d)
    rng = SplitMix64(seed)
    for i in range(5):
        k = 1 + rng.below(d.G.index)
        Q = random_invariant_set(d.G, k, derive_seed(seed, i))
        rows += bounds.check_invariant_fourier_bounds(d, Q)
    return rows


def _m_tk(d, seed):
    return [bounds.check_M_Tk(d, l, m) for l, m in ((2, 2), (2, 3), (3, 3))]


def _character_sixth(d, seed):
    rng = SplitMix64(seed)
    return [bounds.check_character_sixth(d, 1 + rng.below(d.p - 1)) for _ in range(3)]


def _e3_large(d, seed):
    # S = G: the collapse case, free once E_3(G) is known
    return bounds.check_e3_large(d, invariant_set(d.G, [1]))


def _e3_large_random(d, seed):
    k = max(1, d.G.index // 2)
    return [r for r in bounds.check_e3_large(d, random_invariant_set(d.G, k, seed)) if r.name != "e3_large"]


def _stepanov(d, seed):
    rng = SplitMix64(seed)
    Q = random_invariant_set(d.G, 1 + rng.below(d.G.index), derive_seed(seed, 1))
    Q1 = random_invariant_set(d.G, 1 + rng.below(d.G.index), derive_seed(seed, 2))
    return [stepanov_sum(d.G, Q, Q1)[1]]


def _corrupted(d, seed):
    return [BoundReport("corrupted", d.p, d.t, 2.0, 1.0, ASSERT, {"injected": True})]


SURVEY_CHECKERS: dict[str, Callable] = {
    "invariant_fourier": _invariant_fourier,
    "m_tk": _m_tk,
    "character_sixth": _character_sixth,
    "character_twisted": lambda d, s: [bounds.check_character_twisted(d)],
    "energy_corollary": lambda d, s: bounds.check_energy_corollary(d),
    "ordered_convolution": lambda d, s: bounds.check_ordered_convolution_decay(d, 2)
    + bounds.check_ordered_convolution_decay(d, 3),
    "main_theorem": lambda d, s: bounds.check_main_theorem(d),
    "moment_sum": lambda d, s: [bounds.check_moment_sum(d)],
    "basis_order": lambda d, s: bounds.check_basis_order(d),
    "e3_large": _e3_large,
    "e3_large_random": _e3_large_random,
    "prior_energy": lambda d, s: [bounds.check_prior_energy_bound(d)],
    "stepanov": _stepanov,
}


# ---- heilbronn checkers: profile -> rows -------------------------------------------


def _heilbronn_e3(prof):
    return [heilbronn.heilbronn_e3(prof.p)[1]]


HEILBRONN_CHECKERS: dict[str, Callable] = {
    "heilbronn_max": lambda prof: [heilbronn.heilbronn_max(prof.p, prof)[1]],
    "heilbronn_trivial": lambda prof: [heilbronn.heilbronn_trivial(prof.p, prof)],
    "heilbronn_relation": lambda prof: heilbronn.heilbronn_M_relation(prof.p, prof),
    "heilbronn_e3": _heilbronn_e3,
}


# ---- operator checkers: instance -> rows -------------------------------------------


@dataclass(frozen=True, eq=False)
class OperatorInstance:
    p: int
    t: int
    A: np.ndarray
    phi: np.ndarray  # indicator of one coset of the order-t subgroup
    psi: np.ndarray  # random real weight
    shift: float


def make_instance(cfg: RunConfig, i: int) -> OperatorInstance | None:
    """The i-th randomized (A, phi, psi, c) for cfg; None when no prime in range has a window subgroup."""
    rng = SplitMix64(derive_seed(cfg.seed, _key(OPERATORS), i))
    choices = window_subgroups(cfg.p_min, cfg.p_max, cfg.alpha, cfg.beta, cfg.alpha_scale)
    if not choices:
        return None
    p, t = choices[rng.below(len(choices))]
    size = 1 + rng.below(min(cfg.max_set, p))
    A = np.array(sorted(rng.sample(range(p), size)), dtype=np.int64)
    G = subgroup_of_order(p, t)
    reps = cosets(G)
    phi = np.zeros(p)
    phi[invariant_set(G, [reps[rng.below(len(reps))]]).elements] = 1
    psi = np.array([2 * rng.uniform() - 1 for _ in range(p)])
    return OperatorInstance(p, t, A, phi, psi, 10 * rng.uniform() - 5)


def _op_new_weights(inst: OperatorInstance) -> list[BoundReport]:
    # phi = psi = coset indicator: the constant-shift form applies with c = 0
    return weighted_inequality_check(inst.A, inst.phi, inst.phi)


def _op_shift(inst):
    chk = shift_check(inst.A, dft(inst.psi), inst.shift)
    lhs = max(chk.spectrum_gap, chk.eigenvector_residual)
    return [BoundReport("shift_lemma", inst.p, len(inst.A), lhs, chk.tolerance, ASSERT, {}, {"shift": inst.shift})]


def _op_sigma(inst):
    s = sigma_report(inst.A, inst.phi, inst.psi)
    rows = [
        BoundReport("sigma_routes", inst.p, len(inst.A), s.discrepancy, 1e-6, ASSERT, {}),
        BoundReport("sigma_bound", inst.p, len(inst.A), abs(s.direct), s.bound_rhs, ASSERT, {}),
    ]
    return rows


def _op_rayleigh(inst):
    """Variational principle for A / sqrt|A|, and M(G)^2 as a Rayleigh quotient."""
    T = build_operator(inst.A, dft(inst.psi))
    D = eigendecompose(T)
    u = np.full(T.size, 1 / math.sqrt(T.size))
    excess = max(0.0, T.quadratic_form(u).real - D.top[0])
    G = subgroup_of_order(inst.p, inst.t)
    table, form = max_coefficient_rayleigh(G)
    rel = abs(table - form) / max(abs(table), 1e-300)
    return [
        BoundReport("rayleigh_variational", inst.p, T.size, excess, 1e-8 * T.frobenius, ASSERT, {}),
        BoundReport("rayleigh_max_coefficient", inst.p, inst.t, rel, 1e-6, ASSERT, {}),
    ]


OPERATOR_CHECKERS: dict[str, Callable] = {
    "new_weights": _op_new_weights,
    "shift_lemma": _op_shift,
    "sigma": _op_sigma,
    "rayleigh": _op_rayleigh,
}

DEFAULTS = {
    SURVEY: tuple(SURVEY_CHECKERS),
    HEILBRONN: ("heilbronn_max",),
    OPERATORS: tuple(OPERATOR_CHECKERS),
}


def registry(command: str) -> dict[str, Callable]:
    reg = {SURVEY: SURVEY_CHECKERS, HEILBRONN: HEILBRONN_CHECKERS, OPERATORS: OPERATOR_CHECKERS}[command]
    if os.environ.get(TEST_MODE_ENV) == "1" and command == SURVEY:
        reg = dict(reg, corrupted=_corrupted)
    return reg


# ---- tasks -------------------------------------------------------------------------


def _survey_task(args) -> list[BoundReport]:
    p, t, names, seed = args
    d = bounds.SubgroupData(subgroup_of_order(p, t))
    reg = registry(SURVEY)
    rows: list[BoundReport] = []
    for name in names:
        rows += reg[name](d, derive_seed(seed, p, t, _key(name)))
    return rows


def _heilbronn_task(args) -> list[BoundReport]:
    p, names = args
    prof = heilbronn.heilbronn_profile(p)
    rows: list[BoundReport] = []
    for name in names:
        rows += HEILBRONN_CHECKERS[name](prof)
    return rows


def _operator_task(args) -> list[BoundReport]:
    cfg, i = args
    inst = make_instance(cfg, i)
    if inst is None:
        return []
    rows: list[BoundReport] = []
    for name in cfg.active_checkers:
        rows += OPERATOR_CHECKERS[name](inst)
    return rows


def tasks(cfg: RunConfig) -> tuple[Callable, list]:
    names = cfg.active_checkers
    if cfg.command == SURVEY:
        subs = window_subgroups(cfg.p_min, cfg.p_max, cfg.alpha, cfg.beta, cfg.alpha_scale)
        return _survey_task, [(p, t, names, cfg.seed) for p, t in subs]
    if cfg.command == HEILBRONN:
        return _heilbronn_task, [(p, names) for p in primes_between(max(cfg.p_min, 3), cfg.p_max)]
    return _operator_task, [(cfg, i) for i in range(cfg.instances)]


def run(cfg: RunConfig) -> list[BoundReport]:
    """All rows for cfg, sorted by (p, t, name); ties keep task order."""
    fn, work = tasks(cfg)
    if cfg.jobs == 1 or len(work) < 2:
        chunks = [fn(w) for w in work]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(fn, work, chunksize=max(1, len(work) // (4 * cfg.jobs))))
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (r.p, r.t, r.name))
    return rows


def survey(cfg: RunConfig) -> bounds.SubgroupSurvey:
    if cfg.command != SURVEY:
        raise ValueError("survey() needs a survey config")
    return bounds.SubgroupSurvey(cfg.p_min, cfg.p_max, cfg.alpha, cfg.beta, run(cfg))


@dataclass
class RunResult:
    rows: list[BoundReport] = field(default_factory=list)

    @property
    def violations(self) -> list[BoundReport]:
        return [r for r in self.rows if r.mode == ASSERT and not r.passed]

    @property
    def exit_status(self) -> int:
        return 1 if self.violations else 0
