"""Operators T^g_A(x, y) = g(x - y) on a set A, their spectra, and the weighted inequality.

Eigendecomposition is a complex two-sided Jacobi method.  Each sweep visits
all index pairs in round-robin order, so every round applies |A|/2 disjoint
rotations at once as a handful of vectorised row/column updates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .energy import energy_k, mixed_energy_3, triple_correlation
from .errors import CapacityError, DomainError
from .reports import ASSERT, REPORT, BoundReport
from .spectral import dft, max_nonzero_coefficient, subgroup_spectrum

JACOBI_TOL = 1e-12
MAX_SWEEPS = 60
MAX_SIGMA_SET = 1000


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    index: np.ndarray
    matrix: np.ndarray = field(repr=False)
    n: int
    hermitian: bool

    @property
    def size(self) -> int:
        return len(self.index)

    @property
    def frobenius(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def quadratic_form(self, a: np.ndarray) -> complex:
        """<T a, a> = sum_x (T a)(x) conj(a(x))."""
        return complex(np.vdot(a, self.matrix @ a))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray = field(repr=False)  # column alpha is f_alpha
    sweeps: int = 0

    @property
    def top(self) -> tuple[float, np.ndarray]:
        return float(self.eigenvalues[0]), self.eigenvectors[:, 0]

    def residual(self, T: HermitianOperator) -> float:
        """max_alpha ||T f_alpha - mu_alpha f_alpha||."""
        R = T.matrix @ self.eigenvectors - self.eigenvectors * self.eigenvalues[None, :]
        return float(np.linalg.norm(R, axis=0).max()) if R.size else 0.0

    def orthonormality_error(self) -> float:
        V = self.eigenvectors
        return float(np.abs(V.conj().T @ V - np.eye(V.shape[1])).max()) if V.size else 0.0


def _as_index(A, n: int) -> np.ndarray:
    """Sorted residues of A; boolean arrays are read as indicator vectors."""
    A = np.asarray(A)
    if A.dtype == np.bool_:
        return np.flatnonzero(A).astype(np.int64)
    return np.unique(A.astype(np.int64) % n)


def is_hermitian_symmetric(g: np.ndarray, rtol: float = 1e-12) -> bool:
    """conj(g(-x)) == g(x) for every x, up to float noise."""
    g = np.asarray(g)
    flipped = np.conj(g[(-np.arange(len(g))) % len(g)])
    scale = max(float(np.abs(g).max()), 1.0) if len(g) else 1.0
    return bool(np.abs(flipped - g).max() <= rtol * scale) if len(g) else True


def build_operator(A, g) -> HermitianOperator:
    """Matrix g(x - y) indexed by the sorted elements of A."""
    g = np.asarray(g, dtype=np.complex128)
    n = len(g)
    idx = _as_index(A, n)
    M = g[(idx[:, None] - idx[None, :]) % n]
    return HermitianOperator(idx, M, n, is_hermitian_symmetric(g))


def _round_robin(m: int) -> list[tuple[np.ndarray, np.ndarray]]:
    size = m + (m % 2)
    players = list(range(size))
    rounds = []
    for _ in range(size - 1):
        pairs = [(players[i], players[size - 1 - i]) for i in range(size // 2)]
        pairs = [(a, b) if a < b else (b, a) for a, b in pairs if a < m and b < m]
        P = np.array([a for a, _ in pairs], dtype=np.int64)
        Q = np.array([b for _, b in pairs], dtype=np.int64)
        rounds.append((P, Q))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(A: np.ndarray) -> float:
    # computed from the entries themselves: ||A||^2 - ||diag||^2 cancels catastrophically
    off = A.copy()
    np.fill_diagonal(off, 0)
    return float(np.linalg.norm(off))


def jacobi_eigh(H: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = MAX_SWEEPS):
    """Eigenvalues (unsorted) and unitary eigenvector matrix of a hermitian matrix."""
    A = np.array(H, dtype=np.complex128)
    # transforms of real weights are hermitian only up to rounding; rotations assume exactness
    A = (A + A.conj().T) / 2
    m = A.shape[0]
    V = np.eye(m, dtype=np.complex128)
    scale = float(np.linalg.norm(A))
    target = tol * scale
    # entries this small are dropped rather than rotated away: dividing by
    # subnormal magnitudes overflows, and zeroing them is below rounding
    negligible = 1e-18 * scale
    rounds = _round_robin(m)
    sweeps = 0
    while _off_norm(A) > target:
        if sweeps >= max_sweeps:
            raise RuntimeError(f"Jacobi did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for P, Q in rounds:
            apq = A[P, Q]
            r = np.abs(apq)
            live = r > negligible
            phase = np.where(live, apq / np.where(live, r, 1.0), 1.0)
            app, aqq = A[P, P].real, A[Q, Q].real
            tau = np.where(live, (aqq - app) / (2 * np.where(live, r, 1.0)), 0.0)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            t = np.where(live, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # U = diag(1, conj(phase)) @ [[c, s], [-s, c]] on coordinates (p, q)
            u_pp, u_pq = c, s
            u_qp, u_qq = -s * np.conj(phase), c * np.conj(phase)
            Ap, Aq = A[:, P].copy(), A[:, Q].copy()
            A[:, P] = Ap * u_pp + Aq * u_qp
            A[:, Q] = Ap * u_pq + Aq * u_qq
            Ap, Aq = A[P, :].copy(), A[Q, :].copy()
            A[P, :] = np.conj(u_pp)[:, None] * Ap + np.conj(u_qp)[:, None] * Aq
            A[Q, :] = np.conj(u_pq)[:, None] * Ap + np.conj(u_qq)[:, None] * Aq
            A[P, Q] = 0
            A[Q, P] = 0
            Vp, Vq = V[:, P].copy(), V[:, Q].copy()
            V[:, P] = Vp * u_pp + Vq * u_qp
            V[:, Q] = Vp * u_pq + Vq * u_qq
    return np.diag(A).real.copy(), V, sweeps


def eigendecompose(T: HermitianOperator) -> SpectralDecomposition:
    if not T.hermitian:
        raise DomainError("operator is not hermitian: conj(g(-x)) != g(x)")
    vals, vecs, sweeps = jacobi_eigh(T.matrix)
    order = np.argsort(-vals, kind="stable")
    return SpectralDecomposition(vals[order], vecs[:, order], sweeps)


@dataclass(frozen=True)
class ShiftCheck:
    shift: float
    spectrum_gap: float
    eigenvector_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.spectrum_gap <= self.tolerance and self.eigenvector_residual <= self.tolerance


def shift_check(A, g, c, tol: float = 1e-8) -> ShiftCheck:
    """Adding c*delta_0 to g shifts the spectrum of T^g_A by c and keeps its eigenfunctions."""
    if complex(c).imag != 0:
        raise DomainError("the shift must be real to keep the operator hermitian")
    c = float(complex(c).real)
    g = np.asarray(g, dtype=np.complex128)
    g_c = g.copy()
    g_c[0] += c
    T, Tc = build_operator(A, g), build_operator(A, g_c)
    D, Dc = eigendecompose(T), eigendecompose(Tc)
    scale = max(T.frobenius, 1.0)
    gap = float(np.abs(Dc.eigenvalues - (D.eigenvalues + c)).max())
    R = Tc.matrix @ D.eigenvectors - D.eigenvectors * (D.eigenvalues + c)[None, :]
    resid = float(np.linalg.norm(R, axis=0).max())
    return ShiftCheck(c, gap, resid, tol * scale)


def _same_index(T1: HermitianOperator, T2: HermitianOperator) -> None:
    if T1.size != T2.size or not np.array_equal(T1.index, T2.index):
        raise DomainError("operators must share the index set")
    if T1.size > MAX_SIGMA_SET:
        raise CapacityError(f"|A| = {T1.size} exceeds {MAX_SIGMA_SET}")


def sigma_direct(T1: HermitianOperator, T2: HermitianOperator) -> complex:
    """sum_{x,y,z} T1(x,y) conj(T2(x,z)) T2(y,z); the z-sum is a matrix product."""
    _same_index(T1, T2)
    inner = np.conj(T2.matrix) @ T2.matrix.T  # inner[x, y] = sum_z conj(T2(x,z)) T2(y,z)
    return complex(np.sum(T1.matrix * inner))


def sigma_spectral(
    T1: HermitianOperator, T2: HermitianOperator, decomposition: SpectralDecomposition | None = None
) -> complex:
    """sum_alpha |mu_alpha|^2 <T1 f_alpha, f_alpha> over the eigenpairs of T2."""
    _same_index(T1, T2)
    D = decomposition or eigendecompose(T2)
    F = D.eigenvectors
    forms = np.einsum("xa,xy,ya->a", np.conj(F), T1.matrix, F)
    return complex(np.sum(np.abs(D.eigenvalues) ** 2 * forms))


def sigma_c3(A, phi_hat, psi_hat) -> complex:
    """sum_{a,b} C_3(A)(a,b) phi^(a-b) conj(psi^(a)) psi^(b)."""
    phi_hat = np.asarray(phi_hat)
    psi_hat = np.asarray(psi_hat)
    n = len(phi_hat)
    ind = np.zeros(n, dtype=np.int64)
    ind[_as_index(A, n)] = 1
    a, b, w = triple_correlation(ind).nonzero()
    return complex(np.sum(w * phi_hat[(a - b) % n] * np.conj(psi_hat[a]) * psi_hat[b]))


@dataclass(frozen=True)
class SigmaReport:
    direct: complex
    spectral: complex
    bound_rhs: float

    @property
    def discrepancy(self) -> float:
        return abs(self.direct - self.spectral) / (1 + abs(self.direct))

    @property
    def passed(self) -> bool:
        return self.discrepancy <= 1e-6 and abs(self.direct) <= self.bound_rhs * (1 + 1e-6)


def sigma_report(A, phi, psi) -> SigmaReport:
    """Both routes to sigma for the operators built from the transforms of phi and psi."""
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    n = len(phi)
    T1, T2 = build_operator(A, dft(phi)), build_operator(A, dft(psi))
    ind = np.zeros(n, dtype=np.int64)
    ind[T1.index] = 1
    e3 = energy_k(ind, 3)
    mixed = mixed_energy_3(_integral_or_float(phi), _integral_or_float(psi), _integral_or_float(psi))
    rhs = float(np.sqrt(float(e3) * float(mixed))) * n
    return SigmaReport(sigma_direct(T1, T2), sigma_spectral(T1, T2), rhs)


def _integral_or_float(v: np.ndarray) -> np.ndarray:
    r = np.rint(v)
    return r.astype(np.int64) if np.array_equal(r, v) else v


def rayleigh_weight(A_index: np.ndarray, weights: np.ndarray, A_hat: np.ndarray) -> float:
    """(1/|A|) sum_x w(x) |A^(x)|^2."""
    return float(np.sum(weights * np.abs(A_hat) ** 2)) / len(A_index)


def weighted_inequality_check(A, phi, psi, label: str = "new_weights") -> list[BoundReport]:
    """The two forms of the weighted-operator inequality for one (A, phi, psi).

    Returns the general form (with the top eigenfunction of T^{psi^}_A) and,
    when phi - psi is constant, the averaged form.  Rows whose psi-average is
    negative are emitted in report mode: the lower bound on the top eigenvalue
    then no longer controls its square.
    """
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if phi.shape != psi.shape:
        raise ValueError("phi and psi must have equal length")
    if np.any(phi < 0):
        raise DomainError("phi must be nonnegative")
    n = len(phi)
    phi_hat, psi_hat = dft(phi), dft(psi)
    T1, T2 = build_operator(A, phi_hat), build_operator(A, psi_hat)
    idx = T1.index
    ind = np.zeros(n, dtype=np.int64)
    ind[idx] = 1
    A_hat = dft(ind)

    D = eigendecompose(T2)
    mu1, f1 = D.top
    r_psi = rayleigh_weight(idx, psi, A_hat)
    r_phi = rayleigh_weight(idx, phi, A_hat)
    form1 = T1.quadratic_form(f1).real

    e3 = energy_k(ind, 3)
    mixed = mixed_energy_3(_integral_or_float(phi), _integral_or_float(psi), _integral_or_float(psi))
    rhs = float(e3) * float(mixed) * n**2

    shift = phi - psi
    constant_shift = bool(np.allclose(shift, shift[0], rtol=0, atol=1e-12))
    flags = {
        "psi_average_nonnegative": r_psi >= 0,
        "top_eigenvalue_nonnegative": mu1 >= 0,
        "constant_shift": constant_shift,
    }
    mode = ASSERT if r_psi >= 0 else REPORT
    details = {"mu1": mu1, "psi_average": r_psi, "phi_average": r_phi, "e3": e3, "e3_mixed": mixed}
    out = [BoundReport(label, n, len(idx), form1**2 * r_psi**4, rhs, mode, flags, details)]
    if constant_shift:
        out.append(BoundReport(label + "_averaged", n, len(idx), r_phi**2 * r_psi**4, rhs, mode, flags, details))
    return out


def max_coefficient_rayleigh(G, S=None) -> tuple[float, float]:
    """M(G)^2 two ways: mean of |G^|^2 over the maximizing coset, and <T u, u> with u = G / sqrt(t)."""
    S = S or subgroup_spectrum(G)
    _, xi = max_nonzero_coefficient(S)
    coset = (xi * G.elements) % G.p
    from_table = float(np.sum(np.abs(S.full()[coset]) ** 2)) / G.order
    g = np.zeros(G.p)
    g[coset] = 1
    T = build_operator(G.elements, dft(g))
    u = np.full(G.order, 1 / np.sqrt(G.order))
    return from_table, T.quadratic_form(u).real
