"""Sub-arrayed hybrid precoder design by weighted alternating minimization.

The precoder ``F_RF @ F_BB`` is pulled toward the fully-digital precoder
``F_DF`` with weight ``rho`` and toward the rotated radar precoder
``F_RD @ U_T`` with weight ``1 - rho``. Each of U_T, F_RF and F_BB is
updated in turn by an exact minimizer, so the objective never increases.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, DegenerateTargetError
from .numkernel import svd

MAX_RESTARTS = 5


@dataclass(frozen=True)
class HybridConfig:
    rho: float = 1.0
    beta2: float = 1e-4
    n_max: int = 100
    p_max: float = 1.0

    def violations(self) -> list[str]:
        out = []
        if not 0.0 <= self.rho <= 1.0:
            out.append("rho out of [0,1]")
        if not self.beta2 > 0:
            out.append("beta2 must be > 0")
        if self.n_max < 1:
            out.append("n_max must be >= 1")
        if not self.p_max > 0:
            out.append("p_max must be > 0")
        return out


@dataclass
class HybridPrecoder:
    F_RF: np.ndarray
    F_BB: np.ndarray
    U_T: np.ndarray
    objective_trace: list[float] = field(default_factory=list)
    converged: bool = False
    l_t: int = 0
    l_t_requested: int = 0
    restarts: int = 0
    phase_ties: int = 0

    @property
    def precoder(self) -> np.ndarray:
        return self.F_RF @ self.F_BB


def largest_divisor_at_most(n: int, k: int) -> int:
    for d in range(min(n, max(k, 1)), 0, -1):
        if n % d == 0:
            return d
    return 1


def subarray_layout(n_tx: int, l_t: int) -> np.ndarray:
    """Owning RF chain of every antenna row (contiguous blocks of N_T / L_T)."""
    if l_t < 1 or n_tx % l_t:
        raise ContractViolation(f"n_tx={n_tx} is not divisible by l_t={l_t}")
    return np.arange(n_tx) // (n_tx // l_t)


def analog_from_phases(phases, owner: np.ndarray, l_t: int) -> np.ndarray:
    F = np.zeros((len(owner), l_t), dtype=complex)
    F[np.arange(len(owner)), owner] = np.exp(1j * np.asarray(phases))
    return F


def weighted_objective(F_RF, F_BB, U_T, F_DF, F_RD, rho: float) -> float:
    X = F_RF @ F_BB
    comm = np.linalg.norm(X - F_DF) ** 2 if rho > 0 else 0.0
    radar = np.linalg.norm(X - F_RD @ U_T) ** 2 if rho < 1 else 0.0
    return float(rho * comm + (1.0 - rho) * radar)


def procrustes_rows(M: np.ndarray) -> np.ndarray:
    """Row-unitary Q (Q Q^H = I) maximizing Re tr(Q^H M), for a wide M."""
    n_p, n_s = M.shape
    if n_p > n_s:
        raise ContractViolation(f"need n_p <= n_s, got {M.shape}")
    U, _, Vh = svd(M)
    return U @ np.eye(n_p, n_s) @ Vh


def solve_ut(F_RD, F_RF, F_BB) -> np.ndarray:
    """Rotation U_T minimizing ||F_RD U_T - F_RF F_BB||_F with U_T U_T^H = I.

    Relies on F_RD having orthonormal columns.
    """
    return procrustes_rows(F_RD.conj().T @ (F_RF @ F_BB))


def _target(F_DF, F_RD, U_T, rho):
    if rho >= 1.0:
        return F_DF
    if rho <= 0.0:
        return F_RD @ U_T
    return rho * F_DF + (1.0 - rho) * (F_RD @ U_T)


def solve_frf(F_BB, F_DF, F_RD, U_T, rho: float, owner: np.ndarray, return_ties: bool = False):
    """Per-entry phase update of the analog precoder.

    Row ``k`` has a single nonzero at column ``owner[k]``; with the other
    variables fixed the objective separates over rows, and each phase is
    the argument of ``<rho F_DF[k] + (1-rho) (F_RD U_T)[k], F_BB[owner[k]]>``.
    A zero inner product leaves the phase at 0.
    """
    T = _target(F_DF, F_RD, U_T, rho)
    c = np.einsum("kj,kj->k", T, F_BB[owner].conj())
    ties = np.abs(c) == 0
    phases = np.where(ties, 0.0, np.angle(c))
    F = analog_from_phases(phases, owner, F_BB.shape[0])
    return (F, int(ties.sum())) if return_ties else F


def solve_fbb(F_RF, F_DF, F_RD, U_T, rho: float, p_max: float, n_tx: int, l_t: int) -> np.ndarray:
    """Baseband precoder on the sphere ||F_BB||_F^2 = L_T P_max / N_T.

    With F_RF^H F_RF = (N_T / L_T) I the quadratic part is constant on the
    sphere, leaving a linear objective whose maximizer is the normalized
    projection ``M = F_RF^H (rho F_DF + (1-rho) F_RD U_T)``.
    """
    M = F_RF.conj().T @ _target(F_DF, F_RD, U_T, rho)
    nrm = np.linalg.norm(M)
    if nrm == 0:
        raise DegenerateTargetError("baseband target is zero")
    return np.sqrt(l_t * p_max / n_tx) * M / nrm


def _random_start(rng, owner, l_t, n_s, n_p, F_RD, p_max):
    n_tx = len(owner)
    F_RF = analog_from_phases(rng.uniform(0.0, 2 * np.pi, n_tx), owner, l_t)
    B = rng.standard_normal((l_t, n_s)) + 1j * rng.standard_normal((l_t, n_s))
    F_BB = np.sqrt(l_t * p_max / n_tx) * B / np.linalg.norm(B)
    Z = rng.standard_normal((n_p, n_s)) + 1j * rng.standard_normal((n_p, n_s))
    U_T = procrustes_rows(Z)
    return F_RF, F_BB, U_T


def design_hybrid(F_DF, F_RD, cfg: HybridConfig, l_t: int, rng: np.random.Generator) -> HybridPrecoder:
    F_DF = np.asarray(F_DF, dtype=complex)
    F_RD = np.asarray(F_RD, dtype=complex)
    n_tx, n_s = F_DF.shape
    n_p = F_RD.shape[1]
    if F_RD.shape[0] != n_tx:
        raise ContractViolation("F_DF and F_RD must have the same number of rows")
    bad = cfg.violations()
    if bad:
        raise ContractViolation("; ".join(bad))
    used = largest_divisor_at_most(n_tx, l_t)
    owner = subarray_layout(n_tx, used)
    rho = cfg.rho

    for restart in range(MAX_RESTARTS + 1):
        F_RF, F_BB, U_T = _random_start(rng, owner, used, n_s, n_p, F_RD, cfg.p_max)
        trace = [weighted_objective(F_RF, F_BB, U_T, F_DF, F_RD, rho)]
        ties = 0
        converged = False
        try:
            for n in range(1, cfg.n_max + 1):
                if rho < 1.0 or n == 1:
                    U_T = solve_ut(F_RD, F_RF, F_BB)
                F_RF, t = solve_frf(F_BB, F_DF, F_RD, U_T, rho, owner, return_ties=True)
                ties += t
                F_BB = solve_fbb(F_RF, F_DF, F_RD, U_T, rho, cfg.p_max, n_tx, used)
                trace.append(weighted_objective(F_RF, F_BB, U_T, F_DF, F_RD, rho))
                if abs(trace[-1] - trace[-2]) < cfg.beta2:
                    converged = True
                    break
        except DegenerateTargetError:
            if restart == MAX_RESTARTS:
                raise
            continue
        return HybridPrecoder(F_RF=F_RF, F_BB=F_BB, U_T=U_T, objective_trace=trace,
                              converged=converged, l_t=used, l_t_requested=l_t,
                              restarts=restart, phase_ties=ties)
    raise AssertionError("unreachable")
