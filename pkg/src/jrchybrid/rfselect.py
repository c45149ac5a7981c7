"""Active RF-chain selection by Dinkelbach fractional programming.

The effective channel seen through a fixed DFT analog precoder is treated
as a set of parallel eigenchannels. Each Dinkelbach step water-fills power
over them at the current energy-efficiency price ``nu``, drops entries
below ``beta1`` (open switches), and updates ``nu`` to the new
rate/power ratio. The number of surviving entries is the chain count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import ContractViolation, DegenerateChannelError
from .metrics import PowerModel
from .numkernel import svd

LN2 = np.log(2.0)


@dataclass(frozen=True)
class RfSelectConfig:
    beta: float = 1e-4
    beta1: float = 1e-6
    m_max: int = 50
    r_min: float = 1.0
    p_hat_max: float | None = None
    l_avail: int | None = None

    def violations(self) -> list[str]:
        out = []
        if not self.beta > 0:
            out.append("beta must be > 0")
        if not self.beta1 > 0:
            out.append("beta1 must be > 0")
        if self.m_max < 1:
            out.append("m_max must be >= 1")
        if self.r_min < 0:
            out.append("r_min must be >= 0")
        if self.l_avail is not None and self.l_avail < 1:
            out.append("l_avail must be >= 1")
        return out


@dataclass
class RfSelection:
    p_b: np.ndarray
    l_opt: int
    nu_trace: list[float] = field(default_factory=list)
    g_trace: list[float] = field(default_factory=list)
    converged: bool = False
    rate: float = 0.0
    power: float = 0.0
    rate_infeasible: bool = False
    power_exceeded: bool = False
    degenerate: bool = False


def dft_matrix(n: int) -> np.ndarray:
    """Unitary n-point DFT matrix."""
    return np.fft.fft(np.eye(n), axis=0) / np.sqrt(n)


def effective_gains(H, W, n_tx: int, l_avail: int,
                    beams: Literal["all", "first"] = "all") -> np.ndarray:
    """Descending singular values of Psi = W^H H F F^H H^H W.

    ``beams="all"`` uses every column of the unitary DFT, so ``F F^H = I``
    and Psi is exactly diagonal (the large-array limit). ``beams="first"``
    restricts ``F`` to DFT columns ``0 .. l_avail-1``.
    """
    H = np.asarray(H, dtype=complex)
    W = np.asarray(W, dtype=complex)
    if l_avail > W.shape[1]:
        raise ContractViolation(f"l_avail={l_avail} exceeds the {W.shape[1]} streams of Psi")
    D = dft_matrix(n_tx)
    if beams == "first":
        D = D[:, :l_avail]
    elif beams != "all":
        raise ContractViolation(f"unknown beam set {beams!r}")
    G = W.conj().T @ H @ D
    psi = G @ G.conj().T
    return svd(psi).S[:l_avail].copy()


def rate_parallel(gains, p, noise_var: float) -> float:
    """Sum rate of parallel channels, sum_k log2(1 + g_k p_k / noise_var)."""
    return float(np.sum(np.log2(1.0 + np.asarray(gains) * np.asarray(p) / noise_var)))


def _budget_fill(gains: np.ndarray, noise_var: float, budget: float) -> np.ndarray:
    """Water-filling that spends exactly ``budget``.

    Active powers are written as differences of inverse gains, which keeps
    the allocation exact when ``noise_var / g`` dwarfs the budget.
    """
    p = np.zeros_like(gains, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        d = np.where(gains > 0, noise_var / np.where(gains > 0, gains, 1.0), np.inf)
    finite = np.isfinite(d)
    if not finite.any():
        p[np.argmax(gains)] = budget
        return p
    order = np.argsort(d, kind="stable")
    ds = d[order]
    n = int(finite.sum())
    for k in range(n, 0, -1):
        # water level minus the k-th inverse gain
        head = (budget + np.sum(ds[:k] - ds[k - 1])) / k
        if head > 0 or k == 1:
            p[order[:k]] = head + (ds[k - 1] - ds[:k])
            return p
    return p


def _fill(gains: np.ndarray, noise_var: float, level: float) -> np.ndarray:
    p = np.zeros_like(gains, dtype=float)
    pos = gains > 0
    with np.errstate(divide="ignore", over="ignore"):
        p[pos] = np.maximum(0.0, level - noise_var / gains[pos])
    return p


def waterfill_step(gains, nu: float, noise_var: float, alpha: float, p_max: float) -> np.ndarray:
    """Power allocation for one Dinkelbach step.

    The unconstrained maximizer of ``sum log2(1 + g p / s) - nu * alpha * sum p``
    is water-filling at level ``1 / (nu alpha ln 2)``. The water level is
    then moved until the allocation spends exactly ``p_max``.
    """
    g = np.asarray(gains, dtype=float)
    if np.any(g < 0):
        raise ContractViolation("gains must be nonnegative")
    if not np.any(g > 0):
        raise DegenerateChannelError("all effective gains are zero")
    if nu > 0:
        level = 1.0 / (nu * alpha * LN2)
        if np.isfinite(level):
            p = _fill(g, noise_var, level)
            if abs(p.sum() - p_max) <= 1e-12 * p_max:
                return p
    return _budget_fill(g, noise_var, p_max)


def power_terms(pm: PowerModel, n_tx: int) -> tuple[float, float]:
    """Per-watt price ``alpha`` and static power ``P_S`` for the parallel-channel model."""
    if pm.connectivity == "full":
        alpha = pm.a + (pm.p_rf + n_tx * pm.p_ps) / pm.p_max
        static = n_tx * pm.p_a + pm.p_c
    else:
        alpha = pm.a + pm.p_rf / pm.p_max
        static = n_tx * pm.p_a + n_tx * pm.p_ps + pm.p_c
    return alpha, static


def power_budget(pm: PowerModel, n_tx: int, l_avail: int) -> float:
    return (pm.p_max + l_avail * pm.p_rf + n_tx * pm.p_a
            + pm.n_phase_shifters(l_avail, n_tx) * pm.p_ps + pm.p_c)


def _threshold(p: np.ndarray, gains: np.ndarray, beta1: float, noise_var: float, p_max: float) -> np.ndarray:
    keep = p >= beta1
    if keep.all() or not keep.any():
        return p
    # surviving chains share the full budget again
    q = np.zeros_like(p)
    q[keep] = _budget_fill(gains[keep], noise_var, p_max)
    return q


def select_rf_chains(gains, noise_var: float, pm: PowerModel, cfg: RfSelectConfig,
                     n_tx: int = 120) -> RfSelection:
    g = np.asarray(gains, dtype=float)
    if cfg.l_avail is not None:
        g = g[: cfg.l_avail]
    L = len(g)
    alpha, static = power_terms(pm, n_tx)
    p_hat = cfg.p_hat_max if cfg.p_hat_max is not None else power_budget(pm, n_tx, L)

    def total_power(p):
        return alpha * p.sum() + static

    if not np.any(g > 0):
        p = np.zeros(L)
        p[0] = pm.p_max
        pw = total_power(p)
        return RfSelection(p_b=p, l_opt=1, converged=False, rate=0.0, power=pw,
                           rate_infeasible=cfg.r_min > 0, power_exceeded=pw > p_hat,
                           degenerate=True)

    p = np.full(L, pm.p_max / L)
    nu = 0.0
    G = rate_parallel(g, p, noise_var) - nu * total_power(p)
    nu_trace = [nu]
    g_trace: list[float] = []
    R, P = rate_parallel(g, p, noise_var), total_power(p)
    m = 0
    while m == 0 or (abs(G) > cfg.beta and m < cfg.m_max):
        p = waterfill_step(g, nu, noise_var, alpha, pm.p_max)
        p = _threshold(p, g, cfg.beta1, noise_var, pm.p_max)
        R, P = rate_parallel(g, p, noise_var), total_power(p)
        G = R - nu * P
        g_trace.append(G)
        nu = R / P
        nu_trace.append(nu)
        m += 1

    l_opt = max(1, int(np.count_nonzero(p >= cfg.beta1)))
    return RfSelection(
        p_b=p,
        l_opt=l_opt,
        nu_trace=nu_trace,
        g_trace=g_trace,
        converged=abs(G) <= cfg.beta,
        rate=R,
        power=P,
        rate_infeasible=R < cfg.r_min,
        power_exceeded=P > p_hat * (1 + 1e-12),
    )


def determinant_rate(H, W, F_RF, p_b, noise_var: float) -> float:
    """Exact log-det rate with F_BB = P_B^(1/2); used to gauge the parallel-channel approximation."""
    A = np.asarray(W).conj().T @ np.asarray(H) @ (np.asarray(F_RF) * np.sqrt(np.asarray(p_b))[None, :])
    lam = np.clip(np.linalg.eigvalsh(A @ A.conj().T), 0, None)
    return float(np.sum(np.log2(1 + lam / noise_var)))
