"""Achievable rate, base-station power consumption and energy efficiency."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ContractViolation

Connectivity = Literal["partial", "full"]


@dataclass(frozen=True)
class PowerModel:
    """Static and dynamic power constants, in watts.

    ``a`` is the reciprocal amplifier efficiency applied to radiated power.
    """

    a: float = 1.0
    dac_bits: int = 8
    p_dac: float = 1e-3
    p_ps: float = 10e-3
    p_a: float = 100e-3
    p_c: float = 10.0
    p_max: float = 1.0
    connectivity: Connectivity = "partial"

    @property
    def p_rf(self) -> float:
        # two DACs (I and Q) per chain
        return 2.0 * (2.0**self.dac_bits) * self.p_dac

    def n_phase_shifters(self, n_chains: int, n_tx: int) -> int:
        return n_tx * n_chains if self.connectivity == "full" else n_tx

    def violations(self) -> list[str]:
        out = []
        for name in ("a", "p_dac", "p_ps", "p_a", "p_c"):
            if getattr(self, name) < 0:
                out.append(f"{name} must be >= 0")
        if not self.p_max > 0:
            out.append("p_max must be > 0")
        if self.dac_bits < 1:
            out.append("dac_bits must be >= 1")
        if self.connectivity not in ("partial", "full"):
            out.append(f"unknown connectivity {self.connectivity!r}")
        return out


@dataclass(frozen=True)
class LinkMetrics:
    rate: float
    power: float
    ee: float


def rate(H, W, F_RF, F_BB, noise_var: float) -> float:
    """log2 det(I + W^H H F F^H H^H W / noise_var), with F = F_RF F_BB."""
    if not noise_var > 0:
        raise ContractViolation("noise_var must be > 0")
    A = np.asarray(W).conj().T @ np.asarray(H) @ (np.asarray(F_RF) @ np.asarray(F_BB))
    # det(I + A A^H / s) through the eigenvalues of the Gram matrix
    lam = np.linalg.eigvalsh(A @ A.conj().T)
    lam = np.clip(lam, 0.0, None)
    return float(np.sum(np.log2(1.0 + lam / noise_var)))


def power_consumed(F_RF, F_BB, n_active_chains: int, pm: PowerModel, n_tx: int,
                   n_phase_shifters: int | None = None) -> float:
    """Total base-station power for the given precoder and active chain count.

    ``n_phase_shifters`` overrides the count implied by ``pm.connectivity``
    (the fully-digital baseline uses 0).
    """
    if n_active_chains < 1:
        raise ContractViolation("n_active_chains must be >= 1")
    X = np.asarray(F_RF) @ np.asarray(F_BB)
    radiated = float(np.real(np.vdot(X, X)))
    n_ps = pm.n_phase_shifters(n_active_chains, n_tx) if n_phase_shifters is None else n_phase_shifters
    return (pm.a * radiated + n_active_chains * pm.p_rf + n_tx * pm.p_a
            + n_ps * pm.p_ps + pm.p_c)


def energy_efficiency(rate_bps_hz: float, power_w: float) -> float:
    if not power_w > 0:
        raise ContractViolation("power must be > 0")
    return rate_bps_hz / power_w


def link_metrics(H, W, F_RF, F_BB, noise_var, n_active_chains, pm, n_tx, n_phase_shifters=None) -> LinkMetrics:
    r = rate(H, W, F_RF, F_BB, noise_var)
    p = power_consumed(F_RF, F_BB, n_active_chains, pm, n_tx, n_phase_shifters)
    return LinkMetrics(rate=r, power=p, ee=energy_efficiency(r, p))
