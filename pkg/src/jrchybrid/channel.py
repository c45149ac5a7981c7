"""Narrowband clustered mmWave channel and its SVD-derived precoders."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ContractViolation
from .numkernel import SvdFactors, as_cmatrix, svd


@dataclass(frozen=True)
class ChannelConfig:
    n_tx: int = 120
    n_rx: int = 6
    n_streams: int = 6
    n_paths: int = 10
    spacing_ratio: float = 0.5

    def violations(self) -> list[str]:
        out = []
        if min(self.n_tx, self.n_rx, self.n_streams) < 1:
            out.append("antenna and stream counts must be positive")
        if not self.n_streams <= self.n_rx <= self.n_tx:
            out.append(
                f"need n_streams <= n_rx <= n_tx, got "
                f"{self.n_streams}, {self.n_rx}, {self.n_tx}"
            )
        if self.n_paths < 1:
            out.append("n_paths must be >= 1")
        if not self.spacing_ratio > 0:
            out.append("spacing_ratio must be > 0")
        return out

    def check(self) -> "ChannelConfig":
        v = self.violations()
        if v:
            raise ConfigurationError(v)
        return self


@dataclass(frozen=True)
class ChannelRealization:
    H: np.ndarray
    svd: SvdFactors
    W: np.ndarray
    F_DF: np.ndarray
    path_gains: np.ndarray
    aod: np.ndarray
    aoa: np.ndarray


def steering_vector(n_elem: int, angle: float, spacing_ratio: float = 0.5) -> np.ndarray:
    """Unit-norm ULA response ``exp(j 2 pi (d/lambda) n sin(angle)) / sqrt(N)``."""
    if n_elem < 1:
        raise ContractViolation("n_elem must be >= 1")
    n = np.arange(n_elem)
    return np.exp(2j * np.pi * spacing_ratio * n * np.sin(angle)) / np.sqrt(n_elem)


def steering_matrix(n_elem: int, angles, spacing_ratio: float = 0.5) -> np.ndarray:
    """Stack of steering vectors, one column per angle."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    n = np.arange(n_elem)[:, None]
    return np.exp(2j * np.pi * spacing_ratio * n * np.sin(angles)[None, :]) / np.sqrt(n_elem)


def channel_from_paths(n_tx, n_rx, gains, aod, aoa, spacing_ratio=0.5) -> np.ndarray:
    """Sum of rank-one path contributions, scaled by sqrt(N_T N_R / N_m)."""
    gains = np.asarray(gains, dtype=complex)
    A_r = steering_matrix(n_rx, aoa, spacing_ratio)
    A_t = steering_matrix(n_tx, aod, spacing_ratio)
    return np.sqrt(n_tx * n_rx / len(gains)) * (A_r * gains) @ A_t.conj().T


def combiner_and_digital_precoder(H, n_streams: int, p_max: float, factors: SvdFactors | None = None):
    """Return ``(W, F_DF)`` from the leading singular vectors of ``H``.

    ``W`` takes the first ``n_streams`` left singular vectors and ``F_DF``
    the first ``n_streams`` right singular vectors, scaled so that
    ``||F_DF||_F^2 == p_max``.
    """
    H = as_cmatrix(H, "H")
    if n_streams > min(H.shape):
        raise ContractViolation(f"n_streams={n_streams} exceeds min{H.shape}")
    f = factors if factors is not None else svd(H)
    W = f.U[:, :n_streams]
    V = f.Vh.conj().T[:, :n_streams]
    F_DF = V * np.sqrt(p_max / n_streams)
    return W, F_DF


def generate_channel(cfg: ChannelConfig, rng: np.random.Generator, p_max: float = 1.0) -> ChannelRealization:
    cfg.check()
    L = cfg.n_paths
    gains = (rng.standard_normal(L) + 1j * rng.standard_normal(L)) / np.sqrt(2)
    aod = rng.uniform(-np.pi, np.pi, L)
    aoa = rng.uniform(-np.pi, np.pi, L)
    H = channel_from_paths(cfg.n_tx, cfg.n_rx, gains, aod, aoa, cfg.spacing_ratio)
    f = svd(H)
    W, F_DF = combiner_and_digital_precoder(H, cfg.n_streams, p_max, f)
    return ChannelRealization(H=H, svd=f, W=W, F_DF=F_DF, path_gains=gains, aod=aod, aoa=aoa)
