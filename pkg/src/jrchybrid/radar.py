"""Sub-arrayed radar precoder and transmit beampatterns."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import steering_matrix, steering_vector
from .errors import ConfigurationError, ContractViolation
from .numkernel import as_cmatrix, is_hermitian

DEFAULT_GRID_DEG = np.arange(-90.0, 90.0 + 0.25, 0.5)


@dataclass(frozen=True)
class RadarScene:
    target_angles: tuple[float, ...] = tuple(np.deg2rad([-30.0, 0.0, 30.0]))
    n_tx: int = 120
    subarray_count: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "target_angles", tuple(float(t) for t in self.target_angles))
        if self.subarray_count is None:
            object.__setattr__(self, "subarray_count", len(self.target_angles))

    @property
    def n_targets(self) -> int:
        return len(self.target_angles)

    def violations(self) -> list[str]:
        out = []
        if self.n_targets < 1:
            out.append("at least one target is required")
        if self.subarray_count != self.n_targets:
            out.append("subarray_count must equal the number of targets")
        if self.n_targets and self.n_tx % self.n_targets:
            lo = self.n_tx - self.n_tx % self.n_targets
            hi = lo + self.n_targets
            best = lo if (self.n_tx - lo) <= (hi - self.n_tx) and lo > 0 else hi
            out.append(
                f"n_tx={self.n_tx} not divisible by n_targets={self.n_targets}; "
                f"nearest valid n_tx is {best}"
            )
        if any(not -np.pi / 2 < t < np.pi / 2 for t in self.target_angles):
            out.append("target angles must lie in (-90, 90) degrees")
        return out


@dataclass(frozen=True)
class RadarPrecoder:
    F_RD: np.ndarray
    R_d: np.ndarray = field(repr=False)


def build_radar_precoder(scene: RadarScene, spacing_ratio: float = 0.5) -> RadarPrecoder:
    """Block-diagonal radar-only precoder.

    Target ``j`` owns antennas ``j*B .. (j+1)*B - 1`` with ``B = N_T / N_p``;
    its column holds that slice of ``a_T(theta_j)`` rescaled to unit norm,
    so ``F_RD^H F_RD = I``.
    """
    bad = scene.violations()
    if bad:
        raise ConfigurationError(bad)
    n_p = scene.n_targets
    block = scene.n_tx // n_p
    F = np.zeros((scene.n_tx, n_p), dtype=complex)
    for j, theta in enumerate(scene.target_angles):
        rows = slice(j * block, (j + 1) * block)
        seg = steering_vector(scene.n_tx, theta, spacing_ratio)[rows]
        F[rows, j] = seg / np.linalg.norm(seg)
    return RadarPrecoder(F_RD=F, R_d=F @ F.conj().T)


def covariance(F_RF, F_BB) -> np.ndarray:
    X = np.asarray(F_RF) @ np.asarray(F_BB)
    return X @ X.conj().T


def beampattern(R, angles, spacing_ratio: float = 0.5, tol: float = 1e-8) -> np.ndarray:
    """Evaluate ``a(phi)^H R a(phi)`` on an angle grid (radians)."""
    R = as_cmatrix(R, "R")
    if R.shape[0] != R.shape[1] or not is_hermitian(R, tol):
        raise ContractViolation("beampattern needs a square Hermitian covariance")
    A = steering_matrix(R.shape[0], angles, spacing_ratio)
    return np.real(np.einsum("ij,ij->j", A.conj(), R @ A))


def precoder_beampattern(X, angles, spacing_ratio: float = 0.5) -> np.ndarray:
    """Beampattern of ``X X^H`` without forming the N_T x N_T covariance."""
    A = steering_matrix(np.shape(X)[0], angles, spacing_ratio)
    return np.sum(np.abs(A.conj().T @ X) ** 2, axis=1)


def ideal_beampattern(scene: RadarScene, angles, reference=None, spacing_ratio: float = 0.5) -> np.ndarray:
    """Radar-only beampattern, optionally rescaled to match ``reference``'s grid power."""
    B = beampattern(build_radar_precoder(scene, spacing_ratio).R_d, angles, spacing_ratio)
    if reference is not None:
        total = np.sum(B)
        if total > 0:
            B = B * (np.sum(reference) / total)
    return B


def local_maxima(values, angles, count: int | None = None):
    """Angles of interior local maxima, strongest first."""
    v = np.asarray(values)
    idx = [k for k in range(1, len(v) - 1) if v[k] >= v[k - 1] and v[k] > v[k + 1]]
    idx.sort(key=lambda k: -v[k])
    if count is not None:
        idx = idx[:count]
    return np.asarray(angles)[idx]
