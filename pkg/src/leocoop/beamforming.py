"""
Hybrid analog/digital beamforming for one satellite.

The analog stage picks the K strongest codewords of a 2-D DFT codebook,
combines them with least-squares weights and projects the result onto the
equal-amplitude (phase-only) set.  The digital stage is a regularized
zero-forcing precoder on the generalized channel ``H_s @ F_A``, followed by
a per-satellite scaling that puts the satellite at full power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_K = 4


class SingularChannelError(np.linalg.LinAlgError):
    """Raised when an unregularized ZF inversion is singular."""


class NoBeamsError(ValueError):
    """Raised when power scaling is asked to normalize an all-zero precoder."""


@dataclass(frozen=True)
class Codebook:
    matrix: np.ndarray  # (N, N); column k = kx * n_y + ky
    sin_x: np.ndarray  # grid of sin(phi) along x, per codeword
    sin_y: np.ndarray
    n_x: int
    n_y: int

    @property
    def size(self) -> int:
        return self.matrix.shape[1]


@dataclass
class AnalogReport:
    indices: np.ndarray
    coefficients: np.ndarray
    weights: np.ndarray  # w_A, length N
    zero_entries: int = 0  # entries whose phase was undefined and set to 0

    @property
    def flagged(self) -> bool:
        return self.zero_entries > 0


@dataclass
class SatelliteBeams:
    """Beamformer of one satellite; columns follow ``gus`` (sorted GU indices)."""

    gus: list[int]
    analog: np.ndarray  # F_A, (N, k)
    digital: np.ndarray | None  # unscaled F_D, (k, k); None for analog-only
    hybrid: np.ndarray  # final scaled precoder, (N, k)
    eta: float = 0.0
    beta: float = 0.0


@dataclass
class BeamformerSet:
    by_sat: dict[int, SatelliteBeams] = field(default_factory=dict)
    m_r: int = 0
    m_hy: int = 0

    def power(self, s: int) -> float:
        b = self.by_sat.get(s)
        return 0.0 if b is None else float(np.sum(np.abs(b.hybrid) ** 2))


def dft_matrix_1d(n: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(n)
    sin_grid = 1.0 - 2.0 * k / n
    rows = np.arange(n)[:, None]
    return np.exp(1j * math.pi * rows * sin_grid[None, :]) / math.sqrt(n), sin_grid


def dft_codebook(n_x: int, n_y: int) -> Codebook:
    if n_x < 1 or n_y < 1:
        raise ValueError("codebook dimensions must be >= 1")
    dx, sx = dft_matrix_1d(n_x)
    dy, sy = dft_matrix_1d(n_y)
    return Codebook(np.kron(dx, dy), np.repeat(sx, n_y), np.tile(sy, n_x), n_x, n_y)


def analog_beamform(h: np.ndarray, codebook: Codebook, k: int = DEFAULT_K) -> AnalogReport:
    """Codebook-based phase-only beam for channel ``h``.

    Codewords are ranked by ``|h^H c|^2``; equal scores go to the lower index.
    """
    d = codebook.matrix
    n = d.shape[0]
    if not 1 <= k <= codebook.size:
        raise ValueError(f"K must be in [1, {codebook.size}], got {k}")
    if not np.any(h):
        raise ValueError("channel vector is zero")
    score = np.abs(h.conj() @ d) ** 2
    idx = np.argsort(-score, kind="stable")[:k]
    d_k = d[:, idx]
    x_hat = np.linalg.pinv(d_k) @ h
    w = d_k @ x_hat
    mag = np.abs(w)
    # relative threshold: exact zeros only arise from cancellation
    zero = mag <= 1e-14 * max(float(mag.max()), 1e-300)
    phase = np.where(zero, 1.0 + 0j, w / np.where(zero, 1.0, mag))
    return AnalogReport(idx, x_hat, phase / math.sqrt(n), int(zero.sum()))


def analog_weights(h_small: np.ndarray, visible: np.ndarray, codebook: Codebook,
                   k: int = DEFAULT_K) -> np.ndarray:
    """Analog vectors for every visible (s, g) pair, shape (S, G, N)."""
    out = np.zeros_like(h_small)
    for s, g in zip(*np.nonzero(visible)):
        out[s, g] = analog_beamform(h_small[s, g], codebook, k).weights
    return out


def regularized_zf(h_tilde: np.ndarray, beta: float) -> np.ndarray:
    """Unscaled regularized ZF: ``H~^H (H~ H~^H + beta I)^-1``."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    h_tilde = np.atleast_2d(h_tilde)
    m = h_tilde @ h_tilde.conj().T + beta * np.eye(h_tilde.shape[0])
    if beta == 0 and np.linalg.cond(m) > 1.0 / np.finfo(float).eps:
        raise SingularChannelError("H~ H~^H is singular and beta = 0")
    try:
        # F = H^H M^-1  <=>  F^T = M^-T conj(H)
        return np.linalg.solve(m.T, h_tilde.conj()).T
    except np.linalg.LinAlgError as exc:
        raise SingularChannelError(str(exc)) from exc


def beta_opt(n_served: int, sigma2: float, p_total: float) -> float:
    """Large-system optimal regularizer ``N_u^s sigma^2 / P_T``."""
    if p_total <= 0:
        raise ValueError("P_T must be positive")
    return n_served * sigma2 / p_total


def power_scale(f_analog: np.ndarray, f_digital: np.ndarray, p_total: float) -> tuple[float, np.ndarray]:
    """Return ``(eta, sqrt(eta) F_A F_D)`` with squared Frobenius norm ``p_total``."""
    prod = f_analog @ f_digital
    norm2 = float(np.sum(np.abs(prod) ** 2))
    if norm2 == 0.0:
        raise NoBeamsError("precoder is identically zero")
    eta = p_total / norm2
    return eta, math.sqrt(eta) * prod


def analog_only_scale(f_analog: np.ndarray, p_total: float) -> np.ndarray:
    norm2 = float(np.sum(np.abs(f_analog) ** 2))
    if norm2 == 0.0:
        raise NoBeamsError("precoder is identically zero")
    return math.sqrt(p_total / norm2) * f_analog


def hybrid_beams(channels: np.ndarray, f_analog: np.ndarray, sigma2: float, p_total: float,
                 beta: float | None = None) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Digital stage for one satellite.

    ``channels`` holds the effective channel vectors of the served GUs as
    rows (k, N); ``f_analog`` is (N, k).  Returns ``(F_D, F_HY, eta, beta)``.
    """
    k = channels.shape[0]
    if beta is None:
        beta = beta_opt(k, sigma2, p_total)
    h_tilde = channels.conj() @ f_analog
    f_d = regularized_zf(h_tilde, beta)
    eta, f_hy = power_scale(f_analog, f_d, p_total)
    return f_d, f_hy, eta, beta
