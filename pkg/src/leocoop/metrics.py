"""
Per-GU SINR and spectral efficiency of the cooperative downlink.

Signals from all serving satellites of a GU add coherently; each other GU's
stream adds coherently over the satellites visible to the receiver and the
streams then add in power.  The GU antenna gain towards satellite ``s`` is
taken with the antenna pointed at the GU's boresight satellite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .beamforming import BeamformerSet
from .channel import ChannelSet


@dataclass
class LinkMatrix:
    """Binary links ``alpha[s, g]`` plus each GU's boresight satellite (-1: none)."""

    alpha: np.ndarray
    boresight: np.ndarray

    @classmethod
    def empty(cls, n_sats: int, n_gus: int) -> "LinkMatrix":
        return cls(np.zeros((n_sats, n_gus), dtype=bool), np.full(n_gus, -1, dtype=int))

    def copy(self) -> "LinkMatrix":
        return LinkMatrix(self.alpha.copy(), self.boresight.copy())

    def add(self, s: int, g: int) -> None:
        if self.alpha[s, g]:
            raise ValueError(f"link ({s}, {g}) already present")
        self.alpha[s, g] = True
        if self.boresight[g] < 0:
            self.boresight[g] = s

    def served_by(self, s: int) -> list[int]:
        return [int(g) for g in np.flatnonzero(self.alpha[s])]

    def load(self) -> np.ndarray:
        return self.alpha.sum(axis=1)

    def pairs(self) -> list[tuple[int, int]]:
        return [(int(s), int(g)) for s, g in zip(*np.nonzero(self.alpha))]

    def validate(self, visible: np.ndarray, n_beams: int) -> None:
        """Raise ``ValueError`` if any of the link constraints is broken."""
        if np.any(self.alpha & ~visible):
            raise ValueError("link to a non-visible satellite")
        if np.any(self.load() > n_beams):
            raise ValueError("satellite beam budget exceeded")
        for g in range(self.alpha.shape[1]):
            b = self.boresight[g]
            linked = self.alpha[:, g].any()
            if linked and (b < 0 or not self.alpha[b, g]):
                raise ValueError(f"GU {g} boresight {b} is not one of its links")
            if not linked and b >= 0:
                raise ValueError(f"unserved GU {g} has a boresight")


@dataclass
class SEReport:
    sinr: np.ndarray
    se: np.ndarray
    served: np.ndarray

    @property
    def total(self) -> float:
        return float(self.se[self.served].sum())


@dataclass
class Counter:
    """Evaluation counters, owned by one scheduling run."""

    m_r: int = 0
    m_hy: int = 0
    extra: dict = field(default_factory=dict)


def effective_gain(ch: ChannelSet, g: int, s: int, boresight: int | None = None) -> float:
    """Linear GU gain towards ``s`` with the antenna aimed at ``boresight``.

    A GU without a boresight is treated as aiming at ``s``.
    """
    if boresight is None or boresight < 0:
        boresight = s
    return float(ch.gu_gain[g, boresight, s])


def spectral_efficiency(gamma):
    """Shannon SE in bit/s/Hz."""
    return np.log2(1.0 + np.asarray(gamma, dtype=float)) if np.ndim(gamma) else math.log2(1.0 + gamma)


def _beam(bf: BeamformerSet, s: int, g: int) -> np.ndarray | None:
    b = bf.by_sat.get(s)
    if b is None or g not in b.gus:
        return None
    return b.hybrid[:, b.gus.index(g)]


def sinr(g: int, links: LinkMatrix, ch: ChannelSet, bf: BeamformerSet) -> float:
    """SINR of GU ``g``, evaluated term by term."""
    if not links.alpha[:, g].any():
        return 0.0
    vis = ch.visible_sats(g)
    b = links.boresight[g]

    def coupling(s: int, target: int) -> complex:
        w = _beam(bf, s, target)
        if w is None or not links.alpha[s, target]:
            return 0j
        h = math.sqrt(effective_gain(ch, g, s, b)) * ch.xi[s, g] * ch.h_small[s, g]
        return complex(np.vdot(h, w))

    signal = abs(sum(coupling(s, g) for s in vis)) ** 2
    interference = 0.0
    for gp in range(ch.n_gus):
        if gp != g:
            interference += abs(sum(coupling(s, gp) for s in vis)) ** 2
    return signal / (interference + ch.noise_power)


def coupling_matrix(links: LinkMatrix, ch: ChannelSet, bf: BeamformerSet) -> np.ndarray:
    """``A[g, g']``: received amplitude at GU g of the stream intended for g'."""
    n_g = ch.n_gus
    a = np.zeros((n_g, n_g), dtype=complex)
    scaled = ch.scaled
    served = links.boresight >= 0
    bs = np.where(served, links.boresight, 0)
    for s, beams in bf.by_sat.items():
        if not beams.gus:
            continue
        cols = np.asarray(beams.gus)
        mask = links.alpha[s, cols]
        y = scaled[s].conj() @ beams.hybrid  # (G, k)
        amp = np.sqrt(ch.gu_gain[np.arange(n_g), bs, s]) * ch.visible[s] * served
        a[:, cols[mask]] += (amp[:, None] * y)[:, mask]
    return a


def sinr_from_coupling(a: np.ndarray, served: np.ndarray, noise: float) -> np.ndarray:
    p = np.abs(a) ** 2
    sig = np.diag(p).copy()
    intf = p.sum(axis=1) - sig
    return np.where(served, sig / (intf + noise), 0.0)


def total_se(links: LinkMatrix, ch: ChannelSet, bf: BeamformerSet, counter: Counter | None = None) -> SEReport:
    """Network SE for the given links and beamformers."""
    if counter is not None:
        counter.m_r += 1
    served = links.alpha.any(axis=0)
    gamma = sinr_from_coupling(coupling_matrix(links, ch, bf), served, ch.noise_power)
    return SEReport(gamma, spectral_efficiency(gamma), served)
