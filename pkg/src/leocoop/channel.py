"""
Satellite-to-GU downlink channel: large-scale loss, GU antenna pattern,
Loo small-scale fading and sub-array steering vectors.

The GU-side antenna gain depends on where the GU antenna is pointed, which
is only decided during scheduling.  ``ChannelSet`` therefore stores the
pointing-independent amplitude ``xi = sqrt(G_S) * 10**(-PL/20)`` and a
precomputed table of GU gains for every (boresight, satellite) pair; the
metrics code combines the two.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special

from .geometry import GroundUser, LookGeometry, SatelliteState, VisibilityMap, look_angles

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299_792_458.0  # m/s
BOLTZMANN = 1.380649e-23  # J/K
HALF_POWER_U = 2.07123


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class LinkBudgetParams:
    carrier_ghz: float = 20.0
    bandwidth_hz: float = 400e6
    sat_gain_dbi: float = 21.5
    noise_temp_dbk: float = 24.0
    shadow_std_db: float = 1.2
    gas_zenith_db: float = 0.5
    scint_std_db: float = 0.1
    elevation_floor_deg: float = 5.0

    def __post_init__(self):
        if self.carrier_ghz <= 0 or self.bandwidth_hz <= 0:
            raise ValueError("carrier frequency and bandwidth must be positive")
        if min(self.shadow_std_db, self.gas_zenith_db, self.scint_std_db) < 0:
            raise ValueError("loss parameters must be non-negative")
        if not 0 < self.elevation_floor_deg <= 90:
            raise ValueError("elevation floor must be in (0, 90]")


@dataclass(frozen=True)
class FadingParams:
    """Loo GOOD-state parameters.

    The direct-path amplitude is log-normal: its dB value is Gaussian with
    ``direct_mean_db`` / ``direct_std_db``.  ``multipath_power`` is the total
    linear mean power of the diffuse part, split evenly over all rays.
    """

    n_clusters: int = 2
    n_rays: int = 10
    direct_mean_db: float = -0.5
    direct_std_db: float = 1.0
    multipath_power: float = 0.01
    angular_spread_deg: float = 1.0

    def __post_init__(self):
        if self.n_clusters < 0:
            raise ValueError("n_clusters must be >= 0")
        if self.n_clusters > 0 and self.n_rays < 1:
            raise ValueError("n_rays must be >= 1 when clusters are present")
        if self.multipath_power < 0 or self.direct_std_db < 0 or self.angular_spread_deg < 0:
            raise ValueError("fading spreads and powers must be non-negative")

    @property
    def n_paths(self) -> int:
        return self.n_clusters * self.n_rays

    @property
    def direct_mean_power(self) -> float:
        # E[10**(A/10)] for A ~ N(mean, std) in dB
        k = math.log(10.0) / 10.0
        return math.exp(k * self.direct_mean_db + 0.5 * (k * self.direct_std_db) ** 2)

    @property
    def normalization(self) -> float:
        diffuse = self.multipath_power if self.n_paths else 0.0
        return 1.0 / math.sqrt(self.direct_mean_power + diffuse)


@dataclass(frozen=True)
class SmallScaleChannel:
    h: np.ndarray
    seed: int | None = None


@dataclass(frozen=True)
class PathLoss:
    total_db: float
    fspl_db: float
    shadow_db: float
    gas_db: float
    scint_db: float
    elevation_clamped: bool = False

    def __float__(self):
        return self.total_db


@dataclass
class ChannelSet:
    """Channels of every visible (satellite, GU) pair for one time sample.

    Arrays are indexed ``[s, g]`` by position in ``sat_ids`` / ``gu_ids``.
    ``h_small`` is zero and ``xi`` is zero where the pair is not visible.
    ``gu_gain[g, b, s]`` is the linear GU antenna gain towards satellite
    ``s`` when the antenna is pointed at satellite ``b``.
    """

    sat_ids: list[int]
    gu_ids: list[int]
    visible: np.ndarray  # (S, G) bool
    h_small: np.ndarray  # (S, G, N) complex
    xi: np.ndarray  # (S, G)
    gu_gain: np.ndarray  # (G, S, S)
    off_boresight_deg: np.ndarray  # (G, S, S), nan where undefined
    noise_power: float
    geometry: dict = field(default_factory=dict, repr=False)  # (s, g) -> LookGeometry
    seeds: dict = field(default_factory=dict, repr=False)
    clamped: set = field(default_factory=set, repr=False)

    @property
    def n_sats(self) -> int:
        return len(self.sat_ids)

    @property
    def n_gus(self) -> int:
        return len(self.gu_ids)

    @property
    def n_elements(self) -> int:
        return self.h_small.shape[2]

    @property
    def scaled(self) -> np.ndarray:
        """``xi * h_small``: the channel without GU antenna gain."""
        return self.xi[:, :, None] * self.h_small

    def visible_sats(self, g: int) -> np.ndarray:
        return np.flatnonzero(self.visible[:, g])


def fspl(d_km: float, carrier_ghz: float) -> float:
    """Free-space path loss in dB."""
    if d_km <= 0:
        raise ValueError("distance must be positive")
    lam = SPEED_OF_LIGHT / (carrier_ghz * 1e9)
    return 20.0 * math.log10(4.0 * math.pi * d_km * 1e3 / lam)


def path_loss(geom: LookGeometry, params: LinkBudgetParams, rng: np.random.Generator | None = None) -> PathLoss:
    """FSPL + shadow fading + cosecant-law gas loss + tropospheric scintillation.

    Clutter loss is zero (line of sight).  Elevations below the configured
    floor are clamped there and flagged.
    """
    if geom.elevation_deg < 0:
        raise ValueError("satellite below the horizon")
    el = geom.elevation_deg
    clamped = el < params.elevation_floor_deg
    if clamped:
        logger.warning("elevation %.2f deg clamped to %.2f deg for gas loss", el, params.elevation_floor_deg)
        el = params.elevation_floor_deg
    base = fspl(geom.range_km, params.carrier_ghz)
    gas = params.gas_zenith_db / math.sin(math.radians(el))
    sf = scint = 0.0
    if rng is not None:
        sf = params.shadow_std_db * rng.standard_normal() if params.shadow_std_db else 0.0
        scint = params.scint_std_db * rng.standard_normal() if params.scint_std_db else 0.0
    return PathLoss(base + sf + gas + scint, base, sf, gas, scint, clamped)


def bessel_j(order: int, x):
    """Bessel function of the first kind, orders 1 and 3."""
    if order not in (1, 3):
        raise ValueError("only orders 1 and 3 are used by the GU antenna pattern")
    return special.jv(order, x)


def _pattern_factor(u: np.ndarray) -> np.ndarray:
    """J1(u)/(2u) + 36 J3(u)/u^3, with the removable singularity at u = 0."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = np.abs(u) < 1e-3
    us = u[small]
    # Taylor expansion: 1 - 5u^2/64 + 19u^4/7680 + O(u^6)
    out[small] = 1.0 - 5.0 * us**2 / 64.0 + 19.0 * us**4 / 7680.0
    ul = u[~small]
    out[~small] = bessel_j(1, ul) / (2.0 * ul) + 36.0 * bessel_j(3, ul) / ul**3
    return out


def gu_antenna_gain(gamma_deg, gamma_3db_deg: float, max_gain_dbi: float):
    """Linear GU antenna gain at off-boresight angle ``gamma_deg``."""
    if gamma_3db_deg <= 0:
        raise ValueError("gamma_3dB must be positive")
    u = HALF_POWER_U * np.sin(np.radians(gamma_deg)) / math.sin(math.radians(gamma_3db_deg))
    gain = float(db_to_linear(max_gain_dbi)) * _pattern_factor(np.atleast_1d(u)) ** 2
    return gain if np.ndim(gamma_deg) else float(gain[0])


def steering_vector(phi: float, theta: float, n_x: int, n_y: int) -> np.ndarray:
    """Half-wavelength UPA response, element index ``p * n_y + q``."""
    if n_x < 1 or n_y < 1:
        raise ValueError("array dimensions must be >= 1")
    cx = math.cos(theta) * math.cos(phi)
    cy = math.cos(theta) * math.sin(phi)
    p = np.arange(n_x)[:, None]
    q = np.arange(n_y)[None, :]
    return (np.exp(-1j * math.pi * (p * cx + q * cy)) / math.sqrt(n_x * n_y)).ravel()


def _steering_batch(phi: np.ndarray, theta: np.ndarray, n_x: int, n_y: int) -> np.ndarray:
    cx = np.cos(theta) * np.cos(phi)
    cy = np.cos(theta) * np.sin(phi)
    p = np.repeat(np.arange(n_x), n_y)
    q = np.tile(np.arange(n_y), n_x)
    return np.exp(-1j * math.pi * (np.outer(cx, p) + np.outer(cy, q))) / math.sqrt(n_x * n_y)


def loo_fading(params: FadingParams, geom: LookGeometry, n_x: int, n_y: int,
               rng: np.random.Generator, seed: int | None = None) -> SmallScaleChannel:
    """One Loo GOOD-state realization of the small-scale channel vector."""
    amp_db = params.direct_mean_db + params.direct_std_db * rng.standard_normal()
    m0 = 10.0 ** (amp_db / 20.0) * np.exp(2j * math.pi * rng.random())
    h = m0 * steering_vector(geom.sat_azimuth, geom.sat_elevation, n_x, n_y)
    if params.n_paths:
        spread = math.radians(params.angular_spread_deg)
        n_cl, n_ray = params.n_clusters, params.n_rays
        # cluster centres around the direct path, rays spread within each cluster
        cl_phi = spread * rng.standard_normal(n_cl)
        cl_theta = spread * rng.standard_normal(n_cl)
        phi = geom.sat_azimuth + np.repeat(cl_phi, n_ray) + 0.25 * spread * rng.standard_normal(n_cl * n_ray)
        theta = geom.sat_elevation + np.repeat(cl_theta, n_ray) + 0.25 * spread * rng.standard_normal(n_cl * n_ray)
        ray_power = params.multipath_power / params.n_paths
        # complex Gaussian => Rayleigh amplitude, uniform phase
        amp = rng.rayleigh(math.sqrt(ray_power / 2.0), size=params.n_paths)
        m = amp * np.exp(2j * math.pi * rng.random(params.n_paths))
        h = h + m @ _steering_batch(phi, theta, n_x, n_y)
    return SmallScaleChannel(params.normalization * h, seed)


def noise_power(params: LinkBudgetParams) -> float:
    """Thermal noise power k_B * T * B in watts."""
    return BOLTZMANN * float(db_to_linear(params.noise_temp_dbk)) * params.bandwidth_hz


def pair_seed(master_seed: int, sat_id: int, gu_id: int, sample: int = 0) -> np.random.SeedSequence:
    """Order-independent per-pair seed derivation."""
    return np.random.SeedSequence([int(master_seed), int(sample), int(sat_id), int(gu_id)])


def off_boresight_angles(directions: np.ndarray, visible: np.ndarray) -> np.ndarray:
    """Angle at each GU between pairs of visible satellites.

    ``directions`` has shape (S, G, 3) with unit GU->satellite vectors.
    Returns (G, S, S) degrees, nan where either satellite is not visible.
    """
    cosang = np.einsum("sgk,bgk->gbs", directions, directions)
    ang = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))
    both = visible.T[:, :, None] & visible.T[:, None, :]
    return np.where(both, ang, np.nan)


def assemble_channels(states: Sequence[SatelliteState], gus: Sequence[GroundUser], vis: VisibilityMap,
                      link: LinkBudgetParams, fading: FadingParams, n_x: int, n_y: int,
                      seed: int, sample: int = 0) -> ChannelSet:
    """Channels for all visible pairs; each pair draws from its own seed."""
    by_id = {s.sat_id: s for s in states}
    n_s, n_g, n = len(vis.sat_ids), len(gus), n_x * n_y
    h_small = np.zeros((n_s, n_g, n), dtype=complex)
    xi = np.zeros((n_s, n_g))
    dirs = np.zeros((n_s, n_g, 3))
    geometry, seeds, clamped = {}, {}, set()
    sat_gain = float(db_to_linear(link.sat_gain_dbi))
    for si, sid in enumerate(vis.sat_ids):
        sat = by_id[sid]
        for gi, gu in enumerate(gus):
            if not vis.mask[si, gi]:
                continue
            geom = look_angles(sat, gu)
            ss = pair_seed(seed, sid, gu.gu_id, sample)
            rng = np.random.default_rng(ss)
            pl = path_loss(geom, link, rng)
            if pl.elevation_clamped:
                clamped.add((si, gi))
            small = loo_fading(fading, geom, n_x, n_y, rng, seed=int(ss.generate_state(1)[0]))
            h_small[si, gi] = small.h
            xi[si, gi] = math.sqrt(sat_gain) * 10.0 ** (-pl.total_db / 20.0)
            dirs[si, gi] = geom.direction
            geometry[(si, gi)] = geom
            seeds[(si, gi)] = small.seed
    angles = off_boresight_angles(dirs, vis.mask)
    gains = np.zeros_like(angles)
    for gi, gu in enumerate(gus):
        ok = ~np.isnan(angles[gi])
        if ok.any():
            gains[gi][ok] = gu_antenna_gain(angles[gi][ok], gu.gamma_3db_deg, gu.max_gain_dbi)
    return ChannelSet(
        sat_ids=list(vis.sat_ids), gu_ids=[g.gu_id for g in gus], visible=vis.mask.copy(),
        h_small=h_small, xi=xi, gu_gain=gains, off_boresight_deg=angles,
        noise_power=noise_power(link), geometry=geometry, seeds=seeds, clamped=clamped,
    )
