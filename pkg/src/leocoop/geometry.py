"""
Walker delta constellations, circular-orbit propagation over a rotating
spherical Earth, and satellite/ground-user look geometry.

Frames
------
All Cartesian vectors are Earth-fixed (ECEF-like, spherical Earth), in km.
The inertial and Earth-fixed frames coincide at t = 0.

The satellite antenna frame is nadir-pointing: z points at the Earth
centre, x is the direction of motion projected orthogonal to z, and
y = z cross x completes a right-handed triad.  For a ground direction with
unit components (dx, dy, dz) in that frame, the steering angles are
phi = atan2(dy, dx) and theta = asin(dz), so that
dx = cos(theta) cos(phi) and dy = cos(theta) sin(phi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

R_EARTH_KM = 6371.0
MU_EARTH = 398600.4418  # km^3 / s^2
OMEGA_EARTH = 7.2921159e-5  # rad / s


@dataclass(frozen=True)
class ConstellationConfig:
    """Walker delta T/P/F constellation."""

    total_sats: int
    planes: int
    phasing: int
    inclination_deg: float
    altitude_km: float = 1200.0
    epoch_s: float = 0.0

    def __post_init__(self):
        if self.planes < 1:
            raise ValueError(f"planes must be >= 1, got {self.planes}")
        if self.total_sats < 1 or self.total_sats % self.planes != 0:
            raise ValueError(
                f"total_sats ({self.total_sats}) must be a positive multiple of planes ({self.planes})"
            )
        if self.phasing < 0:
            raise ValueError(f"phasing must be >= 0, got {self.phasing}")
        if self.altitude_km <= 0:
            raise ValueError(f"altitude must be positive, got {self.altitude_km}")
        if not 0.0 <= self.inclination_deg <= 180.0:
            raise ValueError(f"inclination out of [0, 180]: {self.inclination_deg}")

    @classmethod
    def from_notation(cls, tpf: str, inclination_deg: float, altitude_km: float = 1200.0,
                      epoch_s: float = 0.0) -> "ConstellationConfig":
        """Parse ``"48/6/1"`` style notation."""
        try:
            t, p, f = (int(x) for x in tpf.split("/"))
        except ValueError as exc:
            raise ValueError(f"expected T/P/F, got {tpf!r}") from exc
        return cls(t, p, f, inclination_deg, altitude_km, epoch_s)

    @property
    def sats_per_plane(self) -> int:
        return self.total_sats // self.planes

    @property
    def notation(self) -> str:
        return f"{self.total_sats}/{self.planes}/{self.phasing}"


@dataclass(frozen=True)
class OrbitalElements:
    """Circular orbit. Angles in radians, semi-major axis in km."""

    sat_id: int
    plane: int
    raan: float
    inclination: float
    phase_at_epoch: float
    semi_major_axis: float
    epoch_s: float = 0.0

    def __post_init__(self):
        if self.semi_major_axis <= R_EARTH_KM:
            raise ValueError("semi-major axis must exceed the Earth radius")

    @property
    def mean_motion(self) -> float:
        return math.sqrt(MU_EARTH / self.semi_major_axis**3)

    @property
    def period_s(self) -> float:
        return 2.0 * math.pi / self.mean_motion


@dataclass(frozen=True)
class SatelliteState:
    sat_id: int
    position: np.ndarray  # Earth-fixed, km
    velocity: np.ndarray  # inertial velocity expressed in Earth-fixed axes, km/s
    time_s: float = 0.0


@dataclass(frozen=True)
class GroundUser:
    gu_id: int
    latitude_deg: float
    longitude_deg: float
    altitude_km: float = 0.0
    max_gain_dbi: float = 40.0
    gamma_3db_deg: float = 0.85

    def __post_init__(self):
        if abs(self.latitude_deg) > 90.0:
            raise ValueError(f"latitude out of range: {self.latitude_deg}")
        if self.gamma_3db_deg <= 0:
            raise ValueError("gamma_3dB must be positive")

    @property
    def position(self) -> np.ndarray:
        return geodetic_to_ecef(self.latitude_deg, self.longitude_deg, self.altitude_km)


@dataclass(frozen=True)
class LookGeometry:
    elevation_deg: float
    azimuth_deg: float
    range_km: float
    sat_azimuth: float  # phi_sg, rad
    sat_elevation: float  # theta_sg, rad
    direction: np.ndarray = field(repr=False)  # unit vector GU -> satellite, Earth-fixed


@dataclass
class VisibilityMap:
    """Visible-satellite sets per GU and candidate GU sets per satellite.

    ``sat_ids`` lists only satellites visible to at least one GU; matrix rows
    follow that order.
    """

    sat_ids: list[int]
    gu_ids: list[int]
    mask: np.ndarray  # (n_sats, n_gus) bool
    elevation_deg: np.ndarray  # (n_sats, n_gus)

    def visible_sats(self, g: int) -> list[int]:
        return [self.sat_ids[i] for i in np.flatnonzero(self.mask[:, g])]

    def candidate_gus(self, sat_id: int) -> list[int]:
        row = self.sat_ids.index(sat_id)
        return [self.gu_ids[j] for j in np.flatnonzero(self.mask[row, :])]


def generate_walker(config: ConstellationConfig) -> list[OrbitalElements]:
    """Orbital elements for every satellite of a Walker delta constellation.

    Satellite ids run plane-major: ``id = plane * (T/P) + slot``.
    """
    t, p, f = config.total_sats, config.planes, config.phasing
    spp = config.sats_per_plane
    a = R_EARTH_KM + config.altitude_km
    inc = math.radians(config.inclination_deg)
    elements = []
    for i in range(p):
        raan = 2.0 * math.pi * i / p
        for j in range(spp):
            phase = (2.0 * math.pi * j / spp + 2.0 * math.pi * f * i / t) % (2.0 * math.pi)
            elements.append(OrbitalElements(i * spp + j, i, raan, inc, phase, a, config.epoch_s))
    return elements


def _rot_z(v: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]])


def propagate(elements: OrbitalElements, t: float) -> SatelliteState:
    """Satellite state ``t`` seconds after the epoch.

    Phases are referenced to the frame-alignment instant; the epoch offset
    advances both the orbit and the Earth's rotation.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    a = elements.semi_major_axis
    n = elements.mean_motion
    t_abs = t + elements.epoch_s
    u = elements.phase_at_epoch + n * t_abs  # argument of latitude
    cu, su = math.cos(u), math.sin(u)
    ci, si = math.cos(elements.inclination), math.sin(elements.inclination)
    co, so = math.cos(elements.raan), math.sin(elements.raan)
    r_eci = a * np.array([cu * co - su * ci * so, cu * so + su * ci * co, su * si])
    v_eci = a * n * np.array([-su * co - cu * ci * so, -su * so + cu * ci * co, cu * si])
    theta_g = OMEGA_EARTH * t_abs
    return SatelliteState(elements.sat_id, _rot_z(r_eci, -theta_g), _rot_z(v_eci, -theta_g), t)


def propagate_all(elements: Sequence[OrbitalElements], t: float) -> list[SatelliteState]:
    return [propagate(e, t) for e in elements]


def geodetic_to_ecef(lat_deg: float, lon_deg: float, alt_km: float = 0.0) -> np.ndarray:
    """Spherical-Earth conversion; returns km."""
    if abs(lat_deg) > 90.0:
        raise ValueError(f"latitude out of range: {lat_deg}")
    lat, lon = math.radians(lat_deg), math.radians(lon_deg)
    r = R_EARTH_KM + alt_km
    return r * np.array([math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)])


def satellite_frame(state: SatelliteState) -> np.ndarray:
    """Rows are the x, y, z axes of the nadir-pointing antenna frame."""
    z = -state.position / np.linalg.norm(state.position)
    x = state.velocity - np.dot(state.velocity, z) * z
    x /= np.linalg.norm(x)
    y = np.cross(z, x)
    return np.vstack([x, y, z])


def look_angles(sat: SatelliteState, gu: GroundUser) -> LookGeometry:
    lat, lon = math.radians(gu.latitude_deg), math.radians(gu.longitude_deg)
    p_gu = gu.position
    los = sat.position - p_gu
    rng = float(np.linalg.norm(los))
    d = los / rng
    up = np.array([math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)])
    east = np.array([-math.sin(lon), math.cos(lon), 0.0])
    north = np.cross(up, east)
    el = math.degrees(math.asin(np.clip(np.dot(d, up), -1.0, 1.0)))
    az = math.degrees(math.atan2(np.dot(d, east), np.dot(d, north))) % 360.0

    dx, dy, dz = satellite_frame(sat) @ (-d)
    phi = math.atan2(dy, dx)
    theta = math.asin(float(np.clip(dz, -1.0, 1.0)))
    return LookGeometry(el, az, rng, phi, theta, d)


def coverage_angle(altitude_km: float, theta_min_deg: float) -> float:
    """Earth-central coverage half-angle (degrees) for a minimum elevation."""
    if altitude_km <= 0:
        raise ValueError("altitude must be positive")
    th = math.radians(theta_min_deg)
    ratio = R_EARTH_KM / (R_EARTH_KM + altitude_km)
    return math.degrees(math.acos(ratio * math.cos(th)) - th)


def elevation_matrix(states: Sequence[SatelliteState], gus: Sequence[GroundUser]) -> np.ndarray:
    """Elevation (deg) of every satellite seen from every GU, shape (n_sats, n_gus)."""
    if not states or not gus:
        return np.zeros((len(states), len(gus)))
    sat_pos = np.array([s.position for s in states])
    gu_pos = np.array([g.position for g in gus])
    up = gu_pos / np.linalg.norm(gu_pos, axis=1, keepdims=True)
    los = sat_pos[:, None, :] - gu_pos[None, :, :]
    los /= np.linalg.norm(los, axis=2, keepdims=True)
    sin_el = np.einsum("sgk,gk->sg", los, up)
    return np.degrees(np.arcsin(np.clip(sin_el, -1.0, 1.0)))


def visibility(states: Sequence[SatelliteState], gus: Sequence[GroundUser],
               theta_min_deg: float = 10.0) -> VisibilityMap:
    """Visible sets with a closed threshold (elevation >= theta_min).

    Satellites visible to no GU are dropped.
    """
    el = elevation_matrix(states, gus)
    mask = el >= theta_min_deg
    keep = np.flatnonzero(mask.any(axis=1)) if len(gus) else np.array([], dtype=int)
    return VisibilityMap(
        sat_ids=[states[i].sat_id for i in keep],
        gu_ids=[g.gu_id for g in gus],
        mask=mask[keep],
        elevation_deg=el[keep],
    )


def great_circle_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Haversine distance on the spherical Earth."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp, dl = p2 - p1, math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2.0 * R_EARTH_KM * math.asin(min(1.0, math.sqrt(a)))
