"""
Scenario construction, time-sampled runs, sweeps and result files.

A scenario file is TOML with the sections ``[constellation]``, ``[gus]``,
``[array]``, ``[link_budget]``, ``[fading]``, ``[schemes]`` and ``[time]``
plus a top-level ``seed``.  Every key is optional; defaults follow the
reference system (1200 km, 8x8-element sub-arrays, 8x4 sub-arrays,
80 GUs between 0 and 54 deg N, 20 GHz, 400 MHz, 80 W per satellite).
See ``README.md`` for the full schema.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .channel import ChannelSet, FadingParams, LinkBudgetParams, assemble_channels
from .geometry import (
    R_EARTH_KM,
    ConstellationConfig,
    GroundUser,
    OrbitalElements,
    SatelliteState,
    generate_walker,
    great_circle_km,
    propagate_all,
    visibility,
)
from .scheduling import (
    ORACLE_CAP,
    SCHEMES,
    HybridPolicy,
    SchemeConfig,
    SchemeResult,
    analog_for,
    exhaustive_oracle,
    run_scheme,
)

logger = logging.getLogger(__name__)

REFERENCE_HPBW_DEG = 1.7
REFERENCE_GMAX_DBI = 40.0


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario configuration."""


@dataclass
class GUSource:
    mode: str = "synthetic"  # synthetic | explicit | csv
    count: int = 80
    lat_min: float = 0.0
    lat_max: float = 54.0
    lon_min: float = 73.0
    lon_max: float = 148.0
    min_separation_km: float = 0.0
    seed: int | None = None
    users: list[dict] = field(default_factory=list)
    path: str | None = None


@dataclass
class ScenarioConfig:
    constellation: ConstellationConfig = field(
        default_factory=lambda: ConstellationConfig(48, 6, 1, 45.0, 1200.0))
    gus: GUSource = field(default_factory=GUSource)
    link: LinkBudgetParams = field(default_factory=LinkBudgetParams)
    fading: FadingParams = field(default_factory=FadingParams)
    n_x: int = 8
    n_y: int = 8
    n_sub_x: int = 8
    n_sub_y: int = 4
    k_codewords: int = 4
    p_total: float = 80.0
    beta: float | None = None
    theta_min_deg: float = 10.0
    samples: int = 24
    spacing_s: float = 3600.0
    schemes: tuple[str, ...] = SCHEMES
    seed: int = 0
    max_gain_dbi: float = REFERENCE_GMAX_DBI
    hpbw_deg: float = REFERENCE_HPBW_DEG

    def __post_init__(self):
        bad = [s for s in self.schemes if s not in SCHEMES]
        if bad:
            raise ScenarioError(f"unknown schemes {bad}; expected a subset of {SCHEMES}")
        if self.samples < 1 or self.spacing_s < 0:
            raise ScenarioError("need at least one time sample and a non-negative spacing")
        if self.hpbw_deg <= 0:
            raise ScenarioError("HPBW must be positive")
        if self.gus.lat_min > self.gus.lat_max or self.gus.lon_min > self.gus.lon_max:
            raise ScenarioError("empty GU placement window")

    @property
    def n_beams(self) -> int:
        return self.n_sub_x * self.n_sub_y

    def scheme_config(self) -> SchemeConfig:
        return SchemeConfig(self.n_beams, self.p_total, self.k_codewords, self.beta, self.n_x, self.n_y)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["constellation"]["walker"] = self.constellation.notation
        d["schemes"] = list(self.schemes)
        return d


def _pick(section: dict, cls, renames: dict | None = None) -> dict:
    renames = renames or {}
    names = {f.name for f in dataclasses.fields(cls)}
    out = {}
    for key, value in section.items():
        key = renames.get(key, key)
        if key not in names:
            raise ScenarioError(f"unknown key {key!r} for {cls.__name__}")
        out[key] = value
    return out


def config_from_dict(raw: dict, base_dir: Path | None = None) -> ScenarioConfig:
    raw = dict(raw)
    known = {"seed", "constellation", "gus", "array", "link_budget", "fading", "schemes", "time"}
    unknown = set(raw) - known
    if unknown:
        raise ScenarioError(f"unknown scenario sections/keys: {sorted(unknown)}")
    kw: dict = {}
    try:
        c = dict(raw.get("constellation", {}))
        theta = c.pop("theta_min_deg", None)
        if theta is not None:
            kw["theta_min_deg"] = float(theta)
        walker = c.pop("walker", None)
        inc = float(c.pop("inclination_deg", 45.0))
        alt = float(c.pop("altitude_km", 1200.0))
        epoch = float(c.pop("epoch_s", 0.0))
        if walker is not None:
            cc = ConstellationConfig.from_notation(walker, inc, alt, epoch)
        else:
            cc = ConstellationConfig(int(c.pop("total_sats", 48)), int(c.pop("planes", 6)),
                                     int(c.pop("phasing", 1)), inc, alt, epoch)
        if c:
            raise ScenarioError(f"unknown constellation keys: {sorted(c)}")
        kw["constellation"] = cc

        g = dict(raw.get("gus", {}))
        for key in ("max_gain_dbi", "hpbw_deg"):
            if key in g:
                kw[key] = float(g.pop(key))
        src = GUSource(**_pick(g, GUSource))
        if src.path and base_dir is not None and not os.path.isabs(src.path):
            src.path = str(base_dir / src.path)
        kw["gus"] = src

        a = dict(raw.get("array", {}))
        for key in ("n_x", "n_y", "n_sub_x", "n_sub_y", "k_codewords"):
            if key in a:
                kw[key] = int(a.pop(key))
        if "p_total_w" in a:
            kw["p_total"] = float(a.pop("p_total_w"))
        if "beta" in a:
            kw["beta"] = float(a.pop("beta"))
        if a:
            raise ScenarioError(f"unknown array keys: {sorted(a)}")

        kw["link"] = LinkBudgetParams(**_pick(raw.get("link_budget", {}), LinkBudgetParams))
        kw["fading"] = FadingParams(**_pick(raw.get("fading", {}), FadingParams))

        s = raw.get("schemes", {})
        if "run" in s:
            kw["schemes"] = tuple(s["run"])
        t = raw.get("time", {})
        if "samples" in t:
            kw["samples"] = int(t["samples"])
        if "spacing_s" in t:
            kw["spacing_s"] = float(t["spacing_s"])
        if "seed" in raw:
            kw["seed"] = int(raw["seed"])
        return ScenarioConfig(**kw)
    except ScenarioError:
        raise
    except (TypeError, ValueError) as exc:
        raise ScenarioError(str(exc)) from exc


def load_scenario(path: str | os.PathLike) -> ScenarioConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    return config_from_dict(raw, path.parent)


# ------------------------------------------------------------------- GUs

def read_gu_csv(path: str | os.PathLike, max_gain_dbi: float = REFERENCE_GMAX_DBI,
                gamma_3db_deg: float = REFERENCE_HPBW_DEG / 2) -> list[GroundUser]:
    """GU list from a CSV with columns ``gu_id, lat, lon, alt``."""
    gus = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            try:
                gus.append(GroundUser(int(row["gu_id"]), float(row["lat"]), float(row["lon"]),
                                      float(row.get("alt") or 0.0), max_gain_dbi, gamma_3db_deg))
            except (KeyError, ValueError) as exc:
                raise ScenarioError(f"{path}: bad GU row {row}: {exc}") from exc
    return gus


def synthetic_gus(count: int, rng: np.random.Generator, lat_range=(0.0, 54.0), lon_range=(73.0, 148.0),
                  min_separation_km: float = 0.0, max_gain_dbi: float = REFERENCE_GMAX_DBI,
                  gamma_3db_deg: float = REFERENCE_HPBW_DEG / 2, max_tries: int = 10_000) -> list[GroundUser]:
    """Uniform placement in a latitude band and longitude window."""
    pts: list[tuple[float, float]] = []
    tries = 0
    while len(pts) < count:
        tries += 1
        if tries > max_tries:
            raise ScenarioError(f"could not place {count} GUs {min_separation_km} km apart")
        lat = float(rng.uniform(*lat_range))
        lon = float(rng.uniform(*lon_range))
        if min_separation_km > 0 and any(great_circle_km(lat, lon, a, b) < min_separation_km for a, b in pts):
            continue
        pts.append((lat, lon))
    return [GroundUser(i, lat, lon, 0.0, max_gain_dbi, gamma_3db_deg) for i, (lat, lon) in enumerate(pts)]


def make_gus(config: ScenarioConfig) -> list[GroundUser]:
    src = config.gus
    gamma = config.hpbw_deg / 2.0
    if src.mode == "explicit":
        gus = [GroundUser(int(u.get("id", i)), float(u["lat"]), float(u["lon"]), float(u.get("alt", 0.0)),
                          config.max_gain_dbi, gamma) for i, u in enumerate(src.users)]
    elif src.mode == "csv":
        if not src.path:
            raise ScenarioError("gus.mode = 'csv' needs gus.path")
        gus = read_gu_csv(src.path, config.max_gain_dbi, gamma)
    elif src.mode == "synthetic":
        rng = np.random.default_rng(np.random.SeedSequence([config.seed if src.seed is None else src.seed, 0x6755]))
        gus = synthetic_gus(src.count, rng, (src.lat_min, src.lat_max), (src.lon_min, src.lon_max),
                            src.min_separation_km, config.max_gain_dbi, gamma)
    else:
        raise ScenarioError(f"unknown GU mode {src.mode!r}")
    if not gus:
        raise ScenarioError("scenario has no ground users")
    if len({g.gu_id for g in gus}) != len(gus):
        raise ScenarioError("duplicate GU ids")
    return gus


# -------------------------------------------------------------- scenarios

@dataclass
class Scenario:
    config: ScenarioConfig
    gus: list[GroundUser]
    elements: list[OrbitalElements]

    @property
    def times(self) -> list[float]:
        return [k * self.config.spacing_s for k in range(self.config.samples)]


def build_scenario(config: ScenarioConfig) -> Scenario:
    gus = make_gus(config)
    elements = generate_walker(config.constellation)
    if not elements:
        raise ScenarioError("constellation has no satellites")
    return Scenario(config, gus, elements)


@dataclass
class SampleResult:
    sample: int
    time_s: float
    sat_ids: list[int]
    covered: np.ndarray  # per GU
    schemes: dict[str, SchemeResult]
    channels: ChannelSet | None = field(default=None, repr=False)


@dataclass
class ExperimentResult:
    config: ScenarioConfig
    gu_ids: list[int]
    samples: list[SampleResult]

    @property
    def schemes(self) -> tuple[str, ...]:
        return self.config.schemes

    def totals(self, scheme: str) -> np.ndarray:
        return np.array([s.schemes[scheme].total_se for s in self.samples])

    def mean_total_se(self, scheme: str) -> float:
        return float(np.mean(self.totals(scheme)))

    def per_gu_se(self, scheme: str) -> np.ndarray:
        """(samples, GUs) spectral efficiency, zero where unserved."""
        rows = []
        for s in self.samples:
            rep = s.schemes[scheme].report
            rows.append(np.where(rep.served, rep.se, 0.0))
        return np.array(rows)


def channels_for_sample(scenario: Scenario, k: int, states: Sequence[SatelliteState] | None = None) -> ChannelSet:
    cfg = scenario.config
    if states is None:
        states = propagate_all(scenario.elements, scenario.times[k])
    vis = visibility(states, scenario.gus, cfg.theta_min_deg)
    return assemble_channels(states, scenario.gus, vis, cfg.link, cfg.fading, cfg.n_x, cfg.n_y, cfg.seed, k)


def run_sample(scenario: Scenario, k: int, keep_channels: bool = False) -> SampleResult:
    cfg = scenario.config
    ch = channels_for_sample(scenario, k)
    covered = ch.visible.any(axis=0) if ch.n_sats else np.zeros(len(scenario.gus), dtype=bool)
    results = {}
    scfg = cfg.scheme_config()
    w_a = analog_for(ch, scfg)
    for scheme in cfg.schemes:
        results[scheme] = run_scheme(scheme, ch, scfg, w_a)
    logger.info("sample %d: %d visible satellites, %s", k, ch.n_sats,
                ", ".join(f"{s}={r.total_se:.3f}" for s, r in results.items()))
    return SampleResult(k, scenario.times[k], list(ch.sat_ids), covered, results, ch if keep_channels else None)


def run(scenario: Scenario, threads: int = 1, keep_channels: bool = False) -> ExperimentResult:
    """Run every time sample; output order does not depend on ``threads``."""
    ks = range(scenario.config.samples)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(lambda k: run_sample(scenario, k, keep_channels), ks))
    else:
        samples = [run_sample(scenario, k, keep_channels) for k in ks]
    return ExperimentResult(scenario.config, [g.gu_id for g in scenario.gus], samples)


# --------------------------------------------------------------- analyses

def ratios(result: ExperimentResult, scheme: str | None = None) -> tuple[float, float]:
    """(coverage, service) over all GU-samples.

    Covered: at least one visible satellite.  Served: at least one link under
    ``scheme`` (default: the last configured scheme).
    """
    scheme = scheme or result.schemes[-1]
    n = len(result.samples) * len(result.gu_ids)
    covered = sum(int(s.covered.sum()) for s in result.samples)
    served = sum(int(s.schemes[scheme].report.served.sum()) for s in result.samples)
    return covered / n, served / n


def with_overrides(config: ScenarioConfig, **changes) -> ScenarioConfig:
    return dataclasses.replace(config, **changes)


def inclination_sweep(config: ScenarioConfig, inclinations: Iterable[float] = range(30, 61, 5),
                      threads: int = 1) -> list[dict]:
    """Mean total SE per scheme and coverage/service ratios per inclination."""
    rows = []
    for inc in inclinations:
        cc = dataclasses.replace(config.constellation, inclination_deg=float(inc))
        res = run(build_scenario(with_overrides(config, constellation=cc)), threads)
        for scheme in res.schemes:
            cov, srv = ratios(res, scheme)
            rows.append({"inclination_deg": float(inc), "scheme": scheme,
                         "mean_total_se": res.mean_total_se(scheme), "coverage_ratio": cov,
                         "service_ratio": srv})
    return rows


def gain_for_hpbw(hpbw_deg: float, ref_hpbw_deg: float = REFERENCE_HPBW_DEG,
                  ref_gain_dbi: float = REFERENCE_GMAX_DBI) -> float:
    """Peak gain (dBi) under a constant gain x beamwidth^2 product."""
    return ref_gain_dbi + 20.0 * math.log10(ref_hpbw_deg / hpbw_deg)


def hpbw_sweep(config: ScenarioConfig, hpbws: Iterable[float] = (2.0, 8.0, 32.0, 128.0),
               constellations: Sequence[str] | None = None, threads: int = 1) -> list[dict]:
    """Relative improvement of M-JHU over S-JHU versus GU antenna HPBW."""
    constellations = constellations or [config.constellation.notation]
    rows = []
    for notation in constellations:
        cc = ConstellationConfig.from_notation(notation, config.constellation.inclination_deg,
                                               config.constellation.altitude_km, config.constellation.epoch_s)
        for hpbw in hpbws:
            cfg = with_overrides(config, constellation=cc, hpbw_deg=float(hpbw),
                                 max_gain_dbi=gain_for_hpbw(hpbw), schemes=("S-JHU", "M-JHU"))
            res = run(build_scenario(cfg), threads)
            s, m = res.mean_total_se("S-JHU"), res.mean_total_se("M-JHU")
            rows.append({"constellation": notation, "hpbw_deg": float(hpbw), "max_gain_dbi": cfg.max_gain_dbi,
                         "s_jhu": s, "m_jhu": m, "improvement": (m - s) / s if s > 0 else 0.0})
    return rows


def density_split(gus: Sequence[GroundUser], distance_km: float) -> tuple[list[int], list[int]]:
    """(dense ids, sparse ids): sparse GUs have no other GU within ``distance_km``."""
    if distance_km <= 0:
        raise ValueError("distance threshold must be positive")
    dense, sparse = [], []
    for i, g in enumerate(gus):
        nn = min((great_circle_km(g.latitude_deg, g.longitude_deg, o.latitude_deg, o.longitude_deg)
                  for j, o in enumerate(gus) if j != i), default=math.inf)
        (sparse if nn > distance_km else dense).append(g.gu_id)
    return dense, sparse


def density_stats(result: ExperimentResult, gus: Sequence[GroundUser], distance_km: float,
                  scheme: str = "M-JHU") -> dict:
    """Mean and variance of per-GU SE over all samples, per density class."""
    dense, sparse = density_split(gus, distance_km)
    se = result.per_gu_se(scheme)
    col = {gid: j for j, gid in enumerate(result.gu_ids)}
    out = {}
    for name, ids in (("dense", dense), ("sparse", sparse)):
        vals = se[:, [col[i] for i in ids]].ravel() if ids else np.array([])
        out[name] = {"count": len(ids), "mean": float(vals.mean()) if vals.size else float("nan"),
                     "variance": float(vals.var()) if vals.size else float("nan")}
    return out


def scheme_summary(result: ExperimentResult) -> list[dict]:
    """Mean total SE per scheme and relative improvement over AU."""
    base = result.mean_total_se("AU") if "AU" in result.schemes else None
    rows = []
    for scheme in result.schemes:
        m = result.mean_total_se(scheme)
        rows.append({"scheme": scheme, "mean_total_se": m,
                     "gain_over_au": (m / base - 1.0) if base else None})
    return rows


# ------------------------------------------------------------ persistence

SAMPLE_COLUMNS = ["sample", "scheme", "gu_id", "sinr_db", "se_bpshz", "served", "boresight_sat"]


def _fmt(x: float) -> str:
    return repr(float(x))


def summary_dict(result: ExperimentResult) -> dict:
    cfg = result.config
    samples = []
    for s in result.samples:
        entry = {"sample": s.sample, "time_s": s.time_s, "n_visible_sats": len(s.sat_ids),
                 "covered": int(s.covered.sum()), "schemes": {}}
        for name, r in s.schemes.items():
            entry["schemes"][name] = {"total_se": r.total_se, "m_r": r.counter.m_r, "m_hy": r.counter.m_hy,
                                      "links": int(r.links.alpha.sum()), "served": int(r.report.served.sum()),
                                      "infeasible": bool(r.infeasible)}
        samples.append(entry)
    aggregate = {}
    for scheme in result.schemes:
        cov, srv = ratios(result, scheme)
        aggregate[scheme] = {"mean_total_se": result.mean_total_se(scheme), "coverage_ratio": cov,
                             "service_ratio": srv}
    return {"seed": cfg.seed, "config": cfg.to_dict(), "n_gus": len(result.gu_ids),
            "aggregate": aggregate, "samples": samples}


def write_results(result: ExperimentResult, out_dir: str | os.PathLike) -> dict[str, Path]:
    """Write ``samples.csv``, ``links.csv`` and ``summary.json``; no timestamps."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"samples": out / "samples.csv", "links": out / "links.csv", "summary": out / "summary.json"}
    with open(paths["samples"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SAMPLE_COLUMNS)
        for s in result.samples:
            for name, r in s.schemes.items():
                rep = r.report
                for j, gid in enumerate(result.gu_ids):
                    b = int(r.links.boresight[j])
                    sinr_db = 10.0 * math.log10(rep.sinr[j]) if rep.sinr[j] > 0 else float("-inf")
                    w.writerow([s.sample, name, gid, _fmt(sinr_db), _fmt(rep.se[j] if rep.served[j] else 0.0),
                                int(rep.served[j]), s.sat_ids[b] if b >= 0 else ""])
    with open(paths["links"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample", "scheme", "sat_id", "gu_id"])
        for s in result.samples:
            for name, r in s.schemes.items():
                for si, gi in r.links.pairs():
                    w.writerow([s.sample, name, s.sat_ids[si], result.gu_ids[gi]])
    with open(paths["summary"], "w") as fh:
        json.dump(summary_dict(result), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


def aggregate_from_csv(samples_csv: str | os.PathLike) -> dict[str, dict]:
    """Recompute mean total SE and service ratio per scheme from ``samples.csv``."""
    totals: dict[str, dict[int, float]] = {}
    served: dict[str, int] = {}
    rows: dict[str, int] = {}
    with open(samples_csv, newline="") as fh:
        for row in csv.DictReader(fh):
            sch, k = row["scheme"], int(row["sample"])
            totals.setdefault(sch, {}).setdefault(k, 0.0)
            totals[sch][k] += float(row["se_bpshz"])
            served[sch] = served.get(sch, 0) + int(row["served"])
            rows[sch] = rows.get(sch, 0) + 1
    return {sch: {"mean_total_se": float(np.mean([t[k] for k in sorted(t)])), "service_ratio": served[sch] / rows[sch]}
            for sch, t in totals.items()}


# --------------------------------------------------- synthetic instances

def synthetic_instance(seed: int, n_sats: int, n_gus: int, *, centre=(35.0, 110.0), gu_spread_deg: float = 2.0,
                       sat_spread_deg: float = 12.0, altitude_km: float = 1200.0, theta_min_deg: float = 10.0,
                       link: LinkBudgetParams | None = None, fading: FadingParams | None = None,
                       n_x: int = 8, n_y: int = 8, max_gain_dbi: float = REFERENCE_GMAX_DBI,
                       hpbw_deg: float = REFERENCE_HPBW_DEG) -> tuple[ChannelSet, list[GroundUser]]:
    """Random regional instance: GUs in a box, satellites overhead with random headings.

    The default +/-2 deg GU box (about 440 x 360 km at 35 deg N) fits inside
    the first-null footprint of an 8x8 sub-array beam seen from 1200 km, so
    all GUs compete for the same analog main lobes.  Every satellite is redrawn until at least one GU sees it, so the channel
    set has exactly ``n_sats`` satellites.
    """
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x51A7]))
    lat0, lon0 = centre
    gus = synthetic_gus(n_gus, rng, (lat0 - gu_spread_deg, lat0 + gu_spread_deg),
                        (lon0 - gu_spread_deg, lon0 + gu_spread_deg),
                        max_gain_dbi=max_gain_dbi, gamma_3db_deg=hpbw_deg / 2.0)
    r = R_EARTH_KM + altitude_km
    speed = math.sqrt(398600.4418 / r)
    states: list[SatelliteState] = []
    while len(states) < n_sats:
        lat = math.radians(lat0 + rng.uniform(-sat_spread_deg, sat_spread_deg))
        lon = math.radians(lon0 + rng.uniform(-sat_spread_deg, sat_spread_deg))
        heading = rng.uniform(0.0, 2.0 * math.pi)
        up = np.array([math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)])
        east = np.array([-math.sin(lon), math.cos(lon), 0.0])
        north = np.cross(up, east)
        st = SatelliteState(len(states), r * up, speed * (math.cos(heading) * north + math.sin(heading) * east))
        if visibility([st], gus, theta_min_deg).sat_ids:
            states.append(st)
    vis = visibility(states, gus, theta_min_deg)
    ch = assemble_channels(states, gus, vis, link or LinkBudgetParams(), fading or FadingParams(),
                           n_x, n_y, seed)
    return ch, gus


@dataclass
class OracleStudy:
    """Heuristic-to-optimum SE ratios over random tiny instances."""

    ratios: np.ndarray
    sizes: list[tuple[int, int]]
    heuristic: np.ndarray
    optimum: np.ndarray

    @property
    def dominated(self) -> bool:
        """True when the heuristic never beats the exhaustive optimum."""
        return bool(np.all(self.heuristic <= self.optimum * (1 + 1e-9) + 1e-12))

    def percentiles(self, qs=(0, 5, 25, 50, 75, 100)) -> dict[int, float]:
        return {int(q): float(np.percentile(self.ratios, q)) for q in qs}


def oracle_study(instances: int = 100, max_sats: int = 3, max_gus: int = 4, seed: int = 0,
                 n_beams: int = 2, link: LinkBudgetParams | None = None,
                 fading: FadingParams | None = None) -> OracleStudy:
    """Compare single-connection JHU with the exhaustive optimum.

    Instance sizes are drawn uniformly from ``1..max_sats`` x ``1..max_gus``.
    """
    if max_sats < 1 or max_gus < 1:
        raise ValueError("need at least one satellite and one GU")
    if max_sats * max_gus > ORACLE_CAP:
        raise ValueError(f"{max_sats}x{max_gus} exceeds the exhaustive-search cap of {ORACLE_CAP} links")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x0AC1]))
    cfg = SchemeConfig(n_beams=n_beams)
    heur, opt, sizes = [], [], []
    for i in range(instances):
        n_s, n_g = int(rng.integers(1, max_sats + 1)), int(rng.integers(1, max_gus + 1))
        ch, _ = synthetic_instance(int(rng.integers(2**31)), n_s, n_g, link=link, fading=fading)
        w_a = analog_for(ch, cfg)
        h = run_scheme("S-JHU", ch, cfg, w_a).total_se
        _, o = exhaustive_oracle(ch, HybridPolicy(ch, w_a, cfg.p_total, cfg.beta), n_beams)
        heur.append(h)
        opt.append(o)
        sizes.append((n_s, n_g))
    heur_a, opt_a = np.array(heur), np.array(opt)
    ratio = np.divide(heur_a, opt_a, out=np.ones_like(heur_a), where=opt_a > 0)
    return OracleStudy(ratio, sizes, heur_a, opt_a)
