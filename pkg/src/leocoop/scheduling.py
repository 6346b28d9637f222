"""
Greedy user scheduling and the four beamforming/scheduling schemes.

* single-connection greedy: connect each unserved GU to the satellite whose
  link brings the largest total-SE increment, until every GU is served or no
  feasible link is left;
* multi-connection greedy: starting from a single-connection result, keep
  adding extra links while the best increment is positive;
* AU / SHU schedule with fixed analog beams; S-JHU / M-JHU recompute the
  digital precoder of the affected satellite for every candidate link.

Total SE is evaluated incrementally: the coupling matrix ``A[g, g']`` is
the sum of per-satellite contributions, so a candidate link only swaps the
contribution of one satellite (plus the new GU's row when its boresight is
first fixed).
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .beamforming import (
    DEFAULT_K,
    BeamformerSet,
    SatelliteBeams,
    analog_only_scale,
    analog_weights,
    dft_codebook,
    hybrid_beams,
)
from .channel import ChannelSet
from .metrics import Counter, LinkMatrix, SEReport, spectral_efficiency, total_se

logger = logging.getLogger(__name__)

SCHEMES = ("AU", "SHU", "S-JHU", "M-JHU")
ORACLE_CAP = 12


# ---------------------------------------------------------------- policies

class BeamPolicy:
    """Maps (satellite, served GUs, boresights) to that satellite's precoder."""

    def __init__(self, ch: ChannelSet, w_analog: np.ndarray, p_total: float):
        self.ch = ch
        self.w_analog = w_analog
        self.p_total = p_total

    def __call__(self, s: int, gus: list[int], boresight: np.ndarray, counter: Counter | None) -> SatelliteBeams:
        raise NotImplementedError


class FixedAnalogPolicy(BeamPolicy):
    """The analog beams themselves, independent of the links.

    Columns keep the unit norm the codebook stage produces (``beam_power``
    watts each); power scaling only happens once scheduling is done.
    """

    def __init__(self, ch, w_analog, p_total, beam_power: float = 1.0):
        super().__init__(ch, w_analog, p_total)
        self.beam_power = beam_power

    def __call__(self, s, gus, boresight, counter):
        f_a = self.w_analog[s, gus].T
        return SatelliteBeams(list(gus), f_a, None, math.sqrt(self.beam_power) * f_a)


class AnalogScaledPolicy(BeamPolicy):
    """Analog beams scaled so the satellite transmits exactly ``p_total``."""

    def __call__(self, s, gus, boresight, counter):
        f_a = self.w_analog[s, gus].T
        return SatelliteBeams(list(gus), f_a, None, analog_only_scale(f_a, self.p_total))


class HybridPolicy(BeamPolicy):
    """Regularized ZF on the generalized channel, then full-power scaling."""

    def __init__(self, ch, w_analog, p_total, beta: float | None = None):
        super().__init__(ch, w_analog, p_total)
        self.beta = beta
        self._scaled = ch.scaled

    def __call__(self, s, gus, boresight, counter):
        gus = list(gus)
        gains = self.ch.gu_gain[gus, boresight[gus], s]
        rows = np.sqrt(gains)[:, None] * self._scaled[s, gus]
        f_a = self.w_analog[s, gus].T
        f_d, f_hy, eta, beta = hybrid_beams(rows, f_a, self.ch.noise_power, self.p_total, self.beta)
        if counter is not None:
            counter.m_hy += 1
        return SatelliteBeams(gus, f_a, f_d, f_hy, eta, beta)


# ---------------------------------------------------------- fast evaluator

class NetworkEvaluator:
    """Incremental total-SE evaluation for one channel set and one policy."""

    def __init__(self, ch: ChannelSet, policy: BeamPolicy, links: LinkMatrix | None = None,
                 counter: Counter | None = None):
        self.ch = ch
        self.policy = policy
        self.counter = counter if counter is not None else Counter()
        self.links = links.copy() if links is not None else LinkMatrix.empty(ch.n_sats, ch.n_gus)
        self._scaled = ch.scaled
        self._sqrt_gain = np.sqrt(ch.gu_gain)  # (G, B, S)
        self.beams: dict[int, SatelliteBeams] = {}
        self._y: dict[int, np.ndarray] = {}
        for s in range(ch.n_sats):
            gus = self.links.served_by(s)
            if gus:
                self._set_beams(s, policy(s, gus, self.links.boresight, self.counter))
        self._rebuild()

    def _set_beams(self, s: int, beams: SatelliteBeams) -> None:
        self.beams[s] = beams
        # coupling of every GU to satellite s's beams, before GU-side gain
        self._y[s] = self._scaled[s].conj() @ beams.hybrid

    def _amp(self, s: int, boresight: np.ndarray, served: np.ndarray) -> np.ndarray:
        n_g = self.ch.n_gus
        b = np.where(served, boresight, 0)
        return self._sqrt_gain[np.arange(n_g), b, s] * self.ch.visible[s] * served

    def _contrib(self, s: int, y: np.ndarray, gus: list[int], boresight, served) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(gus), self._amp(s, boresight, served)[:, None] * y

    def _rebuild(self) -> None:
        n_g = self.ch.n_gus
        self.served = self.links.alpha.any(axis=0)
        a = np.zeros((n_g, n_g), dtype=complex)
        for s, beams in self.beams.items():
            cols, c = self._contrib(s, self._y[s], beams.gus, self.links.boresight, self.served)
            a[:, cols] += c
        self.a = a
        self.total = self._rate(a, self.served)

    def _rate(self, a: np.ndarray, served: np.ndarray) -> float:
        p = np.abs(a) ** 2
        sig = np.diag(p)
        intf = p.sum(axis=1) - sig
        gamma = sig[served] / (intf[served] + self.ch.noise_power)
        return float(np.sum(np.log2(1.0 + gamma)))

    def baseline(self) -> float:
        self.counter.m_r += 1
        return self.total

    def trial(self, s: int, g: int) -> tuple[float, SatelliteBeams, np.ndarray]:
        """Total SE with link (s, g) added; state is left untouched."""
        self.counter.m_r += 1
        bores = self.links.boresight
        served = self.served
        newly = not served[g]
        if newly:
            bores = bores.copy()
            bores[g] = s
            served = served.copy()
            served[g] = True
        gus = sorted(self.links.served_by(s) + [g])
        beams = self.policy(s, gus, bores, self.counter)
        y = self._scaled[s].conj() @ beams.hybrid
        a = self.a.copy()
        if s in self.beams:
            cols, c = self._contrib(s, self._y[s], self.beams[s].gus, self.links.boresight, self.served)
            a[:, cols] -= c
        cols, c = self._contrib(s, y, gus, bores, served)
        a[:, cols] += c
        if newly:
            for sp, bp in self.beams.items():
                if sp == s or not self.ch.visible[sp, g]:
                    continue
                a[g, bp.gus] += self._sqrt_gain[g, s, sp] * self._y[sp][g]
        return self._rate(a, served), beams, a

    def commit(self, s: int, g: int, beams: SatelliteBeams | None = None) -> None:
        self.links.add(s, g)
        if beams is None:
            beams = self.policy(s, self.links.served_by(s), self.links.boresight, self.counter)
        self._set_beams(s, beams)
        self._rebuild()

    def beamformer_set(self) -> BeamformerSet:
        return BeamformerSet(dict(self.beams), self.counter.m_r, self.counter.m_hy)


# ------------------------------------------------------------- greedy core

@dataclass
class SchedulerState:
    links: LinkMatrix
    spare: set[int]  # satellites still in the candidate pool
    unserved: set[int]
    counter: Counter
    infeasible: bool = False
    accepted: list[tuple[int, int, float]] = field(default_factory=list)  # (s, g, delta R)
    evaluator: NetworkEvaluator | None = field(default=None, repr=False)


def _argmax(evaluator: NetworkEvaluator, candidates: list[tuple[int, int]]):
    base = evaluator.baseline()
    best = None
    for s, g in candidates:  # candidates are in (s, g) order: first maximum wins ties
        r, beams, _ = evaluator.trial(s, g)
        d = r - base
        if best is None or d > best[2]:
            best = (s, g, d, beams)
    return best


def schedule_single(ch: ChannelSet, policy: BeamPolicy, n_beams: int,
                    counter: Counter | None = None) -> SchedulerState:
    """Single-connection greedy scheduling."""
    counter = counter if counter is not None else Counter()
    n_s, n_g = ch.n_sats, ch.n_gus
    links = LinkMatrix.empty(n_s, n_g)
    unserved = set(range(n_g))
    for g in range(n_g):
        vis = ch.visible_sats(g)
        if len(vis) == 1 and links.alpha[vis[0]].sum() < n_beams:
            links.add(int(vis[0]), g)
            unserved.discard(g)
    ev = NetworkEvaluator(ch, policy, links, counter)
    spare = set(range(n_s))
    state = SchedulerState(ev.links, spare, unserved, counter, evaluator=ev)
    while unserved:
        cands = [(s, g) for s in sorted(spare) for g in sorted(unserved) if ch.visible[s, g]]
        if not cands:
            state.infeasible = True
            logger.debug("no feasible link left for %d GUs", len(unserved))
            break
        s, g, d, beams = _argmax(ev, cands)
        if ev.links.alpha[s].sum() < n_beams:
            ev.commit(s, g, beams)
            unserved.discard(g)
            state.accepted.append((s, g, d))
        else:
            spare.discard(s)
    state.links = ev.links
    return state


def schedule_multi(ch: ChannelSet, policy: BeamPolicy, n_beams: int, state: SchedulerState) -> SchedulerState:
    """Add extra links on top of a single-connection state while SE improves."""
    ev = state.evaluator
    if ev is None or ev.policy is not policy:
        ev = NetworkEvaluator(ch, policy, state.links, state.counter)
    spare = set(state.spare)
    accepted = list(state.accepted)
    while spare:
        cands = [(s, g) for s in sorted(spare) for g in range(ch.n_gus)
                 if ch.visible[s, g] and not ev.links.alpha[s, g]]
        if not cands:
            break
        s, g, d, beams = _argmax(ev, cands)
        if d <= 0:
            break
        if ev.links.alpha[s].sum() < n_beams:
            ev.commit(s, g, beams)
            accepted.append((s, g, d))
        else:
            spare.discard(s)
    return SchedulerState(ev.links, spare, set(state.unserved), state.counter, state.infeasible, accepted, ev)


# ----------------------------------------------------------------- schemes

@dataclass
class SchemeConfig:
    n_beams: int = 32
    p_total: float = 80.0
    k_codewords: int = DEFAULT_K
    beta: float | None = None  # None: large-system optimum per satellite
    n_x: int = 8
    n_y: int = 8


@dataclass
class SchemeResult:
    scheme: str
    links: LinkMatrix
    beams: BeamformerSet
    report: SEReport
    counter: Counter
    infeasible: bool = False
    runtime_s: float = 0.0
    accepted: list = field(default_factory=list)

    @property
    def total_se(self) -> float:
        return self.report.total


def analog_for(ch: ChannelSet, cfg: SchemeConfig) -> np.ndarray:
    if ch.n_elements != cfg.n_x * cfg.n_y:
        raise ValueError("channel length does not match the sub-array size")
    return analog_weights(ch.h_small, ch.visible, dft_codebook(cfg.n_x, cfg.n_y), cfg.k_codewords)


def _final_beams(ch, links, policy, counter) -> BeamformerSet:
    beams = {}
    for s in range(ch.n_sats):
        gus = links.served_by(s)
        if gus:
            beams[s] = policy(s, gus, links.boresight, counter)
    return BeamformerSet(beams)


def run_scheme(scheme: str, ch: ChannelSet, cfg: SchemeConfig | None = None,
               w_analog: np.ndarray | None = None) -> SchemeResult:
    cfg = cfg or SchemeConfig()
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if w_analog is None:
        w_analog = analog_for(ch, cfg)
    t0 = time.perf_counter()
    counter = Counter()
    if scheme in ("AU", "SHU"):
        state = schedule_single(ch, FixedAnalogPolicy(ch, w_analog, cfg.p_total), cfg.n_beams, counter)
        final = (AnalogScaledPolicy(ch, w_analog, cfg.p_total) if scheme == "AU"
                 else HybridPolicy(ch, w_analog, cfg.p_total, cfg.beta))
        bf = _final_beams(ch, state.links, final, counter)
    else:
        policy = HybridPolicy(ch, w_analog, cfg.p_total, cfg.beta)
        state = schedule_single(ch, policy, cfg.n_beams, counter)
        if scheme == "M-JHU":
            state = schedule_multi(ch, policy, cfg.n_beams, state)
        bf = BeamformerSet(dict(state.evaluator.beams))
    report = total_se(state.links, ch, bf, counter)
    bf.m_r, bf.m_hy = counter.m_r, counter.m_hy
    return SchemeResult(scheme, state.links, bf, report, counter, state.infeasible,
                        time.perf_counter() - t0, state.accepted)


def jhu(ch: ChannelSet, cfg: SchemeConfig | None = None, multi: bool = False,
        w_analog: np.ndarray | None = None) -> SchemeResult:
    return run_scheme("M-JHU" if multi else "S-JHU", ch, cfg, w_analog)


# ------------------------------------------------------------------ oracle

def _evaluate(ch, links, policy) -> float:
    bf = _final_beams(ch, links, policy, None)
    return total_se(links, ch, bf).total


def exhaustive_oracle(ch: ChannelSet, policy: BeamPolicy, n_beams: int,
                      single_only: bool = True) -> tuple[LinkMatrix, float]:
    """Best link matrix by full enumeration (tiny instances only).

    Every link matrix respecting the beam budget is tried, including ones
    that leave GUs unserved.  In the multi-connection case each GU's
    boresight is also enumerated over its links.
    """
    n_s, n_g = ch.n_sats, ch.n_gus
    if n_s * n_g > ORACLE_CAP:
        raise ValueError(f"instance too large for exhaustive search: {n_s}x{n_g} > {ORACLE_CAP} links")
    per_gu = []
    for g in range(n_g):
        vis = [int(s) for s in ch.visible_sats(g)]
        opts: list[tuple[tuple[int, ...], int]] = [((), -1)]
        if single_only:
            opts += [((s,), s) for s in vis]
        else:
            for r in range(1, len(vis) + 1):
                for sub in itertools.combinations(vis, r):
                    opts += [(sub, b) for b in sub]
        per_gu.append(opts)
    best_links, best_r = LinkMatrix.empty(n_s, n_g), 0.0
    for combo in itertools.product(*per_gu):
        links = LinkMatrix.empty(n_s, n_g)
        for g, (sats, b) in enumerate(combo):
            links.alpha[list(sats), g] = True
            links.boresight[g] = b
        if np.any(links.load() > n_beams):
            continue
        r = _evaluate(ch, links, policy)
        if r > best_r:
            best_links, best_r = links, r
    return best_links, best_r


def policy_for(scheme: str, ch: ChannelSet, w_analog: np.ndarray, cfg: SchemeConfig) -> BeamPolicy:
    """The beamforming rule a scheme's final SE is evaluated with."""
    if scheme == "AU":
        return AnalogScaledPolicy(ch, w_analog, cfg.p_total)
    return HybridPolicy(ch, w_analog, cfg.p_total, cfg.beta)


__all__ = [
    "SCHEMES", "BeamPolicy", "FixedAnalogPolicy", "AnalogScaledPolicy", "HybridPolicy",
    "NetworkEvaluator", "SchedulerState", "schedule_single", "schedule_multi", "SchemeConfig",
    "SchemeResult", "run_scheme", "jhu", "exhaustive_oracle", "policy_for", "analog_for",
    "spectral_efficiency",
]
