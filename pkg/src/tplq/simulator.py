"""Continuous publishing simulation.

A canonical source log is cut into an initial release and a reservoir of
pending events per case. Each later release advances every unfinished case
by exactly ``window`` events (certain scenario) or by a uniform draw from
``0..window`` (uncertain scenario). Only real events count towards the
window; the start label comes with a case's first release and the end label
is added when its last event is consumed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterator, Optional, Sequence

import numpy as np

from .correlation import Scenario
from .errors import CanonicalizationError, EndOfStream, TplqError
from .eventlog import END, START, EventLog, Trace, VariantMultiset
from .leakage import PrivacyMechanism


@dataclass(frozen=True)
class SplitConfig:
    fraction: float = 0.5

    def __post_init__(self):
        if not 0 < self.fraction <= 1:
            raise ValueError(f"split fraction must be in (0, 1], got {self.fraction!r}")


@dataclass(frozen=True)
class ReleasePlan:
    scenario: Scenario
    max_releases: int = 5
    epsilon_schedule: Sequence[float] = (0.01,)
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_releases < 1:
            raise ValueError("max_releases must be at least 1")
        if not self.epsilon_schedule or any(not e > 0 for e in self.epsilon_schedule):
            raise ValueError("epsilon schedule must be non-empty and positive")

    def epsilon(self, release: int) -> float:
        sched = self.epsilon_schedule
        return float(sched[min(release, len(sched)) - 1])


@dataclass(frozen=True)
class Reservoir:
    """Events not yet published.

    ``pending`` maps every unfinished case to its remaining ``(activity,
    timestamp)`` events; ``dormant`` cases have not appeared in any release.
    """

    pending: dict = field(default_factory=dict)
    closes: frozenset = frozenset()
    dormant: frozenset = frozenset()
    latest: Optional[datetime] = None

    @property
    def empty(self) -> bool:
        return not any(self.pending.values())

    @property
    def n_events(self) -> int:
        return sum(len(q) for q in self.pending.values())


def split_log(source: EventLog, cfg: SplitConfig):
    """Cut ``source`` after the first ``ceil(fraction * N)`` real events in global time order."""
    if not source.canonical:
        raise CanonicalizationError("split_log expects a canonicalized source log")
    order = []
    for t in source.traces.values():
        for k, ev in enumerate(t.events()):
            order.append((ev.timestamp, t.case_id, k))
    order.sort()
    n_total = len(order)
    n_init = math.ceil(cfg.fraction * n_total - 1e-9)
    if n_init <= 0:
        raise TplqError("split leaves the initial release empty")
    taken: dict = {}
    for _, cid, _k in order[:n_init]:
        taken[cid] = taken.get(cid, 0) + 1
    latest = order[n_init - 1][0]

    traces, pending, dormant = {}, {}, set()
    closes = frozenset(cid for cid, t in source.traces.items() if t.complete)
    for cid, t in source.traces.items():
        events = [(ev.activity, ev.timestamp) for ev in t.events()]
        n = taken.get(cid, 0)
        if n == 0 and events:
            dormant.add(cid)
            pending[cid] = events
            continue
        acts = (START,) + tuple(a for a, _ in events[:n])
        stamps = (None,) + tuple(ts for _, ts in events[:n])
        done = n == len(events) and cid in closes
        if done:
            acts += (END,)
            stamps += (None,)
        elif n < len(events):
            pending[cid] = events[n:]
        traces[cid] = Trace(cid, acts, stamps, complete=done)
    initial = EventLog(traces, release_index=1, canonical=True)
    return initial, Reservoir(pending, closes, frozenset(dormant), latest)


def _advance(trace: Trace, events: list, take: int, closes: bool) -> Trace:
    used, rest = events[:take], events[take:]
    acts = trace.activities + tuple(a for a, _ in used)
    stamps = trace.timestamps + tuple(ts for _, ts in used)
    done = not rest and closes
    if done:
        acts += (END,)
        stamps += (None,)
    return Trace(trace.case_id, acts, stamps, complete=done)


def generate_release(previous: EventLog, reservoir: Reservoir, plan: ReleasePlan, release_index: int):
    """Next cumulative release and the reservoir left after it.

    Raises :class:`EndOfStream` when nothing is pending.
    """
    if reservoir.empty:
        raise EndOfStream("no pending events left")
    scenario = plan.scenario
    rng = np.random.default_rng([plan.rng_seed, release_index])

    def step():
        if scenario.certain:
            return scenario.window
        return int(rng.integers(0, scenario.window + 1))

    traces = dict(previous.traces)
    pending = {cid: list(q) for cid, q in reservoir.pending.items()}
    latest = reservoir.latest
    active = sorted(cid for cid in pending if cid in traces and pending[cid])
    for cid in active:
        take = step()
        used = pending[cid][:take]
        if used:
            ts = used[-1][1]
            latest = ts if latest is None or ts > latest else latest
        traces[cid] = _advance(traces[cid], pending[cid], take, cid in reservoir.closes)
        pending[cid] = pending[cid][take:]

    dormant = set(reservoir.dormant)
    first = {cid: pending[cid][0][1] for cid in dormant}
    waking = sorted((first[cid], cid) for cid in dormant if latest is not None and first[cid] <= latest)
    if not waking and not active and dormant:
        earliest = min(first.values())
        waking = sorted((ts, cid) for cid, ts in first.items() if ts == earliest)
    for _, cid in waking:
        take = step()
        fresh = Trace(cid, (START,), (None,))
        used = pending[cid][:take]
        if used:
            ts = used[-1][1]
            latest = ts if latest is None or ts > latest else latest
        traces[cid] = _advance(fresh, pending[cid], take, cid in reservoir.closes)
        pending[cid] = pending[cid][take:]
        dormant.discard(cid)

    pending = {cid: q for cid, q in pending.items() if q}
    release = EventLog(traces, release_index=release_index, canonical=True)
    return release, Reservoir(pending, reservoir.closes, frozenset(dormant), latest)


def releases(source: EventLog, split: SplitConfig, plan: ReleasePlan) -> Iterator[EventLog]:
    """Yield release 1 (the initial part) and following releases until the stream ends."""
    current, reservoir = split_log(source, split)
    yield current
    for index in range(2, plan.max_releases + 1):
        try:
            current, reservoir = generate_release(current, reservoir, plan, index)
        except EndOfStream:
            return
        yield current


def laplace_noise(mech: PrivacyMechanism, size: int, rng: np.random.Generator) -> np.ndarray:
    return rng.laplace(0.0, mech.scale, size=size)


def laplace_perturb(counts: VariantMultiset, mech: PrivacyMechanism, seed) -> VariantMultiset:
    """Add Laplace(0, sensitivity/epsilon) noise to every variant frequency.

    Noisy counts are rounded and clamped at zero; the unrounded values stay in ``raw``.
    """
    variants = sorted(counts.entries)
    rng = np.random.default_rng(seed)
    noise = laplace_noise(mech, len(variants), rng)
    raw = {v: counts.entries[v] + float(z) for v, z in zip(variants, noise)}
    rounded = {v: max(0, int(np.rint(x))) for v, x in raw.items()}
    return VariantMultiset(rounded, raw)
