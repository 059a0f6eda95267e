"""Forward and backward temporal correlations between automaton states.

Rows are sparse conditional distributions with exact :class:`Fraction`
probabilities. Walks treat every state without outgoing transitions as
absorbing, so forward rows always sum to one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

from .automaton import PrefixAutomaton
from .errors import TplqError

CERTAIN = "certain"
UNCERTAIN = "uncertain"
FORWARD = "forward"
BACKWARD = "backward"


class _Absent:
    """Previous state of a case that had not started yet."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "⊥"

    def __reduce__(self):
        return (_Absent, ())


ABSENT = _Absent()
ABSENT_ID = -1


@dataclass(frozen=True)
class Scenario:
    """Count-window publishing scenario: exactly (certain) or up to (uncertain) ``window`` new events."""

    kind: str = CERTAIN
    window: int = 1

    def __post_init__(self):
        if self.kind not in (CERTAIN, UNCERTAIN):
            raise ValueError(f"scenario kind must be {CERTAIN!r} or {UNCERTAIN!r}, got {self.kind!r}")
        if int(self.window) != self.window or self.window < 1:
            raise ValueError(f"window must be a positive integer, got {self.window!r}")

    @property
    def certain(self) -> bool:
        return self.kind == CERTAIN


class WalkBounds(NamedTuple):
    forward_depth: int
    backward_depth: int
    forward_move: int
    backward_move: int


def walk_bounds(automaton: PrefixAutomaton, s, window: int) -> WalkBounds:
    fd = automaton.forward_depth(s)
    bd = automaton.backward_depth(s)
    return WalkBounds(fd, bd, min(window, fd), min(window, bd))


# -- rows over node ids ------------------------------------------------------

def _step(aut: PrefixAutomaton, dist: dict) -> dict:
    out = aut.out_freqs()
    nxt: dict = {}
    for nid, p in dist.items():
        total = out[nid]
        if total == 0:
            nxt[nid] = nxt.get(nid, 0) + p
            continue
        for c in aut.child_ids(nid):
            q = p * Fraction(aut.freq_of(c), total)
            nxt[c] = nxt.get(c, 0) + q
    return nxt


def forward_row_ids(aut: PrefixAutomaton, scenario: Scenario, nid: int) -> dict:
    x = scenario.window
    dist = {nid: Fraction(1)}
    if scenario.certain:
        for _ in range(x):
            dist = _step(aut, dist)
            if all(aut.out_freq_of(n) == 0 for n in dist):
                break
        return dist
    fm = min(x, aut.heights()[nid])
    share = Fraction(1, fm + 1)
    row = {nid: share}
    for _ in range(fm):
        dist = _step(aut, dist)
        for n, p in dist.items():
            row[n] = row.get(n, 0) + p * share
    return row


def bayes_weight(aut: PrefixAutomaton, ancestor: int, nid: int) -> Fraction:
    """Pr(ancestor) * Pr(nid | ancestor) / Pr(nid) along the tree path."""
    out = aut.out_freqs()
    path = Fraction(1)
    node = nid
    while node != ancestor:
        parent = aut.parent_id(node)
        path *= Fraction(aut.freq_of(node), out[parent])
        node = parent
    return Fraction(aut.freq_of(ancestor)) * path / aut.freq_of(nid)


def backward_row_ids(aut: PrefixAutomaton, scenario: Scenario, nid: int) -> dict:
    x = scenario.window
    depth = len(aut.prefix_of(nid))
    if scenario.certain:
        if depth < x:
            return {ABSENT_ID: Fraction(1)}
        anc = nid
        for _ in range(x):
            anc = aut.parent_id(anc)
        # single candidate: the normalized Bayes weight is 1
        return {anc: Fraction(1)}
    bm = min(x, depth)
    row = {nid: Fraction(1, bm + 1)}
    anc = nid
    for _ in range(bm):
        anc = aut.parent_id(anc)
        row[anc] = bayes_weight(aut, anc, nid) / (bm + 1)
    total = sum(row.values())
    if total != 1:
        row = {k: v / total for k, v in row.items()}
    return row


def _to_prefixes(aut: PrefixAutomaton, row: dict) -> dict:
    key = lambda n: (0, ()) if n == ABSENT_ID else (1, aut.prefix_of(n))  # noqa: E731
    return {
        (ABSENT if n == ABSENT_ID else aut.prefix_of(n)): p
        for n, p in sorted(row.items(), key=lambda kv: key(kv[0]))
        if p
    }


def forward_correlations(automaton: PrefixAutomaton, scenario: Scenario, s1) -> dict:
    """Distribution of a case's next-release state given its current state ``s1``."""
    return _to_prefixes(automaton, forward_row_ids(automaton, scenario, automaton.id_of(s1)))


def backward_correlations(automaton: PrefixAutomaton, scenario: Scenario, s2) -> dict:
    """Distribution of a case's previous-release state given its current state ``s2``."""
    return _to_prefixes(automaton, backward_row_ids(automaton, scenario, automaton.id_of(s2)))


class CorrelationModel:
    """Rows of one direction/scenario over a universe of source states.

    Rows are computed on first access and cached. ``universe`` lists node
    ids in deterministic (prefix-sorted) order.
    """

    def __init__(self, automaton, scenario, direction, universe=None, truncated=False):
        if direction not in (FORWARD, BACKWARD):
            raise ValueError(f"direction must be {FORWARD!r} or {BACKWARD!r}")
        self.automaton = automaton
        self.scenario = scenario
        self.direction = direction
        self.universe = list(automaton.order if universe is None else universe)
        self.truncated = truncated
        self._rows: dict = {}
        self._fn = forward_row_ids if direction == FORWARD else backward_row_ids
        self.cache: dict = {}  # scratch space for the leakage solver

    def row_ids(self, nid: int) -> dict:
        row = self._rows.get(nid)
        if row is None:
            row = {k: v for k, v in self._fn(self.automaton, self.scenario, nid).items() if v}
            self._rows[nid] = row
        return row

    def row(self, s) -> dict:
        return _to_prefixes(self.automaton, self.row_ids(self.automaton.id_of(s)))

    @property
    def states(self) -> list:
        return [self.automaton.prefix_of(n) for n in self.universe]

    @property
    def rows(self) -> dict:
        return {self.automaton.prefix_of(n): self.row(self.automaton.prefix_of(n)) for n in self.universe}

    def __len__(self):
        return len(self.universe)

    def to_json(self) -> str:
        def enc(s):
            return None if s is ABSENT else list(s)

        rows = []
        for s, dist in self.rows.items():
            rows.append({
                "state": enc(s),
                "distribution": [{"state": enc(t), "p": f"{p.numerator}/{p.denominator}"} for t, p in dist.items()],
            })
        doc = {
            "direction": self.direction,
            "scenario": {"kind": self.scenario.kind, "window": self.scenario.window},
            "truncated": self.truncated,
            "rows": rows,
        }
        return json.dumps(doc, ensure_ascii=False, indent=1)


def correlation_model(
    automaton: PrefixAutomaton,
    scenario: Scenario,
    direction: str,
    min_support: int = 1,
    max_states: Optional[int] = None,
) -> CorrelationModel:
    """Correlation rows for every state with at least ``min_support`` cases.

    ``max_states`` keeps only the most probable states (ties broken by
    state order) and marks the model as truncated.
    """
    if automaton.case_count == 0:
        raise TplqError("cannot build correlations from an empty automaton")
    universe = [n for n in automaton.order if automaton.freq_of(n) >= min_support]
    truncated = False
    if max_states is not None and len(universe) > max_states:
        rank = {n: k for k, n in enumerate(universe)}
        keep = sorted(universe, key=lambda n: (-automaton.freq_of(n), rank[n]))[:max_states]
        universe = sorted(keep, key=rank.__getitem__)
        truncated = True
    return CorrelationModel(automaton, scenario, direction, universe, truncated)
