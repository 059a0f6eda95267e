"""Privacy leakage of a Laplace mechanism applied at every release.

Single-release leakage equals the budget. Across releases the leakage
accumulates through temporal correlations:

    BPL_t = AL_B(BPL_{t-1}) + eps_t,   BPL_1 = eps_1
    FPL_i = AL_F(FPL_{i+1}) + eps_i,   FPL_horizon = eps_horizon
    TPL   = BPL + FPL - PL

``AL(alpha)`` is the largest value of :func:`accumulate` over ordered pairs
of correlation rows.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Union

import numpy as np

from . import kernels
from .automaton import PrefixAutomaton
from .correlation import (
    ABSENT,
    ABSENT_ID,
    BACKWARD,
    FORWARD,
    CorrelationModel,
    Scenario,
    correlation_model,
)
from .eventlog import EventLog

logger = logging.getLogger(__name__)

LEDGER_COLUMNS = [
    "release", "epsilon", "pl", "bpl", "fpl", "tpl", "argmax_backward_pair", "argmax_forward_pair",
]


@dataclass(frozen=True)
class PrivacyMechanism:
    """Laplace mechanism with noise scale ``sensitivity / epsilon``."""

    epsilon: float
    sensitivity: int = 1

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        if int(self.sensitivity) != self.sensitivity or self.sensitivity < 1:
            raise ValueError(f"sensitivity must be a positive integer, got {self.sensitivity!r}")

    @property
    def scale(self) -> float:
        return self.sensitivity / self.epsilon


def single_release_leakage(mech: PrivacyMechanism) -> float:
    # the likelihood ratio of two Laplace densities whose centres differ by the
    # sensitivity is bounded by exp(sensitivity / scale) = exp(epsilon)
    return mech.sensitivity / mech.scale


def accumulate(alpha_prev: float, d, d_prime) -> float:
    """Largest log((d.q) / (d'.q)) over q in [1, e^alpha_prev]^k, floored at 0.

    ``d`` and ``d_prime`` are equal-length sequences or mappings over a shared
    index set (missing keys count as 0); both are rescaled to unit mass. Returns ``math.inf`` when ``d_prime``
    carries no mass at all.
    """
    if isinstance(d, Mapping) or isinstance(d_prime, Mapping):
        keys = list(dict.fromkeys(list(d) + list(d_prime)))
        d = [float(d.get(k, 0)) for k in keys]
        d_prime = [float(d_prime.get(k, 0)) for k in keys]
    if len(d) != len(d_prime):
        raise ValueError("d and d_prime must cover the same indices")
    if alpha_prev < 0:
        raise ValueError("alpha_prev must be non-negative")
    return kernels.accumulate_dense(float(alpha_prev), list(map(float, d)), list(map(float, d_prime)))


def temporal_leakage(bpl: float, fpl: float, pl: float) -> float:
    if math.isinf(bpl) or math.isinf(fpl) or math.isinf(pl):
        return math.inf
    return bpl + fpl - pl


@dataclass(frozen=True)
class LeakagePair:
    state_a: object
    state_b: object
    accumulated: float


# -- the pairwise supremum ----------------------------------------------------

def _disjoint_pair(model: CorrelationModel):
    """First ordered pair whose rows have disjoint supports, searching from the first state."""
    if "disjoint" not in model.cache:
        found = None
        if len(model.universe) > 1:
            first = model.universe[0]
            support = model.row_ids(first).keys()
            for nid in model.universe[1:]:
                if support.isdisjoint(model.row_ids(nid).keys()):
                    found = (first, nid)
                    break
        model.cache["disjoint"] = found
    return model.cache["disjoint"]


def _compiled(model: CorrelationModel):
    """Deduplicated rows as CSR arrays plus the representative node id of each row."""
    if "csr" not in model.cache:
        absent_col = len(model.automaton)
        seen = {}
        reps, indptr, indices, data = [], [0], [], []
        for nid in model.universe:
            row = model.row_ids(nid)
            key = frozenset(row.items())
            if key in seen:
                continue
            seen[key] = nid
            reps.append(nid)
            for col, p in sorted((absent_col if c == ABSENT_ID else c, p) for c, p in row.items()):
                indices.append(col)
                data.append(float(p))
            indptr.append(len(indices))
        model.cache["csr"] = (
            np.asarray(indptr, dtype=np.int64),
            np.asarray(indices, dtype=np.int64),
            np.asarray(data, dtype=np.float64),
            reps,
        )
    return model.cache["csr"]


def _state(model, nid):
    return ABSENT if nid == ABSENT_ID else model.automaton.prefix_of(nid)


def accumulated_leakage(model: CorrelationModel, alpha: float):
    """``(AL(alpha), maximizing LeakagePair or None)`` for one correlation model."""
    if alpha <= 0 or len(model.universe) < 2:
        return 0.0, None
    if math.isinf(alpha):
        return math.inf, None
    pair = _disjoint_pair(model)
    if pair is not None:
        # disjoint supports reach the box bound exactly
        return alpha, LeakagePair(_state(model, pair[0]), _state(model, pair[1]), alpha)
    indptr, indices, data, reps = _compiled(model)
    value, i, j = kernels.pair_sup(indptr, indices, data, float(alpha))
    if i < 0:
        return 0.0, None
    return value, LeakagePair(_state(model, reps[i]), _state(model, reps[j]), value)


# -- chains -------------------------------------------------------------------

@dataclass
class ChainResult:
    values: List[float]
    pairs: List[Optional[LeakagePair]]

    @property
    def value(self) -> float:
        return self.values[-1]


def _model_at(models, k):
    if isinstance(models, CorrelationModel):
        return models
    return models[k]


def _eps_at(eps, release):
    if isinstance(eps, (int, float)):
        return float(eps)
    return float(eps[min(release, len(eps)) - 1])


def backward_chain_detail(models, eps, t: int) -> ChainResult:
    """BPL_1..BPL_t; ``models[k]`` describes the step from release k+1 to k+2."""
    if t < 1:
        raise ValueError("release index starts at 1")
    values, pairs = [_eps_at(eps, 1)], [None]
    for r in range(2, t + 1):
        al, pair = accumulated_leakage(_model_at(models, r - 2), values[-1])
        values.append(al + _eps_at(eps, r))
        pairs.append(pair)
    return ChainResult(values, pairs)


def backward_chain(models, eps, t: int) -> float:
    return backward_chain_detail(models, eps, t).value


def forward_chain_detail(models, eps, i: int, horizon: int) -> ChainResult:
    """FPL_horizon down to FPL_i (``values`` ordered from the horizon backwards)."""
    if not 1 <= i <= horizon:
        raise ValueError("need 1 <= i <= horizon")
    values, pairs = [_eps_at(eps, horizon)], [None]
    for r in range(horizon - 1, i - 1, -1):
        al, pair = accumulated_leakage(_model_at(models, r - 1), values[-1])
        values.append(al + _eps_at(eps, r))
        pairs.append(pair)
    return ChainResult(values, pairs)


def forward_chain(models, eps, i: int, horizon: int) -> float:
    return forward_chain_detail(models, eps, i, horizon).value


# -- ledger ---------------------------------------------------------------------

def format_state(s) -> str:
    if s is ABSENT:
        return "⊥"
    return "<" + ",".join(s) + ">"


def format_pair(pair: Optional[LeakagePair]) -> str:
    if pair is None:
        return ""
    return f"{format_state(pair.state_a)};{format_state(pair.state_b)}"


@dataclass
class LeakageRecord:
    release: int
    epsilon: float
    pl: float
    bpl: float
    fpl: float
    tpl: float
    argmax_backward: Optional[LeakagePair] = None
    argmax_forward: Optional[LeakagePair] = None
    truncated: bool = False

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.tpl)

    def as_row(self) -> list:
        return [
            self.release, repr(self.epsilon), repr(self.pl), repr(self.bpl), repr(self.fpl), repr(self.tpl),
            format_pair(self.argmax_backward), format_pair(self.argmax_forward),
        ]


@dataclass
class LeakageLedger:
    records: List[LeakageRecord] = field(default_factory=list)
    scenario: Optional[Scenario] = None

    @property
    def horizon(self) -> int:
        return len(self.records)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, k):
        return self.records[k]

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.records]

    def write_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(LEDGER_COLUMNS)
        for rec in self.records:
            writer.writerow(rec.as_row())

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    def to_dict(self) -> dict:
        def pair(p):
            if p is None:
                return None
            enc = lambda s: None if s is ABSENT else list(s)  # noqa: E731
            return {"state_a": enc(p.state_a), "state_b": enc(p.state_b), "accumulated": p.accumulated}

        return {
            "scenario": None if self.scenario is None else {"kind": self.scenario.kind, "window": self.scenario.window},
            "horizon": self.horizon,
            "records": [
                {
                    "release": r.release, "epsilon": r.epsilon, "pl": r.pl, "bpl": r.bpl, "fpl": r.fpl,
                    "tpl": r.tpl, "argmax_backward_pair": pair(r.argmax_backward),
                    "argmax_forward_pair": pair(r.argmax_forward), "truncated": r.truncated,
                    "unbounded": r.unbounded,
                }
                for r in self.records
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)


class LeakageTracker:
    """Recomputes BPL/FPL/TPL every time a new cumulative release arrives.

    Correlations always come from the automaton of the latest release, and
    the reported FPL is the one of release 1 evaluated at the current horizon.
    """

    def __init__(
        self,
        scenario: Scenario,
        epsilon: Union[float, Sequence[float]] = 0.01,
        sensitivity: int = 1,
        min_support: int = 1,
        max_pairs: Optional[int] = None,
    ):
        self.scenario = scenario
        self.epsilon = epsilon
        self.sensitivity = sensitivity
        self.min_support = min_support
        self.max_pairs = max_pairs
        self.automaton: Optional[PrefixAutomaton] = None
        self.ledger = LeakageLedger(scenario=scenario)
        self._eps: list = []

    def update_horizon(self, log: EventLog, epsilon: Optional[float] = None) -> LeakageLedger:
        t = self.ledger.horizon + 1
        eps_t = _eps_at(self.epsilon, t) if epsilon is None else float(epsilon)
        mech = PrivacyMechanism(eps_t, self.sensitivity)
        self._eps.append(eps_t)
        self.automaton = PrefixAutomaton.build(log) if self.automaton is None else self.automaton.extend(log)
        pl = single_release_leakage(mech)
        truncated = False
        if t == 1:
            bpl = fpl = pl
            bpair = fpair = None
        else:
            back = correlation_model(self.automaton, self.scenario, BACKWARD, self.min_support, self.max_pairs)
            fwd = correlation_model(self.automaton, self.scenario, FORWARD, self.min_support, self.max_pairs)
            truncated = back.truncated or fwd.truncated
            bres = backward_chain_detail(back, self._eps, t)
            fres = forward_chain_detail(fwd, self._eps, 1, t)
            bpl, bpair = bres.value, bres.pairs[-1]
            fpl, fpair = fres.value, fres.pairs[-1]
        rec = LeakageRecord(t, eps_t, pl, bpl, fpl, temporal_leakage(bpl, fpl, pl), bpair, fpair, truncated)
        self.ledger.records.append(rec)
        _log_record(rec)
        return self.ledger


def _log_record(rec: LeakageRecord) -> None:
    logger.info("release %d: pl=%.6g bpl=%.6g fpl=%.6g tpl=%.6g", rec.release, rec.pl, rec.bpl, rec.fpl, rec.tpl)
