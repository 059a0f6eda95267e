"""Full-history transition system (prefix automaton) over canonical traces.

States are activity prefixes (tuples). The empty prefix ``()`` is the unique
start state; every case contributes one transition per activity of its
trace, so the state graph is a tree rooted at ``()``.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import (
    CanonicalizationError,
    IncrementalityError,
    UndefinedSuccessorError,
    UnknownStateError,
)
from .eventlog import END, EventLog

ROOT = ()


class PrefixAutomaton:
    """Prefix tree with per-edge case counts.

    Use :meth:`build` or :meth:`extend`; both return new snapshots and
    never modify an existing automaton.
    """

    def __init__(self):
        self._prefix: list = []
        self._index: dict = {}
        self._parent: list = []
        self._children: list = []
        self._freq: list = []
        self._cases: dict = {}
        self._height = None
        self._out = None
        self._order = None

    # -- construction ----------------------------------------------------

    @classmethod
    def build(cls, log: EventLog) -> "PrefixAutomaton":
        aut = cls()
        aut._add(log)
        return aut

    def extend(self, newer_log: EventLog) -> "PrefixAutomaton":
        """Return the automaton of ``newer_log``, reusing the counts already recorded here."""
        gone = set(self._cases) - set(newer_log.traces)
        if gone:
            raise IncrementalityError(f"cases vanished from the newer log: {sorted(gone)[:5]}")
        new = self._copy()
        new._add(newer_log)
        return new

    def _copy(self) -> "PrefixAutomaton":
        new = PrefixAutomaton()
        new._prefix = list(self._prefix)
        new._index = dict(self._index)
        new._parent = list(self._parent)
        new._children = [dict(c) for c in self._children]
        new._freq = list(self._freq)
        new._cases = dict(self._cases)
        return new

    def _node(self, prefix, parent):
        nid = len(self._prefix)
        self._prefix.append(prefix)
        self._index[prefix] = nid
        self._parent.append(parent)
        self._children.append({})
        self._freq.append(0)
        return nid

    def _add(self, log: EventLog):
        if not log.canonical:
            raise CanonicalizationError("the automaton is built from canonicalized logs")
        if len(log) and not self._prefix:
            self._node(ROOT, -1)
        for cid in log.case_ids():
            acts = log.traces[cid].activities
            old = self._cases.get(cid)
            if old is None:
                self._freq[0] += 1
                start = 0
            else:
                if acts[: len(old)] != old:
                    raise IncrementalityError(
                        f"case {cid!r}: {acts!r} does not extend the recorded trace {old!r}"
                    )
                start = len(old)
            node = self._index[acts[:start]]
            for k in range(start, len(acts)):
                child = self._children[node].get(acts[k])
                if child is None:
                    child = self._node(acts[: k + 1], node)
                    self._children[node][acts[k]] = child
                self._freq[child] += 1
                node = child
            self._cases[cid] = acts

    # -- structure -------------------------------------------------------

    @property
    def case_count(self) -> int:
        return self._freq[0] if self._freq else 0

    @property
    def states(self) -> list:
        return [self._prefix[i] for i in self.order]

    @property
    def order(self) -> list:
        """Node ids sorted by prefix (deterministic state order)."""
        if self._order is None:
            self._order = sorted(range(len(self._prefix)), key=self._prefix.__getitem__)
        return self._order

    def __len__(self):
        return len(self._prefix)

    def __contains__(self, prefix):
        return tuple(prefix) in self._index

    @property
    def start_states(self) -> set:
        return {ROOT} if self._prefix else set()

    @property
    def end_states(self) -> set:
        return {p for p in self._prefix if p and p[-1] == END}

    @property
    def transitions(self) -> dict:
        """``(source, activity, target) -> frequency``."""
        out = {}
        for nid in range(1, len(self._prefix)):
            p = self._prefix[nid]
            out[(p[:-1], p[-1], p)] = self._freq[nid]
        return out

    @property
    def cases(self) -> dict:
        return dict(self._cases)

    def __eq__(self, other):
        if not isinstance(other, PrefixAutomaton):
            return NotImplemented
        return (
            self.case_count == other.case_count
            and self.transitions == other.transitions
            and set(self._index) == set(other._index)
            and self._cases == other._cases
        )

    def __repr__(self):
        return f"PrefixAutomaton(states={len(self)}, cases={self.case_count})"

    def id_of(self, prefix) -> int:
        try:
            return self._index[tuple(prefix)]
        except KeyError:
            raise UnknownStateError(f"unknown state {tuple(prefix)!r}") from None

    def prefix_of(self, nid: int) -> tuple:
        return self._prefix[nid]

    def parent_id(self, nid: int) -> int:
        return self._parent[nid]

    def child_ids(self, nid: int) -> list:
        return list(self._children[nid].values())

    def freq_of(self, nid: int) -> int:
        return self._freq[nid]

    def out_freq_of(self, nid: int) -> int:
        return self.out_freqs()[nid]

    def out_freqs(self) -> list:
        if self._out is None:
            out = [0] * len(self._prefix)
            for nid in range(1, len(self._prefix)):
                out[self._parent[nid]] += self._freq[nid]
            self._out = out
        return self._out

    def heights(self) -> list:
        """Distance from every node to its furthest descendant."""
        if self._height is None:
            h = [0] * len(self._prefix)
            for nid in range(len(self._prefix) - 1, 0, -1):
                p = self._parent[nid]
                if h[nid] + 1 > h[p]:
                    h[p] = h[nid] + 1
            self._height = h
        return self._height

    # -- queries ---------------------------------------------------------

    def children(self, s) -> list:
        return sorted(self._prefix[c] for c in self._children[self.id_of(s)].values())

    def incoming_frequency(self, s) -> int:
        return self._freq[self.id_of(s)]

    def outgoing_frequency(self, s) -> int:
        return self.out_freq_of(self.id_of(s))

    def is_end(self, s) -> bool:
        s = tuple(s)
        return bool(s) and s[-1] == END

    def forward_depth(self, s) -> int:
        return self.heights()[self.id_of(s)]

    def backward_depth(self, s) -> int:
        self.id_of(s)
        return len(tuple(s))

    def state_probability(self, s) -> Fraction:
        """Share of cases whose trace passes through ``s``."""
        nid = self.id_of(s)
        return Fraction(self._freq[nid], self.case_count)

    def adjacent_probability(self, s1, s2) -> Fraction:
        """One-step probability of moving from ``s1`` to ``s2``.

        End states absorb: a walk that reached the end stays there.
        """
        n1 = self.id_of(s1)
        s2 = tuple(s2)
        out = self.out_freq_of(n1)
        if out == 0:
            if self.is_end(s1):
                return Fraction(1 if s2 == tuple(s1) else 0)
            raise UndefinedSuccessorError(f"state {tuple(s1)!r} has no outgoing transitions")
        n2 = self._index.get(s2)
        if n2 is None or self._parent[n2] != n1:
            return Fraction(0)
        return Fraction(self._freq[n2], out)

    def to_dot(self) -> str:
        lines = ["digraph prefix_automaton {", "  rankdir=LR;"]
        n = self.case_count
        for nid in self.order:
            p = self._prefix[nid]
            label = _dot_escape("<" + ",".join(p) + ">") + "\\n" + str(Fraction(self._freq[nid], n))
            shape = "doublecircle" if p and p[-1] == END else "circle"
            lines.append(f'  s{nid} [label="{label}", shape={shape}];')
        for nid in range(1, len(self._prefix)):
            p = self._prefix[nid]
            lines.append(f'  s{self._parent[nid]} -> s{nid} [label="{_dot_escape(p[-1])} ({self._freq[nid]})"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def build(log: EventLog) -> PrefixAutomaton:
    return PrefixAutomaton.build(log)


def extend(automaton: PrefixAutomaton, newer_log: EventLog) -> PrefixAutomaton:
    return automaton.extend(newer_log)
