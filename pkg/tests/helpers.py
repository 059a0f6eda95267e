"""Independent oracles and log generators shared by the tests."""
import itertools
import math
from fractions import Fraction

import numpy as np

from tplq import EventLog, canonicalize


def vertex_oracle(alpha, d, dp):
    """Exhaustive maximum of log(d.q / d'.q) over q in {1, e^alpha}^k, floored at 0."""
    k = len(d)
    corners = np.array(list(itertools.product((1.0, math.exp(alpha)), repeat=k)))
    num = corners @ np.asarray(d, dtype=float)
    den = corners @ np.asarray(dp, dtype=float)
    if np.any(den == 0):
        return math.inf
    with np.errstate(divide="ignore"):
        vals = np.log(num) - np.log(den)
    return max(0.0, float(vals.max()))


def random_sequences(rng, n_cases, n_acts, max_len=8):
    alphabet = [f"a{k}" for k in range(n_acts)]
    seqs = {}
    for c in range(n_cases):
        length = int(rng.integers(1, max_len + 1))
        seqs[f"case{c:04d}"] = [alphabet[int(rng.integers(0, n_acts))] for _ in range(length)]
    return seqs


def random_log(seed, n_cases=30, n_acts=4, max_len=8, complete_share=1.0):
    rng = np.random.default_rng(seed)
    raw = EventLog.from_sequences(random_sequences(rng, n_cases, n_acts, max_len))
    complete = [c for c in raw.case_ids() if rng.random() < complete_share]
    return canonicalize(raw, complete)


def truncation_oracle(log, prefix, steps):
    """Forward distribution after ``steps`` moves, counted directly over cases.

    Valid for logs where every case is complete: each case through ``prefix``
    lands on its trace cut at ``len(prefix) + steps``.
    """
    through = [t.activities for t in log if t.activities[: len(prefix)] == prefix]
    dist = {}
    for acts in through:
        key = acts[: len(prefix) + steps]
        dist[key] = dist.get(key, 0) + 1
    return {k: Fraction(v, len(through)) for k, v in dist.items()}


def uncertain_forward_oracle(log, prefix, window):
    through = [t.activities for t in log if t.activities[: len(prefix)] == prefix]
    height = max(len(a) for a in through) - len(prefix)
    moves = min(window, height)
    row = {}
    for y in range(moves + 1):
        for k, p in truncation_oracle(log, prefix, y).items():
            row[k] = row.get(k, 0) + p / (moves + 1)
    return row


def write_synthetic_csv(path, n_cases=1000, events_per_case=10, n_acts=12, seed=0):
    """Process-like log: each case walks a random activity graph, starting at staggered times."""
    rng = np.random.default_rng(seed)
    successors = {a: rng.choice(n_acts, size=3, replace=False) for a in range(n_acts)}
    base = 1_600_000_000_000
    lines = ["case,activity,timestamp"]
    for c in range(n_cases):
        t = base + c * 600_000 + int(rng.integers(0, 600_000))
        act = int(rng.integers(0, 3))
        for _ in range(events_per_case):
            lines.append(f"case{c:05d},act{act:02d},{t}")
            t += int(rng.integers(60_000, 7_200_000))
            act = int(rng.choice(successors[act]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
