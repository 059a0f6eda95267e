import numpy as np
import pytest

from helpers import random_log
from tplq import (
    CERTAIN,
    END,
    START,
    UNCERTAIN,
    EventLog,
    PrivacyMechanism,
    ReleasePlan,
    Scenario,
    SplitConfig,
    canonicalize,
    generate_release,
    laplace_perturb,
    releases,
    split_log,
    variant_multiset,
)
from tplq.errors import CanonicalizationError, EndOfStream
from tplq.simulator import laplace_noise


def _events(log):
    return sorted((t.case_id, k, ev.activity) for t in log for k, ev in enumerate(t.events()))


def test_split_config_bounds():
    with pytest.raises(ValueError):
        SplitConfig(0)
    with pytest.raises(ValueError):
        SplitConfig(1.5)


def test_split_requires_canonical():
    with pytest.raises(CanonicalizationError):
        split_log(EventLog.from_sequences({"1": "ab"}), SplitConfig())


def test_split_counts_and_conservation(claims):
    initial, reservoir = split_log(claims, SplitConfig(0.5))
    assert initial.n_events == int(np.ceil(claims.n_events * 0.5))
    assert initial.release_index == 1
    rebuilt = set(_events(initial))
    for cid, queue in reservoir.pending.items():
        offset = initial.traces[cid].n_events if cid in initial.traces else 0
        rebuilt |= {(cid, offset + k, a) for k, (a, _) in enumerate(queue)}
    assert sorted(rebuilt) == _events(claims)
    # cases in the initial part only hold prefixes of their full traces
    for cid, t in initial.traces.items():
        full = claims.traces[cid].activities
        assert full[: len(t.activities)] == t.activities or (t.complete and t.activities == full)


def test_split_respects_time_order(claims):
    initial, reservoir = split_log(claims, SplitConfig(0.3))
    cut = max(ev.timestamp for t in initial for ev in t.events())
    for queue in reservoir.pending.values():
        assert all(ts >= cut for _, ts in queue)


def test_full_split_is_source(l1):
    initial, reservoir = split_log(l1, SplitConfig(1.0))
    assert reservoir.empty
    assert {c: t.activities for c, t in initial.traces.items()} == {c: t.activities for c, t in l1.traces.items()}


def test_certain_window_two_step():
    raw = EventLog.from_sequences({"x": "abcd"})
    src = canonicalize(raw, raw.traces)
    initial, res = split_log(src, SplitConfig(0.25))
    assert initial.traces["x"].activities == (START, "a")
    plan = ReleasePlan(Scenario(CERTAIN, 2))
    nxt, res = generate_release(initial, res, plan, 2)
    assert nxt.traces["x"].activities == (START, "a", "b", "c")
    last, res = generate_release(nxt, res, plan, 3)
    assert last.traces["x"].activities == (START, "a", "b", "c", "d", END)
    assert last.traces["x"].complete
    with pytest.raises(EndOfStream):
        generate_release(last, res, plan, 4)


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("kind", [CERTAIN, UNCERTAIN])
def test_release_sequence_invariants(seed, kind):
    src = random_log(seed, n_cases=40, n_acts=4, max_len=9)
    window = 1 + seed % 4
    plan = ReleasePlan(Scenario(kind, window), max_releases=50, rng_seed=seed)
    seq = list(releases(src, SplitConfig(0.4), plan))
    for prev, cur in zip(seq, seq[1:]):
        assert cur.release_index == prev.release_index + 1
        for cid, t in prev.traces.items():
            now = cur.traces[cid].activities
            assert now[: len(t.activities)] == t.activities
            gained = cur.traces[cid].n_events - t.n_events
            assert 0 <= gained <= window
            if kind == CERTAIN and not cur.traces[cid].complete and not t.complete:
                assert gained == window
            if t.complete:
                assert now == t.activities
    # the stream runs dry and every case ends up complete and unchanged
    final = seq[-1]
    assert _events(final) == _events(src)
    assert final.complete_cases() == src.complete_cases()


def test_uncertain_is_seed_deterministic(claims):
    plan = ReleasePlan(Scenario(UNCERTAIN, 2), rng_seed=42)
    a = [r.traces for r in releases(claims, SplitConfig(0.5), plan)]
    b = [r.traces for r in releases(claims, SplitConfig(0.5), plan)]
    assert a == b
    other = [r.traces for r in releases(claims, SplitConfig(0.5), ReleasePlan(Scenario(UNCERTAIN, 2), rng_seed=43))]
    assert other != a


def test_max_releases_enforced(claims):
    plan = ReleasePlan(Scenario(CERTAIN, 1), max_releases=3)
    assert [r.release_index for r in releases(claims, SplitConfig(0.5), plan)] == [1, 2, 3]


def test_dormant_cases_activate():
    raw = EventLog.from_sequences({"early": "abcdef", "late": "xy"})
    src = canonicalize(raw, raw.traces)
    seq = list(releases(src, SplitConfig(0.2), ReleasePlan(Scenario(CERTAIN, 1), max_releases=20)))
    assert "late" not in seq[0].traces
    assert "late" in seq[-1].traces and seq[-1].traces["late"].complete


def test_epsilon_schedule():
    plan = ReleasePlan(Scenario(), epsilon_schedule=(0.1, 0.2))
    assert [plan.epsilon(k) for k in (1, 2, 3)] == [0.1, 0.2, 0.2]
    with pytest.raises(ValueError):
        ReleasePlan(Scenario(), epsilon_schedule=(0.1, -1))


def test_laplace_perturb(l1):
    counts = variant_multiset(l1)
    quiet = laplace_perturb(counts, PrivacyMechanism(1e9), seed=1)
    assert quiet.entries == counts.entries
    a = laplace_perturb(counts, PrivacyMechanism(0.5), seed=[3, 1])
    b = laplace_perturb(counts, PrivacyMechanism(0.5), seed=[3, 1])
    assert a == b
    assert all(v >= 0 and isinstance(v, int) for v in a.entries.values())
    assert set(a.raw) == set(counts.entries)


@pytest.mark.parametrize("eps", [0.01, 0.1, 1.0])
def test_laplace_variance(eps):
    draws = laplace_noise(PrivacyMechanism(eps), 100_000, np.random.default_rng(11))
    assert abs(draws.var() / (2 / eps**2) - 1) < 0.1
