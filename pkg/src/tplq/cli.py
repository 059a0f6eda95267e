"""Command-line driver: load a log, simulate releases, track leakage, write reports.

Example::

    tplq --input sepsis.xes --split 0.5 --scenario certain --window 1-4 \\
         --epsilon 0.01 --releases 5 --seed 7 --out results --emit csv,json,svg
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import List, Optional

from .chart import emit_chart
from .correlation import CERTAIN, UNCERTAIN, Scenario
from .datasets import load_example, load_raw
from .errors import TplqError
from .eventlog import canonicalize, cases_ending_with, read_log, variant_multiset, write_csv
from .leakage import LeakageLedger, LeakageTracker, PrivacyMechanism
from .simulator import ReleasePlan, SplitConfig, laplace_perturb, releases

logger = logging.getLogger("tplq")

EMIT_CHOICES = ("csv", "json", "svg", "dot", "releases")
LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


@dataclass
class RunConfig:
    input: Optional[str] = None
    format: Optional[str] = None
    split: float = 0.5
    scenario: str = CERTAIN
    window: List[int] = field(default_factory=lambda: [1])
    epsilon: List[float] = field(default_factory=lambda: [0.01])
    releases: int = 5
    seed: int = 0
    out: str = "out"
    emit: List[str] = field(default_factory=lambda: ["csv"])
    max_pairs: Optional[int] = None
    min_support: int = 1
    end_activities: Optional[List[str]] = None

    def validate(self):
        if not self.input:
            raise ValueError("an input log is required (--input)")
        if self.format not in (None, "xes", "csv"):
            raise ValueError(f"format must be xes or csv, got {self.format!r}")
        SplitConfig(self.split)
        for w in self.window:
            Scenario(self.scenario, w)
        if not self.epsilon or any(not e > 0 for e in self.epsilon):
            raise ValueError("epsilon must be positive")
        if self.releases < 1:
            raise ValueError("releases must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        bad = set(self.emit) - set(EMIT_CHOICES)
        if bad:
            raise ValueError(f"unknown emit targets: {sorted(bad)}")
        if self.max_pairs is not None and self.max_pairs < 2:
            raise ValueError("max-pairs must be at least 2")


def _release_stats(rel) -> dict:
    return {
        "release": rel.release_index,
        "events": rel.n_events,
        "cases": len(rel),
        "complete": len(rel.complete_cases()),
        "partial": len(rel.partial_cases()),
        "variants": len(variant_multiset(rel)),
        "complete_cases": sorted(rel.complete_cases()),
    }


def load_source(cfg: RunConfig):
    """Canonical source log; ``example:<name>`` selects a bundled log."""
    if str(cfg.input).startswith("example:"):
        name = str(cfg.input).split(":", 1)[1]
        if cfg.end_activities is None:
            return load_example(name)
        raw = load_raw(name)
    else:
        raw = read_log(cfg.input, cfg.format)
    complete = set(raw.traces) if cfg.end_activities is None else cases_ending_with(raw, cfg.end_activities)
    return canonicalize(raw, complete)


def run_pipeline(cfg: RunConfig, window: Optional[int] = None, out_dir=None) -> LeakageLedger:
    """One scenario/window run; writes the requested outputs to ``out_dir``."""
    window = cfg.window[0] if window is None else window
    out = Path(cfg.out if out_dir is None else out_dir)
    out.mkdir(parents=True, exist_ok=True)

    source = load_source(cfg)
    scenario = Scenario(cfg.scenario, window)
    plan = ReleasePlan(scenario, cfg.releases, tuple(cfg.epsilon), cfg.seed)
    tracker = LeakageTracker(scenario, list(cfg.epsilon), min_support=cfg.min_support, max_pairs=cfg.max_pairs)

    manifest = {"plan": {"scenario": scenario.kind, "window": window, "max_releases": cfg.releases,
                         "epsilon": list(cfg.epsilon), "split": cfg.split, "seed": cfg.seed},
                "input": str(cfg.input), "releases": []}
    release_dir = out / "releases"
    for rel in releases(source, SplitConfig(cfg.split), plan):
        mech = PrivacyMechanism(plan.epsilon(rel.release_index))
        noisy = laplace_perturb(variant_multiset(rel), mech, [cfg.seed, rel.release_index, 1])
        tracker.update_horizon(rel, mech.epsilon)
        stats = _release_stats(rel)
        stats["noisy_variant_total"] = noisy.total
        manifest["releases"].append(stats)
        if "releases" in cfg.emit:
            release_dir.mkdir(exist_ok=True)
            name = f"release_{rel.release_index:04d}"
            with open(release_dir / f"{name}.csv", "w", encoding="utf-8", newline="") as fh:
                write_csv(rel, fh)
            noisy_rows = [{"variant": list(v), "count": noisy.entries[v], "raw": noisy.raw[v]} for v in sorted(noisy.entries)]
            (release_dir / f"{name}_noisy.json").write_text(json.dumps(noisy_rows, ensure_ascii=False, indent=1), encoding="utf-8")

    ledger = tracker.ledger
    if "csv" in cfg.emit:
        with open(out / "ledger.csv", "w", encoding="utf-8", newline="") as fh:
            ledger.write_csv(fh)
    if "json" in cfg.emit:
        (out / "ledger.json").write_text(ledger.to_json(), encoding="utf-8")
    if "svg" in cfg.emit:
        emit_chart(ledger, out / "ledger.svg")
    if "dot" in cfg.emit and tracker.automaton is not None:
        (out / "automaton.dot").write_text(tracker.automaton.to_dot(), encoding="utf-8")
    if "releases" in cfg.emit:
        (release_dir / "manifest.json").write_text(json.dumps(manifest, ensure_ascii=False, indent=1), encoding="utf-8")
    return ledger


def run_sweep(cfg: RunConfig) -> dict:
    """One ledger per window; several windows go to ``window_<N>`` subdirectories."""
    cfg.validate()
    if len(cfg.window) == 1:
        return {cfg.window[0]: run_pipeline(cfg)}
    return {w: run_pipeline(cfg, w, Path(cfg.out) / f"window_{w}") for w in cfg.window}


def _int_list(text: str) -> List[int]:
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _float_list(text: str) -> List[float]:
    return [float(p) for p in str(text).split(",") if p.strip()]


def _str_list(text: str) -> List[str]:
    return [p.strip() for p in str(text).split(",") if p.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tplq", description=__doc__.split("\n\n")[0])
    ap.add_argument("--config", help="JSON file with any of the options below; flags override it")
    ap.add_argument("--input", help="event log (.xes, .csv, optionally .gz) or example:<name> for a bundled log")
    ap.add_argument("--format", choices=["xes", "csv"])
    ap.add_argument("--split", type=float, help="share of events in the initial release (default 0.5)")
    ap.add_argument("--scenario", choices=[CERTAIN, UNCERTAIN])
    ap.add_argument("--window", type=_int_list, help="window size, list or range, e.g. 2 or 1-4")
    ap.add_argument("--epsilon", type=_float_list, help="privacy budget per release (comma list = schedule)")
    ap.add_argument("--releases", type=int, help="maximum number of releases (default 5)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--emit", type=_str_list, help="comma list of " + ",".join(EMIT_CHOICES))
    ap.add_argument("--max-pairs", dest="max_pairs", type=int, help="cap on states considered in the pair supremum")
    ap.add_argument("--min-support", dest="min_support", type=int, help="minimum cases per state (default 1)")
    ap.add_argument("--end-activities", dest="end_activities", type=_str_list,
                    help="cases ending with one of these are complete (default: all cases are)")
    return ap


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            values.update(json.load(fh))
        for key in ("window", "epsilon", "emit", "end_activities"):
            if key in values and not isinstance(values[key], list) and values[key] is not None:
                values[key] = {"window": _int_list, "epsilon": _float_list}.get(key, _str_list)(values[key])
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key in known:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return RunConfig(**values)


def _setup_logging():
    level = LOG_LEVELS.get(os.environ.get("TPLQ_LOG_LEVEL", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        ledgers = run_sweep(cfg)
    except (TplqError, ValueError, OSError, json.JSONDecodeError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(err, ensure_ascii=False), file=sys.stderr)
        return 1
    for w, ledger in ledgers.items():
        last = ledger.records[-1]
        print(f"window {w}: {ledger.horizon} releases, final bpl={last.bpl:.6g} fpl={last.fpl:.6g} tpl={last.tpl:.6g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
