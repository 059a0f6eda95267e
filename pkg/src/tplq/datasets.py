"""Small logs shipped with the package, for tests, demos and the CLI."""
from __future__ import annotations

from importlib import resources

from .eventlog import EventLog, canonicalize, parse_csv

# name -> cases that are complete (None: every case)
EXAMPLES = {
    "l1": ("c1", "c2"),
    "single_variant": None,
    "toy_claims": None,
}


def example_path(name: str):
    if name not in EXAMPLES:
        raise ValueError(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}")
    return resources.files("tplq") / "data" / f"{name}.csv"


def load_raw(name: str) -> EventLog:
    with example_path(name).open("rb") as fh:
        return parse_csv(fh)


def load_example(name: str) -> EventLog:
    """Canonical version of a bundled log."""
    raw = load_raw(name)
    complete = EXAMPLES[name]
    return canonicalize(raw, raw.traces if complete is None else complete)
