"""Temporal privacy leakage of differentially private event log releases.

Typical use::

    from tplq import LeakageTracker, Scenario
    tracker = LeakageTracker(Scenario("certain", 2), epsilon=0.01)
    for release in cumulative_releases:
        ledger = tracker.update_horizon(release)
"""
from .automaton import PrefixAutomaton, build, extend
from .correlation import (
    ABSENT,
    BACKWARD,
    CERTAIN,
    FORWARD,
    UNCERTAIN,
    CorrelationModel,
    Scenario,
    backward_correlations,
    correlation_model,
    forward_correlations,
)
from .errors import (
    CanonicalizationError,
    EndOfStream,
    IncrementalityError,
    LogParseError,
    SchemaError,
    TplqError,
    UndefinedSuccessorError,
    UnknownStateError,
)
from .eventlog import END, START, EventLog, Trace, canonicalize, parse_csv, parse_xes, read_log, variant_multiset
from .leakage import (
    LeakageLedger,
    LeakagePair,
    LeakageTracker,
    PrivacyMechanism,
    accumulate,
    backward_chain,
    forward_chain,
    single_release_leakage,
    temporal_leakage,
)
from .simulator import ReleasePlan, SplitConfig, generate_release, laplace_perturb, releases, split_log

__version__ = "0.1.0"
