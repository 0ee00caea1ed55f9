"""
syncsmith Package.

Simulates anonymous finite-state agents on dynamic graphs, forges the
counterexample executions that defeat bounded-memory mod-P clock
synchronization, and computes the matching state and time lower bounds.
"""

__version__ = "1.0.0"
__author__ = "syncsmith developers"
__description__ = "Counterexamples and bounds for clock synchronization on dynamic graphs"

# Core configuration
from .config import config, Theorem, SyncOutcome, MultisetMode, ExitCode

# Custom exceptions
from .exceptions import (
    SyncsmithError,
    InvalidParameterError,
    ModelError,
    MalformedGraph,
    UnknownState,
    HorizonTooSmall,
    InitialStateError,
    GraphError,
    SizeMismatch,
    GraphSpecError,
    SequenceError,
    AdversaryError,
    PredictionMismatch,
    Unenumerable,
    RingTooSmall,
    SizeWarning,
    FsmError,
    SchemaError,
    PartialTable,
    ClockRange,
)

__all__ = [
    # Version info
    "__version__",
    "__author__",

    # Config
    "config",
    "Theorem",
    "SyncOutcome",
    "MultisetMode",
    "ExitCode",

    # Exceptions
    "SyncsmithError",
    "InvalidParameterError",
    "ModelError",
    "MalformedGraph",
    "UnknownState",
    "HorizonTooSmall",
    "InitialStateError",
    "GraphError",
    "SizeMismatch",
    "GraphSpecError",
    "SequenceError",
    "AdversaryError",
    "PredictionMismatch",
    "Unenumerable",
    "RingTooSmall",
    "SizeWarning",
    "FsmError",
    "SchemaError",
    "PartialTable",
    "ClockRange",
]
