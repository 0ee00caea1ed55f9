"""
Custom Exceptions for syncsmith.

Every error raised by the library derives from SyncsmithError and carries a
human-readable message plus a details dict for reports and logs.
"""


class SyncsmithError(Exception):
    """Base exception for all syncsmith errors."""

    def __init__(self, message: str, details: dict = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class InvalidParameterError(SyncsmithError):
    """A precondition on an argument is violated."""
    pass


# =============================================================================
# EXECUTION MODEL ERRORS
# =============================================================================

class ModelError(SyncsmithError):
    """Error in the round-based execution model."""
    pass


class MalformedGraph(ModelError):
    """Round graph violates the active/passive arc rules."""

    def __init__(self, reason: str, round_no: int = None, node: int = None):
        where = f" at round {round_no}" if round_no is not None else ""
        super().__init__(
            f"Malformed graph{where}: {reason}",
            {"reason": reason, "round": round_no, "node": node}
        )


class UnknownState(ModelError):
    """State token outside the algorithm's state set."""

    def __init__(self, state, algorithm: str = ""):
        super().__init__(
            f"Unknown state {state!r}" + (f" for algorithm {algorithm}" if algorithm else ""),
            {"state": repr(state), "algorithm": algorithm}
        )


class HorizonTooSmall(ModelError):
    """Horizon ends before every node has started."""

    def __init__(self, horizon: int, last_start: int):
        super().__init__(
            f"Horizon {horizon} is smaller than the last start round {last_start}",
            {"horizon": horizon, "last_start": last_start}
        )


class InitialStateError(ModelError):
    """Initial state outside Q0 in a non-self-stabilizing run."""

    def __init__(self, state, node: int = None):
        super().__init__(
            f"State {state!r} is not an initial state"
            + (f" (node {node})" if node is not None else ""),
            {"state": repr(state), "node": node}
        )


# =============================================================================
# GRAPH ERRORS
# =============================================================================

class GraphError(SyncsmithError):
    """Error in graph construction or algebra."""
    pass


class SizeMismatch(GraphError):
    """Graphs over different node sets."""

    def __init__(self, left: int, right: int):
        super().__init__(
            f"Graph sizes differ: {left} != {right}",
            {"left": left, "right": right}
        )


class GraphSpecError(GraphError):
    """Graph shorthand or graph file could not be interpreted."""
    pass


# =============================================================================
# SEQUENCE ERRORS
# =============================================================================

class SequenceError(SyncsmithError):
    """Error while generating or certifying a state sequence."""
    pass


# =============================================================================
# ADVERSARY ERRORS
# =============================================================================

class AdversaryError(SyncsmithError):
    """Error while forging a counterexample execution."""
    pass


class PredictionMismatch(AdversaryError):
    """Simulation disagrees with a closed-form prediction."""

    def __init__(self, theorem: str, node: int, round_no: int, predicted, simulated):
        super().__init__(
            f"{theorem}: node {node} at round {round_no} is {simulated!r}, predicted {predicted!r}",
            {
                "theorem": theorem,
                "node": node,
                "round": round_no,
                "predicted": repr(predicted),
                "simulated": repr(simulated),
            }
        )


class Unenumerable(AdversaryError):
    """Operation needs a finite, enumerable state set."""

    def __init__(self, algorithm: str):
        super().__init__(
            f"Algorithm {algorithm} has an unbounded state space",
            {"algorithm": algorithm}
        )


class RingTooSmall(AdversaryError):
    """Requested ring is below the smallest admissible size."""

    def __init__(self, size: int, minimum: int):
        super().__init__(
            f"Ring of size {size} is too small (minimum {minimum})",
            {"size": size, "minimum": minimum}
        )


class SizeWarning(AdversaryError):
    """Forged network would exceed the configured node budget."""

    def __init__(self, nodes: int, budget: int):
        super().__init__(
            f"Forged network needs {nodes} nodes, budget is {budget}",
            {"nodes": nodes, "budget": budget}
        )


# =============================================================================
# FSM FILE ERRORS
# =============================================================================

class FsmError(SyncsmithError):
    """Error loading a declarative FSM document."""
    pass


class SchemaError(FsmError):
    """Document does not match the FSM schema."""
    pass


class PartialTable(FsmError):
    """Transition table misses an abstract key."""

    def __init__(self, state: str, key: str):
        super().__init__(
            f"Transition table has no row for state {state!r} receiving {key}",
            {"state": state, "key": key}
        )


class ClockRange(FsmError):
    """Clock value outside [0, P)."""

    def __init__(self, state: str, value: int, period: int):
        super().__init__(
            f"Clock of state {state!r} is {value}, outside [0, {period})",
            {"state": state, "value": value, "period": period}
        )
