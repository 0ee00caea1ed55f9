"""
Data models and schemas for reports, verdicts and input documents.
"""

from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..config import SyncOutcome, Theorem


# =============================================================================
# VERDICTS AND CERTIFICATES
# =============================================================================

class SyncViolation(BaseModel):
    """First obstruction met while scanning candidate sync suffixes."""
    model_config = ConfigDict(frozen=True)

    node: int
    round: int
    expected: int
    actual: int


class SyncVerdict(BaseModel):
    """Result of the mod-P synchronization check over a finite trace."""
    model_config = ConfigDict(frozen=True)

    outcome: SyncOutcome
    t0: Optional[int] = None
    c: Optional[int] = None
    violation: Optional[SyncViolation] = None

    @property
    def synchronized(self) -> bool:
        return self.outcome == SyncOutcome.SYNCHRONIZED

    @classmethod
    def synchronized_at(cls, t0: int, c: int) -> "SyncVerdict":
        return cls(outcome=SyncOutcome.SYNCHRONIZED, t0=t0, c=c)

    @classmethod
    def failed(cls, violation: SyncViolation) -> "SyncVerdict":
        return cls(outcome=SyncOutcome.NOT_SYNCHRONIZED, violation=violation)


class PeriodicityCertificate(BaseModel):
    """
    Witness (ell, L) of ultimate periodicity: values[r + L] == values[r]
    for every r >= ell - 1.
    """
    model_config = ConfigDict(frozen=True)

    ell: int = Field(..., ge=1)
    L: int = Field(..., ge=1)

    def verify(self, values: Sequence) -> bool:
        """Replay a tape and confirm the certificate on every checkable index."""
        for r in range(self.ell - 1, len(values) - self.L):
            if values[r + self.L] != values[r]:
                return False
        return True


# =============================================================================
# GRAPH FILES
# =============================================================================

class GraphDocument(BaseModel):
    """Eventually-periodic dynamic graph as stored on disk."""

    n: int = Field(..., ge=1)
    prefix: List[List[Tuple[int, int]]] = Field(default_factory=list)
    period: List[List[Tuple[int, int]]]
    starts: List[int]

    @model_validator(mode="after")
    def check_shape(self):
        if not self.period:
            raise ValueError("period must contain at least one round")
        if len(self.starts) != self.n:
            raise ValueError(f"starts has {len(self.starts)} entries for {self.n} nodes")
        for rnd in self.prefix + self.period:
            for i, j in rnd:
                if not (0 <= i < self.n and 0 <= j < self.n):
                    raise ValueError(f"arc ({i}, {j}) outside [0, {self.n})")
        return self


# =============================================================================
# FSM FILES
# =============================================================================

class SaturatingMode(BaseModel):
    """Counts saturated at kappa."""
    saturating: int = Field(..., ge=1)


class FsmDeltaRow(BaseModel):
    """One row of the abstracted transition table."""
    state: str
    recv: Dict[str, Union[int, str]]
    next: str

    @field_validator("recv")
    @classmethod
    def recv_nonempty(cls, v):
        if not v:
            raise ValueError("recv must name at least one message")
        return v


class FsmDocument(BaseModel):
    """Declarative finite-state agent program."""

    states: List[str] = Field(..., min_length=1)
    initial: List[str] = Field(..., min_length=1)
    P: int = Field(..., gt=1)
    clock: Dict[str, int]
    message: Dict[str, str]
    mode: Union[Literal["set"], SaturatingMode] = "set"
    delta: List[FsmDeltaRow]
    name: Optional[str] = None

    @model_validator(mode="after")
    def check_references(self):
        known = set(self.states)
        if len(known) != len(self.states):
            raise ValueError("duplicate state names")
        for s in self.initial:
            if s not in known:
                raise ValueError(f"initial state {s!r} is not declared")
        for label, mapping in (("clock", self.clock), ("message", self.message)):
            missing = known - set(mapping)
            if missing:
                raise ValueError(f"{label} map misses states {sorted(missing)}")
            extra = set(mapping) - known
            if extra:
                raise ValueError(f"{label} map names unknown states {sorted(extra)}")
        for row in self.delta:
            if row.state not in known or row.next not in known:
                raise ValueError(f"delta row {row.state!r} -> {row.next!r} names an unknown state")
        return self


# =============================================================================
# COUNTEREXAMPLE REPORTS
# =============================================================================

class WitnessPoint(BaseModel):
    """Equality s_left_node(left_round) == s_right_node(right_round)."""
    model_config = ConfigDict(frozen=True)

    left_node: int
    left_round: int
    right_node: int
    right_round: int
    state: str


class Witness(BaseModel):
    """A family of state equalities certified on the forged trace."""

    description: str
    relation: str
    holds: bool
    points: List[WitnessPoint] = Field(default_factory=list)


class CounterexampleReport(BaseModel):
    """Forged execution with prediction check, witnesses and verdict."""

    theorem: Theorem
    algorithm: str
    seeds: Dict[str, str]
    graph: GraphDocument
    init: List[str]
    schedule: List[int]
    horizon: int
    self_stabilizing: bool
    certificate: PeriodicityCertificate
    ring_size: int
    unrolled: bool = False
    prediction_match: bool
    checked_points: int
    witnesses: List[Witness] = Field(default_factory=list)
    verdict: SyncVerdict
    extended_verdict: Optional[SyncVerdict] = None
    sequence: Optional[Dict[str, Any]] = None

    @property
    def refutes(self) -> bool:
        """True when the report is a valid counterexample."""
        return self.prediction_match and not self.verdict.synchronized


# =============================================================================
# BOUNDS
# =============================================================================

class BoundSupport(BaseModel):
    """Number-theoretic quantities behind the bounds."""
    pi_n: int
    log_lcm: float


class BoundReport(BaseModel):
    """State and time lower bounds for networks of at most n nodes."""

    n: int
    self_stab_state_lb: int
    self_stab_time_lb: int
    dynamic_state_lb: int
    supporting: BoundSupport


# =============================================================================
# CLI RUN CONFIG
# =============================================================================

class RunConfig(BaseModel):
    """Normalized command-line request."""

    subcommand: Literal["forge", "simulate", "diameter", "bounds", "zoo"]
    builtin: Optional[str] = None
    fsm: Optional[str] = None
    graph: Optional[str] = None
    seeds: Dict[str, str] = Field(default_factory=dict)
    theorem: Optional[Theorem] = None
    periods: Optional[int] = None
    horizon: Optional[int] = None
    k_max: Optional[int] = None
    n: Optional[int] = None
    init: Optional[str] = None
    starts: Optional[str] = None
    from_round: int = 1
    d_max: Optional[int] = None
    min_suffix: Optional[int] = None
    self_stabilizing: bool = False
    all_seeds: bool = False
    out: Optional[str] = None
    emit_trace: Optional[str] = None
    plot: Optional[str] = None

    @model_validator(mode="after")
    def check_algorithm_source(self):
        if self.subcommand in ("forge", "simulate") and not (self.builtin or self.fsm):
            raise ValueError("one of --builtin or --fsm is required")
        if self.builtin and self.fsm:
            raise ValueError("--builtin and --fsm are mutually exclusive")
        return self
