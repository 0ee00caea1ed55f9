"""
Execution Engine
Round-based execution of anonymous agents on dynamic graphs and the mod-P
synchronization verdict.
"""

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from ..config import config
from ..exceptions import (
    HorizonTooSmall,
    InitialStateError,
    InvalidParameterError,
    MalformedGraph,
    SizeMismatch,
)
from ..models.schemas import SyncVerdict, SyncViolation
from .algorithm import FiniteAlgorithm, State
from .graphs import ActivationSchedule, DirectedGraph, DynamicGraph


@dataclass(frozen=True)
class Trace:
    """
    Execution matrix: states[i][t] is node i at the end of round t, with
    column 0 holding the initial states.
    """

    algorithm: FiniteAlgorithm = field(compare=False, repr=False)
    states: Tuple[Tuple[State, ...], ...]
    clocks: np.ndarray = field(compare=False, repr=False)
    schedule: ActivationSchedule

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def horizon(self) -> int:
        return len(self.states[0]) - 1

    @property
    def period(self) -> int:
        return self.algorithm.period

    def state(self, node: int, round_no: int) -> State:
        return self.states[node][round_no]

    def column(self, round_no: int) -> List[State]:
        if not 0 <= round_no <= self.horizon:
            raise InvalidParameterError(f"Round {round_no} outside [0, {self.horizon}]")
        return [row[round_no] for row in self.states]

    def truncate(self, horizon: int) -> "Trace":
        """Same execution cut at an earlier round."""
        if not 0 <= horizon <= self.horizon:
            raise InvalidParameterError(f"Cannot truncate a horizon-{self.horizon} trace to {horizon}")
        return Trace(
            self.algorithm,
            tuple(row[: horizon + 1] for row in self.states),
            self.clocks[:, : horizon + 1].copy(),
            self.schedule,
        )

    def rows(self) -> Iterator[Dict[str, Any]]:
        """One record per round: {"t", "states", "clocks"} with state names."""
        name = self.algorithm.name_of
        for t in range(self.horizon + 1):
            yield {
                "t": t,
                "states": [name(row[t]) for row in self.states],
                "clocks": [int(c) for c in self.clocks[:, t]],
            }

    def to_frame(self) -> pd.DataFrame:
        """Long-format table with columns t, node, state, clock."""
        name = self.algorithm.name_of
        records = [
            {"t": t, "node": i, "state": name(self.states[i][t]), "clock": int(self.clocks[i, t])}
            for t in range(self.horizon + 1)
            for i in range(self.n)
        ]
        return pd.DataFrame.from_records(records, columns=["t", "node", "state", "clock"])


def apply_round(
    alg: FiniteAlgorithm,
    states: Sequence[State],
    arcs: Iterable[Tuple[int, int]],
    active: Iterable[int],
) -> List[State]:
    """
    One synchronous round: every active node receives the multiset of
    messages over its incoming arcs (its self-loop included) and applies tau.
    Passive nodes keep their state.
    """
    if isinstance(arcs, DirectedGraph):
        if arcs.n != len(states):
            raise SizeMismatch(arcs.n, len(states))
        arcs = arcs.arcs
    arcs = list(arcs)
    active = frozenset(active)
    n = len(states)

    for i, j in arcs:
        if not (0 <= i < n and 0 <= j < n):
            raise MalformedGraph(f"arc ({i}, {j}) outside [0, {n})")
        if i not in active or j not in active:
            raise MalformedGraph(f"arc ({i}, {j}) touches a passive node", node=j)
    arc_set = set(arcs)
    for i in active:
        if (i, i) not in arc_set:
            raise MalformedGraph("active node lacks its self-loop", node=i)
    for s in states:
        alg.check_state(s)

    sent = {i: alg.message_of(states[i]) for i in active}
    inbox: Dict[int, Counter] = defaultdict(Counter)
    for i, j in arc_set:
        inbox[j][sent[i]] += 1

    nxt = list(states)
    for i in active:
        nxt[i] = alg.transition(states[i], inbox[i])
    return nxt


def execute(
    alg: FiniteAlgorithm,
    graph: DynamicGraph,
    init: Sequence[State],
    schedule: Optional[ActivationSchedule] = None,
    horizon: int = 1,
    self_stabilizing: bool = False,
) -> Trace:
    """
    Run rounds 1..horizon.

    Args:
        alg: Agent program
        graph: Dynamic graph; its own schedule is used unless `schedule` is given
        init: One state per node
        schedule: Overrides the graph's start rounds (arcs are re-masked)
        horizon: Last simulated round T
        self_stabilizing: Allow initial states outside Q0

    Returns:
        Trace with states and clocks for rounds 0..horizon
    """
    if len(init) != graph.n:
        raise InvalidParameterError(
            f"Initial configuration has {len(init)} states for {graph.n} nodes",
            {"n": graph.n},
        )
    if horizon < 1:
        raise InvalidParameterError(f"Horizon must be >= 1, got {horizon}")
    if schedule is not None and schedule != graph.schedule:
        graph = graph.with_schedule(schedule)
    schedule = graph.schedule
    if horizon < schedule.last_start:
        raise HorizonTooSmall(horizon, schedule.last_start)

    for i, s in enumerate(init):
        alg.check_state(s)
        if not self_stabilizing and s not in alg.initial_states:
            raise InitialStateError(alg.name_of(s), node=i)

    logger.debug(f"Executing {alg.name} on {graph.label or 'graph'} (n={graph.n}, T={horizon})")

    columns = [list(init)]
    for t in range(1, horizon + 1):
        columns.append(apply_round(alg, columns[-1], graph.arcs_at(t).arcs, schedule.active_at(t)))

    states = tuple(tuple(col[i] for col in columns) for i in range(graph.n))
    clocks = np.array([[alg.clock_of(s) for s in row] for row in states], dtype=np.int64)
    return Trace(alg, states, clocks, schedule)


def check_mod_p_sync(
    trace: Trace,
    P: Optional[int] = None,
    min_suffix: Optional[int] = None,
) -> SyncVerdict:
    """
    Decide mod-P synchronization over the suffix of a finite trace.

    The offset c is fixed by the last column; the scan walks backwards until a
    column breaks C_i(t) == t + c (mod P). The verdict is SYNCHRONIZED(t0, c)
    with t0 right after that column when at least `min_suffix` rounds remain.
    """
    P = P or trace.period
    T = trace.horizon
    if min_suffix is None:
        # 2Pn, clamped to half the horizon for short traces
        min_suffix = min(config.simulation.SYNC_SUFFIX_FACTOR * P * trace.n, max(1, T // 2))
    if P <= 1:
        raise InvalidParameterError(f"P must exceed 1, got {P}")
    if min_suffix < 1:
        raise InvalidParameterError(f"min_suffix must be >= 1, got {min_suffix}")
    if T < min_suffix:
        raise InvalidParameterError(
            f"Horizon {T} is shorter than min_suffix {min_suffix}",
            {"horizon": T, "min_suffix": min_suffix},
        )

    clocks = trace.clocks % P
    c = int(clocks[0, T] - T) % P
    expected = (np.arange(T + 1) + c) % P
    bad = clocks != expected[np.newaxis, :]
    broken = np.flatnonzero(bad.any(axis=0))

    if broken.size == 0:
        logger.debug(f"Synchronized over the whole trace with c={c}")
        return SyncVerdict.synchronized_at(0, c)

    t_break = int(broken[-1])
    t0 = t_break + 1
    if T - t0 >= min_suffix:
        logger.debug(f"Synchronized from t0={t0} with c={c}")
        return SyncVerdict.synchronized_at(t0, c)

    node = int(np.flatnonzero(bad[:, t_break])[0])
    violation = SyncViolation(
        node=node,
        round=t_break,
        expected=int(expected[t_break]),
        actual=int(clocks[node, t_break]),
    )
    logger.debug(f"Not synchronized: {violation}")
    return SyncVerdict.failed(violation)
