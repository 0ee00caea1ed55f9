"""
Graph Kit
Directed-graph algebra, eventually-periodic dynamic graphs and the builders
used by the counterexample constructions.
"""

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from loguru import logger
from pydantic import ValidationError as PydanticValidationError

from ..config import config
from ..exceptions import (
    GraphSpecError,
    InvalidParameterError,
    MalformedGraph,
    RingTooSmall,
    SizeMismatch,
)
from ..models.schemas import GraphDocument


Arc = Tuple[int, int]


# =============================================================================
# ACTIVATION SCHEDULES
# =============================================================================

@dataclass(frozen=True)
class ActivationSchedule:
    """Start round t_i >= 1 of every node."""

    starts: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "starts", tuple(int(s) for s in self.starts))
        if not self.starts:
            raise InvalidParameterError("Schedule needs at least one node")
        bad = [s for s in self.starts if s < 1]
        if bad:
            raise InvalidParameterError(f"Start rounds must be >= 1, got {bad}", {"starts": list(self.starts)})

    @classmethod
    def synchronous(cls, n: int) -> "ActivationSchedule":
        return cls(tuple([1] * n))

    @property
    def n(self) -> int:
        return len(self.starts)

    @property
    def last_start(self) -> int:
        return max(self.starts)

    @property
    def is_synchronous(self) -> bool:
        return all(s == 1 for s in self.starts)

    def active_at(self, round_no: int) -> FrozenSet[int]:
        return frozenset(i for i, s in enumerate(self.starts) if s <= round_no)


# =============================================================================
# STATIC DIRECTED GRAPHS
# =============================================================================

@dataclass(frozen=True)
class DirectedGraph:
    """Directed graph over [n] without arc multiplicity."""

    n: int
    arcs: FrozenSet[Arc]

    def __post_init__(self):
        arcs = frozenset((int(i), int(j)) for i, j in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        for i, j in arcs:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InvalidParameterError(f"Arc ({i}, {j}) outside [0, {self.n})", {"n": self.n})

    @classmethod
    def identity(cls, n: int) -> "DirectedGraph":
        """All self-loops and nothing else."""
        return cls(n, frozenset((i, i) for i in range(n)))

    @classmethod
    def complete(cls, n: int) -> "DirectedGraph":
        return cls(n, frozenset((i, j) for i in range(n) for j in range(n)))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "DirectedGraph":
        rows, cols = np.nonzero(matrix)
        return cls(matrix.shape[0], frozenset(zip(rows.tolist(), cols.tolist())))

    @cached_property
    def matrix(self) -> np.ndarray:
        """Boolean adjacency matrix, m[i, j] iff (i, j) is an arc."""
        m = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.arcs:
            m[i, j] = True
        return m

    def in_degree(self, node: int) -> int:
        return sum(1 for _, j in self.arcs if j == node)

    def is_symmetric(self) -> bool:
        return all((j, i) in self.arcs for i, j in self.arcs)

    def is_complete(self) -> bool:
        return len(self.arcs) == self.n * self.n

    def with_self_loops(self) -> "DirectedGraph":
        return DirectedGraph(self.n, self.arcs | {(i, i) for i in range(self.n)})

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.arcs)
        return g

    def is_strongly_connected(self) -> bool:
        return nx.is_strongly_connected(self.to_networkx())


def compose(g1: DirectedGraph, g2: DirectedGraph) -> DirectedGraph:
    """
    Graph product g1 o g2: (i, j) is an arc iff some k has (i, k) in g1 and
    (k, j) in g2.
    """
    if g1.n != g2.n:
        raise SizeMismatch(g1.n, g2.n)
    return DirectedGraph.from_matrix(_bool_product(g1.matrix, g2.matrix))


def _bool_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Path counts never exceed n, exact in float64
    return (a.astype(np.float64) @ b.astype(np.float64)) > 0


# =============================================================================
# DYNAMIC GRAPHS
# =============================================================================

@dataclass(frozen=True)
class DynamicGraph:
    """
    Eventually-periodic dynamic graph: explicit rounds 1..len(prefix), then
    `period` repeated forever. Self-loops are materialized for active nodes.
    """

    n: int
    prefix: Tuple[DirectedGraph, ...]
    period: Tuple[DirectedGraph, ...]
    schedule: ActivationSchedule
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "period", tuple(self.period))
        if not self.period:
            raise InvalidParameterError("Period must contain at least one round")
        if self.schedule.n != self.n:
            raise SizeMismatch(self.n, self.schedule.n)
        for g in self.prefix + self.period:
            if g.n != self.n:
                raise SizeMismatch(self.n, g.n)
        if self.schedule.last_start > len(self.prefix) + 1:
            raise MalformedGraph(
                f"node starts at round {self.schedule.last_start}, after the periodic part begins",
                round_no=len(self.prefix) + 1,
            )
        for t in range(1, len(self.prefix) + len(self.period) + 1):
            self._check_round(t)

    def _check_round(self, t: int) -> None:
        graph = self.arcs_at(t)
        active = self.schedule.active_at(t)
        for i in range(self.n):
            if i in active and (i, i) not in graph.arcs:
                raise MalformedGraph("active node lacks its self-loop", round_no=t, node=i)
        for i, j in graph.arcs:
            if i not in active or j not in active:
                raise MalformedGraph(f"arc ({i}, {j}) touches a passive node", round_no=t, node=j)

    @property
    def prefix_length(self) -> int:
        return len(self.prefix)

    @property
    def period_length(self) -> int:
        return len(self.period)

    @property
    def is_static(self) -> bool:
        return not self.prefix and len(self.period) == 1

    def arcs_at(self, t: int) -> DirectedGraph:
        """Communication graph of round t (t >= 1)."""
        if t < 1:
            raise InvalidParameterError(f"Rounds start at 1, got {t}")
        if t <= len(self.prefix):
            return self.prefix[t - 1]
        return self.period[(t - len(self.prefix) - 1) % len(self.period)]

    def check_diffusive_starts(self) -> bool:
        """No node hears another node before its own start round."""
        for t in range(1, len(self.prefix) + len(self.period) + 1):
            for i, j in self.arcs_at(t).arcs:
                if i != j and t < self.schedule.starts[j]:
                    return False
        return True

    def with_schedule(self, schedule: ActivationSchedule) -> "DynamicGraph":
        """
        Same communication pattern under another start schedule: arcs touching
        a node before it starts are dropped, self-loops follow activity.
        """
        if schedule.n != self.n:
            raise SizeMismatch(self.n, schedule.n)
        explicit = max(len(self.prefix), schedule.last_start - 1)
        prefix = [_mask(self.arcs_at(t), schedule.active_at(t)) for t in range(1, explicit + 1)]
        everyone = frozenset(range(self.n))
        period = [_mask(self.arcs_at(explicit + k), everyone) for k in range(1, len(self.period) + 1)]
        return DynamicGraph(self.n, tuple(prefix), tuple(period), schedule, label=self.label)

    def to_document(self) -> GraphDocument:
        return GraphDocument(
            n=self.n,
            prefix=[sorted(g.arcs) for g in self.prefix],
            period=[sorted(g.arcs) for g in self.period],
            starts=list(self.schedule.starts),
        )

    @classmethod
    def from_document(cls, doc: GraphDocument, label: str = "") -> "DynamicGraph":
        return cls(
            doc.n,
            tuple(DirectedGraph(doc.n, frozenset(map(tuple, rnd))) for rnd in doc.prefix),
            tuple(DirectedGraph(doc.n, frozenset(map(tuple, rnd))) for rnd in doc.period),
            ActivationSchedule(tuple(doc.starts)),
            label=label,
        )


def _mask(graph: DirectedGraph, active: FrozenSet[int]) -> DirectedGraph:
    arcs = {(i, j) for i, j in graph.arcs if i in active and j in active}
    arcs |= {(i, i) for i in active}
    return DirectedGraph(graph.n, frozenset(arcs))


def static_dynamic_graph(
    digraph: DirectedGraph,
    schedule: Optional[ActivationSchedule] = None,
    label: str = "",
) -> DynamicGraph:
    """Static communication graph, self-loops added, under a start schedule."""
    base = DynamicGraph(
        digraph.n,
        (),
        (digraph.with_self_loops(),),
        ActivationSchedule.synchronous(digraph.n),
        label=label,
    )
    if schedule is None or schedule.is_synchronous:
        return base
    return base.with_schedule(schedule)


def diffusive_schedule(digraph: DirectedGraph, spontaneous: Sequence[int]) -> ActivationSchedule:
    """
    Wake-up times under diffusive starts: a node starts at its spontaneous
    round or one round after its earliest-starting in-neighbour, whichever
    comes first.
    """
    if len(spontaneous) != digraph.n:
        raise SizeMismatch(digraph.n, len(spontaneous))
    starts = [int(s) for s in spontaneous]
    changed = True
    while changed:
        changed = False
        for i, j in digraph.arcs:
            if i != j and starts[i] + 1 < starts[j]:
                starts[j] = starts[i] + 1
                changed = True
    return ActivationSchedule(tuple(starts))


# =============================================================================
# PRODUCTS, DIAMETER, TEMPORAL PATHS
# =============================================================================

def interval_product(g: DynamicGraph, t: int, t2: int) -> DirectedGraph:
    """G(t:t2) = G(t) o G(t+1) o ... o G(t2)."""
    if not 1 <= t <= t2:
        raise InvalidParameterError(f"Need 1 <= t <= t2, got t={t}, t2={t2}")
    product = g.arcs_at(t).matrix
    for r in range(t + 1, t2 + 1):
        product = _bool_product(product, g.arcs_at(r).matrix)
    return DirectedGraph.from_matrix(product)


def dynamic_diameter(g: DynamicGraph, from_round: int = 1, d_max: Optional[int] = None) -> Optional[int]:
    """
    Smallest d <= d_max such that every window of d rounds starting at or
    after `from_round` connects every ordered pair; None if there is none.

    Windows starting inside one full period past the prefix cover every
    window by periodicity.
    """
    if from_round < 1:
        raise InvalidParameterError(f"from_round must be >= 1, got {from_round}")
    if d_max is None:
        d_max = config.simulation.DIAMETER_SEARCH_FACTOR * g.n
    if d_max < 1:
        raise InvalidParameterError(f"d_max must be >= 1, got {d_max}")

    last_window_start = max(from_round, g.prefix_length + 1) + g.period_length - 1
    holds = [True] * (d_max + 1)
    holds[0] = False
    for start in range(from_round, last_window_start + 1):
        product = g.arcs_at(start).matrix
        for d in range(1, d_max + 1):
            if d > 1:
                product = _bool_product(product, g.arcs_at(start + d - 1).matrix)
            if holds[d] and not product.all():
                holds[d] = False
        if not any(holds):
            logger.debug(f"No diameter <= {d_max} from round {from_round} (window at {start})")
            return None

    for d in range(1, d_max + 1):
        if holds[d]:
            return d
    return None


def temporal_path(g: DynamicGraph, source: int, target: int, t: int, t2: int) -> Optional[List[int]]:
    """
    A node sequence k_0 = source, ..., k_m = target with (k_{r-1}, k_r) an arc
    of round t + r - 1, using every round t..t2; None if no such path exists.
    """
    if not 1 <= t <= t2:
        raise InvalidParameterError(f"Need 1 <= t <= t2, got t={t}, t2={t2}")
    layers: List[Dict[int, int]] = []
    frontier = {source}
    for r in range(t, t2 + 1):
        parents: Dict[int, int] = {}
        for i, j in sorted(g.arcs_at(r).arcs):
            if i in frontier and j not in parents:
                parents[j] = i
        layers.append(parents)
        frontier = set(parents)
        if not frontier:
            return None
    if target not in frontier:
        return None
    path = [target]
    for parents in reversed(layers):
        path.append(parents[path[-1]])
    return list(reversed(path))


# =============================================================================
# BUILDERS
# =============================================================================

def build_directed_ring(L: int) -> DynamicGraph:
    """Static directed ring i -> i+1 mod L with self-loops, synchronous starts."""
    if L < config.forge.MIN_DIRECTED_RING:
        raise RingTooSmall(L, config.forge.MIN_DIRECTED_RING)
    arcs = {(i, (i + 1) % L) for i in range(L)} | {(i, i) for i in range(L)}
    return DynamicGraph(
        L, (), (DirectedGraph(L, frozenset(arcs)),), ActivationSchedule.synchronous(L),
        label=f"ring:directed:{L}",
    )


def build_bidirectional_ring(m: int) -> DynamicGraph:
    """Static bidirectional ring of size m >= 3 with self-loops."""
    if m < 3:
        raise RingTooSmall(m, 3)
    arcs = set()
    for i in range(m):
        arcs.add((i, i))
        arcs.add((i, (i + 1) % m))
        arcs.add(((i + 1) % m, i))
    return DynamicGraph(
        m, (), (DirectedGraph(m, frozenset(arcs)),), ActivationSchedule.synchronous(m),
        label=f"ring:bidir:{m}",
    )


def _thm4_round(L: int, t: int) -> DirectedGraph:
    arcs = set()
    for i in range(2 * L):
        if t >= 2 + i % L:
            arcs.add((i, i))
    phase = ((t - 1) // L) % 4
    if phase == 0:
        j = L + (t - 1) % L
        senders = range(L)
    elif phase == 2:
        j = (t - 1) % L
        senders = range(L, 2 * L)
    else:
        senders = ()
    for i in senders:
        if t >= 2 + max(i % L, j % L):
            arcs.add((i, j))
    return DirectedGraph(2 * L, frozenset(arcs))


def build_thm4_schedule(L: int) -> DynamicGraph:
    """
    Two groups {0..L-1} and {L..2L-1}, node i starting at rem(i, L) + 2.
    Rounds of phase 0 (mod 4, in blocks of L) feed the first group into node
    L + rem(t-1, L); phase 2 feeds the second group into node rem(t-1, L);
    phases 1 and 3 isolate everyone. Stored as 4L prefix rounds plus one
    4L-round period.
    """
    if L < 2:
        raise InvalidParameterError(f"Two-group schedule needs L >= 2, got {L}", {"L": L})
    schedule = ActivationSchedule(tuple(i % L + 2 for i in range(2 * L)))
    prefix = tuple(_thm4_round(L, t) for t in range(1, 4 * L + 1))
    period = tuple(_thm4_round(L, t) for t in range(4 * L + 1, 8 * L + 1))
    return DynamicGraph(2 * L, prefix, period, schedule, label=f"thm4:{L}")


# =============================================================================
# GRAPH SPECS AND FILES
# =============================================================================

def load_graph_file(path) -> DynamicGraph:
    """Read a graph document; OSError propagates for missing files."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise GraphSpecError(f"Graph file {path} is not UTF-8 text: {e}", {"path": str(path)})
    try:
        doc = GraphDocument.model_validate(json.loads(raw))
    except (json.JSONDecodeError, PydanticValidationError) as e:
        raise GraphSpecError(f"Invalid graph file {path}: {e}", {"path": str(path)})
    return DynamicGraph.from_document(doc, label=str(path))


def dump_graph_file(g: DynamicGraph, path) -> None:
    Path(path).write_text(
        json.dumps(g.to_document().model_dump(mode="json"), sort_keys=True) + "\n",
        encoding="utf-8",
    )


def _spec_int(spec: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise GraphSpecError(f"Graph spec {spec!r}: {raw!r} is not an integer", {"spec": spec})


def parse_graph_spec(spec: str) -> DynamicGraph:
    """
    Shorthands: ring:directed:L, ring:bidir:m, thm4:L, complete:n.
    Anything ending in .json or containing a path separator is read as a file,
    as is any other spec naming an existing file.
    """
    parts = spec.split(":")
    if spec.endswith(".json") or "/" in spec or "\\" in spec:
        return load_graph_file(spec)
    try:
        if parts[0] == "ring" and len(parts) == 3 and parts[1] == "directed":
            return build_directed_ring(_spec_int(spec, parts[2]))
        if parts[0] == "ring" and len(parts) == 3 and parts[1] in ("bidir", "bidirectional"):
            return build_bidirectional_ring(_spec_int(spec, parts[2]))
        if parts[0] == "thm4" and len(parts) == 2:
            return build_thm4_schedule(_spec_int(spec, parts[1]))
        if parts[0] == "complete" and len(parts) == 2:
            n = _spec_int(spec, parts[1])
            if n < 1:
                raise GraphSpecError(f"Graph spec {spec!r}: need n >= 1", {"spec": spec})
            return static_dynamic_graph(DirectedGraph.complete(n), label=spec)
    except (RingTooSmall, InvalidParameterError) as e:
        raise GraphSpecError(f"Graph spec {spec!r}: {e.message}", {"spec": spec})
    if Path(spec).is_file():
        return load_graph_file(spec)
    raise GraphSpecError(f"Unrecognized graph spec {spec!r}", {"spec": spec})
