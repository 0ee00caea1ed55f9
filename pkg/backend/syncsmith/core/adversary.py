"""
Adversary
Builds the counterexample executions against a bounded-memory algorithm,
checks every simulated state against its closed-form prediction and records
the state equalities that rule out synchronization.
"""

from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from loguru import logger

from ..config import Theorem, config
from ..exceptions import InvalidParameterError, PredictionMismatch, SizeWarning
from ..models.schemas import CounterexampleReport, PeriodicityCertificate, SyncVerdict, Witness, WitnessPoint
from .algorithm import FiniteAlgorithm, State
from .engine import Trace, check_mod_p_sync, execute
from .graphs import DynamicGraph, build_bidirectional_ring, build_directed_ring, build_thm4_schedule
from .sequences import (
    cherry_family,
    find_period,
    lcm_upto,
    pair_tape_thm2,
    periodic_index,
    second_order_step,
    second_order_tape,
)


# (left_node, left_round, right_node, right_round)
Point = Tuple[int, int, int, int]

SEED_NAMES: Dict[Theorem, Tuple[str, ...]] = {
    Theorem.T1: ("q0", "q1"),
    Theorem.T2: ("p0", "q0", "q1"),
    Theorem.T3: ("q0", "q1"),
    Theorem.T4: ("q00",),
}


# =============================================================================
# SHARED CHECKS
# =============================================================================

def _require_budget(nodes: int) -> None:
    budget = config.runtime.NODE_BUDGET
    if nodes > budget:
        raise SizeWarning(nodes, budget)


def _check_prediction(
    theorem: Theorem,
    trace: Trace,
    points: Iterable[Tuple[int, int]],
    predict: Callable[[int, int], State],
) -> int:
    """Compare simulated and predicted states; the first mismatch is fatal."""
    checked = 0
    for node, t in points:
        expected = predict(node, t)
        actual = trace.state(node, t)
        if actual != expected:
            name = trace.algorithm.name_of
            raise PredictionMismatch(theorem.value, node, t, name(expected), name(actual))
        checked += 1
    return checked


def _state_witness(
    theorem: Theorem,
    trace: Trace,
    description: str,
    relation: str,
    points: Iterable[Point],
) -> Witness:
    name = trace.algorithm.name_of
    recorded = []
    for i, t, j, u in points:
        left, right = trace.state(i, t), trace.state(j, u)
        if left != right:
            raise PredictionMismatch(theorem.value, j, u, name(left), name(right))
        recorded.append(WitnessPoint(left_node=i, left_round=t, right_node=j, right_round=u, state=name(left)))
    return Witness(description=description, relation=relation, holds=True, points=recorded)


def _pinned_witness(
    theorem: Theorem,
    trace: Trace,
    description: str,
    relation: str,
    pins: Iterable[Tuple[int, int, State]],
) -> Witness:
    """Witness whose points pin single (node, round) cells to known states."""
    name = trace.algorithm.name_of
    recorded = []
    for i, t, expected in pins:
        actual = trace.state(i, t)
        if actual != expected:
            raise PredictionMismatch(theorem.value, i, t, name(expected), name(actual))
        recorded.append(WitnessPoint(left_node=i, left_round=t, right_node=i, right_round=t, state=name(actual)))
    return Witness(description=description, relation=relation, holds=True, points=recorded)


def _forge_verdict(trace: Trace) -> SyncVerdict:
    suffix = min(config.simulation.SYNC_SUFFIX_FACTOR * trace.period * trace.n, trace.horizon)
    return check_mod_p_sync(trace, min_suffix=suffix)


def _early_verdict(trace: Trace, n: int) -> SyncVerdict:
    """Synchronization by round n-3 means a suffix of >= 1 round inside [0, n-2]."""
    return check_mod_p_sync(trace.truncate(n - 2), min_suffix=1)


def _report(
    theorem: Theorem,
    alg: FiniteAlgorithm,
    seeds: Dict[str, State],
    graph: DynamicGraph,
    trace: Trace,
    self_stabilizing: bool,
    certificate: PeriodicityCertificate,
    ring_size: int,
    unrolled: bool,
    checked: int,
    witnesses: List[Witness],
    verdict: SyncVerdict,
    extended_verdict: Optional[SyncVerdict] = None,
    sequence: Optional[Dict[str, Any]] = None,
) -> CounterexampleReport:
    name = alg.name_of
    report = CounterexampleReport(
        theorem=theorem,
        algorithm=alg.name,
        seeds={k: name(v) for k, v in seeds.items()},
        graph=graph.to_document(),
        init=[name(s) for s in trace.column(0)],
        schedule=list(graph.schedule.starts),
        horizon=trace.horizon,
        self_stabilizing=self_stabilizing,
        certificate=certificate,
        ring_size=ring_size,
        unrolled=unrolled,
        prediction_match=True,
        checked_points=checked,
        witnesses=witnesses,
        verdict=verdict,
        extended_verdict=extended_verdict,
        sequence=sequence,
    )
    logger.info(
        f"{theorem.value} vs {alg.name} {report.seeds}: ell={certificate.ell}, L={certificate.L}, "
        f"{graph.n} nodes, {checked} predictions, verdict {verdict.outcome.value}"
    )
    return report


def _check_seeds(alg: FiniteAlgorithm, *seeds: State) -> None:
    alg.require_enumerable()
    for s in seeds:
        alg.check_state(s)


# =============================================================================
# DIRECTED RING
# =============================================================================

def forge_thm1(
    alg: FiniteAlgorithm,
    q0: State,
    q1: State,
    rounds_per_period: Optional[int] = None,
) -> CounterexampleReport:
    """
    Directed ring on which node i starts in q^{i+ell}: every node then walks
    the second-order sequence, s_i(t) = q^{i+ell+t}, and s_1(t) = s_0(t+1)
    forbids any synchronized suffix.
    """
    _check_seeds(alg, q0, q1)
    rounds_per_period = rounds_per_period or config.forge.ROUNDS_PER_PERIOD
    if rounds_per_period < 1:
        raise InvalidParameterError(f"rounds_per_period must be >= 1, got {rounds_per_period}")

    cert = find_period(second_order_step(alg), (q0, q1), order=2)
    ell, L = cert.ell, cert.L
    size = max(L, config.forge.MIN_DIRECTED_RING)
    unrolled = size != L
    if unrolled:
        logger.warning(f"Period L={L} is below the smallest ring; unrolling to {size} nodes")
    _require_budget(size)

    horizon = rounds_per_period * L
    tape = second_order_tape(alg, q0, q1, ell + L + 1)

    def predict(i: int, t: int) -> State:
        return tape[periodic_index(i + ell + t, cert)]

    graph = build_directed_ring(size)
    trace = execute(alg, graph, [predict(i, 0) for i in range(size)], horizon=horizon, self_stabilizing=True)

    checked = _check_prediction(
        Theorem.T1,
        trace,
        ((i, t) for t in range(horizon + 1) for i in range(size)),
        predict,
    )
    witnesses = [
        _state_witness(
            Theorem.T1, trace,
            "node 0 repeats the state of node 1 one round later",
            "s_1(t) == s_0(t+1)",
            ((1, t, 0, t + 1) for t in range(horizon)),
        ),
        _state_witness(
            Theorem.T1, trace,
            "every node repeats the state of its successor one round later",
            "s_{i+1 mod L}(t) == s_i(t+1)",
            (((i + 1) % size, t, i, t + 1) for t in range(horizon) for i in range(size)),
        ),
    ]
    return _report(
        Theorem.T1, alg, {"q0": q0, "q1": q1}, graph, trace, True, cert,
        size, unrolled, checked, witnesses, _forge_verdict(trace),
        sequence=tape.to_document(alg.name_of, cert),
    )


# =============================================================================
# BIDIRECTIONAL RING
# =============================================================================

def forge_thm2(
    alg: FiniteAlgorithm,
    p0: State,
    q0: State,
    q1: State,
    rounds_per_period: Optional[int] = None,
) -> CounterexampleReport:
    """
    Bidirectional ring of 2L nodes with s_{2k}(0) = q^{ell+k} and
    s_{2k+1}(0) = p^{ell+k}; even nodes then follow q and odd nodes follow p.
    """
    _check_seeds(alg, p0, q0, q1)
    rounds_per_period = rounds_per_period or config.forge.ROUNDS_PER_PERIOD
    if rounds_per_period < 1:
        raise InvalidParameterError(f"rounds_per_period must be >= 1, got {rounds_per_period}")

    _, _, cert = pair_tape_thm2(alg, p0, q0, q1, 2)
    ell, L = cert.ell, cert.L
    half = max(L, config.forge.MIN_HALF_BIDIRECTIONAL_RING)
    unrolled = half != L
    if unrolled:
        logger.warning(f"Ring of {2 * L} nodes is too small; unrolling to {2 * half}")
    size = 2 * half
    _require_budget(size)

    horizon = rounds_per_period * L
    p, q, _ = pair_tape_thm2(alg, p0, q0, q1, ell + half + horizon + 1)

    def predict(i: int, t: int) -> State:
        k, odd = divmod(i, 2)
        return (p if odd else q)[ell + k + t]

    graph = build_bidirectional_ring(size)
    trace = execute(alg, graph, [predict(i, 0) for i in range(size)], horizon=horizon, self_stabilizing=True)

    checked = _check_prediction(
        Theorem.T2,
        trace,
        ((i, t) for t in range(1, horizon + 1) for i in range(size)),
        predict,
    )
    witnesses = [
        _state_witness(
            Theorem.T2, trace,
            "node 0 repeats the state of node 2 one round later",
            "s_2(t) == s_0(t+1)",
            ((2, t, 0, t + 1) for t in range(horizon)),
        ),
        _state_witness(
            Theorem.T2, trace,
            "every even node repeats the state of the next even node one round later",
            "s_{2k+2 mod 2L}(t) == s_{2k}(t+1)",
            (((2 * k + 2) % size, t, 2 * k, t + 1) for t in range(horizon) for k in range(half)),
        ),
    ]
    return _report(
        Theorem.T2, alg, {"p0": p0, "q0": q0, "q1": q1}, graph, trace, True, cert,
        size, unrolled, checked, witnesses, _forge_verdict(trace),
        sequence=q.to_document(alg.name_of, cert),
    )


# =============================================================================
# RING OF ARBITRARY SIZE
# =============================================================================

def forge_thm3(
    alg: FiniteAlgorithm,
    q0: State,
    q1: State,
    n: int,
    horizon: Optional[int] = None,
) -> CounterexampleReport:
    """
    Directed ring of n nodes started as in the directed-ring construction.
    The wrap-around disturbance travels one hop per round, so node j still
    follows q^{ell+t+j} while j >= t, which forces s_{n-1}(n-3) = s_{n-2}(n-2).
    """
    _check_seeds(alg, q0, q1)
    if n < config.bounds.MIN_NETWORK_SIZE:
        raise InvalidParameterError(f"Need n >= {config.bounds.MIN_NETWORK_SIZE}, got {n}", {"n": n})
    horizon = horizon or n + config.forge.THM3_EXTRA_ROUNDS
    if horizon < n:
        raise InvalidParameterError(f"Horizon must be >= n = {n}, got {horizon}")
    _require_budget(n)

    cert = find_period(second_order_step(alg), (q0, q1), order=2)
    ell = cert.ell
    tape = second_order_tape(alg, q0, q1, ell + 2 * n + 1)
    graph = build_directed_ring(n)
    trace = execute(alg, graph, [tape[i + ell] for i in range(n)], horizon=horizon, self_stabilizing=True)

    region = [(j, 0) for j in range(n)] + [(j, t) for t in range(1, n) for j in range(t, n)]
    checked = _check_prediction(Theorem.T3, trace, region, lambda j, t: tape[ell + t + j])
    witnesses = [
        _state_witness(
            Theorem.T3, trace,
            "last node at round n-3 equals its predecessor at round n-2",
            "s_{n-1}(n-3) == s_{n-2}(n-2)",
            [(n - 1, n - 3, n - 2, n - 2)],
        ),
    ]
    return _report(
        Theorem.T3, alg, {"q0": q0, "q1": q1}, graph, trace, True, cert,
        n, False, checked, witnesses, _early_verdict(trace, n),
        extended_verdict=_forge_verdict(trace),
        sequence=second_order_tape(alg, q0, q1, ell + cert.L + 1).to_document(alg.name_of, cert),
    )


# =============================================================================
# TWO-GROUP DIFFUSIVE SCHEDULE
# =============================================================================

def forge_thm4(
    alg: FiniteAlgorithm,
    q00: State,
    k_max: Optional[int] = None,
) -> CounterexampleReport:
    """
    Two groups of L = |Q|^! nodes started from q00 under diffusive starts.
    At round 2kL node i sits in q_{k+lam}^{2L-1-rem(i,L)}, lam = -1 exactly
    when (i >= L) xor (k odd); node 0 at 4kL equals node 1 at 4kL+1.
    """
    _check_seeds(alg, q00)
    k_max = k_max or config.forge.THM4_K_MAX
    if k_max < 2:
        raise InvalidParameterError(f"k_max must be >= 2, got {k_max}")

    L = lcm_upto(alg.state_count)
    _require_budget(2 * L)
    family = cherry_family(alg, q00, k_max)
    graph = build_thm4_schedule(L)
    horizon = 2 * k_max * L + 1
    trace = execute(alg, graph, [q00] * (2 * L), horizon=horizon, self_stabilizing=False)

    def predict(i: int, t: int) -> State:
        k = t // (2 * L)
        lam = -1 if (i >= L) != (k % 2 == 1) else 0
        return family.entry(k + lam, 2 * L - 1 - i % L)

    checked = _check_prediction(
        Theorem.T4,
        trace,
        ((i, 2 * k * L) for k in range(1, k_max + 1) for i in range(2 * L)),
        predict,
    )

    # In block k the odd-k receivers are the first group, the even-k ones the second
    reseeds = []
    for k in range(1, k_max):
        receivers = range(L) if k % 2 == 1 else range(L, 2 * L)
        for i in receivers:
            reseeds.append((i, 2 * k * L + i % L + 1, family.entry(k + 1, 0)))

    witnesses = [
        _state_witness(
            Theorem.T4, trace,
            "node 0 at round 4kL equals node 1 one round later",
            "s_0(4kL) == s_1(4kL+1)",
            [(0, 4 * k * L, 1, 4 * k * L + 1) for k in range(1, k_max + 1) if 4 * k * L <= horizon - 1],
        ),
        _pinned_witness(
            Theorem.T4, trace,
            "receiving nodes enter the next cherry row",
            "s_i(2kL + rem(i,L) + 1) == q_{k+1}^0",
            reseeds,
        ),
    ]
    cert = PeriodicityCertificate(ell=L, L=L)
    return _report(
        Theorem.T4, alg, {"q00": q00}, graph, trace, False, cert,
        2 * L, False, checked, witnesses, _forge_verdict(trace),
    )


# =============================================================================
# DISPATCH, SEED GRIDS, RE-CHECKS
# =============================================================================

def forge(
    theorem: Theorem,
    alg: FiniteAlgorithm,
    seeds: Dict[str, State],
    rounds_per_period: Optional[int] = None,
    n: Optional[int] = None,
    horizon: Optional[int] = None,
    k_max: Optional[int] = None,
) -> CounterexampleReport:
    """Run one construction with seeds keyed as in SEED_NAMES."""
    theorem = Theorem(theorem)
    missing = [s for s in SEED_NAMES[theorem] if s not in seeds]
    if missing:
        raise InvalidParameterError(f"{theorem.value} needs seeds {missing}", {"missing": missing})
    if theorem == Theorem.T1:
        return forge_thm1(alg, seeds["q0"], seeds["q1"], rounds_per_period)
    if theorem == Theorem.T2:
        return forge_thm2(alg, seeds["p0"], seeds["q0"], seeds["q1"], rounds_per_period)
    if theorem == Theorem.T3:
        if n is None:
            raise InvalidParameterError("T3 needs the ring size n")
        return forge_thm3(alg, seeds["q0"], seeds["q1"], n, horizon)
    return forge_thm4(alg, seeds["q00"], k_max)


def seed_grid(theorem: Theorem, alg: FiniteAlgorithm) -> List[Dict[str, State]]:
    """Every admissible seed assignment, in state order."""
    alg.require_enumerable()
    theorem = Theorem(theorem)
    names = SEED_NAMES[theorem]
    pool: Sequence[State] = alg.states
    if theorem == Theorem.T4:
        pool = [s for s in alg.states if s in alg.initial_states]
    return [dict(zip(names, combo)) for combo in product(pool, repeat=len(names))]


def forge_all_seeds(
    theorem: Theorem,
    alg: FiniteAlgorithm,
    workers: Optional[int] = None,
    **params,
) -> List[CounterexampleReport]:
    """Forge over the whole seed grid concurrently; reports come back sorted by seed names."""
    grid = seed_grid(theorem, alg)
    workers = workers or config.runtime.WORKERS
    logger.info(f"Forging {Theorem(theorem).value} over {len(grid)} seed assignments ({workers} workers)")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        reports = list(pool.map(lambda seeds: forge(theorem, alg, seeds, **params), grid))
    order = SEED_NAMES[Theorem(theorem)]
    return sorted(reports, key=lambda r: tuple(r.seeds[k] for k in order))


def replay_trace(report: CounterexampleReport, alg: FiniteAlgorithm) -> Trace:
    """Re-execute the graph and initial states embedded in a report."""
    graph = DynamicGraph.from_document(report.graph)
    init = [alg.parse_state(s) for s in report.init]
    return execute(alg, graph, init, horizon=report.horizon, self_stabilizing=report.self_stabilizing)


def recheck_report(report: CounterexampleReport, alg: FiniteAlgorithm) -> bool:
    """
    Re-execute the stored graph and initial states and confirm every witness
    point and the recorded verdict.
    """
    trace = replay_trace(report, alg)
    name = alg.name_of

    for witness in report.witnesses:
        for pt in witness.points:
            left = name(trace.state(pt.left_node, pt.left_round))
            right = name(trace.state(pt.right_node, pt.right_round))
            if left != pt.state or right != pt.state:
                logger.warning(
                    f"Witness {witness.relation!r} fails at node {pt.left_node} round {pt.left_round}: "
                    f"{left} / {right} vs {pt.state}"
                )
                return False

    if report.theorem == Theorem.T3:
        verdict = _early_verdict(trace, trace.n)
    else:
        verdict = _forge_verdict(trace)
    if verdict != report.verdict:
        logger.warning(f"Verdict differs on re-execution: {verdict} vs {report.verdict}")
        return False
    return True
