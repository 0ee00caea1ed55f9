"""
Sequence Lab
Recurrent state sequences behind the counterexample constructions, their
ultimate-periodicity certificates and the cherry family of the two-group
schedule.
"""

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from loguru import logger

from ..config import config
from ..exceptions import InitialStateError, InvalidParameterError, SequenceError, SizeWarning
from ..models.schemas import PeriodicityCertificate
from .algorithm import FiniteAlgorithm, State


@dataclass(frozen=True)
class SequenceTape:
    """Finite prefix q^0, q^1, ... of a recurrent sequence."""

    values: Tuple[Any, ...]
    generator: str

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, r):
        return self.values[r]

    def to_document(
        self,
        name_of: Callable[[Any], str] = str,
        certificate: Optional[PeriodicityCertificate] = None,
    ) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            "generator": self.generator,
            "values": [name_of(v) for v in self.values],
        }
        if certificate is not None:
            doc["certificate"] = certificate.model_dump()
        return doc


# =============================================================================
# TAPES
# =============================================================================

def first_order_tape(step: Callable[[Hashable], Hashable], seed: Hashable, length: int) -> SequenceTape:
    """x^0 = seed, x^{r+1} = step(x^r)."""
    if length < 1:
        raise InvalidParameterError(f"Tape length must be >= 1, got {length}")
    values = [seed]
    while len(values) < length:
        values.append(step(values[-1]))
    return SequenceTape(tuple(values), "first-order")


def second_order_step(alg: FiniteAlgorithm) -> Callable[[State, State], State]:
    """(q^r, q^{r+1}) -> q^{r+2} = tau(q^{r+1}, {sigma(q^{r+1}), sigma(q^r)})."""
    def step(prev: State, cur: State) -> State:
        return alg.transition(cur, [alg.message_of(cur), alg.message_of(prev)])
    return step


def self_step(alg: FiniteAlgorithm) -> Callable[[State], State]:
    """Isolated active node: x -> tau(x, {sigma(x)})."""
    def step(x: State) -> State:
        return alg.transition(x, [alg.message_of(x)])
    return step


def second_order_tape(alg: FiniteAlgorithm, q0: State, q1: State, length: int) -> SequenceTape:
    if length < 2:
        raise InvalidParameterError(f"Second-order tape needs length >= 2, got {length}")
    alg.check_state(q0)
    alg.check_state(q1)
    step = second_order_step(alg)
    values = [q0, q1]
    while len(values) < length:
        values.append(step(values[-2], values[-1]))
    return SequenceTape(tuple(values), "second-order")


# =============================================================================
# PERIODICITY
# =============================================================================

def find_period(
    step: Callable,
    seed,
    order: int = 1,
    max_steps: Optional[int] = None,
) -> PeriodicityCertificate:
    """
    Minimal (ell, L) of a sequence over a finite set.

    Order 1: `step(x)` with `seed = x^0`. Order 2: `step(x^r, x^{r+1})` with
    `seed = (x^0, x^1)`; detection then runs on consecutive pairs. The first
    index whose key was already seen closes the cycle.
    """
    if order == 1:
        key = seed
        advance = step
    elif order == 2:
        key = tuple(seed)
        advance = lambda pair: (pair[1], step(pair[0], pair[1]))
    else:
        raise InvalidParameterError(f"Order must be 1 or 2, got {order}")

    seen: Dict[Hashable, int] = {}
    index = 0
    while key not in seen:
        if max_steps is not None and index > max_steps:
            raise SequenceError(f"No repetition within {max_steps} steps", {"order": order})
        seen[key] = index
        key = advance(key)
        index += 1

    first = seen[key]
    cert = PeriodicityCertificate(ell=first + 1, L=index - first)
    logger.debug(f"Period found (order {order}): ell={cert.ell}, L={cert.L}")
    return cert


def minimal_start(values: Sequence, L: int) -> int:
    """Smallest s with values[r + L] == values[r] for every r in [s, len - L)."""
    if L < 1:
        raise InvalidParameterError(f"L must be >= 1, got {L}")
    for r in range(len(values) - L - 1, -1, -1):
        if values[r + L] != values[r]:
            return r + 1
    return 0


def lcm_upto(a: int) -> int:
    """a^! = lcm(1, ..., a)."""
    if a < 1:
        raise InvalidParameterError(f"lcm_upto needs a >= 1, got {a}")
    return reduce(math.lcm, range(1, a + 1), 1)


def periodic_index(r: int, certificate: PeriodicityCertificate) -> int:
    """Smallest index holding the same value as index r."""
    start = certificate.ell - 1
    if r <= start:
        return r
    return start + (r - start) % certificate.L


# =============================================================================
# PAIRED SEQUENCES
# =============================================================================

def pair_tape_thm2(
    alg: FiniteAlgorithm,
    p0: State,
    q0: State,
    q1: State,
    length: int,
) -> Tuple[SequenceTape, SequenceTape, PeriodicityCertificate]:
    """
    Paired recurrences of the bidirectional ring:
        p^{r+1} = tau(p^r, {sigma(q^r), sigma(p^r), sigma(q^{r+1})})
        q^{r+1} = tau(q^r, {sigma(p^{r-1}), sigma(q^r), sigma(p^r)})   (r >= 1)

    The joint evolution is first order in (p^{r-1}, p^r, q^r); its first
    repetition gives the minimal joint period, and the start index of the
    (p, q) pair sequence is then found by a backward scan.
    """
    if length < 2:
        raise InvalidParameterError(f"Paired tapes need length >= 2, got {length}")
    for s in (p0, q0, q1):
        alg.check_state(s)
    send = alg.message_of

    p = [p0, alg.transition(p0, [send(q0), send(p0), send(q1)])]
    q = [q0, q1]

    def grow() -> None:
        r = len(q) - 1
        q.append(alg.transition(q[r], [send(p[r - 1]), send(q[r]), send(p[r])]))
        p.append(alg.transition(p[r], [send(q[r]), send(p[r]), send(q[r + 1])]))

    seen: Dict[Tuple, int] = {}
    r = 1
    while (p[r - 1], p[r], q[r]) not in seen:
        seen[(p[r - 1], p[r], q[r])] = r
        grow()
        r += 1
    L = r - seen[(p[r - 1], p[r], q[r])]

    while len(q) < max(length, r + 1):
        grow()
    pairs = list(zip(p, q))
    certificate = PeriodicityCertificate(ell=minimal_start(pairs, L) + 1, L=L)
    logger.debug(f"Paired period: ell={certificate.ell}, L={certificate.L}")

    return (
        SequenceTape(tuple(p[:length]), "paired-p"),
        SequenceTape(tuple(q[:length]), "paired-q"),
        certificate,
    )


# =============================================================================
# CHERRY FAMILY
# =============================================================================

@dataclass(frozen=True)
class CherryFamily:
    """
    Rows q_k^r for k = 0..k_max and r = 0..4L-1:
        q_0^0 = seed, q_1^r = q_0^r,
        q_k^0 = tau(q_{k-2}^{2L-1}, {sigma(q_{k-2}^{2L-1}), sigma(q_{k-1}^L), ..., sigma(q_{k-1}^{2L-1})})  (k >= 2),
        q_k^r = tau(q_k^{r-1}, {sigma(q_k^{r-1})})  (r >= 1).
    """

    algorithm: FiniteAlgorithm = field(compare=False, repr=False)
    L: int
    rows: Tuple[Tuple[State, ...], ...]

    @property
    def k_max(self) -> int:
        return len(self.rows) - 1

    def entry(self, k: int, r: int) -> State:
        """q_k^r; indices past the stored width fold back by L-periodicity."""
        if not 0 <= k <= self.k_max:
            raise InvalidParameterError(f"Row {k} outside [0, {self.k_max}]")
        if r < 0:
            raise InvalidParameterError(f"Index must be >= 0, got {r}")
        row = self.rows[k]
        if r >= len(row):
            r = self.L - 1 + (r - self.L + 1) % self.L
        return row[r]

    def verify_rows(self) -> bool:
        """Re-check the defining rules and L-periodicity from index L-1."""
        alg, L = self.algorithm, self.L
        send = alg.message_of
        step = self_step(alg)
        if self.k_max >= 1 and self.rows[1] != self.rows[0]:
            return False
        for k, row in enumerate(self.rows):
            if k >= 2:
                head = self.rows[k - 2][2 * L - 1]
                bag = [send(head)] + [send(self.rows[k - 1][r]) for r in range(L, 2 * L)]
                if row[0] != alg.transition(head, bag):
                    return False
            for r in range(1, len(row)):
                if row[r] != step(row[r - 1]):
                    return False
            for r in range(L - 1, len(row) - L):
                if row[r + L] != row[r]:
                    return False
        return True


def cherry_family(alg: FiniteAlgorithm, q00: State, k_max: int) -> CherryFamily:
    """Materialize the cherry rows with L = |Q|^!."""
    alg.require_enumerable()
    if q00 not in alg.initial_states:
        raise InitialStateError(alg.name_of(q00))
    if k_max < 1:
        raise InvalidParameterError(f"k_max must be >= 1, got {k_max}")

    L = lcm_upto(alg.state_count)
    budget = config.runtime.NODE_BUDGET
    if 2 * L > budget:
        raise SizeWarning(2 * L, budget)

    send = alg.message_of
    step = self_step(alg)
    width = 4 * L

    def row_from(head: State) -> Tuple[State, ...]:
        values = [head]
        while len(values) < width:
            values.append(step(values[-1]))
        return tuple(values)

    rows: List[Tuple[State, ...]] = [row_from(q00)]
    if k_max >= 1:
        rows.append(rows[0])
    for k in range(2, k_max + 1):
        head = rows[k - 2][2 * L - 1]
        bag = [send(head)] + [send(rows[k - 1][r]) for r in range(L, 2 * L)]
        rows.append(row_from(alg.transition(head, bag)))

    logger.debug(f"Cherry family for {alg.name}: L={L}, rows 0..{k_max}")
    return CherryFamily(alg, L, tuple(rows))
