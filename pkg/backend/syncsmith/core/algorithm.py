"""
Finite-state agent programs.

An algorithm is the tuple (Q, Q0, M, sigma, tau) plus the clock readout used by
the synchronization check. Received messages form a multiset, represented as a
collections.Counter so that equality is by element counts and order-free.
"""

from collections import Counter
from itertools import combinations_with_replacement
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence

from loguru import logger

from ..config import config
from ..exceptions import InvalidParameterError, Unenumerable, UnknownState


State = Hashable
Message = Hashable


def bag_of(messages: Iterable[Message]) -> Counter:
    """Multiset of received messages."""
    return Counter(messages)


def bag_key(bag: Counter) -> frozenset:
    """Hashable, order-free key of a multiset."""
    return frozenset((m, c) for m, c in bag.items() if c > 0)


class FiniteAlgorithm:
    """
    Anonymous agent program.

    `states` is None for reference algorithms whose state space is not
    enumerable (flagged unbounded); those run under `execute` but are rejected
    by every construction that needs to walk Q.
    """

    def __init__(
        self,
        name: str,
        states: Optional[Sequence[State]],
        initial_states: Iterable[State],
        message_of: Callable[[State], Message],
        transition: Callable[[State, Counter], State],
        period: int,
        clock_of: Callable[[State], int],
        name_of: Callable[[State], str] = str,
        parse_name: Optional[Callable[[str], State]] = None,
    ):
        """
        Args:
            name: Registry name or FSM label, used in reports
            states: The finite set Q, or None when unbounded
            initial_states: Nonempty subset Q0
            message_of: Sending function sigma
            transition: tau(state, Counter of messages)
            period: P > 1
            clock_of: Clock readout into [0, P)
            name_of: State token -> display name
            parse_name: Display name -> state token (required when unbounded)
        """
        if period <= 1:
            raise InvalidParameterError(f"Period must exceed 1, got {period}", {"period": period})

        self.name = name
        self.period = period
        self._send = message_of
        self._step = transition
        self._clock = clock_of
        self._name_of = name_of
        self._parse_name = parse_name
        self._memo: Dict[tuple, State] = {}

        self.states = tuple(states) if states is not None else None
        self.initial_states = frozenset(initial_states)
        if not self.initial_states:
            raise InvalidParameterError("Initial state set is empty", {"algorithm": name})

        self._by_name: Dict[str, State] = {}
        if self.states is not None:
            self._state_set = frozenset(self.states)
            for s in self.initial_states:
                if s not in self._state_set:
                    raise UnknownState(s, name)
            for s in self.states:
                label = self._name_of(s)
                if label in self._by_name:
                    raise InvalidParameterError(
                        f"Two states share the display name {label!r}", {"algorithm": name}
                    )
                self._by_name[label] = s
                self._send(s)
                value = self._clock(s)
                if not 0 <= value < period:
                    raise InvalidParameterError(
                        f"Clock of state {label!r} is {value}, outside [0, {period})",
                        {"algorithm": name, "state": label},
                    )
        else:
            self._state_set = None
            if parse_name is None:
                raise InvalidParameterError(
                    "Unbounded algorithms need a state-name parser", {"algorithm": name}
                )

        logger.debug(
            f"Algorithm {name}: "
            + (f"|Q|={len(self.states)}" if self.states is not None else "unbounded")
            + f", P={period}"
        )

    # ------------------------------------------------------------------
    # State space
    # ------------------------------------------------------------------

    @property
    def is_enumerable(self) -> bool:
        return self.states is not None

    @property
    def state_count(self) -> int:
        self.require_enumerable()
        return len(self.states)

    def require_enumerable(self) -> None:
        if not self.is_enumerable:
            raise Unenumerable(self.name)

    def check_state(self, state: State) -> None:
        """Raise UnknownState if the token is outside Q (enumerable algorithms only)."""
        if self._state_set is not None and state not in self._state_set:
            raise UnknownState(state, self.name)

    def name_of(self, state: State) -> str:
        return self._name_of(state)

    def parse_state(self, label: str) -> State:
        """Map a display name back to its state token."""
        if self._state_set is not None:
            if label not in self._by_name:
                raise UnknownState(label, self.name)
            return self._by_name[label]
        try:
            return self._parse_name(label)
        except (TypeError, ValueError):
            raise UnknownState(label, self.name)

    def message_alphabet(self) -> List[Message]:
        """Messages actually emitted by some state (enumerable algorithms only)."""
        self.require_enumerable()
        seen = []
        for s in self.states:
            m = self._send(s)
            if m not in seen:
                seen.append(m)
        return seen

    # ------------------------------------------------------------------
    # sigma, tau, C
    # ------------------------------------------------------------------

    def message_of(self, state: State) -> Message:
        self.check_state(state)
        return self._send(state)

    def clock_of(self, state: State) -> int:
        self.check_state(state)
        return self._clock(state) % self.period

    def transition(self, state: State, received: Iterable[Message]) -> State:
        """
        Apply tau to a state and a nonempty multiset of messages.

        `received` may be a Counter or any iterable of messages.
        """
        self.check_state(state)
        bag = received if isinstance(received, Counter) else bag_of(received)
        if sum(bag.values()) == 0:
            raise InvalidParameterError("Transition needs a nonempty multiset", {"state": repr(state)})

        if self._state_set is None:
            return self._step(state, Counter(bag))

        key = (state, bag_key(bag))
        if key not in self._memo:
            nxt = self._step(state, Counter(bag))
            if nxt not in self._state_set:
                raise UnknownState(nxt, self.name)
            self._memo[key] = nxt
        return self._memo[key]

    def check_closure(self, max_multiset: Optional[int] = None) -> None:
        """
        Walk every (state, multiset) pair up to a multiset size and confirm
        that tau never leaves Q.
        """
        self.require_enumerable()
        size = max_multiset or config.simulation.CLOSURE_MULTISET_SIZE
        alphabet = self.message_alphabet()
        checked = 0
        for s in self.states:
            for k in range(1, size + 1):
                for combo in combinations_with_replacement(range(len(alphabet)), k):
                    self.transition(s, bag_of(alphabet[c] for c in combo))
                    checked += 1
        logger.debug(f"Closure walk for {self.name}: {checked} transitions stay in Q")

    def __repr__(self) -> str:
        size = len(self.states) if self.states is not None else "inf"
        return f"FiniteAlgorithm({self.name!r}, |Q|={size}, P={self.period})"
