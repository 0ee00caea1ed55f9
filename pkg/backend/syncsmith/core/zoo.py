"""
Algorithm Zoo
Built-in reference algorithms and the declarative FSM loader.
"""

import json
from collections import Counter
from itertools import combinations, product
from pathlib import Path
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Tuple, Union

import pandas as pd
from loguru import logger
from pydantic import ValidationError as PydanticValidationError

from ..config import MultisetMode, config
from ..exceptions import ClockRange, InvalidParameterError, PartialTable, SchemaError
from ..models.schemas import FsmDocument, SaturatingMode
from .algorithm import FiniteAlgorithm


# =============================================================================
# BUILT-IN ALGORITHMS
# =============================================================================

def make_mod_p_max(P: int) -> FiniteAlgorithm:
    """Q = M = [P], sigma = id, tau(q, S) = (max S + 1) mod P, clock = id."""
    if P < 2:
        raise InvalidParameterError(f"modmax needs P >= 2, got {P}", {"P": P})
    states = list(range(P))
    return FiniteAlgorithm(
        name=f"modmax:{P}",
        states=states,
        initial_states=states,
        message_of=lambda q: q,
        transition=lambda q, bag: (max(bag) + 1) % P,
        period=P,
        clock_of=lambda q: q,
    )


def _parse_height(label: str) -> int:
    h = int(label)
    if h < 0:
        raise ValueError(f"negative height {h}")
    return h


def make_flood_max(period: Optional[int] = None) -> FiniteAlgorithm:
    """
    Unbounded positive control: state h in N, sigma(h) = h,
    tau(h, S) = 1 + max S, clock(h) = h mod P.
    """
    P = period or config.zoo.FLOOD_MAX_PERIOD
    if P < 2:
        raise InvalidParameterError(f"floodmax needs P >= 2, got {P}", {"P": P})
    return FiniteAlgorithm(
        name=f"floodmax:{P}",
        states=None,
        initial_states=[0],
        message_of=lambda h: h,
        transition=lambda h, bag: 1 + max(bag),
        period=P,
        clock_of=lambda h: h % P,
        parse_name=_parse_height,
    )


def make_constant(P: int) -> FiniteAlgorithm:
    """State-preserving control: tau(q, S) = q."""
    if P < 2:
        raise InvalidParameterError(f"constant needs P >= 2, got {P}", {"P": P})
    states = list(range(P))
    return FiniteAlgorithm(
        name=f"constant:{P}",
        states=states,
        initial_states=states,
        message_of=lambda q: q,
        transition=lambda q, bag: q,
        period=P,
        clock_of=lambda q: q,
    )


BUILTINS: Dict[str, Dict[str, Any]] = {
    "modmax": {
        "factory": make_mod_p_max,
        "needs_period": True,
        "description": "(max received + 1) mod P; bounded, never synchronizes against the adversary",
    },
    "floodmax": {
        "factory": make_flood_max,
        "needs_period": False,
        "description": "1 + max received, clock = height mod P; unbounded positive control",
    },
    "constant": {
        "factory": make_constant,
        "needs_period": True,
        "description": "state never changes; bounded negative control",
    },
}


def resolve_builtin(spec: str) -> FiniteAlgorithm:
    """'modmax:3', 'floodmax', 'floodmax:6', 'constant:2'."""
    head, _, tail = spec.partition(":")
    entry = BUILTINS.get(head)
    if entry is None:
        raise InvalidParameterError(
            f"Unknown builtin {spec!r}; choose from {sorted(BUILTINS)}", {"builtin": spec}
        )
    if not tail:
        if entry["needs_period"]:
            raise InvalidParameterError(f"Builtin {head!r} needs a period, e.g. {head}:3")
        return entry["factory"]()
    try:
        P = int(tail)
    except ValueError:
        raise InvalidParameterError(f"Builtin period {tail!r} is not an integer", {"builtin": spec})
    return entry["factory"](P)


def list_zoo() -> pd.DataFrame:
    rows = []
    for name, entry in BUILTINS.items():
        example = entry["factory"](3) if entry["needs_period"] else entry["factory"]()
        rows.append({
            "name": f"{name}:P" if entry["needs_period"] else f"{name}[:P]",
            "enumerable": example.is_enumerable,
            "states": "P" if example.is_enumerable else "unbounded",
            "description": entry["description"],
        })
    return pd.DataFrame(rows, columns=["name", "enumerable", "states", "description"])


# =============================================================================
# FSM DOCUMENTS
# =============================================================================

AbstractKey = FrozenSet


def _saturation_cap(raw: str) -> int:
    text = raw.strip()
    for prefix in ("≥", ">="):
        if text.startswith(prefix):
            return int(text[len(prefix):])
    raise ValueError(raw)


def _mode_kind(mode: Union[str, SaturatingMode]) -> MultisetMode:
    return MultisetMode.SET if isinstance(mode, str) else MultisetMode.SATURATING


def _row_key(row, mode: Union[str, SaturatingMode], alphabet: List[str]) -> AbstractKey:
    counts: Dict[str, int] = {}
    for msg, raw in row.recv.items():
        if msg not in alphabet:
            raise SchemaError(f"Row for {row.state!r} receives unknown message {msg!r}", {"message": msg})
        if isinstance(raw, str):
            try:
                cap = _saturation_cap(raw)
            except ValueError:
                raise SchemaError(f"Count {raw!r} is neither an integer nor '≥κ'", {"message": msg})
            if _mode_kind(mode) is MultisetMode.SET or cap != mode.saturating:
                raise SchemaError(f"Count {raw!r} does not match the table mode", {"message": msg})
            value = cap
        else:
            value = raw
        if value < 0:
            raise SchemaError(f"Negative count for message {msg!r}", {"message": msg})
        if _mode_kind(mode) is MultisetMode.SATURATING and value > mode.saturating:
            raise SchemaError(
                f"Count {value} for {msg!r} exceeds the saturation cap {mode.saturating}",
                {"message": msg},
            )
        if value > 0:
            counts[msg] = value
    if not counts:
        raise SchemaError(f"Row for {row.state!r} receives nothing", {"state": row.state})
    if _mode_kind(mode) is MultisetMode.SET:
        return frozenset(counts)
    return frozenset(counts.items())


def _abstract_keys(mode: Union[str, SaturatingMode], alphabet: List[str]) -> List[AbstractKey]:
    """Every nonempty abstract multiset realizable over the alphabet."""
    if _mode_kind(mode) is MultisetMode.SET:
        return [
            frozenset(combo)
            for size in range(1, len(alphabet) + 1)
            for combo in combinations(alphabet, size)
        ]
    keys = []
    for counts in product(range(mode.saturating + 1), repeat=len(alphabet)):
        if any(counts):
            keys.append(frozenset((m, c) for m, c in zip(alphabet, counts) if c > 0))
    return keys


def _abstractor(mode: Union[str, SaturatingMode]) -> Callable[[Counter], AbstractKey]:
    if _mode_kind(mode) is MultisetMode.SET:
        return lambda bag: frozenset(m for m, c in bag.items() if c > 0)
    cap = mode.saturating
    return lambda bag: frozenset((m, min(c, cap)) for m, c in bag.items() if c > 0)


def _describe_key(key: AbstractKey) -> str:
    parts = [f"{k[0]}x{k[1]}" if isinstance(k, tuple) else str(k) for k in key]
    return "{" + ", ".join(sorted(parts)) + "}"


def load_fsm(document: Union[FsmDocument, Dict[str, Any]]) -> FiniteAlgorithm:
    """
    Build an algorithm from an FSM document. The received multiset is reduced
    to its set of messages ("set") or to counts saturated at kappa; the table
    must cover every such key for every state.
    """
    if not isinstance(document, FsmDocument):
        try:
            document = FsmDocument.model_validate(document)
        except PydanticValidationError as e:
            raise SchemaError(f"Invalid FSM document: {e}")

    for state, value in document.clock.items():
        if not 0 <= value < document.P:
            raise ClockRange(state, value, document.P)

    alphabet = sorted(set(document.message.values()))
    mode = document.mode

    table: Dict[Tuple[str, AbstractKey], str] = {}
    for row in document.delta:
        key = (row.state, _row_key(row, mode, alphabet))
        if key in table and table[key] != row.next:
            raise SchemaError(
                f"Conflicting rows for state {row.state!r} receiving {_describe_key(key[1])}",
                {"state": row.state},
            )
        table[key] = row.next

    for state in document.states:
        for key in _abstract_keys(mode, alphabet):
            if (state, key) not in table:
                raise PartialTable(state, _describe_key(key))

    abstract = _abstractor(mode)
    name = document.name or "fsm"
    algorithm = FiniteAlgorithm(
        name=name,
        states=document.states,
        initial_states=document.initial,
        message_of=document.message.__getitem__,
        transition=lambda q, bag: table[(q, abstract(bag))],
        period=document.P,
        clock_of=document.clock.__getitem__,
    )
    algorithm.check_closure()
    logger.info(
        f"Loaded FSM {name}: |Q|={len(document.states)}, {len(table)} table rows, {_mode_kind(mode).value} mode"
    )
    return algorithm


def load_fsm_file(path) -> FiniteAlgorithm:
    """Read and load an FSM JSON file; OSError propagates for missing files."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise SchemaError(f"FSM file {path} is not UTF-8 text: {e}", {"path": str(path)})
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise SchemaError(f"FSM file {path} is not valid JSON: {e}", {"path": str(path)})
    if isinstance(data, dict) and "name" not in data:
        data["name"] = path.stem
    return load_fsm(data)
