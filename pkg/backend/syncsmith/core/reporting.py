"""
Report Generator
Byte-stable JSON for reports and JSONL for traces.
"""

import json
from pathlib import Path
from typing import Any, Iterable, Union

from loguru import logger
from pydantic import BaseModel

from .engine import Trace


def to_json(payload: Union[BaseModel, Any]) -> str:
    """Sorted-key JSON; pydantic models are dumped in JSON mode first."""
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    elif isinstance(payload, list):
        payload = [p.model_dump(mode="json") if isinstance(p, BaseModel) else p for p in payload]
    return json.dumps(payload, sort_keys=True, ensure_ascii=False)


def write_json(payload: Union[BaseModel, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(to_json(payload) + "\n", encoding="utf-8")
    logger.info(f"Report written to {path}")
    return path


def trace_lines(trace: Trace) -> Iterable[str]:
    for row in trace.rows():
        yield json.dumps(row, sort_keys=True, ensure_ascii=False)


def write_trace(trace: Trace, path: Union[str, Path]) -> Path:
    """One JSON record per round: {"t", "states", "clocks"}."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for line in trace_lines(trace):
            fh.write(line + "\n")
    logger.info(f"Trace of {trace.horizon + 1} rounds written to {path}")
    return path
