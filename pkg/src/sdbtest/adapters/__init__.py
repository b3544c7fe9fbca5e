"""Execution targets: the in-process reference engine and command-line clients."""
from __future__ import annotations

from .base import (
    Adapter,
    Dialect,
    EngineError,
    ErrorKind,
    InsertResult,
    TransportError,
    get_dialect,
    load_dialects,
)
from .client import ClientAdapter
from .reference import FaultSpec, ReferenceAdapter


def make_adapter(target: str = "reference", *, namespace: str = "sdbtest", faults=(),
                 delay: float = 0.0, command: str | None = None, cache: dict | None = None) -> Adapter:
    """Build an adapter for ``target`` (a dialect name)."""
    dialect = get_dialect(target)
    if target == "reference":
        return ReferenceAdapter(dialect, faults=faults, delay=delay, cache=cache)
    if faults or delay:
        raise ValueError("faults and delays are only available on the reference engine")
    if not command:
        raise ValueError(f"target {target!r} needs a client command")
    return ClientAdapter(dialect, command, namespace=namespace)


__all__ = [
    "Adapter", "ClientAdapter", "Dialect", "EngineError", "ErrorKind", "FaultSpec", "InsertResult",
    "ReferenceAdapter", "TransportError", "get_dialect", "load_dialects", "make_adapter",
]
