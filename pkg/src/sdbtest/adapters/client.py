"""Real engines reached through their command-line client.

Each statement is piped to a fresh client process (``psql``, ``mysql``,
``duckdb`` ...).  The command is a list of argument templates; ``{namespace}``
is substituted so every worker gets its own schema or database file.  The
dialect's ``session_prefix`` is prepended to every statement, which keeps
per-process clients in the right namespace without session state.
"""
from __future__ import annotations

import re
import shlex
import subprocess

from .base import Adapter, Dialect, EngineError, ErrorKind, TransportError

_INT_LINE = re.compile(r"^\s*\(?\s*(-?\d+)\s*\)?\s*$")
_COUNT_HEAD = re.compile(r"^\s*select\s+count", re.I)


class ClientAdapter(Adapter):
    def __init__(self, dialect: Dialect, command: str | list[str], namespace: str = "sdbtest",
                 timeout: float = 60.0):
        super().__init__(dialect)
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.argv = [a.format(namespace=namespace) for a in argv]
        self.namespace = namespace
        self.timeout = timeout

    def _send(self, sql: str):
        text = self.dialect.session_prefix.format(namespace=self.namespace) + sql
        try:
            proc = subprocess.run(self.argv, input=text, capture_output=True, text=True,
                                  timeout=self.timeout)
        except FileNotFoundError as exc:
            raise TransportError(f"client not found: {exc}") from None
        except subprocess.TimeoutExpired:
            raise TransportError(f"client timed out after {self.timeout}s") from None
        err = proc.stderr.strip()
        if proc.returncode != 0 or _looks_like_error(err):
            message = err or proc.stdout.strip() or f"exit status {proc.returncode}"
            kind = self.dialect.classify(message)
            if kind is ErrorKind.TRANSPORT:
                raise TransportError(message)
            raise EngineError(kind, message)
        if _COUNT_HEAD.match(sql):
            return _last_integer(proc.stdout)
        return None


def _looks_like_error(stderr: str) -> bool:
    return bool(re.search(r"\berror\b", stderr, re.I))


def _last_integer(stdout: str) -> int:
    for line in reversed(stdout.splitlines()):
        m = _INT_LINE.match(line.strip().strip("|").strip())
        if m:
            return int(m.group(1))
    raise EngineError(ErrorKind.ENGINE, f"no integer in client output: {stdout[-200:]!r}")
