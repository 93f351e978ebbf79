"""Deterministic line-oriented report and config documents.

Format (schema version 1): one ``key = value`` assignment per line, keys in
fixed dotted notation, values as Python literals (floats serialized with
full round-trip precision via ``repr``).  Lines starting with ``#`` and
blank lines are ignored when parsing.  The same syntax is used for analysis
configuration files, so reports echo their config verbatim.
"""

from __future__ import annotations

import ast
from typing import Iterable

import numpy as np

from .errors import ConfigParseError

SCHEMA_VERSION = 1


def _fmt(value) -> str:
    if isinstance(value, (bool, type(None))):
        return repr(value)
    if isinstance(value, (int, np.integer)):
        return repr(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, str):
        return repr(value)
    if isinstance(value, np.ndarray):
        return _fmt(value.tolist())
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, dict):
        items = ", ".join(f"{_fmt(str(k))}: {_fmt(v)}" for k, v in value.items())
        return "{" + items + "}"
    raise TypeError(f"cannot serialize value of type {type(value)!r}")


def render(entries: Iterable[tuple[str, object]]) -> str:
    lines = [f"{key} = {_fmt(value)}" for key, value in entries]
    return "\n".join(lines) + "\n"


def parse(text: str) -> dict[str, object]:
    """Parse a report/config document into a flat {dotted key: value} dict."""
    out: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigParseError(f"line {lineno}: expected 'key = value'")
        key, _, rhs = line.partition("=")
        key = key.strip()
        try:
            value = ast.literal_eval(rhs.strip())
        except (ValueError, SyntaxError) as exc:
            raise ConfigParseError(f"line {lineno}: bad literal {rhs.strip()!r}") from exc
        if key in out:
            raise ConfigParseError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out
