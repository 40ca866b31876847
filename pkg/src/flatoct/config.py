"""Default search budgets (overridable through ``FLATOCT_BUDGET``)."""

from __future__ import annotations

import os

DEFAULT_NODE_BUDGET = 1_000_000
DEFAULT_VERTEX_BUDGET = 200_000


def _env_budget() -> int | None:
    raw = os.environ.get("FLATOCT_BUDGET")
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        return None
    return value if value > 0 else None


def node_budget(explicit: int | None = None) -> int:
    if explicit is not None:
        return explicit
    return _env_budget() or DEFAULT_NODE_BUDGET


def vertex_budget(explicit: int | None = None) -> int:
    if explicit is not None:
        return explicit
    return _env_budget() or DEFAULT_VERTEX_BUDGET
