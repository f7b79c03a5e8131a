"""Size and fuel guards, overridable through ``HORSCK_LIMITS``.

The variable holds comma-separated ``key=value`` pairs, for example
``HORSCK_LIMITS="max_vertices=5000,fuel=200"``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "HORSCK_LIMITS"


@dataclass(frozen=True)
class Limits:
    max_vertices: int = 200_000  # game vertices
    fuel: int = 10_000  # head-rewriting steps per tree node
    naive_budget: int = 200_000  # strategy nodes explored by the naive solver
    search_steps: int = 20_000_000  # context combinations during proof search

    @classmethod
    def from_env(cls, environ=None) -> "Limits":
        environ = os.environ if environ is None else environ
        raw = environ.get(ENV_VAR, "").strip()
        if not raw:
            return cls()
        known = {f.name for f in fields(cls)}
        updates = {}
        for part in raw.split(","):
            part = part.strip()
            if not part:
                continue
            key, sep, value = part.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise ValueError(f"bad {ENV_VAR} entry {part!r}; known keys: {sorted(known)}")
            try:
                updates[key] = int(value)
            except ValueError:
                raise ValueError(f"bad {ENV_VAR} value for {key}: {value!r}") from None
        return replace(cls(), **updates)
