from __future__ import annotations

from .settings import RunConfig

PRESETS = ("capacities", "region", "table1", "table2")


def apply_preset(name: str, base: RunConfig) -> RunConfig:
    name = name.lower()

    if name == "capacities":
        return base.__class__(
            **{**base.__dict__,
               "command": "capacity",
               "m_list": (2, 3, 4, 5, 11, 21, 41, 101),
               "q_list": (1, 2)}
        )

    if name == "region":
        return base.__class__(
            **{**base.__dict__,
               "command": "region",
               "step": 0.01}
        )

    if name == "table1":
        return base.__class__(
            **{**base.__dict__,
               "command": "simulate",
               "code": "table1",
               "blocks": 4,
               "messages": (1, 2, 4, 7),
               "exhaustive": False}
        )

    if name == "table2":
        return base.__class__(
            **{**base.__dict__,
               "command": "simulate",
               "code": "table2",
               "blocks": 3,
               "exhaustive": True}
        )

    raise ValueError(f"Unknown preset: {name}")
