"""Bundled instances from the published figures, with their expected results."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any

from ..graph import Network, ServiceChain, network_from_json

NAMES = ("fig2", "fig4", "fig6a", "fig7a")


@dataclass(frozen=True)
class InstanceFixture:
    name: str
    network: Network
    annotations: tuple[dict[str, Any], ...]
    raw: dict[str, Any]


def fixture_path(name: str):
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {NAMES}")
    return resources.files(__package__) / f"{name}.json"


def load_fixture(name: str) -> InstanceFixture:
    raw = json.loads(fixture_path(name).read_text())
    return InstanceFixture(
        raw["name"],
        network_from_json(raw["network"]),
        tuple(raw.get("annotations", ())),
        raw,
    )


def chain_from_list(items: list[str]) -> ServiceChain:
    """``[source, f1, ..., fr, destination]`` as a service chain."""
    if len(items) < 2:
        raise ValueError("a chain needs at least a source and a destination")
    return ServiceChain(items[0], items[-1], tuple(items[1:-1]))
