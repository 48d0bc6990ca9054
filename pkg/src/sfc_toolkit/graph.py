"""Network, service chain and walk data model.

Costs and capacities are exact :class:`fractions.Fraction` values. A network is
either directed or undirected; undirected edges are stored once and exposed to
algorithms as a pair of arcs through :attr:`Network.arcs`.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Mapping, NamedTuple, Sequence


class GraphError(ValueError):
    """Raised for malformed networks, chains or graph JSON."""


def to_fraction(value: Any) -> Fraction:
    """Convert ints, decimal floats and ``"p/q"`` strings to an exact Fraction."""
    if isinstance(value, bool):
        raise GraphError(f"expected a number, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise GraphError(f"non-finite number {value!r}")
        # repr() gives the shortest decimal that round-trips, so 0.1 -> 1/10
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise GraphError(f"cannot parse number {value!r}") from exc
    try:
        return Fraction(value)
    except (TypeError, ValueError) as exc:
        raise GraphError(f"expected a number, got {value!r}") from exc


def fraction_to_json(value: Fraction) -> int | str:
    """Integral values become ints, everything else an exact ``"p/q"`` string."""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Edge:
    tail: str
    head: str
    cost: Fraction = Fraction(1)
    capacity: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "cost", to_fraction(self.cost))
        object.__setattr__(self, "capacity", to_fraction(self.capacity))


class Arc(NamedTuple):
    """One traversable direction of an edge; ``edge`` indexes ``Network.edges``."""

    tail: str
    head: str
    cost: Fraction
    capacity: Fraction
    edge: int


@dataclass(frozen=True)
class Network:
    """Weighted, capacitated graph with the set of functions hosted at each node.

    Construction does not validate; call :func:`validate` on untrusted input.
    """

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...] = ()
    functions: Mapping[str, frozenset[str]] = field(default_factory=dict)
    directed: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        edges = tuple(e if isinstance(e, Edge) else Edge(*e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        funcs = {v: frozenset(fs) for v, fs in dict(self.functions).items()}
        object.__setattr__(self, "functions", funcs)

    def hosted(self, node: str) -> frozenset[str]:
        return self.functions.get(node, frozenset())

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.nodes)}

    @cached_property
    def arcs(self) -> tuple[Arc, ...]:
        out = []
        for k, e in enumerate(self.edges):
            out.append(Arc(e.tail, e.head, e.cost, e.capacity, k))
            if not self.directed:
                out.append(Arc(e.head, e.tail, e.cost, e.capacity, k))
        return tuple(out)

    @cached_property
    def out_arcs(self) -> dict[str, tuple[Arc, ...]]:
        adj: dict[str, list[Arc]] = {v: [] for v in self.nodes}
        for a in self.arcs:
            adj.setdefault(a.tail, []).append(a)
        return {v: tuple(arcs) for v, arcs in adj.items()}

    @cached_property
    def arc_lookup(self) -> dict[tuple[str, str], Arc]:
        return {(a.tail, a.head): a for a in self.arcs}

    def hosts_of(self, function: str) -> list[str]:
        return [v for v in self.nodes if function in self.hosted(v)]

    def total_capacity(self) -> Fraction:
        return sum((e.capacity for e in self.edges), Fraction(0))

    def with_edges(self, edges: Iterable[Edge], nodes: Iterable[str] | None = None) -> Network:
        """Copy of this network with a different edge list (and optionally nodes)."""
        return Network(
            tuple(self.nodes if nodes is None else nodes),
            tuple(edges),
            self.functions,
            self.directed,
        )


@dataclass(frozen=True)
class ServiceChain:
    """``(source, phi_1, ..., phi_r, destination)``.

    ``flexible_groups`` optionally partitions the 0-based chain positions into
    contiguous groups; functions inside one group may run in any order.
    """

    source: str
    destination: str
    chain: tuple[str, ...] = ()
    flexible_groups: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "chain", tuple(self.chain))
        if self.flexible_groups is not None:
            groups = tuple(tuple(g) for g in self.flexible_groups)
            object.__setattr__(self, "flexible_groups", groups)
        if self.source == self.destination and not self.chain:
            raise GraphError("source equals destination with an empty chain")

    @property
    def r(self) -> int:
        return len(self.chain)

    @classmethod
    def fully_flexible(cls, source: str, destination: str, chain: Sequence[str]) -> ServiceChain:
        return cls(source, destination, tuple(chain), (tuple(range(len(chain))),))


@dataclass(frozen=True)
class Walk:
    """Node sequence of a walk (repeats allowed) and its total cost."""

    nodes: tuple[str, ...]
    cost: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "cost", to_fraction(self.cost))

    @property
    def hops(self) -> int:
        return len(self.nodes) - 1


def validate(net: Network) -> list[str]:
    """Return every invariant violation in ``net``; an empty list means ok."""
    problems: list[str] = []
    known = set()
    for v in net.nodes:
        if v in known:
            problems.append(f"duplicate node {v!r}")
        known.add(v)
    seen: set = set()
    for k, e in enumerate(net.edges):
        where = f"edge {k} ({e.tail!r}->{e.head!r})"
        for end in (e.tail, e.head):
            if end not in known:
                problems.append(f"{where}: unknown endpoint {end!r}")
        if e.tail == e.head:
            problems.append(f"{where}: self-loop")
        if e.cost < 0:
            problems.append(f"{where}: negative cost {e.cost}")
        if e.capacity < 0:
            problems.append(f"{where}: negative capacity {e.capacity}")
        key = (e.tail, e.head) if net.directed else frozenset((e.tail, e.head))
        if key in seen:
            problems.append(f"{where}: duplicate edge")
        seen.add(key)
    for v in net.functions:
        if v not in known:
            problems.append(f"functions given for unknown node {v!r}")
    return problems


def require_valid(net: Network) -> None:
    problems = validate(net)
    if problems:
        raise GraphError("; ".join(problems))


def random_network(
    n: int,
    z: float,
    avg_degree: float,
    cap_range: tuple[int, int],
    seed: int,
    *,
    catalog: Sequence[str] = ("phi1", "phi2", "phi3"),
    directed: bool = True,
    cost_range: tuple[int, int] = (1, 10),
) -> Network:
    """Random network with nodes ``v0 .. v{n-1}``.

    Every ordered pair (unordered when undirected) becomes an edge with
    probability ``avg_degree / (n - 1)``, so the expected out-degree (degree
    when undirected) is ``avg_degree``. Each catalog function is placed at
    each node independently with probability ``z``. Capacities and costs are
    integers drawn uniformly from the given inclusive ranges.
    """
    if n < 2:
        raise GraphError("need at least two nodes")
    if not 0 <= z <= 1:
        raise GraphError(f"function probability {z} outside [0, 1]")
    lo, hi = cap_range
    if lo > hi or lo < 0:
        raise GraphError(f"bad capacity range {cap_range}")
    clo, chi = cost_range
    if clo > chi or clo < 0:
        raise GraphError(f"bad cost range {cost_range}")
    if avg_degree < 0:
        raise GraphError("average degree must be nonnegative")

    rng = random.Random(seed)
    nodes = tuple(f"v{i}" for i in range(n))
    p = min(1.0, avg_degree / (n - 1))
    edges = []
    if p > 0:
        pairs = itertools.permutations(nodes, 2) if directed else itertools.combinations(nodes, 2)
        for u, v in pairs:
            if rng.random() < p:
                edges.append(Edge(u, v, rng.randint(clo, chi), rng.randint(lo, hi)))
    functions = {v: frozenset(f for f in catalog if rng.random() < z) for v in nodes}
    return Network(nodes, tuple(edges), functions, directed)


def chain_orderings(sc: ServiceChain) -> list[ServiceChain]:
    """All fixed-order chains admitted by ``sc.flexible_groups``.

    The first ordering is always the chain as written. The count equals the
    product of the group-size factorials (duplicates are kept when a chain
    repeats a function).
    """
    if not sc.flexible_groups:
        return [ServiceChain(sc.source, sc.destination, sc.chain)]
    groups = sc.flexible_groups
    flat = [p for g in groups for p in g]
    if sorted(flat) != list(range(sc.r)):
        raise GraphError(f"flexible groups {groups} do not partition positions 0..{sc.r - 1}")
    for g in groups:
        if list(g) != list(range(g[0], g[0] + len(g))):
            raise GraphError(f"flexible group {g} is not contiguous")
    groups = sorted(groups, key=lambda g: g[0])
    result = []
    for combo in itertools.product(*(itertools.permutations(g) for g in groups)):
        order = [p for perm in combo for p in perm]
        result.append(ServiceChain(sc.source, sc.destination, tuple(sc.chain[p] for p in order)))
    return result


def walk_cost(net: Network, nodes: Sequence[str]) -> Fraction:
    """Sum of edge costs along ``nodes``; raises if two consecutive nodes are not adjacent."""
    total = Fraction(0)
    lookup = net.arc_lookup
    for u, v in zip(nodes, nodes[1:]):
        arc = lookup.get((u, v))
        if arc is None:
            raise GraphError(f"no edge {u!r}->{v!r}")
        total += arc.cost
    return total


def chain_progress(net: Network, nodes: Sequence[str], chain: Sequence[str]) -> int:
    """Number of leading chain functions a walk completes, processing greedily.

    Every visited node, including the first, applies as many of the next
    pending functions as it hosts. Greedy earliest processing is optimal, so
    the walk is admissible for the chain iff this returns ``len(chain)``.
    """
    level = 0
    r = len(chain)
    for v in nodes:
        hosted = net.hosted(v)
        while level < r and chain[level] in hosted:
            level += 1
    return level


def is_admissible(net: Network, walk: Walk, sc: ServiceChain) -> bool:
    if not walk.nodes or walk.nodes[0] != sc.source or walk.nodes[-1] != sc.destination:
        return False
    try:
        cost = walk_cost(net, walk.nodes)
    except GraphError:
        return False
    return cost == walk.cost and chain_progress(net, walk.nodes, sc.chain) == sc.r


# -- JSON --------------------------------------------------------------------


def network_from_json(data: Mapping[str, Any]) -> Network:
    """Parse the graph JSON schema; missing cost and capacity default to 1."""
    if not isinstance(data, Mapping):
        raise GraphError("graph JSON must be an object")
    try:
        raw_nodes = data["nodes"]
        raw_edges = data.get("edges", [])
    except KeyError as exc:
        raise GraphError(f"graph JSON missing key {exc}") from exc
    nodes = []
    functions = {}
    for item in raw_nodes:
        if isinstance(item, str):
            nodes.append(item)
            continue
        if not isinstance(item, Mapping) or "id" not in item:
            raise GraphError(f"bad node entry {item!r}")
        node_id = str(item["id"])
        nodes.append(node_id)
        functions[node_id] = frozenset(str(f) for f in item.get("functions", ()))
    edges = []
    for item in raw_edges:
        if not isinstance(item, Mapping) or "from" not in item or "to" not in item:
            raise GraphError(f"bad edge entry {item!r}")
        edges.append(
            Edge(
                str(item["from"]),
                str(item["to"]),
                to_fraction(item.get("cost", 1)),
                to_fraction(item.get("capacity", 1)),
            )
        )
    return Network(tuple(nodes), tuple(edges), functions, bool(data.get("directed", True)))


def network_to_json(net: Network) -> dict[str, Any]:
    return {
        "directed": net.directed,
        "nodes": [{"id": v, "functions": sorted(net.hosted(v))} for v in net.nodes],
        "edges": [
            {
                "from": e.tail,
                "to": e.head,
                "cost": fraction_to_json(e.cost),
                "capacity": fraction_to_json(e.capacity),
            }
            for e in net.edges
        ],
    }


def load_network(path: str | Path) -> Network:
    with open(path) as fh:
        return network_from_json(json.load(fh))
