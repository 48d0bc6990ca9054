"""Chain-aware graph expansion and SFC-constrained shortest paths.

A vertex ``(v, i)`` of the expanded graph means "at node ``v`` with the first
``i`` chain functions done". An original arc ``u -> v`` becomes, for every
level ``i``, one arc ``(u, i) -> (v, j)`` where ``j`` is the largest level such
that ``v`` hosts every function at positions ``i+1 .. j``. Any shortest
source-to-destination path in that graph maps back to a cheapest admissible
walk in the original network.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Mapping, NamedTuple, Sequence

from .graph import GraphError, Network, ServiceChain, Walk, chain_orderings, fraction_to_json

Vertex = tuple[str, int]

#: arc index used for zero-cost layer transitions of the layered baseline
LAYER_STEP = -1


class NegativeCostError(GraphError):
    """Label-setting search requires nonnegative arc costs."""


class XArc(NamedTuple):
    tail: Vertex
    head: Vertex
    cost: Fraction
    arc: int  # index into Network.arcs, or LAYER_STEP


@dataclass(frozen=True)
class ExpandedGraph:
    vertices: tuple[Vertex, ...]
    arcs: tuple[XArc, ...]
    source: Vertex
    destination: Vertex
    source_level: int
    r: int
    node_order: tuple[str, ...]

    def back_map(self, vertex: Vertex) -> str:
        return vertex[0]

    @cached_property
    def _search(self) -> _SearchGraph:
        return _SearchGraph(self)


class _SearchGraph:
    """Integer-indexed adjacency of an expanded graph for repeated searches."""

    def __init__(self, eg: ExpandedGraph) -> None:
        rank = {v: i for i, v in enumerate(eg.node_order)}
        ordered = sorted(eg.vertices, key=lambda x: (rank[x[0]], x[1]))
        self.vertices = ordered
        self.ids = {x: i for i, x in enumerate(ordered)}
        self.adj: list[list[tuple[int, int, Fraction]]] = [[] for _ in ordered]
        for a in eg.arcs:
            self.adj[self.ids[a.tail]].append((self.ids[a.head], a.arc, a.cost))
        self.source = self.ids.get(eg.source)
        self.destination = self.ids.get(eg.destination)


def _top_level(hosted: frozenset[str], chain: Sequence[str], i: int) -> int:
    j = i
    r = len(chain)
    while j < r and chain[j] in hosted:
        j += 1
    return j


def _fixed_chain(sc: ServiceChain) -> None:
    if sc.flexible_groups and any(len(g) > 1 for g in sc.flexible_groups):
        raise GraphError("expansion needs a fixed-order chain; use chain_orderings first")


def build_expanded(net: Network, sc: ServiceChain) -> ExpandedGraph:
    """Initial expanded graph: ``(r+1)|V|`` vertices and one arc per original arc and level."""
    _fixed_chain(sc)
    for end in (sc.source, sc.destination):
        if end not in net.index:
            raise GraphError(f"unknown node {end!r}")
    chain = sc.chain
    r = len(chain)
    vertices = tuple((v, i) for v in net.nodes for i in range(r + 1))
    arcs = []
    for k, a in enumerate(net.arcs):
        hosted = net.hosted(a.head)
        for i in range(r + 1):
            arcs.append(XArc((a.tail, i), (a.head, _top_level(hosted, chain, i)), a.cost, k))
    t = _top_level(net.hosted(sc.source), chain, 0)
    return ExpandedGraph(
        vertices, tuple(arcs), (sc.source, t), (sc.destination, r), t, r, net.nodes
    )


def prune(eg: ExpandedGraph) -> ExpandedGraph:
    """Repeatedly drop vertices lacking incoming or outgoing arcs (source and destination exempt)."""
    keep = set(eg.vertices)
    indeg = dict.fromkeys(keep, 0)
    outdeg = dict.fromkeys(keep, 0)
    ins: dict[Vertex, list[int]] = {x: [] for x in keep}
    outs: dict[Vertex, list[int]] = {x: [] for x in keep}
    for k, a in enumerate(eg.arcs):
        outdeg[a.tail] += 1
        indeg[a.head] += 1
        outs[a.tail].append(k)
        ins[a.head].append(k)
    exempt = {eg.source, eg.destination}
    alive_arc = [True] * len(eg.arcs)
    work = deque(x for x in eg.vertices if x not in exempt and (indeg[x] == 0 or outdeg[x] == 0))
    while work:
        x = work.popleft()
        if x not in keep:
            continue
        keep.discard(x)
        for k in outs[x] + ins[x]:
            if not alive_arc[k]:
                continue
            alive_arc[k] = False
            a = eg.arcs[k]
            outdeg[a.tail] -= 1
            indeg[a.head] -= 1
            for y in (a.tail, a.head):
                if y in keep and y not in exempt and (indeg[y] == 0 or outdeg[y] == 0):
                    work.append(y)
    return ExpandedGraph(
        tuple(x for x in eg.vertices if x in keep),
        tuple(a for k, a in enumerate(eg.arcs) if alive_arc[k]),
        eg.source,
        eg.destination,
        eg.source_level,
        eg.r,
        eg.node_order,
    )


def shortest_path(
    eg: ExpandedGraph, arc_costs: Sequence[Any] | Mapping[int, Any] | None = None
) -> tuple[Any, list[Vertex]] | None:
    """Dijkstra from ``eg.source`` to ``eg.destination``.

    ``arc_costs`` optionally overrides costs per original arc index, which lets
    one expanded graph be reused while network costs change. Ties between
    equal-cost paths go to fewer hops, then to the lexicographically smallest
    vertex sequence (node order of the network, then level).
    """
    g = eg._search
    src, dst = g.source, g.destination
    if src is None or dst is None:
        return None
    zero = 0
    best: dict[int, tuple] = {src: (zero, 0, (src,))}
    heap = [(zero, 0, (src,))]
    done = set()
    while heap:
        cost, hops, path = heapq.heappop(heap)
        u = path[-1]
        if u in done:
            continue
        done.add(u)
        if u == dst:
            return cost, [g.vertices[i] for i in path]
        for v, arc, c in g.adj[u]:
            if v in done:
                continue
            if arc_costs is not None and arc != LAYER_STEP:
                c = arc_costs[arc]
            if c < 0:
                raise NegativeCostError(f"negative arc cost {c}")
            label = (cost + c, hops + 1, path + (v,))
            old = best.get(v)
            if old is None or label < old:
                best[v] = label
                heapq.heappush(heap, label)
    return None


def _to_walk(vertices: list[Vertex], cost: Fraction) -> Walk:
    nodes = [vertices[0][0]]
    for v, _ in vertices[1:]:
        if v != nodes[-1]:
            nodes.append(v)
    return Walk(tuple(nodes), cost)


def _check_costs(net: Network) -> None:
    for e in net.edges:
        if e.cost < 0:
            raise NegativeCostError(f"edge {e.tail!r}->{e.head!r} has negative cost {e.cost}")


def sfc_shortest_path(net: Network, sc: ServiceChain) -> Walk | None:
    """Cheapest admissible walk for a fixed-order chain, or ``None`` when infeasible."""
    _check_costs(net)
    eg = prune(build_expanded(net, sc))
    if eg.source == eg.destination:
        return Walk((sc.source,), Fraction(0))
    found = shortest_path(eg)
    if found is None:
        return None
    cost, vertices = found
    return _to_walk(vertices, cost)


def sfc_set_shortest_path(net: Network, sc: ServiceChain) -> Walk | None:
    """Cheapest walk over every ordering the chain's flexible groups admit.

    Equal costs resolve to the earliest ordering from :func:`chain_orderings`.
    """
    best: Walk | None = None
    for ordering in chain_orderings(sc):
        walk = sfc_shortest_path(net, ordering)
        if walk is not None and (best is None or walk.cost < best.cost):
            best = walk
    return best


def build_layered(net: Network, sc: ServiceChain) -> ExpandedGraph:
    """Baseline: ``r+1`` full copies of the network joined at function-hosting nodes."""
    _fixed_chain(sc)
    r = sc.r
    vertices = tuple((v, i) for v in net.nodes for i in range(r + 1))
    arcs = [
        XArc((a.tail, i), (a.head, i), a.cost, k)
        for i in range(r + 1)
        for k, a in enumerate(net.arcs)
    ]
    for i, f in enumerate(sc.chain):
        for v in net.nodes:
            if f in net.hosted(v):
                arcs.append(XArc((v, i), (v, i + 1), Fraction(0), LAYER_STEP))
    return ExpandedGraph(
        vertices, tuple(arcs), (sc.source, 0), (sc.destination, r), 0, r, net.nodes
    )


def layered_shortest_path(net: Network, sc: ServiceChain) -> Walk | None:
    _check_costs(net)
    eg = build_layered(net, sc)
    found = shortest_path(eg)
    if found is None:
        return None
    cost, vertices = found
    return _to_walk(vertices, cost)


def graph_size(eg: ExpandedGraph) -> tuple[int, int, int]:
    """``(vertex count, arc count, vertex count + arc count)``."""
    nv, na = len(eg.vertices), len(eg.arcs)
    return nv, na, nv + na


def vertex_label(x: Vertex) -> str:
    return f"{x[0]}@{x[1]}"


def expanded_to_json(eg: ExpandedGraph) -> dict[str, Any]:
    return {
        "source": vertex_label(eg.source),
        "destination": vertex_label(eg.destination),
        "source_level": eg.source_level,
        "vertices": [vertex_label(x) for x in eg.vertices],
        "arcs": [
            {"from": vertex_label(a.tail), "to": vertex_label(a.head), "cost": fraction_to_json(a.cost)}
            for a in eg.arcs
        ],
    }
