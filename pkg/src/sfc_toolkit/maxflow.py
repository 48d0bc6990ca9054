"""Exact single-commodity maximum flow (shortest augmenting paths).

Capacities are scaled to integers by the least common denominator, the flow is
computed in integers and scaled back, so results are exact rationals. An
undirected edge is one pair of opposite arcs sharing a single capacity with
antisymmetric flow; the reported flow on it has one direction only.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .graph import Edge, GraphError, Network, Walk, walk_cost

ArcKey = tuple[str, str]


@dataclass(frozen=True)
class FlowAssignment:
    """Flow value plus nonzero flow per directed arc ``(tail, head)``."""

    value: Fraction
    arc_flows: Mapping[ArcKey, Fraction] = field(default_factory=dict)

    def flow(self, tail: str, head: str) -> Fraction:
        return self.arc_flows.get((tail, head), Fraction(0))


class _Residual:
    """Paired-arc residual network over integer capacities."""

    def __init__(self, n: int) -> None:
        self.head: list[int] = []
        self.cap: list[int] = []
        self.flow: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]

    def add(self, u: int, v: int, cap_uv: int, cap_vu: int) -> int:
        k = len(self.head)
        self.head += [v, u]
        self.cap += [cap_uv, cap_vu]
        self.flow += [0, 0]
        self.adj[u].append(k)
        self.adj[v].append(k + 1)
        return k

    def residual(self, k: int) -> int:
        return self.cap[k] - self.flow[k]

    def bfs(self, s: int) -> list[int | None]:
        parent: list[int | None] = [None] * len(self.adj)
        parent[s] = -1
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for k in self.adj[u]:
                v = self.head[k]
                if parent[v] is None and self.residual(k) > 0:
                    parent[v] = k
                    queue.append(v)
        return parent

    def run(self, s: int, d: int) -> int:
        total = 0
        while True:
            parent = self.bfs(s)
            if parent[d] is None:
                return total
            push = None
            v = d
            while v != s:
                k = parent[v]
                push = self.residual(k) if push is None else min(push, self.residual(k))
                v = self.head[k ^ 1]
            v = d
            while v != s:
                k = parent[v]
                self.flow[k] += push
                self.flow[k ^ 1] -= push
                v = self.head[k ^ 1]
            total += push


def _scale(net: Network) -> int:
    scale = 1
    for e in net.edges:
        scale = math.lcm(scale, e.capacity.denominator)
    return scale


def _solve(net: Network, s: str, d: str):
    if s == d:
        raise GraphError("source and destination must differ")
    for v in (s, d):
        if v not in net.index:
            raise GraphError(f"unknown node {v!r}")
    for e in net.edges:
        if e.capacity < 0:
            raise GraphError(f"negative capacity on {e.tail!r}->{e.head!r}")
    scale = _scale(net)
    res = _Residual(len(net.nodes))
    idx = net.index
    first_arc = []
    for e in net.edges:
        c = int(e.capacity * scale)
        first_arc.append(res.add(idx[e.tail], idx[e.head], c, 0 if net.directed else c))
    value = res.run(idx[s], idx[d])
    return res, scale, first_arc, value


def max_flow(net: Network, s: str, d: str) -> FlowAssignment:
    """Maximum ``s -> d`` flow; disconnected endpoints give value 0."""
    res, scale, first_arc, value = _solve(net, s, d)
    flows: dict[ArcKey, Fraction] = {}
    for e, k in zip(net.edges, first_arc):
        f = res.flow[k]
        if f > 0:
            flows[(e.tail, e.head)] = Fraction(f, scale)
        elif f < 0:
            flows[(e.head, e.tail)] = Fraction(-f, scale)
    return FlowAssignment(Fraction(value, scale), flows)


def min_cut(net: Network, s: str, d: str) -> set[tuple[str, str]]:
    """Edges leaving the residual-reachable side of a maximum flow.

    Edges are reported as stored in ``net.edges``; their capacities sum to the
    maximum flow value.
    """
    res, _, first_arc, _ = _solve(net, s, d)
    reach = res.bfs(net.index[s])
    side = {v for v in net.nodes if reach[net.index[v]] is not None}
    cut = set()
    for e in net.edges:
        if e.tail in side and e.head not in side:
            cut.add((e.tail, e.head))
        elif not net.directed and e.head in side and e.tail not in side:
            cut.add((e.tail, e.head))
    return cut


def cut_capacity(net: Network, cut: set[tuple[str, str]]) -> Fraction:
    return sum((e.capacity for e in net.edges if (e.tail, e.head) in cut), Fraction(0))


def _find_path(flows: dict[ArcKey, Fraction], s: str, d: str) -> list[str] | None:
    out: dict[str, list[str]] = {}
    for (u, v), f in sorted(flows.items()):
        if f > 0:
            out.setdefault(u, []).append(v)
    prev = {s: None}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        if u == d:
            break
        for v in out.get(u, ()):
            if v not in prev:
                prev[v] = u
                queue.append(v)
    if d not in prev:
        return None
    path = [d]
    while path[-1] != s:
        path.append(prev[path[-1]])
    return path[::-1]


def _find_cycle(flows: dict[ArcKey, Fraction]) -> list[str] | None:
    out: dict[str, list[str]] = {}
    for (u, v), f in sorted(flows.items()):
        if f > 0:
            out.setdefault(u, []).append(v)
    # in a circulation every node with inflow has outflow, so this walk must close
    walk = [min(out)]
    pos = {walk[0]: 0}
    while True:
        nxt = out.get(walk[-1])
        if not nxt:
            return None
        v = nxt[0]
        if v in pos:
            return walk[pos[v]:] + [v]
        pos[v] = len(walk)
        walk.append(v)


def decompose_with_cycles(
    net: Network, fa: FlowAssignment, s: str, d: str
) -> tuple[list[tuple[Walk, Fraction]], list[tuple[Walk, Fraction]]]:
    """Split ``fa`` into ``s -> d`` paths and leftover cycles.

    Re-superposing both lists reproduces ``fa.arc_flows`` exactly.
    """
    flows = {k: Fraction(v) for k, v in fa.arc_flows.items() if v > 0}
    paths: list[tuple[Walk, Fraction]] = []
    while True:
        path = _find_path(flows, s, d) if s != d else None
        if path is None:
            break
        arcs = list(zip(path, path[1:]))
        amount = min(flows[a] for a in arcs)
        for a in arcs:
            flows[a] -= amount
            if not flows[a]:
                del flows[a]
        paths.append((Walk(tuple(path), walk_cost(net, path)), amount))
    cycles: list[tuple[Walk, Fraction]] = []
    while flows:
        cycle = _find_cycle(flows)
        if cycle is None:
            raise GraphError("flow does not decompose: conservation violated")
        arcs = list(zip(cycle, cycle[1:]))
        amount = min(flows[a] for a in arcs)
        for a in arcs:
            flows[a] -= amount
            if not flows[a]:
                del flows[a]
        cycles.append((Walk(tuple(cycle), walk_cost(net, cycle)), amount))
    return paths, cycles


def decompose(net: Network, fa: FlowAssignment, s: str, d: str) -> list[tuple[Walk, Fraction]]:
    """Path decomposition of an ``s -> d`` flow; circulating cycles are dropped."""
    return decompose_with_cycles(net, fa, s, d)[0]


def superpose(parts: list[tuple[Walk, Fraction]]) -> dict[ArcKey, Fraction]:
    total: dict[ArcKey, Fraction] = {}
    for walk, amount in parts:
        for a in zip(walk.nodes, walk.nodes[1:]):
            total[a] = total.get(a, Fraction(0)) + amount
    return total


def with_terminal(net: Network, name: str, links: Mapping[str, Fraction]) -> Network:
    """Copy of ``net`` plus node ``name`` joined to the given nodes with given capacities."""
    if name in net.index:
        raise GraphError(f"node {name!r} already exists")
    extra = [Edge(v, name, 0, c) for v, c in links.items()]
    return net.with_edges(net.edges + tuple(extra), net.nodes + (name,))
