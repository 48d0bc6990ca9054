"""Minimum-cardinality VNF placement that keeps the unconstrained max flow.

Flow is split into an unprocessed layer ``f0`` and a processed layer ``f1``
sharing each arc's capacity. The source emits ``target_flow`` unprocessed, the
destination absorbs it processed, and only a virtualized node may convert:
it forwards everything it receives as processed flow. For a fixed node set the
model is an LP; the search over node sets is branch-and-bound on binary node
indicators with LP-relaxation bounds.

Arcs entering the source or leaving the destination carry nothing, the
source emits no processed flow and the destination absorbs no unprocessed
flow.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import lp as lpmod
from .graph import Edge, GraphError, Network
from .maxflow import max_flow

ArcKey = tuple[str, str]


class UnachievableError(RuntimeError):
    """Even virtualizing every candidate node cannot carry the target flow."""


@dataclass(frozen=True)
class PlacementInstance:
    net: Network
    source: str
    destination: str
    target_flow: Fraction | None = None

    def __post_init__(self) -> None:
        if not self.net.directed:
            raise GraphError("placement works on directed networks")
        if self.source == self.destination:
            raise GraphError("source and destination must differ")
        for v in (self.source, self.destination):
            if v not in self.net.index:
                raise GraphError(f"unknown node {v!r}")
        mf = max_flow(self.net, self.source, self.destination).value
        if self.target_flow is None:
            object.__setattr__(self, "target_flow", mf)
        else:
            target = Fraction(self.target_flow)
            if target < 0 or target > mf:
                raise GraphError(f"target flow {target} outside [0, {mf}]")
            object.__setattr__(self, "target_flow", target)

    @property
    def candidates(self) -> tuple[str, ...]:
        return tuple(v for v in self.net.nodes if v not in (self.source, self.destination))


@dataclass(frozen=True)
class TwoLayerFlow:
    f0: Mapping[ArcKey, Fraction] = field(default_factory=dict)
    f1: Mapping[ArcKey, Fraction] = field(default_factory=dict)


@dataclass(frozen=True)
class PlacementResult:
    nodes: tuple[str, ...]
    witness: TwoLayerFlow
    optimal: bool

    @property
    def size(self) -> int:
        return len(self.nodes)


class _Model:
    """Variable layout of the two-layer program for one instance."""

    def __init__(
        self,
        inst: PlacementInstance,
        fixed: Mapping[str, int],
        *,
        exact: bool = False,
        maximize_flow: bool = False,
    ):
        net = inst.net
        s, d = inst.source, inst.destination
        self.inst = inst
        self.prog = prog = lpmod.LinearProgram(0)
        self.f0: dict[int, int] = {}
        self.f1: dict[int, int] = {}
        self.k: dict[str, int] = {}
        self.g: dict[str, int] = {}
        arcs = net.arcs
        for j, a in enumerate(arcs):
            if a.head == s or a.tail == d:
                continue
            if a.head != d:
                self.f0[j] = prog.add_var()
            if a.tail != s:
                self.f1[j] = prog.add_var()
        if maximize_flow:
            self.flow_var = prog.add_var()
            target: object = None
        else:
            self.flow_var = None
            target = inst.target_flow

        for j, a in enumerate(arcs):
            row = {self.f0[j]: 1} if j in self.f0 else {}
            if j in self.f1:
                row[self.f1[j]] = 1
            if row:
                prog.add_constraint(row, "<=", a.capacity)

        def incident(node: str, layer: dict[int, int], outgoing: bool) -> dict[int, int]:
            return {
                v: 1
                for j, v in layer.items()
                if (arcs[j].tail if outgoing else arcs[j].head) == node
            }

        def equal(lhs: dict[int, int], rhs: dict[int, int], value=None) -> None:
            row = dict(lhs)
            for v, c in rhs.items():
                row[v] = row.get(v, 0) - c
            if value is None:
                prog.add_constraint(row, "==", 0)
            else:
                prog.add_constraint(row, "==", value)

        src_out = incident(s, self.f0, True)
        dst_in = incident(d, self.f1, False)
        if self.flow_var is None:
            equal(src_out, {}, target)
            equal(dst_in, {}, target)
        else:
            equal(src_out, {self.flow_var: 1})
            equal(dst_in, {self.flow_var: 1})
            prog.set_objective({self.flow_var: 1})

        in_cap = {v: Fraction(0) for v in net.nodes}
        for a in arcs:
            in_cap[a.head] += a.capacity
        for v in inst.candidates:
            in0, out0 = incident(v, self.f0, False), incident(v, self.f0, True)
            in1, out1 = incident(v, self.f1, False), incident(v, self.f1, True)
            state = fixed.get(v)
            if state == 0:
                equal(out0, in0)
                equal(out1, in1)
            elif state == 1 and exact:
                # everything arriving leaves processed; joint conservation holds
                both_in = {**in0}
                for var, c in in1.items():
                    both_in[var] = both_in.get(var, 0) + c
                equal(out1, both_in)
                equal(out0, {})
            else:
                # relaxed conversion: g <= big * k with k in [0, 1]
                big = min(in_cap[v], inst.target_flow) if target is not None else in_cap[v]
                g = prog.add_var()
                kv = prog.add_var(0, 1) if state is None else prog.add_var(state, state)
                self.g[v], self.k[v] = g, kv
                prog.add_constraint({g: 1, kv: -big}, "<=", 0)
                equal(out0, {**in0, g: -1})
                equal(out1, {**in1, g: 1})
        if not maximize_flow:
            prog.set_objective({kv: -1 for kv in self.k.values()})

    def witness(self, x: Sequence[Fraction]) -> TwoLayerFlow:
        arcs = self.inst.net.arcs
        f0 = {(arcs[j].tail, arcs[j].head): x[v] for j, v in self.f0.items() if x[v]}
        f1 = {(arcs[j].tail, arcs[j].head): x[v] for j, v in self.f1.items() if x[v]}
        return TwoLayerFlow(f0, f1)


def _exact_fixing(inst: PlacementInstance, nodes: Iterable[str]) -> dict[str, int]:
    chosen = set(nodes)
    unknown = chosen - set(inst.candidates)
    if unknown:
        raise GraphError(f"not candidate nodes: {sorted(unknown)}")
    return {v: int(v in chosen) for v in inst.candidates}


def placement_feasible(inst: PlacementInstance, nodes: Iterable[str]) -> TwoLayerFlow | None:
    """Two-layer flow carrying ``target_flow`` with exactly ``nodes`` virtualized, or ``None``."""
    model = _Model(inst, _exact_fixing(inst, nodes), exact=True)
    result = lpmod.feasible(model.prog)
    if not result.is_optimal:
        return None
    return model.witness(result.x)


def achievable_flow(inst: PlacementInstance, nodes: Iterable[str]) -> Fraction:
    """Largest processed flow deliverable with ``nodes`` virtualized."""
    model = _Model(inst, _exact_fixing(inst, nodes), exact=True, maximize_flow=True)
    result = lpmod.solve(model.prog)
    return result.value


def _ordered(inst: PlacementInstance, nodes: Iterable[str]) -> tuple[str, ...]:
    chosen = set(nodes)
    return tuple(v for v in inst.candidates if v in chosen)


def _all_candidates(inst: PlacementInstance) -> PlacementResult:
    everything = inst.candidates
    witness = placement_feasible(inst, everything)
    if witness is None:
        raise UnachievableError(
            f"flow {inst.target_flow} cannot be processed even with every node virtualized"
        )
    return PlacementResult(everything, witness, False)


def placement_min(inst: PlacementInstance) -> PlacementResult:
    """Optimal placement by depth-first branch-and-bound.

    Each subproblem fixes some node indicators and relaxes the rest to
    ``[0, 1]``; its LP optimum (rounded up) bounds every completion. The first
    fractional indicator in network node order is branched on, ``1`` before
    ``0``, so the returned set is deterministic.
    """
    if inst.target_flow == 0:
        return PlacementResult((), TwoLayerFlow(), True)
    incumbent = _all_candidates(inst)
    stack: list[dict[str, int]] = [{}]
    while stack:
        fixed = stack.pop()
        model = _Model(inst, fixed)
        result = lpmod.solve(model.prog)
        if not result.is_optimal:
            continue
        bound = math.ceil(-result.value)
        if bound >= incumbent.size:
            continue
        x = result.x
        branch = next(
            (v for v in inst.candidates if v not in fixed and x[model.k[v]] not in (0, 1)),
            None,
        )
        if branch is None:
            chosen = [v for v in inst.candidates if v in model.k and x[model.k[v]] == 1]
            witness = placement_feasible(inst, chosen)
            if witness is not None:
                incumbent = PlacementResult(_ordered(inst, chosen), witness, True)
                continue
            branch = next((v for v in inst.candidates if v not in fixed), None)
            if branch is None:
                continue
        stack.append({**fixed, branch: 0})
        stack.append({**fixed, branch: 1})
    return PlacementResult(incumbent.nodes, incumbent.witness, True)


def placement_brute_force(inst: PlacementInstance) -> PlacementResult:
    """Smallest feasible node set by iterative deepening over subset sizes."""
    cands = inst.candidates
    for size in range(len(cands) + 1):
        for combo in itertools.combinations(cands, size):
            witness = placement_feasible(inst, combo)
            if witness is not None:
                return PlacementResult(combo, witness, True)
    raise UnachievableError("no subset of candidate nodes carries the target flow")


def _through_bound(inst: PlacementInstance, nodes: Iterable[str]) -> Fraction:
    """Max-flow upper bound on the flow that can be routed via ``nodes``.

    Processed flow must reach some virtualized node from ``s`` and leave some
    virtualized node towards ``d``, so it is at most both max flows to and
    from a super node joined to ``nodes``.
    """
    hub = "__hub__"
    net = inst.net
    big = inst.target_flow
    inbound = net.with_edges(net.edges + tuple(Edge(v, hub, 0, big) for v in nodes), net.nodes + (hub,))
    outbound = net.with_edges(net.edges + tuple(Edge(hub, v, 0, big) for v in nodes), net.nodes + (hub,))
    return min(max_flow(inbound, inst.source, hub).value, max_flow(outbound, hub, inst.destination).value)


def placement_greedy(inst: PlacementInstance) -> PlacementResult:
    """Add the node that raises the achievable processed flow most until the target is met.

    Ties go to the earliest node in network order. Candidates whose max-flow
    bound cannot beat the best value seen so far are skipped without solving
    their LP; this changes the running time, not the choice. The result is
    an upper bound on the optimum, flagged ``optimal=False``.
    """
    if inst.target_flow == 0:
        return PlacementResult((), TwoLayerFlow(), False)
    order = {v: i for i, v in enumerate(inst.net.nodes)}
    chosen: list[str] = []
    remaining = list(inst.candidates)
    while remaining:
        bounds = {v: _through_bound(inst, chosen + [v]) for v in remaining}
        queue = sorted(remaining, key=lambda v: (-bounds[v], order[v]))
        best_node, best_value = None, None
        for v in queue:
            if best_value is not None and (
                bounds[v] < best_value or (bounds[v] == best_value and order[v] > order[best_node])
            ):
                continue
            value = achievable_flow(inst, chosen + [v])
            if best_value is None or value > best_value or (value == best_value and order[v] < order[best_node]):
                best_node, best_value = v, value
        chosen.append(best_node)
        remaining.remove(best_node)
        if best_value >= inst.target_flow:
            witness = placement_feasible(inst, chosen)
            return PlacementResult(_ordered(inst, chosen), witness, False)
    return _all_candidates(inst)


# -- hardness reduction --------------------------------------------------------


SOURCE, SINK = "s", "d"


def setcover_to_placement(
    universe: Sequence[str], subsets: Sequence[Iterable[str]]
) -> tuple[PlacementInstance, dict[str, tuple[str, ...]]]:
    """Placement instance whose optimum equals the minimum set cover.

    Subset ``i`` becomes node ``u{i}``. Each element adds one unit of capacity
    along ``s -> u_a -> u_b -> ... -> d`` through the subsets containing it,
    in subset order. Returns the instance and each element's node path.
    """
    sets = [frozenset(x) for x in subsets]
    nodes = [SOURCE] + [f"u{i}" for i in range(len(sets))] + [SINK]
    caps: dict[tuple[str, str], int] = {}
    paths: dict[str, tuple[str, ...]] = {}
    for m in universe:
        hosts = [f"u{i}" for i, sset in enumerate(sets) if m in sset]
        if not hosts:
            raise GraphError(f"element {m!r} is in no subset")
        path = (SOURCE, *hosts, SINK)
        paths[m] = path
        for arc in zip(path, path[1:]):
            caps[arc] = caps.get(arc, 0) + 1
    edges = tuple(Edge(u, v, 1, c) for (u, v), c in caps.items())
    net = Network(tuple(nodes), edges, {}, True)
    return PlacementInstance(net, SOURCE, SINK), paths


def min_set_cover(universe: Sequence[str], subsets: Sequence[Iterable[str]]) -> int:
    """Brute-force minimum number of subsets covering the universe."""
    target = set(universe)
    sets = [frozenset(x) for x in subsets]
    for size in range(len(sets) + 1):
        for combo in itertools.combinations(sets, size):
            if target <= set().union(*combo):
                return size
    raise GraphError("subsets do not cover the universe")


def random_placement_network(n: int, seed: int, *, cap_range: tuple[int, int] = (2, 10)) -> Network:
    """Directed random graph with average out-degree ``n/3`` and no direct ``v0 -> v{n-1}`` edge.

    Flow on a direct source-destination edge can never be processed, so that
    edge is dropped to keep the unconstrained max flow reachable.
    """
    from .graph import random_network

    net = random_network(n, 0.0, n / 3, cap_range, seed, catalog=(), directed=True)
    s, d = net.nodes[0], net.nodes[-1]
    return net.with_edges(e for e in net.edges if (e.tail, e.head) != (s, d))


def random_set_cover(rng: random.Random, max_elements: int = 6, max_subsets: int = 5):
    n = rng.randint(1, max_elements)
    universe = [f"m{i}" for i in range(n)]
    count = rng.randint(1, max_subsets)
    subsets = [set() for _ in range(count)]
    for m in universe:
        subsets[rng.randrange(count)].add(m)
        for sset in subsets:
            if rng.random() < 0.35:
                sset.add(m)
    return universe, [sorted(sset) for sset in subsets]
