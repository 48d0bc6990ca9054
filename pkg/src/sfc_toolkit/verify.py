"""Independent exact re-checkers for every flow object the toolkit emits.

These functions only read the network and the reported flows; they share no
code with the solvers. Each returns a list of violations, empty when valid.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping

from .graph import Network

ArcFlows = Mapping[tuple[str, str], Fraction]


def _balance(flows: ArcFlows) -> dict[str, Fraction]:
    """Net outflow per node."""
    net_out: dict[str, Fraction] = defaultdict(Fraction)
    for (u, v), f in flows.items():
        net_out[u] += f
        net_out[v] -= f
    return net_out


def _arc_problems(net: Network, flows: ArcFlows) -> list[str]:
    problems = []
    for (u, v), f in flows.items():
        if not isinstance(f, (Fraction, int)):
            problems.append(f"flow on {u}->{v} is not exact: {f!r}")
        if f < 0:
            problems.append(f"negative flow {f} on {u}->{v}")
        ok = any(e.tail == u and e.head == v for e in net.edges) or (
            not net.directed and any(e.tail == v and e.head == u for e in net.edges)
        )
        if not ok:
            problems.append(f"flow on non-existent arc {u}->{v}")
    return problems


def capacity_problems(net: Network, *flow_sets: ArcFlows) -> list[str]:
    """Joint capacity of several flows (summed) on every edge."""
    problems = []
    for e in net.edges:
        used = Fraction(0)
        for flows in flow_sets:
            used += flows.get((e.tail, e.head), 0)
            if not net.directed:
                used += flows.get((e.head, e.tail), 0)
        if used > e.capacity:
            problems.append(f"edge {e.tail}-{e.head}: load {used} exceeds capacity {e.capacity}")
    return problems


def flow_problems(net: Network, flows: ArcFlows, s: str, d: str, value: Fraction, *, at_least: bool = False) -> list[str]:
    """Conservation away from ``s``/``d`` and ``value`` leaving ``s`` and entering ``d``."""
    problems = _arc_problems(net, flows)
    bal = _balance(flows)
    for v in net.nodes:
        if v not in (s, d) and bal.get(v, 0) != 0:
            problems.append(f"conservation broken at {v}: net outflow {bal[v]}")
    out_s = bal.get(s, Fraction(0))
    in_d = -bal.get(d, Fraction(0))
    if at_least:
        if out_s < value:
            problems.append(f"source ships {out_s} < {value}")
    elif out_s != value:
        problems.append(f"source ships {out_s}, expected {value}")
    if in_d != out_s:
        problems.append(f"destination receives {in_d}, source ships {out_s}")
    return problems


def check_flow(net: Network, fa, s: str, d: str) -> list[str]:
    """Single-commodity :class:`FlowAssignment` with its own capacities."""
    return flow_problems(net, fa.arc_flows, s, d, fa.value) + capacity_problems(net, fa.arc_flows)


def check_must_stop(net: Network, result, s: str, t: str, d: str) -> list[str]:
    """Both segments carry the value and share capacity; the combined flow passes ``t``."""
    if result.segments is None or result.realization is None:
        return ["result has no realization"]
    to_t, from_t = result.segments
    problems = flow_problems(net, to_t.arc_flows, s, t, result.value)
    problems += flow_problems(net, from_t.arc_flows, t, d, result.value)
    problems += capacity_problems(net, to_t.arc_flows, from_t.arc_flows)
    problems += flow_problems(net, result.realization.arc_flows, s, d, result.value)
    combined: dict[tuple[str, str], Fraction] = defaultdict(Fraction)
    for part in (to_t.arc_flows, from_t.arc_flows):
        for a, f in part.items():
            combined[a] += f
    if dict(combined) != {a: f for a, f in result.realization.arc_flows.items() if f}:
        problems.append("realization is not the sum of its segments")
    if result.value != min(result.bounds):
        problems.append(f"value {result.value} is not the minimum of {result.bounds}")
    return problems


def check_sfc_max_flow(net: Network, result) -> list[str]:
    """Every segment ships at least ``lam``; all segments together fit the capacities."""
    problems = []
    loads = []
    for c, fa in zip(result.commodities, result.per_commodity):
        if c.source == c.target:
            continue
        problems += flow_problems(net, fa.arc_flows, c.source, c.target, result.lam, at_least=True)
        loads.append(fa.arc_flows)
    problems += capacity_problems(net, *loads)
    return problems


def check_two_layer(net: Network, s: str, d: str, target: Fraction, nodes: Iterable[str], witness) -> list[str]:
    """Two-layer placement flow constraints, evaluated exactly.

    Joint conservation and the processed-flow rule at every node other than
    ``s`` and ``d``; ``target`` unprocessed out of ``s`` and processed into
    ``d``; per-arc capacity on the sum of both layers; nonnegativity; and no
    flow into ``s``, out of ``d``, processed out of ``s`` or unprocessed into
    ``d``.
    """
    chosen = set(nodes)
    problems = _arc_problems(net, witness.f0) + _arc_problems(net, witness.f1)
    if chosen & {s, d}:
        problems.append("source or destination marked as virtualized")
    cap = {(e.tail, e.head): e.capacity for e in net.edges}
    for a in set(witness.f0) | set(witness.f1):
        total = witness.f0.get(a, 0) + witness.f1.get(a, 0)
        if a in cap and total > cap[a]:
            problems.append(f"arc {a}: {total} exceeds capacity {cap[a]}")

    def sums(layer, node, outgoing):
        idx = 0 if outgoing else 1
        return sum((f for a, f in layer.items() if a[idx] == node), Fraction(0))

    for v in net.nodes:
        in0, out0 = sums(witness.f0, v, False), sums(witness.f0, v, True)
        in1, out1 = sums(witness.f1, v, False), sums(witness.f1, v, True)
        if v == s:
            if out0 != target:
                problems.append(f"source emits {out0} unprocessed, expected {target}")
            if in0 or in1 or out1:
                problems.append("source has inflow or processed outflow")
        elif v == d:
            if in1 != target:
                problems.append(f"destination absorbs {in1} processed, expected {target}")
            if in0 or out0 or out1:
                problems.append("destination has unprocessed inflow or any outflow")
        else:
            if in0 + in1 != out0 + out1:
                problems.append(f"joint conservation broken at {v}")
            expected_out1 = in0 + in1 if v in chosen else in1
            if out1 != expected_out1:
                problems.append(f"processed outflow at {v} is {out1}, expected {expected_out1}")
    return problems
