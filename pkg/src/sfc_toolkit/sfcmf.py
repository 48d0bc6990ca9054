"""SFC-constrained maximum flow as a per-segment multicommodity LP.

With every chain function hosted at exactly one node the chain splits into
segments ``s -> host(phi_1) -> ... -> host(phi_r) -> d``; each segment is one
commodity. The program maximizes ``lam`` such that every commodity ships at
least ``lam`` while all commodities together respect each edge's capacity.
Commodities use node-arc flow variables rather than path variables, which
gives the same optimum with polynomially many variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lp as lpmod
from .graph import GraphError, Network, ServiceChain
from .maxflow import FlowAssignment


class AmbiguousHostingError(GraphError):
    """A chain function is hosted at zero or several nodes."""


@dataclass(frozen=True)
class SegmentCommodity:
    index: int  # 1-based segment number
    source: str
    target: str


@dataclass(frozen=True)
class SfcMaxFlowResult:
    lam: Fraction
    commodities: tuple[SegmentCommodity, ...]
    per_commodity: tuple[FlowAssignment, ...]


def segment_commodities(net: Network, sc: ServiceChain) -> tuple[SegmentCommodity, ...]:
    hops = [sc.source]
    for f in sc.chain:
        hosts = net.hosts_of(f)
        if len(hosts) != 1:
            raise AmbiguousHostingError(f"function {f!r} hosted at {len(hosts)} nodes, need exactly 1")
        hops.append(hosts[0])
    hops.append(sc.destination)
    return tuple(SegmentCommodity(i + 1, a, b) for i, (a, b) in enumerate(zip(hops, hops[1:])))


def _cancel_opposite(flows: dict[tuple[str, str], Fraction]) -> dict[tuple[str, str], Fraction]:
    out = dict(flows)
    for (u, v) in list(out):
        if (u, v) in out and (v, u) in out:
            m = min(out[(u, v)], out[(v, u)])
            for a in ((u, v), (v, u)):
                out[a] -= m
                if not out[a]:
                    del out[a]
    return out


def sfc_max_flow(net: Network, sc: ServiceChain) -> SfcMaxFlowResult:
    """Largest ``lam`` every segment can carry at once.

    Segments whose two ends coincide need no capacity and place no limit on
    ``lam``. Directed networks are accepted too (each arc then has its own
    capacity). Opposite flows of one commodity on one edge are cancelled in
    the report; ``lam`` is unaffected.
    """
    commodities = segment_commodities(net, sc)
    active = [c for c in commodities if c.source != c.target]
    if not active:
        raise GraphError("every segment starts where it ends; the flow is unbounded")

    arcs = net.arcs
    prog = lpmod.LinearProgram(0)
    lam = prog.add_var()
    var: dict[tuple[int, int], int] = {}
    for ci, _ in enumerate(active):
        for k in range(len(arcs)):
            var[(ci, k)] = prog.add_var()
    prog.set_objective({lam: 1})

    for ci, c in enumerate(active):
        for v in net.nodes:
            if v == c.target:
                continue
            row: dict[int, int] = {}
            for k, a in enumerate(arcs):
                if a.tail == v:
                    row[var[(ci, k)]] = row.get(var[(ci, k)], 0) + 1
                if a.head == v:
                    row[var[(ci, k)]] = row.get(var[(ci, k)], 0) - 1
            if v == c.source:
                row[lam] = -1
                prog.add_constraint(row, ">=", 0)
            else:
                prog.add_constraint(row, "==", 0)

    if net.directed:
        groups = [[k] for k in range(len(arcs))]
    else:
        groups = [[2 * e, 2 * e + 1] for e in range(len(net.edges))]
    for ks in groups:
        row = {var[(ci, k)]: 1 for ci in range(len(active)) for k in ks}
        prog.add_constraint(row, "<=", net.edges[arcs[ks[0]].edge].capacity)

    result = lpmod.solve(prog)
    if not result.is_optimal:
        raise RuntimeError(f"SFC max-flow LP returned {result.status}")
    x = result.x
    value = x[lam]

    per = []
    ci_of = {id(c): ci for ci, c in enumerate(active)}
    for c in commodities:
        if c.source == c.target:
            per.append(FlowAssignment(value, {}))
            continue
        ci = ci_of[id(c)]
        flows: dict[tuple[str, str], Fraction] = {}
        for k, a in enumerate(arcs):
            f = x[var[(ci, k)]]
            if f:
                key = (a.tail, a.head)
                flows[key] = flows.get(key, Fraction(0)) + f
        flows = _cancel_opposite(flows)
        shipped = sum((f for (u, _), f in flows.items() if u == c.source), Fraction(0)) - sum(
            (f for (_, w), f in flows.items() if w == c.source), Fraction(0)
        )
        per.append(FlowAssignment(shipped, flows))
    return SfcMaxFlowResult(value, commodities, tuple(per))
