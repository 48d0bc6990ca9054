"""Maximum flow forced through one must-stop node on an undirected network.

The value is ``min(F(t, T) / 2, F(s, t), F(t, d))`` where ``T`` is an extra
terminal joined to ``s`` and ``d`` by non-binding capacity. A realization is
read off a second ``t -> T`` max flow with the terminal links capped at the
value: paths ending at ``s`` are reversed into the ``s -> t`` segment and
paths ending at ``d`` form the ``t -> d`` segment.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graph import GraphError, Network
from .maxflow import FlowAssignment, decompose, max_flow, with_terminal

TERMINAL = "__T__"


class RealizationError(RuntimeError):
    """The realized flow disagrees with the computed value (internal bug)."""


@dataclass(frozen=True)
class MustStopResult:
    value: Fraction
    bounds: tuple[Fraction, Fraction, Fraction]  # (F(t,T)/2, F(s,t), F(t,d))
    realization: FlowAssignment | None = None
    segments: tuple[FlowAssignment, FlowAssignment] | None = None  # (s -> t, t -> d)


def _check(net: Network, s: str, t: str, d: str) -> None:
    if net.directed:
        raise GraphError("must-stop flow is defined on undirected networks")
    if len({s, t, d}) != 3:
        raise GraphError("source, must-stop node and destination must be distinct")
    for v in (s, t, d):
        if v not in net.index:
            raise GraphError(f"unknown node {v!r}")
    if TERMINAL in net.index:
        raise GraphError(f"node name {TERMINAL!r} is reserved")


def must_stop_value(net: Network, s: str, t: str, d: str) -> MustStopResult:
    _check(net, s, t, d)
    unlimited = net.total_capacity() + 1
    aug = with_terminal(net, TERMINAL, {s: unlimited, d: unlimited})
    f_tT = max_flow(aug, t, TERMINAL).value
    f_st = max_flow(net, s, t).value
    f_td = max_flow(net, t, d).value
    bounds = (f_tT / 2, f_st, f_td)
    return MustStopResult(min(bounds), bounds)


def must_stop_realize(net: Network, s: str, t: str, d: str, value: Fraction) -> MustStopResult:
    """Route ``value`` from ``s`` to ``t`` and on to ``d`` simultaneously."""
    _check(net, s, t, d)
    value = Fraction(value)
    aug = with_terminal(net, TERMINAL, {s: value, d: value})
    fa = max_flow(aug, t, TERMINAL)
    if fa.value != 2 * value:
        raise RealizationError(f"terminal flow {fa.value} != 2 * {value}")
    to_t: dict[tuple[str, str], Fraction] = {}
    from_t: dict[tuple[str, str], Fraction] = {}
    sent = {s: Fraction(0), d: Fraction(0)}
    for walk, amount in decompose(aug, fa, t, TERMINAL):
        nodes = walk.nodes[:-1]
        end = nodes[-1]
        sent[end] += amount
        if end == s:
            target, arcs = to_t, zip(nodes[:0:-1], nodes[-2::-1])
        else:
            target, arcs = from_t, zip(nodes, nodes[1:])
        for a in arcs:
            target[a] = target.get(a, Fraction(0)) + amount
    if sent[s] != value or sent[d] != value:
        raise RealizationError(f"segments carry {sent[s]} and {sent[d]}, expected {value}")
    combined: dict[tuple[str, str], Fraction] = dict(to_t)
    for a, f in from_t.items():
        combined[a] = combined.get(a, Fraction(0)) + f
    bounds = must_stop_value(net, s, t, d).bounds
    return MustStopResult(
        value,
        bounds,
        FlowAssignment(value, combined),
        (FlowAssignment(value, to_t), FlowAssignment(value, from_t)),
    )


def must_stop(net: Network, s: str, t: str, d: str) -> MustStopResult:
    """Value, bounds and a realization in one call."""
    result = must_stop_value(net, s, t, d)
    return must_stop_realize(net, s, t, d, result.value)
