"""Discrete-time simulation of max-weight routing with SFC constraints.

Each slot:

1. every flow draws Poisson arrivals;
2. each arriving packet is source-routed on the SFC-constrained shortest path
   whose link costs are the current virtual queue lengths, and the packet adds
   one unit to the virtual queue of every link on its route;
3. every physical link forwards up to ``capacity`` packets from the head of
   its FIFO queue (a packet crosses at most one link per slot);
4. every virtual queue drains by the link capacity, floored at zero.

Virtual queues are shared by all flows. The expanded graph of each flow is
built and pruned once; only the link costs change between searches.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .expand import ExpandedGraph, build_expanded, prune, shortest_path
from .graph import GraphError, Network, ServiceChain, chain_progress

#: stability verdict: tail mean <= GROWTH_FACTOR * reference mean + GROWTH_SLACK
GROWTH_FACTOR = 3.0
GROWTH_SLACK = 1.0


@dataclass(frozen=True)
class TrafficFlow:
    chain: ServiceChain
    rate: float


@dataclass(frozen=True)
class SimConfig:
    net: Network
    flows: tuple[TrafficFlow, ...]
    horizon: int = 100_000
    warmup: int = 10_000
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "flows", tuple(self.flows))
        if not self.horizon > self.warmup >= 0:
            raise GraphError("need horizon > warmup >= 0")
        if any(f.rate < 0 for f in self.flows):
            raise GraphError("arrival rates must be nonnegative")

    def scaled(self, p: float) -> SimConfig:
        """Same network with every arrival rate multiplied by ``p``."""
        return replace(self, flows=tuple(TrafficFlow(f.chain, f.rate * p) for f in self.flows))


@dataclass(frozen=True)
class SimResult:
    total_queue: np.ndarray  # packets in physical queues after each slot
    average: float  # mean of total_queue over post-warmup slots
    arrived: int
    delivered: int
    sfc_violations: int  # routed packets whose route does not satisfy their chain
    max_link_service: int  # most packets any link sent in one slot
    warmup: int

    @property
    def stable(self) -> bool:
        return stability_verdict(self.total_queue, self.warmup)


def stability_verdict(series: np.ndarray, warmup: int) -> bool:
    """Trend test on a queue series.

    Compares the mean of the final tenth of the run with the mean of the
    first tenth-of-run window after warm-up. Linear growth makes the ratio
    about 6 for the default horizon; a stable queue keeps it near 1.
    """
    horizon = len(series)
    window = max(1, horizon // 10)
    ref = series[warmup : warmup + window]
    tail = series[horizon - window :]
    if len(ref) == 0:
        ref = series[:window]
    return float(tail.mean()) <= GROWTH_FACTOR * float(ref.mean()) + GROWTH_SLACK


class _Router:
    def __init__(self, net: Network, sc: ServiceChain) -> None:
        self.net = net
        self.chain = sc
        self.graph: ExpandedGraph = prune(build_expanded(net, sc))
        self.trivial = self.graph.source == self.graph.destination
        self.arc_index = {(a.tail, a.head): k for k, a in enumerate(net.arcs)}
        self.checked: dict[tuple[int, ...], bool] = {}

    def route(self, costs: list[int]) -> tuple[int, ...] | None:
        if self.trivial:
            return ()
        found = shortest_path(self.graph, costs)
        if found is None:
            return None
        _, vertices = found
        nodes = [vertices[0][0]]
        for v, _ in vertices[1:]:
            if v != nodes[-1]:
                nodes.append(v)
        return tuple(self.arc_index[a] for a in zip(nodes, nodes[1:]))

    def admissible(self, route: tuple[int, ...]) -> bool:
        ok = self.checked.get(route)
        if ok is None:
            arcs = self.net.arcs
            nodes = [self.chain.source] + [arcs[k].head for k in route]
            contiguous = all(arcs[a].head == arcs[b].tail for a, b in zip(route, route[1:]))
            ok = (
                contiguous
                and (not route or arcs[route[0]].tail == self.chain.source)
                and nodes[-1] == self.chain.destination
                and chain_progress(self.net, nodes, self.chain.chain) == self.chain.r
            )
            self.checked[route] = ok
        return ok


def simulate(cfg: SimConfig) -> SimResult:
    net = cfg.net
    arcs = net.arcs
    caps = []
    for a in arcs:
        if a.capacity.denominator != 1:
            raise GraphError("simulated link capacities must be integers")
        caps.append(int(a.capacity))
    routers = [_Router(net, f.chain) for f in cfg.flows]
    for f, r in zip(cfg.flows, routers):
        if f.rate > 0 and not r.trivial and shortest_path(r.graph, [0] * len(arcs)) is None:
            raise GraphError(f"flow {f.chain} has no admissible route")

    rng = np.random.default_rng(cfg.seed)
    rates = np.array([f.rate for f in cfg.flows], dtype=float)
    arrivals = rng.poisson(rates, size=(cfg.horizon, len(rates))) if len(rates) else np.zeros((cfg.horizon, 0), int)

    virtual = [0] * len(arcs)
    queues: list[deque] = [deque() for _ in arcs]
    series = np.zeros(cfg.horizon, dtype=np.int64)
    in_network = 0
    arrived = delivered = violations = 0
    max_service = 0

    for t in range(cfg.horizon):
        counts = arrivals[t].tolist()
        # interleave flows so one flow does not see all of another's same-slot arrivals first
        pending = max(counts) if counts else 0
        for i in range(pending):
            for fi, router in enumerate(routers):
                if i >= counts[fi]:
                    continue
                arrived += 1
                route = router.route(virtual)
                if not router.admissible(route):
                    violations += 1
                if not route:
                    delivered += 1
                    continue
                for k in route:
                    virtual[k] += 1
                queues[route[0]].append((route, 0))
                in_network += 1

        moves = []
        for k, q in enumerate(queues):
            if not q:
                continue
            sent = min(caps[k], len(q))
            max_service = max(max_service, sent)
            for _ in range(sent):
                moves.append(q.popleft())
        for route, pos in moves:
            pos += 1
            if pos == len(route):
                delivered += 1
                in_network -= 1
            else:
                queues[route[pos]].append((route, pos))

        for k, c in enumerate(caps):
            if virtual[k]:
                virtual[k] = max(0, virtual[k] - c)
        series[t] = in_network

    post = series[cfg.warmup :]
    return SimResult(
        series,
        float(post.mean()) if len(post) else 0.0,
        arrived,
        delivered,
        violations,
        max_service,
        cfg.warmup,
    )


def _sweep_point(args: tuple[SimConfig, float]) -> tuple[float, float, bool, int]:
    cfg, p = args
    res = simulate(cfg.scaled(p))
    return p, res.average, res.stable, res.sfc_violations


def sweep(template: SimConfig, p_values: Sequence[float], *, workers: int | None = None) -> list[tuple[float, float, bool, int]]:
    """Rows ``(p, average total queue, stable, sfc violations)`` sorted by ``p``.

    Rates in ``template`` are per unit of ``p``. Points run in separate
    processes unless ``workers == 1``.
    """
    jobs = [(template, float(p)) for p in p_values]
    if workers == 1 or len(jobs) <= 1:
        rows = [_sweep_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    return sorted(rows, key=lambda row: row[0])
