"""Benchmark harnesses: expanded-graph size and placement size on random graphs.

Every trial draws its own seed from ``(seed, n, z, trial)`` so rows do not
depend on which trials ran before them or in which process.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .expand import build_expanded, build_layered, graph_size, prune
from .graph import ServiceChain, random_network
from .placement import PlacementInstance, placement_greedy, placement_min, random_placement_network

#: default expected out-degree of the size-benchmark generator
SIZE_AVG_DEGREE = 4.0
#: largest node count solved exactly by ``bench_place``
EXACT_LIMIT = 12


def trial_seed(seed: int, *parts: object) -> int:
    return random.Random("/".join(map(str, (seed, *parts)))).getrandbits(63)


@dataclass(frozen=True)
class SizeRow:
    n: int
    z: float
    our_size: float
    layered_size: float

    @property
    def ratio(self) -> float:
        return self.our_size / self.layered_size


@dataclass(frozen=True)
class PlaceRow:
    n: int
    avg_size: float
    method: str


def size_trial(n: int, z: float, r: int, seed: int, avg_degree: float = SIZE_AVG_DEGREE) -> tuple[int, int]:
    """``(pruned expanded size, layered size)`` for one random network, chain ``v0 -> v{n-1}``."""
    catalog = tuple(f"phi{i + 1}" for i in range(r))
    net = random_network(n, z, avg_degree, (1, 10), seed, catalog=catalog)
    sc = ServiceChain(net.nodes[0], net.nodes[-1], catalog)
    ours = graph_size(prune(build_expanded(net, sc)))[2]
    layered = graph_size(build_layered(net, sc))[2]
    return ours, layered


def _size_job(job):
    n, z, r, trial, seed, avg_degree = job
    return (n, trial, *size_trial(n, z, r, trial_seed(seed, n, z, trial), avg_degree))


def _place_job(job):
    n, trial, seed = job
    net = random_placement_network(n, trial_seed(seed, n, trial))
    inst = PlacementInstance(net, net.nodes[0], net.nodes[-1])
    if n <= EXACT_LIMIT:
        return n, trial, placement_min(inst).size, "exact"
    return n, trial, placement_greedy(inst).size, "greedy"


def _run(fn, jobs, workers):
    if workers == 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // 32)))


def bench_size(
    nodes: Sequence[int],
    z: float,
    r: int,
    trials: int,
    seed: int,
    *,
    avg_degree: float = SIZE_AVG_DEGREE,
    workers: int | None = 1,
) -> list[SizeRow]:
    """Average pruned-expanded and layered graph sizes per node count."""
    jobs = [(n, z, r, t, seed, avg_degree) for n in nodes for t in range(trials)]
    results = _run(_size_job, jobs, workers)
    rows = []
    for n in sorted(set(nodes)):
        mine = [(o, l) for m, _, o, l in results if m == n]
        rows.append(SizeRow(n, z, sum(o for o, _ in mine) / len(mine), sum(l for _, l in mine) / len(mine)))
    return rows


def bench_place(nodes: Sequence[int], trials: int, seed: int, *, workers: int | None = 1) -> list[PlaceRow]:
    """Average placement size per node count; exact up to ``EXACT_LIMIT`` nodes, greedy beyond."""
    jobs = [(n, t, seed) for n in nodes for t in range(trials)]
    results = _run(_place_job, jobs, workers)
    rows = []
    for n in sorted(set(nodes)):
        mine = [(size, method) for m, _, size, method in results if m == n]
        rows.append(PlaceRow(n, sum(s for s, _ in mine) / len(mine), mine[0][1]))
    return rows
