"""Slow, obviously-correct reference implementations used only by the tests."""

from __future__ import annotations

import itertools
from fractions import Fraction

from sfc_toolkit.graph import Network, ServiceChain


def replay_progress(net: Network, nodes, chain) -> int:
    """Chain positions completed by greedily consuming functions along ``nodes``."""
    done = 0
    for v in nodes:
        hosted = net.functions.get(v, frozenset())
        while done < len(chain) and chain[done] in hosted:
            done += 1
    return done


def brute_force_walk_cost(net: Network, sc: ServiceChain) -> Fraction | None:
    """Cheapest admissible walk by depth-first enumeration with length limit ``(r+1)*n``.

    Branches are cut when their cost already reaches the best complete walk or
    when an earlier branch reached the same (node, progress) pair no more
    expensively.
    """
    limit = (sc.r + 1) * len(net.nodes)
    out = {v: [] for v in net.nodes}
    for e in net.edges:
        out[e.tail].append((e.head, e.cost))
        if not net.directed:
            out[e.head].append((e.tail, e.cost))
    best: list[Fraction | None] = [None]
    seen: dict[tuple[str, int], Fraction] = {}

    def advance(done: int, v: str) -> int:
        hosted = net.functions.get(v, frozenset())
        while done < sc.r and sc.chain[done] in hosted:
            done += 1
        return done

    def dfs(v: str, done: int, cost: Fraction, length: int) -> None:
        if best[0] is not None and cost >= best[0]:
            return
        if v == sc.destination and done == sc.r:
            best[0] = cost
            return
        key = (v, done)
        if key in seen and seen[key] <= cost:
            return
        seen[key] = cost
        if length == limit:
            return
        for w, c in out[v]:
            dfs(w, advance(done, w), cost + c, length + 1)

    dfs(sc.source, advance(0, sc.source), Fraction(0), 0)
    return best[0]


def lp_by_vertices(objective, rows, bounds) -> Fraction | None:
    """Maximize over a small bounded polytope by enumerating basic solutions.

    ``rows`` are ``(coeffs, rhs)`` meaning ``coeffs . x <= rhs``; ``bounds``
    are finite ``(lo, hi)`` per variable. Returns ``None`` when infeasible.
    """
    n = len(objective)
    planes = [(list(map(Fraction, c)), Fraction(b)) for c, b in rows]
    for j, (lo, hi) in enumerate(bounds):
        unit = [Fraction(int(k == j)) for k in range(n)]
        planes.append((unit, Fraction(hi)))
        planes.append(([-u for u in unit], Fraction(-lo)))
    best = None
    for combo in itertools.combinations(range(len(planes)), n):
        x = _solve_square([planes[i][0] for i in combo], [planes[i][1] for i in combo])
        if x is None:
            continue
        if all(sum(a * xi for a, xi in zip(c, x)) <= b for c, b in planes):
            value = sum(Fraction(o) * xi for o, xi in zip(objective, x))
            if best is None or value > best:
                best = value
    return best


def _solve_square(a, b):
    n = len(a)
    m = [row[:] + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col] / m[col][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


def all_cut_capacity(net: Network, s: str, d: str) -> Fraction:
    """Minimum s-d cut by enumerating every vertex bipartition."""
    others = [v for v in net.nodes if v not in (s, d)]
    best = None
    for k in range(len(others) + 1):
        for side in itertools.combinations(others, k):
            src = {s, *side}
            cap = Fraction(0)
            for e in net.edges:
                if e.tail in src and e.head not in src:
                    cap += e.capacity
                elif not net.directed and e.head in src and e.tail not in src:
                    cap += e.capacity
            if best is None or cap < best:
                best = cap
    return best
