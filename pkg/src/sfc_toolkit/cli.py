"""Command-line front end.

Exit status is 0 on success, 1 when the requested object does not exist
(no admissible walk, unachievable placement) and 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import bench
from .expand import build_expanded, expanded_to_json, layered_shortest_path, prune, sfc_set_shortest_path
from .fixtures import NAMES, chain_from_list, fixture_path
from .graph import (
    GraphError,
    Network,
    ServiceChain,
    chain_orderings,
    fraction_to_json,
    network_from_json,
    network_to_json,
    random_network,
    require_valid,
    to_fraction,
)
from .maxflow import max_flow, min_cut
from .muststop import must_stop
from .placement import PlacementInstance, UnachievableError, placement_greedy, placement_min, random_placement_network
from .sfcmf import sfc_max_flow
from .umw import SimConfig, TrafficFlow, simulate, sweep

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT = 0, 1, 2
SEED_ENV = "SFC_TOOLKIT_SEED"


class InputError(Exception):
    pass


# -- input -----------------------------------------------------------------


def read_json(path: str) -> Any:
    """Parse a JSON file; a bare fixture name such as ``fig2.json`` falls back to the bundled copy."""
    p = Path(path)
    if not p.exists() and p.stem in NAMES and p.parent == Path("."):
        p = Path(str(fixture_path(p.stem)))
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _network_of(data: Any) -> Network:
    if isinstance(data, dict) and "network" in data:
        data = data["network"]
    net = network_from_json(data)
    require_valid(net)
    return net


def load_graph(path: str) -> Network:
    return _network_of(read_json(path))


def parse_chain(text: str) -> ServiceChain:
    items = [x.strip() for x in text.split(",") if x.strip()]
    return chain_from_list(items)


def parse_groups(specs: Sequence[str], r: int) -> tuple[tuple[int, ...], ...]:
    """``["1-2", "3"]`` (1-based, inclusive) to 0-based groups; uncovered positions become singletons."""
    groups = []
    covered: set[int] = set()
    for spec in specs:
        lo, _, hi = spec.partition("-")
        try:
            a, b = int(lo), int(hi or lo)
        except ValueError as exc:
            raise InputError(f"bad flexible group {spec!r}; use i-j") from exc
        if not 1 <= a <= b <= r:
            raise InputError(f"flexible group {spec!r} outside positions 1..{r}")
        group = tuple(range(a - 1, b))
        if covered & set(group):
            raise InputError(f"flexible group {spec!r} overlaps another group")
        covered |= set(group)
        groups.append(group)
    groups += [(i,) for i in range(r) if i not in covered]
    return tuple(sorted(groups))


def parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"bad number list {text!r}") from exc


def parse_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"bad integer list {text!r}") from exc


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"{SEED_ENV}={raw!r} is not an integer") from exc


# -- output ----------------------------------------------------------------


def flows_json(arc_flows) -> list[dict[str, Any]]:
    return [
        {"from": u, "to": v, "flow": fraction_to_json(f)}
        for (u, v), f in sorted(arc_flows.items())
        if f
    ]


def emit(payload: Any, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def write_csv(header: Sequence[str], rows: Sequence[Sequence[Any]], out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)


# -- subcommands -------------------------------------------------------------


def cmd_sp(args) -> int:
    net = load_graph(args.graph)
    sc = parse_chain(args.chain)
    if args.flexible:
        sc = ServiceChain.fully_flexible(sc.source, sc.destination, sc.chain)
    elif args.flex_group:
        sc = ServiceChain(sc.source, sc.destination, sc.chain, parse_groups(args.flex_group, sc.r))
    if args.emit_expanded:
        first = chain_orderings(sc)[0]
        Path(args.emit_expanded).write_text(json.dumps(expanded_to_json(prune(build_expanded(net, first))), indent=2) + "\n")
    if args.layered:
        if sc.flexible_groups:
            raise InputError("--layered takes a fixed-order chain")
        walk = layered_shortest_path(net, sc)
    else:
        walk = sfc_set_shortest_path(net, sc)
    if walk is None:
        emit({"status": "infeasible"}, args.out)
        return EXIT_INFEASIBLE
    emit({"status": "ok", "walk": list(walk.nodes), "cost": fraction_to_json(walk.cost)}, args.out)
    return EXIT_OK


def cmd_sfc_maxflow(args) -> int:
    net = load_graph(args.graph)
    res = sfc_max_flow(net, parse_chain(args.chain))
    emit(
        {
            "lambda": fraction_to_json(res.lam),
            "commodities": [
                {"segment": c.index, "source": c.source, "target": c.target, "flows": flows_json(fa.arc_flows)}
                for c, fa in zip(res.commodities, res.per_commodity)
            ],
        },
        args.out,
    )
    return EXIT_OK


def _endpoints(net: Network, args) -> tuple[str, str]:
    s = args.source or net.nodes[0]
    d = args.dest or net.nodes[-1]
    return s, d


def cmd_maxflow(args) -> int:
    net = load_graph(args.graph)
    s, d = _endpoints(net, args)
    fa = max_flow(net, s, d)
    payload = {"value": fraction_to_json(fa.value), "flows": flows_json(fa.arc_flows)}
    if args.min_cut:
        payload["min_cut"] = [list(a) for a in sorted(min_cut(net, s, d))]
    emit(payload, args.out)
    return EXIT_OK


def cmd_must_stop(args) -> int:
    net = load_graph(args.graph)
    res = must_stop(net, args.source, args.stop, args.dest)
    emit(
        {
            "value": fraction_to_json(res.value),
            "bounds": [fraction_to_json(b) for b in res.bounds],
            "flows": flows_json(res.realization.arc_flows),
        },
        args.out,
    )
    return EXIT_OK


def cmd_place(args) -> int:
    net = load_graph(args.graph)
    s, d = _endpoints(net, args)
    target = to_fraction(args.target_flow) if args.target_flow is not None else None
    inst = PlacementInstance(net, s, d, target)
    try:
        res = placement_greedy(inst) if args.greedy else placement_min(inst)
    except UnachievableError as exc:
        emit({"status": "infeasible", "reason": str(exc)}, args.out)
        return EXIT_INFEASIBLE
    emit(
        {
            "nodes": list(res.nodes),
            "size": res.size,
            "optimal": res.optimal,
            "target_flow": fraction_to_json(inst.target_flow),
            "witness": {"f0": flows_json(res.witness.f0), "f1": flows_json(res.witness.f1)},
        },
        args.out,
    )
    return EXIT_OK


def load_sim_config(path: str, args) -> SimConfig:
    data = read_json(path)
    if not isinstance(data, dict) or "flows" not in data:
        raise InputError(f"{path}: simulation config needs 'network' and 'flows'")
    net = _network_of(data)
    flows = []
    for item in data["flows"]:
        try:
            flows.append(TrafficFlow(chain_from_list([str(x) for x in item["chain"]]), float(item["rate"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad flow entry {item!r}") from exc
    horizon = args.horizon if args.horizon is not None else int(data.get("horizon", 100_000))
    warmup = args.warmup if args.warmup is not None else int(data.get("warmup", 10_000))
    seed = args.seed if args.seed is not None else data.get("seed")
    return SimConfig(net, tuple(flows), horizon, warmup, resolve_seed(seed))


def cmd_umw_sim(args) -> int:
    cfg = load_sim_config(args.config, args)
    if args.sweep:
        rows = sweep(cfg, parse_floats(args.sweep), workers=args.workers)
        write_csv(
            ("p", "avg_total_queue", "stable", "sfc_violations"),
            [(p, f"{avg:.6f}", int(stable), v) for p, avg, stable, v in rows],
            args.csv,
        )
        return EXIT_OK
    res = simulate(cfg)
    emit(
        {
            "average_total_queue": res.average,
            "stable": res.stable,
            "arrived": res.arrived,
            "delivered": res.delivered,
            "sfc_violations": res.sfc_violations,
            "max_link_service": res.max_link_service,
        },
        args.out,
    )
    return EXIT_OK


def cmd_bench_size(args) -> int:
    rows = bench.bench_size(
        parse_ints(args.nodes),
        args.z,
        args.r,
        args.trials,
        resolve_seed(args.seed),
        avg_degree=args.avg_degree,
        workers=args.workers,
    )
    write_csv(
        ("n", "z", "our_size", "layered_size"),
        [(row.n, row.z, f"{row.our_size:.3f}", f"{row.layered_size:.3f}") for row in rows],
        args.csv,
    )
    return EXIT_OK


def cmd_bench_place(args) -> int:
    rows = bench.bench_place(parse_ints(args.nodes), args.trials, resolve_seed(args.seed), workers=args.workers)
    write_csv(
        ("n", "avg_placement_size", "method"),
        [(row.n, f"{row.avg_size:.3f}", row.method) for row in rows],
        args.csv,
    )
    return EXIT_OK


def cmd_gen(args) -> int:
    seed = resolve_seed(args.seed)
    if args.placement:
        net = random_placement_network(args.nodes, seed, cap_range=(args.cap_min, args.cap_max))
    else:
        catalog = tuple(f.strip() for f in args.functions.split(",") if f.strip())
        net = random_network(
            args.nodes,
            args.z,
            args.avg_degree,
            (args.cap_min, args.cap_max),
            seed,
            catalog=catalog,
            directed=not args.undirected,
        )
    emit(network_to_json(net), args.out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sfc-toolkit", description="SFC-constrained routing, flow and placement tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_cmd(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--graph", required=True, help="graph JSON file")
        p.add_argument("--out", help="write JSON here instead of stdout")
        return p

    p = graph_cmd("sp", "SFC-constrained shortest walk")
    p.add_argument("--chain", required=True, help="source,f1,...,fr,destination")
    p.add_argument("--flexible", action="store_true", help="functions may run in any order")
    p.add_argument("--flex-group", action="append", metavar="I-J", help="1-based positions I..J may be reordered")
    p.add_argument("--layered", action="store_true", help="use the layered-graph baseline")
    p.add_argument("--emit-expanded", metavar="PATH", help="write the pruned expanded graph as JSON")
    p.set_defaults(func=cmd_sp)

    p = graph_cmd("sfc-maxflow", "max flow every chain segment can carry at once")
    p.add_argument("--chain", required=True, help="source,f1,...,fr,destination")
    p.set_defaults(func=cmd_sfc_maxflow)

    p = graph_cmd("maxflow", "unconstrained max flow")
    p.add_argument("--source")
    p.add_argument("--dest")
    p.add_argument("--min-cut", action="store_true", help="also report a minimum cut")
    p.set_defaults(func=cmd_maxflow)

    p = graph_cmd("must-stop", "max flow forced through one node (undirected graphs)")
    p.add_argument("--source", required=True)
    p.add_argument("--stop", required=True)
    p.add_argument("--dest", required=True)
    p.set_defaults(func=cmd_must_stop)

    p = graph_cmd("place", "fewest virtualized nodes keeping the max flow")
    p.add_argument("--source", help="default: first node")
    p.add_argument("--dest", help="default: last node")
    p.add_argument("--greedy", action="store_true")
    p.add_argument("--target-flow", help="flow to preserve (default: max flow)")
    p.set_defaults(func=cmd_place)

    p = sub.add_parser("umw-sim", help="max-weight routing simulation")
    p.add_argument("--config", required=True, help="JSON with network and flows")
    p.add_argument("--sweep", help="comma-separated load multipliers")
    p.add_argument("--csv", help="sweep CSV path (default stdout)")
    p.add_argument("--horizon", type=int)
    p.add_argument("--warmup", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_umw_sim)

    p = sub.add_parser("bench-size", help="pruned expansion vs layered graph size")
    p.add_argument("--nodes", default="20,40,60,80,100")
    p.add_argument("--z", type=float, default=0.5)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--avg-degree", type=float, default=bench.SIZE_AVG_DEGREE)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_bench_size)

    p = sub.add_parser("bench-place", help="average placement size on random graphs")
    p.add_argument("--nodes", default="10,20,30")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_bench_place)

    p = sub.add_parser("gen", help="random network JSON")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--z", type=float, default=0.5)
    p.add_argument("--avg-degree", type=float, default=bench.SIZE_AVG_DEGREE)
    p.add_argument("--cap-min", type=int, default=1)
    p.add_argument("--cap-max", type=int, default=10)
    p.add_argument("--functions", default="phi1,phi2,phi3")
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--placement", action="store_true", help="placement generator (degree n/3, no functions)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
