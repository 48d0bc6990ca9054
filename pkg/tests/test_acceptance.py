"""One test per acceptance criterion; the summary prints a PASS/FAIL line for each."""

import random
import statistics
import time
from fractions import Fraction

import pytest

from oracles import brute_force_walk_cost
from sfc_toolkit import cli, maxflow, muststop, placement, sfcmf
from sfc_toolkit.bench import bench_size
from sfc_toolkit.expand import build_expanded, graph_size, layered_shortest_path, prune, sfc_shortest_path
from sfc_toolkit.fixtures import chain_from_list, fixture_path, load_fixture
from sfc_toolkit.graph import Network, ServiceChain, random_network
from sfc_toolkit.umw import SimConfig, TrafficFlow, sweep
from sfc_toolkit.verify import check_flow, check_must_stop, check_sfc_max_flow, check_two_layer


def test_ac01_shortest_walk_golden(record_property):
    net = load_fixture("fig2").network
    sc = chain_from_list(["v1", "phi1", "phi2", "v5"])
    walk = sfc_shortest_path(net, sc)
    timings = []
    for _ in range(50):
        t0 = time.perf_counter()
        sfc_shortest_path(net, sc)
        timings.append(time.perf_counter() - t0)
    median = statistics.median(timings)
    record_property("detail", f"walk {','.join(walk.nodes)} cost {walk.cost}, median {median * 1e3:.3f} ms")
    assert walk.nodes == ("v1", "v3", "v4", "v3", "v5")
    assert walk.cost == Fraction(6)
    assert median < 1e-3


def test_ac02_expansion_sizes(record_property):
    net = load_fixture("fig2").network
    eg = build_expanded(net, chain_from_list(["v1", "phi1", "phi2", "v5"]))
    initial, pruned = graph_size(eg), graph_size(prune(eg))
    record_property("detail", f"initial {initial[:2]}, pruned {pruned[:2]}")
    assert initial[:2] == (15, 21)
    assert pruned[:2] == (7, 9)


def test_ac03_baseline_equivalence(record_property):
    start = time.perf_counter()
    brute_checked = feasible = 0
    for i in range(200):
        rng = random.Random(i)
        n = rng.randint(3, 12)
        r = rng.randint(0, 3)
        z = (0.3, 0.5, 0.8)[i % 3]
        catalog = tuple(f"phi{k + 1}" for k in range(r))
        net = random_network(n, z, rng.uniform(1.5, 4), (1, 10), i, catalog=catalog)
        sc = ServiceChain("v0", f"v{n - 1}", catalog)
        ours = sfc_shortest_path(net, sc)
        layered = layered_shortest_path(net, sc)
        cost = ours.cost if ours else None
        assert cost == (layered.cost if layered else None), f"instance {i}"
        if n <= 8:
            assert cost == brute_force_walk_cost(net, sc), f"instance {i}"
            brute_checked += 1
        feasible += ours is not None
    elapsed = time.perf_counter() - start
    record_property("detail", f"200 instances, {feasible} feasible, {brute_checked} brute-forced, {elapsed:.1f} s")
    assert elapsed < 60


def test_ac04_pruning_removes_vertices(record_property):
    fractions = []
    for i in range(500):
        n = 10 + i % 21
        catalog = ("phi1", "phi2", "phi3")
        net = random_network(n, 0.5, 4, (1, 10), 10_000 + i, catalog=catalog)
        eg = build_expanded(net, ServiceChain("v0", f"v{n - 1}", catalog))
        fractions.append(1 - len(prune(eg).vertices) / len(eg.vertices))
    mean = sum(fractions) / len(fractions)
    record_property("detail", f"mean removed fraction {mean:.4f} over 500 expansions")
    assert mean >= 0.25 - 0.02


def test_ac05_must_stop_golden(record_property):
    net = load_fixture("fig4").network
    res = muststop.must_stop(net, "s", "t", "d")
    record_property("detail", f"bounds {tuple(map(str, res.bounds))}, value {res.value}")
    assert res.bounds == (Fraction(3, 2), Fraction(2), Fraction(2))
    assert res.value == Fraction(3, 2)
    assert res.realization.value == Fraction(3, 2)
    assert check_must_stop(net, res, "s", "t", "d") == []


def test_ac06_must_stop_matches_lp(record_property):
    halves = 0
    for i in range(200):
        rng = random.Random(50_000 + i)
        n = rng.randint(3, 7)
        base = random_network(n, 0, rng.uniform(1.5, 4), (1, 5), 50_000 + i, catalog=(), directed=False)
        s, t, d = rng.sample(base.nodes, 3)
        net = Network(base.nodes, base.edges, {t: frozenset({"phi"})}, directed=False)
        value = muststop.must_stop_value(net, s, t, d).value
        lam = sfcmf.sfc_max_flow(net, ServiceChain(s, d, ("phi",))).lam
        assert value == lam, f"instance {i}"
        assert (2 * value).denominator == 1
        halves += value.denominator == 2
    record_property("detail", f"200 instances equal, {halves} with half-integral value")


def test_ac07_placement_golden(record_property):
    net = load_fixture("fig7a").network
    fa = maxflow.max_flow(net, "v1", "v8")
    inst = placement.PlacementInstance(net, "v1", "v8")
    res = placement.placement_min(inst)
    record_property("detail", f"max flow {fa.value}, placement {list(res.nodes)} (v6->v5 capacity 3 assumed)")
    assert fa.value == 8
    assert res.size == 1 and res.nodes == ("v6",)
    assert check_two_layer(net, "v1", "v8", Fraction(8), res.nodes, res.witness) == []


def test_ac08_placement_optimality(record_property):
    greedy_worse = 0
    for i in range(100):
        n = random.Random(70_000 + i).randint(3, 10)
        net = placement.random_placement_network(n, 70_000 + i)
        inst = placement.PlacementInstance(net, net.nodes[0], net.nodes[-1])
        exact = placement.placement_min(inst)
        assert exact.size == placement.placement_brute_force(inst).size, f"instance {i}"
        greedy = placement.placement_greedy(inst)
        assert greedy.size >= exact.size, f"instance {i}"
        greedy_worse += greedy.size > exact.size
    record_property("detail", f"100 instances equal to brute force; greedy larger on {greedy_worse}")


def test_ac09_set_cover_reduction(record_property):
    mismatches = []
    for i in range(500):
        universe, subsets = placement.random_set_cover(random.Random(90_000 + i))
        inst, _ = placement.setcover_to_placement(universe, subsets)
        size = placement.placement_min(inst).size
        cover = placement.min_set_cover(universe, subsets)
        assert size <= cover
        if size != cover:
            mismatches.append((i, size, cover))
    record_property("detail", f"{len(mismatches)} of 500 instances where placement < set cover, first {mismatches[:3]}")
    assert not mismatches


def test_ac10_size_benchmark_shape(record_property):
    rows = bench_size([20, 40, 60, 80, 100], 0.5, 3, 10, seed=0)
    ratios = [bench_size([60], z, 3, 10, seed=0)[0].ratio for z in (0.3, 0.5, 0.7, 0.9)]
    record_property(
        "detail",
        "ours/layered " + ", ".join(f"n={r.n}:{r.ratio:.3f}" for r in rows) + "; n=60 by z " + ", ".join(f"{x:.3f}" for x in ratios),
    )
    assert all(r.our_size < r.layered_size for r in rows)
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


def test_ac11_queue_stability(record_property):
    fx = load_fixture("fig6a")
    flows = tuple(TrafficFlow(chain_from_list(f["chain"]), f["rate"]) for f in fx.raw["flows"])
    assert [f.rate for f in flows] == [2, 1]
    cfg = SimConfig(fx.network, flows, horizon=100_000, warmup=10_000, seed=0)
    start = time.perf_counter()
    rows = sweep(cfg, [0.5, 0.7, 0.9, 1.2])
    elapsed = time.perf_counter() - start
    record_property("detail", "; ".join(f"p={p}: avg {avg:.1f} {'stable' if ok else 'growing'}" for p, avg, ok, _ in rows) + f"; {elapsed:.0f} s")
    verdicts = {p: ok for p, _, ok, _ in rows}
    assert verdicts == {0.5: True, 0.7: True, 0.9: True, 1.2: False}
    assert all(v == 0 for *_, v in rows)
    assert elapsed < 120


class Recorder:
    """Wraps every function that hands out a flow object and keeps what it returned."""

    targets = {
        "max_flow": "flow",
        "must_stop": "must_stop",
        "must_stop_realize": "must_stop",
        "sfc_max_flow": "sfc",
        "placement_feasible": "two_layer",
        "placement_min": "placement",
        "placement_greedy": "placement",
        "placement_brute_force": "placement",
    }

    def __init__(self, monkeypatch):
        import sys

        self.records = []
        originals = {}
        for name in self.targets:
            for mod in (maxflow, muststop, sfcmf, placement):
                if hasattr(mod, name):
                    originals[name] = getattr(mod, name)
        for mod_name, mod in list(sys.modules.items()):
            if not mod_name.startswith("sfc_toolkit"):
                continue
            for name, fn in originals.items():
                if getattr(mod, name, None) is fn:
                    monkeypatch.setattr(mod, name, self._wrap(name, fn))

    def _wrap(self, name, fn):
        def wrapper(*args, **kwargs):
            out = fn(*args, **kwargs)
            self.records.append((self.targets[name], args, out))
            return out

        return wrapper

    def problems(self):
        found = []
        for kind, args, out in self.records:
            if kind == "flow":
                net, s, d = args
                found += check_flow(net, out, s, d)
            elif kind == "must_stop":
                net, s, t, d = args[:4]
                found += check_must_stop(net, out, s, t, d)
            elif kind == "sfc":
                found += check_sfc_max_flow(args[0], out)
            elif kind == "two_layer" and out is not None:
                inst, nodes = args
                found += check_two_layer(inst.net, inst.source, inst.destination, inst.target_flow, nodes, out)
            elif kind == "placement":
                inst = args[0]
                found += check_two_layer(inst.net, inst.source, inst.destination, inst.target_flow, out.nodes, out.witness)
        return found


def test_ac12_global_invariants(monkeypatch, record_property, capsys):
    rec = Recorder(monkeypatch)
    fig4 = load_fixture("fig4").network
    muststop.must_stop(fig4, "s", "t", "d")
    sfcmf.sfc_max_flow(fig4, chain_from_list(["s", "phi", "d"]))
    assert cli.run(["place", "--graph", str(fixture_path("fig7a"))]) == 0
    assert cli.run(["place", "--graph", str(fixture_path("fig7a")), "--greedy"]) == 0
    capsys.readouterr()
    for i in range(40):
        rng = random.Random(120_000 + i)
        n = rng.randint(3, 8)
        directed = random_network(n, 0, rng.uniform(1.5, 4), (0, 6), 120_000 + i, catalog=(), directed=rng.random() < 0.5)
        maxflow.max_flow(directed, directed.nodes[0], directed.nodes[-1])
        undirected = random_network(n, 0, rng.uniform(1.5, 4), (1, 5), 130_000 + i, catalog=(), directed=False)
        s, t, d = rng.sample(undirected.nodes, 3)
        muststop.must_stop(undirected, s, t, d)
        hosted = Network(undirected.nodes, undirected.edges, {t: frozenset({"phi"})}, directed=False)
        sfcmf.sfc_max_flow(hosted, ServiceChain(s, d, ("phi",)))
        pnet = placement.random_placement_network(rng.randint(3, 8), 140_000 + i)
        inst = placement.PlacementInstance(pnet, pnet.nodes[0], pnet.nodes[-1])
        placement.placement_min(inst)
        placement.placement_greedy(inst)
        placement.placement_brute_force(inst)
        universe, subsets = placement.random_set_cover(rng)
        placement.placement_min(placement.setcover_to_placement(universe, subsets)[0])
    problems = rec.problems()
    kinds = {}
    for kind, _, out in rec.records:
        if out is not None:
            kinds[kind] = kinds.get(kind, 0) + 1
    record_property("detail", f"{sum(kinds.values())} objects re-checked {kinds}, {len(problems)} violations")
    assert problems == []
