import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sfc_toolkit.graph import (
    Edge,
    GraphError,
    Network,
    ServiceChain,
    chain_orderings,
    chain_progress,
    fraction_to_json,
    network_from_json,
    network_to_json,
    random_network,
    to_fraction,
    validate,
    walk_cost,
)


def small_net(**kw):
    return Network(("a", "b", "c"), (Edge("a", "b", 1, 2), Edge("b", "c", 2, 3)), {"b": frozenset({"f"})}, **kw)


def test_to_fraction_is_exact():
    assert to_fraction(0.1) == Fraction(1, 10)
    assert to_fraction("3/2") == Fraction(3, 2)
    assert to_fraction(4) == 4
    with pytest.raises(GraphError):
        to_fraction("abc")


def test_fraction_to_json():
    assert fraction_to_json(Fraction(4)) == 4
    assert fraction_to_json(Fraction(3, 2)) == "3/2"


@pytest.mark.parametrize(
    "edges, message",
    [
        ((Edge("a", "z"),), "unknown endpoint"),
        ((Edge("a", "b", 1, -1),), "negative capacity"),
        ((Edge("a", "b", -1, 1),), "negative cost"),
        ((Edge("a", "a"),), "self-loop"),
        ((Edge("a", "b"), Edge("a", "b")), "duplicate edge"),
    ],
)
def test_validate_reports(edges, message):
    net = Network(("a", "b"), edges, {})
    assert any(message in p for p in validate(net))


def test_validate_duplicate_undirected_edge():
    net = Network(("a", "b"), (Edge("a", "b"), Edge("b", "a")), {}, directed=False)
    assert any("duplicate edge" in p for p in validate(net))
    assert validate(Network(("a", "b"), (Edge("a", "b"), Edge("b", "a")), {})) == []


def test_undirected_arcs_come_in_pairs():
    net = small_net(directed=False)
    assert len(net.arcs) == 4
    assert {(a.tail, a.head) for a in net.arcs} == {("a", "b"), ("b", "a"), ("b", "c"), ("c", "b")}


def test_chain_rejects_trivial_loop():
    with pytest.raises(GraphError):
        ServiceChain("a", "a")
    assert ServiceChain("a", "a", ("f",)).r == 1


def test_chain_orderings_counts():
    sc = ServiceChain("s", "d", ("f1", "f2", "f3"), ((0, 1), (2,)))
    orders = [o.chain for o in chain_orderings(sc)]
    assert orders == [("f1", "f2", "f3"), ("f2", "f1", "f3")]
    assert len(chain_orderings(ServiceChain.fully_flexible("s", "d", ["a", "b", "c"]))) == 6


def test_chain_orderings_rejects_gaps():
    with pytest.raises(GraphError):
        chain_orderings(ServiceChain("s", "d", ("a", "b", "c"), ((0, 2), (1,))))


def test_walk_cost_and_progress():
    net = small_net()
    assert walk_cost(net, ["a", "b", "c"]) == 3
    with pytest.raises(GraphError):
        walk_cost(net, ["a", "c"])
    assert chain_progress(net, ["a", "b", "c"], ["f"]) == 1
    assert chain_progress(net, ["a"], ["f"]) == 0


def test_random_network_is_reproducible():
    a = random_network(12, 0.5, 3, (1, 5), seed=7)
    b = random_network(12, 0.5, 3, (1, 5), seed=7)
    assert a == b
    assert validate(a) == []


def test_random_network_zero_degree_has_no_edges():
    assert random_network(5, 0.5, 0, (1, 5), seed=1).edges == ()


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(2, 9),
    z=st.sampled_from([0.0, 0.3, 1.0]),
    deg=st.floats(0, 4),
    seed=st.integers(0, 10**6),
    directed=st.booleans(),
)
def test_json_round_trip(n, z, deg, seed, directed):
    net = random_network(n, z, deg, (1, 9), seed, directed=directed)
    text = json.dumps(network_to_json(net))
    again = network_from_json(json.loads(text))
    assert again == net
    assert network_to_json(again) == network_to_json(net)


def test_json_defaults_and_fractions():
    net = network_from_json({"nodes": ["x", {"id": "y", "functions": ["f"]}], "edges": [{"from": "x", "to": "y", "capacity": "1/3"}]})
    assert net.edges[0].cost == 1 and net.edges[0].capacity == Fraction(1, 3)
    assert net.directed and net.hosted("y") == frozenset({"f"})
    with pytest.raises(GraphError):
        network_from_json({"edges": []})
