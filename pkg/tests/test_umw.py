import numpy as np
import pytest

from sfc_toolkit.fixtures import chain_from_list, load_fixture
from sfc_toolkit.graph import Edge, GraphError, Network, ServiceChain
from sfc_toolkit.umw import SimConfig, TrafficFlow, simulate, stability_verdict, sweep


def fig6_config(horizon=4000, warmup=400, seed=1):
    fx = load_fixture("fig6a")
    flows = tuple(TrafficFlow(chain_from_list(f["chain"]), f["rate"]) for f in fx.raw["flows"])
    return SimConfig(fx.network, flows, horizon, warmup, seed)


def test_zero_rates_keep_queues_empty():
    res = simulate(fig6_config().scaled(0))
    assert res.arrived == 0 and not res.total_queue.any() and res.average == 0


def test_routes_respect_chains_and_capacity():
    res = simulate(fig6_config().scaled(0.9))
    assert res.arrived > 0
    assert res.sfc_violations == 0
    assert res.max_link_service <= 1
    assert res.delivered + res.total_queue[-1] == res.arrived


def test_same_seed_same_run():
    a = simulate(fig6_config().scaled(0.7))
    b = simulate(fig6_config().scaled(0.7))
    assert np.array_equal(a.total_queue, b.total_queue)
    c = simulate(fig6_config(seed=2).scaled(0.7))
    assert c.arrived != a.arrived or not np.array_equal(a.total_queue, c.total_queue)


def test_overload_grows():
    res = simulate(fig6_config(horizon=20000, warmup=2000).scaled(1.5))
    assert not res.stable
    assert res.total_queue[-1] > res.total_queue[5000]


def test_stability_verdict():
    assert stability_verdict(np.full(1000, 5.0), 100)
    assert not stability_verdict(np.arange(1000, dtype=float), 100)


def test_sweep_zero_row_and_order():
    rows = sweep(fig6_config(horizon=1000, warmup=100), [0.5, 0], workers=1)
    assert rows[0] == (0.0, 0.0, True, 0)
    assert [r[0] for r in rows] == [0.0, 0.5]


def test_config_checks():
    net = Network(("a", "b"), (Edge("a", "b"),), {})
    with pytest.raises(GraphError):
        SimConfig(net, (), 10, 10)
    with pytest.raises(GraphError):
        SimConfig(net, (TrafficFlow(ServiceChain("a", "b"), -1),), 10, 1)
    with pytest.raises(GraphError):
        simulate(SimConfig(net, (TrafficFlow(ServiceChain("b", "a"), 1),), 10, 1))
