from sfc_toolkit.bench import bench_place, bench_size, size_trial
from sfc_toolkit.graph import random_network


def test_size_rows_are_deterministic():
    a = bench_size([10, 15], 0.5, 2, 3, seed=4)
    assert a == bench_size([15, 10], 0.5, 2, 3, seed=4)
    assert [r.n for r in a] == [10, 15]


def test_no_chain_means_equal_sizes():
    for row in bench_size([8, 12], 0.5, 0, 3, seed=1):
        assert row.our_size == row.layered_size


def test_full_hosting_gives_one_copy():
    ours, layered = size_trial(10, 1.0, 3, seed=5, avg_degree=9)
    net = random_network(10, 1.0, 9, (1, 10), 5, catalog=("phi1", "phi2", "phi3"))
    assert ours == len(net.nodes) + len(net.arcs)
    assert layered > ours


def test_parallel_matches_serial():
    assert bench_size([10], 0.5, 3, 4, seed=2, workers=2) == bench_size([10], 0.5, 3, 4, seed=2, workers=1)


def test_place_rows():
    rows = bench_place([3, 6], 3, seed=0)
    assert rows == bench_place([3, 6], 3, seed=0)
    assert all(r.method == "exact" for r in rows)
    # three-node graphs are v0 -> v1 -> v2 or disconnected
    assert rows[0].avg_size <= 1
    assert all(r.avg_size < 10 for r in rows)
