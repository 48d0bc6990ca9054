"""Routing, flow and placement under service function chain constraints."""

from .expand import (
    ExpandedGraph,
    build_expanded,
    build_layered,
    graph_size,
    layered_shortest_path,
    prune,
    sfc_set_shortest_path,
    sfc_shortest_path,
)
from .graph import (
    Edge,
    GraphError,
    Network,
    ServiceChain,
    Walk,
    load_network,
    network_from_json,
    network_to_json,
    random_network,
    validate,
)
from .maxflow import FlowAssignment, decompose, max_flow, min_cut
from .muststop import MustStopResult, must_stop, must_stop_realize, must_stop_value
from .placement import (
    PlacementInstance,
    PlacementResult,
    TwoLayerFlow,
    UnachievableError,
    placement_brute_force,
    placement_feasible,
    placement_greedy,
    placement_min,
    setcover_to_placement,
)
from .sfcmf import SfcMaxFlowResult, sfc_max_flow
from .umw import SimConfig, SimResult, TrafficFlow, simulate, sweep

__version__ = "0.1.0"
