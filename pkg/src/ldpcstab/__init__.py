"""Stability analysis tools for LDPC code ensembles under belief propagation and MAP decoding."""
from .degseq import DegreePair, ValidationError, heavy_tail_poisson, right_regular, cycle_pair, regular_pair
from .channel import Channel, ChannelFamily, LDensity, make_channel
from .de import bp_threshold, run_de, stability_threshold
from .universal import choose_l, f, f_double_prime, f_prime
from .tanner import Code, GuardExceeded, TannerGraph, example_graph, sample_graph
from .explore import ExplorationTrace, detect_cycle_event, run_batch, run_exploration
from .mapdec import bit_error_lower_bound, bitwise_map, blockwise_map, build_realization_graph, maximum_matching

__all__ = [
    "DegreePair", "ValidationError", "heavy_tail_poisson", "right_regular", "cycle_pair",
    "regular_pair", "Channel", "ChannelFamily", "LDensity", "make_channel",
    "bp_threshold", "run_de", "stability_threshold", "choose_l", "f", "f_prime", "f_double_prime",
    "Code", "GuardExceeded", "TannerGraph", "example_graph", "sample_graph",
    "ExplorationTrace", "detect_cycle_event", "run_batch", "run_exploration",
    "bit_error_lower_bound", "bitwise_map", "blockwise_map", "build_realization_graph",
    "maximum_matching",
]
