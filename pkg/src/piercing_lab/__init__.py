"""Piercing sets for planar region families with the (p,2)-property."""

from .geometry import ConvexPolygon, Disc, Point, RegionFamily, axis_square, candidate_points, contains_point, intersects
from .helly import certified_deep_bound, deep_edge, friend_density, validate_friend_lemma
from .hypergraph import (
    Hypergraph,
    check_hereditary_linearity,
    delaunay_graph,
    dual_hypergraph,
    friends_pairs,
    induced,
    primal_hypergraph,
)
from .oracle import max_packing_exact, min_transversal_exact, signature_grid_check, vc_dimension_exact
from .transversal import (
    WeightedPointSet,
    check_p2,
    epsilon_net,
    fractional_transversal,
    greedy_pierce,
    packing_number,
    pierce_p2,
    turan_intersection_bound,
)

__version__ = "0.1.0"
