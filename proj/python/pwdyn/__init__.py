"""Piecewise-smooth maps, rotation numbers and Farey structure."""

from ._core import (
    PiecewiseMap,
    enumerate_wpq,
    eta_number,
    farey_parents,
    farey_sequence,
    farey_word,
    firing_number,
    is_maximin,
    is_minimax,
    is_neighbor_pair,
    is_pq_ordered,
    maximal_rotation,
    mediant,
    minimal_rotation,
    planar_relay,
    relay_branch,
    rigid_rotation_number,
    run_cli,
    scan_curve,
    staircase,
)

__all__ = [
    "PiecewiseMap",
    "enumerate_wpq",
    "eta_number",
    "farey_parents",
    "farey_sequence",
    "farey_word",
    "firing_number",
    "is_maximin",
    "is_minimax",
    "is_neighbor_pair",
    "is_pq_ordered",
    "maximal_rotation",
    "mediant",
    "minimal_rotation",
    "planar_relay",
    "relay_branch",
    "rigid_rotation_number",
    "run_cli",
    "scan_curve",
    "staircase",
]
