"""Dimensions of fractional Brownian motion with a self-affine drift.

Modules
-------
carpet
    Patterns, labelled systems and closed-form carpet dimensions.
driftfn
    The drift ``f`` defined by a labelled system and its exact evaluation.
fbm
    Exact fBm sampling and the energy kernel.
dimest
    Covering counts, canonical parabolic covers and slope fits.
cli
    Command-line front end.
"""

from .carpet import (LabeledSystem, Pattern, PatternError, dimension_comparison,
                     hausdorff_dim_carpet, minkowski_dim_carpet, minkowski_dim_perturbed,
                     parabolic_dim_carpet, perturbed_graph_dim_carpet)
from ._validation import HypothesisError
from .driftfn import ab_system, eval_f
from .estimators import BoxCountingDimension

__version__ = "0.1.0"

__all__ = [
    "LabeledSystem",
    "Pattern",
    "PatternError",
    "HypothesisError",
    "ab_system",
    "eval_f",
    "dimension_comparison",
    "hausdorff_dim_carpet",
    "minkowski_dim_carpet",
    "minkowski_dim_perturbed",
    "parabolic_dim_carpet",
    "perturbed_graph_dim_carpet",
    "BoxCountingDimension",
]
