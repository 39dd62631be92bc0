"""Weighted dyadic reciprocity analysis for directed communication graphs."""

__version__ = "0.1.0"

from .graph import DyadCensus, GraphBuilder, MutualDyad, WeightedDigraph
from .metrics import (
    AssortativityResult,
    ConcentrationScore,
    DyadClass,
    ReciprocityHistogram,
    ReciprocityRecord,
    classify,
    concentration,
    degree_assortativity,
    equidispersion_prediction,
    reciprocity,
    reciprocity_distribution,
    reciprocity_records,
)
from .nullmodels import (
    RegimeConfig,
    RegimeSet,
    RewireOutcome,
    equidisperse,
    four_regimes,
    maslov_sneppen_rewire,
    reattach_weights,
)

__all__ = [
    "AssortativityResult",
    "ConcentrationScore",
    "DyadCensus",
    "DyadClass",
    "GraphBuilder",
    "MutualDyad",
    "ReciprocityHistogram",
    "ReciprocityRecord",
    "RegimeConfig",
    "RegimeSet",
    "RewireOutcome",
    "WeightedDigraph",
    "classify",
    "concentration",
    "degree_assortativity",
    "equidisperse",
    "equidispersion_prediction",
    "four_regimes",
    "maslov_sneppen_rewire",
    "reattach_weights",
    "reciprocity",
    "reciprocity_distribution",
    "reciprocity_records",
]
