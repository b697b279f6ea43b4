"""Column-generation root-node solver for C-VRPTW with pluggable
graph-reduction strategies for the pricing problem."""

from .driver import CgConfig, CgRun, compare, init_columns, run
from .generate import GenConfig, export_training_set, generate_instance, sample_duals
from .heatmap import HeatMapAdjusted, ProbMatrix, adjust, heat_from_T, load_T, save_T, surrogate_T
from .instance import (
    Column,
    PricingInstance,
    ScaledInstance,
    VrptwInstance,
    build_pricing,
    check_feasible,
    reduced_cost,
    route_cost,
)
from .localsearch import LsParams, ls_improve, ls_price
from .master import RmpState
from .pricing import DpParams, PricingResult, construct_initial, dp_price, exact_oracle
from .reduction import ReducedGraph, be2, no_reduction, ulgr_mask

__version__ = "0.1.0"

__all__ = [
    "CgConfig",
    "CgRun",
    "Column",
    "DpParams",
    "GenConfig",
    "HeatMapAdjusted",
    "LsParams",
    "PricingInstance",
    "PricingResult",
    "ProbMatrix",
    "ReducedGraph",
    "RmpState",
    "ScaledInstance",
    "VrptwInstance",
    "adjust",
    "be2",
    "build_pricing",
    "check_feasible",
    "compare",
    "construct_initial",
    "dp_price",
    "exact_oracle",
    "export_training_set",
    "generate_instance",
    "heat_from_T",
    "init_columns",
    "load_T",
    "ls_improve",
    "ls_price",
    "no_reduction",
    "reduced_cost",
    "route_cost",
    "run",
    "sample_duals",
    "save_T",
    "surrogate_T",
    "ulgr_mask",
]
