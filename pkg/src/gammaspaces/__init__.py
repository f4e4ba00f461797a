"""Rearrangement-invariant function spaces on (0, 1): norms, K-functionals,
real interpolation norms and a bounded-ratio verification harness."""

from .errors import EvaluationError, ParameterError
from .grids import LogGrid, make_log_grid
from .rearrangement import (PowerLog, Rearrangement, SampledFunction, Step, Tabulated,
                            decreasing_rearrangement, distribution_function, indicator,
                            nu_rearrangement, rearrange_on_grid, truncation_split, weak_lp_split)
from .spaces import (GGamma, GGammaSup, GrandLp, LambdaP, LorentzPQ, Lp, PowerLogWeight,
                     SmallLp, WeakLp, norm, space_from_dict, space_to_dict)
from .kfunctional import CoupleSpec, KCurve, couple, k_closed, k_curve, k_search
from .interpolation import InterpSpec, interp_norm
from .harness import EquivalenceReport, REGISTRY, export_report, run_scenario

__all__ = [
    "EvaluationError", "ParameterError", "LogGrid", "make_log_grid",
    "PowerLog", "Rearrangement", "SampledFunction", "Step", "Tabulated",
    "decreasing_rearrangement", "distribution_function", "indicator", "nu_rearrangement",
    "rearrange_on_grid", "truncation_split", "weak_lp_split",
    "GGamma", "GGammaSup", "GrandLp", "LambdaP", "LorentzPQ", "Lp", "PowerLogWeight",
    "SmallLp", "WeakLp", "norm", "space_from_dict", "space_to_dict",
    "CoupleSpec", "KCurve", "couple", "k_closed", "k_curve", "k_search",
    "InterpSpec", "interp_norm",
    "EquivalenceReport", "REGISTRY", "export_report", "run_scenario",
]
