"""Diversity-multiplexing tradeoff of double-scattering MIMO channels.

Closed-form curves, two independent outage-exponent solvers (exact LP and
greedy reduction), Monte Carlo outage simulation, and numerical checks of
the supporting random-matrix lemmas.
"""

from .dmt_core import (
    ChannelTriple,
    DmtCurve,
    MaxDiversity,
    OrderedTriple,
    dmt_at,
    dmt_curve,
    dmt_point,
    is_rayleigh_equivalent,
    max_diversity,
    order_triple,
    rayleigh_dmt,
)
from .exponent_solver import (
    CaseId,
    ExponentProgram,
    ReducedObjective,
    build_program,
    classify_case,
    dmt_via_greedy,
    dmt_via_lp,
    greedy_reduce,
    minimize_threshold,
    solve_lp,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelTriple",
    "OrderedTriple",
    "DmtCurve",
    "MaxDiversity",
    "order_triple",
    "dmt_point",
    "dmt_curve",
    "dmt_at",
    "rayleigh_dmt",
    "is_rayleigh_equivalent",
    "max_diversity",
    "CaseId",
    "ExponentProgram",
    "ReducedObjective",
    "classify_case",
    "build_program",
    "solve_lp",
    "greedy_reduce",
    "minimize_threshold",
    "dmt_via_lp",
    "dmt_via_greedy",
    "__version__",
]
