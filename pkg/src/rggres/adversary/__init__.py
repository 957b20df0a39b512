from .annulus import (AnnulusParams, InfeasibleError, annulus_cut, c_value, nu_t,
                      smallest_feasible_A, solve_annulus_params, t_A)
from .cuts import (PreconditionError, budget_deletion, stiebitz_cut, strip_count, strip_cut,
                   triangle_killer_cut, triangles_through, tripartite_cut)
from .interval import empty_interval_cut, interval_length
from .report import AttackReport, make_report

__all__ = [
    "AnnulusParams", "AttackReport", "InfeasibleError", "PreconditionError", "annulus_cut",
    "budget_deletion", "c_value", "empty_interval_cut", "interval_length", "make_report", "nu_t",
    "smallest_feasible_A", "solve_annulus_params", "stiebitz_cut", "strip_count", "strip_cut",
    "t_A", "triangle_killer_cut", "triangles_through", "tripartite_cut",
]
