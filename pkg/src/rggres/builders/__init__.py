from .cellham import (cell_hamilton, deletable_fraction, improved_deletable_fraction,
                      interval_hamilton_1d, refined_count)
from .certify import (ConnectivityCertificate, certify_connectivity, common_neighbour_counts,
                      verify_connectivity_certificate)
from .closure import Closure, bondy_chvatal_closure, closure_hamilton, unwind_cycle
from .common import BuildFailure, ScopeError
from .jackson import jackson_cycle, jackson_hypothesis
from .longcycle import (BLUE, GREEN, RED, ColourTuning, Colouring, colouring_audits, long_cycle,
                        long_cycle_colouring, sample_colouring)
from .sandwich import SandwichReport, sandwich_check
from .square import ConjectureReport, PreconditionError, conjecture_check, square_cycle_hamilton, square_subgraphs
from .twopaths import (TwoPathsCertificate, degree_sequence_hypothesis, min_degree_hypothesis,
                       two_disjoint_paths, verify_two_paths)

__all__ = [
    "BLUE", "GREEN", "RED", "BuildFailure", "Closure", "ColourTuning", "Colouring", "ConjectureReport",
    "ConnectivityCertificate", "PreconditionError", "SandwichReport", "ScopeError", "TwoPathsCertificate",
    "bondy_chvatal_closure", "cell_hamilton", "certify_connectivity", "closure_hamilton",
    "colouring_audits", "common_neighbour_counts", "conjecture_check", "deletable_fraction",
    "degree_sequence_hypothesis", "improved_deletable_fraction", "interval_hamilton_1d",
    "jackson_cycle", "jackson_hypothesis", "long_cycle", "long_cycle_colouring", "min_degree_hypothesis",
    "refined_count", "sample_colouring", "sandwich_check", "square_cycle_hamilton", "square_subgraphs",
    "two_disjoint_paths", "unwind_cycle", "verify_connectivity_certificate", "verify_two_paths",
]
