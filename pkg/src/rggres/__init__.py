"""Local resilience of random geometric graphs: sampling, attacks, constructive certificates."""

from .connectivity import ConnectivityResult, is_k_connected
from .geom import Metric, Region, Tessellation, ball_volume, region_volume, tessellate
from .graph import (CycleCertificate, GeometricGraph, Graph, SubgraphMask, check_alpha_subgraph,
                    complete_graph, cycle_graph, power_of_cycle, verify_cycle)
from .hamilton import is_hamiltonian_exact
from .rgg import ProcessTrace, hitting_time, rgg_process, sample_rgg

__all__ = [
    "ConnectivityResult", "CycleCertificate", "GeometricGraph", "Graph", "Metric", "ProcessTrace",
    "Region", "SubgraphMask", "Tessellation", "ball_volume", "check_alpha_subgraph", "complete_graph",
    "cycle_graph", "hitting_time", "is_hamiltonian_exact", "is_k_connected", "power_of_cycle",
    "region_volume", "rgg_process", "sample_rgg", "tessellate", "verify_cycle",
]
