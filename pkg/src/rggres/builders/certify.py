"""Certifying k-connectivity of a subgraph through a shorter-radius coupling.

If the geometric graph of radius delta*r on the same points is c-connected
and every pair adjacent in it has at least c common neighbours in H, then H
is c-connected: removing fewer than c vertices leaves the auxiliary graph
connected, and each of its edges still has a surviving common neighbour.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..connectivity import is_k_connected
from ..graph import GeometricGraph, Graph, SubgraphMask
from ..rgg import neighbour_pairs
from .common import BuildFailure


@dataclass
class ConnectivityCertificate:
    delta: float
    c: int
    aux_radius: float
    aux_edges: np.ndarray
    common: np.ndarray  # common kept neighbours per auxiliary edge
    spot_checked: bool = False
    audits: dict = field(default_factory=dict)

    @property
    def min_common(self) -> int:
        return int(self.common.min()) if len(self.common) else 0


def common_neighbour_counts(h: Graph, pairs: np.ndarray) -> np.ndarray:
    if len(pairs) == 0:
        return np.zeros(0, np.int64)
    A = h.to_csr()
    prod = A[pairs[:, 0]].multiply(A[pairs[:, 1]])
    return np.asarray(prod.sum(axis=1)).ravel().astype(np.int64)


def verify_connectivity_certificate(h: SubgraphMask, cert: ConnectivityCertificate) -> bool:
    """Recheck both coupling conditions from scratch."""
    base = h.base
    edges, _ = neighbour_pairs(base.points, cert.aux_radius, base.metric)
    if not np.array_equal(edges, cert.aux_edges):
        return False
    if not is_k_connected(Graph(base.n, edges, trusted=True), cert.c):
        return False
    return bool(np.all(common_neighbour_counts(h.kept, edges) >= cert.c))


def certify_connectivity(h: SubgraphMask, delta: float, c: int,
                         spot_bound: int = 3000) -> ConnectivityCertificate | BuildFailure:
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if c < 1:
        raise ValueError("c must be >= 1")
    base = h.base
    if not isinstance(base, GeometricGraph):
        raise ValueError("certification needs a geometric base graph")
    rad = delta * base.r
    edges, _ = neighbour_pairs(base.points, rad, base.metric)
    aux = Graph(base.n, edges, trusted=True)
    res = is_k_connected(aux, c)
    if not res.ok:
        cut = None if res.cut is None else tuple(int(x) for x in res.cut)
        return BuildFailure("auxiliary", f"radius-{rad:.4g} graph is not {c}-connected", where=cut)
    common = common_neighbour_counts(h.kept, edges)
    bad = np.nonzero(common < c)[0]
    if len(bad):
        j = int(bad[0])
        return BuildFailure("common-neighbours",
                            f"pair has {int(common[j])} common kept neighbours, needs {c}",
                            where=(int(edges[j, 0]), int(edges[j, 1])))
    cert = ConnectivityCertificate(delta, c, rad, edges, common)
    if base.n <= spot_bound:
        if not is_k_connected(h.kept, c):
            return BuildFailure("spot-check", "exact check disagrees with the certificate")
        cert.spot_checked = True
    cert.audits = {"aux_edges": int(len(edges)), "min_common": cert.min_common}
    return cert
