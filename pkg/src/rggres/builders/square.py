"""Hamilton cycles in subgraphs of squared cycles, and exhaustive checks of
the minimum-degree question for higher powers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..graph import CycleCertificate, Graph, base_graph, power_of_cycle, verify_cycle
from ..hamilton import DP_BOUND, is_hamiltonian_exact
from ..rgg import as_rng
from .common import ScopeError


class PreconditionError(ValueError):
    pass


def _cyc_dist(u, v, n):
    d = abs(int(u) - int(v)) % n
    return min(d, n - d)


def _check_square(H: Graph):
    n = H.n
    if n < 4:
        raise PreconditionError("need n >= 4")
    e = H.edges
    if len(e):
        dist = np.abs(e[:, 0] - e[:, 1]) % n
        dist = np.minimum(dist, n - dist)
        if np.any((dist < 1) | (dist > 2)):
            raise PreconditionError("H is not a subgraph of the squared cycle")
    if n == 0 or H.degree.min() < 3:
        raise PreconditionError("minimum degree below 3")


def square_cycle_hamilton(H) -> CycleCertificate:
    """Hamilton cycle in H with H inside C_n^2 (labels in cycle order) and min degree 3.

    Dense cases first: K4, the whole base cycle, and the case where only base
    cycle edges are missing (odd n: the +2 steps; even n: two +2 cycles joined
    across a missing edge). Otherwise relabel by a rotation/reflection so that
    {0,1} is missing and {2,3} present, grow a path from (1,2,3) by +1 steps,
    or by the detour (i+2, i+1, i+3) when {i,i+1} is missing, and close it
    according to where the counter stops.
    """
    H = base_graph(H)
    _check_square(H)
    n = H.n
    E = {(min(u, v), max(u, v)) for u, v in H.edges_list()}

    def has(a, b):
        a, b = a % n, b % n
        return (min(a, b), max(a, b)) in E

    if n == 4:
        seq = [0, 1, 2, 3]
    elif all(has(i, i + 1) for i in range(n)):
        seq = list(range(n))
    elif all(has(i, i + 2) for i in range(n)):
        if n % 2 == 1:
            seq = [(2 * i) % n for i in range(n)]
        else:
            a = next(i for i in range(n) if not has(i, i + 1))
            rel = list(range(1, n, 2)) + [0] + list(range(n - 2, 0, -2))
            seq = [(a + x) % n for x in rel]
    else:
        phi = None
        for sgn in (1, -1):
            for off in range(n):
                f = (lambda s, o: lambda i: (o + s * i) % n)(sgn, off)
                if not has(f(0), f(1)) and has(f(2), f(3)):
                    phi = f
                    break
            if phi:
                break
        if phi is None:
            raise RuntimeError("no relabelling with {0,1} missing and {2,3} present")

        def h(a, b):
            return has(phi(a), phi(b))

        path = [1, 2, 3]
        i = 3
        while i < n - 2:
            if h(i, i + 1):
                path.append(i + 1)
                i += 1
            else:
                path += [i + 2, i + 1, i + 3]
                i += 3
        if i == n - 2:
            rel = path + [0, n - 1]
        elif i == n - 1:
            rel = path[2:] + [0, 2, 1]
        else:
            rel = path[2:] + [2, 1]
        seq = [phi(x % n) for x in rel]
    cert = CycleCertificate(tuple(int(x) for x in seq), kind="square")
    if not verify_cycle(H, cert) or len(seq) != n:
        raise RuntimeError("constructed sequence is not a Hamilton cycle")
    return cert


# -- powers of cycles --------------------------------------------------------

@dataclass
class ConjectureReport:
    n: int
    k: int
    mode: str
    checked: int = 0
    unknown: int = 0
    counterexample: list | None = None
    short_circuit: str | None = None
    notes: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.counterexample is None

    def summary(self) -> str:
        if self.short_circuit:
            return f"n={self.n} k={self.k}: holds ({self.short_circuit})"
        if self.counterexample is not None:
            return f"n={self.n} k={self.k}: counterexample with edges {self.counterexample}"
        tail = f", {self.unknown} undecided" if self.unknown else ""
        return f"n={self.n} k={self.k} mode={self.mode}: no counterexample among {self.checked} graphs{tail}"


EXHAUSTIVE_EDGES = 30
MINIMAL_EDGES = 45


def _removable_sets(edges, budget, maximal_only):
    """Yield sets of edges to delete with each vertex losing at most budget[v]."""
    m = len(edges)
    left = budget.copy()
    chosen = []

    def maximal():
        return all(left[u] == 0 or left[v] == 0 or idx in chosen_set
                   for idx, (u, v) in enumerate(edges))

    chosen_set = set()

    def rec(i):
        if i == m:
            if not maximal_only or maximal():
                yield list(chosen)
            return
        u, v = edges[i]
        if left[u] > 0 and left[v] > 0:
            left[u] -= 1
            left[v] -= 1
            chosen.append(i)
            chosen_set.add(i)
            yield from rec(i + 1)
            chosen.pop()
            chosen_set.discard(i)
            left[u] += 1
            left[v] += 1
        yield from rec(i + 1)

    yield from rec(0)


def conjecture_check(n: int, k: int, mode: str = "exhaustive", seed=0, trials: int = 1000) -> ConjectureReport:
    """Search subgraphs H of C_n^k with min degree >= k+1 for a non-Hamiltonian one.

    mode: 'exhaustive' (every H), 'edge-minimal' (only H from which no edge can
    be removed; supersets of a Hamiltonian graph are Hamiltonian) or 'random'.
    """
    if n < 3 or not 1 <= k <= n / 2:
        raise ValueError("need n >= 3 and 1 <= k <= n/2")
    rep = ConjectureReport(n, k, mode)
    if k == 1:
        rep.short_circuit = "k=1: H must be C_n itself"
        return rep
    if k >= n / 2 - 1:
        rep.short_circuit = "k >= n/2 - 1: minimum degree >= n/2 (Dirac)"
        return rep
    if n > DP_BOUND:
        raise ScopeError(f"n={n} beyond the exact oracle bound {DP_BOUND}")
    C = power_of_cycle(n, k)
    edges = [tuple(e) for e in C.edges_list()]
    budget = C.degree - (k + 1)
    if mode == "exhaustive":
        if len(edges) > EXHAUSTIVE_EDGES:
            raise ScopeError(f"{len(edges)} edges exceeds the exhaustive budget {EXHAUSTIVE_EDGES}")
        source = _removable_sets(edges, budget.copy(), False)
    elif mode == "edge-minimal":
        if len(edges) > MINIMAL_EDGES:
            raise ScopeError(f"{len(edges)} edges exceeds the edge-minimal budget {MINIMAL_EDGES}")
        source = _removable_sets(edges, budget.copy(), True)
    elif mode == "random":
        rng = as_rng(seed)

        def sample():
            for _ in range(trials):
                left = budget.copy()
                out = []
                for i in rng.permutation(len(edges)):
                    u, v = edges[i]
                    if left[u] > 0 and left[v] > 0:
                        left[u] -= 1
                        left[v] -= 1
                        out.append(int(i))
                yield out
        source = sample()
    else:
        raise ValueError(f"unknown mode {mode!r}")
    E = np.array(edges, np.int64)
    for removed in source:
        keep = np.ones(len(edges), bool)
        keep[removed] = False
        H = Graph(n, E[keep], trusted=True)
        res = is_hamiltonian_exact(H)
        rep.checked += 1
        if res.status is None:
            rep.unknown += 1
        elif not res.status:
            rep.counterexample = [tuple(map(int, e)) for e in E[keep]]
            return rep
    rep.notes["edges"] = len(edges)
    return rep


def square_subgraphs(n: int):
    """Every subgraph of C_n^2 with minimum degree >= 3 (missing edges form a
    matching when n >= 5)."""
    C = power_of_cycle(n, 2)
    edges = [tuple(e) for e in C.edges_list()]
    budget = C.degree - 3
    E = np.array(edges, np.int64)
    for removed in _removable_sets(edges, budget.copy(), False):
        keep = np.ones(len(edges), bool)
        keep[removed] = False
        yield Graph(n, E[keep], trusted=True)


__all__ = ["ConjectureReport", "PreconditionError", "conjecture_check", "square_cycle_hamilton",
           "square_subgraphs"]
