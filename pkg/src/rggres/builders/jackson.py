"""Cycles of length 2|A| in bipartite graphs (A, B) that cover A."""

from __future__ import annotations

import math

from ..graph import CycleCertificate, base_graph, verify_cycle
from .common import BuildFailure, ScopeError


def jackson_hypothesis(nbr: list[int], nA: int, nB: int, k: int | None = None) -> dict:
    """|A| in [2,k], |B| in [k, 2k-2], every A-degree >= k. With k=None the
    largest k making all three hold is used, if any."""
    mindeg = min((m.bit_count() for m in nbr), default=0)
    if k is None:
        lo = max(nA, math.ceil((nB + 2) / 2), 2)
        hi = min(nB, mindeg)
        k = hi if hi >= lo else None
    out = {"size_A": nA, "size_B": nB, "min_degree": mindeg, "k": k}
    if k is None:
        out.update(holds=False, violated="no k fits |A|, |B| and the A-degrees")
        return out
    checks = [("|A| in [2,k]", 2 <= nA <= k), ("|B| in [k,2k-2]", k <= nB <= 2 * k - 2),
              ("A-degrees >= k", mindeg >= k)]
    bad = [name for name, ok in checks if not ok]
    out.update(holds=not bad, violated=bad[0] if bad else None)
    return out


def _matchable(owners: list[int], free_b: int) -> bool:
    """Can each bitmask in owners pick a distinct bit of free_b? (Kuhn)"""
    match_of_b: dict[int, int] = {}

    def augment(i, seen):
        m = owners[i] & free_b
        while m:
            low = m & -m
            b = low.bit_length() - 1
            m ^= low
            if b in seen:
                continue
            seen.add(b)
            j = match_of_b.get(b)
            if j is None or augment(j, seen):
                match_of_b[b] = i
                return True
        return False

    return all(augment(i, set()) for i in range(len(owners)))


class _Search:
    def __init__(self, nbr: list[int], budget: int | None):
        self.nbr = nbr
        self.nA = len(nbr)
        self.budget = budget
        self.nodes = 0
        # A-side adjacency of each B index, as bitmasks over A
        nB = max((m.bit_length() for m in nbr), default=0)
        self.back = [0] * nB
        for a, m in enumerate(nbr):
            while m:
                low = m & -m
                self.back[low.bit_length() - 1] |= 1 << a
                m ^= low

    def run(self):
        start = min(range(self.nA), key=lambda a: self.nbr[a].bit_count())
        full_b = (1 << len(self.back)) - 1
        return self._extend([start], [], 1 << start, full_b)

    def _extend(self, path_a, path_b, used_a, free_b):
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise _Budget
        cur = path_a[-1]
        first = path_a[0]
        if used_a == (1 << self.nA) - 1:
            close = self.nbr[cur] & self.nbr[first] & free_b
            if close:
                b = (close & -close).bit_length() - 1
                return path_a, path_b + [b]
            return None
        rest = [a for a in range(self.nA) if not used_a >> a & 1]
        # every remaining link (cur -> next, ..., last -> first) needs its own b
        owners = [self.nbr[cur]] + [self.nbr[a] for a in rest]
        if self.budget is None:
            if not _matchable(owners, free_b):
                return None
        elif len(rest) + 1 > free_b.bit_count() or not all(m & free_b for m in owners):
            # large instances: cheap necessary condition only
            return None
        rest.sort(key=lambda a: (self.nbr[a] & free_b).bit_count())
        for nxt in rest:
            common = self.nbr[cur] & self.nbr[nxt] & free_b
            cands = []
            while common:
                low = common & -common
                b = low.bit_length() - 1
                common ^= low
                cands.append(b)
            cands.sort(key=lambda b: (self.back[b] & ~used_a).bit_count())
            for b in cands:
                out = self._extend(path_a + [nxt], path_b + [b], used_a | 1 << nxt, free_b & ~(1 << b))
                if out is not None:
                    return out
        return None


class _Budget(Exception):
    pass


def jackson_cycle(g, A, B, k: int | None = None, bound: int = 16,
                  budget: int = 200_000) -> CycleCertificate | BuildFailure:
    """Cycle a1 b1 a2 b2 ... covering every vertex of A, with b's from B.

    Exact depth-first search over A-orderings, pruned by a matching test on
    the links still to be placed. Up to ``bound`` A-vertices the search runs to
    completion; beyond that it stops after ``budget`` nodes with a ScopeError.
    """
    G = base_graph(g)
    A = [int(a) for a in A]
    B = [int(b) for b in B]
    if len(set(A)) != len(A) or len(set(B)) != len(B) or set(A) & set(B):
        raise ValueError("A and B must be disjoint lists of distinct vertices")
    bidx = {b: i for i, b in enumerate(B)}
    nbr = []
    for a in A:
        m = 0
        for w in G.neighbors(a).tolist():
            i = bidx.get(w)
            if i is not None:
                m |= 1 << i
        nbr.append(m)
    hyp = jackson_hypothesis(nbr, len(A), len(B), k)
    if len(A) < 2:
        return BuildFailure("jackson", "need at least two A-vertices", audits=hyp)
    search = _Search(nbr, None if len(A) <= bound else budget)
    try:
        found = search.run()
    except _Budget:
        raise ScopeError(f"search budget {budget} exhausted at |A|={len(A)} > {bound}") from None
    if found is None:
        why = "no cycle covering A" + ("" if hyp["holds"] else f" (hypothesis fails: {hyp['violated']})")
        return BuildFailure("jackson", why, audits=hyp)
    pa, pb = found
    seq = []
    for a, b in zip(pa, pb):
        seq += [A[a], B[b]]
    cert = CycleCertificate(tuple(seq), kind="jackson",
                            params={"k": hyp["k"]}, audits={"hypothesis": hyp["holds"], "nodes": search.nodes})
    if not verify_cycle(G, cert):
        return BuildFailure("verify", "cycle failed verification", audits=hyp)
    return cert
