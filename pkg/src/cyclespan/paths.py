"""Path counts and internally disjoint path packings between vertex pairs.

``tau`` counts l-edge paths joining x and y; ``sigma`` is the largest set of
such paths that pairwise share no internal vertex, i.e. the independence
number of the conflict graph on the paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np
from scipy import sparse

from .gf2 import bits_of
from .graph import EdgeSubset, LabeledGraph

DEFAULT_PATH_CAP = 200_000
DEFAULT_NODE_CAP = 2_000


@dataclass(frozen=True)
class PathList:
    x: int
    y: int
    l: int
    paths: tuple[tuple[int, ...], ...]
    truncated: bool = False

    def internal(self, i: int) -> tuple[int, ...]:
        return self.paths[i][1:-1]

    def __len__(self) -> int:
        return len(self.paths)


@dataclass(frozen=True)
class ConflictGraph:
    """Paths as nodes; two paths conflict iff their internal vertex sets meet."""

    n_nodes: int
    adj: tuple[int, ...]

    @classmethod
    def from_paths(cls, plist: PathList, keep: Iterable[int] | None = None) -> "ConflictGraph":
        idx = list(range(len(plist))) if keep is None else list(keep)
        through: dict[int, int] = {}
        for j, i in enumerate(idx):
            for v in plist.internal(i):
                through[v] = through.get(v, 0) | 1 << j
        adj = []
        for j, i in enumerate(idx):
            a = 0
            for v in plist.internal(i):
                a |= through[v]
            adj.append(a & ~(1 << j))
        return cls(len(idx), tuple(adj))

    def is_independent(self, nodes: Iterable[int]) -> bool:
        nodes = list(nodes)
        return all(not (self.adj[a] >> b) & 1 for a, b in combinations(nodes, 2))


@dataclass(frozen=True)
class PathStats:
    tau: int
    sigma: int
    sigma_certified: bool
    packing: tuple[tuple[int, ...], ...] = field(default=(), compare=False)


def _check_pair(G: LabeledGraph, x: int, y: int) -> None:
    if x == y:
        raise ValueError("endpoints must differ")
    if not (0 <= x < G.n and 0 <= y < G.n):
        raise ValueError("endpoint outside the vertex set")


def enumerate_paths(G: LabeledGraph, x: int, y: int, l: int, cap: int = DEFAULT_PATH_CAP) -> PathList:
    """All x-y paths with l edges and distinct vertices, lexicographic in the internal sequence."""
    _check_pair(G, x, y)
    if l < 1:
        raise ValueError("l must be >= 1")
    adj = G.adj
    if l == 1:
        return PathList(x, y, 1, ((x, y),) if G.has_edge(x, y) else ())
    out: list[tuple[int, ...]] = []
    path = [x]
    stack = [iter(bits_of(adj[x] & ~(1 << x | 1 << y)))]
    vis = 1 << x | 1 << y
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            vis &= ~(1 << path.pop())
            continue
        if len(path) == l - 1:
            if (adj[nxt] >> y) & 1:
                out.append(tuple(path) + (nxt, y))
                if len(out) > cap:
                    return PathList(x, y, l, tuple(out[:cap]), True)
            continue
        path.append(nxt)
        vis |= 1 << nxt
        stack.append(iter(bits_of(adj[nxt] & ~vis)))
    return PathList(x, y, l, tuple(out))


def tau(G: LabeledGraph, x: int, y: int, l: int, cap: int = 10**9) -> tuple[int, bool]:
    """Number of l-edge x-y paths; the last internal vertex is counted by popcount."""
    _check_pair(G, x, y)
    if l < 1:
        raise ValueError("l must be >= 1")
    adj = G.adj
    if l == 1:
        return int(G.has_edge(x, y)), False
    target = adj[y]
    if l == 2:
        return (adj[x] & target & ~(1 << x | 1 << y)).bit_count(), False
    count = 0
    stack = [(x, 1 << x | 1 << y, 0)]
    while stack:
        cur, vis, depth = stack.pop()
        if depth == l - 2:
            count += (adj[cur] & target & ~vis).bit_count()
            if count > cap:
                return cap, True
            continue
        for w in bits_of(adj[cur] & ~vis):
            stack.append((w, vis | 1 << w, depth + 1))
    return count, False


# ---------------------------------------------------------------------------
# Maximum independent set
# ---------------------------------------------------------------------------


def _clique_cover_bound(adj, cand: int) -> int:
    """Greedy clique cover size of ``cand``: an upper bound on its independence number."""
    k = 0
    while cand:
        low = cand & -cand
        v = low.bit_length() - 1
        clique_cand = adj[v] & cand
        cand &= ~low
        while clique_cand:
            u_low = clique_cand & -clique_cand
            u = u_low.bit_length() - 1
            cand &= ~u_low
            clique_cand &= adj[u]
        k += 1
    return k


def max_independent_set(adj: tuple[int, ...], n: int) -> list[int]:
    """Exact maximum independent set by branch and bound on bitmasks."""
    def components_of(cand: int):
        while cand:
            seed = cand & -cand
            comp = seed
            frontier = seed
            while frontier:
                nb = 0
                for v in bits_of(frontier):
                    nb |= adj[v]
                frontier = nb & cand & ~comp
                comp |= frontier
            cand &= ~comp
            yield comp

    def solve(cand: int) -> list[int]:
        chosen: list[int] = []
        # isolated and degree-one vertices are always safe to take
        changed = True
        while changed:
            changed = False
            for v in bits_of(cand):
                if not (cand >> v) & 1:
                    continue
                if (adj[v] & cand).bit_count() <= 1:
                    chosen.append(v)
                    cand &= ~(adj[v] | 1 << v)
                    changed = True
        if not cand:
            return chosen
        comps = list(components_of(cand))
        if len(comps) > 1:
            for comp in comps:
                chosen.extend(solve(comp))
            return chosen
        return chosen + branch(cand)

    def branch(cand: int) -> list[int]:
        local_best: list[int] = []

        def rec(cand: int, cur: list[int]):
            # the exclude branch is a loop, so depth stays within the set size
            nonlocal local_best
            while cand:
                if len(cur) + _clique_cover_bound(adj, cand) <= len(local_best):
                    return
                v = max(bits_of(cand), key=lambda u: (adj[u] & cand).bit_count())
                cur.append(v)
                rec(cand & ~(adj[v] | 1 << v), cur)
                cur.pop()
                cand &= ~(1 << v)
            if len(cur) > len(local_best):
                local_best = list(cur)

        rec(cand, [])
        return local_best

    return sorted(solve((1 << n) - 1))


def greedy_independent_set(adj: tuple[int, ...], n: int) -> list[int]:
    """Repeatedly take a vertex of least remaining degree (a lower bound on alpha)."""
    cand = (1 << n) - 1
    out = []
    while cand:
        v = min(bits_of(cand), key=lambda u: ((adj[u] & cand).bit_count(), u))
        out.append(v)
        cand &= ~(adj[v] | 1 << v)
    return sorted(out)


def _pack(plist: PathList, keep: list[int], node_cap: int) -> tuple[int, bool, tuple]:
    if not keep:
        return 0, True, ()
    cg = ConflictGraph.from_paths(plist, keep)
    if cg.n_nodes <= node_cap and not plist.truncated:
        sel = max_independent_set(cg.adj, cg.n_nodes)
        cert = True
    else:
        sel = greedy_independent_set(cg.adj, cg.n_nodes)
        cert = False
    assert cg.is_independent(sel)
    return len(sel), cert, tuple(plist.paths[keep[j]] for j in sel)


def sigma(
    G: LabeledGraph,
    x: int,
    y: int,
    l: int,
    node_cap: int = DEFAULT_NODE_CAP,
    path_cap: int = DEFAULT_PATH_CAP,
) -> PathStats:
    """Largest collection of internally disjoint l-edge x-y paths.

    Exact when there are at most ``node_cap`` paths; otherwise a greedy packing
    (a lower bound) with ``sigma_certified=False``.
    """
    plist = enumerate_paths(G, x, y, l, path_cap)
    s, cert, packing = _pack(plist, list(range(len(plist))), node_cap)
    t = len(plist) if not plist.truncated else tau(G, x, y, l)[0]
    return PathStats(t, s, cert, packing)


def is_central(G: LabeledGraph, path: tuple[int, ...], S: EdgeSubset) -> bool:
    """Odd number of S-edges, at least one of them internal (touching neither end)."""
    k = len(path) - 1
    hits = 0
    internal_hit = False
    for i in range(k):
        e = G.edge_index(path[i], path[i + 1])
        if (S.bits >> e) & 1:
            hits += 1
            if 0 < i < k - 1:
                internal_hit = True
    return hits % 2 == 1 and internal_hit


def sigma_central(
    G: LabeledGraph,
    x: int,
    y: int,
    S: EdgeSubset,
    l: int,
    node_cap: int = DEFAULT_NODE_CAP,
    path_cap: int = DEFAULT_PATH_CAP,
) -> PathStats:
    """Like :func:`sigma` but only S-central paths may be packed."""
    if S.host is not G:
        raise ValueError("S must be indexed against G")
    plist = enumerate_paths(G, x, y, l, path_cap)
    keep = [i for i, P in enumerate(plist.paths) if is_central(G, P, S)]
    s, cert, packing = _pack(plist, keep, node_cap)
    return PathStats(len(keep), s, cert and not plist.truncated, packing)


# ---------------------------------------------------------------------------
# Pair sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairSet:
    """Pairs meeting a threshold; ``uncertified`` holds those decided from a greedy packing."""

    pairs: frozenset
    uncertified: frozenset = frozenset()


def path_scale(n: int, p: float, kappa: int) -> float:
    """n^(kappa-2) p^(kappa-1): the typical packing size of (kappa-1)-edge paths."""
    return n ** (kappa - 2) * p ** (kappa - 1)


def light_pairs(
    G: LabeledGraph,
    p: float,
    kappa: int,
    gamma: float,
    node_cap: int = DEFAULT_NODE_CAP,
    path_cap: int = DEFAULT_PATH_CAP,
) -> PairSet:
    """Pairs whose (kappa-1)-path packing is below ``gamma`` times the typical scale."""
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    thr = gamma * path_scale(G.n, p, kappa)
    pairs, unc = set(), set()
    for x, y in combinations(range(G.n), 2):
        st = sigma(G, x, y, kappa - 1, node_cap, path_cap)
        if st.sigma < thr:
            pairs.add((x, y))
            if not st.sigma_certified:
                unc.add((x, y))
    return PairSet(frozenset(pairs), frozenset(unc))


def r_set(
    G0: LabeledGraph,
    q: float,
    S: EdgeSubset,
    kappa: int,
    node_cap: int = DEFAULT_NODE_CAP,
    path_cap: int = DEFAULT_PATH_CAP,
    threshold: float | None = None,
) -> PairSet:
    """Pairs whose S-central (kappa-1)-path packing in G0 exceeds 0.25 n^(kappa-2) q^(kappa-1)."""
    thr = 0.25 * path_scale(G0.n, q, kappa) if threshold is None else threshold
    pairs, unc = set(), set()
    if S.weight == 0:
        return PairSet(frozenset())
    for x, y in combinations(range(G0.n), 2):
        st = sigma_central(G0, x, y, S, kappa - 1, node_cap, path_cap)
        if st.sigma > thr:
            pairs.add((x, y))
        elif not st.sigma_certified and st.tau > thr:
            unc.add((x, y))
    return PairSet(frozenset(pairs), frozenset(unc))


# ---------------------------------------------------------------------------
# Ropes
# ---------------------------------------------------------------------------


def count_ropes(G0: LabeledGraph, S: EdgeSubset, t: int, cap: int = 10**9) -> tuple[int, bool]:
    """Number of t-edge paths (distinct vertices) whose two terminal edges lie in S.

    Paths are grown from every oriented S-edge; the final step is a popcount
    against the S-neighbourhood, and each path is seen once per orientation.
    """
    if t < 2:
        raise ValueError("t must be >= 2")
    if S.host is not G0:
        raise ValueError("S must be indexed against G0")
    adj = G0.adj
    sadj = [0] * G0.n
    for u, v in S.pairs():
        sadj[u] |= 1 << v
        sadj[v] |= 1 << u
    total = 0
    for u, v in S.pairs():
        for a, b in ((u, v), (v, u)):
            # path a, b, ..., z, w with zw in S; t - 2 free steps after b
            stack = [(b, 1 << a | 1 << b, 1)]
            while stack:
                cur, vis, k = stack.pop()
                if k == t - 1:
                    total += (sadj[cur] & ~vis).bit_count()
                    continue
                for w in bits_of(adj[cur] & ~vis):
                    stack.append((w, vis | 1 << w, k + 1))
            if total > 2 * cap:
                return cap, True
    assert total % 2 == 0
    return total // 2, False


def s_degrees(G0: LabeledGraph, S: EdgeSubset) -> np.ndarray:
    f = np.zeros(G0.n)
    for u, v in S.pairs():
        f[u] += 1
        f[v] += 1
    return f


def rope_bound(G0: LabeledGraph, q: float, S: EdgeSubset, t: int) -> float:
    """Walk count f A^(t-2) f^T with f the S-degree vector; bounds the rope count.

    ``q`` is not used by the quadratic form itself; it is accepted so callers
    can pair the value with :func:`rope_terms`.
    """
    if t < 3:
        raise ValueError("t must be >= 3")
    f = s_degrees(G0, S)
    if not f.any():
        return 0.0
    e = np.asarray(G0.edges)
    A = sparse.coo_matrix((np.ones(2 * len(e)), (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])),
                          shape=(G0.n, G0.n)).tocsr()
    g = f.copy()
    for _ in range(t - 2):
        g = A @ g
    return float(f @ g)


def rope_terms(n: int, q: float, S_size: int, t: int) -> tuple[float, float, float]:
    """``(beta, beta^2 n^(t+1) q^t, beta n^(t/2+2) q^(t/2+1))`` with |S| = beta n^2 q / 2."""
    beta = 2 * S_size / (n * n * q)
    return beta, beta**2 * n ** (t + 1) * q**t, beta * n ** (t / 2 + 2) * q ** (t / 2 + 1)
