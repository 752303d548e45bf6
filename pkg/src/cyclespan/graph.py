"""Simple graphs with dense edge indexing, G(n,p) sampling and the label coupling.

Vertices are ``0..n-1``.  Edges are unordered pairs ``(u, v)`` with ``u < v``,
indexed row-major over the upper triangle, so edge ``i`` is bit ``i`` of every
:class:`EdgeSubset` on that host.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .gf2 import Gf2Vector, bits_of

__all__ = [
    "LabeledGraph",
    "EdgeSubset",
    "CoupledSample",
    "HostMismatch",
    "gen_gnp",
    "gen_coupled",
    "slice_graph",
    "components",
    "cut_vector",
    "degree",
    "density_report",
    "bridges",
    "SpanningForest",
    "spanning_forest",
    "complete_graph",
    "cycle_graph",
    "path_graph",
    "star_graph",
    "read_graph",
    "write_graph",
]


class HostMismatch(ValueError):
    """Edge subsets from different host graphs were combined."""


Seed = int | Sequence[int]


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    n: int
    edges: tuple[tuple[int, int], ...]
    index: dict = field(init=False, repr=False)
    adj: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        idx = {}
        adj = [0] * self.n
        prev = (-1, -1)
        for i, (u, v) in enumerate(self.edges):
            if not (0 <= u < v < self.n):
                raise ValueError(f"bad edge {(u, v)} for n={self.n}")
            if (u, v) <= prev:
                raise ValueError("edges must be distinct and in row-major order")
            prev = (u, v)
            idx[(u, v)] = i
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        object.__setattr__(self, "index", idx)
        object.__setattr__(self, "adj", tuple(adj))

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "LabeledGraph":
        """Build from arbitrary pairs; normalises orientation and order."""
        es = set()
        for u, v in pairs:
            if u == v:
                raise ValueError(f"loop at {u}")
            es.add((u, v) if u < v else (v, u))
        return cls(n, tuple(sorted(es)))

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_index(self, u: int, v: int) -> int:
        return self.index[(u, v) if u < v else (v, u)]

    def has_edge(self, u: int, v: int) -> bool:
        return (self.adj[u] >> v) & 1 == 1

    def neighbors(self, v: int) -> list[int]:
        return bits_of(self.adj[v])

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adj]

    def star_bits(self, v: int) -> int:
        """Edge bitmask of the star at ``v`` (the cut of ``{v}``)."""
        x = 0
        for w in bits_of(self.adj[v]):
            x |= 1 << self.edge_index(v, w)
        return x

    def adjacency_matrix(self, dtype=np.float64) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=dtype)
        if self.edges:
            e = np.asarray(self.edges)
            A[e[:, 0], e[:, 1]] = 1
            A[e[:, 1], e[:, 0]] = 1
        return A

    def subset(self, edge_ids: Iterable[int] = ()) -> "EdgeSubset":
        return EdgeSubset(self, Gf2Vector.from_support(self.m, edge_ids))

    def subset_from_pairs(self, pairs: Iterable[tuple[int, int]]) -> "EdgeSubset":
        return self.subset(self.edge_index(u, v) for u, v in pairs)

    def full(self) -> "EdgeSubset":
        return EdgeSubset(self, Gf2Vector.ones(self.m))

    def __repr__(self) -> str:
        return f"LabeledGraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class EdgeSubset:
    """An element of the edge space of ``host``."""

    host: LabeledGraph
    vec: Gf2Vector

    def __post_init__(self):
        if self.vec.length != self.host.m:
            raise ValueError("vector length does not match host edge count")

    @property
    def bits(self) -> int:
        return self.vec.bits

    @property
    def weight(self) -> int:
        return self.vec.weight

    def __len__(self) -> int:
        return self.vec.weight

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return self.vec.support

    def pairs(self) -> list[tuple[int, int]]:
        return [self.host.edges[i] for i in self.vec.support]

    def degree(self, v: int) -> int:
        return (self.host.star_bits(v) & self.vec.bits).bit_count()

    def degrees(self) -> list[int]:
        d = [0] * self.host.n
        for u, v in self.pairs():
            d[u] += 1
            d[v] += 1
        return d

    def _same_host(self, other: "EdgeSubset") -> None:
        if other.host is not self.host:
            raise HostMismatch("edge subsets belong to different hosts")

    def __add__(self, other: "EdgeSubset") -> "EdgeSubset":
        self._same_host(other)
        return EdgeSubset(self.host, self.vec + other.vec)

    def __and__(self, other: "EdgeSubset") -> "EdgeSubset":
        self._same_host(other)
        return EdgeSubset(self.host, Gf2Vector(self.host.m, self.bits & other.bits))

    def reindex(self, new_host: LabeledGraph, strict: bool = False) -> "EdgeSubset":
        """Express this subset on ``new_host``; edges absent there are dropped.

        With ``strict=True`` a missing edge is an error instead.
        """
        ids = []
        for u, v in self.pairs():
            j = new_host.index.get((u, v))
            if j is None:
                if strict:
                    raise HostMismatch(f"edge {(u, v)} not in target host")
                continue
            ids.append(j)
        return new_host.subset(ids)


# ---------------------------------------------------------------------------
# Random graphs
# ---------------------------------------------------------------------------


def _entropy(seed: Seed) -> int | list[int]:
    if isinstance(seed, (int, np.integer)):
        return int(seed)
    return [int(s) for s in seed]


@dataclass(frozen=True)
class CoupledSample:
    """Uniform labels ``lambda_e`` on the pairs of K_n, generated row by row.

    Row ``u`` (pairs ``(u, v)``, ``v > u``) comes from its own child stream of
    the master seed, so labels never need to be stored and any slice is
    reproducible from ``(n, master_seed)``.
    """

    n: int
    master_seed: Seed

    def row(self, u: int) -> np.ndarray:
        ss = np.random.SeedSequence(_entropy(self.master_seed), spawn_key=(u,))
        return np.random.default_rng(ss).random(self.n - u - 1)

    def label(self, u: int, v: int) -> float:
        if u > v:
            u, v = v, u
        return float(self.row(u)[v - u - 1])

    def labels(self) -> np.ndarray:
        """All labels in edge-index order of K_n (materialises C(n,2) floats)."""
        if self.n < 2:
            return np.zeros(0)
        return np.concatenate([self.row(u) for u in range(self.n - 1)])


def gen_coupled(n: int, seed: Seed) -> CoupledSample:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return CoupledSample(n, seed)


def slice_graph(s: CoupledSample, p: float) -> LabeledGraph:
    """The graph ``{e : lambda_e < p}``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    edges: list[tuple[int, int]] = []
    if p > 0:
        for u in range(s.n - 1):
            hits = np.flatnonzero(s.row(u) < p)
            edges.extend((u, int(w) + u + 1) for w in hits)
    return LabeledGraph(s.n, tuple(edges))


def gen_gnp(n: int, p: float, seed: Seed) -> LabeledGraph:
    """G(n,p); identical to slicing the coupled labels of the same seed at ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    return slice_graph(gen_coupled(n, seed), p)


# ---------------------------------------------------------------------------
# Structure
# ---------------------------------------------------------------------------


def components(G: LabeledGraph) -> list[list[int]]:
    seen = 0
    out = []
    for s in range(G.n):
        if (seen >> s) & 1:
            continue
        comp = 1 << s
        frontier = 1 << s
        while frontier:
            nxt = 0
            for v in bits_of(frontier):
                nxt |= G.adj[v]
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        out.append(bits_of(comp))
    return out


def _vertex_mask(G: LabeledGraph, A: Iterable[int]) -> int:
    mask = 0
    for a in A:
        if not 0 <= a < G.n:
            raise ValueError(f"vertex {a} not in graph")
        mask |= 1 << a
    return mask


def cut_vector(G: LabeledGraph, A: Iterable[int]) -> EdgeSubset:
    """Edges with exactly one end in ``A``."""
    mask = _vertex_mask(G, A)
    bits = 0
    for i, (u, v) in enumerate(G.edges):
        if ((mask >> u) ^ (mask >> v)) & 1:
            bits |= 1 << i
    return EdgeSubset(G, Gf2Vector(G.m, bits))


def degree(G: LabeledGraph, v: int) -> int:
    return G.degree(v)


def density_report(G: LabeledGraph, S: Iterable[int], T: Iterable[int]) -> tuple[int, int]:
    """``(|edges between S and T|, |edges inside S|)``."""
    S, T = list(S), list(T)
    ms, mt = _vertex_mask(G, S), _vertex_mask(G, T)
    if ms & mt:
        raise ValueError("S and T overlap")
    between = sum((G.adj[s] & mt).bit_count() for s in S)
    inside = sum((G.adj[s] & ms).bit_count() for s in S) // 2
    return between, inside


@dataclass(frozen=True)
class SpanningForest:
    """BFS forest: ``parent[v]`` (-1 at roots), ``depth[v]``, tree-edge bitmask."""

    parent: tuple[int, ...]
    depth: tuple[int, ...]
    tree_bits: int
    n_components: int


def spanning_forest(G: LabeledGraph) -> SpanningForest:
    """BFS forest, each tree rooted at its component's highest-degree vertex."""
    parent = [-2] * G.n
    depth = [0] * G.n
    tree = 0
    order = sorted(range(G.n), key=lambda v: (-G.degree(v), v))
    c = 0
    for r in order:
        if parent[r] != -2:
            continue
        c += 1
        parent[r] = -1
        q = deque([r])
        while q:
            u = q.popleft()
            for w in bits_of(G.adj[u]):
                if parent[w] == -2:
                    parent[w] = u
                    depth[w] = depth[u] + 1
                    tree |= 1 << G.edge_index(u, w)
                    q.append(w)
    return SpanningForest(tuple(parent), tuple(depth), tree, c)


def bridges(G: LabeledGraph) -> set[int]:
    """Edge indices of all bridges (iterative lowlink DFS)."""
    disc = [-1] * G.n
    low = [0] * G.n
    out: set[int] = set()
    t = 0
    for root in range(G.n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = t
        t += 1
        stack = [(root, -1, iter(bits_of(G.adj[root])))]
        while stack:
            u, pe, it = stack[-1]
            advanced = False
            for w in it:
                e = G.edge_index(u, w)
                if e == pe:
                    continue
                if disc[w] == -1:
                    disc[w] = low[w] = t
                    t += 1
                    stack.append((w, e, iter(bits_of(G.adj[w]))))
                    advanced = True
                    break
                low[u] = min(low[u], disc[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                par = stack[-1][0]
                low[par] = min(low[par], low[u])
                if low[u] > disc[par]:
                    out.add(pe)
    return out


# ---------------------------------------------------------------------------
# Named graphs and file format
# ---------------------------------------------------------------------------


def complete_graph(n: int) -> LabeledGraph:
    return LabeledGraph(n, tuple((u, v) for u in range(n) for v in range(u + 1, n)))


def cycle_graph(n: int) -> LabeledGraph:
    return LabeledGraph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def path_graph(n_edges: int) -> LabeledGraph:
    return LabeledGraph.from_edges(n_edges + 1, ((i, i + 1) for i in range(n_edges)))


def star_graph(leaves: int) -> LabeledGraph:
    return LabeledGraph.from_edges(leaves + 1, ((0, i) for i in range(1, leaves + 1)))


def write_graph(G: LabeledGraph, path) -> None:
    """Plain text: ``n m`` then one ``u v`` line per edge in index order."""
    with open(path, "w") as fh:
        fh.write(f"{G.n} {G.m}\n")
        for u, v in G.edges:
            fh.write(f"{u} {v}\n")


def read_graph(path) -> LabeledGraph:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("first line must be 'n m'")
        n, m = int(header[0]), int(header[1])
        edges = []
        for line in fh:
            if line.strip():
                u, v = line.split()
                edges.append((int(u), int(v)))
    if len(edges) != m:
        raise ValueError(f"header says {m} edges, file has {len(edges)}")
    return LabeledGraph(n, tuple(edges))
