"""Cycle, cut, even and H-spaces of a graph; T/Q membership; the minimiser F.

Large rank computations avoid the full edge space.  A cycle-space element is
determined by its restriction to the non-tree edges of a spanning forest, so
copies of an Eulerian H are projected onto those ``D = m - n + c`` coordinates
and ranked there.  Projected copies are first *peeled* (a row with a single
unresolved coordinate puts that unit vector in the span) and only the residue
goes through dense elimination.
"""

from __future__ import annotations

import bisect
import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import NamedTuple, Sequence

import numpy as np

from .gf2 import (
    EchelonBasis,
    Gf2Vector,
    _to_rref,
    bits_of,
    coset_max_weight,
    coset_min_weight,
    intersect,
    lex_less,
    nullspace,
    reduce_bits,
)
from .graph import EdgeSubset, LabeledGraph, bridges, components, spanning_forest

log = logging.getLogger(__name__)

DEFAULT_COPY_CAP = 5_000_000


class EnumerationTruncated(RuntimeError):
    """Copy enumeration hit its cap; a span over a partial list is meaningless."""


# ---------------------------------------------------------------------------
# Patterns
# ---------------------------------------------------------------------------


class HClass(enum.Enum):
    FULL_CYCLE = "C"
    EVEN_CYCLE = "C&D"
    FULL_EDGE = "E"
    EVEN_EDGE = "D"


@dataclass(frozen=True)
class HPattern:
    name: str
    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        norm = tuple(sorted((min(u, v), max(u, v)) for u, v in self.edges))
        if len(set(norm)) != len(norm) or any(u == v for u, v in norm):
            raise ValueError(f"{self.name}: pattern must be a simple graph")
        object.__setattr__(self, "edges", norm)

    @property
    def e_h(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        d = [0] * self.n_vertices
        for u, v in self.edges:
            d[u] += 1
            d[v] += 1
        return d

    @property
    def eulerian(self) -> bool:
        # even degrees only; connectivity is not required
        return all(x % 2 == 0 for x in self.degrees())

    @property
    def parity(self) -> int:
        return self.e_h % 2

    @property
    def cycle_length(self) -> int | None:
        """``k`` if the pattern is the cycle C_k (ignoring isolated vertices)."""
        d = [x for x in self.degrees() if x]
        if len(d) < 3 or any(x != 2 for x in d) or len(d) != self.e_h:
            return None
        g = LabeledGraph.from_edges(self.n_vertices, self.edges)
        nontrivial = [c for c in components(g) if len(c) > 1]
        return self.e_h if len(nontrivial) == 1 else None

    def as_graph(self) -> LabeledGraph:
        return LabeledGraph.from_edges(self.n_vertices, self.edges)


def cycle_pattern(k: int) -> HPattern:
    if k < 3:
        raise ValueError("cycles need at least 3 vertices")
    return HPattern(f"C{k}", k, tuple((i, (i + 1) % k) for i in range(k)))


def path_pattern(n_edges: int) -> HPattern:
    return HPattern(f"P{n_edges}", n_edges + 1, tuple((i, i + 1) for i in range(n_edges)))


def triangles_joined_by_path(path_edges: int) -> HPattern:
    """Two triangles whose apexes are joined by a path with ``path_edges`` edges."""
    e = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
    chain = [2] + list(range(6, 6 + path_edges - 1)) + [3]
    e += list(zip(chain, chain[1:]))
    return HPattern(f"2K3+P{path_edges}", 6 + path_edges - 1, tuple(e))


H_LIBRARY: dict[str, HPattern] = {
    "K2": HPattern("K2", 2, ((0, 1),)),
    "P2": path_pattern(2),
    "2K2": HPattern("2K2", 4, ((0, 1), (2, 3))),
    "P3": path_pattern(3),
    "K3": cycle_pattern(3),
    "C4": cycle_pattern(4),
    "C5": cycle_pattern(5),
    "K4": HPattern("K4", 4, tuple(combinations(range(4), 2))),
    "K13": HPattern("K13", 4, ((0, 1), (0, 2), (0, 3))),
    "K3+K2": HPattern("K3+K2", 5, ((0, 1), (1, 2), (0, 2), (3, 4))),
    "bowtie": HPattern("bowtie", 5, ((0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4))),
}


def classify_h(H: HPattern) -> HClass:
    if H.e_h < 1:
        raise ValueError("H must have at least one edge")
    if H.eulerian:
        return HClass.FULL_CYCLE if H.parity else HClass.EVEN_CYCLE
    return HClass.FULL_EDGE if H.parity else HClass.EVEN_EDGE


def m2(H: HPattern) -> Fraction:
    """2-density: max over subgraphs K with >= 3 vertices of (e_K - 1)/(v_K - 2).

    For a fixed vertex set the induced subgraph maximises the ratio, so only
    vertex subsets are enumerated.  Patterns above 10 vertices are refused.
    """
    v = H.n_vertices
    if v < 3:
        raise ValueError("m2 needs a pattern with at least 3 vertices")
    if v > 10:
        raise ValueError("m2 is exhaustive; patterns are limited to 10 vertices")
    best = None
    for k in range(3, v + 1):
        for U in combinations(range(v), k):
            s = set(U)
            e = sum(1 for a, b in H.edges if a in s and b in s)
            r = Fraction(e - 1, k - 2)
            if best is None or r > best:
                best = r
    return best


# ---------------------------------------------------------------------------
# Spaces
# ---------------------------------------------------------------------------


SPACE_TAGS = ("cycle", "cut", "even", "full", "h_space", "w_space", "h_perp", "cycle_perp")


@dataclass(frozen=True)
class SpaceBasis:
    host: LabeledGraph
    basis: EchelonBasis
    tag: str

    def __post_init__(self):
        if self.tag not in SPACE_TAGS:
            raise ValueError(f"unknown tag {self.tag!r}")
        if self.basis.ambient != self.host.m:
            raise ValueError("basis ambient must equal host edge count")

    @property
    def dim(self) -> int:
        return self.basis.rank

    def contains(self, x: EdgeSubset | Gf2Vector) -> bool:
        vec = x.vec if isinstance(x, EdgeSubset) else x
        if isinstance(x, EdgeSubset) and x.host is not self.host:
            raise ValueError("subset belongs to a different host")
        return self.basis.contains_bits(vec.bits)

    def subsets(self) -> list[EdgeSubset]:
        return [EdgeSubset(self.host, Gf2Vector(self.host.m, r)) for r in self.basis.rows]


def n_components(G: LabeledGraph) -> int:
    return len(components(G))


def fundamental_cycles(G: LabeledGraph) -> list[int]:
    """Edge bitmasks of the fundamental cycles of the BFS spanning forest."""
    f = spanning_forest(G)
    out = []
    for i, (u, v) in enumerate(G.edges):
        if (f.tree_bits >> i) & 1:
            continue
        out.append((1 << i) | _tree_path_bits(G, f, u, v))
    return out


def _tree_path_bits(G, f, u, v) -> int:
    x = 0
    par, dep = f.parent, f.depth
    while u != v:
        if dep[u] >= dep[v]:
            x |= 1 << G.edge_index(u, par[u])
            u = par[u]
        else:
            x |= 1 << G.edge_index(v, par[v])
            v = par[v]
    return x


def cycle_space(G: LabeledGraph) -> SpaceBasis:
    return SpaceBasis(G, reduce_bits(G.m, fundamental_cycles(G)), "cycle")


def cut_space(G: LabeledGraph) -> SpaceBasis:
    """Spanned by vertex stars; one star per component is redundant."""
    rows = []
    for comp in components(G):
        rows.extend(G.star_bits(v) for v in comp[1:])
    return SpaceBasis(G, reduce_bits(G.m, rows), "cut")


def even_space(G: LabeledGraph) -> SpaceBasis:
    rows = [(1 << i) | (1 << (i + 1)) for i in range(G.m - 1)]
    return SpaceBasis(G, reduce_bits(G.m, rows), "even")


def full_space(G: LabeledGraph) -> SpaceBasis:
    return SpaceBasis(G, reduce_bits(G.m, (1 << i for i in range(G.m))), "full")


def w_space(G: LabeledGraph, H: HPattern) -> SpaceBasis:
    """The natural value of the H-space of G, chosen by the class of H."""
    cls = classify_h(H)
    if cls is HClass.FULL_CYCLE:
        b = cycle_space(G).basis
    elif cls is HClass.EVEN_CYCLE:
        b = intersect(cycle_space(G).basis, even_space(G).basis)
    elif cls is HClass.FULL_EDGE:
        b = full_space(G).basis
    else:
        b = even_space(G).basis
    return SpaceBasis(G, b, "w_space")


def is_bipartite(G: LabeledGraph) -> bool:
    color = [-1] * G.n
    for s in range(G.n):
        if color[s] >= 0:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for w in bits_of(G.adj[u]):
                if color[w] < 0:
                    color[w] = color[u] ^ 1
                    stack.append(w)
                elif color[w] == color[u]:
                    return False
    return True


def w_dim(G: LabeledGraph, H: HPattern) -> int:
    """``dim w_space(G, H)`` without building the basis."""
    cls = classify_h(H)
    dc = G.m - G.n + n_components(G)
    if cls is HClass.FULL_CYCLE:
        return dc
    if cls is HClass.EVEN_CYCLE:
        # C & D has codimension 1 in C exactly when some cycle is odd
        return dc if is_bipartite(G) else dc - 1
    if cls is HClass.FULL_EDGE:
        return G.m
    return max(G.m - 1, 0)


# ---------------------------------------------------------------------------
# Copy enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CopyList:
    host: LabeledGraph
    copies: tuple[tuple[int, ...], ...]
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.copies)

    def bitmasks(self) -> list[int]:
        out = []
        for c in self.copies:
            x = 0
            for e in c:
                x |= 1 << e
            out.append(x)
        return out

    def subsets(self) -> list[EdgeSubset]:
        return [self.host.subset(c) for c in self.copies]


def _above(r: int) -> int:
    """Mask selecting vertices strictly greater than ``r`` (as a negative int)."""
    return -(2 << r)


def enumerate_cycles(G: LabeledGraph, k: int, cap: int = DEFAULT_COPY_CAP) -> CopyList:
    """All k-cycles, each once: rooted at its least vertex with v1 < v_{k-1}."""
    if k < 3:
        raise ValueError("k must be >= 3")
    adj, idx = G.adj, G.index
    out: list[tuple[int, ...]] = []

    def eid(a, b):
        return idx[(a, b) if a < b else (b, a)]

    for r in range(G.n):
        hi = adj[r] & _above(r)
        if hi.bit_count() < 2:
            continue
        for a in bits_of(hi):
            closers = hi & _above(a)
            if not closers:
                continue
            if k == 3:
                for b in bits_of(closers & adj[a]):
                    out.append(tuple(sorted((eid(r, a), eid(a, b), eid(r, b)))))
                if len(out) > cap:
                    return CopyList(G, tuple(out[:cap]), True)
                continue
            allowed = _above(r)
            path = [r, a]
            stack = [(a, 1 << r | 1 << a, iter(bits_of(adj[a] & allowed & ~(1 << r | 1 << a))))]
            while stack:
                cur, vis, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    stack.pop()
                    path.pop()
                    continue
                path.append(nxt)
                vis2 = vis | 1 << nxt
                if len(path) == k - 1:
                    for last in bits_of(adj[nxt] & closers & ~vis2):
                        cyc = path + [last]
                        out.append(tuple(sorted(eid(cyc[i], cyc[(i + 1) % k]) for i in range(k))))
                    path.pop()
                    if len(out) > cap:
                        return CopyList(G, tuple(out[:cap]), True)
                    continue
                stack.append((nxt, vis2, iter(bits_of(adj[nxt] & allowed & ~vis2))))
            path.clear()
    return CopyList(G, tuple(out), False)


def _pattern_order(H: HPattern) -> list[int]:
    """Vertex order for backtracking: BFS from the max-degree vertex, per component."""
    deg = H.degrees()
    nbr = [set() for _ in range(H.n_vertices)]
    for u, v in H.edges:
        nbr[u].add(v)
        nbr[v].add(u)
    order: list[int] = []
    seen: set[int] = set()
    for s in sorted(range(H.n_vertices), key=lambda x: -deg[x]):
        if s in seen or deg[s] == 0:
            continue
        seen.add(s)
        queue = [s]
        while queue:
            u = queue.pop(0)
            order.append(u)
            for w in sorted(nbr[u], key=lambda x: -deg[x]):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return order


def enumerate_copies(G: LabeledGraph, H: HPattern, cap: int = DEFAULT_COPY_CAP) -> CopyList:
    """Edge sets of all copies of H in G.

    Cycles use :func:`enumerate_cycles`; other patterns are found by
    backtracking over injective vertex maps (isolated pattern vertices are
    ignored) and deduplicated by edge set.
    """
    if cap <= 0:
        raise ValueError("cap must be positive")
    k = H.cycle_length
    if k is not None:
        return enumerate_cycles(G, k, cap)
    order = _pattern_order(H)
    if len(order) > G.n:
        return CopyList(G, (), False)
    hdeg = H.degrees()
    pos = {h: i for i, h in enumerate(order)}
    back = [[pos[w] for w in _pattern_nbrs(H, h) if pos[w] < i] for i, h in enumerate(order)]
    gdeg = G.degrees()
    edge_pairs = [(pos[u], pos[v]) for u, v in H.edges]
    seen: set[int] = set()
    out: list[tuple[int, ...]] = []
    img = [0] * len(order)
    full = (1 << G.n) - 1

    def rec(i: int, used: int) -> bool:
        if i == len(order):
            x = 0
            for a, b in edge_pairs:
                x |= 1 << G.edge_index(img[a], img[b])
            if x not in seen:
                seen.add(x)
                out.append(tuple(bits_of(x)))
                if len(out) > cap:
                    return False
            return True
        cand = full & ~used
        for j in back[i]:
            cand &= G.adj[img[j]]
        need = hdeg[order[i]]
        for g in bits_of(cand):
            if gdeg[g] < need:
                continue
            img[i] = g
            if not rec(i + 1, used | 1 << g):
                return False
        return True

    complete = rec(0, 0)
    if not complete:
        return CopyList(G, tuple(out[:cap]), True)
    return CopyList(G, tuple(out), False)


def _pattern_nbrs(H: HPattern, h: int) -> list[int]:
    return [v if u == h else u for u, v in H.edges if h in (u, v)]


# ---------------------------------------------------------------------------
# Ranks
# ---------------------------------------------------------------------------


@dataclass
class _Projection:
    """Coordinates of the cycle space on non-tree edges."""

    coord: list[int]  # edge -> non-tree coordinate or -1
    dim: int


def _projection(G: LabeledGraph) -> _Projection:
    f = spanning_forest(G)
    coord = [-1] * G.m
    d = 0
    for i in range(G.m):
        if not (f.tree_bits >> i) & 1:
            coord[i] = d
            d += 1
    return _Projection(coord, d)


@dataclass
class _PeelResult:
    rank: int
    solved: bytearray
    residual: dict[int, int]  # pivot table over unsolved coordinates


def _peel_rank(rows: Sequence[Sequence[int]], dim: int, target: int | None = None) -> _PeelResult:
    """Rank of sparse GF(2) rows given as coordinate lists (duplicates cancel)."""
    norm = []
    for r in rows:
        s = set()
        for c in r:
            s ^= {c}
        if s:
            norm.append(tuple(s))
    solved = bytearray(dim)
    occ: list[list[int]] = [[] for _ in range(dim)]
    live = [len(r) for r in norm]
    queue = []
    for i, r in enumerate(norm):
        for c in r:
            occ[c].append(i)
        if len(r) == 1:
            queue.append(i)
    rank = 0
    while queue:
        i = queue.pop()
        if live[i] != 1:
            continue
        c = next(c for c in norm[i] if not solved[c])
        solved[c] = 1
        rank += 1
        if target is not None and rank >= target:
            return _PeelResult(rank, solved, {})
        for j in occ[c]:
            live[j] -= 1
            if live[j] == 1:
                queue.append(j)
    piv: dict[int, int] = {}
    for i, r in enumerate(norm):
        if live[i] < 2:
            continue
        x = 0
        for c in r:
            if not solved[c]:
                x |= 1 << c
        while x:
            low = (x & -x).bit_length() - 1
            y = piv.get(low)
            if y is None:
                piv[low] = x
                rank += 1
                break
            x ^= y
        if target is not None and rank >= target:
            break
    return _PeelResult(rank, solved, piv)


def _projected_rows(copies: CopyList, proj: _Projection) -> list[list[int]]:
    co = proj.coord
    return [[co[e] for e in c if co[e] >= 0] for c in copies.copies]


def h_space(G: LabeledGraph, H: HPattern, cap: int = DEFAULT_COPY_CAP) -> SpaceBasis:
    copies = enumerate_copies(G, H, cap)
    if copies.truncated:
        raise EnumerationTruncated(f"more than {cap} copies of {H.name}")
    return SpaceBasis(G, reduce_bits(G.m, copies.bitmasks()), "h_space")


def h_dim(G: LabeledGraph, H: HPattern, cap: int = DEFAULT_COPY_CAP, copies: CopyList | None = None) -> int:
    """``dim h_space(G, H)``; Eulerian patterns are ranked in projected coordinates."""
    if copies is None:
        copies = enumerate_copies(G, H, cap)
    if copies.truncated:
        raise EnumerationTruncated(f"more than {cap} copies of {H.name}")
    if H.eulerian:
        proj = _projection(G)
        return _peel_rank(_projected_rows(copies, proj), proj.dim).rank
    return reduce_bits(G.m, copies.bitmasks()).rank


def h_perp(G: LabeledGraph, H: HPattern, cap: int = DEFAULT_COPY_CAP) -> SpaceBasis:
    return SpaceBasis(G, nullspace(h_space(G, H, cap).basis), "h_perp")


def cycle_perp(G: LabeledGraph) -> SpaceBasis:
    return SpaceBasis(G, nullspace(cycle_space(G).basis), "cycle_perp")


# ---------------------------------------------------------------------------
# Q and T
# ---------------------------------------------------------------------------


def _edge_on_cycle(G: LabeledGraph, x: int, y: int, k: int) -> bool:
    """Is there an x-y path with k-1 edges and distinct vertices?"""
    adj = G.adj
    if k == 3:
        return (adj[x] & adj[y]) != 0
    target = adj[y]
    # choose u1..u_{k-3}; the last internal vertex comes from a bitmask test
    stack = [(x, 1 << x | 1 << y, 0)]
    while stack:
        cur, vis, depth = stack.pop()
        if depth == k - 3:
            if adj[cur] & target & ~vis:
                return True
            continue
        for w in bits_of(adj[cur] & ~vis):
            stack.append((w, vis | 1 << w, depth + 1))
    return False


def uncovered_edges(G: LabeledGraph, k: int) -> list[int]:
    """Indices of edges lying on no k-cycle."""
    return [i for i, (u, v) in enumerate(G.edges) if not _edge_on_cycle(G, u, v, k)]


def in_Q(G: LabeledGraph, H: HPattern | int, cap: int = DEFAULT_COPY_CAP) -> bool:
    """Nonempty, every edge in a copy of H, and (H non-Eulerian) every vertex
    of odd degree in some copy.  An int ``H`` means the cycle C_H."""
    if G.m == 0:
        return False
    if isinstance(H, int):
        H = cycle_pattern(H)
    k = H.cycle_length
    if k is not None:
        return all(_edge_on_cycle(G, u, v, k) for u, v in G.edges)
    copies = enumerate_copies(G, H, cap)
    if copies.truncated:
        raise EnumerationTruncated(f"more than {cap} copies of {H.name}")
    covered = 0
    odd_somewhere = 0
    for c in copies.copies:
        for e in c:
            covered |= 1 << e
        if not H.eulerian:
            par = 0
            for e in c:
                u, v = G.edges[e]
                par ^= 1 << u | 1 << v
            odd_somewhere |= par
    if covered != (1 << G.m) - 1:
        return False
    if not H.eulerian and odd_somewhere != (1 << G.n) - 1:
        return False
    return True


def _assert_in_w(G: LabeledGraph, H: HPattern, copies: CopyList) -> None:
    cls = classify_h(H)
    for c in copies.copies:
        if cls in (HClass.FULL_CYCLE, HClass.EVEN_CYCLE):
            deg: dict[int, int] = {}
            for e in c:
                for v in G.edges[e]:
                    deg[v] = deg.get(v, 0) ^ 1
            assert not any(deg.values()), "copy of Eulerian H is not in the cycle space"
        if cls in (HClass.EVEN_CYCLE, HClass.EVEN_EDGE):
            assert len(c) % 2 == 0, "copy of even H is not in the even space"


def in_T(G: LabeledGraph, H: HPattern | int, cap: int = DEFAULT_COPY_CAP) -> bool:
    """Do the copies of H span the natural space W_H(G)?"""
    if isinstance(H, int):
        H = cycle_pattern(H)
    wd = w_dim(G, H)
    if wd == 0:
        return True
    k = H.cycle_length
    if k is not None and k % 2 == 1:
        # an uncovered non-bridge edge is by itself in the perp of the
        # k-space but is not a cut
        unc = uncovered_edges(G, k)
        if unc and set(unc) - bridges(G):
            return False
    copies = enumerate_copies(G, H, cap)
    if copies.truncated:
        raise EnumerationTruncated(f"more than {cap} copies of {H.name}")
    _assert_in_w(G, H, copies)
    if H.eulerian:
        proj = _projection(G)
        r = _peel_rank(_projected_rows(copies, proj), proj.dim, target=wd).rank
    else:
        r = reduce_bits(G.m, copies.bitmasks()).rank
    assert r <= wd
    return r == wd


# ---------------------------------------------------------------------------
# The minimiser F
# ---------------------------------------------------------------------------


class FResult(NamedTuple):
    F: EdgeSubset
    certified: bool


@dataclass
class _Syndromes:
    """Per-edge data for membership tests in k-perp and cut space."""

    copies_of: list[list[int]]
    khash: list[int]
    zcol: list[int]
    n_copies: int


def _syndromes(G: LabeledGraph, copies: CopyList, seed: int) -> _Syndromes:
    rng = np.random.default_rng(seed)
    tags = [int(t) for t in rng.integers(1, 2**63, size=len(copies), dtype=np.int64)]
    copies_of: list[list[int]] = [[] for _ in range(G.m)]
    khash = [0] * G.m
    for ci, c in enumerate(copies.copies):
        for e in c:
            copies_of[e].append(ci)
            khash[e] ^= tags[ci]
    f = spanning_forest(G)
    zcol = [0] * G.m
    t = 0
    for i, (u, v) in enumerate(G.edges):
        if (f.tree_bits >> i) & 1:
            continue
        bit = 1 << t
        t += 1
        zcol[i] |= bit
        for e in bits_of(_tree_path_bits(G, f, u, v)):
            zcol[e] |= bit
    return _Syndromes(copies_of, khash, zcol, len(copies))


def _in_kperp(syn: _Syndromes, edges: Sequence[int]) -> bool:
    par: dict[int, int] = {}
    for e in edges:
        for c in syn.copies_of[e]:
            par[c] = par.get(c, 0) ^ 1
    return not any(par.values())


def _small_weight_search(G, syn: _Syndromes, budget: int) -> tuple[int | None, int]:
    """Lightest, then lex-least, member of k-perp minus cut space, by exhaustion.

    Returns ``(bits, w)``: ``bits`` is the minimiser if one of weight ``w`` was
    found, otherwise ``None`` with every weight below ``w`` ruled out.
    """
    m = G.m
    buckets: dict[int, list[int]] = {}
    for e in range(m):
        buckets.setdefault(syn.khash[e], []).append(e)
    spent = 0
    w = 1
    while w <= m:
        n_prefix = comb(m, w - 1)
        if spent + n_prefix > budget:
            return None, w
        spent += n_prefix
        for prefix in combinations(range(m), w - 1):
            h = 0
            z = 0
            for e in prefix:
                h ^= syn.khash[e]
                z ^= syn.zcol[e]
            lst = buckets.get(h)
            if not lst:
                continue
            last = prefix[-1] if prefix else -1
            for k in lst[bisect.bisect_right(lst, last):]:
                if z ^ syn.zcol[k] == 0:
                    continue
                sup = prefix + (k,)
                if _in_kperp(syn, sup):
                    x = 0
                    for e in sup:
                        x |= 1 << e
                    return x, w
        w += 1
    return None, w


def _perp_reps(G: LabeledGraph, copies: CopyList) -> list[int]:
    """Lifts of a basis of the annihilator of the projected k-space.

    Each rep is supported on non-tree edges; together with the cut space they
    span k-perp, and no nonzero combination of reps is a cut.
    """
    proj = _projection(G)
    peel = _peel_rank(_projected_rows(copies, proj), proj.dim)
    free = [c for c in range(proj.dim) if not peel.solved[c]]
    # annihilator of the residual rows inside the unsolved coordinates
    B = _to_basis(proj.dim, peel.residual)
    null = nullspace(B).rows
    unsolved_mask = 0
    for c in free:
        unsolved_mask |= 1 << c
    coord_to_edge = {c: e for e, c in enumerate(proj.coord) if c >= 0}
    reps = []
    for y in null:
        if y & ~unsolved_mask:
            continue
        x = 0
        for c in bits_of(y):
            x |= 1 << coord_to_edge[c]
        reps.append(x)
    # the null space of B restricted to unsolved coordinates has this dimension
    assert len(reps) == len(free) - len(peel.residual), "annihilator dimension mismatch"
    return reps


def _to_basis(dim: int, piv: dict[int, int]) -> EchelonBasis:
    return _to_rref(dim, dict(piv))


def _vertex_flip_descent(G: LabeledGraph, x: int) -> int:
    """Add stars while some vertex has more than half its edges in ``x``."""
    stars = [G.star_bits(v) for v in range(G.n)]
    deg = G.degrees()
    improved = True
    while improved:
        improved = False
        for v in range(G.n):
            if 2 * (x & stars[v]).bit_count() > deg[v]:
                x ^= stars[v]
                improved = True
    return x


def find_F(
    G: LabeledGraph,
    kappa: int,
    exact_dim_cap: int = 24,
    copy_cap: int = DEFAULT_COPY_CAP,
    weight_budget: int = 2_000_000,
    coset_budget: int = 1 << 26,
    seed: int = 0,
) -> FResult:
    """Smallest member of k-perp(G) minus cut space, or empty if G is in T.

    Among minimisers the lexicographically least support wins.  Exact routes,
    tried in order: (1) exhaustive search over supports by increasing weight
    while the number of candidate prefixes stays within ``weight_budget``;
    (2) enumeration of all nontrivial cosets of the cut space inside k-perp
    when its dimension and the cut dimension allow.  Otherwise the result is a
    heuristic (information-set search plus vertex-flip descent) and is
    returned uncertified.
    """
    if kappa < 3 or kappa % 2 == 0:
        raise ValueError("find_F is defined for odd kappa >= 3")
    empty = G.subset()
    if G.m == 0:
        return FResult(empty, True)
    # fast path: an uncovered non-bridge edge has weight 1, the least possible
    unc = uncovered_edges(G, kappa)
    if unc:
        br = bridges(G)
        for e in unc:
            if e not in br:
                return FResult(G.subset([e]), True)
    H = cycle_pattern(kappa)
    copies = enumerate_cycles(G, kappa, copy_cap)
    if copies.truncated:
        raise EnumerationTruncated(f"more than {copy_cap} {kappa}-cycles")
    if in_T(G, H, copy_cap):
        return FResult(empty, True)

    syn = _syndromes(G, copies, seed)
    bits, w_lo = _small_weight_search(G, syn, weight_budget)
    if bits is not None:
        return FResult(EdgeSubset(G, Gf2Vector(G.m, bits)), True)

    reps = _perp_reps(G, copies)
    cut = cut_space(G).basis
    d = len(reps)
    if d == 0:
        raise AssertionError("G is not in T but k-perp equals the cut space")
    exact = cut.rank <= exact_dim_cap and ((1 << d) - 1) * (1 << cut.rank) <= coset_budget
    best: int | None = None
    if exact:
        cur = 0
        for i in range(1, 1 << d):
            cur ^= reps[(i & -i).bit_length() - 1]
            vec, cert = coset_min_weight(cut, Gf2Vector(G.m, cur), exact_dim_cap)
            assert cert
            x = vec.bits
            if best is None or x.bit_count() < best.bit_count() or (
                x.bit_count() == best.bit_count() and lex_less(x, best)
            ):
                best = x
        assert best.bit_count() >= w_lo
        return FResult(EdgeSubset(G, Gf2Vector(G.m, best)), True)

    log.info("find_F: heuristic search (n=%d, m=%d, d=%d)", G.n, G.m, d)
    rng = np.random.default_rng(seed)
    starts = list(reps[:32])
    for _ in range(min(32, max(0, (1 << min(d, 20)) - len(starts)))):
        mask = int(rng.integers(1, 1 << min(d, 62)))
        x = 0
        for j in bits_of(mask):
            x ^= reps[j]
        starts.append(x)
    for i, s in enumerate(starts):
        vec, _ = coset_min_weight(cut, Gf2Vector(G.m, s), exact_dim_cap=-1, restarts=8, seed=seed + i)
        x = _vertex_flip_descent(G, vec.bits)
        if best is None or x.bit_count() < best.bit_count() or (
            x.bit_count() == best.bit_count() and lex_less(x, best)
        ):
            best = x
    return FResult(EdgeSubset(G, Gf2Vector(G.m, best)), False)


def check_F(G: LabeledGraph, kappa: int, F: EdgeSubset, copies: CopyList | None = None) -> dict:
    """Membership, exclusion and half-degree checks for a claimed minimiser."""
    if copies is None:
        copies = enumerate_cycles(G, kappa)
    bits = F.bits
    in_perp = all((bits & m).bit_count() % 2 == 0 for m in copies.bitmasks())
    not_cut = any((bits & z).bit_count() % 2 for z in fundamental_cycles(G))
    dF = F.degrees()
    half_deg = all(2 * dF[v] <= G.degree(v) for v in range(G.n))
    return {"in_kperp": in_perp, "not_cut": not_cut, "half_degree": half_deg}


def coset_extremes(G: LabeledGraph, L: EdgeSubset, exact_dim_cap: int = 24):
    """Smallest and largest members of ``L + cut space`` (certified flags included)."""
    cut = cut_space(G).basis
    lo, c1 = coset_min_weight(cut, L.vec, exact_dim_cap)
    hi, c2 = coset_max_weight(cut, L.vec, exact_dim_cap)
    return EdgeSubset(G, lo), EdgeSubset(G, hi), c1 and c2

