"""Substitution graphs, their path trees and self-similar edge data.

Graph convention.  For every letter r and every position i in sigma(r)
there is one edge e with

    s(e) = sigma(r)[i]   (the tile that occurs)
    r(e) = r             (the supertile it occurs in)

so a path e1 e2 ... climbs from a tile to ever larger supertiles.  The graph
matrix is A[v, w] = #{edges with source v and range w} = |sigma(w)|_v: column
sums are image lengths and A^n[v, w] counts paths of n edges from v to w.

A vertex of the path tree is the tuple ``(v, e1, ..., em)``: a start letter
followed by a composable edge sequence; the root is ``()``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
import math
import unicodedata

import numpy as np

from .qfield import QElement, field_for_discriminant
from .symbolic_core import Substitution, is_primitive_matrix, substitution_matrix
from .tree_structures import ChoiceFunction, HorizontalEdge, WordTree

_DOT = "̇"


@dataclass(frozen=True)
class GraphEdge:
    id: int
    source: str
    range: str
    position: int
    image: str

    def label(self) -> str:
        i = self.position
        return unicodedata.normalize("NFC", self.image[: i + 1] + _DOT + self.image[i + 1:])


@dataclass(frozen=True)
class SubstitutionGraph:
    subst: Substitution
    edges: tuple

    @property
    def vertices(self) -> tuple:
        return self.subst.alphabet

    @property
    def matrix(self) -> np.ndarray:
        idx = {a: i for i, a in enumerate(self.vertices)}
        m = np.zeros((len(idx), len(idx)), dtype=np.int64)
        for e in self.edges:
            m[idx[e.source], idx[e.range]] += 1
        return m

    def out_edges(self, v) -> tuple:
        return tuple(e for e in self.edges if e.source == v)

    def edge(self, label_or_id):
        if isinstance(label_or_id, int):
            return self.edges[label_or_id]
        want = unicodedata.normalize("NFC", label_or_id)
        for e in self.edges:
            if e.label() == want:
                return e
        raise KeyError(label_or_id)


def build_substitution_graph(subst: Substitution) -> SubstitutionGraph:
    edges = []
    for r in subst.alphabet:
        img = subst.rule[r]
        for i, c in enumerate(img):
            edges.append(GraphEdge(len(edges), c, r, i, img))
    return SubstitutionGraph(subst, tuple(edges))


# ------------------------------------------------------------------ paths


def path_end(graph: SubstitutionGraph, path: tuple):
    """r(path) for a tree vertex (v, e1, ..., em)."""
    return graph.edges[path[-1]].range if len(path) > 1 else path[0]


def paths(graph: SubstitutionGraph, n_edges: int) -> list:
    """All vertices (v, e1, ..., en) of the path tree at n_edges edges."""
    cur = [(v,) for v in graph.vertices]
    for _ in range(n_edges):
        cur = [p + (e.id,) for p in cur for e in graph.out_edges(path_end(graph, p))]
    return cur


def path_counts(graph: SubstitutionGraph, n_edges: int) -> np.ndarray:
    """Enumerated number of paths with n_edges edges from v to w."""
    idx = {a: i for i, a in enumerate(graph.vertices)}
    m = np.zeros((len(idx), len(idx)), dtype=np.int64)
    for p in paths(graph, n_edges):
        m[idx[p[0]], idx[path_end(graph, p)]] += 1
    return m


def path_label(graph: SubstitutionGraph, path: tuple) -> str:
    if not path:
        return "ε"
    if len(path) == 1:
        return path[0]
    return " ".join(graph.edges[e].label() for e in path[1:])


def build_path_tree(graph: SubstitutionGraph, depth: int) -> WordTree:
    """Tree of paths: level 0 the root, level 1 the letters, level m+1 the
    paths with m edges."""
    levels = [((),), tuple((v,) for v in graph.vertices)]
    parent = {(v,): () for v in graph.vertices}
    for _ in range(depth - 1):
        nxt = []
        for p in levels[-1]:
            for e in graph.out_edges(path_end(graph, p)):
                q = p + (e.id,)
                parent[q] = p
                nxt.append(q)
        levels.append(tuple(nxt))
    children = {v: [] for lev in levels for v in lev}
    for q, p in parent.items():
        children[p].append(q)
    children = {k: tuple(v) for k, v in children.items()}
    return WordTree(levels, parent, children, (), depth, label=lambda p: path_label(graph, p))


# ------------------------------------------------------ fundamental edges


@dataclass(frozen=True)
class FundamentalEdges:
    pairs: tuple  # ordered pairs of edge ids, symmetric
    flavor: str = "transverse"

    def unordered(self) -> tuple:
        return tuple(p for p in self.pairs if p[0] < p[1])


def make_fundamental(graph: SubstitutionGraph, pairs, flavor="transverse") -> FundamentalEdges:
    ids = []
    for a, b in pairs:
        ea = graph.edge(a) if not isinstance(a, GraphEdge) else a
        eb = graph.edge(b) if not isinstance(b, GraphEdge) else b
        if ea.id == eb.id:
            raise ValueError("a fundamental pair needs two distinct edges")
        if flavor == "transverse" and ea.source != eb.source:
            raise ValueError(f"edges {ea.label()} and {eb.label()} do not share a source")
        if flavor == "longitudinal" and ea.range != eb.range:
            raise ValueError(f"edges {ea.label()} and {eb.label()} do not share a range")
        ids.append((ea.id, eb.id))
        ids.append((eb.id, ea.id))
    return FundamentalEdges(tuple(sorted(set(ids))), flavor)


def maximal_fundamental(graph: SubstitutionGraph, flavor="transverse") -> FundamentalEdges:
    key = (lambda e: e.source) if flavor == "transverse" else (lambda e: e.range)
    pairs = [(a.id, b.id) for a in graph.edges for b in graph.edges
             if a.id != b.id and key(a) == key(b)]
    return FundamentalEdges(tuple(sorted(pairs)), flavor)


def condition_c(graph: SubstitutionGraph, fundamental: FundamentalEdges) -> bool:
    """Same-source edges are linked by chains of fundamental pairs."""
    for v in graph.vertices:
        group = [e.id for e in graph.out_edges(v)]
        if len(group) < 2:
            continue
        seen = {group[0]}
        stack = [group[0]]
        while stack:
            x = stack.pop()
            for a, b in fundamental.pairs:
                if a == x and b not in seen:
                    seen.add(b)
                    stack.append(b)
        if not set(group) <= seen:
            return False
    return True


def lift_edges(graph: SubstitutionGraph, fundamental: FundamentalEdges, n: int) -> tuple:
    """Lift every fundamental pair along every path gamma with n edges whose
    end is the common source.

    Edges carry the tree level of their endpoints, n + 2.  Their length is
    rho**(n + 1): the index of H_{n+1} in the edge count #H_n."""
    out = []
    for g in paths(graph, n):
        end = path_end(graph, g)
        for a, b in fundamental.pairs:
            if graph.edges[a].source == end:
                out.append(HorizontalEdge(n + 2, g + (a,), g + (b,), 1 if a < b else -1, 0, n + 1))
    return tuple(out)


def fundamental_counts(graph: SubstitutionGraph, fundamental: FundamentalEdges, oriented=False) -> np.ndarray:
    """n_w: number of fundamental pairs with common source w."""
    idx = {a: i for i, a in enumerate(graph.vertices)}
    nv = np.zeros(len(idx), dtype=np.int64)
    for a, b in fundamental.pairs:
        if oriented or a < b:
            nv[idx[graph.edges[a].source]] += 1
    return nv


def count_H_n(graph: SubstitutionGraph, fundamental: FundamentalEdges, n: int, oriented=False) -> int:
    """#H_n = sum_{v,w} A^{n-1}[v, w] n_w (exact integers)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a = graph.matrix.astype(object)
    vec = fundamental_counts(graph, fundamental, oriented).astype(object)
    for _ in range(n - 1):
        vec = a.dot(vec)
    return int(sum(vec))


def count_H_n_enumerated(graph, fundamental, n, oriented=False) -> int:
    lifted = lift_edges(graph, fundamental, n - 1)
    return len(lifted) if oriented else sum(1 for e in lifted if e.orientation > 0)


class NotDiagonalizableError(ValueError):
    pass


@dataclass(frozen=True)
class EdgeCountDecomposition:
    """#H_n = sum_j C_j * lambda_j**n for n >= 1, plus corrections that
    vanish for n >= 2 (from zero eigenvalues)."""

    coefficients: tuple
    eigenvalues: tuple
    exact: bool
    first_term_correction: object = 0

    def value(self, n: int):
        total = sum(c * lam**n for c, lam in zip(self.coefficients, self.eigenvalues))
        if n == 1:
            total = total + self.first_term_correction
        return total


def edge_count_decomposition(graph: SubstitutionGraph, fundamental: FundamentalEdges,
                             oriented=False) -> EdgeCountDecomposition:
    a = graph.matrix
    nv = fundamental_counts(graph, fundamental, oriented)
    ones = np.ones(len(nv), dtype=np.int64)
    if a.shape == (2, 2):
        tr = int(a[0, 0] + a[1, 1])
        det = int(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
        disc = tr * tr - 4 * det
        r = math.isqrt(disc) if disc >= 0 else -1
        if disc > 0 and r * r != disc and a[0, 1] != 0 and det != 0:
            field, root = field_for_discriminant(disc)
            coeffs, lams = [], []
            for sign in (1, -1):
                lam = (field(tr) + root * sign) / 2
                right = (field(int(a[0, 1])), lam - int(a[0, 0]))
                left = (field(int(a[1, 0])), lam - int(a[0, 0]))
                pair = left[0] * right[0] + left[1] * right[1]
                c = (right[0] + right[1]) * (left[0] * int(nv[0]) + left[1] * int(nv[1])) / (pair * lam)
                coeffs.append(c)
                lams.append(lam)
            return EdgeCountDecomposition(tuple(coeffs), tuple(lams), True)
    vals, right = np.linalg.eig(a.astype(float))
    if np.linalg.matrix_rank(right) < len(vals) or np.linalg.cond(right) > 1e10:
        raise NotDiagonalizableError(
            "graph matrix is not diagonalizable: the zeta function has higher order poles"
        )
    left = np.linalg.inv(right)  # rows are left eigenvectors with left_j . right_j = 1
    coeffs, lams = [], []
    correction = 0.0
    for j, lam in enumerate(vals):
        weight = (ones @ right[:, j]) * (left[j, :] @ nv)
        if abs(lam) < 1e-12:
            correction += weight
            continue
        coeffs.append(weight / lam)
        lams.append(lam)
    order = np.argsort([-abs(x) for x in lams], kind="stable")
    coeffs = [_real_if_close(coeffs[i]) for i in order]
    lams = [_real_if_close(lams[i]) for i in order]
    return EdgeCountDecomposition(tuple(coeffs), tuple(lams), False, _real_if_close(correction))


def _real_if_close(x):
    x = complex(x)
    return x.real if abs(x.imag) < 1e-12 else x


# ------------------------------------------------------ self-similar choice


class NoLoopError(ValueError):
    pass


@dataclass(frozen=True)
class SelfSimilarChoice:
    loop: int  # id of the one-edge loop epsilon*
    step: dict  # vertex -> id of the edge chosen from that vertex

    def tau_hat(self, graph: SubstitutionGraph, edge_id: int) -> int:
        return self.step[graph.edges[edge_id].range]


def self_similar_choice(graph: SubstitutionGraph, loop=None) -> SelfSimilarChoice:
    loops = [e for e in graph.edges if e.source == e.range]
    if not loops:
        raise NoLoopError("substitution graph has no one-edge loop; pass to a power of the substitution")
    if loop is None:
        star = loops[0]
    else:
        star = graph.edge(loop) if not isinstance(loop, GraphEdge) else loop
        if star.source != star.range:
            raise NoLoopError(f"{star.label()} is not a one-edge loop")
    target = star.source
    # BFS distances to the loop vertex along edge direction
    dist = {target: 0}
    queue = deque([target])
    while queue:
        x = queue.popleft()
        for e in graph.edges:
            if e.range == x and e.source not in dist:
                dist[e.source] = dist[x] + 1
                queue.append(e.source)
    if set(dist) != set(graph.vertices):
        raise ValueError("substitution graph is not strongly connected")
    step = {}
    for v in graph.vertices:
        if v == target:
            step[v] = star.id
        else:
            step[v] = min((e for e in graph.out_edges(v) if dist[e.range] < dist[v]), key=lambda e: e.id).id
    return SelfSimilarChoice(star.id, step)


def embed(graph: SubstitutionGraph, choice: SelfSimilarChoice, path: tuple, depth: int) -> tuple:
    """Extend a path (v, e1, ..., em) to ``depth`` edges by iterating tau-hat."""
    if not path:
        path = (graph.edges[choice.loop].source,)
    path = tuple(path)
    while len(path) - 1 < depth:
        path = path + (choice.step[path_end(graph, path)],)
    return path


def self_similar_choice_function(graph: SubstitutionGraph, choice: SelfSimilarChoice, tree: WordTree) -> ChoiceFunction:
    nxt = {(): (graph.edges[choice.loop].source,)}
    for v in tree.vertices():
        if v and tree.children.get(v):
            nxt[v] = v + (choice.step[path_end(graph, v)],)
    return ChoiceFunction("selfsim", nxt)


# ------------------------------------------------------------ 1-d geometry


@dataclass(frozen=True)
class TileGeometry1D:
    graph: SubstitutionGraph
    lengths: dict
    theta: object
    offsets: dict  # edge id -> offset of s(e) inside sigma(r(e)), unscaled tile units
    exact: bool


def tile_geometry(graph: SubstitutionGraph) -> TileGeometry1D:
    """Tile lengths from the left PF eigenvector, shortest tile = 1."""
    m = substitution_matrix(graph.subst)
    if not is_primitive_matrix(m):
        raise ValueError("not primitive")
    alpha = graph.vertices
    exact = False
    if m.shape == (2, 2):
        tr = int(m[0, 0] + m[1, 1])
        det = int(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
        disc = tr * tr - 4 * det
        r = math.isqrt(disc)
        if r * r != disc:
            field, root = field_for_discriminant(disc)
            theta = (field(tr) + root) / 2
            # left eigenvector l with l M = theta l: l = (M10, theta - M00)
            vec = [field(int(m[1, 0])), theta - int(m[0, 0])]
            smallest = min(vec, key=float)
            lengths = {alpha[i]: vec[i] / smallest for i in range(2)}
            exact = True
    if not exact:
        vals, vecs = np.linalg.eig(m.T.astype(float))
        i = int(np.argmax(vals.real))
        theta = float(vals[i].real)
        vec = np.abs(vecs[:, i].real)
        vec = vec / vec.min()
        lengths = {a: float(x) for a, x in zip(alpha, vec)}
    offsets = {}
    for e in graph.edges:
        off = 0 if exact else 0.0
        for c in e.image[: e.position]:
            off = off + lengths[c]
        offsets[e.id] = off
    return TileGeometry1D(graph, lengths, theta, offsets, exact)


def supertile_offset(geom: TileGeometry1D, path: tuple):
    """Offset of the bottom tile of (v, e1..em) inside its level-m supertile."""
    total = 0 if geom.exact else 0.0
    scale = 1 if geom.exact else 1.0
    for e in path[1:]:
        total = total + scale * geom.offsets[e]
        scale = scale * geom.theta
    return total


@dataclass(frozen=True)
class ReturnVector:
    merge_level: int
    merge_vertex: str
    vector: object


class NonMergingError(ValueError):
    pass


def return_vector(graph, geom: TileGeometry1D, choice: SelfSimilarChoice, pair, depth: int = 64) -> ReturnVector:
    """Translation from the tile of the first path to that of the second once
    both are embedded and sit in a common supertile.

    ``pair`` is either two edge ids with a common source, or two tree
    vertices (v, e1..em) with the same start letter.
    """
    a, b = pair
    if isinstance(a, int):
        ea, eb = graph.edges[a], graph.edges[b]
        if a == b:
            raise ValueError("a pair needs two distinct edges")
        pa, pb = (ea.source, a), (eb.source, b)
    else:
        pa, pb = tuple(a), tuple(b)
    if pa == pb:
        raise ValueError("a pair needs two distinct paths")
    if pa[0] != pb[0]:
        raise ValueError("paths must start at the same tile")
    ta = embed(graph, choice, pa, depth)
    tb = embed(graph, choice, pb, depth)
    merge = None
    for k in range(1, depth + 1):
        if ta[k:] == tb[k:]:
            merge = k - 1
            break
    if merge is None or merge < 1:
        raise NonMergingError(f"paths do not merge within depth {depth}")
    vec = supertile_offset(geom, tb[: merge + 1]) - supertile_offset(geom, ta[: merge + 1])
    return ReturnVector(merge, path_end(graph, ta[: merge + 1]), vec)


def microtile_vector(graph, geom: TileGeometry1D, pair, gamma_length: int = 0):
    """Translation between the two microtiles of a pair of edges sharing a
    range, rescaled by theta^-(1 + gamma_length) (decomposition depth)."""
    a, b = pair
    ea, eb = graph.edges[a], graph.edges[b]
    if a == b:
        raise ValueError("a pair needs two distinct edges")
    if ea.range != eb.range:
        raise ValueError("microtile pairs must share a range")
    diff = geom.offsets[b] - geom.offsets[a]
    return diff / geom.theta ** (1 + gamma_length)


def microtile_offset(geom: TileGeometry1D, down_path) -> object:
    """Offset of the microtile reached by a downward edge sequence e1, e2, ...
    with s(e_i) = r(e_{i+1}), relative to the top tile r(e1)."""
    total = 0 if geom.exact else 0.0
    scale = geom.theta
    for e in down_path:
        total = total + geom.offsets[e] / scale
        scale = scale * geom.theta
    return total


def two_pair_fundamental(graph: SubstitutionGraph) -> FundamentalEdges:
    """Two fundamental pairs for the squared Fibonacci graph, (bȧ, bȧa) and
    (ḃa, ḃaa).  Condition (C) fails for it since baȧ is linked to nothing."""
    return make_fundamental(graph, [("bȧ", "bȧa"), ("ḃa", "ḃaa")])
