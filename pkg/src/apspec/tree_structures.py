"""Rooted trees of words, horizontal edges, length and choice functions."""

from __future__ import annotations

from dataclasses import dataclass, field
import math
import random

from .symbolic_core import (
    LanguageOracle,
    complete_first_returns,
    is_privileged,
    privileged,
    privileged_order,
)


@dataclass
class WordTree:
    """Depth-truncated rooted tree.

    Vertices are hashable; for trees of words they are the words themselves
    (root ``""``), for path trees they are tuples of edge ids (root ``()``).
    Children lists are kept in a fixed order used for all tie-breaking.
    """

    levels: list
    parent: dict
    children: dict
    root: object
    depth: int
    label: object = None  # optional vertex -> str
    level_of: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.level_of:
            self.level_of = {v: n for n, lev in enumerate(self.levels) for v in lev}

    def name(self, v) -> str:
        if self.label is not None:
            return self.label(v)
        return v if v != "" else "ε"

    def is_truncated(self, v) -> bool:
        return self.level_of[v] >= self.depth

    def ancestors(self, v) -> list:
        """Root-to-v list of vertices (inclusive)."""
        out = [v]
        while out[-1] != self.root:
            out.append(self.parent[out[-1]])
        return out[::-1]

    def descendants(self, v, level: int) -> list:
        cur = [v]
        for _ in range(level - self.level_of[v]):
            cur = [c for u in cur for c in self.children[u]]
        return cur

    def precedes(self, w, v) -> bool:
        """w is an ancestor of v (w ≼ v)."""
        lw, lv = self.level_of[w], self.level_of[v]
        if lw > lv:
            return False
        while lv > lw:
            v = self.parent[v]
            lv -= 1
        return v == w

    def vertices(self):
        for lev in self.levels:
            yield from lev


def build_tree(oracle: LanguageOracle, depth: int) -> WordTree:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    levels = [tuple(oracle.factors(n)) for n in range(depth + 1)]
    parent = {}
    children = {w: [] for lev in levels for w in lev}
    for n in range(1, depth + 1):
        for w in levels[n]:
            parent[w] = w[:-1]
            children[w[:-1]].append(w)
    children = {k: tuple(v) for k, v in children.items()}
    return WordTree(levels, parent, children, "", depth)


def branching_number(tree: WordTree, v) -> int:
    """#children - 1 (0 for leaves of the truncated tree; check
    ``tree.is_truncated`` to tell the two apart)."""
    return max(len(tree.children.get(v, ())) - 1, 0)


# --------------------------------------------------------------- edges


@dataclass(frozen=True, order=True)
class HorizontalEdge:
    """An oriented horizontal edge.

    ``level`` is the level of the endpoints (privileged order for the
    privileged scheme).  ``scale`` is the argument of the length function:
    the level of the common parent for tree schemes, the word length of the
    common privileged word for the privileged scheme.
    """

    level: int
    source: object
    range: object
    orientation: int = 1  # +1 positive, -1 negative
    multiplicity_id: int = 0
    scale: int = -1

    def op(self) -> "HorizontalEdge":
        return HorizontalEdge(self.level, self.range, self.source, -self.orientation,
                              self.multiplicity_id, self.scale)

    def length(self, delta) -> float:
        return delta(self.scale if self.scale >= 0 else self.level - 1)


def _pair_edges(level, u, w, scale=-1):
    e = HorizontalEdge(level, u, w, 1, 0, level - 1 if scale < 0 else scale)
    return [e, e.op()]


def horizontal_edges(tree: WordTree, scheme: str, level_max: int, oracle: LanguageOracle | None = None) -> tuple:
    """Oriented edge set (both orientations) up to ``level_max``.

    ``max``: every pair of distinct siblings; ``min``: the first two
    children of each branching vertex; ``priv``: distinct complete first
    returns to a common privileged word, leveled by privileged order.
    """
    level_max = min(level_max, tree.depth)
    out = []
    if scheme in ("max", "maximal", "min", "minimal"):
        minimal = scheme.startswith("min")
        for n in range(level_max):
            for v in tree.levels[n]:
                kids = tree.children[v]
                if len(kids) < 2:
                    continue
                pairs = [(kids[0], kids[1])] if minimal else [
                    (kids[i], kids[j]) for i in range(len(kids)) for j in range(i + 1, len(kids))
                ]
                for u, w in pairs:
                    out.extend(_pair_edges(n + 1, u, w))
    elif scheme in ("priv", "privileged"):
        if oracle is None:
            raise ValueError("privileged scheme needs a language oracle")
        table = privileged(oracle, level_max - 1, tree.depth)
        for k, words in enumerate(table.levels):
            if k + 1 > level_max:
                break
            for u in words:
                ret = complete_first_returns(oracle, u, tree.depth).words
                for i in range(len(ret)):
                    for j in range(i + 1, len(ret)):
                        out.extend(_pair_edges(k + 1, ret[i], ret[j], len(u)))
    else:
        raise ValueError(f"unknown edge scheme {scheme!r}")
    return tuple(sorted(out, key=_edge_key(tree)))


def _edge_key(tree):
    order = {v: i for i, v in enumerate(tree.vertices())}
    return lambda e: (e.level, order.get(e.source, -1), order.get(e.range, -1), -e.orientation, e.multiplicity_id)


def edges_by_level(edges) -> dict:
    out = {}
    for e in edges:
        out.setdefault(e.level, []).append(e)
    return out


# -------------------------------------------------------- length functions


@dataclass(frozen=True)
class LengthFunction:
    kind: str = "reciprocal"  # reciprocal | geometric | sequence
    rho: float = 0.5
    values: tuple = ()

    def __post_init__(self):
        if self.kind == "geometric" and not 0 < self.rho < 1:
            raise ValueError("rho must lie in (0, 1)")
        if self.kind == "sequence":
            v = self.values
            if any(x <= 0 for x in v) or any(b >= a for a, b in zip(v, v[1:])):
                raise ValueError("length sequence must be positive and strictly decreasing")

    def __call__(self, n: int) -> float:
        if self.kind == "reciprocal":
            return 1.0 / (n + 1)
        if self.kind == "geometric":
            return self.rho ** n
        if self.kind == "sequence":
            if n >= len(self.values):
                raise IndexError(f"length sequence undefined at level {n}")
            return self.values[n]
        raise ValueError(self.kind)

    def log(self, n: int) -> float:
        """log delta(n), without underflow for deep geometric levels."""
        if self.kind == "geometric":
            return n * math.log(self.rho)
        return math.log(self(n))

    def describe(self) -> str:
        if self.kind == "reciprocal":
            return "delta(n) = 1/(n+1)"
        if self.kind == "geometric":
            return f"delta(n) = {self.rho:g}^n"
        return f"delta = sequence of {len(self.values)} values"

    @classmethod
    def parse(cls, text: str) -> "LengthFunction":
        text = text.strip()
        if text in ("recip", "reciprocal"):
            return cls("reciprocal")
        if text.startswith("geom:"):
            return cls("geometric", float(text[5:]))
        raise ValueError(f"cannot parse length function {text!r}")


RECIPROCAL = LengthFunction()


# --------------------------------------------------------- choice functions


@dataclass(frozen=True)
class ChoiceFunction:
    """Per-vertex successor selection; ``weights`` holds the probability
    of each child for weighted rules (used by the averaged forms)."""

    kind: str
    next: dict
    weights: dict | None = None


def make_choice(tree: WordTree, rule: str = "leftmost", assignment: dict | None = None,
                measure: dict | None = None, seed: int = 0) -> ChoiceFunction:
    nxt = {}
    weights = None
    if rule == "weighted":
        if measure is None:
            raise ValueError("weighted rule needs a measure")
        weights = {}
        rng = random.Random(seed)
    for v in tree.vertices():
        kids = tree.children.get(v, ())
        if not kids:
            continue
        if rule == "leftmost":
            nxt[v] = kids[0]
        elif rule == "rightmost":
            nxt[v] = kids[-1]
        elif rule == "enumerated":
            if len(kids) == 1:
                nxt[v] = kids[0]
                continue
            if assignment is None or v not in assignment:
                raise KeyError(f"enumerated choice has no entry for vertex {tree.name(v)!r}")
            if assignment[v] not in kids:
                raise ValueError(f"{assignment[v]!r} is not a child of {tree.name(v)!r}")
            nxt[v] = assignment[v]
        elif rule == "weighted":
            total = measure[v]
            w = tuple(measure[c] / total for c in kids)
            weights[v] = w
            nxt[v] = kids[_sample(rng, w)]
        else:
            raise ValueError(f"unknown choice rule {rule!r}")
    return ChoiceFunction(rule, nxt, weights)


def _sample(rng: random.Random, probs) -> int:
    x = rng.random()
    acc = 0.0
    for i, p in enumerate(probs):
        acc += p
        if x < acc:
            return i
    return len(probs) - 1


def uniform_weights(tree: WordTree) -> dict:
    out = {}
    for v in tree.vertices():
        kids = tree.children.get(v, ())
        if kids:
            out[v] = tuple(1 / len(kids) for _ in kids)
    return out


@dataclass(frozen=True)
class BoundaryPath:
    vertices: tuple

    @property
    def end(self):
        return self.vertices[-1]

    def __len__(self):
        return len(self.vertices) - 1


def evaluate_choice(tau: ChoiceFunction, tree: WordTree, v, depth: int | None = None) -> BoundaryPath:
    """Root-to-``depth`` path through v obtained by following ``next`` below v."""
    depth = tree.depth if depth is None else min(depth, tree.depth)
    path = tree.ancestors(v)
    while len(path) - 1 < depth and path[-1] in tau.next:
        path.append(tau.next[path[-1]])
    return BoundaryPath(tuple(path))


def path_from_word(tree: WordTree, w) -> BoundaryPath:
    return BoundaryPath(tuple(tree.ancestors(w)))


@dataclass(frozen=True)
class Meet:
    vertex: object
    level: int
    undistinguished: bool


def meet(xi: BoundaryPath, eta: BoundaryPath) -> Meet:
    n = 0
    m = min(len(xi.vertices), len(eta.vertices))
    while n < m and xi.vertices[n] == eta.vertices[n]:
        n += 1
    return Meet(xi.vertices[n - 1], n - 1, n == m)


def privileged_meet(xi: BoundaryPath, eta: BoundaryPath, oracle: LanguageOracle | None = None):
    """Greatest common privileged prefix of two word paths and its order."""
    a, b = xi.end, eta.end
    k = 0
    while k < min(len(a), len(b)) and a[k] == b[k]:
        k += 1
    common = a[:k]
    for m in range(len(common), -1, -1):
        if is_privileged(common[:m]):
            return common[:m], privileged_order(common[:m])
    return "", 0


def ultrametric(xi: BoundaryPath, eta: BoundaryPath, delta: LengthFunction) -> float:
    mt = meet(xi, eta)
    return 0.0 if mt.undistinguished else delta(mt.level)
