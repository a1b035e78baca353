"""Choice-averaged Dirichlet form on locally constant functions.

Functions of depth n are vectors indexed by the level-n vertices of a tree.
Each unoriented horizontal edge h = (x, y) contributes

    delta(h)^(s-2) * E[(f(X) - f(Y)) (g(X) - g(Y))]

where X, Y are the level-n cells reached by the random choice function from
x and y.  Choices below distinct incomparable vertices are independent, so
X and Y are independent with laws nu[. | x] and nu[. | y].  The factor 1/2
of the trace form and the two orientations of each edge cancel.

Reported eigenvalues are those of -Delta_s >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
import scipy.linalg

from .tree_structures import HorizontalEdge, LengthFunction, WordTree


class MeasureMismatchError(ValueError):
    pass


@dataclass
class FormMatrix:
    Q: np.ndarray
    M: np.ndarray
    cells: tuple
    s: float
    depth: int
    measure: dict  # vertex -> nu weight, every level up to depth
    tree: WordTree
    edges: tuple
    coefficients: tuple  # per edge: delta^(s-2) times scheme weight

    def value(self, f, g=None) -> float:
        f = np.asarray(f, dtype=float)
        g = f if g is None else np.asarray(g, dtype=float)
        return float(f @ self.Q @ g)

    def indicator(self, v) -> np.ndarray:
        """chi_v in the depth-n cell basis."""
        return np.array([1.0 if self.tree.precedes(v, w) else 0.0 for w in self.cells])


def measure_from_weights(tree: WordTree, weights: dict, depth: int) -> dict:
    nu = {tree.root: 1.0}
    for n in range(depth):
        for v in tree.levels[n]:
            kids = tree.children.get(v, ())
            if not kids:
                continue
            w = weights.get(v) if len(kids) > 1 else (1.0,)
            for c, p in zip(kids, w):
                nu[c] = nu[v] * p
    return nu


def weights_from_measure(tree: WordTree, measure: dict, depth: int) -> dict:
    out = {}
    for n in range(depth):
        for v in tree.levels[n]:
            kids = tree.children.get(v, ())
            if len(kids) > 1:
                out[v] = tuple(measure[c] / measure[v] for c in kids)
    return out


def _check_weights(tree, weights, measure, depth):
    for v, w in weights.items():
        if tree.level_of[v] >= depth:
            continue
        kids = tree.children[v]
        expect = [measure[c] / measure[v] for c in kids]
        if len(w) != len(kids) or any(abs(a - b) > 1e-9 for a, b in zip(w, expect)):
            raise MeasureMismatchError(f"choice weights at {tree.name(v)!r} disagree with the measure")


def edge_scheme_weights(tree: WordTree, edges, scheme: str = "plain") -> dict:
    """Weight per unoriented edge.  ``min-average`` spreads weight 1 over the
    C(k,2) sibling pairs of a k-branching vertex, i.e. the uniform average
    over the minimal (single-edge) schemes at that vertex."""
    out = {}
    for h in edges:
        if h.orientation < 0:
            continue
        if scheme == "min-average":
            k = len(tree.children[tree.parent[h.source]])
            out[h] = 2.0 / (k * (k - 1))
        else:
            out[h] = 1.0
    return out


def assemble_form(tree: WordTree, edges, delta: LengthFunction, s: float, depth: int,
                  measure: dict | None = None, weights: dict | None = None,
                  scheme: str = "plain") -> FormMatrix:
    if depth > tree.depth:
        raise ValueError("depth exceeds the tree depth")
    if measure is None and weights is None:
        raise ValueError("need a measure or product choice weights")
    if measure is None:
        measure = measure_from_weights(tree, weights, depth)
    elif weights is not None:
        _check_weights(tree, weights, measure, depth)
    cells = tuple(tree.levels[depth])
    idx = {w: i for i, w in enumerate(cells)}
    mass = np.array([measure[w] for w in cells], dtype=float)
    if np.any(mass <= 0):
        raise MeasureMismatchError("cylinder weights must be positive")

    def law(v):
        # distribution of the level-n cell reached from v
        p = np.zeros(len(cells))
        for w in tree.descendants(v, depth):
            p[idx[w]] = measure[w] / measure[v]
        return p

    laws = {}
    Q = np.zeros((len(cells), len(cells)))
    kept, coeffs = [], []
    for h, weight in edge_scheme_weights(tree, edges, scheme).items():
        if h.level > depth:
            continue  # both endpoints inside one level-n cell
        c = weight * h.length(delta) ** (s - 2)
        px = laws.get(h.source)
        if px is None:
            px = laws[h.source] = law(h.source)
        py = laws.get(h.range)
        if py is None:
            py = laws[h.range] = law(h.range)
        Q += c * (np.diag(px + py) - np.outer(px, py) - np.outer(py, px))
        kept.append(h)
        coeffs.append(c)
    Q = (Q + Q.T) / 2
    return FormMatrix(Q, np.diag(mass), cells, s, depth, measure, tree, tuple(kept), tuple(coeffs))


# ----------------------------------------------------------- eigensystem


@dataclass(frozen=True)
class VertexBlock:
    """The eigenvalues carried by a branching vertex: functions constant on
    its children, supported on it, with nu-mean zero."""

    vertex: object
    eigenvalues: tuple
    residual: float  # invariance defect of the block subspace


@dataclass
class EigenSystem:
    eigenvalues: np.ndarray
    vectors: np.ndarray  # columns, M-orthonormal
    blocks: tuple
    form: FormMatrix

    def labels(self, tol: float = 1e-8) -> list:
        """Branching vertex whose block produced each eigenvalue (None for
        the constant and unmatched values)."""
        pool = [(lam, b.vertex) for b in self.blocks for lam in b.eigenvalues]
        used = [False] * len(pool)
        out = []
        for lam in self.eigenvalues:
            hit = None
            for k, (mu, v) in enumerate(pool):
                if not used[k] and abs(mu - lam) <= tol * max(1.0, abs(lam)):
                    used[k] = True
                    hit = v
                    break
            out.append(hit)
        return out


def phi_candidate(form: FormMatrix, v, u, u2) -> np.ndarray:
    nu = form.measure
    return form.indicator(u) / nu[u] - form.indicator(u2) / nu[u2]


@dataclass(frozen=True)
class RayleighCheck:
    vertex: object
    eigenvalue: float
    residual: float


def rayleigh(form: FormMatrix, phi: np.ndarray) -> tuple:
    mphi = form.M @ phi
    lam = float(phi @ form.Q @ phi) / float(phi @ mphi)
    res = np.linalg.norm(form.Q @ phi - lam * mphi) / np.linalg.norm(mphi)
    return lam, float(res)


def phi_checks(form: FormMatrix) -> list:
    """Rayleigh quotient and residual of phi_v = chi_u/nu[u] - chi_u'/nu[u']
    for the first two children of every branching vertex above the cut."""
    out = []
    tree = form.tree
    for n in range(form.depth):
        for v in tree.levels[n]:
            kids = tree.children.get(v, ())
            if len(kids) < 2:
                continue
            lam, res = rayleigh(form, phi_candidate(form, v, kids[0], kids[1]))
            out.append(RayleighCheck(v, lam, res))
    return out


def vertex_block(form: FormMatrix, v) -> VertexBlock:
    kids = form.tree.children[v]
    base = np.array([form.indicator(u) / form.measure[u] for u in kids]).T
    # differences against the last child span the mean-zero functions
    B = base[:, :-1] - base[:, -1:]
    q = B.T @ form.Q @ B
    m = B.T @ form.M @ B
    vals, vecs = scipy.linalg.eigh(q, m)
    res = 0.0
    for lam, y in zip(vals, vecs.T):
        x = B @ y
        mx = form.M @ x
        res = max(res, float(np.linalg.norm(form.Q @ x - lam * mx) / np.linalg.norm(mx)))
    return VertexBlock(v, tuple(float(x) for x in vals), res)


def eigensystem(form: FormMatrix) -> EigenSystem:
    diag = np.diag(form.M)
    if np.any(diag <= 0):
        raise np.linalg.LinAlgError("singular mass matrix")
    vals, vecs = scipy.linalg.eigh(form.Q, form.M)
    vals = np.where(np.abs(vals) < 1e-14 * max(1.0, float(np.abs(vals).max())), 0.0, vals)
    blocks = []
    tree = form.tree
    for n in range(form.depth):
        for v in tree.levels[n]:
            if len(tree.children.get(v, ())) >= 2:
                blocks.append(vertex_block(form, v))
    return EigenSystem(vals, vecs, tuple(blocks), form)


# ------------------------------------------------------ Monte-Carlo oracle


@dataclass(frozen=True)
class MonteCarloForm:
    mean: np.ndarray
    stderr: np.ndarray
    samples: int


def monte_carlo_form(form: FormMatrix, samples: int = 100_000, seed: int = 0,
                     weights: dict | None = None, batch: int = 20_000) -> MonteCarloForm:
    """Average of the un-averaged form over sampled choice functions.

    Each sample draws, independently at every vertex above the cut, one
    child with probability weights[v] (default nu[child]/nu[v]), and
    evaluates sum_h c_h (e_X - e_Y)(e_X - e_Y)^T."""
    tree, depth = form.tree, form.depth
    weights = weights or weights_from_measure(tree, form.measure, depth)
    rng = np.random.default_rng(seed)
    idx = {w: i for i, w in enumerate(form.cells)}
    verts = [v for n in range(depth) for v in tree.levels[n]]
    vpos = {v: i for i, v in enumerate(verts)}
    size = len(form.cells)
    total = np.zeros((size, size))
    total_sq = np.zeros((size, size))
    done = 0
    while done < samples:
        k = min(batch, samples - done)
        pick = np.zeros((len(verts), k), dtype=np.int64)
        for v in verts:
            kids = tree.children.get(v, ())
            if len(kids) > 1:
                pick[vpos[v]] = rng.choice(len(kids), size=k, p=np.asarray(weights[v]) / sum(weights[v]))

        def reach(v):
            # level-n cell index reached from v, per sample
            out = np.full(k, -1, dtype=np.int64)
            frontier = [(v, np.arange(k))]
            while frontier:
                u, rows = frontier.pop()
                if tree.level_of[u] == depth:
                    out[rows] = idx[u]
                    continue
                kids = tree.children[u]
                if len(kids) == 1:
                    frontier.append((kids[0], rows))
                    continue
                choice = pick[vpos[u], rows]
                for j, c in enumerate(kids):
                    sel = rows[choice == j]
                    if len(sel):
                        frontier.append((c, sel))
            return out

        acc = np.zeros((k, size, size))
        for h, c in zip(form.edges, form.coefficients):
            x, y = reach(h.source), reach(h.range)
            r = np.arange(k)
            acc[r, x, x] += c
            acc[r, y, y] += c
            acc[r, x, y] -= c
            acc[r, y, x] -= c
        total += acc.sum(axis=0)
        total_sq += (acc ** 2).sum(axis=0)
        done += k
    mean = total / samples
    var = np.maximum(total_sq / samples - mean ** 2, 0.0)
    return MonteCarloForm(mean, np.sqrt(var / samples), samples)


# ----------------------------------------------------------- Weyl counting


@dataclass(frozen=True)
class WeylFit:
    exponent: float
    stderr: float
    table: tuple  # (lambda, count)


def counting_function(eigenvalues, lam: float) -> int:
    return int(np.sum(np.asarray(eigenvalues) < lam))


def weyl_count(spectra: dict, points: int = 40) -> WeylFit:
    """``spectra`` maps depth -> eigenvalues.  The counting function is
    taken from the deepest spectrum, restricted to the eigenvalue range that
    is already complete at the shallowest depth's largest value, and a
    log-log regression of N(lambda) on lambda gives the exponent."""
    depths = sorted(spectra)
    deep = np.sort(np.asarray(spectra[depths[-1]]))
    if len(deep) < 30:
        raise ValueError("too few eigenvalues for a Weyl fit (need >= 30)")
    positive = deep[deep > 0]
    lo = float(np.max(spectra[depths[0]]))
    hi = float(np.max(positive))
    if not lo < hi:
        lo = float(positive[0])
    grid = np.geomspace(lo, hi, points)
    counts = np.array([counting_function(deep, x) for x in grid], dtype=float)
    # only the range where shallower truncations already agree is reliable;
    # the upper end of the deepest spectrum is always incomplete
    top = len(grid) // 2 + 1
    x, y = np.log(grid[:top]), np.log(counts[:top])
    (slope, _), cov = np.polyfit(x, y, 1, cov=True)
    table = tuple((float(a), int(b)) for a, b in zip(grid, counts))
    return WeylFit(float(slope), float(math.sqrt(cov[0, 0])), table)


# ------------------------------------------------------ boundedness regimes


@dataclass(frozen=True)
class BoundednessReport:
    s: float
    depths: tuple
    max_eigenvalues: tuple
    relative_change: float  # over the last two depths
    regime: str  # "bounded" | "unbounded"


def boundedness_scan(build, s_values, depths, tol: float = 0.02) -> list:
    """``build(s, depth)`` returns a FormMatrix.  Plateau of the largest
    eigenvalue over the last two depths (relative change < tol) is read as
    the bounded regime."""
    out = []
    for s in s_values:
        tops = []
        for d in depths:
            vals = eigensystem(build(s, d)).eigenvalues
            tops.append(float(vals.max()))
        if tops[-1] == 0:
            change = 0.0
        else:
            change = abs(tops[-1] - tops[-2]) / abs(tops[-1])
        out.append(BoundednessReport(s, tuple(depths), tuple(tops), change,
                                     "bounded" if change < tol else "unbounded"))
    return out


# ----------------------------------------------------- Cuntz-Krieger check


@dataclass(frozen=True)
class RecursionReport:
    factor: float  # rho^(s-2) * lambda_PF
    offsets: dict  # edge id -> list of lambda(S_e v) - factor * lambda(v)
    spread: float  # largest spread of offsets within one edge family

    @property
    def consistent(self) -> bool:
        return self.spread < 1e-8


def cuntz_krieger_check(graph, form_deep: FormMatrix, rho: float, pf: float, depth: int) -> RecursionReport:
    """Self-similar recursion of the vertex-block eigenvalues.

    Prepending an edge e at the bottom of a path v (S_e v = (s(e), e, ...))
    multiplies cylinder weights by 1/lambda_PF and edge factors by
    rho^(s-2); hence every block eigenvalue satisfies
    lambda(S_e v) = rho^(s-2) lambda_PF lambda(v) + K(e).  The report lists
    the offsets K(e) per edge; they must not depend on v.
    """
    tree = form_deep.tree
    if tree.root != ():
        raise ValueError("the recursion needs a substitution path tree")
    s = form_deep.s
    factor = rho ** (s - 2) * pf
    offsets = {}
    for n in range(1, depth):
        for v in tree.levels[n]:
            if len(tree.children.get(v, ())) < 2:
                continue
            base = vertex_block(form_deep, v).eigenvalues
            for e in graph.edges:
                if e.range != v[0]:
                    continue
                sv = (e.source, e.id) + v[1:]
                if tree.level_of.get(sv, depth) >= depth:
                    continue
                lifted = vertex_block(form_deep, sv).eigenvalues
                offsets.setdefault(e.id, []).extend(
                    b - factor * a for a, b in zip(sorted(base), sorted(lifted)))
    spread = 0.0
    for vals in offsets.values():
        spread = max(spread, max(vals) - min(vals))
    return RecursionReport(factor, offsets, spread)
