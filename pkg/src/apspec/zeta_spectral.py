"""Dirac spectra, zeta functions, metric dimensions and spectral measures."""

from __future__ import annotations

from dataclasses import dataclass
import cmath
import math
import warnings

import numpy as np

from .qfield import QElement
from .sft_selfsimilar import (
    EdgeCountDecomposition,
    FundamentalEdges,
    SubstitutionGraph,
    edge_count_decomposition,
    path_end,
)
from .symbolic_core import (
    LanguageOracle,
    NotPrimitiveError,
    complexity_profile,
    is_primitive_matrix,
    substitution_matrix,
)
from .tree_structures import LengthFunction, WordTree, branching_number


@dataclass(frozen=True)
class DiracSpectrum:
    """Per level: (length, number of oriented edges).  |D| has eigenvalue
    1/length with that multiplicity."""

    levels: tuple  # ((level, length, multiplicity), ...)

    def multiplicity(self, level: int) -> int:
        for lev, _, m in self.levels:
            if lev == level:
                return m
        return 0


def dirac_spectrum(edges, delta: LengthFunction) -> DiracSpectrum:
    by_scale = {}
    for e in edges:
        if e.multiplicity_id:
            raise ValueError("multi-edges belong to K-homology data, not to a spectral triple")
        by_scale[e.scale if e.scale >= 0 else e.level - 1] = by_scale.get(e.scale if e.scale >= 0 else e.level - 1, 0) + 1
    entries = []
    for k in sorted(by_scale):
        length = delta(k)
        if length <= 0:
            raise ValueError("edge lengths must be positive")
        entries.append((k, length, by_scale[k]))
    return DiracSpectrum(tuple(entries))


@dataclass(frozen=True)
class PartialZeta:
    value: float
    tail_bound: float  # math.inf when divergent or unknown
    tail_known: bool


def partial_zeta(spectrum: DiracSpectrum, s: float, N: int | None = None, unoriented=False,
                 decomposition: EdgeCountDecomposition | None = None, rho: float | None = None) -> PartialZeta:
    """Truncated trace of |D|^-s over scales <= N.  Passing the unoriented
    edge-count decomposition of a self-similar triple attaches a geometric
    tail bound (scale n carries #H_n edges of length rho^n)."""
    if isinstance(s, complex):
        raise TypeError("the truncated series is evaluated at real s only")
    total = 0.0
    top = -1
    for lev, length, m in spectrum.levels:
        if N is not None and lev > N:
            break
        total += m * length ** s
        top = lev
    if unoriented:
        total /= 2
    if decomposition is None or rho is None:
        return PartialZeta(total, math.inf, False)
    bound = 0.0
    factor = 1 if unoriented else 2
    for c, lam in zip(decomposition.coefficients, decomposition.eigenvalues):
        q = abs(_to_complex(lam)) * rho ** s
        if q >= 1 - 1e-12:
            return PartialZeta(total, math.inf, True)
        bound += factor * abs(_to_complex(c)) * q ** (top + 1) / (1 - q)
    return PartialZeta(total, bound, True)


def zeta_k_tree(tree: WordTree, k: int, delta: LengthFunction, N: int, s: float) -> float:
    """sum over vertices of level < N of a(v)^k delta(|v|)^s with 0^0 = 0."""
    total = 0.0
    for n in range(min(N, tree.depth)):
        for v in tree.levels[n]:
            a = branching_number(tree, v)
            if a:
                total += a ** k * delta(n) ** s
    return total


def zeta_max(tree, delta, N, s):
    return (zeta_k_tree(tree, 1, delta, N, s) + zeta_k_tree(tree, 2, delta, N, s)) / 2


def zeta_min(tree, delta, N, s):
    return zeta_k_tree(tree, 0, delta, N, s)


def tree_level_weights(oracle: LanguageOracle, n_max: int) -> np.ndarray:
    """sum of a(v) over level-n vertices of the tree of words, n = 0..n_max-1,
    read off the complexity profile (each factor extends to the right)."""
    p = complexity_profile(oracle, n_max)
    return np.diff(p.astype(np.int64))


def _to_complex(x) -> complex:
    return complex(float(x)) if isinstance(x, QElement) else complex(x)


# ------------------------------------------------------- abscissa estimate


@dataclass(frozen=True)
class AbscissaEstimate:
    limsup: float
    least_squares: float
    error: float
    divergent: bool
    warning: str | None

    @property
    def value(self) -> float:
        return math.inf if self.divergent else self.limsup


def estimate_abscissa(counts, lengths, window: float = 0.5) -> AbscissaEstimate:
    """Abscissa of sum_n counts[n] * lengths[n]^s.

    The limsup estimator is max over the last ``window`` fraction of levels
    of log(cumulative count)/(-log length); the regression estimator fits the
    slope of log(cumulative count) against -log length on the same window.
    """
    return _abscissa_from_logs(counts, -np.log(np.asarray(lengths, dtype=float)), window)


def _abscissa_from_logs(counts, neg_log_lengths, window: float = 0.5) -> AbscissaEstimate:
    counts = np.asarray(counts, dtype=float)
    if len(counts) < 8:
        raise ValueError("window too small: need at least 8 levels")
    cum = np.cumsum(counts)
    keep = (cum > 0) & (neg_log_lengths > 0)
    idx = np.nonzero(keep)[0]
    if len(idx) < 8:
        raise ValueError("window too small: too few levels with positive counts")
    start = idx[int(len(idx) * (1 - window))]
    sel = idx[idx >= start]
    x = neg_log_lengths[sel]
    y = np.log(cum[sel])
    ratios = y / x
    lim = float(ratios.max())
    slope = float(np.polyfit(x, y, 1)[0])
    # exponential growth against polynomial lengths: the ratio keeps climbing
    divergent = bool(np.all(np.diff(ratios) > 0)) and slope > 1.5 * lim
    err = abs(lim - slope)
    warn = None
    if err > 0.05:
        warn = f"limsup ({lim:.4f}) and regression ({slope:.4f}) estimates differ by {err:.3f}"
        warnings.warn(warn, RuntimeWarning, stacklevel=3)
    return AbscissaEstimate(lim, slope, err, divergent, warn)


def tree_abscissa(oracle: LanguageOracle, depth: int, delta: LengthFunction | None = None) -> AbscissaEstimate:
    """Abscissa of the tree-of-words zeta (zeta_1 weights) up to ``depth``."""
    delta = delta or LengthFunction()
    w = tree_level_weights(oracle, depth)
    neg_log = np.array([-delta.log(n) for n in range(len(w))])
    return _abscissa_from_logs(w, neg_log)


# ------------------------------------------------------------ closed form


@dataclass(frozen=True)
class ZetaClosedForm:
    """zeta(z) = sum_j C_j / (1 - lambda_j rho^z) + h(z) with h entire.

    Here h(z) = -sum_j C_j + correction * rho^z, where ``correction`` is
    nonzero only when the graph matrix has a zero eigenvalue.
    """

    coefficients: tuple
    eigenvalues: tuple
    rho: float
    exact: bool
    correction: complex = 0.0
    oriented: bool = False

    @property
    def s0(self) -> float:
        return math.log(abs(_to_complex(self.eigenvalues[0]))) / -math.log(self.rho)

    @property
    def period(self) -> complex:
        return 2j * math.pi / math.log(self.rho)

    def __call__(self, z) -> complex:
        x = self.rho ** complex(z)
        total = 0j
        for c, lam in zip(self.coefficients, self.eigenvalues):
            c, lam = _to_complex(c), _to_complex(lam)
            total += c * lam * x / (1 - lam * x)
        return total + _to_complex(self.correction) * x

    def pole(self, j: int, k: int = 0) -> complex:
        lam = _to_complex(self.eigenvalues[j])
        return (cmath.log(lam) + 2j * math.pi * k) / -math.log(self.rho)

    def residue(self, j: int):
        """Residue at every pole of the j-th family: C_j / (-log rho)."""
        return _to_complex(self.coefficients[j]) / -math.log(self.rho)

    def numerator(self, j: int):
        return self.coefficients[j]


def closed_form_zeta(graph: SubstitutionGraph, fundamental: FundamentalEdges, rho: float,
                     oriented: bool = False) -> ZetaClosedForm:
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    if not is_primitive_matrix(graph.matrix):
        raise NotPrimitiveError("graph matrix is not primitive")
    dec = edge_count_decomposition(graph, fundamental, oriented)
    return ZetaClosedForm(dec.coefficients, dec.eigenvalues, rho, dec.exact,
                          dec.first_term_correction, oriented)


def full_triple_dimension(d: int, theta: float, rho_tr: float, rho_lg: float) -> float:
    if theta <= 1 or not (0 < rho_tr < 1 and 0 < rho_lg < 1):
        raise ValueError("need theta > 1 and rho in (0, 1)")
    return d * (math.log(theta) / -math.log(rho_tr) + math.log(theta) / -math.log(rho_lg))


# ------------------------------------------------------- spectral measures


@dataclass(frozen=True)
class SpectralMeasure:
    weights: dict  # vertex -> cylinder weight
    depth: int

    def __getitem__(self, v):
        return self.weights[v]


def graph_measure(graph: SubstitutionGraph, depth: int) -> SpectralMeasure:
    """mu[gamma] = lambda_PF^-n u_{r(gamma)} on paths with n edges, u the
    right PF eigenvector of the graph matrix with sum 1."""
    a = graph.matrix.astype(float)
    if not is_primitive_matrix(graph.matrix):
        raise NotPrimitiveError("graph matrix is not primitive")
    vals, vecs = np.linalg.eig(a)
    i = int(np.argmax(vals.real))
    lam = float(vals[i].real)
    u = np.abs(vecs[:, i].real)
    u = u / u.sum()
    idx = {v: j for j, v in enumerate(graph.vertices)}
    weights = {(): 1.0}
    cur = [(v,) for v in graph.vertices]
    for n in range(depth):
        for p in cur:
            weights[p] = lam ** -n * u[idx[path_end(graph, p)]]
        cur = [p + (e.id,) for p in cur for e in graph.out_edges(path_end(graph, p))]
    return SpectralMeasure(weights, depth)


def word_frequencies(oracle: LanguageOracle, n: int) -> dict:
    """Frequency of each factor of length n."""
    words = oracle.factors(n)
    if n == 0:
        return {"": 1.0}
    if oracle.kind == "substitution":
        return _block_frequencies(oracle, n)
    if oracle.kind == "sturmian":
        return _rotation_frequencies(oracle, n)
    if oracle.kind == "periodic":
        u = oracle.source
        ext = u * (n // len(u) + 2)
        counts = {}
        for i in range(len(u)):
            w = ext[i:i + n]
            counts[w] = counts.get(w, 0) + 1
        return {w: counts[w] / len(u) for w in words}
    if oracle.kind == "full":
        return {w: len(oracle.alphabet) ** -n for w in words}
    raise ValueError(oracle.kind)


def _block_frequencies(oracle: LanguageOracle, n: int) -> dict:
    """PF eigenvector of the n-block presentation of the substitution: the
    block w maps to the first |sigma(w[0])| length-n windows of sigma(w)."""
    subst, _ = oracle.source
    words = oracle.factors(n)
    idx = {w: i for i, w in enumerate(words)}
    m = np.zeros((len(words), len(words)))
    for j, w in enumerate(words):
        img = subst(w)
        for i in range(len(subst.rule[w[0]])):
            m[idx[img[i:i + n]], j] += 1
    vals, vecs = np.linalg.eig(m)
    k = int(np.argmax(vals.real))
    v = np.abs(vecs[:, k].real)
    v = v / v.sum()
    # one power-iteration polish step keeps additivity at round-off level
    v = m @ v
    v = v / v.sum()
    return {w: float(v[idx[w]]) for w in words}


def _rotation_frequencies(oracle: LanguageOracle, n: int) -> dict:
    """Lebesgue measure of the rotation cylinders (letter b <-> [1-theta, 1))."""
    theta = float(oracle.source.value(60))
    a_letter, b_letter = oracle.alphabet
    cuts = sorted({(-j * theta) % 1.0 for j in range(n + 1)} | {0.0, 1.0})
    freq = {}
    for lo, hi in zip(cuts, cuts[1:]):
        if hi - lo <= 0:
            continue
        x = (lo + hi) / 2
        w = "".join(b_letter if (x + j * theta) % 1.0 >= 1 - theta else a_letter for j in range(n))
        freq[w] = freq.get(w, 0.0) + (hi - lo)
    return {w: freq.get(w, 0.0) for w in oracle.factors(n)}


def tree_measure(oracle: LanguageOracle, depth: int) -> SpectralMeasure:
    weights = {}
    for n in range(depth + 1):
        weights.update(word_frequencies(oracle, n))
    return SpectralMeasure(weights, depth)


def spectral_measure(obj, depth: int) -> SpectralMeasure:
    if isinstance(obj, SubstitutionGraph):
        return graph_measure(obj, depth)
    if isinstance(obj, LanguageOracle):
        return tree_measure(obj, depth)
    raise TypeError("expected a substitution graph or a language oracle")
