"""Extremal Connes distances over choice functions and the order criterion."""

from __future__ import annotations

from dataclasses import dataclass
import itertools
import math
import random

import numpy as np

from .symbolic_core import LanguageOracle, privileged_chain, right_special
from .tree_structures import (
    BoundaryPath,
    ChoiceFunction,
    LengthFunction,
    WordTree,
    branching_number,
    evaluate_choice,
    meet,
)


class InsufficientDepthError(ValueError):
    pass


@dataclass(frozen=True)
class Distance:
    value: float
    tail: float  # heuristic size of the part cut off by truncation
    truncated: bool

    def __float__(self):
        return self.value


def _tail_estimate(terms: list) -> float:
    """Doubling heuristic: the remainder past level L is taken to be as
    large as the contribution of levels [L/2, L)."""
    half = len(terms) // 2
    return float(sum(terms[half:]))


def _check(dist: Distance, tol):
    if tol is not None and dist.tail > tol:
        raise InsufficientDepthError(f"insufficient depth: tail estimate {dist.tail:.3g} exceeds {tol:.3g}")
    return dist


def d_inf(xi: BoundaryPath, eta: BoundaryPath, delta: LengthFunction) -> Distance:
    mt = meet(xi, eta)
    if mt.undistinguished:
        return Distance(0.0, 0.0, True)
    return Distance(delta(mt.level), 0.0, False)


def d_sup_tree(xi: BoundaryPath, eta: BoundaryPath, delta: LengthFunction, tree: WordTree,
               tol: float | None = None) -> Distance:
    mt = meet(xi, eta)
    if mt.undistinguished:
        return Distance(0.0, 0.0, True)
    m = mt.level
    terms = []
    for path in (xi, eta):
        for k in range(m + 1, len(path.vertices)):
            v = path.vertices[k]
            if tree.is_truncated(v):
                break
            terms.append((k, delta(k) if branching_number(tree, v) else 0.0))
    terms.sort()
    vals = [t for _, t in terms]
    return _check(Distance(delta(m) + sum(vals), _tail_estimate(vals), True), tol)


# ------------------------------------------------------- privileged form


def _as_word(x) -> str:
    return x.end if isinstance(x, BoundaryPath) else x


def privileged_meet_word(xi: str, eta: str) -> str:
    k = 0
    while k < min(len(xi), len(eta)) and xi[k] == eta[k]:
        k += 1
    return privileged_chain(xi[:k])[-1]


def d_inf_privileged(xi, eta, delta: LengthFunction) -> Distance:
    """delta of the word length of the greatest common privileged prefix."""
    a, b = _as_word(xi), _as_word(eta)
    if a == b:
        return Distance(0.0, 0.0, True)
    return Distance(delta(len(privileged_meet_word(a, b))), 0.0, False)


def d_sup_privileged(xi, eta, delta: LengthFunction, tol: float | None = None) -> Distance:
    """Privileged-edge d_sup.  The length function is applied to the word
    length of each privileged prefix, i.e. to the scale of the edges leaving
    it (see the ledger for why the privileged order cannot be meant)."""
    a, b = _as_word(xi), _as_word(eta)
    if a == b:
        return Distance(0.0, 0.0, True)
    common = privileged_meet_word(a, b)
    order = len(privileged_chain(common)) - 1
    terms = []
    for w in (a, b):
        chain = privileged_chain(w)
        terms.extend((len(p), delta(len(p))) for p in chain[order + 1:])
    terms.sort()
    vals = [t for _, t in terms]
    return _check(Distance(delta(len(common)) + sum(vals), _tail_estimate(vals), True), tol)


# --------------------------------------------------------- delta conditions


@dataclass(frozen=True)
class DeltaVerdict:
    monotone: bool
    upper_constant: float  # sup delta(ab) / (delta(a) delta(b)) on the scan
    upper_ok: bool
    lower_constant: float  # inf delta(2a) / delta(a) on the scan
    lower_ok: bool

    @property
    def passes(self) -> bool:
        return self.monotone and self.upper_ok and self.lower_ok


def _log_delta(delta, n: int) -> float:
    if delta.kind == "reciprocal":
        return -math.log(n + 1)
    if delta.kind == "geometric":
        return n * math.log(delta.rho)
    return math.log(delta(n))


def check_delta_conditions(delta: LengthFunction, n_max: int = 10_000, n_min: int = 1) -> DeltaVerdict:
    """Scan for the constants of delta(ab) <= c_up delta(a) delta(b) and
    delta(2a) >= c_low delta(a) on [n_min, n_max].

    A constant is accepted when the running extremum over the second half
    of the (log-spaced) scan moves by less than 5% in log terms relative to
    the first half.  Works in log space so geometric decay never underflows.
    """
    logs = [_log_delta(delta, n) for n in range(0, 2 * n_max + 1)] if delta.kind == "sequence" else None

    def ld(n):
        return logs[n] if logs is not None else _log_delta(delta, n)

    monotone = all(ld(n + 1) < ld(n) for n in range(0, min(n_max, 2000)))
    grid = sorted(set(list(range(n_min, min(n_max, 64) + 1))
                      + [int(x) for x in np.geomspace(max(n_min, 1), n_max, 200)]))
    half = grid[len(grid) // 2]

    def upper_scan(limit):
        best = -math.inf
        for a in grid:
            if a > limit:
                break
            for b in grid:
                if b > limit or (logs is not None and a * b >= len(logs)):
                    break
                best = max(best, ld(a * b) - ld(a) - ld(b))
        return best

    def lower_scan(limit):
        return min(ld(2 * a) - ld(a) for a in grid if a <= limit)

    up_half, up_full = upper_scan(half), upper_scan(n_max)
    lo_half, lo_full = lower_scan(half), lower_scan(n_max)
    upper_ok = up_full - up_half <= 0.05 * max(1.0, abs(up_half))
    lower_ok = lo_half - lo_full <= 0.05 * max(1.0, abs(lo_half))
    return DeltaVerdict(monotone, math.exp(up_full), upper_ok, math.exp(lo_full), lower_ok)


# --------------------------------------------------------- order criterion


@dataclass(frozen=True)
class PairSample:
    xi: str
    eta: str
    d_inf: float
    d_sup: float

    @property
    def ratio(self) -> float:
        return self.d_sup / self.d_inf


@dataclass(frozen=True)
class MetricReport:
    depths: tuple
    max_ratios: tuple
    witnesses: tuple  # per depth, the pair attaining the max ratio
    scheme: str
    verdict: str  # "equivalent" | "diverging" | "degenerate"
    constant: float

    def verdict_line(self) -> str:
        if self.verdict == "equivalent":
            return f"ORDER: equivalent c={self.constant:.6g} (empirical)"
        if self.verdict == "degenerate":
            return "ORDER: degenerate (no branching, d_sup = d_inf)"
        return "ORDER: diverging (empirical)"

    def tsv_rows(self):
        for d, r, (x, y) in zip(self.depths, self.max_ratios, self.witnesses):
            yield f"{d}\t{r:.12g}\t{x}|{y}"


def sample_pairs(oracle: LanguageOracle, depth: int, samples: int = 0, seed: int = 0) -> list:
    """All pairs of distinct length-``depth`` factors, plus ``samples`` random
    pairs of length-2*depth factors drawn with an explicit seed."""
    words = oracle.factors(depth)
    pairs = list(itertools.combinations(words, 2))
    if samples:
        deep = oracle.factors(2 * depth)
        rng = random.Random(seed)
        for _ in range(samples):
            x, y = rng.sample(deep, 2) if len(deep) >= 2 else (deep[0], deep[0])
            if x != y:
                pairs.append((x, y))
    return pairs


class Extender:
    """Continues length-``depth`` factors to long prefixes of infinite words
    of the subshift.  The continuation is read off the first occurrence in a
    generating word with enough room after it; any occurrence gives a valid
    factor, so this is one fixed choice of boundary path per word."""

    def __init__(self, oracle: LanguageOracle, depth: int, length: int):
        self.length = length
        ref = oracle.reference_word(depth)
        k = oracle._stable_k + 1
        while len(ref) < 4 * length and oracle.kind != "full" and k < 200:
            candidate, _ = oracle._candidate(k)
            if len(candidate) > 64 * length:
                break
            ref, k = candidate, k + 1
        self.reference = ref
        self._cache = {}

    def __call__(self, w: str) -> str:
        out = self._cache.get(w)
        if out is None:
            i = self.reference.find(w)
            j = i
            while j >= 0 and j + self.length > len(self.reference):
                j = self.reference.find(w, j + 1)
            start = j if j >= 0 else i  # no room left anywhere: keep the longest continuation
            out = self._cache[w] = self.reference[start:start + self.length]
        return out


def max_ratio(oracle: LanguageOracle, depth: int, delta: LengthFunction, scheme: str = "privileged",
              samples: int = 0, seed: int = 0, tree: WordTree | None = None,
              extension: int = 0) -> PairSample | None:
    """Largest d_sup/d_inf over the sampled pairs.  With ``extension`` > 0
    both words are first continued to that length, so the sums run over
    prefixes of (truncated) infinite words rather than stopping at depth."""
    extend = Extender(oracle, depth, extension) if extension > depth else (lambda w: w)
    best = None
    for x, y in sample_pairs(oracle, depth, samples, seed):
        if scheme == "privileged":
            ex, ey = extend(x), extend(y)
            lo, hi = d_inf_privileged(ex, ey, delta), d_sup_privileged(ex, ey, delta)
        else:
            xp = BoundaryPath(tuple(x[:k] for k in range(len(x) + 1)))
            yp = BoundaryPath(tuple(y[:k] for k in range(len(y) + 1)))
            lo, hi = d_inf(xp, yp, delta), d_sup_tree(xp, yp, delta, tree)
        s = PairSample(x, y, lo.value, hi.value)
        if best is None or s.ratio > best.ratio:
            best = s
    return best


def order_criterion(oracle: LanguageOracle, depths=(4, 8, 16, 32, 64), delta: LengthFunction | None = None,
                    scheme: str = "privileged", samples: int = 0, seed: int = 0,
                    extension_factor: int = 16) -> MetricReport:
    """Max d_sup/d_inf over sampled pairs at each depth.  Equivalent when
    the max ratio changes by less than 5% across the last three depths
    (two doublings), diverging otherwise."""
    delta = delta or LengthFunction()
    depths = tuple(sorted(depths))
    if not right_special(oracle, depths[-1]):
        # no branching below that depth: boundary paths are eventually unique
        return MetricReport(depths, (), (), scheme, "degenerate", 1.0)
    tree = None
    if scheme != "privileged":
        from .tree_structures import build_tree
        tree = build_tree(oracle, depths[-1] * (2 if samples else 1))
    ratios, wits = [], []
    for d in depths:
        s = max_ratio(oracle, d, delta, scheme, samples, seed, tree, extension_factor * d)
        if s is None:
            return MetricReport(depths, (), (), scheme, "degenerate", 1.0)
        ratios.append(s.ratio)
        wits.append((s.xi, s.eta))
    tail = ratios[-3:]
    plateau = len(tail) == 3 and (max(tail) - min(tail)) / min(tail) < 0.05
    return MetricReport(depths, tuple(ratios), tuple(wits), scheme,
                        "equivalent" if plateau else "diverging", max(ratios))


# ------------------------------------------------- brute-force validation


def brute_force_distance(tree: WordTree, tau: ChoiceFunction, edges, delta: LengthFunction,
                         xi: BoundaryPath, eta: BoundaryPath, depth: int) -> float:
    """sup |f(xi) - f(eta)| over f constant on level-``depth`` cylinders with
    |f(tau s h) - f(tau r h)| <= delta(h) for every edge, by linear programming."""
    from scipy.optimize import linprog

    cells = list(tree.levels[depth])
    idx = {v: i for i, v in enumerate(cells)}
    rows, rhs = [], []
    for h in edges:
        if h.orientation < 0 or h.level > depth:
            continue
        s = evaluate_choice(tau, tree, h.source, depth).vertices[depth]
        r = evaluate_choice(tau, tree, h.range, depth).vertices[depth]
        if s == r:
            continue
        row = np.zeros(len(cells))
        row[idx[s]], row[idx[r]] = 1.0, -1.0
        rows.extend([row, -row])
        rhs.extend([h.length(delta)] * 2)
    c = np.zeros(len(cells))
    i, j = idx[xi.vertices[depth]], idx[eta.vertices[depth]]
    if i == j:
        return 0.0
    c[i], c[j] = -1.0, 1.0
    bounds = [(None, None)] * len(cells)
    bounds[j] = (0.0, 0.0)  # f is defined up to constants
    res = linprog(c, A_ub=np.array(rows) if rows else None, b_ub=np.array(rhs) if rhs else None,
                  bounds=bounds, method="highs")
    if res.status == 3:
        return math.inf
    return float(-res.fun)

