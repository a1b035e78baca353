"""Words, substitutions, languages and their combinatorics.

Words are plain Python strings whose characters are the letters of an
alphabet.  Every set-valued result is returned as a tuple sorted in
alphabet order so that downstream output is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
import math
import re

import numpy as np


class SubstitutionParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NotPrimitiveError(ValueError):
    pass


class InsufficientCoefficientsError(ValueError):
    pass


@dataclass(frozen=True)
class Substitution:
    rules: tuple  # ((letter, image), ...) in alphabet order
    name: str = ""

    def __post_init__(self):
        letters = [a for a, _ in self.rules]
        if len(set(letters)) != len(letters):
            raise ValueError("duplicate letter in substitution")
        for a, img in self.rules:
            if len(a) != 1:
                raise ValueError(f"letters must be single characters, got {a!r}")
            if not img:
                raise ValueError(f"image of {a!r} is empty")
            for c in img:
                if c not in letters:
                    raise ValueError(f"image of {a!r} uses unknown letter {c!r}")

    @classmethod
    def from_dict(cls, rule: dict, name: str = "") -> "Substitution":
        return cls(tuple(rule.items()), name)

    @property
    def alphabet(self) -> tuple:
        return tuple(a for a, _ in self.rules)

    @property
    def rule(self) -> dict:
        return dict(self.rules)

    def __call__(self, w: str) -> str:
        r = self.rule
        return "".join(r[c] for c in w)

    def power(self, k: int) -> "Substitution":
        return Substitution(tuple((a, expand(self, a, k)) for a in self.alphabet), f"{self.name}^{k}")


FIBONACCI = Substitution((("a", "ab"), ("b", "a")), "Fibonacci")
FIBONACCI_SQUARED = Substitution((("a", "baa"), ("b", "ba")), "Fibonacci squared")
TRIBONACCI = Substitution((("a", "ab"), ("b", "ac"), ("c", "a")), "Tribonacci")

_RULE_RE = re.compile(r"^(\s*)(\S+)(\s*)->(\s*)(\S*)\s*$")


def parse_substitution(text: str) -> Substitution:
    name = ""
    rules = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.lower().startswith("name:"):
            name = stripped[5:].strip()
            continue
        m = _RULE_RE.match(line)
        if not m:
            col = len(line) - len(line.lstrip()) + 1
            raise SubstitutionParseError("expected 'letter -> image'", lineno, col)
        letter, image = m.group(2), m.group(5)
        col = len(m.group(1)) + 1
        if len(letter) != 1:
            raise SubstitutionParseError(f"letter must be one character, got {letter!r}", lineno, col)
        if letter in seen:
            raise SubstitutionParseError(f"duplicate rule for {letter!r}", lineno, col)
        if not image:
            raise SubstitutionParseError("empty image", lineno, m.start(5) + 1)
        seen.add(letter)
        rules.append((letter, image, lineno, m.start(5) + 1))
    if not rules:
        raise SubstitutionParseError("no rules found", 1, 1)
    for letter, image, lineno, col in rules:
        for i, c in enumerate(image):
            if c not in seen:
                raise SubstitutionParseError(f"unknown letter {c!r} in image", lineno, col + i)
    return Substitution(tuple((a, img) for a, img, _, _ in rules), name)


def load_substitution(path) -> Substitution:
    with open(path, encoding="utf-8") as fh:
        return parse_substitution(fh.read())


def expand(subst: Substitution, w: str, k: int) -> str:
    if k < 0:
        raise ValueError("k must be nonnegative")
    for _ in range(k):
        w = subst(w)
    return w


# ---------------------------------------------------------------- matrices


def substitution_matrix(subst: Substitution) -> np.ndarray:
    """M[i, j] = number of occurrences of letter i in the image of letter j."""
    alpha = subst.alphabet
    idx = {a: i for i, a in enumerate(alpha)}
    m = np.zeros((len(alpha), len(alpha)), dtype=np.int64)
    for j, a in enumerate(alpha):
        for c in subst.rule[a]:
            m[idx[c], j] += 1
    return m


def is_primitive_matrix(m: np.ndarray) -> bool:
    # Wielandt: a primitive n x n matrix has M^N > 0 for some N <= (n-1)^2 + 1 <= n^2.
    n = m.shape[0]
    b = (np.asarray(m) > 0).astype(np.int64)
    p = b.copy()
    for _ in range(n * n):
        if p.all():
            return True
        p = ((p @ b) > 0).astype(np.int64)
    return bool(p.all())


def is_primitive(subst: Substitution) -> bool:
    return is_primitive_matrix(substitution_matrix(subst))


@dataclass(frozen=True)
class PerronData:
    eigenvalue: float
    left: np.ndarray
    right: np.ndarray


def perron_matrix(m: np.ndarray) -> PerronData:
    m = np.asarray(m, dtype=float)
    if not is_primitive_matrix(m):
        raise NotPrimitiveError("not primitive")
    if m.shape == (2, 2):
        tr = m[0, 0] + m[1, 1]
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        lam = (tr + math.sqrt(tr * tr - 4 * det)) / 2
        # (m - lam) v = 0 with positive off-diagonals gives explicit vectors
        right = np.array([m[0, 1], lam - m[0, 0]])
        left = np.array([m[1, 0], lam - m[0, 0]])
    else:
        vals, vecs = np.linalg.eig(m)
        i = int(np.argmax(vals.real))
        lam = float(vals[i].real)
        right = np.abs(vecs[:, i].real)
        lvals, lvecs = np.linalg.eig(m.T)
        j = int(np.argmax(lvals.real))
        left = np.abs(lvecs[:, j].real)
    return PerronData(float(lam), left / left.sum(), right / right.sum())


def perron(subst: Substitution) -> PerronData:
    return perron_matrix(substitution_matrix(subst))


# ------------------------------------------------------------- languages


@dataclass(frozen=True)
class SturmianSlope:
    """Continued fraction [0; a_1, a_2, ...] given by a finite prefix.

    ``repeat=True`` cycles the prefix; ``rule`` (k -> a_k, k >= 1) overrides
    both and makes the slope lazily extensible.
    """

    coefficients: tuple = ()
    repeat: bool = False
    rule: object = None

    def __post_init__(self):
        if any(int(a) < 1 for a in self.coefficients):
            raise ValueError("continued fraction coefficients must be >= 1")

    def coefficient(self, k: int) -> int:
        if self.rule is not None:
            a = int(self.rule(k))
            if a < 1:
                raise ValueError(f"coefficient a_{k} = {a} < 1")
            return a
        if k <= len(self.coefficients):
            return int(self.coefficients[k - 1])
        if self.repeat and self.coefficients:
            return int(self.coefficients[(k - 1) % len(self.coefficients)])
        raise InsufficientCoefficientsError(
            f"slope needs coefficient a_{k} but only {len(self.coefficients)} were given"
        )

    def available(self) -> float:
        return math.inf if (self.rule is not None or self.repeat) else len(self.coefficients)

    def value(self, terms: int = 40) -> Fraction:
        terms = int(min(terms, self.available()))
        x = Fraction(0)
        for k in range(terms, 0, -1):
            x = 1 / (self.coefficient(k) + x)
        return x

    def label(self) -> str:
        if self.rule is not None:
            head = [self.coefficient(k) for k in range(1, 7)]
            return "[" + ",".join(map(str, head)) + ",...]"
        tail = ",..." if self.repeat else ""
        return "[" + ",".join(map(str, self.coefficients)) + tail + "]"


GOLDEN_SLOPE = SturmianSlope((1,), repeat=True)


def _windows(word: str, n: int) -> set:
    if n == 0:
        return {""}
    return {word[i:i + n] for i in range(len(word) - n + 1)}


def _sorted_words(words, alphabet) -> tuple:
    rank = {a: i for i, a in enumerate(alphabet)}
    return tuple(sorted(words, key=lambda w: [rank[c] for c in w]))


class LanguageOracle:
    """Factor-closed language generated by a substitution, a Sturmian slope,
    a periodic word or the full shift.

    Factors of length n are read off a reference word chosen by a stopping
    rule: the k-th generating word is accepted once its length-n factor set
    equals that of the (k+1)-th.  Results are memoised; the public surface
    is read-only.
    """

    def __init__(self, kind: str, alphabet: tuple, source, name: str = ""):
        self.kind = kind
        self.alphabet = tuple(alphabet)
        self.source = source
        self.name = name or kind
        self._stable_k = 0
        self._std_cache = {}
        self._ref_cache = {}
        self._fs_cache = {}
        self.diagnostics = []
        if kind == "substitution":
            self._check_reachability()

    # generating words
    def _candidate(self, k: int):
        """(word, n_valid): a word whose factors of length <= n_valid equal
        those of the k-th generating word."""
        if self.kind == "substitution":
            subst, start = self.source
            w = expand(subst, start, k)
            return w, len(w)
        if self.kind == "sturmian":
            sk, skm1 = self._standard(k), self._standard(k - 1)
            a = self.source.coefficient(k + 1)
            w = sk + sk + skm1 if a >= 2 else sk + skm1
            return w, len(sk)
        if self.kind == "periodic":
            u = self.source
            return u * (2 ** k + 1), len(u) * (2 ** k)
        if self.kind == "full":
            return _de_bruijn(self.alphabet, max(k, 1)), max(k, 1)
        raise ValueError(self.kind)

    def _standard(self, k: int) -> str:
        if k in self._std_cache:
            return self._std_cache[k]
        a, b = self.alphabet
        if k == -1:
            w = b
        elif k == 0:
            w = a
        elif k == 1:
            w = a * (self.source.coefficient(1) - 1) + b
        else:
            w = self._standard(k - 1) * self.source.coefficient(k) + self._standard(k - 2)
        self._std_cache[k] = w
        return w

    def standard_word(self, k: int) -> str:
        if self.kind != "sturmian":
            raise ValueError("standard words exist only for Sturmian languages")
        return self._standard(k)

    def _check_reachability(self):
        w = self.reference_word(1)
        missing = [a for a in self.alphabet if a not in w]
        for a in missing:
            self.diagnostics.append(f"letter unreachable: {a}")

    def reference_word(self, n: int) -> str:
        """A finite word containing every factor of length <= n."""
        if n in self._ref_cache:
            return self._ref_cache[n]
        k = self._stable_k
        while True:
            w0, valid0 = self._candidate(k)
            if valid0 >= n:
                w1, valid1 = self._candidate(k + 1)
                if _windows(w0, n) == _windows(w1, n):
                    break
            k += 1
            if k > 200:
                raise RuntimeError(f"factor sets of length {n} did not stabilise")
        self._stable_k = k
        self._ref_cache[n] = w1
        return w1

    def factors(self, n: int) -> tuple:
        if n < 0:
            raise ValueError("n must be nonnegative")
        if n == 0:
            return ("",)
        if self.kind == "full":
            return tuple("".join(p) for p in product(self.alphabet, repeat=n))
        return _sorted_words(_windows(self.reference_word(n), n), self.alphabet)

    def factor_set(self, n: int) -> frozenset:
        fs = self._fs_cache.get(n)
        if fs is None:
            fs = self._fs_cache[n] = frozenset(self.factors(n))
        return fs

    def contains(self, w: str) -> bool:
        return w in self.factor_set(len(w))

    def extensions(self, w: str) -> tuple:
        return tuple(c for c in self.alphabet if self.contains(w + c))

    def __repr__(self):
        return f"LanguageOracle({self.name!r})"


def _de_bruijn(alphabet, n: int) -> str:
    k = len(alphabet)
    a = [0] * k * n
    seq = []

    def db(t, p):
        if t > n:
            if n % p == 0:
                seq.extend(a[1:p + 1])
        else:
            a[t] = a[t - p]
            db(t + 1, p)
            for j in range(a[t - p] + 1, k):
                a[t] = j
                db(t + 1, t)

    db(1, 1)
    s = "".join(alphabet[i] for i in seq)
    return s + s[: n - 1]


def language_of(subst: Substitution, start: str | None = None) -> LanguageOracle:
    if start is None:
        # prefer a prolongable letter so the generating words are nested
        start = next((a for a in subst.alphabet if subst.rule[a][0] == a), subst.alphabet[0])
    return LanguageOracle("substitution", subst.alphabet, (subst, start), subst.name or "substitution")


def sturmian_oracle(slope: SturmianSlope, n_max: int, alphabet=("a", "b")) -> LanguageOracle:
    oracle = LanguageOracle("sturmian", alphabet, slope, f"Sturmian {slope.label()}")
    try:
        oracle.reference_word(n_max)
    except InsufficientCoefficientsError as exc:
        raise InsufficientCoefficientsError(
            f"not enough continued fraction coefficients to cover length {n_max}: {exc}"
        ) from None
    return oracle


def periodic_language(u: str, alphabet=None) -> LanguageOracle:
    alphabet = alphabet or tuple(sorted(set(u)))
    return LanguageOracle("periodic", alphabet, u, f"periodic ({u})^w")


def full_shift(alphabet=("a", "b")) -> LanguageOracle:
    return LanguageOracle("full", alphabet, None, "full shift")


# ------------------------------------------------------------ statistics


def factors(oracle: LanguageOracle, n: int) -> tuple:
    return oracle.factors(n)


def right_special(oracle: LanguageOracle, n: int) -> tuple:
    nxt = oracle.factor_set(n + 1)
    return tuple(
        w for w in oracle.factors(n) if sum((w + c) in nxt for c in oracle.alphabet) >= 2
    )


@dataclass(frozen=True)
class ComplexityTable:
    n: tuple
    p: tuple
    p_rs: tuple
    p_pr: tuple


def complexity(oracle: LanguageOracle, n_max: int) -> ComplexityTable:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ns = tuple(range(1, n_max + 1))
    return ComplexityTable(
        ns,
        tuple(len(oracle.factors(n)) for n in ns),
        tuple(len(right_special(oracle, n)) for n in ns),
        tuple(sum(map(is_privileged, oracle.factors(n))) for n in ns),
    )


def _suffix_array(codes: np.ndarray) -> np.ndarray:
    n = len(codes)
    rank = codes.astype(np.int64)
    k = 1
    sa = np.argsort(rank, kind="stable")
    while True:
        key2 = np.full(n, -1, dtype=np.int64)
        key2[: n - k] = rank[k:] if k < n else key2[:0]
        sa = np.lexsort((key2, rank))
        r1, r2 = rank[sa], key2[sa]
        change = np.empty(n, dtype=np.int64)
        change[0] = 0
        change[1:] = (r1[1:] != r1[:-1]) | (r2[1:] != r2[:-1])
        new = np.empty(n, dtype=np.int64)
        new[sa] = np.cumsum(change)
        rank = new
        if rank.max() == n - 1 or k >= n:
            return sa
        k *= 2


def distinct_factor_counts(word: str, n_max: int) -> np.ndarray:
    """Number of distinct length-n factors of a finite word for n = 0..n_max."""
    codes = np.array([ord(c) for c in word], dtype=np.int64)
    n = len(codes)
    if n == 0:
        out = np.zeros(n_max + 1, dtype=np.int64)
        out[0] = 1
        return out
    sa = _suffix_array(codes)
    rank = np.empty(n, dtype=np.int64)
    rank[sa] = np.arange(n)
    lcp = np.zeros(n, dtype=np.int64)  # lcp[r] between sa[r-1] and sa[r]
    s = word
    h = 0
    sa_list = sa.tolist()
    rank_list = rank.tolist()
    for i in range(n):
        r = rank_list[i]
        if r > 0:
            j = sa_list[r - 1]
            while i + h < n and j + h < n and s[i + h] == s[j + h]:
                h += 1
            lcp[r] = h
            if h:
                h -= 1
        else:
            h = 0
    hist = np.bincount(lcp[1:], minlength=n_max + 2)[: n_max + 2] if n > 1 else np.zeros(n_max + 2, dtype=np.int64)
    if len(hist) < n_max + 2:
        hist = np.pad(hist, (0, n_max + 2 - len(hist)))
    total_lcp = n - 1
    # pairs with lcp >= m = total - #(lcp < m)
    below = np.concatenate(([0], np.cumsum(hist)))[: n_max + 1]
    ge = total_lcp - below
    ms = np.arange(n_max + 1)
    counts = np.maximum(n - ms + 1, 0) - ge
    counts[0] = 1
    return np.maximum(counts, 0)


def complexity_profile(oracle: LanguageOracle, n_max: int) -> np.ndarray:
    """p(n) for n = 0..n_max in one pass, using suffix arrays of two
    consecutive generating words (the same stopping rule as ``factors``)."""
    if oracle.kind == "full":
        return np.array([len(oracle.alphabet) ** n for n in range(n_max + 1)], dtype=object)
    k = 0
    prev = None
    while True:
        w, valid = oracle._candidate(k)
        if valid >= n_max + 1:
            cur = distinct_factor_counts(w, n_max + 1)
            if prev is not None and np.array_equal(prev, cur):
                return cur[: n_max + 1]
            prev = cur
        k += 1
        if k > 200:
            raise RuntimeError("complexity profile did not stabilise")


# ------------------------------------------------------- returns, privileged


@dataclass(frozen=True)
class ReturnWords:
    words: tuple
    bound_limited: bool


def complete_first_returns(oracle: LanguageOracle, u: str, search_bound: int) -> ReturnWords:
    if u == "":
        letters = [a for a in oracle.alphabet if oracle.contains(a)]
        return ReturnWords(tuple(letters), search_bound < 1)
    ref = oracle.reference_word(search_bound)
    occ = [m.start() for m in re.finditer("(?=" + re.escape(u) + ")", ref)]
    found = set()
    limited = False
    for i, j in zip(occ, occ[1:]):
        v = ref[i:j + len(u)]
        if len(v) <= search_bound:
            found.add(v)
        else:
            limited = True
    if not found:
        limited = True
    return ReturnWords(_sorted_words(found, oracle.alphabet), limited)


@dataclass
class PrivilegedTable:
    levels: list
    order: dict
    bound_limited: bool = False


def privileged(oracle: LanguageOracle, order_max, search_bound: int) -> PrivilegedTable:
    """Privileged words up to ``order_max`` (None = until exhausted) with
    lengths at most ``search_bound``."""
    levels = [("",)]
    order = {"": 0}
    limited = False
    k = 0
    while order_max is None or k < order_max:
        nxt = set()
        for u in levels[-1]:
            ret = complete_first_returns(oracle, u, search_bound)
            limited = limited or (ret.bound_limited and u != "")
            nxt.update(v for v in ret.words if v not in order)
        if not nxt:
            break
        k += 1
        for v in nxt:
            order[v] = k
        levels.append(_sorted_words(nxt, oracle.alphabet))
    return PrivilegedTable(levels, order, limited)


@lru_cache(maxsize=None)
def is_privileged(w: str) -> bool:
    """Word-intrinsic test: w is a complete first return to its longest
    privileged border (a shorter privileged border would occur a third time
    inside the longer one)."""
    if len(w) <= 1:
        return True
    for b in range(len(w) - 1, 0, -1):
        u = w[:b]
        if w.endswith(u) and is_privileged(u):
            # w is a complete first return to u iff u occurs exactly twice
            return sum(w.startswith(u, i) for i in range(len(w) - len(u) + 1)) == 2
    return False


def privileged_prefixes(w: str) -> list:
    """All privileged prefixes of w, shortest first."""
    return [w[:m] for m in range(len(w) + 1) if is_privileged(w[:m])]


def privileged_chain(w: str) -> list:
    """Privileged prefixes of w by iterated complete first returns: the next
    one ends at the second occurrence of the current one.  Same output as
    ``privileged_prefixes`` in near-linear time."""
    chain = [""]
    while True:
        u = chain[-1]
        j = w.find(u, 1)
        if j < 0 or j + len(u) > len(w):
            return chain
        chain.append(w[: j + len(u)])


def _longest_border(w: str) -> int:
    fail = [0] * len(w)
    k = 0
    for i in range(1, len(w)):
        while k and w[i] != w[k]:
            k = fail[k - 1]
        if w[i] == w[k]:
            k += 1
        fail[i] = k
    return fail[-1] if w else 0


@dataclass(frozen=True)
class Repulsiveness:
    value: float
    witness: tuple | None


def repulsiveness_index(oracle: LanguageOracle, L_max: int) -> Repulsiveness:
    if L_max < 2:
        raise ValueError("L_max must be >= 2")
    best = None
    for n in range(2, L_max + 1):
        for W in oracle.factors(n):
            b = _longest_border(W)
            if b:
                key = (Fraction(n - b, b), n, W)
                if best is None or key < best:
                    best = key
    if best is None:
        return Repulsiveness(math.inf, None)
    ratio, _, W = best
    return Repulsiveness(float(ratio), (W[: _longest_border(W)], W))


@dataclass(frozen=True)
class PowerVerdict:
    bounded: bool
    p: int | None
    witness: str | None  # a factor u with u**p in the language (highest seen)

    def __str__(self):
        return f"bounded({self.p})" if self.bounded else "unbounded-up-to-bound"


def bounded_powers(oracle: LanguageOracle, p_max: int, L_max: int) -> PowerVerdict:
    witness = None
    for p in range(1, p_max + 1):
        hit = None
        for m in range(1, L_max // (p + 1) + 1):
            for u in oracle.factors(m):
                if oracle.contains(u * (p + 1)):
                    hit = u
                    break
            if hit:
                break
        if hit is None:
            return PowerVerdict(True, p, witness)
        witness = hit * (p + 1)
    return PowerVerdict(False, None, witness)


@lru_cache(maxsize=None)
def privileged_order(w: str) -> int:
    """Iteration level of a privileged word (0 for the empty word, 1 for
    letters); raises ValueError for words that are not privileged."""
    if w == "":
        return 0
    if len(w) == 1:
        return 1
    if not is_privileged(w):
        raise ValueError(f"{w!r} is not privileged")
    for b in range(len(w) - 1, 0, -1):
        u = w[:b]
        if w.endswith(u) and is_privileged(u):
            return privileged_order(u) + 1
    return 1  # border-free words of length >= 2 are not privileged; unreachable
