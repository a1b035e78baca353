"""Independent brute-force reference implementations used by the tests.

Nothing here imports apspec; each routine recomputes a quantity from its
definition with plain loops, so agreement with the library is a real
cross-check rather than a tautology.
"""

from __future__ import annotations

from fractions import Fraction
import itertools
import math

TAU = (1 + math.sqrt(5)) / 2


def iterate(rule: dict, seed: str, steps: int) -> str:
    w = seed
    for _ in range(steps):
        w = "".join(rule[c] for c in w)
    return w


def long_word(rule: dict, min_length: int) -> str:
    """A long word of the language: iterate from each letter and keep the
    longest so every letter's image tree is represented."""
    seed = next(iter(rule))
    w = seed
    while len(w) < min_length:
        w = "".join(rule[c] for c in w)
    return w


def naive_factors(word: str, n: int) -> set:
    return {word[i:i + n] for i in range(len(word) - n + 1)}


def mechanical_word(theta: float, length: int, intercept: float = 0.0) -> str:
    """Rotation coding: letter b when x + j theta mod 1 lies in [1 - theta, 1)."""
    out = []
    for j in range(length):
        x = (intercept + j * theta) % 1.0
        out.append("b" if x >= 1 - theta else "a")
    return "".join(out)


def cf_value(coeffs) -> Fraction:
    x = Fraction(0)
    for a in reversed(coeffs):
        x = 1 / (a + x)
    return x


def count_occurrences(w: str, u: str) -> int:
    return sum(1 for i in range(len(w) - len(u) + 1) if w[i:i + len(u)] == u)


def is_complete_first_return(w: str, u: str) -> bool:
    return len(w) > len(u) and w.startswith(u) and w.endswith(u) and count_occurrences(w, u) == 2


def privileged_by_definition(w: str) -> bool:
    """Recursive definition: length <= 1, or a complete first return to some
    privileged proper prefix."""
    if len(w) <= 1:
        return True
    return any(privileged_by_definition(w[:k]) and is_complete_first_return(w, w[:k])
               for k in range(len(w)))


def right_special_count(factor_sets, n: int) -> int:
    longer = factor_sets[n + 1]
    return sum(1 for w in factor_sets[n] if sum(1 for x in "abc" if w + x in longer) > 1)


def lucas(k: int) -> int:
    a, b = 2, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def matrix_power_count(a, v0, n: int) -> int:
    """(1,...,1) A^(n-1) v0 with integer arithmetic."""
    size = len(a)
    v = list(v0)
    for _ in range(n - 1):
        v = [sum(a[i][j] * v[j] for j in range(size)) for i in range(size)]
    return sum(v)


def ultrametric_from_words(x: str, y: str, delta) -> float:
    """delta of the length of the longest common prefix; 0 for equal words."""
    if x == y:
        return 0.0
    k = 0
    while k < min(len(x), len(y)) and x[k] == y[k]:
        k += 1
    return delta(k)


def sheaf_targets(children: dict, levels: list, bound: int):
    """All integer labellings with the root 0, |value| <= bound and each
    value equal to the sum over its children, by full enumeration of every
    vertex value (no leaf shortcut)."""
    verts = [v for lev in levels for v in lev]
    for combo in itertools.product(range(-bound, bound + 1), repeat=len(verts)):
        val = dict(zip(verts, combo))
        if val[levels[0][0]] != 0:
            continue
        if all(not children.get(v) or sum(val[c] for c in children[v]) == val[v]
               for lev in levels[:-1] for v in lev):
            yield val


def dirichlet_partial(counts, lengths, s: float) -> float:
    return sum(c * l ** s for c, l in zip(counts, lengths))
