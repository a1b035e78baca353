"""Fredholm pairing of a tree triple with cylinder indicators, and the
construction of a triple realizing a prescribed homomorphism."""

from __future__ import annotations

from dataclasses import dataclass
import itertools

from .tree_structures import ChoiceFunction, HorizontalEdge, WordTree, evaluate_choice, make_choice


class SheafError(ValueError):
    pass


class ObstructionError(ValueError):
    pass


class DepthInsufficientError(ValueError):
    pass


@dataclass
class PairingInput:
    tree: WordTree
    positive_edges: tuple  # H+, parallel edges told apart by multiplicity_id
    tau: ChoiceFunction
    depth: int

    @property
    def empty_levels(self) -> tuple:
        """Branching levels without edges: such a realization is a Fredholm
        module but carries no metric information there."""
        used = {h.level for h in self.positive_edges}
        return tuple(n + 1 for n in range(self.depth)
                     if any(len(self.tree.children.get(v, ())) > 1 for v in self.tree.levels[n])
                     and n + 1 not in used)


def _through(inp: PairingInput, u, v, level: int) -> int:
    path = evaluate_choice(inp.tau, inp.tree, u, level)
    if len(path.vertices) <= level:
        raise DepthInsufficientError(f"choice path from {inp.tree.name(u)!r} stops above level {level}")
    return 1 if path.vertices[level] == v else 0


def pairing_counts(inp: PairingInput, v) -> tuple:
    """(#edges leaving the cylinder of v, #edges entering it) along tau."""
    level = inp.tree.level_of[v]
    if level > inp.depth:
        raise DepthInsufficientError(f"vertex {inp.tree.name(v)!r} lies below the truncation depth")
    out_count = in_count = 0
    for h in inp.positive_edges:
        if h.level > level:
            continue
        s = _through(inp, h.source, v, level)
        r = _through(inp, h.range, v, level)
        if s and not r:
            out_count += 1
        elif r and not s:
            in_count += 1
    return out_count, in_count


def pairing(inp: PairingInput, v) -> int:
    """sum over H+ of chi_v(tau s h) - chi_v(tau r h), cross-checked against
    the difference of the two counts."""
    level = inp.tree.level_of[v]
    if level > inp.depth:
        raise DepthInsufficientError(f"vertex {inp.tree.name(v)!r} lies below the truncation depth")
    total = 0
    for h in inp.positive_edges:
        if h.level <= level:
            total += _through(inp, h.source, v, level) - _through(inp, h.range, v, level)
    out_count, in_count = pairing_counts(inp, v)
    assert total == out_count - in_count
    return total


def pairing_table(inp: PairingInput) -> dict:
    return {v: pairing(inp, v) for n in range(inp.depth + 1) for v in inp.tree.levels[n]}


def reverse_orientation(inp: PairingInput) -> PairingInput:
    return PairingInput(inp.tree, tuple(h.op() for h in inp.positive_edges), inp.tau, inp.depth)


# ------------------------------------------------------------ realization


def check_homomorphism(tree: WordTree, values: dict, depth: int) -> None:
    for n in range(depth + 1):
        for v in tree.levels[n]:
            if v not in values:
                raise SheafError(f"no value for vertex {tree.name(v)!r}")
    if values[tree.root] != 0:
        raise ObstructionError("obstruction φ(1)≠0: the value on the root must vanish")
    for n in range(depth):
        for v in tree.levels[n]:
            kids = tree.children.get(v, ())
            if kids and sum(values[u] for u in kids) != values[v]:
                raise SheafError(f"sheaf condition fails at vertex {tree.name(v)!r}")


def realize(values: dict, tree: WordTree, depth: int | None = None) -> PairingInput:
    """Leftmost choice function and, below every branching vertex w0 with
    children w1..wk (tau(w0) through w1), N_i = c_1 + ... + c_i parallel
    edges from w_i to w_{i+1}, where c_1 = phi(w1) - phi(w0) and
    c_i = phi(w_i) otherwise.  Negative N_i reverses the edges."""
    depth = tree.depth if depth is None else depth
    check_homomorphism(tree, values, depth)
    tau = make_choice(tree, "leftmost")
    edges = []
    for n in range(depth):
        for w0 in tree.levels[n]:
            kids = tree.children.get(w0, ())
            if len(kids) < 2:
                continue
            contrib = [values[u] for u in kids]
            contrib[0] -= values[w0]
            running = 0
            for i in range(len(kids) - 1):
                running += contrib[i]
                src, dst = (kids[i], kids[i + 1]) if running > 0 else (kids[i + 1], kids[i])
                for m in range(abs(running)):
                    edges.append(HorizontalEdge(n + 1, src, dst, 1, m, n))
    return PairingInput(tree, tuple(edges), tau, depth)


def realization_rows(inp: PairingInput):
    """TSV rows: level, source, range, multiplicity, sign."""
    name = inp.tree.name
    for h in inp.positive_edges:
        yield f"{h.level}\t{name(h.source)}\t{name(h.range)}\t{h.multiplicity_id}\t{'+' if h.orientation > 0 else '-'}"


def round_trip(values: dict, tree: WordTree, depth: int | None = None) -> bool:
    inp = realize(values, tree, depth)
    return all(pairing(inp, v) == values[v] for n in range(inp.depth + 1) for v in tree.levels[n])


def admissible_targets(tree: WordTree, depth: int, bound: int):
    """Every sheaf-consistent integer assignment with value 0 on the root and
    all values in [-bound, bound], generated from the leaf values."""
    leaves = list(tree.levels[depth])
    for combo in itertools.product(range(-bound, bound + 1), repeat=len(leaves)):
        values = dict(zip(leaves, combo))
        ok = True
        for n in range(depth - 1, -1, -1):
            for v in tree.levels[n]:
                s = sum(values[u] for u in tree.children[v])
                if abs(s) > bound:
                    ok = False
                    break
                values[v] = s
            if not ok:
                break
        if ok and values[tree.root] == 0:
            yield values


# ------------------------------------------------------------ nontriviality


def minimal_schemes(tree: WordTree, depth: int):
    """All minimal edge sets: one oriented edge between two distinct children
    of each branching vertex above ``depth``."""
    per_vertex = []
    for n in range(depth):
        for v in tree.levels[n]:
            kids = tree.children.get(v, ())
            if len(kids) > 1:
                per_vertex.append([HorizontalEdge(n + 1, a, b, 1, 0, n) for a, b in itertools.permutations(kids, 2)])
    for combo in itertools.product(*per_vertex):
        yield tuple(combo)


def all_choices(tree: WordTree, depth: int):
    branching = [v for n in range(depth) for v in tree.levels[n] if len(tree.children.get(v, ())) > 1]
    for combo in itertools.product(*[tree.children[v] for v in branching]):
        yield make_choice(tree, "enumerated", dict(zip(branching, combo)))


@dataclass(frozen=True)
class NontrivialityReport:
    samples: int
    nontrivial: int
    root_zero: int
    level_one_pm: int  # samples with +1 and -1 among the level-1 values
    vacuous: bool

    @property
    def ok(self) -> bool:
        return self.vacuous or (self.nontrivial == self.samples == self.root_zero == self.level_one_pm)


def nontriviality_check(tree: WordTree, depth: int, schemes=None, choices=None) -> NontrivialityReport:
    schemes = list(minimal_schemes(tree, depth)) if schemes is None else list(schemes)
    choices = list(all_choices(tree, depth)) if choices is None else list(choices)
    if not schemes or not schemes[0]:
        return NontrivialityReport(0, 0, 0, 0, True)
    samples = nontrivial = root_zero = pm = 0
    for edges in schemes:
        for tau in choices:
            inp = PairingInput(tree, edges, tau, depth)
            samples += 1
            if pairing(inp, tree.root) == 0:
                root_zero += 1
            level_one = [pairing(inp, v) for v in tree.levels[1]]
            if 1 in level_one and -1 in level_one:
                pm += 1
            if any(x != 0 for x in level_one) or any(pairing(inp, v) for n in range(2, depth + 1) for v in tree.levels[n]):
                nontrivial += 1
    return NontrivialityReport(samples, nontrivial, root_zero, pm, False)


def read_homomorphism(text: str) -> dict:
    """TSV ``word<TAB>integer``; ``ε`` or an empty word names the root."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) == 1:
            word, val = "", parts[0]
        else:
            word, val = parts[0], parts[1]
        if word == "ε":
            word = ""
        try:
            out[word] = int(val)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {val!r} is not an integer") from exc
    return out
