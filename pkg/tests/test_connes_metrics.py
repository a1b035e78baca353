import itertools
import math

from hypothesis import given, settings, strategies as st
import pytest

from apspec import connes_metrics as cm
from apspec import khomology as kh
from apspec import symbolic_core as sc
from apspec import tree_structures as ts

FIB_ORACLE = sc.language_of(sc.FIBONACCI)
DELTA = ts.RECIPROCAL


def _path(tree, w):
    return ts.path_from_word(tree, w)


def test_equal_paths_flagged():
    t = ts.build_tree(FIB_ORACLE, 5)
    p = _path(t, "abaab")
    lo, hi = cm.d_inf(p, p, DELTA), cm.d_sup_tree(p, p, DELTA, t)
    assert lo.value == hi.value == 0 and lo.truncated and hi.truncated


def test_split_at_root():
    t = ts.build_tree(FIB_ORACLE, 5)
    assert cm.d_inf(_path(t, "abaab"), _path(t, "baaba"), DELTA).value == 1.0


def test_d_sup_minus_d_inf_is_branching_tail_sum():
    t = ts.build_tree(FIB_ORACLE, 10)
    words = t.levels[10]
    for x, y in itertools.combinations(words, 2):
        px, py = _path(t, x), _path(t, y)
        m = ts.meet(px, py).level
        direct = sum(DELTA(k) for p in (x, y) for k in range(m + 1, 10)
                     if ts.branching_number(t, p[:k]))
        assert cm.d_sup_tree(px, py, DELTA, t).value - cm.d_inf(px, py, DELTA).value == \
            pytest.approx(direct, abs=1e-12)


@pytest.mark.parametrize("oracle", [FIB_ORACLE, sc.full_shift()])
def test_lp_over_all_choices_spans_d_inf_to_d_sup(oracle):
    """The Connes distance of each choice function, computed by linear
    programming, ranges exactly from d_inf to d_sup."""
    depth = 5 if oracle is FIB_ORACLE else 3
    t = ts.build_tree(oracle, depth)
    edges = ts.horizontal_edges(t, "max", depth)
    choices = list(kh.all_choices(t, depth))
    for x, y in itertools.combinations(t.levels[depth], 2):
        px, py = _path(t, x), _path(t, y)
        vals = [cm.brute_force_distance(t, tau, edges, DELTA, px, py, depth) for tau in choices]
        assert min(vals) == pytest.approx(cm.d_inf(px, py, DELTA).value, abs=1e-9)
        assert max(vals) == pytest.approx(cm.d_sup_tree(px, py, DELTA, t).value, abs=1e-9)


def test_privileged_forms():
    assert cm.privileged_meet_word("aab", "abaab") == "a"
    d = cm.d_inf_privileged("aabaab", "abaaba", DELTA)
    assert d.value == DELTA(1)
    same = cm.d_sup_privileged("abaab", "abaab", DELTA)
    assert same.value == 0 and same.truncated
    hi = cm.d_sup_privileged("aabaab", "abaaba", DELTA)
    expected = DELTA(1) + sum(DELTA(len(p)) for w in ("aabaab", "abaaba")
                              for p in sc.privileged_prefixes(w)[2:])
    assert hi.value == pytest.approx(expected, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_privileged_d_inf_le_d_sup(i, j):
    words = FIB_ORACLE.factors(30)
    x, y = words[i % len(words)], words[j % len(words)]
    lo, hi = cm.d_inf_privileged(x, y, DELTA), cm.d_sup_privileged(x, y, DELTA)
    assert lo.value <= hi.value + 1e-15


def test_insufficient_depth():
    t = ts.build_tree(sc.full_shift(), 10)
    x, y = _path(t, "abababababab"[:10]), _path(t, "bbbbbbbbbb")
    with pytest.raises(cm.InsufficientDepthError):
        cm.d_sup_tree(x, y, DELTA, t, tol=1e-6)
    assert cm.d_sup_tree(x, y, DELTA, t, tol=10.0).truncated


def test_delta_conditions():
    v = cm.check_delta_conditions(DELTA)
    assert v.passes and v.monotone
    assert v.upper_constant == pytest.approx(2.0)
    assert v.lower_constant == pytest.approx(0.5, abs=1e-3)
    g = cm.check_delta_conditions(ts.LengthFunction("geometric", 0.5))
    assert not g.passes and g.upper_ok and not g.lower_ok


def test_delta_constant_fails_monotonicity():
    with pytest.raises(ValueError):
        ts.LengthFunction("sequence", values=(1.0, 1.0, 1.0))


def test_order_criterion_fibonacci_and_periodic():
    rep = cm.order_criterion(FIB_ORACLE)
    assert rep.verdict == "equivalent"
    assert rep.verdict_line().startswith("ORDER: equivalent")
    assert all(r >= 1 for r in rep.max_ratios)
    per = cm.order_criterion(sc.periodic_language("aab"), (4, 8, 16))
    assert per.verdict == "degenerate"


def test_order_criterion_fast_slope_grows():
    slope = sc.SturmianSlope((1,), rule=lambda k: 2 ** (k - 1))
    rep = cm.order_criterion(sc.sturmian_oracle(slope, 16), (4, 8, 16))
    assert rep.max_ratios[0] < rep.max_ratios[1] < rep.max_ratios[2]
    assert list(rep.tsv_rows())[0].startswith("4\t")


def test_tree_scheme_ratio_matches_direct():
    t = ts.build_tree(FIB_ORACLE, 8)
    s = cm.max_ratio(FIB_ORACLE, 8, DELTA, scheme="tree", tree=t)
    best = 0.0
    for x, y in itertools.combinations(t.levels[8], 2):
        px, py = _path(t, x), _path(t, y)
        best = max(best, cm.d_sup_tree(px, py, DELTA, t).value / cm.d_inf(px, py, DELTA).value)
    assert s.ratio == pytest.approx(best)
    assert math.isfinite(best)
