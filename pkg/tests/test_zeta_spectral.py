import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from apspec import sft_selfsimilar as ss
from apspec import symbolic_core as sc
from apspec import tree_structures as ts
from apspec import zeta_spectral as zs
from apspec.qfield import GOLDEN

import oracles

F2 = ss.build_substitution_graph(sc.FIBONACCI_SQUARED)
FUND = ss.maximal_fundamental(F2)
FIB_ORACLE = sc.language_of(sc.FIBONACCI)
TAU = GOLDEN.theta


def test_dirac_spectrum_fib_tree():
    tree = ts.build_tree(FIB_ORACLE, 3)
    spec = zs.dirac_spectrum(ts.horizontal_edges(tree, "max", 3), ts.RECIPROCAL)
    assert [m for _, _, m in spec.levels] == [2, 2, 2]
    assert zs.dirac_spectrum((), ts.RECIPROCAL).levels == ()


def test_dirac_spectrum_rejects_multi_edges():
    e = ts.HorizontalEdge(1, "a", "b", 1, 1, 0)
    with pytest.raises(ValueError):
        zs.dirac_spectrum([e], ts.RECIPROCAL)


def _self_similar_edges(n_max):
    return [e for n in range(n_max) for e in ss.lift_edges(F2, FUND, n)]


def test_self_similar_multiplicities_are_edge_counts():
    spec = zs.dirac_spectrum(_self_similar_edges(8), ts.LengthFunction("geometric", 0.5))
    for lev, length, m in spec.levels:
        assert m == 2 * ss.count_H_n(F2, FUND, lev)
        assert length == 0.5 ** lev


def test_partial_zeta_converges_to_closed_form():
    rho, s = 0.5, 2.0
    zf = zs.closed_form_zeta(F2, FUND, rho)
    dec = ss.edge_count_decomposition(F2, FUND)
    spec = zs.dirac_spectrum(_self_similar_edges(10), ts.LengthFunction("geometric", rho))
    pz = zs.partial_zeta(spec, s, unoriented=True, decomposition=dec, rho=rho)
    assert pz.tail_known
    exact = zf(s).real
    assert pz.value <= exact <= pz.value + pz.tail_bound + 1e-12
    at_pole = zs.partial_zeta(spec, zf.s0, unoriented=True, decomposition=dec, rho=rho)
    assert at_pole.tail_bound == math.inf


def test_partial_zeta_real_only():
    spec = zs.dirac_spectrum(_self_similar_edges(3), ts.LengthFunction("geometric", 0.5))
    with pytest.raises(TypeError):
        zs.partial_zeta(spec, 2 + 1j)


def test_basel_series_from_tree_weights():
    n = 10_000
    w = zs.tree_level_weights(FIB_ORACLE, n)
    assert set(w.tolist()) == {1}
    partial = float(np.sum(w / np.arange(1, n + 1) ** 2.0))
    # remaining terms sum to between 1/(n+1) and 1/n
    assert partial + 1 / (n + 1) - 1e-12 <= math.pi ** 2 / 6 <= partial + 1 / n + 1e-12


def test_zeta_k_equal_for_fibonacci():
    tree = ts.build_tree(FIB_ORACLE, 30)
    vals = [zs.zeta_k_tree(tree, k, ts.RECIPROCAL, 30, 1.5) for k in range(4)]
    assert max(vals) - min(vals) < 1e-12
    assert vals[0] == pytest.approx(sum((n + 1) ** -1.5 for n in range(30)), abs=1e-12)
    assert zs.zeta_max(tree, ts.RECIPROCAL, 30, 1.5) == pytest.approx(vals[0])
    flat = ts.build_tree(sc.periodic_language("ab"), 10)
    assert zs.zeta_k_tree(flat, 1, ts.RECIPROCAL, 10, 2.0) == pytest.approx(1.0)  # only the root branches


def test_full_shift_zeta_partial_sum():
    tree = ts.build_tree(sc.full_shift(), 12)
    got = zs.zeta_k_tree(tree, 1, ts.RECIPROCAL, 12, 3.0)
    assert got == pytest.approx(sum(2 ** n / (n + 1) ** 3 for n in range(12)), rel=1e-12)


def test_abscissa_estimates():
    est = zs.tree_abscissa(FIB_ORACLE, 2000)
    assert est.value == pytest.approx(1.0, abs=0.05)
    with pytest.warns(RuntimeWarning):
        full = zs.tree_abscissa(sc.full_shift(), 14)
    assert full.divergent and full.value == math.inf
    with pytest.raises(ValueError):
        zs.estimate_abscissa([1, 1, 1], [0.5, 0.25, 0.125])


def test_closed_form_f2():
    rho = 0.3
    zf = zs.closed_form_zeta(F2, FUND, rho)
    assert zf.exact
    assert zf.eigenvalues == (TAU ** 2, TAU ** -2)
    assert zf.s0 == pytest.approx(2 * math.log(oracles.TAU) / -math.log(rho), abs=1e-12)
    s = zf.s0 + 0.7
    series = oracles.dirichlet_partial([oracles.lucas(2 * n + 1) for n in range(1, 200)],
                                       [rho ** n for n in range(1, 200)], s)
    assert zf(s).real == pytest.approx(series, rel=1e-12)


def test_residue_numerically():
    zf = zs.closed_form_zeta(F2, FUND, 0.5)
    z0 = zf.pole(0)
    for eps in (1e-6, 1e-7):
        assert (eps * zf(z0 + eps)).real == pytest.approx(zf.residue(0).real, rel=1e-5)


@settings(max_examples=100, deadline=None)
@given(st.floats(1.5, 6.0), st.floats(-20.0, 20.0), st.integers(-5, 5), st.floats(0.1, 0.9))
def test_zeta_periodicity(x, y, k, rho):
    zf = zs.closed_form_zeta(F2, FUND, rho)
    z = complex(x, y)
    if abs(1 - float(TAU ** 2) * abs(rho ** z)) < 1e-3:
        return
    a, b = zf(z), zf(z + k * zf.period)
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_single_loop_zeta():
    g = ss.build_substitution_graph(sc.parse_substitution("a -> aa\n"))
    zf = zs.closed_form_zeta(g, ss.maximal_fundamental(g), 0.5)
    assert len(zf.eigenvalues) == 1
    assert zf.s0 == pytest.approx(1.0)


def test_full_triple_dimension():
    t = oracles.TAU
    assert zs.full_triple_dimension(1, t, 1 / t, 1 / t) == pytest.approx(2.0)
    assert zs.full_triple_dimension(3, t, 1 / t, t ** -2) == pytest.approx(3 * 1.5)


def test_graph_measure():
    meas = zs.graph_measure(F2, 4)
    assert meas[()] == 1.0
    pf = sc.perron(sc.FIBONACCI_SQUARED).right
    assert [meas[(v,)] for v in F2.vertices] == pytest.approx([float(x) for x in pf], abs=1e-12)
    tree = ss.build_path_tree(F2, 4)
    for n in range(4):
        for v in tree.levels[n]:
            assert sum(meas[c] for c in tree.children[v]) == pytest.approx(meas[v], abs=1e-12)


@pytest.mark.parametrize("oracle", [FIB_ORACLE, sc.language_of(sc.TRIBONACCI),
                                    sc.sturmian_oracle(sc.SturmianSlope((2,), repeat=True), 10),
                                    sc.full_shift(), sc.periodic_language("aab")])
def test_tree_measure_additivity(oracle):
    tree = ts.build_tree(oracle, 7)
    meas = zs.tree_measure(oracle, 7).weights
    assert meas[""] == pytest.approx(1.0)
    for n in range(7):
        for v in tree.levels[n]:
            assert sum(meas[c] for c in tree.children[v]) == pytest.approx(meas[v], abs=1e-10)


def test_word_frequencies_against_counts():
    word = oracles.iterate(sc.FIBONACCI.rule, "a", 22)
    freq = zs.word_frequencies(FIB_ORACLE, 3)
    for w, f in freq.items():
        assert f == pytest.approx(oracles.count_occurrences(word, w) / len(word), abs=2e-4)


def test_abscissa_geometric_lengths_deep():
    # 0.5**2000 underflows; the fit must run on log lengths
    est = zs.tree_abscissa(FIB_ORACLE, 2000, ts.LengthFunction("geometric", 0.5))
    assert math.isfinite(est.value) and 0 <= est.value < 0.02
    assert ts.LengthFunction("geometric", 0.5).log(2000) == pytest.approx(2000 * math.log(0.5))
