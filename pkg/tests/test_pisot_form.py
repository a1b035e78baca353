import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from apspec import pisot_form as pf
from apspec import sft_selfsimilar as ss
from apspec import symbolic_core as sc
from apspec.qfield import GOLDEN

import oracles

TAU = GOLDEN.theta
FIB_DATA = pf.pisot_data(sc.FIBONACCI)


def test_characteristic_polynomial():
    assert pf.characteristic_polynomial([[1, 1], [1, 0]]) == [1, -1, -1]
    assert pf.characteristic_polynomial(sc.substitution_matrix(sc.TRIBONACCI)) == [1, -1, -1, -1]
    m = np.array([[2, 1, 0], [1, 0, 3], [0, 1, 1]])
    assert np.allclose(pf.characteristic_polynomial(m), np.poly(m))


def test_fibonacci_data():
    d = FIB_DATA
    assert d.is_pisot and d.unimodular and d.L == 1 and d.degree == 2
    assert d.exact_theta == TAU and d.exact_conjugate == 1 - TAU
    assert d.theta * d.theta_2.real == pytest.approx(-1.0, abs=1e-14)
    assert max(pf.root_residuals(d)) < 1e-14


def test_reducible_matrix_not_pisot():
    d = pf.pisot_data(np.array([[1, 1], [1, 1]]))
    assert d.char_poly == (1, -2, 0)
    assert not d.is_pisot and "rational" in d.reason


def test_tribonacci_data():
    d = pf.pisot_data(sc.TRIBONACCI)
    assert d.is_pisot and d.degree == 3 and d.L == 2
    assert all(r < 1 for r in d.moduli)
    assert d.conjugates[0] == pytest.approx(d.conjugates[1].conjugate())
    assert max(pf.root_residuals(d)) < 1e-12


def test_phase_condition():
    assert pf.phase_condition(FIB_DATA).vacuous
    trib = pf.pisot_data(sc.TRIBONACCI)
    v = pf.phase_condition(trib)
    assert v.holds and not v.vacuous and v.nearest_miss > 0.1
    bad = pf.phase_condition(trib, phases=(1.0, 1.0))
    assert not bad.holds and bad.witness[2:] == (0, 0)


def test_frequencies():
    f = pf.frequencies(sc.FIBONACCI)
    assert f["a"] == pytest.approx(float(TAU - 1), abs=1e-14)
    assert f["b"] == pytest.approx(float(2 - TAU), abs=1e-14)
    word = oracles.iterate(sc.FIBONACCI.rule, "a", 12)
    assert word.count("a") / len(word) == pytest.approx(f["a"], abs=2 / len(word))
    assert pf.frequencies(sc.parse_substitution("a -> aa\n"))["a"] == 1.0
    vol = pf.frequencies(sc.FIBONACCI, "volume")
    assert sum(vol.freq.values()) == pytest.approx(1.0)


def test_letter_frequency_convergence_rate():
    f = pf.frequencies(sc.FIBONACCI)["a"]
    ratio = abs(FIB_DATA.theta_2) / FIB_DATA.theta
    for k in (10, 14, 18):
        w = oracles.iterate(sc.FIBONACCI.rule, "a", k)
        assert abs(w.count("a") / len(w) - f) <= 2 * ratio ** k


def test_reduced_star():
    assert pf.reduced_star(FIB_DATA, 1 + TAU) == 2 - TAU
    assert pf.reduced_star(FIB_DATA, GOLDEN(0)) == 0
    x = GOLDEN(3, -2)
    for n in range(5):
        assert pf.reduced_star(FIB_DATA, TAU ** n * x) == (1 - TAU) ** n * pf.reduced_star(FIB_DATA, x)
    assert pf.reduced_star(FIB_DATA, (1, 1)) == 2 - TAU


def test_eigenvalue_formula():
    fa = pf.frequencies(sc.FIBONACCI)["a"]
    geom = ss.tile_geometry(ss.build_substitution_graph(sc.FIBONACCI))
    ah = geom.lengths["a"] / geom.theta
    ev = pf.laplacian_eigenvalue(FIB_DATA, fa, ah, 1.0, "longitudinal")
    assert ev.value == pytest.approx((2 * math.pi) ** 2 * fa * float(ah) ** 2, rel=1e-14)
    assert pf.laplacian_eigenvalue(FIB_DATA, fa, ah, 0.0, "longitudinal").value == 0
    assert "coupling" in ev.note


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 10.0), st.integers(0, 4))
def test_eigenvalue_quadratic_in_beta(beta, n):
    fa = pf.frequencies(sc.FIBONACCI)["a"]
    one = pf.laplacian_eigenvalue(FIB_DATA, fa, TAU ** n, beta, "transversal").value
    two = pf.laplacian_eigenvalue(FIB_DATA, fa, TAU ** n, 2 * beta, "transversal").value
    assert two == pytest.approx(4 * one, rel=1e-12)


@pytest.mark.parametrize("lift", range(0, 5))
def test_edge_lifting_exact(lift):
    vec = 1 + TAU
    for flavor, power in (("transversal", 2 * lift), ("longitudinal", -2 * lift)):
        base = pf.edge_quadratic(1, vec, 0, flavor, TAU)
        lifted = pf.edge_quadratic(1, vec, lift, flavor, TAU)
        assert lifted == TAU ** power * base


def test_regimes():
    th = 1 / FIB_DATA.theta
    assert pf.regime(th, th) == "value"
    assert pf.laplacian_eigenvalue(FIB_DATA, 0.5, 1.0, 1.0, "longitudinal", rho=0.9).kind == "zero-form"
    assert pf.laplacian_eigenvalue(FIB_DATA, 0.5, 1.0, 1.0, "longitudinal", rho=0.3).kind == "not-closable"
    terms = [pf.FormEigenvalue("value", 1.0), pf.FormEigenvalue("zero-form")]
    assert pf.total_eigenvalue(terms).kind == "zero-form"


def test_k_matrix():
    graph = ss.build_substitution_graph(sc.FIBONACCI)
    geom = ss.tile_geometry(graph)
    freq = pf.frequencies(sc.FIBONACCI)
    assert float(pf.k_matrix(geom, [], freq)) == 0.0
    pair = (graph.edge("ȧb").id, graph.edge("aḃ").id)
    ah = ss.microtile_vector(graph, geom, pair)
    assert float(pf.k_matrix(geom, [pair], freq)) == pytest.approx(freq["a"] * float(ah) ** 2)


def test_degree_four_star_not_supported():
    d = pf.pisot_data(np.array([[1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]]).T)
    if d.degree > 3:
        with pytest.raises(NotImplementedError):
            pf.reduced_star(d, (1, 0, 0, 0))
