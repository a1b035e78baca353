"""Pisot data and the eigenvalues of the longitudinal and transversal
Dirichlet forms of a one-dimensional substitution tiling.

All eigenvalues are reported up to the global coupling constants c_lg and
c_tr, which default to 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
import cmath
import math

import numpy as np

from .qfield import QElement, field_for_discriminant
from .symbolic_core import NotPrimitiveError, Substitution, is_primitive_matrix, perron, substitution_matrix

COUPLING_NOTE = "eigenvalues up to coupling constants c_lg, c_tr (not determined; default 1)"


def characteristic_polynomial(m) -> list:
    """Integer coefficients of det(xI - M), leading first (Faddeev-LeVerrier)."""
    a = np.asarray(m, dtype=object)
    n = a.shape[0]
    coeffs = [1]
    mk = np.zeros((n, n), dtype=object)
    ident = np.identity(n, dtype=object)
    for k in range(1, n + 1):
        mk = a.dot(mk + coeffs[-1] * ident)
        c = -Fraction(int(np.trace(mk)), k)
        assert c.denominator == 1
        coeffs.append(int(c))
    return coeffs


def _polish(coeffs, z: complex) -> complex:
    p = np.poly1d([float(c) for c in coeffs])
    dp = p.deriv()
    for _ in range(50):
        d = dp(z)
        if d == 0:
            break
        step = p(z) / d
        z -= step
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return complex(z)


def _integer_poly(roots) -> list | None:
    c = np.poly(np.asarray(roots, dtype=complex))
    ints = [round(x.real) for x in c]
    if all(abs(x - i) < 1e-7 for x, i in zip(c, ints)):
        return ints
    return None


@dataclass(frozen=True)
class PisotData:
    theta: float
    char_poly: tuple
    min_poly: tuple
    conjugates: tuple  # complex, decreasing modulus
    moduli: tuple
    phases: tuple  # in [0, 2 pi)
    L: int  # number of conjugates with the subleading modulus
    unimodular: bool
    is_pisot: bool
    reason: str = ""
    exact_theta: object = None  # QElement for degree 2
    exact_conjugate: object = None

    @property
    def degree(self) -> int:
        return len(self.min_poly) - 1

    @property
    def theta_2(self) -> complex:
        return self.conjugates[0] if self.conjugates else 0j


def pisot_data(subst_or_matrix) -> PisotData:
    """Roots of the characteristic polynomial by companion eigensolve with
    Newton polishing; the minimal polynomial of the PF root is the smallest
    integer factor containing it.  Non-Pisot inputs come back with
    ``is_pisot = False`` and a reason."""
    m = substitution_matrix(subst_or_matrix) if isinstance(subst_or_matrix, Substitution) else np.asarray(subst_or_matrix)
    if not is_primitive_matrix(m):
        raise NotPrimitiveError("substitution matrix is not primitive")
    cp = characteristic_polynomial(m)
    roots = [_polish(cp, complex(z)) for z in np.roots([float(c) for c in cp])]
    i = max(range(len(roots)), key=lambda k: roots[k].real)
    theta = roots[i].real
    others = [z for k, z in enumerate(roots) if k != i]
    min_poly, conj = None, None
    for size in range(0, len(others) + 1):
        for sub in combinations(range(len(others)), size):
            cand = [theta] + [others[k] for k in sub]
            poly = _integer_poly(cand)
            if poly is not None:
                min_poly, conj = poly, [others[k] for k in sub]
                break
        if min_poly is not None:
            break
    conj.sort(key=lambda z: (-abs(z), cmath.phase(z) % (2 * math.pi)))
    moduli = tuple(abs(z) for z in conj)
    phases = tuple(cmath.phase(z) % (2 * math.pi) for z in conj)
    L = sum(1 for r in moduli if abs(r - moduli[0]) < 1e-9) if conj else 0
    unimodular = abs(min_poly[-1]) == 1
    exact_theta = exact_conj = None
    if len(min_poly) == 3:
        b, c = min_poly[1], min_poly[2]
        fld, root = field_for_discriminant(b * b - 4 * c)
        exact_theta = (root - b) / 2
        exact_conj = exact_theta.conjugate()
    if len(min_poly) == 2:
        reason = "θ is rational: the minimal polynomial has degree 1"
        pisot = False
    elif theta <= 1:
        reason = "θ <= 1"
        pisot = False
    elif any(r >= 1 for r in moduli):
        reason = "a Galois conjugate has modulus >= 1"
        pisot = False
    else:
        reason, pisot = "", True
    return PisotData(theta, tuple(cp), tuple(min_poly), tuple(conj), moduli, phases, L,
                     unimodular, pisot, reason, exact_theta, exact_conj)


def root_residuals(data: PisotData) -> list:
    """|P(z)| / max(1, |z|^deg) for theta and every conjugate."""
    p = np.poly1d([float(c) for c in data.min_poly])
    deg = data.degree
    return [abs(p(z)) / max(1.0, abs(z) ** deg) for z in (data.theta,) + data.conjugates]


# ------------------------------------------------------------ phase condition


@dataclass(frozen=True)
class PhaseVerdict:
    holds: bool
    vacuous: bool
    nearest_miss: float
    witness: tuple | None  # (j, j', k, k') of the nearest miss


def phase_condition(data: PisotData, rho_tr: float | None = None, rho_lg: float | None = None,
                    box: int = 10_000, tol: float = 1e-9, phases=None) -> PhaseVerdict:
    """alpha_j - alpha_j' + 2 pi k + 2 pi k' log(rho_tr)/log(rho_lg) != 0
    scanned over |k|, |k'| <= box.  Defaults to the standard scales
    rho_tr = |theta_2|, rho_lg = 1/theta."""
    alphas = tuple(phases) if phases is not None else data.phases[: data.L]
    if len(alphas) < 2:
        return PhaseVerdict(True, True, math.inf, None)
    rho_tr = rho_tr if rho_tr is not None else data.moduli[0]
    rho_lg = rho_lg if rho_lg is not None else 1 / data.theta
    ratio = math.log(rho_tr) / math.log(rho_lg)
    ks = np.arange(-box, box + 1)
    best, wit = math.inf, None
    for j in range(len(alphas)):
        for jj in range(len(alphas)):
            if j == jj:
                continue
            diff = alphas[j] - alphas[jj]
            # for each k', the best k is the nearest integer
            x = (diff + 2 * math.pi * ks * ratio) / (2 * math.pi)
            k = np.clip(-np.rint(x), -box, box)
            val = np.abs(2 * math.pi * (x + k))
            i = int(np.argmin(val))
            if val[i] < best:
                best, wit = float(val[i]), (j + 2, jj + 2, int(k[i]), int(ks[i]))
    return PhaseVerdict(best > tol, False, best, wit)


# ---------------------------------------------------------------- frequencies


@dataclass(frozen=True)
class FrequencyVector:
    freq: dict
    normalization: str  # "count" or "volume"

    def __getitem__(self, letter):
        return self.freq[letter]


def frequencies(subst: Substitution, normalization: str = "count", lengths: dict | None = None) -> FrequencyVector:
    """Letter frequencies (right PF vector of the substitution matrix, sum 1).
    ``volume`` weights each letter by its tile length and renormalizes."""
    pd = perron(subst)
    freq = {a: float(x) for a, x in zip(subst.alphabet, pd.right)}
    if normalization == "volume":
        if lengths is None:
            lengths = {a: float(x) for a, x in zip(subst.alphabet, pd.left)}
        total = sum(freq[a] * float(lengths[a]) for a in freq)
        freq = {a: freq[a] * float(lengths[a]) / total for a in freq}
    elif normalization != "count":
        raise ValueError(normalization)
    return FrequencyVector(freq, normalization)


# ------------------------------------------------------------------ star map


def reduced_star(data: PisotData, r):
    """Component of a return-module element along the theta_2 direction.

    ``r`` is either a quadratic-field element (degree 2, exact conjugation)
    or integer coefficients (c_0, c_1, ...) in the basis 1, theta, theta^2.
    Degree 3 with a complex pair returns the complex number whose real and
    imaginary parts are the component pair.
    """
    if data.degree > 3:
        raise NotImplementedError("reduced star map supported for degree <= 3 only")
    if not data.unimodular:
        raise ValueError("non-unimodular Pisot numbers are out of scope")
    if isinstance(r, QElement):
        if data.degree != 2:
            raise ValueError("field elements are only meaningful in degree 2")
        return r.conjugate()
    coeffs = list(r)
    if data.degree == 2 and data.exact_theta is not None:
        th = data.exact_theta
        value = sum((Fraction(c) * th ** i for i, c in enumerate(coeffs)), th.field(0))
        return value.conjugate()
    z = sum(c * data.theta_2 ** i for i, c in enumerate(coeffs))
    return z.real if abs(data.theta_2.imag) < 1e-15 else complex(z)


# ----------------------------------------------------------- eigenvalues


@dataclass(frozen=True)
class FormEigenvalue:
    """``kind`` is "value", "zero-form" (rho above threshold) or
    "not-closable" (rho below threshold)."""

    kind: str
    value: float | None = None
    note: str = COUPLING_NOTE


def regime(rho: float, threshold: float, tol: float = 1e-12) -> str:
    if abs(rho - threshold) <= tol * max(1.0, threshold):
        return "value"
    return "zero-form" if rho > threshold else "not-closable"


def edge_quadratic(beta, vector, lift: int, flavor: str, theta):
    """(beta * v_e)^2 for the edge lifted over a path of length ``lift``:
    v_e = theta^lift r_h (transversal) or theta^-lift a_h (longitudinal).
    Exact when beta, vector and theta are field elements or rationals."""
    if flavor == "transversal":
        scale = theta ** lift
    elif flavor == "longitudinal":
        scale = theta ** (-lift)
    else:
        raise ValueError(flavor)
    x = beta * scale * vector
    return x * x


def laplacian_eigenvalue(data: PisotData, freq_t: float, vector, beta: float, flavor: str,
                         c: float = 1.0, rho: float | None = None) -> FormEigenvalue:
    """Per-edge eigenvalue c (2 pi)^2 freq(t_h) X^2 with X = beta * a_h
    (longitudinal) or beta * star(r_h) (transversal, ``vector`` is r_h)."""
    if flavor == "longitudinal":
        threshold = 1 / data.theta
        x = float(vector) * beta
    elif flavor == "transversal":
        threshold = data.moduli[0]
        star = reduced_star(data, vector)
        star = float(star) if isinstance(star, QElement) else star
        x = abs(star) * beta if isinstance(star, complex) else star * beta
    else:
        raise ValueError(flavor)
    kind = regime(rho, threshold) if rho is not None else "value"
    if kind != "value":
        return FormEigenvalue(kind)
    return FormEigenvalue("value", c * (2 * math.pi) ** 2 * freq_t * x * x)


def total_eigenvalue(terms) -> FormEigenvalue:
    """Sum of per-edge values; any non-value regime propagates."""
    terms = list(terms)
    for t in terms:
        if t.kind != "value":
            return t
    return FormEigenvalue("value", sum(t.value for t in terms))


@dataclass(frozen=True)
class KMatrix:
    value: object  # d = 1: a nonnegative scalar (exact when possible)

    def __float__(self):
        return float(self.value)


def k_matrix(geometry, pairs, freq: FrequencyVector) -> KMatrix:
    """sum over longitudinal fundamental pairs of freq(t) a_h^2, t the tile
    containing both microtiles."""
    from .sft_selfsimilar import microtile_vector

    total = 0.0
    for a, b in pairs:
        ah = microtile_vector(geometry.graph, geometry, (a, b))
        t = geometry.graph.edges[a].range
        total += freq[t] * float(ah) ** 2
    return KMatrix(total)


def candidate_betas(data: PisotData, normalizer=1.0, span: int = 2) -> list:
    """Non-normative examples of frequencies beta = (m + n theta)/normalizer
    with |m|, |n| <= span, listed for documentation only."""
    out = []
    for m_ in range(-span, span + 1):
        for n_ in range(-span, span + 1):
            out.append((m_ + n_ * data.theta) / normalizer)
    return sorted(set(round(b, 12) for b in out))
