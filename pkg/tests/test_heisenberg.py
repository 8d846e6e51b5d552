import cmath
import math

import numpy as np
import pytest

from dnhirota.algebra import bracket, killing_form, membership_check, sigma, weyl_generators
from dnhirota.errors import InvalidTagError, ProportionalityError
from dnhirota.exponents import (
    ZERO,
    ZERO_PRIME,
    EigenvalueTag,
    Exponent,
    ExponentLabel,
    exponent_labels,
    negate_label,
    negate_tag,
    positive_exponents,
    root,
    validate_label,
)
from dnhirota.heisenberg import (
    all_tags,
    beta_closed,
    beta_extract,
    cyclic_element,
    dual_bases,
    eta,
    g_closed,
    g_extract,
    g_sum_target,
    heisenberg_basis,
    hierarchy_coefficients,
    kappa,
    omega_power,
    root_matrix,
    tag_value,
)

from .conftest import RANKS

EPS = 1e-9


def L(v, primed=False):
    return ExponentLabel(v, primed)


# ---------------------------------------------------------------- labels


def test_exponent_labels():
    assert [str(x) for x in exponent_labels(4)] == ["1", "3", "3p", "5"]
    assert [str(x) for x in exponent_labels(5)] == ["1", "3", "4p", "5", "7"]
    assert ExponentLabel.parse("3'") == L(3, True) == ExponentLabel.parse("3p")
    with pytest.raises(InvalidTagError):
        validate_label(4, L(2))
    with pytest.raises(InvalidTagError):
        validate_label(4, L(4, True))


def test_negate_label():
    assert negate_label(4, L(1)) == L(5)
    assert negate_label(4, L(3, True)) == L(3, True)


def test_positive_exponents():
    names = [e.name(6) for e in positive_exponents(4, 9)]
    assert names == ["1", "3", "3p", "5", "7", "9", "9p"]
    assert Exponent(L(3, True), 1).value(6) == 9


def test_eigenvalue_tags():
    assert negate_tag(4, root(1)) == root(4)
    assert negate_tag(4, ZERO) == ZERO
    assert negate_tag(4, ZERO_PRIME) == ZERO_PRIME
    with pytest.raises(InvalidTagError):
        EigenvalueTag("other")
    with pytest.raises(InvalidTagError):
        eta(4, root(6))


# ---------------------------------------------------------------- basis


def test_omega_power_reduces():
    assert omega_power(4, 6 * 10**6 + 1) == pytest.approx(cmath.exp(1j * math.pi / 3), abs=1e-15)
    assert kappa(4) == 1 and kappa(5) == 1j


def test_t3prime_n4_literal():
    T = heisenberg_basis(4)[L(3, True)]
    r3 = math.sqrt(3)
    expected = {(4, 1): r3, (5, 1): -r3 / 2, (4, 8): -r3 / 2, (5, 8): r3 / 4,
                (8, 5): r3, (8, 4): -r3 / 2, (1, 5): -r3 / 2, (1, 4): r3 / 4}
    dense = np.zeros((8, 8), dtype=complex)
    for (i, j), v in expected.items():
        dense[i - 1, j - 1] = v
    assert np.allclose(T, dense)


@pytest.mark.parametrize("n", RANKS)
def test_heisenberg_basis_commutes(n):
    T = heisenberg_basis(n)
    Lam = cyclic_element(n)
    assert np.allclose(T[L(1)], Lam)
    for a in T.values():
        assert membership_check(a)
        assert np.max(np.abs(bracket(Lam, a))) <= EPS
        for b in T.values():
            assert np.max(np.abs(bracket(a, b))) <= EPS


@pytest.mark.parametrize("n", RANKS)
def test_heisenberg_pairing(n):
    # (T_i | T_j) = h/2 when i + j = 0 mod h; the primed element pairs with itself
    T = heisenberg_basis(n)
    for a, A in T.items():
        for b, B in T.items():
            if a.primed or b.primed:
                want = n - 1 if a == b else 0
            else:
                want = n - 1 if a.value + b.value == 2 * n - 2 else 0
            assert abs(killing_form(A, B) - want) <= EPS, (a, b)


def test_cyclic_element_not_generic_on_zero_eigenspace():
    # Lambda has rank 2n-2: the zero eigenvalue is doubled
    assert np.linalg.matrix_rank(cyclic_element(5)) == 8


@pytest.mark.parametrize("n", RANKS)
def test_eta_eigenvectors(n):
    Lam = cyclic_element(n)
    Tp = heisenberg_basis(n)[L(n - 1, True)]
    vecs = []
    for tag in all_tags(n):
        v = eta(n, tag)
        vecs.append(v)
        assert np.allclose(Lam @ v, tag_value(n, tag) * v, atol=EPS)
        # every eta is also an eigenvector of the primed element
        w = Tp @ v
        k = int(np.argmax(np.abs(v)))
        assert np.allclose(w, (w[k] / v[k]) * v, atol=EPS)
    assert abs(np.linalg.det(np.array(vecs))) > 1e-6


def test_zero_eigenvectors_split_the_primed_element():
    n = 4
    Tp = heisenberg_basis(n)[L(3, True)]
    a = Tp @ eta(n, ZERO)
    b = Tp @ eta(n, ZERO_PRIME)
    k = 0
    assert a[k] / eta(n, ZERO)[k] == pytest.approx(-b[k] / eta(n, ZERO_PRIME)[k])


def _tag_eigen(n, tag):
    return tag_value(n, tag)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_root_matrix_is_lambda_eigenvector(n):
    Lam = cyclic_element(n)
    for a in all_tags(n):
        for b in all_tags(n):
            A = root_matrix(n, a, b)
            assert membership_check(A)
            lam = _tag_eigen(n, a) + _tag_eigen(n, b)
            assert np.max(np.abs(bracket(Lam, A) - lam * A)) <= 1e-9


def test_root_matrix_plain_transpose_is_wrong():
    # reading eta^T as the ordinary transpose breaks the commutator relation
    n = 4
    Lam = cyclic_element(n)
    a, b = root(0), root(1)
    bad = sigma(np.outer(eta(n, a), eta(n, negate_tag(n, b))))
    lam = _tag_eigen(n, a) + _tag_eigen(n, b)
    assert np.max(np.abs(bracket(Lam, bad) - lam * bad)) > 1e-3


# ---------------------------------------------------------------- dual bases


@pytest.mark.parametrize("n", RANKS)
def test_dual_bases_gram_matrix(n):
    b = dual_bases(n)
    h = b.h
    for r in range(1, n + 1):
        for s in range(1, n + 1):
            for m in range(h):
                for k in range(h):
                    want = 1.0 if (r == s and (m + k) % h == 0) else 0.0
                    assert abs(killing_form(b.X[r][m], b.Y[s][k]) - want) <= EPS


@pytest.mark.parametrize("n", RANKS)
def test_dual_bases_components_graded(n):
    b = dual_bases(n)
    Lam = cyclic_element(n)
    for r in range(1, n + 1):
        total = sum(b.X[r])
        for m in range(b.h):
            assert membership_check(b.X[r][m])
        # the pieces recombine to an eigenvector of ad Lambda
        ev = bracket(Lam, total)
        k = np.unravel_index(np.argmax(np.abs(total)), total.shape)
        assert np.allclose(ev, ev[k] / total[k] * total, atol=1e-9)


def test_beta_literal_n4():
    assert beta_closed(4, 1, L(1)) == pytest.approx(math.sqrt(2) * (1 + cmath.exp(1j * math.pi / 3)))
    b = dual_bases(4)
    assert beta_extract(1, L(1), b) == pytest.approx(math.sqrt(2) * (1 + cmath.exp(1j * math.pi / 3)))


@pytest.mark.parametrize("n", RANKS)
def test_beta_extract_matches_closed(n):
    b = dual_bases(n)
    for r in range(1, n + 1):
        for lab in exponent_labels(n):
            assert abs(beta_extract(r, lab, b) - beta_closed(n, r, lab)) <= EPS


def test_beta_primed_values():
    n = 5
    assert beta_closed(n, n - 1, L(4, True)) == pytest.approx(math.sqrt(8))
    assert beta_closed(n, n, L(4, True)) == pytest.approx(-math.sqrt(8))
    assert beta_closed(n, 2, L(4, True)) == 0


def test_beta_extract_rejects_non_eigen():
    b = dual_bases(4)
    X = dict(b.X)
    X[1] = list(X[1])
    X[1][0] = X[1][0] + b.X[2][0]
    with pytest.raises(ProportionalityError):
        beta_extract(1, L(1), type(b)(4, X, b.Y, b.x_scale, b.y_scale))


def test_g_literals():
    n4 = [g_closed(4, r) for r in range(1, 5)]
    assert np.allclose(n4, [0.5, 4.5, 4.5, 4.5])
    n5 = [g_closed(5, r) for r in range(1, 6)]
    r2 = math.sqrt(2)
    assert np.allclose(n5, [6 - 4 * r2, 2, 6 + 4 * r2, 8, 8])


@pytest.mark.parametrize("n", RANKS)
def test_g_extract_matches_closed_and_sum(n):
    b = dual_bases(n)
    g = [g_extract(r, b) for r in range(1, n + 1)]
    assert np.allclose(g, [g_closed(n, r) for r in range(1, n + 1)], atol=EPS)
    assert abs(sum(g) - g_sum_target(n)) <= EPS
    assert g_sum_target(n) == pytest.approx(n * (n - 1) * (2 * n - 1) / 6)


def test_g_sum_small_ranks():
    assert [g_sum_target(n) for n in range(3, 9)] == [5, 14, 30, 55, 91, 140]


@pytest.mark.parametrize("n", [4, 5])
def test_rescaling_invariance(n, rng):
    b = dual_bases(n)
    factors = {r: complex(*rng.normal(size=2)) + 0.5 for r in range(1, n + 1)}
    c = b.rescaled(factors)
    for r in range(1, n + 1):
        assert g_extract(r, c) == pytest.approx(g_extract(r, b), abs=1e-9)
        for lab in exponent_labels(n):
            assert beta_extract(r, lab, c) == pytest.approx(beta_extract(r, lab, b), abs=1e-9)


def test_hierarchy_coefficients_routes():
    a = hierarchy_coefficients(4, "extract")
    c = hierarchy_coefficients(4, "closed")
    assert a.source == "extract" and c.source == "closed"
    for key in a.beta:
        assert a.beta[key] == pytest.approx(c.beta[key], abs=1e-12)
    for r in a.g:
        assert a.g[r] == pytest.approx(c.g[r], abs=1e-12)
        assert a.rho_x[r] * a.rho_y[r] == pytest.approx(a.g[r])
    p = a.perturbed(0.01)
    assert p.beta[(1, L(1))] - a.beta[(1, L(1))] == pytest.approx(0.01)
    assert p.beta_neg(1, L(5)) == p.beta[(1, L(1))]
    with pytest.raises(ValueError):
        hierarchy_coefficients(4, "guess")


def test_weyl_generators_immutable():
    ws = weyl_generators(4)
    with pytest.raises(ValueError):
        ws.e[0][0, 0] = 1
