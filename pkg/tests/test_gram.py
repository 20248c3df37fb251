from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from muntz import build_basis, covariance_matrix, goursat_kernel, gram_pair, inverse_closed, validate
from muntz.errors import DomainError
from muntz.gram import (alpha_tail_integral, goursat_phi, reproducing_kernel_eval,
                        reproduction_residual)

from conftest import exponent_lists


def exact_inverse(lams):
    """Gauss-Jordan inverse of the Cauchy matrix 1/(l_i + l_j + 1) in rationals."""
    lam = [Fraction(x) for x in lams]
    n = len(lam)
    A = [[1 / (lam[i] + lam[j] + 1) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
         for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        A[c] = [v / A[c][c] for v in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return np.array([[float(v) for v in row[n:]] for row in A])


def test_reference_inverse(kern12):
    np.testing.assert_allclose(inverse_closed(kern12), [[48, -60], [-60, 80]], atol=1e-9)


@pytest.mark.parametrize("lams", [[0.0, 1.0, 2.0], [0.5, 1.5, 2.5, 4.0], [-0.25, 0.75, 1.0, 3.0, 5.0]])
def test_matches_rational_inverse(lams):
    kern = goursat_kernel(validate(lams))
    np.testing.assert_allclose(inverse_closed(kern), exact_inverse(lams), rtol=1e-9)


@given(exponent_lists(max_size=6, gap=0.5), st.floats(0.1, 5.0))
def test_inverse_identity(lams, t):
    pair = gram_pair(goursat_kernel(validate(lams)), t)
    # rounding in m @ alpha is bounded by eps * ||m|| * ||alpha||, i.e. by the condition number
    bound = 1e-14 * np.linalg.norm(pair.m) * np.linalg.norm(pair.alpha)
    assert pair.residual < max(1e-8, bound)
    np.testing.assert_allclose(pair.m, pair.m.T)


def test_time_scaling(kern12):
    m1, m2 = covariance_matrix(kern12.seq, 2, 1.0), covariance_matrix(kern12.seq, 2, 2.0)
    s = np.add.outer(kern12.lambdas, kern12.lambdas) + 1
    np.testing.assert_allclose(m2, m1 * 2.0 ** s)


def test_condition_number(kern12):
    c = gram_pair(kern12).condition_number()
    ev = np.linalg.eigvals(np.array([[1 / 3, 1 / 4], [1 / 4, 1 / 5]]))
    assert c == pytest.approx(ev.max() / ev.min(), rel=1e-12)


def test_phi_factorisation(kern12):
    for t in (0.5, 1.0, 3.0):
        phi = goursat_phi(kern12, t)
        for s in (0.1, 0.4):
            assert kern12.k(t, s) == pytest.approx(phi @ (s ** kern12.lambdas), rel=1e-12)


def test_alpha_tail_integral(kern12):
    t = 1.5
    tail = alpha_tail_integral(kern12, t)
    for i in range(2):
        for j in range(2):
            f = lambda u: goursat_phi(kern12, u, check=False)[i] * goursat_phi(kern12, u, check=False)[j]
            val, _ = quad(f, t, np.inf)
            assert tail[i, j] == pytest.approx(val, rel=1e-8)
    np.testing.assert_allclose(tail, inverse_closed(kern12, t), rtol=1e-12)


@given(exponent_lists(max_size=5, gap=0.5), st.floats(0.2, 4.0))
def test_reproducing_kernel(lams, t):
    kern = goursat_kernel(validate(lams))
    assert reproduction_residual(build_basis(kern.seq), t, kern) < 1e-10 * max(1.0, np.abs(kern.a).max())


def test_reproducing_kernel_by_quadrature(kern12):
    basis = build_basis(kern12.seq)
    t, u = 2.0, 0.7
    for lam in kern12.lambdas:
        val, _ = quad(lambda v: reproducing_kernel_eval(basis, t, u, v) * v ** lam, 0, t)
        assert val == pytest.approx(u ** lam, abs=1e-10)


def test_domain_errors(kern12):
    with pytest.raises(DomainError):
        inverse_closed(kern12, 0.0)
    with pytest.raises(DomainError):
        reproducing_kernel_eval(build_basis(kern12.seq), 1.0, 1.5, 0.5)
