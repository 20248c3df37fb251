import math

import numpy as np
import pytest

from muntz import goursat_kernel, identity_kernel, validate
from muntz.errors import InvalidGrid, NodeSingularity, ValidationError
from muntz.pathsim import (bridge, bridge_convergence, bridge_defect, brownian_statistics, generate,
                           iterate, mc_mean, muntz_integrals, orthogonality_statistics, transform,
                           transform_matrix)

P, M = 4096, 256


@pytest.fixture(scope="module")
def ens():
    return generate(1.0, M, P, seed=7)


@pytest.fixture(scope="module")
def kern():
    return goursat_kernel(validate([1.0, 2.0]))


def test_shape_and_grid(ens):
    assert ens.increments.shape == (P, M)
    assert ens.dt == pytest.approx(1 / M)
    X = ens.paths()
    assert np.all(X[:, 0] == 0.0)
    np.testing.assert_allclose(X[:, -1], ens.values_at(1.0))


@pytest.mark.parametrize("workers", [2, 3, 8])
def test_worker_count_irrelevant(workers):
    a = generate(1.0, 64, 1500, seed=3, workers=1)
    b = generate(1.0, 64, 1500, seed=3, workers=workers)
    np.testing.assert_array_equal(a.increments, b.increments)


def test_paths_keyed_by_index():
    a = generate(1.0, 32, 600, seed=11)
    b = generate(1.0, 32, 5, seed=11)
    np.testing.assert_array_equal(a.increments[:5], b.increments)
    c = generate(1.0, 32, 5, seed=12)
    assert not np.array_equal(b.increments, c.increments)


def test_invalid_inputs():
    with pytest.raises(InvalidGrid):
        generate(1.0, 1, 10, 0)
    with pytest.raises(InvalidGrid):
        generate(0.0, 8, 10, 0)
    with pytest.raises(ValidationError):
        generate(1.0, 8, 0, 0)
    with pytest.raises(InvalidGrid):
        generate(1.0, 8, 2, 0).index(0.3)


def test_brownian_input(ens):
    assert all(s.passed() for s in brownian_statistics(ens))


def test_transform_matrix_structure(kern, ens):
    R = transform_matrix(kern, ens.t_grid)
    assert np.allclose(np.triu(R, 1), 0.0)
    np.testing.assert_allclose(np.diag(R), kern.rho(ens.t_grid[1:] / ens.midpoints))


def test_transform_matches_direct_sum(kern):
    small = generate(1.0, 16, 3, seed=1)
    out = transform(small, kern).paths()
    s = small.midpoints
    for k in range(1, 17):
        t = small.t_grid[k]
        direct = small.increments[:, :k] @ kern.rho(t / s[:k])
        np.testing.assert_allclose(out[:, k], direct, rtol=1e-12, atol=1e-14)


def test_transform_is_brownian(ens, kern):
    out = transform(ens, kern)
    stats = brownian_statistics(out) + orthogonality_statistics(out, ens, kern)
    assert all(s.passed() for s in stats), [(s.name, s.z_score) for s in stats]


def test_iterate(ens, kern):
    levels = iterate(ens, kern, 2)
    assert len(levels) == 3 and levels[0] is ens
    assert all(s.passed() for s in brownian_statistics(levels[2]))
    assert all(s.passed() for s in orthogonality_statistics(levels[2], levels[1], kern))
    with pytest.raises(ValidationError):
        iterate(ens, kern, -1)


def test_order_zero_is_identity(ens):
    assert transform(ens, identity_kernel(validate([1.0]))) is ens


def test_zero_exponent_integral_is_path(ens):
    seq = validate([0.0, 1.0])
    I = muntz_integrals(ens, seq, 2, 1.0)
    np.testing.assert_array_equal(I[:, 0], ens.paths()[:, -1])


def test_left_rule():
    small = generate(1.0, 8, 4, seed=0)
    left = muntz_integrals(small, validate([1.0]), 1, 1.0, node="left")
    np.testing.assert_allclose(left[:, 0], small.increments @ small.t_grid[:-1])
    with pytest.raises(NodeSingularity):
        muntz_integrals(small, validate([-0.25]), 1, 1.0, node="left")
    with pytest.raises(ValidationError):
        muntz_integrals(small, validate([1.0]), 1, 1.0, node="right")


def test_brownian_bridge_exact(ens):
    kern = goursat_kernel(validate([0.0]))
    br = bridge(ens, kern)
    B = ens.paths()
    assert np.max(np.abs(br - (B - np.outer(B[:, -1], ens.t_grid)))) == 0.0


def test_bridge_constraints_vanish_with_refinement(kern):
    rms_m, rms_2m, ratio = bridge_convergence(kern, 1.0, 64, 512, seed=5)
    assert rms_2m < rms_m < 1e-3
    assert ratio > 1.3


def test_bridge_defect_shape(ens, kern):
    assert bridge_defect(ens, kern).shape == (P, 2)


def test_bridge_uncorrelated_with_constraints(ens, kern):
    br = bridge(ens, kern)
    I = muntz_integrals(ens, kern.seq, 2, 1.0)
    for j in range(2):
        assert mc_mean(br[:, M // 2] * I[:, j]).within(0.0)


def test_coarsen(ens):
    c = ens.coarsen(4)
    assert c.M == M // 4
    np.testing.assert_allclose(c.paths(), ens.paths()[:, ::4], atol=1e-12)
    with pytest.raises(InvalidGrid):
        ens.coarsen(3)


def test_mc_estimate():
    est = mc_mean(np.array([1.0, 1.0, 1.0]))
    assert est.std_error == 0.0 and math.isnan(est.z_score(1.0))
    est = mc_mean(np.array([0.0, 2.0]))
    assert est.value == 1.0 and est.std_error == pytest.approx(1.0)


def test_bridge_defect_per_path_bound(kern):
    fine = generate(1.0, 2 ** 12, 256, seed=42)
    defect = bridge_defect(fine, kern)
    assert np.max(np.abs(defect)) < 5 * math.sqrt(fine.dt)
