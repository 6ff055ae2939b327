"""Tests for observable dictionaries and kernels.

Monomial counts come from the binomial identity C(dim + degree, degree); the
weighted dictionary is checked against the kernel it is supposed to factor.
"""

from __future__ import annotations

from math import comb

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from dmdkit.errors import ConfigError, ShapeError
from dmdkit.observables import (
    CustomDictionary,
    GaussianKernel,
    IdentityDictionary,
    LaplacianKernel,
    PolynomialDictionary,
    PolynomialKernel,
    RbfDictionary,
    build_dictionary,
    monomial_exponents,
    parse_kernel,
    strided_centers,
)

# ---------------------------------------------------------------- dictionaries


def test_identity_dictionary_returns_state():
    d = IdentityDictionary(3)
    z = np.array([1.0, -2.0, 0.5])
    assert_array_equal(d.transform(z), z)
    assert d.size == 3


def test_polynomial_count_matches_binomial_identity():
    for dim in (1, 2, 3, 4):
        for degree in (1, 2, 3):
            d = PolynomialDictionary(dim, degree)
            assert d.size == comb(dim + degree, degree)


def test_polynomial_ordering_two_vars_degree_two():
    d = PolynomialDictionary(2, 2)
    assert_array_equal(
        d.exponents, [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]
    )
    assert d.names == ("1", "x1", "x2", "x1^2", "x1*x2", "x2^2")
    theta = d.transform(np.array([2.0, 3.0]))
    assert_allclose(theta, [1.0, 2.0, 3.0, 4.0, 6.0, 9.0])


def test_polynomial_batch_matches_single_columns():
    rng = np.random.default_rng(2)
    d = PolynomialDictionary(3, 2)
    cols = rng.standard_normal((3, 7))
    batch = d.transform(cols)
    for j in range(7):
        assert_allclose(batch[:, j], d.transform(cols[:, j]))


def test_weighted_polynomial_factors_the_polynomial_kernel():
    # theta_w(a) . theta_w(b) == (1 + a.b)^degree, the feature-map identity.
    rng = np.random.default_rng(13)
    for dim in (1, 2, 3):
        for degree in (1, 2, 3, 4):
            d = PolynomialDictionary(dim, degree, weighted=True)
            k = PolynomialKernel(degree)
            for _ in range(5):
                a = rng.standard_normal(dim)
                b = rng.standard_normal(dim)
                lhs = d.transform(a) @ d.transform(b)
                assert_allclose(lhs, k(a, b), rtol=1e-10)


def test_degree_validation():
    with pytest.raises(ConfigError):
        PolynomialDictionary(2, 0)
    with pytest.raises(ConfigError):
        PolynomialKernel(-1)


def test_rbf_dictionary_shape_and_finiteness_at_zero():
    centers = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 0.0]])
    d = RbfDictionary(centers, width=0.7)
    theta = d.transform(np.zeros(2))
    assert theta.shape == (3,)
    assert np.all(np.isfinite(theta))
    assert_allclose(theta[0], 1.0)  # at its own center


def test_rbf_width_must_be_positive():
    with pytest.raises(ConfigError):
        RbfDictionary(np.zeros((2, 2)), width=0.0)


def test_strided_centers_deterministic_and_bounded():
    x = np.arange(20.0).reshape(2, 10)
    c = strided_centers(x, 4)
    assert c.shape == (4, 2)
    assert_array_equal(c, strided_centers(x, 4))
    assert_array_equal(c[0], x[:, 0])
    assert_array_equal(c[-1], x[:, -1])
    with pytest.raises(ConfigError):
        strided_centers(x, 11)


def test_custom_dictionary_named_functions():
    d = CustomDictionary(
        2,
        [
            ("1", lambda z: 1.0),
            ("x1", lambda z: z[0]),
            ("x1^2", lambda z: z[0] ** 2),
        ],
    )
    assert d.names == ("1", "x1", "x1^2")
    assert_allclose(d.transform(np.array([3.0, 5.0])), [1.0, 3.0, 9.0])


def test_dictionary_dimension_mismatch():
    d = PolynomialDictionary(2, 2)
    with pytest.raises(ShapeError):
        d.transform(np.ones(3))


# --------------------------------------------------------------------- kernels


def test_polynomial_kernel_on_orthonormal_columns():
    e = np.eye(2)
    g = PolynomialKernel(1).gram(e, e)
    assert_allclose(g, [[2.0, 1.0], [1.0, 2.0]])


def test_gaussian_kernel_hand_value_and_symmetry():
    k = GaussianKernel(0.5)
    a = np.array([1.0, 0.0])
    b = np.array([0.0, 1.0])
    assert_allclose(k(a, b), np.exp(-2.0 / 0.25))
    assert k(a, b) == k(b, a)


def test_laplacian_kernel_uses_unsquared_distance():
    k = LaplacianKernel(0.5)
    a = np.array([1.0, 0.0])
    b = np.array([0.0, 1.0])
    assert_allclose(k(a, b), np.exp(-np.sqrt(2.0) / 0.25))


def test_gaussian_gram_is_positive_semidefinite():
    rng = np.random.default_rng(17)
    x = rng.standard_normal((3, 12))
    g = GaussianKernel(1.3).gram(x, x)
    assert_allclose(g, g.T, atol=1e-12)
    evals = np.linalg.eigvalsh((g + g.T) / 2)
    assert evals.min() >= -1e-10 * evals.max()


def test_kernel_width_validation():
    with pytest.raises(ConfigError):
        GaussianKernel(0.0)
    with pytest.raises(ConfigError):
        LaplacianKernel(-1.0)


# ----------------------------------------------------------------- spec parsing


def test_parse_kernel_round_trips():
    for spec, cls in [("poly:3", PolynomialKernel), ("gaussian:0.7", GaussianKernel),
                      ("laplacian:0.5", LaplacianKernel)]:
        k = parse_kernel(spec)
        assert isinstance(k, cls)
        assert parse_kernel(k.spec_string()).spec_string() == k.spec_string()


def test_build_dictionary_from_specs():
    assert isinstance(build_dictionary("identity", 3), IdentityDictionary)
    d = build_dictionary("poly:2", 2)
    assert isinstance(d, PolynomialDictionary) and not d.weighted
    w = build_dictionary("wpoly:2", 2)
    assert w.weighted
    snaps = np.arange(12.0).reshape(2, 6)
    r = build_dictionary("rbf:0.5:3", 2, snapshots=snaps)
    assert isinstance(r, RbfDictionary) and r.size == 3


@pytest.mark.parametrize(
    "spec",
    ["poly", "poly:x", "poly:0", "rbf:0.5", "mystery:1", "gaussian", "gaussian:0"],
)
def test_malformed_specs_are_config_errors(spec):
    with pytest.raises(ConfigError):
        parse_kernel(spec) if spec.startswith("gaussian") else build_dictionary(spec, 2, np.ones((2, 4)))


def test_rbf_spec_needs_snapshots():
    with pytest.raises(ConfigError):
        build_dictionary("rbf:0.5:3", 2)
