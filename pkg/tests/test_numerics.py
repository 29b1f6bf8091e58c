import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecfnorm.errors import DataError, DegenerateDataError, DomainError, InsufficientDataError, ShapeError
from ecfnorm.numerics import (
    EXP_NEG_HALF,
    RngStream,
    bessel_j0,
    circle_nodes,
    sphere_mc_nodes,
    standardize,
    standardize_batch,
    surface_area,
)


def test_exp_neg_half_constant():
    assert EXP_NEG_HALF == math.exp(-0.5)


class TestBessel:
    def test_at_zero(self):
        assert bessel_j0(0.0) == 1.0

    def test_known_values(self):
        assert abs(bessel_j0(1.0) - 0.7651976865579666) <= 1e-12
        assert abs(bessel_j0(2.404825557695773)) <= 1e-10

    @pytest.mark.parametrize("z", [0.3, 5.5, 7.99, 8.01, 12.0, 19.99, 20.01, 75.0, 199.0])
    def test_against_mpmath_across_branches(self, z):
        assert abs(bessel_j0(z) - float(mpmath.besselj(0, z))) <= 1e-13

    def test_dense_grid_to_200(self):
        z = np.linspace(0.0, 200.0, 4001)
        ref = np.array([float(mpmath.besselj(0, v)) for v in z])
        assert np.max(np.abs(bessel_j0(z) - ref)) <= 1e-12

    def test_even(self):
        z = np.linspace(-30, 30, 61)
        assert np.array_equal(bessel_j0(z), bessel_j0(-z))

    @given(st.floats(-200.0, 200.0))
    def test_bounded_by_one(self, z):
        assert abs(bessel_j0(z)) <= 1.0

    def test_scalar_matches_array(self):
        z = np.linspace(0, 60, 301)
        np.testing.assert_allclose(bessel_j0(z), [bessel_j0(v) for v in z], rtol=0, atol=1e-14)

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_non_finite(self, bad):
        with pytest.raises(DomainError):
            bessel_j0(bad)
        with pytest.raises(DomainError):
            bessel_j0(np.array([1.0, bad]))


def test_surface_area():
    assert surface_area(1) == 2.0
    assert surface_area(2) == pytest.approx(2 * math.pi, rel=1e-15)
    assert surface_area(4) == pytest.approx(2 * math.pi**2, rel=1e-15)
    assert surface_area(3) == pytest.approx(4 * math.pi, rel=1e-15)
    with pytest.raises(DomainError):
        surface_area(0)


class TestCircleNodes:
    def test_q4(self):
        s = circle_nodes(4)
        np.testing.assert_allclose(s.nodes, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-16)
        np.testing.assert_array_equal(s.weights, np.full(4, math.pi / 2))

    def test_q8_second_node(self):
        np.testing.assert_allclose(circle_nodes(8).nodes[1], [math.sqrt(0.5)] * 2, rtol=1e-15)

    @given(st.integers(4, 600))
    @settings(max_examples=40)
    def test_weights_and_norms(self, q):
        s = circle_nodes(q)
        assert abs(s.weights.sum() - 2 * math.pi) <= 1e-10
        assert np.max(np.abs(np.linalg.norm(s.nodes, axis=1) - 1)) <= 1e-12
        assert s.is_negation_closed() == (q % 2 == 0)

    def test_too_few(self):
        with pytest.raises(DomainError):
            circle_nodes(3)

    def test_read_only(self):
        with pytest.raises(ValueError):
            circle_nodes(8).nodes[0, 0] = 2.0


class TestSphereNodes:
    @pytest.mark.parametrize("symmetry", ["antithetic", "reflect"])
    @pytest.mark.parametrize("dim", [2, 4])
    def test_invariants(self, dim, symmetry):
        s = sphere_mc_nodes(dim, 64, RngStream(3, 9), symmetry=symmetry)
        assert s.Q == 64
        assert np.max(np.abs(np.linalg.norm(s.nodes, axis=1) - 1)) <= 1e-12
        assert abs(s.weights.sum() - surface_area(dim)) <= 1e-10
        assert s.is_negation_closed()

    def test_reflect_closed_under_column_sign_flips(self):
        s = sphere_mc_nodes(4, 64, RngStream(1), symmetry="reflect")
        key = {tuple(r) for r in s.nodes}
        flipped = s.nodes * np.array([1.0, -1.0, 1.0, -1.0])
        assert {tuple(r) for r in flipped} == key

    def test_deterministic(self):
        a = sphere_mc_nodes(4, 128, RngStream(7, 1))
        b = sphere_mc_nodes(4, 128, RngStream(7, 1))
        np.testing.assert_array_equal(a.nodes, b.nodes)

    def test_uniform_first_moments(self):
        s = sphere_mc_nodes(4, 40000, RngStream(2), symmetry="antithetic")
        second = s.nodes.T @ s.nodes / s.Q
        np.testing.assert_allclose(second, np.eye(4) / 4, atol=0.01)

    @pytest.mark.parametrize("dim,q", [(1, 4), (4, 7), (4, 0)])
    def test_bad_arguments(self, dim, q):
        with pytest.raises(DomainError):
            sphere_mc_nodes(dim, q, RngStream(0))

    def test_reflect_needs_multiple_of_orbit(self):
        with pytest.raises(DomainError):
            sphere_mc_nodes(4, 6, RngStream(0), symmetry="reflect")

    def test_descriptor(self):
        d = sphere_mc_nodes(4, 8, RngStream(12), symmetry="reflect").descriptor()
        assert d == {"method": "sphere-mc", "Q": 8, "node_seed": 12, "symmetry": "reflect"}


class TestRngStream:
    def test_same_key_same_draws(self):
        a = RngStream(42, 7).generator().random(5)
        b = RngStream(42, 7).generator().random(5)
        np.testing.assert_array_equal(a, b)

    def test_distinct_streams_differ(self):
        a = RngStream(42, 7).generator().random(5)
        b = RngStream(42, 8).generator().random(5)
        c = RngStream(43, 7).generator().random(5)
        assert not np.array_equal(a, b) and not np.array_equal(a, c)

    def test_tuple_ids(self):
        assert RngStream(1, (2, 3)).key == (2, 3)
        assert RngStream(1, 2).child(3) == RngStream(1, (2, 3))

    def test_independent_of_consumption_order(self):
        first = [RngStream(5, r).generator().standard_normal(3) for r in range(4)]
        second = [RngStream(5, r).generator().standard_normal(3) for r in reversed(range(4))]
        for x, y in zip(first, reversed(second)):
            np.testing.assert_array_equal(x, y)

    def test_streams_uncorrelated(self):
        a = RngStream(9, 0).generator().standard_normal(20000)
        b = RngStream(9, 1).generator().standard_normal(20000)
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.03

    def test_seed_range(self):
        with pytest.raises(DomainError):
            RngStream(-1)
        with pytest.raises(DomainError):
            RngStream(2**64)


class TestStandardize:
    def test_moments(self):
        x = np.random.default_rng(0).normal(3, 2, size=(50, 3))
        s = standardize(x)
        np.testing.assert_allclose(s.values.mean(axis=0), 0, atol=1e-14)
        np.testing.assert_allclose(s.values.var(axis=0), 1, rtol=1e-13)
        assert s.shape == (50, 3) and s.ddof == 0

    def test_ddof_one(self):
        x = np.random.default_rng(1).normal(size=(10, 1))
        s = standardize(x, ddof=1)
        np.testing.assert_allclose(s.values.var(axis=0, ddof=1), 1, rtol=1e-13)

    def test_vector_becomes_column(self):
        assert standardize([1.0, 2.0, 4.0]).shape == (3, 1)

    def test_constant_column_named(self):
        x = np.column_stack((np.arange(5.0), np.full(5, 2.0)))
        with pytest.raises(DegenerateDataError, match="column 1"):
            standardize(x)

    def test_non_finite_location(self):
        x = np.ones((4, 2))
        x[2, 1] = np.nan
        with pytest.raises(DataError, match="row 2, column 1"):
            standardize(x)

    def test_too_few_rows(self):
        with pytest.raises(InsufficientDataError):
            standardize([[1.0, 2.0]])

    def test_bad_shape(self):
        with pytest.raises(ShapeError):
            standardize(np.ones((2, 2, 2)))

    def test_batch_matches_single(self):
        xs = np.random.default_rng(2).normal(size=(4, 12, 2))
        batch = standardize_batch(xs)
        for k in range(4):
            np.testing.assert_allclose(batch[k], standardize(xs[k]).values, rtol=1e-14)

    def test_values_read_only(self):
        s = standardize([1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            s.values[0, 0] = 0.0
