import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ecfnorm.errors import ConfigError, CostGuardError, ShapeError
from ecfnorm.numerics import EXP_NEG_HALF, circle_nodes, sphere_mc_nodes, RngStream, standardize
from ecfnorm.statistic import (
    QuadratureConfig,
    build_nodes,
    cf_discrepancy,
    ecf_eval,
    m1_exact,
    m2,
    m_stat,
    m_stat_batch,
    mm_naive_oracle,
    upper_bound,
)


def m1_mpmath(x):
    """Closed form evaluated in 30-digit arithmetic."""
    mpmath.mp.dps = 30
    x = [mpmath.mpf(v) for v in x]
    n = len(x)
    mean = sum(x) / n
    sd = mpmath.sqrt(sum((v - mean) ** 2 for v in x) / n)
    z = [(v - mean) / sd for v in x]
    quad = sum(mpmath.besselj(0, mpmath.sqrt((a - b) ** 2 + (c - d) ** 2))
               for a in z for b in z for c in z for d in z)
    pair = sum(mpmath.besselj(0, mpmath.sqrt(a * a + b * b)) for a in z for b in z)
    e = mpmath.exp(-0.5)
    return float(2 * mpmath.pi * n * (quad / n**4 - 2 * e * pair / n**2 + e * e))


class TestClosedForm:
    def test_two_point_sample(self):
        # standardized {-1, 1}; value from the Bessel formula by hand
        assert m1_exact([-1.0, 1.0]).value == pytest.approx(0.030458418855872714, rel=1e-12)

    def test_against_mpmath(self):
        x = np.random.default_rng(4).standard_t(3, size=7)
        assert m1_exact(x).value == pytest.approx(m1_mpmath(x), rel=1e-11)

    @pytest.mark.parametrize("n", [2, 5, 17, 40])
    def test_matches_trapezoid(self, n):
        x = np.random.default_rng(n).gamma(2.0, size=n)
        exact = m1_exact(x).value
        quad = m_stat(x, QuadratureConfig.default(1)).value
        assert abs(exact - quad) <= 1e-9 * max(exact, 1e-12)

    def test_metadata(self):
        v = m1_exact(np.arange(6.0))
        assert v.method == "closed-form" and v.m == 1 and v.n == 6
        assert v.target_constant == EXP_NEG_HALF
        assert float(v) == v.value

    def test_cost_guard(self):
        x = np.random.default_rng(0).normal(size=129)
        with pytest.raises(CostGuardError):
            m1_exact(x)
        assert m1_exact(x, max_n=None).value > 0

    def test_needs_one_column(self):
        with pytest.raises(ShapeError):
            m1_exact(np.random.default_rng(0).normal(size=(5, 2)))


class TestQuadrature:
    def test_oracle_univariate(self):
        x = np.random.default_rng(1).exponential(size=9)
        nodes = circle_nodes(64)
        assert m_stat(x, nodes=nodes).value == pytest.approx(mm_naive_oracle(x, nodes).value, rel=1e-10)

    def test_oracle_bivariate(self):
        x = np.random.default_rng(2).normal(size=(8, 2)) ** 2
        nodes = build_nodes(QuadratureConfig.default(2, Q=256), 2)
        assert m_stat(x, nodes=nodes).value == pytest.approx(mm_naive_oracle(x, nodes).value, rel=1e-10)

    def test_oracle_without_antipodal_shortcut(self):
        x = np.random.default_rng(3).normal(size=(6, 2))
        nodes = sphere_mc_nodes(4, 51 * 2, RngStream(1), symmetry="antithetic")
        odd = type(nodes)(4, nodes.nodes[:-1], nodes.weights[:-1], nodes.method)
        assert not odd.is_negation_closed()
        assert m_stat(x, nodes=odd).value == pytest.approx(mm_naive_oracle(x, odd).value, rel=1e-10)

    def test_oracle_cost_guard(self):
        with pytest.raises(CostGuardError):
            mm_naive_oracle(np.arange(20.0), circle_nodes(8))

    def test_three_columns(self):
        x = np.random.default_rng(5).normal(size=(7, 3))
        cfg = QuadratureConfig("sphere-mc", 256, 1)
        assert m_stat(x, cfg).value == pytest.approx(mm_naive_oracle(x, build_nodes(cfg, 3)).value, rel=1e-10)

    def test_m2_descriptor(self):
        v = m2(np.random.default_rng(0).normal(size=(20, 2)))
        assert v.quadrature == {"method": "sphere-mc", "Q": 4096, "node_seed": 0, "symmetry": "reflect"}
        assert v.Q == 4096 and v.m == 2

    def test_m2_rejects_wrong_shape(self):
        with pytest.raises(ShapeError):
            m2(np.arange(10.0))
        with pytest.raises(ConfigError):
            m2(np.ones((3, 2)) + np.eye(3, 2), QuadratureConfig("circle-trapezoid", 512))

    def test_node_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            m_stat(np.random.default_rng(0).normal(size=(6, 2)), nodes=circle_nodes(16))

    def test_batch_matches_single(self):
        samples = [standardize(np.random.default_rng(k).normal(size=(10, 2))) for k in range(5)]
        nodes = build_nodes(QuadratureConfig.default(2, Q=512), 2)
        batch = m_stat_batch(np.stack([s.values for s in samples]), nodes)
        single = [m_stat(s, nodes=nodes).value for s in samples]
        np.testing.assert_allclose(batch, single, rtol=1e-13)

    def test_threads_do_not_change_values(self):
        xs = np.stack([standardize(np.random.default_rng(k).normal(size=(15, 2))).values
                       for k in range(40)])
        nodes = build_nodes(QuadratureConfig.default(2, Q=512), 2)
        np.testing.assert_array_equal(m_stat_batch(xs, nodes, 1), m_stat_batch(xs, nodes, 4))

    def test_nodes_cached(self):
        cfg = QuadratureConfig.default(2, node_seed=3)
        assert build_nodes(cfg, 2) is build_nodes(QuadratureConfig.default(2, node_seed=3), 2)


class TestQuadratureConfig:
    def test_defaults(self):
        assert QuadratureConfig.default(1) == QuadratureConfig("circle-trapezoid", 512, 0)
        assert QuadratureConfig.default(2).Q == 4096

    def test_round_trip(self):
        cfg = QuadratureConfig("sphere-mc", 1024, 77)
        assert QuadratureConfig.from_descriptor(cfg.descriptor()) == cfg

    @pytest.mark.parametrize("kwargs", [dict(method="gauss"), dict(Q=2), dict(node_seed=-1)])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            QuadratureConfig(**kwargs)

    def test_validate(self):
        with pytest.raises(ConfigError):
            QuadratureConfig("circle-trapezoid", 512).validate_for(2)
        with pytest.raises(ConfigError):
            QuadratureConfig("sphere-mc", 4098).validate_for(2)


class TestProperties:
    def test_population_cf_gives_zero(self):
        # the N(0, I) characteristic function equals exp(-1/2) on the unit sphere
        def normal_cf(t):
            return np.exp(-0.5 * np.sum(t * t, axis=1))

        for nodes in (circle_nodes(64), build_nodes(QuadratureConfig.default(2, Q=256), 2)):
            assert cf_discrepancy(normal_cf, nodes) <= 1e-28

    def test_ecf_at_origin(self):
        assert ecf_eval(np.random.default_rng(0).normal(size=(5, 2)), [0.0, 0.0]) == 1.0

    def test_ecf_shape_check(self):
        with pytest.raises(ShapeError):
            ecf_eval(np.arange(5.0), [1.0, 2.0])

    @given(arrays(np.float64, st.integers(3, 12),
                  elements=st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)))
    @settings(max_examples=50, deadline=None)
    def test_bounds(self, x):
        if np.ptp(x) <= 1e-6 * max(1.0, np.max(np.abs(x))):
            return
        v = m1_exact(x).value
        assert 0.0 <= v <= upper_bound(len(x), 1)

    @given(st.integers(0, 2**32), st.integers(4, 25))
    @settings(max_examples=20, deadline=None)
    def test_permutation_and_sign(self, seed, n):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(n, 2)) ** 3
        base = m2(x).value
        perm = rng.permutation(n)
        assert m2(x[perm]).value == pytest.approx(base, rel=1e-12)
        assert m2(x * np.array([-1.0, 1.0])).value == pytest.approx(base, rel=1e-12)

    def test_upper_bound(self):
        assert upper_bound(10, 1) == pytest.approx(10 * (1 + math.exp(-0.5)) ** 2 * 2 * math.pi)
