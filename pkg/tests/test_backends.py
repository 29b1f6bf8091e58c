import numpy as np
import pytest

from ecfnorm import _backend, _pykernels
from ecfnorm.numerics import EXP_NEG_HALF, standardize_batch
from ecfnorm.statistic import QuadratureConfig, build_nodes, m_stat_batch

compiled = pytest.mark.skipif("cython" not in _backend.available(),
                              reason="compiled extension not built")


def test_selected_backend_is_available():
    assert _backend.BACKEND in _backend.available()
    with pytest.raises(ValueError):
        _backend.load("fortran")


@compiled
def test_j0_agrees():
    c = _backend.load("cython")
    z = np.concatenate((np.linspace(-30, 200, 5001), [7.999999, 8.0, 8.000001, 19.99999, 20.0]))
    np.testing.assert_allclose(c.j0_array(z), _pykernels.j0_array(z), rtol=0, atol=3e-14)
    assert all(abs(c.j0(v) - _pykernels.j0(v)) <= 3e-14 for v in z[::97])


@compiled
def test_m1_sums_agree():
    c = _backend.load("cython")
    x = np.random.default_rng(1).normal(size=23)
    np.testing.assert_allclose(c.m1_bessel_sums(x), _pykernels.m1_bessel_sums(x), rtol=1e-13)


@compiled
@pytest.mark.parametrize("m,q", [(1, 512), (2, 1024)])
def test_statistic_agrees(m, q):
    c = _backend.load("cython")
    xs = standardize_batch(np.random.default_rng(m).standard_t(4, size=(30, 17, m)))
    nodes = build_nodes(QuadratureConfig.default(m, Q=q), m)
    a = m_stat_batch(xs, nodes, kernels=c)
    b = m_stat_batch(xs, nodes, kernels=_pykernels)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_python_kernel_threads_argument():
    xs = standardize_batch(np.random.default_rng(0).normal(size=(3, 9, 1)))
    nodes = build_nodes(QuadratureConfig.default(1, Q=64), 1)
    a = _pykernels.ecf_discrepancy_batch(xs, nodes.nodes, nodes.weights, EXP_NEG_HALF, 1)
    b = _pykernels.ecf_discrepancy_batch(xs, nodes.nodes, nodes.weights, EXP_NEG_HALF, 3)
    np.testing.assert_array_equal(a, b)


def test_env_forces_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, ECFNORM_PURE_PYTHON="1")
    code = "import ecfnorm, numpy as np; print(ecfnorm.BACKEND, ecfnorm.m1_exact(np.arange(5.0)).value)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out[0] == "python"
    assert float(out[1]) == pytest.approx(__import__("ecfnorm").m1_exact(np.arange(5.0)).value, rel=1e-13)
