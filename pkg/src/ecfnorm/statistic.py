"""The test statistics.

``m_stat`` evaluates N times the surface integral over the unit sphere of R^2m
of |ecf(a) ecf(b) - exp(-1/2)|^2 by quadrature, using the fact that the double
sum over sample pairs factors into a product of two empirical characteristic
functions. ``m1_exact`` is the exact univariate value in terms of Bessel J0 and
``mm_naive_oracle`` is the literal quadruple cosine sum, kept for testing.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ConfigError, CostGuardError, ShapeError
from .numerics import (
    CIRCLE_TRAPEZOID,
    EXP_NEG_HALF,
    SPHERE_MC,
    RngStream,
    SphereNodeSet,
    StandardizedSample,
    circle_nodes,
    sphere_mc_nodes,
    standardize,
    surface_area,
)

#: Stream id reserved for drawing quadrature nodes from a node seed.
NODE_STREAM_ID = 0x6E6F6465

DEFAULT_Q = {1: 512, 2: 4096}
M1_MAX_N = 128
ORACLE_MAX_N = 16


@dataclass(frozen=True)
class QuadratureConfig:
    """How the sphere integral is discretized.

    ``circle-trapezoid`` (m = 1 only) is the periodic trapezoid rule;
    ``sphere-mc`` draws reflection-symmetric random nodes from ``node_seed``.
    """

    method: str = SPHERE_MC
    Q: int = 4096
    node_seed: int = 0

    def __post_init__(self):
        if self.method not in (CIRCLE_TRAPEZOID, SPHERE_MC):
            raise ConfigError(f"unknown quadrature method {self.method!r}")
        if int(self.Q) != self.Q or self.Q < 4:
            raise ConfigError(f"Q must be an integer >= 4, got {self.Q!r}")
        if not 0 <= self.node_seed < 2**64:
            raise ConfigError("node_seed must be a 64-bit unsigned integer")

    @classmethod
    def default(cls, m, node_seed=0, Q=None):
        if m == 1:
            return cls(CIRCLE_TRAPEZOID, Q or DEFAULT_Q[1], node_seed)
        return cls(SPHERE_MC, Q or DEFAULT_Q.get(m, DEFAULT_Q[2]), node_seed)

    def validate_for(self, m):
        if self.method == CIRCLE_TRAPEZOID and m != 1:
            raise ConfigError("circle-trapezoid quadrature only applies to one column")
        if self.method == SPHERE_MC and self.Q % (2**m):
            raise ConfigError(f"sphere-mc with m={m} needs Q to be a multiple of {2**m}")

    def descriptor(self) -> dict:
        d = {"method": self.method, "Q": int(self.Q)}
        if self.method == SPHERE_MC:
            d["node_seed"] = int(self.node_seed)
            d["symmetry"] = "reflect"
        return d

    @classmethod
    def from_descriptor(cls, d):
        return cls(d["method"], int(d["Q"]), int(d.get("node_seed") or 0))


@functools.lru_cache(maxsize=32)
def _cached_nodes(method, Q, node_seed, m):
    if method == CIRCLE_TRAPEZOID:
        return circle_nodes(Q)
    return sphere_mc_nodes(2 * m, Q, RngStream(node_seed, NODE_STREAM_ID), symmetry="reflect")


def build_nodes(cfg: QuadratureConfig, m: int) -> SphereNodeSet:
    """Node set for ``cfg`` on the sphere of R^2m; identical configs share one object."""
    cfg.validate_for(m)
    return _cached_nodes(cfg.method, int(cfg.Q), int(cfg.node_seed), int(m))


@dataclass(frozen=True)
class StatisticValue:
    value: float
    m: int
    n: int
    method: str
    Q: int | None = None
    target_constant: float = EXP_NEG_HALF
    quadrature: dict | None = None
    ddof: int = 0

    def __float__(self):
        return float(self.value)


def _as_standardized(sample, ddof=0) -> StandardizedSample:
    if isinstance(sample, StandardizedSample):
        return sample
    return standardize(sample, ddof=ddof)


def upper_bound(n, m):
    """Largest value any statistic can take for n rows and m columns."""
    return n * (1.0 + EXP_NEG_HALF) ** 2 * surface_area(2 * m)


def ecf_eval(sample, t):
    """Empirical characteristic function (1/N) sum_k exp(i <t, x_k>)."""
    x = _as_standardized(sample).values
    t = np.asarray(t, dtype=np.float64).reshape(-1)
    if t.shape[0] != x.shape[1]:
        raise ShapeError(f"argument has length {t.shape[0]}, sample has {x.shape[1]} columns")
    return complex(np.exp(1j * (x @ t)).mean())


def cf_discrepancy(cf, nodes: SphereNodeSet):
    """Weighted node sum of |cf(a) cf(b) - exp(-1/2)|^2 for any vectorized ``cf``.

    ``cf`` maps an array of shape (Q, m) to Q complex values.
    """
    m = nodes.dim // 2
    a, b = nodes.nodes[:, :m], nodes.nodes[:, m:]
    diff = np.asarray(cf(a)) * np.asarray(cf(b)) - EXP_NEG_HALF
    return float(np.sum(nodes.weights * np.abs(diff) ** 2))


def _check_nodes(nodes: SphereNodeSet, m):
    if nodes.dim != 2 * m:
        raise ShapeError(f"node set lives in R^{nodes.dim}, data with m={m} needs R^{2 * m}")


def m_stat_batch(Xs, nodes: SphereNodeSet, threads=1, kernels=None):
    """Statistic for each standardized sample in a (R, N, m) stack."""
    Xs = np.ascontiguousarray(Xs, dtype=np.float64)
    if Xs.ndim != 3:
        raise ShapeError("batch must have shape (R, N, m)")
    _check_nodes(nodes, Xs.shape[2])
    kernels = kernels or _backend.kernels
    half = nodes.antipodal_half()
    pts, w = half if half is not None else (nodes.nodes, nodes.weights)
    integral = kernels.ecf_discrepancy_batch(Xs, pts, w, EXP_NEG_HALF, threads)
    return Xs.shape[1] * integral


def m_stat(sample, cfg: QuadratureConfig | None = None, nodes: SphereNodeSet | None = None,
           threads=1):
    """Quadrature evaluation of the statistic for one sample.

    Pass either a quadrature config (defaults per column count) or an explicit
    node set.
    """
    s = _as_standardized(sample)
    m = s.n_cols
    if nodes is None:
        cfg = cfg or QuadratureConfig.default(m)
        nodes = build_nodes(cfg, m)
        desc = cfg.descriptor()
    else:
        desc = nodes.descriptor()
    _check_nodes(nodes, m)
    value = float(m_stat_batch(s.values[None], nodes, threads)[0])
    return StatisticValue(value, m, s.n_rows, "quadrature", nodes.Q, EXP_NEG_HALF, desc, s.ddof)


def m2(sample, cfg: QuadratureConfig | None = None, threads=1):
    """Bivariate statistic over the unit sphere of R^4 (Monte Carlo nodes)."""
    s = _as_standardized(sample)
    if s.n_cols != 2:
        raise ShapeError(f"m2 needs exactly 2 columns, got {s.n_cols}")
    cfg = cfg or QuadratureConfig.default(2)
    if cfg.method != SPHERE_MC:
        raise ConfigError("m2 needs sphere-mc quadrature")
    return m_stat(s, cfg, threads=threads)


def m1_exact(sample, max_n=M1_MAX_N):
    """Closed-form univariate statistic.

    2 pi N [ N^-4 sum J0(d(x_n - x_k, x_j - x_l)) - 2 e^{-1/2} N^-2 sum J0(d(x_n, x_j)) + e^{-1} ]
    with d(x, y) = sqrt(x^2 + y^2). Costs O(N^4), hence the ``max_n`` guard
    (pass ``None`` to disable).
    """
    s = _as_standardized(sample)
    if s.n_cols != 1:
        raise ShapeError(f"the closed form needs one column, got {s.n_cols}")
    n = s.n_rows
    if max_n is not None and n > max_n:
        raise CostGuardError(f"closed form with N={n} exceeds the limit of {max_n} rows")
    quad, pair = _backend.kernels.m1_bessel_sums(s.values[:, 0])
    bracket = quad / n**4 - 2.0 * EXP_NEG_HALF * pair / n**2 + math.exp(-1.0)
    return StatisticValue(2.0 * math.pi * n * bracket, 1, n, "closed-form", None, EXP_NEG_HALF, None, s.ddof)


def naive_integrand(x, a, b):
    """Squared modulus at nodes (a, b) from the expanded cosine sums, no factorization.

    U^2 = N^-4 sum_{i,j,k,l} cos(<a, x_i - x_k> + <b, x_j - x_l>)
          - 2 e^{-1/2} N^-2 sum_{i,j} cos(<a, x_i> + <b, x_j>) + e^{-1}
    """
    n = x.shape[0]
    diff = x[:, None, :] - x[None, :, :]                       # (N, N, m)
    pa = np.einsum("ikm,qm->qik", diff, a).reshape(a.shape[0], -1)
    pb = np.einsum("jlm,qm->qjl", diff, b).reshape(b.shape[0], -1)
    quad = np.cos(pa[:, :, None] + pb[:, None, :]).sum(axis=(1, 2))
    ca = x @ a.T                                               # (N, Q)
    cb = x @ b.T
    cross = np.cos(ca.T[:, :, None] + cb.T[:, None, :]).sum(axis=(1, 2))
    return quad / n**4 - 2.0 * EXP_NEG_HALF * cross / n**2 + math.exp(-1.0)


def mm_naive_oracle(sample, nodes: SphereNodeSet, max_n=ORACLE_MAX_N):
    """Statistic from the literal quadruple cosine sums on a given node set."""
    s = _as_standardized(sample)
    n, m = s.n_rows, s.n_cols
    if n > max_n:
        raise CostGuardError(f"naive oracle limited to N <= {max_n}, got {n}")
    _check_nodes(nodes, m)
    x = s.values
    a, b = nodes.nodes[:, :m], nodes.nodes[:, m:]
    total = 0.0
    chunk = max(1, 2_000_000 // n**4)
    for start in range(0, nodes.Q, chunk):
        u2 = naive_integrand(x, a[start:start + chunk], b[start:start + chunk])
        total += float(np.dot(nodes.weights[start:start + chunk], u2))
    return StatisticValue(n * total, m, n, "naive-oracle", nodes.Q, EXP_NEG_HALF, nodes.descriptor(), s.ddof)
