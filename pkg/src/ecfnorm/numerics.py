"""Numerical building blocks: Bessel J0, unit-sphere node sets, surface areas,
columnwise standardization and reproducible random streams."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import DataError, DegenerateDataError, DomainError, InsufficientDataError, ShapeError

#: Value of the standard normal characteristic function anywhere on the unit sphere.
EXP_NEG_HALF = 0.6065306597126334

CIRCLE_TRAPEZOID = "circle-trapezoid"
SPHERE_MC = "sphere-mc"


def bessel_j0(z):
    """Bessel function of the first kind of order zero.

    Accepts a scalar or an array. Absolute error is below 1e-14 on [0, 200].

    Raises
    ------
    DomainError
        If any input is NaN or infinite.
    """
    if np.ndim(z) == 0:
        zf = float(z)
        if not math.isfinite(zf):
            raise DomainError(f"bessel_j0 needs a finite argument, got {zf!r}")
        return _backend.kernels.j0(zf)
    arr = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("bessel_j0 needs finite arguments")
    return _backend.kernels.j0_array(arr)


def surface_area(dim):
    """Surface measure of the unit sphere in R^dim: 2 pi^(dim/2) / Gamma(dim/2)."""
    if int(dim) != dim or dim < 1:
        raise DomainError(f"dimension must be a positive integer, got {dim!r}")
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by ``(root_seed, stream_id)``.

    ``stream_id`` is an integer or a tuple of integers (for example
    ``(row, replicate)``). Streams are derived with :class:`numpy.random.SeedSequence`
    spawn keys and drive a counter-based Philox generator, so the draws of a
    stream never depend on which other streams exist or in what order they are
    consumed.
    """

    root_seed: int
    stream_id: int | tuple[int, ...] = 0

    def __post_init__(self):
        if self.root_seed < 0 or self.root_seed >= 2**64:
            raise DomainError("root_seed must be a 64-bit unsigned integer")

    @property
    def key(self) -> tuple[int, ...]:
        sid = self.stream_id
        return tuple(int(s) for s in sid) if isinstance(sid, tuple) else (int(sid),)

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.root_seed, spawn_key=self.key)
        return np.random.Generator(np.random.Philox(seq))

    def child(self, index: int) -> RngStream:
        return RngStream(self.root_seed, self.key + (int(index),))


@dataclass(frozen=True, eq=False)
class SphereNodeSet:
    """Quadrature nodes on the unit sphere of R^dim with positive weights.

    Each node is the concatenation (a, b) of two m-vectors, dim = 2m.
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    method: str
    seed: int | None = None
    symmetry: str | None = None
    _half: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=np.float64)
        weights = np.array(self.weights, dtype=np.float64)
        if nodes.ndim != 2 or nodes.shape[1] != self.dim or weights.shape != (nodes.shape[0],):
            raise ShapeError("node array must be (Q, dim) with one weight per node")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.shape[0]

    @property
    def Q(self) -> int:
        return self.nodes.shape[0]

    def is_negation_closed(self) -> bool:
        return self.antipodal_half() is not None

    def antipodal_half(self):
        """Representatives of antipodal pairs with merged weights, or None.

        Only the layout produced by this module is recognized: the second half
        of the nodes is the exact negation of the first half.
        """
        if self._half is None:
            q = self.Q
            half = None
            if q % 2 == 0:
                first, second = self.nodes[: q // 2], self.nodes[q // 2:]
                wf, ws = self.weights[: q // 2], self.weights[q // 2:]
                if np.array_equal(second, -first) and np.array_equal(wf, ws):
                    half = (np.ascontiguousarray(first), np.ascontiguousarray(2.0 * wf))
            object.__setattr__(self, "_half", (half,))
        return self._half[0]

    def descriptor(self) -> dict:
        d = {"method": self.method, "Q": self.Q}
        if self.seed is not None:
            d["node_seed"] = self.seed
        if self.symmetry is not None:
            d["symmetry"] = self.symmetry
        return d


def circle_nodes(Q):
    """Equispaced nodes (cos t, sin t), t = 2 pi q / Q, each of weight 2 pi / Q."""
    if int(Q) != Q or Q < 4:
        raise DomainError(f"circle quadrature needs Q >= 4, got {Q!r}")
    Q = int(Q)
    if Q % 2 == 0:
        # build antipodes by exact negation so the pairing is bitwise
        t = 2.0 * math.pi * np.arange(Q // 2) / Q
        first = np.column_stack((np.cos(t), np.sin(t)))
        nodes = np.vstack((first, -first))
    else:
        t = 2.0 * math.pi * np.arange(Q) / Q
        nodes = np.column_stack((np.cos(t), np.sin(t)))
    weights = np.full(Q, 2.0 * math.pi / Q)
    return SphereNodeSet(2, nodes, weights, CIRCLE_TRAPEZOID)


def _unit_gaussians(rng, count, dim):
    g = rng.standard_normal((count, dim))
    norms = np.linalg.norm(g, axis=1)
    bad = norms == 0.0
    while np.any(bad):
        g[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(g, axis=1)
        bad = norms == 0.0
    return g / norms[:, None]


def sphere_mc_nodes(dim, Q, rng, symmetry="antithetic"):
    """Random nodes on the unit sphere of R^dim with equal weights.

    Points are normalized standard Gaussian vectors.

    Parameters
    ----------
    dim : int
        Ambient dimension, at least 2.
    Q : int
        Total node count.
    rng : RngStream or numpy.random.Generator
    symmetry : {"antithetic", "reflect"}
        ``"antithetic"`` pairs each of Q/2 draws with its negation.
        ``"reflect"`` needs dim = 2m and closes each of Q/2^m draws under the
        sign flips x_j -> -x_j, x_{j+m} -> -x_{j+m} for every j; this contains
        the full negation and makes statistics of m-column data invariant under
        sign changes of individual columns.

    Returns
    -------
    SphereNodeSet
        The second half of the nodes is the exact negation of the first half.
    """
    if int(dim) != dim or dim < 2:
        raise DomainError(f"sphere quadrature needs dim >= 2, got {dim!r}")
    if int(Q) != Q or Q < 2 or Q % 2:
        raise DomainError(f"Q must be an even integer >= 2, got {Q!r}")
    dim, Q = int(dim), int(Q)
    seed = rng.root_seed if isinstance(rng, RngStream) else None
    gen = rng.generator() if isinstance(rng, RngStream) else rng

    if symmetry == "antithetic":
        base = _unit_gaussians(gen, Q // 2, dim)
        nodes = np.vstack((base, -base))
    elif symmetry == "reflect":
        if dim % 2:
            raise DomainError("reflection symmetry needs an even dimension")
        m = dim // 2
        orbit = 2**m
        if Q % orbit:
            raise DomainError(f"Q must be a multiple of {orbit} for reflection symmetry in dim {dim}")
        base = _unit_gaussians(gen, Q // orbit, dim)
        # sign patterns with first entry +1; their negations form the second half
        half = []
        for signs in itertools.product((1.0, -1.0), repeat=m - 1):
            s = np.array((1.0,) + signs)
            half.append(base * np.concatenate((s, s)))
        first = np.vstack(half)
        nodes = np.vstack((first, -first))
    else:
        raise DomainError(f"unknown symmetry {symmetry!r}")
    weights = np.full(Q, surface_area(dim) / Q)
    return SphereNodeSet(dim, nodes, weights, SPHERE_MC, seed=seed, symmetry=symmetry)


@dataclass(frozen=True, eq=False)
class StandardizedSample:
    """Columnwise standardized data: mean 0 and variance 1 per column."""

    values: np.ndarray
    ddof: int = 0

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape


def as_matrix(X):
    """Coerce array-like data to a finite float matrix of shape (N, m)."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ShapeError(f"expected an N x m matrix, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise InsufficientDataError(f"need at least 2 rows, got {arr.shape[0]}")
    if arr.shape[1] < 1:
        raise ShapeError("data has no columns")
    bad = np.argwhere(~np.isfinite(arr))
    if bad.size:
        r, c = bad[0]
        raise DataError(f"non-finite value at row {r}, column {c}")
    return arr


def standardize(X, ddof=0):
    """Center each column and scale it to unit variance.

    The variance divisor is ``N - ddof``; the default ``ddof=0`` is the
    population convention used everywhere critical values are simulated.
    """
    if isinstance(X, StandardizedSample):
        X = X.values
    arr = as_matrix(X)
    centered = arr - arr.mean(axis=0)
    sd = np.sqrt((centered ** 2).sum(axis=0) / (arr.shape[0] - ddof))
    scale = np.abs(arr).max(axis=0)
    for j in range(arr.shape[1]):
        if sd[j] == 0.0 or sd[j] <= 1e-14 * scale[j]:
            raise DegenerateDataError(f"column {j} has zero variance")
    return StandardizedSample(centered / sd, ddof=ddof)


def standardize_batch(Xs, ddof=0):
    """Standardize a stack of samples of shape (R, N, m) along the row axis."""
    Xs = np.asarray(Xs, dtype=np.float64)
    centered = Xs - Xs.mean(axis=1, keepdims=True)
    sd = np.sqrt((centered ** 2).sum(axis=1, keepdims=True) / (Xs.shape[1] - ddof))
    if np.any(sd == 0.0):
        raise DegenerateDataError("a simulated sample has a zero-variance column")
    return centered / sd
