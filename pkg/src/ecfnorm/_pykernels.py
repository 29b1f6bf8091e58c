"""Pure numpy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` function for function and are used when the
compiled extension is unavailable or ``ECFNORM_PURE_PYTHON`` is set.
"""

import math

import numpy as np

# |z| <= SERIES_MAX: power series; SERIES_MAX < |z| < HANKEL_MIN: trapezoid rule
# on the integral representation; |z| >= HANKEL_MIN: Hankel asymptotic series.
SERIES_MAX = 8.0
HANKEL_MIN = 20.0
TRAPEZOID_PANELS = 34
HANKEL_TERMS = 12


def _hankel_coefficients(nterms):
    # a_k(0) = prod_{j<=k} (-(2j-1)^2) / (k! 8^k)
    a = [1.0]
    for k in range(1, 2 * nterms):
        a.append(a[-1] * -((2 * k - 1) ** 2) / (k * 8.0))
    p = [a[2 * k] * (-1) ** k for k in range(nterms)]
    q = [a[2 * k + 1] * (-1) ** k for k in range(nterms)]
    return p, q


_HANKEL_P, _HANKEL_Q = _hankel_coefficients(HANKEL_TERMS)
_TRAP_COS = np.cos(np.pi * np.arange(TRAPEZOID_PANELS + 1) / TRAPEZOID_PANELS)


def j0(z):
    """Scalar Bessel J0 (no input validation)."""
    z = abs(z)
    if z <= SERIES_MAX:
        q = -0.25 * z * z
        term, total, comp = 1.0, 0.0, 0.0
        k = 0
        while True:
            # Neumaier summation
            t = total + term
            if abs(total) >= abs(term):
                comp += (total - t) + term
            else:
                comp += (term - t) + total
            total = t
            k += 1
            term *= q / (k * k)
            if abs(term) < 1e-18:
                break
        return total + comp
    if z < HANKEL_MIN:
        s = 0.5 * (math.cos(z) + math.cos(-z))
        for c in _TRAP_COS[1:-1]:
            s += math.cos(z * c)
        return s / TRAPEZOID_PANELS
    inv2 = 1.0 / (z * z)
    p = 0.0
    q = 0.0
    for k in range(HANKEL_TERMS - 1, -1, -1):
        p = p * inv2 + _HANKEL_P[k]
        q = q * inv2 + _HANKEL_Q[k]
    q /= z
    chi = z - 0.25 * math.pi
    return math.sqrt(2.0 / (math.pi * z)) * (p * math.cos(chi) - q * math.sin(chi))


def j0_array(z):
    """Vectorized Bessel J0 over a float array (no input validation)."""
    z = np.abs(np.asarray(z, dtype=np.float64))
    out = np.empty_like(z)

    small = z <= SERIES_MAX
    if np.any(small):
        zs = z[small]
        q = -0.25 * zs * zs
        term = np.ones_like(zs)
        total = np.zeros_like(zs)
        comp = np.zeros_like(zs)
        # 40 terms reach below 1e-30 at z = 8
        for k in range(1, 41):
            t = total + term
            big = np.abs(total) >= np.abs(term)
            comp += np.where(big, (total - t) + term, (term - t) + total)
            total = t
            term = term * q / (k * k)
        out[small] = total + comp

    mid = (~small) & (z < HANKEL_MIN)
    if np.any(mid):
        zm = z[mid]
        s = 0.5 * (np.cos(zm) + np.cos(-zm))
        for c in _TRAP_COS[1:-1]:
            s += np.cos(zm * c)
        out[mid] = s / TRAPEZOID_PANELS

    large = z >= HANKEL_MIN
    if np.any(large):
        zl = z[large]
        inv2 = 1.0 / (zl * zl)
        p = np.zeros_like(zl)
        q = np.zeros_like(zl)
        for k in range(HANKEL_TERMS - 1, -1, -1):
            p = p * inv2 + _HANKEL_P[k]
            q = q * inv2 + _HANKEL_Q[k]
        q /= zl
        chi = zl - 0.25 * np.pi
        out[large] = np.sqrt(2.0 / (np.pi * zl)) * (p * np.cos(chi) - q * np.sin(chi))
    return out


def _squared_gaps(x):
    """Distinct squared pairwise differences with their multiplicities."""
    n = x.shape[0]
    iu = np.triu_indices(n, 1)
    d2 = (x[:, None] - x[None, :])[iu] ** 2
    values = np.concatenate(([0.0], d2))
    counts = np.concatenate(([float(n)], np.full(d2.shape[0], 2.0)))
    return values, counts


def m1_bessel_sums(x):
    """Return (sum_{n,j,k,l} J0(d(x_n - x_k, x_j - x_l)), sum_{n,j} J0(d(x_n, x_j)))."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    values, counts = _squared_gaps(x)
    quad = 0.0
    # rows of the (gap x gap) matrix in blocks keep memory bounded
    block = max(1, 2_000_000 // values.shape[0])
    for start in range(0, values.shape[0], block):
        u = values[start:start + block, None]
        cu = counts[start:start + block, None]
        quad += float(np.sum(cu * counts[None, :] * j0_array(np.sqrt(u + values[None, :]))))
    x2 = x * x
    pair = float(np.sum(j0_array(np.sqrt(x2[:, None] + x2[None, :]))))
    return quad, pair


def ecf_discrepancy_batch(X, nodes, weights, target, num_threads=1):
    """Weighted node sum of |ecf(a) ecf(b) - target|^2 for each sample in a batch.

    ``X`` has shape (R, N, m), ``nodes`` (Q, 2m) holding the concatenated
    (a, b) pairs. ``num_threads`` is accepted for signature parity only.
    """
    X = np.asarray(X, dtype=np.float64)
    nodes = np.asarray(nodes, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    R, N, m = X.shape
    Q = nodes.shape[0]
    a = nodes[:, :m].T
    b = nodes[:, m:].T
    out = np.empty(R)
    block = max(1, 1_000_000 // (N * Q))
    for start in range(0, R, block):
        chunk = X[start:start + block]
        phi_a = np.exp(1j * (chunk @ a)).mean(axis=1)
        phi_b = np.exp(1j * (chunk @ b)).mean(axis=1)
        diff = phi_a * phi_b - target
        out[start:start + block] = (diff.real ** 2 + diff.imag ** 2) @ weights
    return out
