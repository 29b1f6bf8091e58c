"""Alternative distributions for power studies: samplers and bivariate densities.

An :class:`AlternativeSpec` is a family name plus a parameter tuple with a
canonical text form such as ``MixN(0.3,1,0.25)`` or ``BivN(0,0,1,1,0.5)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, ParseError
from .numerics import RngStream

SQRT3 = math.sqrt(3.0)


# ---------------------------------------------------------------------------
# parameter checks


def _positive(name):
    def check(v):
        if not v > 0:
            raise DomainError(f"{name} must be positive, got {v!r}")
    return check


def _in_closed(name, lo, hi):
    def check(v):
        if not lo <= v <= hi:
            raise DomainError(f"{name} must lie in [{lo}, {hi}], got {v!r}")
    return check


def _real(name):
    def check(v):
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v!r}")
    return check


@dataclass(frozen=True)
class _Family:
    name: str
    dim: int
    params: tuple
    checks: tuple
    aliases: tuple = ()


_FAMILIES = {}


def _family(name, dim, params, checks, aliases=()):
    _FAMILIES[name] = _Family(name, dim, tuple(params), tuple(checks), tuple(aliases))


_family("StdNormal", 1, (), (), ("StdN",))
_family("N", 1, ("mu", "var"), (_real("mu"), _positive("var")), ("Normal",))
_family("MixN", 1, ("p", "mu", "var"), (_in_closed("p", 0.0, 1.0), _real("mu"), _positive("var")))
_family("t", 1, ("nu",), (_positive("nu"),), ("Student", "StudentT"))
_family("U", 1, ("a", "b"), (_real("a"), _real("b")), ("Uniform",))
_family("Chi2", 1, ("nu",), (_positive("nu"),), ("ChiSq",))
_family("B", 1, ("a", "b"), (_positive("a"), _positive("b")), ("Beta",))
_family("Gamma", 1, ("shape", "scale"), (_positive("shape"), _positive("scale")))
_family("Gum", 1, ("mu", "sigma"), (_real("mu"), _positive("sigma")), ("Gumbel",))
_family("LN", 1, ("mu", "sigma"), (_real("mu"), _positive("sigma")), ("LogNormal",))

_rho = _in_closed("rho", -1.0, 1.0)
_family("IndepN2", 2, (), (), ("IndepStdNormal2",))
_family("BivN", 2, ("mu1", "mu2", "sigma1", "sigma2", "rho"),
        (_real("mu1"), _real("mu2"), _positive("sigma1"), _positive("sigma2"), _rho), ("BivNorm",))
_family("NMixA", 2, ("rho",), (_rho,))
_family("NMixB", 2, ("rho",), (_rho,))
_family("LogN", 2, ("sigma1", "sigma2", "rho"),
        (_positive("sigma1"), _positive("sigma2"), _rho), ("BivLogN",))
_family("SinhInvN", 2, ("mu1", "mu2", "sigma1", "sigma2", "rho"),
        (_real("mu1"), _real("mu2"), _positive("sigma1"), _positive("sigma2"), _rho),
        ("Sinh^-1N", "SinhInvNorm"))
_family("GBPL", 2, ("alpha", "beta"), (_positive("alpha"), _in_closed("beta", -1.0, 1.0)))
_family("Morg", 2, ("alpha",), (_in_closed("alpha", -1.0, 1.0),), ("Morgenstern",))
_family("PearVII", 2, ("alpha",), (_positive("alpha"),), ("PearsonVII",))

_LOOKUP = {}
for _f in _FAMILIES.values():
    for _name in (_f.name,) + _f.aliases:
        _LOOKUP[_name.lower()] = _f.name


def canonical_family(name):
    """Canonical family name for ``name`` or one of its aliases."""
    try:
        return _LOOKUP[str(name).lower()]
    except KeyError:
        raise ParseError(f"unknown alternative {name!r}") from None


def _format_number(v):
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    k = round(v * v)
    if 1 < k < 10000 and math.isqrt(k) ** 2 != k and math.sqrt(k) == abs(v):
        return f"{'-' if v < 0 else ''}sqrt({k})"
    return repr(float(v))


_NUMBER_RE = re.compile(r"^([+-]?)sqrt\(?\s*([0-9.eE+-]+)\s*\)?$")


def _parse_number(token, text):
    tok = token.strip()
    try:
        return float(tok)
    except ValueError:
        pass
    mt = _NUMBER_RE.match(tok)
    if mt:
        try:
            val = math.sqrt(float(mt.group(2)))
        except ValueError:
            pass
        else:
            return -val if mt.group(1) == "-" else val
    raise ParseError(f"cannot read parameter {tok!r} in {text!r}")


@dataclass(frozen=True)
class AlternativeSpec:
    """A distribution family name with its parameters."""

    family: str
    params: tuple = ()

    def __post_init__(self):
        fam = _FAMILIES.get(self.family)
        if fam is None:
            canonical = _LOOKUP.get(str(self.family).lower())
            if canonical is None:
                raise ParseError(f"unknown alternative {self.family!r}")
            object.__setattr__(self, "family", canonical)
            fam = _FAMILIES[canonical]
        params = tuple(float(p) for p in self.params)
        if len(params) != len(fam.params):
            raise ParseError(
                f"{fam.name} takes {len(fam.params)} parameter(s) {fam.params}, got {len(params)}"
            )
        for check, value in zip(fam.checks, params):
            check(value)
        if fam.name == "U" and not params[0] < params[1]:
            raise DomainError("uniform needs a < b")
        object.__setattr__(self, "params", params)

    @property
    def dim(self) -> int:
        return _FAMILIES[self.family].dim

    def __str__(self):
        return f"{self.family}({','.join(_format_number(p) for p in self.params)})"

    @classmethod
    def parse(cls, text: str) -> AlternativeSpec:
        mt = re.match(r"^\s*([A-Za-z][A-Za-z0-9_^\-]*?)\s*(?:\((.*)\))?\s*$", text)
        if not mt:
            raise ParseError(f"cannot parse alternative {text!r}")
        name, inner = mt.group(1), mt.group(2)
        if name.lower() not in _LOOKUP:
            raise ParseError(f"unknown alternative {name!r} in {text!r}")
        tokens = [] if inner is None or not inner.strip() else inner.split(",")
        return cls(name, tuple(_parse_number(t, text) for t in tokens))


def parse_alternative(text):
    return AlternativeSpec.parse(text)


# ---------------------------------------------------------------------------
# transform constants for the lognormal and sinh^-1 families


def lognormal_constants(sigma):
    """Shift a = exp(s^2/2) and scale b = sqrt(exp(2 s^2) - exp(s^2)) per coordinate."""
    s2 = np.asarray(sigma, dtype=np.float64) ** 2
    return np.exp(s2 / 2.0), np.sqrt(np.exp(2.0 * s2) - np.exp(s2))


def sinh_constants(mu, sigma):
    """a = exp(s^2/2) sinh(mu), b = sqrt((exp(s^2) - 1)(exp(s^2) cosh(2 mu) + 1))."""
    mu = np.asarray(mu, dtype=np.float64)
    s2 = np.asarray(sigma, dtype=np.float64) ** 2
    a = np.exp(s2 / 2.0) * np.sinh(mu)
    b = np.sqrt(np.expm1(s2) * (np.exp(s2) * np.cosh(2.0 * mu) + 1.0))
    return a, b


# ---------------------------------------------------------------------------
# copula and radial building blocks


def morgenstern_conditional_inverse(u, w, alpha):
    """Solve dC/du(u, v) = w for v, C(u, v) = uv(1 + alpha(1-u)(1-v)).

    The conditional CDF is v + A v (1 - v) with A = alpha (1 - 2u); the root in
    (0, 1) of A v^2 - (1 + A) v + w = 0 is taken in the cancellation-free form.
    """
    u = np.asarray(u, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    A = alpha * (1.0 - 2.0 * u)
    root = 2.0 * w / ((1.0 + A) + np.sqrt((1.0 + A) ** 2 - 4.0 * A * w))
    return root if root.ndim else float(root)


def pearvii_radial_cdf(r, alpha):
    return 1.0 - (1.0 + 0.5 * np.asarray(r, dtype=np.float64) ** 2) ** (-alpha)


def pearvii_radial_inverse(u, alpha):
    """Radius with CDF value u: sqrt(2((1-u)^(-1/alpha) - 1))."""
    u = np.asarray(u, dtype=np.float64)
    if np.any((u < 0) | (u >= 1)):
        raise DomainError("radial inverse needs u in [0, 1)")
    r = np.sqrt(2.0 * np.expm1(-np.log1p(-u) / alpha))
    return r if r.ndim else float(r)


# generalized Burr-Pareto-logistic copula: C = sum coef * (s u^-th + t v^-th - (s+t-1))^-alpha
def _gbpl_terms(beta):
    return ((1.0 + beta, 1.0, 1.0), (beta, 2.0, 2.0), (-beta, 2.0, 1.0), (-beta, 1.0, 2.0))


def gbpl_copula_density(u, v, alpha, beta):
    """Copula density of the generalized Burr-Pareto-logistic family."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    th = 1.0 / alpha
    pu, pv = u ** -th, v ** -th
    total = 0.0
    for coef, s, t in _gbpl_terms(beta):
        if coef:
            total = total + coef * s * t * (s * pu + t * pv - (s + t - 1.0)) ** (-alpha - 2.0)
    return (1.0 + th) * (u * v) ** (-th - 1.0) * total


def gbpl_copula_density_printed(u, v, alpha, beta):
    """The density with a bare 1/(uv) prefactor instead of (uv)^(-1/alpha - 1).

    Kept to document that this variant does not integrate to one.
    """
    th = 1.0 / alpha
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    return gbpl_copula_density(u, v, alpha, beta) * (u * v) ** th


def gbpl_conditional_cdf(v, u, alpha, beta):
    """P(V <= v | U = u) = dC/du for the generalized Burr-Pareto-logistic copula."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    th = 1.0 / alpha
    logu = np.log(u)
    pu, pv = np.exp(-th * logu), v ** -th
    total = 0.0
    with np.errstate(over="ignore", divide="ignore"):
        for coef, s, t in _gbpl_terms(beta):
            if coef:
                S = s * pu + t * pv - (s + t - 1.0)
                total = total + coef * s * np.exp((-th - 1.0) * logu - (alpha + 1.0) * np.log(S))
    return total


def _gbpl_solve_x2(u, w, alpha, beta, iterations=90):
    """Normal score x2 with gbpl_conditional_cdf(Phi(x2) | u) = w, by bisection."""
    lo = np.full(np.shape(u), -38.0)
    hi = np.full(np.shape(u), 38.0)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = gbpl_conditional_cdf(special.ndtr(mid), u, alpha, beta) < w
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def gbpl_sample_copula(alpha, beta, rng, size=None):
    """Draw (u, v) from the generalized Burr-Pareto-logistic copula by conditional inversion."""
    _FAMILIES["GBPL"].checks[0](alpha)
    _FAMILIES["GBPL"].checks[1](beta)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    n = 1 if size is None else size
    u = gen.random(n)
    u = np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
    w = gen.random(n)
    v = special.ndtr(_gbpl_solve_x2(u, w, alpha, beta))
    if size is None:
        return float(u[0]), float(v[0])
    return u, v


# ---------------------------------------------------------------------------
# sampling


def _bivn(gen, n, mu1, mu2, s1, s2, rho):
    z = gen.standard_normal((n, 2))
    # Cholesky factor of the 2x2 covariance; rank one when |rho| = 1
    x1 = mu1 + s1 * z[:, 0]
    x2 = mu2 + s2 * (rho * z[:, 0] + math.sqrt(max(0.0, 1.0 - rho * rho)) * z[:, 1])
    return np.column_stack((x1, x2))


def _open_uniform(gen, n):
    u = gen.random(n)
    return np.where(u == 0.0, np.nextafter(0.0, 1.0), u)


def sample_alt(spec, n, rng, gamma_scale=True):
    """Draw n i.i.d. rows from ``spec``; returns an (n, dim) array.

    ``rng`` is an :class:`RngStream` or a numpy Generator. ``gamma_scale``
    reads the second gamma parameter as a scale (True) or a rate (False).
    """
    if isinstance(spec, str):
        spec = AlternativeSpec.parse(spec)
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    n = int(n)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    p = spec.params
    fam = spec.family

    if fam == "StdNormal":
        x = gen.standard_normal(n)
    elif fam == "N":
        x = p[0] + math.sqrt(p[1]) * gen.standard_normal(n)
    elif fam == "MixN":
        pick = gen.random(n) < p[0]
        z = gen.standard_normal(n)
        x = np.where(pick, p[1] + math.sqrt(p[2]) * z, z)
    elif fam == "t":
        x = gen.standard_t(p[0], n)
    elif fam == "U":
        x = gen.uniform(p[0], p[1], n)
    elif fam == "Chi2":
        x = gen.chisquare(p[0], n)
    elif fam == "B":
        x = gen.beta(p[0], p[1], n)
    elif fam == "Gamma":
        x = gen.gamma(p[0], p[1] if gamma_scale else 1.0 / p[1], n)
    elif fam == "Gum":
        x = gen.gumbel(p[0], p[1], n)
    elif fam == "LN":
        x = gen.lognormal(p[0], p[1], n)
    elif fam == "IndepN2":
        return gen.standard_normal((n, 2))
    elif fam == "BivN":
        return _bivn(gen, n, *p)
    elif fam == "NMixA":
        pick = gen.random(n) < 0.5
        first = _bivn(gen, n, 0.0, 0.0, 1.0, 1.0, p[0])
        second = _bivn(gen, n, 1.0, 1.0, 1.0, 1.0, 0.9)
        return np.where(pick[:, None], second, first)
    elif fam == "NMixB":
        pick = gen.random(n) < 0.5
        first = _bivn(gen, n, 0.0, 0.0, 1.0, 1.0, p[0])
        second = _bivn(gen, n, 0.0, 0.0, 1.0, 1.0, -p[0])
        return np.where(pick[:, None], second, first)
    elif fam == "LogN":
        s = np.array(p[:2])
        a, b = lognormal_constants(s)
        logs = _bivn(gen, n, 0.0, 0.0, p[0], p[1], p[2])
        return (np.exp(logs) - a) / b
    elif fam == "SinhInvN":
        a, b = sinh_constants(p[:2], p[2:4])
        z = _bivn(gen, n, *p)
        return (np.sinh(z) - a) / b
    elif fam == "GBPL":
        u = _open_uniform(gen, n)
        w = gen.random(n)
        x2 = _gbpl_solve_x2(u, w, p[0], p[1])
        return np.column_stack((special.ndtri(u), x2))
    elif fam == "Morg":
        u = _open_uniform(gen, n)
        w = _open_uniform(gen, n)
        v = morgenstern_conditional_inverse(u, w, p[0])
        return np.column_stack((special.ndtri(u), special.ndtri(v)))
    elif fam == "PearVII":
        r = pearvii_radial_inverse(gen.random(n), p[0])
        angle = 2.0 * math.pi * gen.random(n)
        return np.column_stack((r * np.cos(angle), r * np.sin(angle)))
    else:  # pragma: no cover - registry and dispatch are kept in sync
        raise DomainError(f"no sampler for {fam}")
    return x[:, None]


# ---------------------------------------------------------------------------
# bivariate densities


def _g1(x1, x2, mu1, mu2, s1, s2, rho):
    if abs(rho) >= 1.0:
        raise DomainError("bivariate normal density is singular for |rho| = 1")
    z1 = (x1 - mu1) / s1
    z2 = (x2 - mu2) / s2
    q = (z1 * z1 + z2 * z2 - 2.0 * rho * z1 * z2) / (1.0 - rho * rho)
    return np.exp(-0.5 * q) / (2.0 * math.pi * s1 * s2 * math.sqrt(1.0 - rho * rho))


def _phi(x):
    return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def density_bivariate(spec, x):
    """Density of a bivariate alternative at points ``x`` of shape (..., 2).

    Points outside the support give 0.
    """
    if isinstance(spec, str):
        spec = AlternativeSpec.parse(spec)
    if spec.dim != 2:
        raise DomainError(f"{spec} is not bivariate")
    pts = np.asarray(x, dtype=np.float64)
    x1, x2 = pts[..., 0], pts[..., 1]
    p = spec.params
    fam = spec.family

    if fam == "IndepN2":
        out = _phi(x1) * _phi(x2)
    elif fam == "BivN":
        out = _g1(x1, x2, *p)
    elif fam == "NMixA":
        out = 0.5 * _g1(x1, x2, 0, 0, 1, 1, p[0]) + 0.5 * _g1(x1, x2, 1, 1, 1, 1, 0.9)
    elif fam == "NMixB":
        out = 0.5 * _g1(x1, x2, 0, 0, 1, 1, p[0]) + 0.5 * _g1(x1, x2, 0, 0, 1, 1, -p[0])
    elif fam == "LogN":
        a, b = lognormal_constants(np.array(p[:2]))
        y1 = b[0] * x1 + a[0]
        y2 = b[1] * x2 + a[1]
        inside = (y1 > 0) & (y2 > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = b[0] * b[1] / (y1 * y2) * _g1(np.log(y1), np.log(y2), 0, 0, p[0], p[1], p[2])
        out = np.where(inside, val, 0.0)
    elif fam == "SinhInvN":
        a, b = sinh_constants(p[:2], p[2:4])
        w1 = b[0] * x1 + a[0]
        w2 = b[1] * x2 + a[1]
        jac = b[0] * b[1] / np.sqrt((1.0 + w1 * w1) * (1.0 + w2 * w2))
        out = jac * _g1(np.arcsinh(w1), np.arcsinh(w2), *p)
    elif fam == "GBPL":
        u = special.ndtr(x1)
        v = special.ndtr(x2)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            c = gbpl_copula_density(u, v, p[0], p[1])
        out = np.where(np.isfinite(c), c, 0.0) * _phi(x1) * _phi(x2)
    elif fam == "Morg":
        out = _phi(x1) * _phi(x2) * (1.0 + p[0] * (2.0 * special.ndtr(x1) - 1.0) * (2.0 * special.ndtr(x2) - 1.0))
    elif fam == "PearVII":
        out = p[0] / (2.0 * math.pi) * (1.0 + 0.5 * (x1 * x1 + x2 * x2)) ** (-(p[0] + 1.0))
    else:  # pragma: no cover
        raise DomainError(f"no density for {fam}")
    out = np.asarray(out, dtype=np.float64)
    return out if out.ndim else float(out)
