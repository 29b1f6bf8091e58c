"""Monte Carlo null distribution, critical value tables and p-values.

Under the null every column is an independent N(0, 1) sample. Replicate ``r``
always draws from stream ``(root_seed, r)``, so a table depends only on its
configuration.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ProvenanceError, TableLookupError
from .numerics import CIRCLE_TRAPEZOID, RngStream, standardize_batch
from .statistic import QuadratureConfig, StatisticValue, build_nodes, m_stat_batch

FORMAT_VERSION = 1
TABLE_KIND = "ecfnorm.critical-values"
BATCH = 256


@dataclass(frozen=True)
class NullSimConfig:
    m: int
    n: int
    replicates: int
    levels: tuple = (0.05,)
    quadrature: QuadratureConfig | None = None
    root_seed: int = 0
    ddof: int = 0

    def __post_init__(self):
        levels = tuple(float(a) for a in self.levels)
        object.__setattr__(self, "levels", levels)
        if self.quadrature is None:
            object.__setattr__(self, "quadrature", QuadratureConfig.default(self.m))
        if self.m < 1 or self.n < 2:
            raise ConfigError(f"need m >= 1 and n >= 2, got m={self.m}, n={self.n}")
        if self.replicates < 100:
            raise ConfigError(f"at least 100 replicates are required, got {self.replicates}")
        if not levels:
            raise ConfigError("at least one level is required")
        if any(not 0.0 < a < 1.0 for a in levels):
            raise ConfigError(f"levels must lie in (0, 1), got {levels}")
        if list(levels) != sorted(levels):
            raise ConfigError(f"levels must be sorted ascending, got {levels}")
        if not 0 <= self.root_seed < 2**64:
            raise ConfigError("root_seed must be a 64-bit unsigned integer")
        self.quadrature.validate_for(self.m)
        for a in levels:
            order_statistic_rank(a, self.replicates)


def order_statistic_rank(alpha, replicates):
    """1-based rank ceil((1 - alpha) R) of the upper order statistic used as critical value."""
    # rounding guards against (1 - 0.05) * 10000 = 9500.000000000002
    k = math.ceil(round((1.0 - alpha) * replicates, 9))
    if k > replicates - 1:
        raise ConfigError(
            f"{replicates} replicates are too few for alpha={alpha}: rank {k} exceeds R - 1"
        )
    return max(k, 1)


def null_statistics(m, n, replicates, quadrature=None, root_seed=0, ddof=0, threads=1):
    """Statistics of ``replicates`` simulated null samples, in replicate order."""
    quadrature = quadrature or QuadratureConfig.default(m)
    nodes = build_nodes(quadrature, m)
    out = np.empty(replicates)
    for start in range(0, replicates, BATCH):
        stop = min(start + BATCH, replicates)
        Xs = np.stack([RngStream(root_seed, r).generator().standard_normal((n, m))
                       for r in range(start, stop)])
        out[start:stop] = m_stat_batch(standardize_batch(Xs, ddof), nodes, threads)
    return out


def build_timestamp():
    """UTC build time; honours SOURCE_DATE_EPOCH for reproducible files."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        t = _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
    else:
        t = _dt.datetime.now(tz=_dt.timezone.utc).replace(microsecond=0)
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def _same_level(a, b):
    return abs(a - b) <= 1e-12 * max(abs(a), abs(b))


@dataclass(frozen=True)
class CriticalValueTable:
    """Simulated null quantiles for one (m, n) and several levels."""

    m: int
    n: int
    levels: tuple
    critical_values: tuple
    replicates: int
    root_seed: int
    quadrature: dict
    ddof: int = 0
    built: str = ""
    format_version: int = FORMAT_VERSION
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def entries(self) -> dict:
        return {(self.m, self.n, a): c for a, c in zip(self.levels, self.critical_values)}

    def critical_value(self, m, n, alpha):
        if m != self.m or n != self.n:
            raise TableLookupError(
                f"table covers m={self.m}, n={self.n}; no entry for m={m}, n={n}"
            )
        for a, c in zip(self.levels, self.critical_values):
            if _same_level(a, alpha):
                return c
        raise TableLookupError(
            f"table for m={m}, n={n} has levels {list(self.levels)}; no entry for alpha={alpha}"
        )

    def quadrature_config(self) -> QuadratureConfig:
        return QuadratureConfig.from_descriptor(self.quadrature)

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "kind": TABLE_KIND,
            "m": self.m,
            "n": self.n,
            "levels": [{"alpha": a, "critical_value": c}
                       for a, c in zip(self.levels, self.critical_values)],
            "replicates": self.replicates,
            "root_seed": self.root_seed,
            "quadrature": dict(self.quadrature),
            "standardization": {"ddof": self.ddof},
            "built": self.built,
        }

    def dumps(self) -> str:
        # json writes floats as the shortest repr that round-trips exactly
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d) -> CriticalValueTable:
        if d.get("kind", TABLE_KIND) != TABLE_KIND:
            raise ConfigError(f"not a critical value table: kind={d.get('kind')!r}")
        version = int(d.get("format_version", 0))
        if version != FORMAT_VERSION:
            raise ConfigError(f"unsupported table format_version {version}")
        try:
            levels = tuple(float(e["alpha"]) for e in d["levels"])
            cvs = tuple(float(e["critical_value"]) for e in d["levels"])
            return cls(
                m=int(d["m"]), n=int(d["n"]), levels=levels, critical_values=cvs,
                replicates=int(d["replicates"]), root_seed=int(d["root_seed"]),
                quadrature=dict(d["quadrature"]),
                ddof=int(d.get("standardization", {}).get("ddof", 0)),
                built=str(d.get("built", "")), format_version=version,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed critical value table: {exc}") from exc

    @classmethod
    def loads(cls, text) -> CriticalValueTable:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"critical value table is not valid JSON: {exc}") from exc

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> CriticalValueTable:
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def table_from_statistics(stats, cfg: NullSimConfig, built=None) -> CriticalValueTable:
    ordered = np.sort(np.asarray(stats, dtype=np.float64))
    R = ordered.shape[0]
    cvs = tuple(float(ordered[order_statistic_rank(a, R) - 1]) for a in cfg.levels)
    return CriticalValueTable(
        m=cfg.m, n=cfg.n, levels=cfg.levels, critical_values=cvs, replicates=R,
        root_seed=cfg.root_seed, quadrature=cfg.quadrature.descriptor(), ddof=cfg.ddof,
        built=built if built is not None else build_timestamp(),
    )


def simulate_null(cfg: NullSimConfig, threads=1, built=None) -> CriticalValueTable:
    """Critical values: the ceil((1 - alpha) R)-th smallest of R null statistics."""
    stats = null_statistics(cfg.m, cfg.n, cfg.replicates, cfg.quadrature, cfg.root_seed,
                            cfg.ddof, threads)
    return table_from_statistics(stats, cfg, built)


def p_value(stat, null_stats):
    """Monte Carlo p-value (1 + #{null >= stat}) / (R + 1) from sorted null statistics."""
    null_stats = np.asarray(null_stats, dtype=np.float64)
    if null_stats.size == 0:
        raise ConfigError("p-value needs at least one null statistic")
    value = float(stat)
    exceed = null_stats.size - int(np.searchsorted(null_stats, value, side="left"))
    return (1.0 + exceed) / (null_stats.size + 1.0)


@dataclass(frozen=True)
class Decision:
    reject: bool
    statistic: float
    critical_value: float
    alpha: float
    m: int
    n: int

    @property
    def label(self) -> str:
        return "reject" if self.reject else "retain"


def check_provenance(stat: StatisticValue, table: CriticalValueTable):
    """Refuse to compare a statistic with a table built under another quadrature."""
    if stat.ddof != table.ddof:
        raise ProvenanceError(
            f"statistic uses variance divisor N-{stat.ddof}, table uses N-{table.ddof}"
        )
    if stat.method == "closed-form":
        if table.quadrature.get("method") != CIRCLE_TRAPEZOID:
            raise ProvenanceError("closed-form values need a circle-trapezoid table")
        return
    if stat.quadrature != table.quadrature:
        raise ProvenanceError(
            f"statistic quadrature {stat.quadrature} differs from table quadrature {table.quadrature}"
        )


def decide(stat: StatisticValue, table: CriticalValueTable, alpha) -> Decision:
    """Reject when the statistic is strictly above the tabulated critical value."""
    cv = table.critical_value(stat.m, stat.n, alpha)
    check_provenance(stat, table)
    return Decision(float(stat) > cv, float(stat), cv, float(alpha), stat.m, stat.n)
