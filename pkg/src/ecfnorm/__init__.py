"""Empirical characteristic function test of joint normality and independence."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .alternatives import AlternativeSpec, density_bivariate, parse_alternative, sample_alt
from .errors import (
    ConfigError,
    CostGuardError,
    DataError,
    DegenerateDataError,
    DomainError,
    EcfError,
    ParseError,
    ProvenanceError,
    ShapeError,
    TableLookupError,
)
from .nullsim import CriticalValueTable, NullSimConfig, decide, p_value, simulate_null
from .numerics import (
    EXP_NEG_HALF,
    RngStream,
    SphereNodeSet,
    StandardizedSample,
    bessel_j0,
    circle_nodes,
    sphere_mc_nodes,
    standardize,
    surface_area,
)
from .power import PowerStudyConfig, PowerTable, rho_symmetry_check, run_power_row, run_suite
from .statistic import QuadratureConfig, StatisticValue, m1_exact, m2, m_stat, mm_naive_oracle

__all__ = [
    "BACKEND", "AlternativeSpec", "density_bivariate", "parse_alternative", "sample_alt",
    "ConfigError", "CostGuardError", "DataError", "DegenerateDataError", "DomainError",
    "EcfError", "ParseError", "ProvenanceError", "ShapeError", "TableLookupError",
    "CriticalValueTable", "NullSimConfig", "decide", "p_value", "simulate_null",
    "EXP_NEG_HALF", "RngStream", "SphereNodeSet", "StandardizedSample", "bessel_j0",
    "circle_nodes", "sphere_mc_nodes", "standardize", "surface_area",
    "PowerStudyConfig", "PowerTable", "rho_symmetry_check", "run_power_row", "run_suite",
    "QuadratureConfig", "StatisticValue", "m1_exact", "m2", "m_stat", "mm_naive_oracle",
]
