import json

import numpy as np
import pytest

from ecfnorm.errors import ConfigError, ProvenanceError, TableLookupError
from ecfnorm.nullsim import (
    CriticalValueTable,
    NullSimConfig,
    build_timestamp,
    decide,
    null_statistics,
    order_statistic_rank,
    p_value,
    simulate_null,
    table_from_statistics,
)
from ecfnorm.statistic import QuadratureConfig, StatisticValue, m1_exact, m2, m_stat


def test_rank():
    assert order_statistic_rank(0.05, 10000) == 9500
    assert order_statistic_rank(0.05, 20000) == 19000
    assert order_statistic_rank(0.1, 1001) == 901
    with pytest.raises(ConfigError):
        order_statistic_rank(0.001, 100)


def test_table_from_known_statistics():
    stats = np.arange(1.0, 1001.0)[::-1]
    cfg = NullSimConfig(1, 20, 1000, (0.01, 0.05))
    t = table_from_statistics(stats, cfg, built="")
    assert t.critical_values == (990.0, 950.0)


@pytest.mark.parametrize("kwargs", [
    dict(replicates=99),
    dict(levels=(0.1, 0.05)),
    dict(levels=(0.0,)),
    dict(levels=()),
    dict(m=0),
    dict(n=1),
    dict(quadrature=QuadratureConfig("circle-trapezoid", 512), m=2),
])
def test_config_errors(kwargs):
    base = dict(m=1, n=20, replicates=1000, levels=(0.05,))
    base.update(kwargs)
    with pytest.raises(ConfigError):
        NullSimConfig(**base)


def test_deterministic_and_monotone(small_uni_table):
    again = simulate_null(NullSimConfig(1, 20, 2000, (0.01, 0.05, 0.1),
                                        QuadratureConfig.default(1), 11), built="")
    assert again.dumps() == small_uni_table.dumps()
    cv = small_uni_table.critical_values
    assert cv[0] > cv[1] > cv[2] > 0


def test_replicate_streams_are_prefix_stable():
    a = null_statistics(1, 10, 300, root_seed=3)
    b = null_statistics(1, 10, 600, root_seed=3)
    np.testing.assert_array_equal(a, b[:300])


def test_threads_do_not_change_table():
    cfg = NullSimConfig(2, 15, 300, (0.05,), QuadratureConfig.default(2, Q=512), 2)
    assert simulate_null(cfg, 1, built="").dumps() == simulate_null(cfg, 4, built="").dumps()


def test_json_round_trip(small_uni_table, tmp_path):
    path = tmp_path / "t.json"
    small_uni_table.save(path)
    loaded = CriticalValueTable.load(path)
    assert loaded == small_uni_table
    assert loaded.dumps() == path.read_text()
    d = json.loads(path.read_text())
    assert d["kind"] == "ecfnorm.critical-values" and d["format_version"] == 1
    assert d["standardization"] == {"ddof": 0}


@pytest.mark.parametrize("text", ["{", '{"kind": "other"}', '{"format_version": 9}',
                                  '{"format_version": 1, "m": 1}'])
def test_malformed_tables(text):
    with pytest.raises(ConfigError):
        CriticalValueTable.loads(text)


def test_lookup(small_uni_table):
    assert small_uni_table.critical_value(1, 20, 0.05) == small_uni_table.critical_values[1]
    assert small_uni_table.entries[(1, 20, 0.1)] == small_uni_table.critical_values[2]
    with pytest.raises(TableLookupError, match="alpha=0.02"):
        small_uni_table.critical_value(1, 20, 0.02)
    with pytest.raises(TableLookupError):
        small_uni_table.critical_value(1, 30, 0.05)


def test_p_value():
    null = np.arange(1.0, 100.0)
    assert p_value(1000.0, null) == 1 / 100
    assert p_value(0.0, null) == 1.0
    assert p_value(50.0, null) == 51 / 100
    with pytest.raises(ConfigError):
        p_value(1.0, [])


def test_decide_strict(small_uni_table):
    cv = small_uni_table.critical_value(1, 20, 0.05)
    at = StatisticValue(cv, 1, 20, "closed-form")
    above = StatisticValue(np.nextafter(cv, 10), 1, 20, "closed-form")
    assert not decide(at, small_uni_table, 0.05).reject
    d = decide(above, small_uni_table, 0.05)
    assert d.reject and d.label == "reject"


def test_decide_on_data(small_uni_table):
    x = np.random.default_rng(0).normal(size=20)
    a = decide(m1_exact(x), small_uni_table, 0.05)
    b = decide(m_stat(x), small_uni_table, 0.05)
    assert a.reject == b.reject
    skewed = np.random.default_rng(0).exponential(size=20) ** 2
    assert decide(m1_exact(skewed), small_uni_table, 0.05).reject


def test_provenance(small_uni_table, small_biv_table):
    x = np.random.default_rng(0).normal(size=(20, 2))
    with pytest.raises(ProvenanceError):
        decide(m2(x, QuadratureConfig.default(2, node_seed=6, Q=1024)), small_biv_table, 0.05)
    with pytest.raises(ProvenanceError):
        decide(m2(x, QuadratureConfig.default(2, node_seed=5)), small_biv_table, 0.05)
    ok = decide(m2(x, QuadratureConfig.default(2, node_seed=5, Q=1024)), small_biv_table, 0.05)
    assert ok.m == 2
    y = np.random.default_rng(1).normal(size=20)
    with pytest.raises(ProvenanceError):
        decide(m_stat(y, QuadratureConfig.default(1, Q=256)), small_uni_table, 0.05)
    with pytest.raises(ProvenanceError):
        from ecfnorm.numerics import standardize
        decide(m1_exact(standardize(y, ddof=1)), small_uni_table, 0.05)


def test_timestamp(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    assert build_timestamp() == "1970-01-01T00:00:00Z"
    monkeypatch.delenv("SOURCE_DATE_EPOCH")
    assert build_timestamp().endswith("Z")
