import numpy as np
import pytest

from ssta.distributions import CorrelatedPair, GaussianParams
from ssta.gate_delay import GateInputs
from ssta.monte_carlo import (
    McConfig,
    ks_distance,
    mc_gate,
    mc_graph,
    sample_correlated_pair,
    summarize,
)
from ssta.timing_graph import NodeSpec, TimingGraph

STD = GaussianParams(0.0, 1.0)


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(n_samples=0)


def test_sampling_reproducible():
    pair = CorrelatedPair(STD, GaussianParams(1.0, 2.0), 0.3)
    cfg = McConfig(n_samples=10_000, seed=7)
    a1, b1 = sample_correlated_pair(pair, cfg)
    a2, b2 = sample_correlated_pair(pair, cfg)
    np.testing.assert_array_equal(a1, a2)
    np.testing.assert_array_equal(b1, b2)


def test_different_labels_give_different_streams():
    pair = CorrelatedPair(STD, STD, 0.0)
    cfg = McConfig(n_samples=1000, seed=7)
    a1, _ = sample_correlated_pair(pair, cfg, label="one")
    a2, _ = sample_correlated_pair(pair, cfg, label="two")
    assert not np.array_equal(a1, a2)


def test_comonotone_pair_is_affine():
    pair = CorrelatedPair(GaussianParams(1.0, 0.5), GaussianParams(2.0, 1.5), 1.0)
    x1, x2 = sample_correlated_pair(pair, McConfig(n_samples=5000, seed=1))
    np.testing.assert_allclose(x2, 2.0 + 1.5 * (x1 - 1.0) / 0.5, atol=1e-10)
    assert np.corrcoef(x1, x2)[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_independent_pair_correlation_small():
    pair = CorrelatedPair(STD, STD, 0.0)
    n = 1_000_000
    x1, x2 = sample_correlated_pair(pair, McConfig(n_samples=n, seed=3))
    assert abs(np.corrcoef(x1, x2)[0, 1]) < 3.0 / np.sqrt(n)


def test_marginal_moments():
    a = GaussianParams(2.0, 0.5)
    b = GaussianParams(-1.0, 1.5)
    n = 1_000_000
    x1, x2 = sample_correlated_pair(CorrelatedPair(a, b, 0.4), McConfig(n_samples=n, seed=5))
    assert x1.mean() == pytest.approx(a.mu, abs=4 * a.sigma / np.sqrt(n))
    assert x2.mean() == pytest.approx(b.mu, abs=4 * b.sigma / np.sqrt(n))
    assert x1.std(ddof=1) == pytest.approx(a.sigma, rel=0.01)
    assert x2.std(ddof=1) == pytest.approx(b.sigma, rel=0.01)


def test_summarize_standard_normal():
    x, _ = sample_correlated_pair(CorrelatedPair(STD, STD, 0.0), McConfig(n_samples=200_000, seed=9))
    r = summarize(x)
    assert r.mean == pytest.approx(0.0, abs=4 * r.se_mean)
    assert r.std == pytest.approx(1.0, abs=4 * r.se_std)
    assert r.skewness == pytest.approx(0.0, abs=4 * r.se_skewness)
    assert r.kurtosis == pytest.approx(3.0, abs=4 * r.se_kurtosis)
    assert r.counts.sum() == 200_000
    assert np.all(np.diff(r.sorted_samples) >= 0)


def test_se_mean_scales_as_inverse_sqrt_n():
    ses = []
    for n in (10_000, 100_000, 1_000_000):
        x, _ = sample_correlated_pair(CorrelatedPair(STD, STD, 0.0), McConfig(n_samples=n, seed=2))
        ses.append(summarize(x).se_mean)
    for i in range(2):
        ratio = ses[i] / ses[i + 1]
        assert ratio == pytest.approx(np.sqrt(10.0), rel=0.2)


def test_mc_gate_dominated():
    g = GateInputs(GaussianParams(20.0, 0.5), STD, GaussianParams(1.0, 0.5))
    r = mc_gate(g, McConfig(n_samples=200_000, seed=11))
    assert r.mean == pytest.approx(21.0, abs=4 * r.se_mean)


def simple_graph(rho=0.0):
    nodes = {
        "a": NodeSpec(id="a", kind="source"),
        "b": NodeSpec(id="b", kind="source"),
        "g": NodeSpec(
            id="g", kind="gate", op_time=GaussianParams(0.0, 1.0), inputs=("a", "b"), input_rho=rho
        ),
        "t": NodeSpec(id="t", kind="sink", inputs=("g",)),
    }
    arrivals = {"a": GaussianParams(1.0, 0.75), "b": GaussianParams(2.0, 3.0)}
    return TimingGraph(nodes=nodes, source_arrivals=arrivals)


def test_mc_graph_identity():
    arr = GaussianParams(1.0, 0.7)
    nodes = {
        "s": NodeSpec(id="s", kind="source"),
        "t": NodeSpec(id="t", kind="sink", inputs=("s",)),
    }
    g = TimingGraph(nodes=nodes, source_arrivals={"s": arr})
    r = mc_graph(g, McConfig(n_samples=200_000, seed=13))["t"]
    assert r.mean == pytest.approx(arr.mu, abs=4 * r.se_mean)
    assert r.std == pytest.approx(arr.sigma, rel=0.01)


def test_mc_graph_single_gate_matches_mc_gate_stats():
    cfg = McConfig(n_samples=400_000, seed=17)
    r_graph = mc_graph(simple_graph(), cfg)["t"]
    g = GateInputs(GaussianParams(1.0, 0.75), GaussianParams(2.0, 3.0), GaussianParams(0.0, 1.0))
    r_gate = mc_gate(g, cfg)
    se = np.hypot(r_graph.se_mean, r_gate.se_mean)
    assert r_graph.mean == pytest.approx(r_gate.mean, abs=4 * se)


def test_mc_graph_correlated_sources():
    cfg = McConfig(n_samples=400_000, seed=19)
    r = mc_graph(simple_graph(rho=0.5), cfg)["t"]
    from ssta.gate_delay import gate_mean_closed

    g = GateInputs(
        GaussianParams(1.0, 0.75), GaussianParams(2.0, 3.0), GaussianParams(0.0, 1.0), 0.5
    )
    assert r.mean == pytest.approx(gate_mean_closed(g), abs=4 * r.se_mean)


def test_mc_graph_rejects_internal_correlation():
    from ssta.timing_graph import UnsupportedCorrelationError

    op = GaussianParams(0.0, 1.0)
    nodes = {
        "a": NodeSpec(id="a", kind="source"),
        "b": NodeSpec(id="b", kind="source"),
        "g1": NodeSpec(id="g1", kind="gate", op_time=op, inputs=("a", "b")),
        "g2": NodeSpec(id="g2", kind="gate", op_time=op, inputs=("g1", "a"), input_rho=0.5),
        "t": NodeSpec(id="t", kind="sink", inputs=("g2",)),
    }
    arrivals = {"a": GaussianParams(0, 1), "b": GaussianParams(0, 1)}
    g = TimingGraph(nodes=nodes, source_arrivals=arrivals)
    with pytest.raises(UnsupportedCorrelationError):
        mc_graph(g, McConfig(n_samples=100, seed=1))


def test_seed_independence():
    pair = CorrelatedPair(STD, STD, 0.0)
    r1 = summarize(sample_correlated_pair(pair, McConfig(n_samples=200_000, seed=100))[0])
    r2 = summarize(sample_correlated_pair(pair, McConfig(n_samples=200_000, seed=200))[0])
    assert abs(r1.mean - r2.mean) < 6 * np.hypot(r1.se_mean, r2.se_mean)


def test_ks_distance_trivial_cases():
    with pytest.raises(ValueError):
        ks_distance(np.array([]), lambda x: x)
    assert ks_distance(np.array([0.0]), lambda x: np.full_like(x, 0.5)) == 0.5
    assert ks_distance(np.array([-5.0, -4.0]), lambda x: np.ones_like(x)) == 1.0


def test_ks_distance_self_consistent():
    from scipy.special import ndtr

    x, _ = sample_correlated_pair(CorrelatedPair(STD, STD, 0.0), McConfig(n_samples=1_000_000, seed=23))
    d = ks_distance(np.sort(x), ndtr)
    assert d < 1.95 / np.sqrt(1_000_000)
