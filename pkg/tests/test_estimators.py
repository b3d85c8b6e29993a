import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ssta.distributions import GaussianParams, gauss_pdf
from ssta.estimators import CombDecomposer, GakedaAnalyzer
from ssta.timing_graph import NodeSpec, TimingGraph


def density_data():
    p = GaussianParams(1.0, 0.8)
    x = np.linspace(-4, 6, 200)
    y = np.array([gauss_pdf(v, p) for v in x])
    return x, y


def test_get_params_round_trip():
    est = CombDecomposer(m=16, width_factor=0.9)
    params = est.get_params()
    assert params["m"] == 16
    assert params["width_factor"] == 0.9
    est2 = clone(est)
    assert est2.get_params() == params


def test_fit_predict_linf():
    x, y = density_data()
    est = CombDecomposer(m=24).fit(x, y)
    assert est.residual_ >= 0
    pred = est.predict(x)
    assert np.max(np.abs(pred - y)) < 1e-3


def test_fit_predict_least_squares():
    x, y = density_data()
    est = CombDecomposer(m=24, objective="ls").fit(x, y)
    pred = est.predict(x)
    assert np.max(np.abs(pred - y)) < 1e-3


def test_unknown_objective_rejected():
    x, y = density_data()
    with pytest.raises(ValueError):
        CombDecomposer(objective="huber").fit(x, y)


def test_mismatched_lengths_rejected():
    x, y = density_data()
    with pytest.raises(ValueError):
        CombDecomposer().fit(x, y[:-1])


def test_predict_before_fit():
    with pytest.raises(NotFittedError):
        CombDecomposer().predict([0.0])


def small_graph():
    nodes = {
        "a": NodeSpec(id="a", kind="source"),
        "b": NodeSpec(id="b", kind="source"),
        "g": NodeSpec(id="g", kind="gate", op_time=GaussianParams(1.0, 0.5), inputs=("a", "b")),
        "t": NodeSpec(id="t", kind="sink", inputs=("g",)),
    }
    arrivals = {"a": GaussianParams(0.0, 1.0), "b": GaussianParams(0.5, 0.8)}
    return TimingGraph(nodes=nodes, source_arrivals=arrivals)


def test_analyzer_fit_and_predict():
    est = GakedaAnalyzer().fit(small_graph())
    assert "t" in est.sink_moments_
    means = est.predict(["t"])
    assert means.shape == (1,)
    assert means[0] == est.result_.moments["t"]["mean"]


def test_analyzer_rejects_non_graph():
    with pytest.raises(TypeError):
        GakedaAnalyzer().fit("not a graph")


def test_analyzer_predict_before_fit():
    with pytest.raises(NotFittedError):
        GakedaAnalyzer().predict()


def test_analyzer_clone_keeps_params():
    est = GakedaAnalyzer(comb_size=16, weak_corr=True)
    est2 = clone(est)
    assert est2.comb_size == 16
    assert est2.weak_corr is True
