"""Sampling-based oracle for gate and whole-graph delay distributions.

Streams come from a counter-based Philox generator keyed by
(seed, stream label), so per-node streams are independent of each other
and of evaluation order, and every run with the same seed is
bit-identical.  Standard normals are produced by the inverse-CDF
transform of open-interval uniforms, giving exactly one draw per
counter tick.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .distributions import CorrelatedPair, GaussianParams
from .timing_graph import TimingGraph, UnsupportedCorrelationError

_U53 = 1 << 53


@dataclass(frozen=True)
class McConfig:
    n_samples: int = 1_000_000
    seed: int = 42

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")


@dataclass
class McResult:
    mean: float
    std: float
    skewness: float
    kurtosis: float
    se_mean: float
    se_std: float
    se_skewness: float
    se_kurtosis: float
    bin_edges: np.ndarray
    counts: np.ndarray
    sorted_samples: np.ndarray


def _stream(seed: int, label: str) -> np.random.Generator:
    digest = hashlib.sha256(label.encode()).digest()
    key = int.from_bytes(digest[:8], "big")
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), key]))


def _standard_normals(gen: np.random.Generator, n: int) -> np.ndarray:
    # Uniforms strictly inside (0, 1): centered 53-bit integers.
    u = (gen.integers(0, _U53, size=n, dtype=np.int64) + 0.5) / _U53
    return ndtri(u)


def sample_correlated_pair(
    pair: CorrelatedPair, cfg: McConfig, label: str = "pair"
) -> tuple[np.ndarray, np.ndarray]:
    """Bivariate Gaussian draws via the 2x2 Cholesky factor."""
    gen = _stream(cfg.seed, label)
    z1 = _standard_normals(gen, cfg.n_samples)
    z2 = _standard_normals(gen, cfg.n_samples)
    rho = pair.rho
    x1 = pair.a.mu + pair.a.sigma * z1
    x2 = pair.b.mu + pair.b.sigma * (rho * z1 + np.sqrt(1.0 - rho * rho) * z2)
    return x1, x2


def summarize(samples: np.ndarray, n_batches: int = 64) -> McResult:
    """Empirical moments with batch-based standard errors and a histogram."""
    n = samples.size
    mean = float(samples.mean())
    centered = samples - mean
    m2 = float(np.mean(centered**2))
    std = float(np.sqrt(m2 * n / max(n - 1, 1)))
    m3 = float(np.mean(centered**3))
    m4 = float(np.mean(centered**4))
    skew = m3 / m2**1.5 if m2 > 0 else 0.0
    kurt = m4 / m2**2 if m2 > 0 else 3.0

    se_mean = std / np.sqrt(n)
    if n >= 4 * n_batches:
        batches = samples[: n - n % n_batches].reshape(n_batches, -1)
        b_mean = batches.mean(axis=1)
        b_cent = batches - b_mean[:, None]
        b_m2 = np.mean(b_cent**2, axis=1)
        b_std = np.sqrt(b_m2)
        with np.errstate(invalid="ignore", divide="ignore"):
            b_skew = np.mean(b_cent**3, axis=1) / b_m2**1.5
            b_kurt = np.mean(b_cent**4, axis=1) / b_m2**2
        root_b = np.sqrt(n_batches)
        se_std = float(np.std(b_std, ddof=1) / root_b)
        se_skew = float(np.std(b_skew, ddof=1) / root_b)
        se_kurt = float(np.std(b_kurt, ddof=1) / root_b)
    else:
        se_std = std / np.sqrt(2.0 * n)
        se_skew = np.sqrt(6.0 / n)
        se_kurt = np.sqrt(24.0 / n)

    lo, hi = mean - 8.0 * std, mean + 8.0 * std
    clipped = samples[(samples >= lo) & (samples <= hi)]
    if clipped.size > 1 and hi > lo:
        q75, q25 = np.percentile(clipped, [75, 25])
        width = 2.0 * (q75 - q25) / clipped.size ** (1.0 / 3.0)
        bins = int(np.ceil((hi - lo) / width)) if width > 0 else 1
        bins = min(max(bins, 1), 10_000)
    else:
        bins = 1
        lo, hi = lo - 0.5, hi + 0.5
    counts, edges = np.histogram(samples, bins=bins, range=(lo, hi))

    return McResult(
        mean=mean,
        std=std,
        skewness=float(skew),
        kurtosis=float(kurt),
        se_mean=float(se_mean),
        se_std=se_std,
        se_skewness=se_skew,
        se_kurtosis=se_kurt,
        bin_edges=edges,
        counts=counts,
        sorted_samples=np.sort(samples),
    )


def mc_gate_samples(g, cfg: McConfig) -> np.ndarray:
    """Raw samples of max(X1, X2) + X0 for GateInputs ``g``."""
    pair = CorrelatedPair(g.x1, g.x2, g.rho)
    x1, x2 = sample_correlated_pair(pair, cfg, label="gate/arrivals")
    gen0 = _stream(cfg.seed, "gate/op")
    x0 = g.x0.mu + g.x0.sigma * _standard_normals(gen0, cfg.n_samples)
    return np.maximum(x1, x2) + x0


def mc_gate(g, cfg: McConfig) -> McResult:
    """Monte Carlo estimate of the single-gate delay distribution."""
    return summarize(mc_gate_samples(g, cfg))


def _gate_rho_supported(graph: TimingGraph, spec) -> bool:
    if spec.input_rho == 0.0 or len(spec.inputs) != 2:
        return spec.input_rho == 0.0
    fanout = {}
    for node in graph.nodes.values():
        for u in node.inputs:
            fanout[u] = fanout.get(u, 0) + 1
    return all(
        graph.nodes[u].kind == "source" and fanout[u] == 1 for u in spec.inputs
    )


def mc_graph_samples(graph: TimingGraph, cfg: McConfig) -> dict[str, np.ndarray]:
    """Per-node sample arrays for the whole graph, in levelized order.

    A declared nonzero input_rho is supported only when both inputs of
    the gate are fanout-1 sources: the graph itself fixes the joint law
    of any internally generated arrivals, so extra correlation cannot be
    imposed there.
    """
    n = cfg.n_samples
    values: dict[str, np.ndarray] = {}
    correlated_sources: set[str] = set()

    for spec in graph.nodes.values():
        if spec.input_rho != 0.0:
            if not _gate_rho_supported(graph, spec):
                raise UnsupportedCorrelationError(
                    f"node {spec.id!r}: input_rho is only supported for two "
                    "fanout-1 source inputs in the MC oracle"
                )
            correlated_sources.update(spec.inputs)

    for level in graph.levels:
        for nid in level:
            spec = graph.nodes[nid]
            if spec.kind == "source":
                if nid in correlated_sources:
                    continue  # drawn jointly at the consuming gate
                arr = graph.source_arrivals[nid]
                gen = _stream(cfg.seed, f"node/{nid}")
                values[nid] = arr.mu + arr.sigma * _standard_normals(gen, n)
                continue
            if spec.input_rho != 0.0:
                a_id, b_id = spec.inputs
                pair = CorrelatedPair(
                    graph.source_arrivals[a_id],
                    graph.source_arrivals[b_id],
                    spec.input_rho,
                )
                xa, xb = sample_correlated_pair(
                    pair, cfg, label=f"pair/{a_id}/{b_id}"
                )
                values[a_id], values[b_id] = xa, xb
            acc = values[spec.inputs[0]]
            for u in spec.inputs[1:]:
                acc = np.maximum(acc, values[u])
            if spec.kind == "gate":
                op = spec.op_time
                gen = _stream(cfg.seed, f"node/{nid}/op")
                acc = acc + op.mu + op.sigma * _standard_normals(gen, n)
            values[nid] = acc
    return values


def mc_graph(graph: TimingGraph, cfg: McConfig) -> dict[str, McResult]:
    """Monte Carlo summary for every sink of the graph."""
    values = mc_graph_samples(graph, cfg)
    return {sid: summarize(values[sid]) for sid in graph.sinks}


def ks_distance(sorted_samples: np.ndarray, cdf) -> float:
    """Kolmogorov-Smirnov distance of an ascending sample against a CDF."""
    samples = np.asarray(sorted_samples, dtype=float)
    n = samples.size
    if n == 0:
        raise ValueError("KS distance of an empty sample is undefined")
    f = np.asarray(cdf(samples), dtype=float)
    i = np.arange(1, n + 1)
    return float(np.max(np.maximum(np.abs(i / n - f), np.abs((i - 1) / n - f))))
