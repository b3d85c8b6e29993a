"""Timing-graph model, levelized traversal and mixture propagation.

Nodes are sources (with arrival distributions), gates (with operation
times) or sinks.  Propagation walks the levelized order; at each gate
the exact gate-delay formula is applied per pair of input mixture
components and the resulting density is re-decomposed onto a fresh
Gaussian comb centered on its own moments.

Correlation scope: a declared ``input_rho`` is honored exactly when both
arrivals are single Gaussians; for mixture inputs it requires the
weak-correlation mode, which applies the linear-in-rho density per
component pair.  Structural correlation from reconvergent fanout is not
tracked.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Union

import numpy as np

from .distributions import GaussianParams
from .gate_delay import (
    gate_mean_closed_core,
    gate_pdf_exact_core,
    gate_pdf_independent_core,
    gate_pdf_weak_corr_core,
    gate_second_moment_closed_core,
    sigma_floor,
)
from .gmm import (
    DEFAULT_PRUNE_WEIGHT,
    CombConfig,
    GaussianMixture,
    decompose,
    default_support,
    mixture_summary,
    prune,
)

ArrivalDistribution = Union[GaussianParams, GaussianMixture]

NODE_KINDS = ("source", "gate", "sink")


class GraphError(ValueError):
    """Structural problem in a timing graph (parse, cycle, dangling edge)."""


class UnsupportedCorrelationError(ValueError):
    """rho != 0 requested where only the independent path is available."""


class PropagationError(RuntimeError):
    def __init__(self, node_id: str, level: int, cause: Exception):
        super().__init__(f"propagation failed at node {node_id!r} (level {level}): {cause}")
        self.node_id = node_id
        self.level = level
        self.cause = cause


@dataclass(frozen=True)
class NodeSpec:
    id: str
    kind: str
    op_time: GaussianParams | None = None
    inputs: tuple[str, ...] = ()
    input_rho: float = 0.0

    def __post_init__(self):
        if self.kind not in NODE_KINDS:
            raise GraphError(f"node {self.id!r}: unknown kind {self.kind!r}")
        if not -1.0 <= self.input_rho <= 1.0:
            raise GraphError(f"node {self.id!r}: input_rho outside [-1, 1]")
        if self.kind == "gate" and self.op_time is None:
            raise GraphError(f"gate node {self.id!r} must declare op_time")


@dataclass
class TimingGraph:
    nodes: dict[str, NodeSpec]
    source_arrivals: dict[str, GaussianParams]

    def __post_init__(self):
        self._validate()

    @property
    def edges(self) -> list[tuple[str, str]]:
        return [(u, v.id) for v in self.nodes.values() for u in v.inputs]

    @property
    def sinks(self) -> list[str]:
        return sorted(n.id for n in self.nodes.values() if n.kind == "sink")

    def _validate(self):
        for node in self.nodes.values():
            for u in node.inputs:
                if u not in self.nodes:
                    raise GraphError(
                        f"dangling edge: node {node.id!r} lists unknown input {u!r}"
                    )
            if node.kind == "source":
                if node.inputs:
                    raise GraphError(f"source {node.id!r} must not have inputs")
                if node.id not in self.source_arrivals:
                    raise GraphError(f"source {node.id!r} has no arrival distribution")
            elif not node.inputs:
                raise GraphError(f"non-source node {node.id!r} has no inputs")
        for sid in self.source_arrivals:
            if sid not in self.nodes or self.nodes[sid].kind != "source":
                raise GraphError(f"arrival given for non-source node {sid!r}")
        self.levels = levelize(self)
        reached = {n for level in self.levels for n in level}
        unreachable = sorted(set(self.nodes) - reached)
        if unreachable:
            raise GraphError(f"nodes unreachable from any source: {unreachable}")


def levelize(g: TimingGraph) -> list[list[str]]:
    """Kahn-style topological levels, lexicographic ids within a level.

    Raises GraphError naming one edge of a cycle if the graph is cyclic.
    """
    indegree = {nid: len(spec.inputs) for nid, spec in g.nodes.items()}
    fanout: dict[str, list[str]] = {nid: [] for nid in g.nodes}
    for nid, spec in g.nodes.items():
        for u in spec.inputs:
            fanout[u].append(nid)
    current = sorted(nid for nid, deg in indegree.items() if deg == 0)
    levels = []
    seen = 0
    while current:
        levels.append(current)
        seen += len(current)
        nxt = set()
        for nid in current:
            for v in fanout[nid]:
                indegree[v] -= 1
                if indegree[v] == 0:
                    nxt.add(v)
        current = sorted(nxt)
    if seen != len(g.nodes):
        stuck = sorted(nid for nid, deg in indegree.items() if deg > 0)
        witness = next(
            (u, v.id)
            for v in (g.nodes[s] for s in stuck)
            for u in v.inputs
            if u in stuck
        )
        raise GraphError(f"cycle detected; one cycle edge is {witness[0]!r} -> {witness[1]!r}")
    return levels


_ALLOWED_NODE_KEYS = {"id", "kind", "op_time", "inputs", "input_rho"}
_ALLOWED_TOP_KEYS = {"nodes", "sources"}


def _parse_gaussian(obj, where: str) -> GaussianParams:
    if not isinstance(obj, dict) or set(obj) != {"mu", "sigma"}:
        raise GraphError(f"{where}: expected an object with keys mu, sigma")
    try:
        return GaussianParams(float(obj["mu"]), float(obj["sigma"]))
    except (TypeError, ValueError) as exc:
        raise GraphError(f"{where}: {exc}") from exc


def load_graph(text: str) -> TimingGraph:
    """Parse the JSON graph document (strict: unknown keys are rejected)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise GraphError("top level must be a JSON object")
    unknown = set(doc) - _ALLOWED_TOP_KEYS
    if unknown:
        raise GraphError(f"unknown top-level keys: {sorted(unknown)}")
    nodes: dict[str, NodeSpec] = {}
    for entry in doc.get("nodes", []):
        if not isinstance(entry, dict):
            raise GraphError("each node must be a JSON object")
        unknown = set(entry) - _ALLOWED_NODE_KEYS
        if unknown:
            raise GraphError(f"node entry has unknown keys: {sorted(unknown)}")
        if "id" not in entry or "kind" not in entry:
            raise GraphError(f"node entry missing id/kind: {entry}")
        nid = str(entry["id"])
        if nid in nodes:
            raise GraphError(f"duplicate node id {nid!r}")
        op_time = None
        if "op_time" in entry:
            op_time = _parse_gaussian(entry["op_time"], f"node {nid!r} op_time")
        nodes[nid] = NodeSpec(
            id=nid,
            kind=str(entry["kind"]),
            op_time=op_time,
            inputs=tuple(str(u) for u in entry.get("inputs", [])),
            input_rho=float(entry.get("input_rho", 0.0)),
        )
    arrivals = {}
    for entry in doc.get("sources", []):
        if not isinstance(entry, dict) or set(entry) != {"id", "arrival"}:
            raise GraphError("each source entry must have exactly the keys id, arrival")
        sid = str(entry["id"])
        arrivals[sid] = _parse_gaussian(entry["arrival"], f"source {sid!r} arrival")
    return TimingGraph(nodes=nodes, source_arrivals=arrivals)


@dataclass
class PropagationResult:
    """Per-node arrival mixtures, moments and decomposition residuals."""

    arrivals: dict[str, ArrivalDistribution]
    moments: dict[str, dict[str, float]]
    residuals: dict[str, float]
    visit_order: list[str]


def _as_arrays(dist: ArrivalDistribution):
    if isinstance(dist, GaussianParams):
        return np.array([1.0]), np.array([dist.mu]), np.array([dist.sigma])
    return dist.weights, dist.mus, dist.sigmas


def _widen(sigmas: np.ndarray, floor: float) -> np.ndarray:
    return np.maximum(sigmas, floor)


def propagate_gate(
    in1: ArrivalDistribution,
    in2: ArrivalDistribution,
    op: GaussianParams,
    rho: float,
    cfg: CombConfig | None = None,
    weak_corr: bool = False,
    comb_size: int = 32,
    width_factor: float = 1.0,
    n_samples: int | None = None,
) -> tuple[ArrivalDistribution, float]:
    """max of two arrivals plus the op time, re-decomposed onto a comb.

    ``cfg`` fixes the comb support explicitly; by default the support is
    mean +- 6 std of the pre-decomposition density (closed-form moments).
    Returns (mixture, LP residual).
    """
    both_gaussian = isinstance(in1, GaussianParams) and isinstance(in2, GaussianParams)
    if rho != 0.0 and not both_gaussian and not weak_corr:
        raise UnsupportedCorrelationError(
            "correlated mixture inputs require the weak-correlation mode"
        )
    w1, mu1, sd1 = _as_arrays(in1)
    w2, mu2, sd2 = _as_arrays(in2)
    floor = sigma_floor(*sd1, *sd2, op.sigma)
    sd1 = _widen(sd1, floor)
    sd2 = _widen(sd2, floor)
    sd0 = max(op.sigma, floor)

    # Flatten all component pairs.
    pw = np.outer(w1, w2).ravel()
    pmu1 = np.repeat(mu1, mu2.size)
    psd1 = np.repeat(sd1, sd2.size)
    pmu2 = np.tile(mu2, mu1.size)
    psd2 = np.tile(sd2, sd1.size)

    mean = float(
        np.dot(pw, gate_mean_closed_core(pmu1, psd1, pmu2, psd2, op.mu, sd0, rho))
    )
    second = float(
        np.dot(pw, gate_second_moment_closed_core(pmu1, psd1, pmu2, psd2, op.mu, sd0, rho))
    )
    std = float(np.sqrt(max(second - mean * mean, floor * floor)))

    if both_gaussian:
        def target(x):
            return gate_pdf_exact_core(
                x, pmu1[0], psd1[0], pmu2[0], psd2[0], op.mu, sd0, rho
            )
    elif rho == 0.0:
        def target(x):
            x = np.asarray(x, dtype=float)
            terms = gate_pdf_independent_core(
                x[:, None], pmu1, psd1, pmu2, psd2, op.mu, sd0
            )
            return terms @ pw
    else:
        def target(x):
            x = np.asarray(x, dtype=float)
            terms = gate_pdf_weak_corr_core(
                x[:, None], pmu1, psd1, pmu2, psd2, op.mu, sd0, rho
            )
            return terms @ pw

    if cfg is None:
        cfg = CombConfig(
            m=comb_size,
            support=default_support(mean, std),
            width_factor=width_factor,
        )
    mixture, residual = decompose(target, cfg, n_samples=n_samples)
    return prune(mixture, DEFAULT_PRUNE_WEIGHT), residual


def _shift_by_op(dist: ArrivalDistribution, op: GaussianParams) -> ArrivalDistribution:
    """Add an independent Gaussian op time: exact, componentwise."""
    if isinstance(dist, GaussianParams):
        return GaussianParams(dist.mu + op.mu, float(np.hypot(dist.sigma, op.sigma)))
    return GaussianMixture(
        dist.weights, dist.mus + op.mu, np.hypot(dist.sigmas, op.sigma)
    )


def fold_multi_input(
    inputs: list[ArrivalDistribution],
    op: GaussianParams,
    rho: float = 0.0,
    **prop_kwargs,
) -> tuple[ArrivalDistribution, float]:
    """Pairwise left-to-right max fold; the op time is added once, last.

    Intermediate folds use a sigma-floor dummy op time, so the result is
    the distribution of max(inputs) + op up to decomposition residual.
    A declared rho is honored only for exactly two inputs.
    """
    if len(inputs) < 2:
        raise ValueError("fold needs at least two inputs")
    if rho != 0.0 and len(inputs) > 2:
        raise UnsupportedCorrelationError(
            "input_rho is defined only for two-input gates"
        )
    sigmas = [s for d in inputs for s in _as_arrays(d)[2]]
    dummy = GaussianParams(0.0, sigma_floor(*sigmas, op.sigma))
    acc = inputs[0]
    residual_max = 0.0
    for k, nxt in enumerate(inputs[1:], start=2):
        last = k == len(inputs)
        acc, res = propagate_gate(
            acc, nxt, op if last else dummy, rho if len(inputs) == 2 else 0.0,
            **prop_kwargs,
        )
        residual_max = max(residual_max, res)
    return acc, residual_max


def _node_summary(dist: ArrivalDistribution) -> dict[str, float]:
    if isinstance(dist, GaussianParams):
        return {
            "mean": dist.mu,
            "std": dist.sigma,
            "skewness": 0.0,
            "kurtosis": 3.0,
        }
    return mixture_summary(dist)


def gakeda_run(
    g: TimingGraph,
    comb_size: int = 32,
    width_factor: float = 1.0,
    n_samples: int | None = None,
    weak_corr: bool = False,
    max_workers: int = 1,
) -> PropagationResult:
    """Propagate all arrival distributions through the graph.

    Nodes within a level are independent and may be processed by a small
    thread pool; results are assembled in canonical (level, id) order so
    the output does not depend on scheduling.
    """
    arrivals: dict[str, ArrivalDistribution] = {}
    moments: dict[str, dict[str, float]] = {}
    residuals: dict[str, float] = {}
    visit_order: list[str] = []

    def process(nid: str, level_idx: int):
        spec = g.nodes[nid]
        try:
            if spec.kind == "source":
                return g.source_arrivals[nid], 0.0
            ins = [arrivals[u] for u in spec.inputs]
            op = spec.op_time if spec.kind == "gate" else GaussianParams(0.0, 0.0)
            if len(ins) == 1:
                # Single-input node: pure convolution, exact for mixtures.
                return _shift_by_op(ins[0], op), 0.0
            return fold_multi_input(
                ins,
                op,
                rho=spec.input_rho,
                weak_corr=weak_corr,
                comb_size=comb_size,
                width_factor=width_factor,
                n_samples=n_samples,
            )
        except Exception as exc:  # noqa: BLE001 - rewrapped with location
            raise PropagationError(nid, level_idx, exc) from exc

    for level_idx, level in enumerate(g.levels):
        if max_workers > 1 and len(level) > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                results = list(pool.map(lambda nid: process(nid, level_idx), level))
        else:
            results = [process(nid, level_idx) for nid in level]
        for nid, (dist, res) in zip(level, results):
            arrivals[nid] = dist
            residuals[nid] = res
            moments[nid] = _node_summary(dist)
            visit_order.append(nid)
    return PropagationResult(
        arrivals=arrivals, moments=moments, residuals=residuals, visit_order=visit_order
    )


def default_max_workers() -> int:
    """Worker cap from the SSTA_THREADS environment variable (default 1)."""
    raw = os.environ.get("SSTA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
