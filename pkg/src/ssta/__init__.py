"""Statistical static timing analysis with Gaussian-comb mixtures.

Core pieces: exact gate-delay densities (max of two correlated Gaussian
arrivals plus a Gaussian operation time), minimax Gaussian-comb
decomposition of non-Gaussian densities, levelized graph propagation,
and a reproducible Monte Carlo oracle.
"""

from .distributions import (
    CorrelatedPair,
    DegenerateCorrelationError,
    GaussianParams,
    clark_max_moments,
    max2_correlated_pdf,
    max2_independent_cdf,
    max2_independent_pdf,
    max2_weak_corr_pdf,
)
from .gate_delay import (
    GateInputs,
    QuadratureError,
    gate_cdf_grid,
    gate_kurtosis,
    gate_mean_closed,
    gate_moment_quadrature,
    gate_moments_checked,
    gate_pdf_exact,
    gate_pdf_independent,
    gate_pdf_weak_corr,
    gate_second_moment_closed,
    gate_skewness,
    gate_std,
)
from .gmm import (
    CombConfig,
    CombTemplate,
    GaussianComponent,
    GaussianMixture,
    build_comb,
    decompose,
    decompose_least_squares,
    default_support,
    mixture_cdf,
    mixture_moments,
    mixture_pdf,
    mixture_summary,
    prune,
)
from .monte_carlo import (
    McConfig,
    McResult,
    ks_distance,
    mc_gate,
    mc_gate_samples,
    mc_graph,
    mc_graph_samples,
    sample_correlated_pair,
    summarize,
)
from .simplex import (
    LpInfeasibleError,
    LpProblem,
    LpSolution,
    LpUnboundedError,
    lp_solve,
)
from .timing_graph import (
    GraphError,
    NodeSpec,
    PropagationError,
    PropagationResult,
    TimingGraph,
    UnsupportedCorrelationError,
    fold_multi_input,
    gakeda_run,
    levelize,
    load_graph,
    propagate_gate,
)
from .estimators import CombDecomposer, GakedaAnalyzer

__version__ = "0.1.0"

__all__ = [
    "CombConfig",
    "CombDecomposer",
    "CombTemplate",
    "CorrelatedPair",
    "DegenerateCorrelationError",
    "GakedaAnalyzer",
    "GateInputs",
    "GaussianComponent",
    "GaussianMixture",
    "GaussianParams",
    "GraphError",
    "LpInfeasibleError",
    "LpProblem",
    "LpSolution",
    "LpUnboundedError",
    "McConfig",
    "McResult",
    "NodeSpec",
    "PropagationError",
    "PropagationResult",
    "QuadratureError",
    "TimingGraph",
    "UnsupportedCorrelationError",
    "build_comb",
    "clark_max_moments",
    "decompose",
    "decompose_least_squares",
    "default_support",
    "fold_multi_input",
    "gakeda_run",
    "gate_cdf_grid",
    "gate_kurtosis",
    "gate_mean_closed",
    "gate_moment_quadrature",
    "gate_moments_checked",
    "gate_pdf_exact",
    "gate_pdf_independent",
    "gate_pdf_weak_corr",
    "gate_second_moment_closed",
    "gate_skewness",
    "gate_std",
    "ks_distance",
    "levelize",
    "load_graph",
    "lp_solve",
    "max2_correlated_pdf",
    "max2_independent_cdf",
    "max2_independent_pdf",
    "max2_weak_corr_pdf",
    "mc_gate",
    "mc_gate_samples",
    "mc_graph",
    "mc_graph_samples",
    "mixture_cdf",
    "mixture_moments",
    "mixture_pdf",
    "mixture_summary",
    "propagate_gate",
    "prune",
    "sample_correlated_pair",
    "summarize",
]
