"""Gaussian-comb mixture representation of non-Gaussian delay densities.

A comb is a mixture whose component means are uniformly spaced with a
shared width, so a target density is fit by solving for the weights
only.  The fit minimizes the sup-norm residual on a sample grid, posed
as a linear program (min t s.t. -t <= Mw - y <= t, w >= 0); a
nonnegative least-squares alternative is provided as well.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .distributions import SQRT_2PI, GaussianParams
from .simplex import LpProblem, lp_solve

log = logging.getLogger(__name__)

DEFAULT_COMB_SIZE = 32
DEFAULT_WIDTH_FACTOR = 1.0
DEFAULT_PRUNE_WEIGHT = 1e-6

# Floor on the sample-grid size for the weight fit.  The default grid
# is max(floor, 3m): enough rows to overdetermine the weights at every
# comb size while keeping the LP small enough that kernel evaluation,
# not the solve, dominates per-gate cost (near-quadratic in m).
DEFAULT_FIT_SAMPLES = 128

# Half-width of the default fit support in units of the target's
# standard deviation.  Five sigmas keeps truncated tail mass below 3e-7
# while leaving the comb spacing fine enough for accurate moments.
DEFAULT_SUPPORT_SIGMAS = 5.0


def default_support(mean: float, std: float) -> tuple[float, float]:
    """Default comb support for a density with the given moments."""
    half = DEFAULT_SUPPORT_SIGMAS * std
    return (mean - half, mean + half)


@dataclass(frozen=True)
class GaussianComponent:
    weight: float
    params: GaussianParams

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError(f"component weight must be >= 0, got {self.weight}")
        self.params.require_positive_sigma()


class GaussianMixture:
    """Weighted sum of Gaussian densities, normalized to unit mass.

    Components are stored sorted by mean (strictly increasing; equal
    means are merged), and weights are renormalized to sum to one.
    Internally the parameters live in flat arrays so that evaluation and
    pairwise propagation vectorize.
    """

    def __init__(self, weights, mus, sigmas):
        weights = np.asarray(weights, dtype=float)
        mus = np.asarray(mus, dtype=float)
        sigmas = np.asarray(sigmas, dtype=float)
        if not (weights.shape == mus.shape == sigmas.shape) or weights.ndim != 1:
            raise ValueError("weights, mus, sigmas must be equal-length 1-D arrays")
        if weights.size == 0:
            raise ValueError("mixture needs at least one component")
        if np.any(weights < 0):
            raise ValueError("mixture weights must be nonnegative")
        if np.any(sigmas <= 0):
            raise ValueError("mixture component sigmas must be positive")
        total = weights.sum()
        if total <= 0:
            raise ValueError("mixture weights sum to zero")
        order = np.argsort(mus, kind="stable")
        mus, sigmas, weights = mus[order], sigmas[order], weights[order]
        # Merge duplicate means so the canonical ordering is strict.
        keep_mu, keep_sd, keep_w = [], [], []
        for mu, sd, w in zip(mus, sigmas, weights):
            if keep_mu and mu == keep_mu[-1] and sd == keep_sd[-1]:
                keep_w[-1] += w
            else:
                keep_mu.append(mu)
                keep_sd.append(sd)
                keep_w.append(w)
        self.mus = np.array(keep_mu)
        self.sigmas = np.array(keep_sd)
        self.weights = np.array(keep_w) / total

    @classmethod
    def single(cls, p: GaussianParams) -> "GaussianMixture":
        return cls([1.0], [p.mu], [p.sigma])

    @property
    def components(self) -> list[GaussianComponent]:
        return [
            GaussianComponent(w, GaussianParams(mu, sd))
            for w, mu, sd in zip(self.weights, self.mus, self.sigmas)
        ]

    def __len__(self):
        return self.weights.size

    def to_triples(self) -> list[tuple[float, float, float]]:
        """Serialization form: ordered (weight, mu, sigma) triples."""
        return [
            (float(w), float(mu), float(sd))
            for w, mu, sd in zip(self.weights, self.mus, self.sigmas)
        ]

    @classmethod
    def from_triples(cls, triples) -> "GaussianMixture":
        arr = np.asarray(list(triples), dtype=float).reshape(-1, 3)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2])


@dataclass(frozen=True)
class CombConfig:
    """Geometry of a Gaussian comb: m components on a support interval."""

    m: int = DEFAULT_COMB_SIZE
    support: tuple[float, float] = (0.0, 1.0)
    width_factor: float = DEFAULT_WIDTH_FACTOR

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"comb needs m >= 2 components, got {self.m}")
        lo, hi = self.support
        if not lo < hi:
            raise ValueError(f"empty comb support {self.support}")
        if self.width_factor <= 0:
            raise ValueError(f"width_factor must be > 0, got {self.width_factor}")


@dataclass(frozen=True)
class CombTemplate:
    """Comb with fixed means and shared sigma; weights still unknown."""

    mus: np.ndarray
    sigma: float

    def design_matrix(self, x) -> np.ndarray:
        """M[i, k] = normal density of component k at sample point x_i."""
        x = np.asarray(x, dtype=float)
        u = (x[:, None] - self.mus[None, :]) / self.sigma
        return np.exp(-0.5 * u * u) / (SQRT_2PI * self.sigma)


def build_comb(cfg: CombConfig) -> CombTemplate:
    """Uniformly spaced comb with sigma = width_factor * spacing."""
    lo, hi = cfg.support
    mus = np.linspace(lo, hi, cfg.m)
    spacing = (hi - lo) / (cfg.m - 1)
    return CombTemplate(mus=mus, sigma=cfg.width_factor * spacing)


def assemble_lp(x, y, comb: CombTemplate) -> LpProblem:
    """Minimax weight-fit LP: variables (w_1..w_m, t), A = [[M,-1],[-M,-1]]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0:
        raise ValueError("no sample points")
    if x.shape != y.shape:
        raise ValueError("x and y must have the same shape")
    M = comb.design_matrix(x)
    n, m = M.shape
    ones = np.ones((n, 1))
    A = np.block([[M, -ones], [-M, -ones]])
    b = np.concatenate([y, -y])
    c = np.zeros(m + 1)
    c[-1] = 1.0
    return LpProblem(c=c, A=A, b=b)


def decompose(
    target,
    cfg: CombConfig,
    n_samples: int | None = None,
    residual_warn: float | None = None,
) -> tuple[GaussianMixture, float]:
    """Fit ``target`` (a density callable) on the comb, minimax objective.

    Returns the unit-mass mixture and the LP optimum t* (the realized
    sup-residual of the un-normalized fit).
    """
    if n_samples is None:
        n_samples = max(DEFAULT_FIT_SAMPLES, 3 * cfg.m)
    if n_samples < cfg.m:
        raise ValueError(f"need n_samples >= m, got {n_samples} < {cfg.m}")
    comb = build_comb(cfg)
    lo, hi = cfg.support
    x = np.linspace(lo, hi, n_samples)
    y = np.maximum(np.asarray(target(x), dtype=float), 0.0)
    solution = lp_solve(assemble_lp(x, y, comb))
    weights = solution.x[:-1]
    t_star = float(solution.x[-1])
    if residual_warn is not None and t_star > residual_warn:
        log.warning(
            "decomposition residual %.3e exceeds threshold %.3e", t_star, residual_warn
        )
    mixture = _mixture_from_weights(weights, comb)
    return mixture, t_star


def decompose_least_squares(x, y, comb: CombTemplate) -> tuple[GaussianMixture, float]:
    """Nonnegative least-squares weight fit on the same design matrix."""
    x = np.asarray(x, dtype=float)
    y = np.maximum(np.asarray(y, dtype=float), 0.0)
    M = comb.design_matrix(x)
    weights, residual = nnls(M, y)
    return _mixture_from_weights(weights, comb), float(residual)


def _mixture_from_weights(weights, comb: CombTemplate) -> GaussianMixture:
    weights = np.asarray(weights, dtype=float)
    if weights.sum() <= 0:
        raise ValueError("decomposition produced an all-zero weight vector")
    return GaussianMixture(weights, comb.mus, np.full(comb.mus.size, comb.sigma))


def mixture_pdf(x, mix: GaussianMixture):
    """Density of the mixture at x (scalar or array)."""
    x = np.asarray(x, dtype=float)
    u = (x[..., None] - mix.mus) / mix.sigmas
    terms = np.exp(-0.5 * u * u) / (SQRT_2PI * mix.sigmas)
    out = terms @ mix.weights
    if out.ndim == 0:
        return float(out)
    return out


def mixture_cdf(x, mix: GaussianMixture):
    from .distributions import gauss_cdf

    x = np.asarray(x, dtype=float)
    u = (x[..., None] - mix.mus) / mix.sigmas
    out = gauss_cdf(u) @ mix.weights
    if np.ndim(out) == 0:
        return float(out)
    return out


# Raw moments of N(mu, sigma) up to order 4, used componentwise.
def _gaussian_raw_moment(mu, sigma, n):
    if n == 0:
        return np.ones_like(mu)
    if n == 1:
        return mu
    if n == 2:
        return mu**2 + sigma**2
    if n == 3:
        return mu**3 + 3.0 * mu * sigma**2
    if n == 4:
        return mu**4 + 6.0 * mu**2 * sigma**2 + 3.0 * sigma**4
    raise ValueError(f"moment order must be in 0..4, got {n}")


def mixture_moments(mix: GaussianMixture, n: int) -> float:
    """Exact raw moment E[X^n] of the mixture, no quadrature."""
    return float(np.dot(mix.weights, _gaussian_raw_moment(mix.mus, mix.sigmas, n)))


def mixture_summary(mix: GaussianMixture) -> dict[str, float]:
    """Mean, std, skewness and kurtosis from exact mixture moments."""
    m1 = mixture_moments(mix, 1)
    m2 = mixture_moments(mix, 2)
    m3 = mixture_moments(mix, 3)
    m4 = mixture_moments(mix, 4)
    var = max(m2 - m1 * m1, 0.0)
    sd = np.sqrt(var)
    central3 = m3 - 3.0 * m1 * var - m1**3
    central4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1**4
    return {
        "mean": m1,
        "std": float(sd),
        "skewness": float(central3 / sd**3) if sd > 0 else 0.0,
        "kurtosis": float(central4 / var**2) if var > 0 else 3.0,
    }


def prune(mix: GaussianMixture, w_min: float = DEFAULT_PRUNE_WEIGHT) -> GaussianMixture:
    """Drop components lighter than w_min and renormalize."""
    keep = mix.weights >= w_min
    if not np.any(keep):
        raise ValueError(f"pruning at w_min={w_min} would remove every component")
    return GaussianMixture(mix.weights[keep], mix.mus[keep], mix.sigmas[keep])
