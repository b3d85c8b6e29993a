"""Scalar Gaussian primitives and PDFs of the maximum of two Gaussian RVs.

All functions accept scalars or numpy arrays for the evaluation point and
broadcast in the usual numpy way.  Distribution parameters are plain
floats; degenerate parameters (``sigma <= 0``, ``|rho| >= 1`` where a
strict inequality is required) are rejected here, callers that need point
masses are expected to widen them to a small positive sigma first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

SQRT_2PI = np.sqrt(2.0 * np.pi)

# Beyond this many standard deviations the CDF is exactly 0 or 1 in
# double precision; clamping avoids denormal noise in products.
CDF_CLAMP = 40.0


class DegenerateCorrelationError(ValueError):
    """Raised when |rho| = 1 is passed to a formula that requires |rho| < 1."""


@dataclass(frozen=True)
class GaussianParams:
    """Mean/std pair defining one normal distribution."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not np.isfinite(self.mu) or not np.isfinite(self.sigma):
            raise ValueError(f"non-finite Gaussian parameters: {self}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")

    def require_positive_sigma(self):
        if self.sigma <= 0:
            raise ValueError(f"operation requires sigma > 0, got {self.sigma}")


@dataclass(frozen=True)
class CorrelatedPair:
    """Two Gaussian marginals with a correlation coefficient."""

    a: GaussianParams
    b: GaussianParams
    rho: float

    def __post_init__(self):
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must be in [-1, 1], got {self.rho}")


def std_normal_pdf(x):
    """phi(x) for the standard normal, vectorized."""
    return np.exp(-0.5 * np.asarray(x, dtype=float) ** 2) / SQRT_2PI


def gauss_pdf(x, p: GaussianParams):
    """Normal density with mean ``p.mu`` and std ``p.sigma``."""
    p.require_positive_sigma()
    u = (np.asarray(x, dtype=float) - p.mu) / p.sigma
    return np.exp(-0.5 * u * u) / (SQRT_2PI * p.sigma)


def gauss_cdf(x):
    """Standard normal CDF, clamped to exact 0/1 outside +-CDF_CLAMP."""
    x = np.asarray(x, dtype=float)
    out = ndtr(np.clip(x, -CDF_CLAMP, CDF_CLAMP))
    if out.ndim == 0:
        return float(out)
    return out


def shifted_cdf(x, p: GaussianParams):
    """CDF of N(mu, sigma) evaluated at x."""
    p.require_positive_sigma()
    return gauss_cdf((np.asarray(x, dtype=float) - p.mu) / p.sigma)


def max2_independent_pdf(z, a: GaussianParams, b: GaussianParams):
    """Density of max(X1, X2) for independent Gaussians X1, X2.

    g(z) = f1(z) F2(z) + f2(z) F1(z).
    """
    return gauss_pdf(z, a) * shifted_cdf(z, b) + gauss_pdf(z, b) * shifted_cdf(z, a)


def max2_independent_cdf(z, a: GaussianParams, b: GaussianParams):
    """CDF of max(X1, X2) for independent Gaussians: F1(z) F2(z)."""
    return shifted_cdf(z, a) * shifted_cdf(z, b)


def max2_correlated_pdf(z, pair: CorrelatedPair):
    """Density of max(X1, X2) for jointly Gaussian (X1, X2) with |rho| < 1.

    Symmetric two-term form; reduces exactly to the independent-case
    density at rho = 0.
    """
    pair.a.require_positive_sigma()
    pair.b.require_positive_sigma()
    if abs(pair.rho) >= 1.0:
        raise DegenerateCorrelationError(
            "max2_correlated_pdf requires |rho| < 1; use the comonotone limit"
        )
    rho = pair.rho
    root = np.sqrt(1.0 - rho * rho)
    z = np.asarray(z, dtype=float)
    total = 0.0
    for p, q in ((pair.a, pair.b), (pair.b, pair.a)):
        ui = (z - p.mu) / p.sigma
        uj = (z - q.mu) / q.sigma
        total = total + gauss_pdf(z, p) * gauss_cdf((uj - rho * ui) / root)
    return total


def max2_weak_corr_pdf(z, pair: CorrelatedPair):
    """First-order-in-rho approximation of the correlated max density.

    g(z) + rho * dg(z) with
    dg(z) = -f1(z) f2(z) [ (z-mu1)/s1 * s2 + (z-mu2)/s2 * s1 ].
    May dip slightly negative for large |rho|; that is an artifact of the
    linearization, not an error.
    """
    a, b = pair.a, pair.b
    base = max2_independent_pdf(z, a, b)
    if pair.rho == 0.0:
        return base
    z = np.asarray(z, dtype=float)
    correction = -gauss_pdf(z, a) * gauss_pdf(z, b) * (
        (z - a.mu) / a.sigma * b.sigma + (z - b.mu) / b.sigma * a.sigma
    )
    return base + pair.rho * correction


def clark_max_moments(pair: CorrelatedPair) -> tuple[float, float]:
    """First two moments (mean, variance) of max(X1, X2), moment matching.

    Used only as a cross-check oracle for the closed-form gate moments.
    """
    a, b = pair.a, pair.b
    a.require_positive_sigma()
    b.require_positive_sigma()
    theta_sq = a.sigma**2 + b.sigma**2 - 2.0 * pair.rho * a.sigma * b.sigma
    if theta_sq <= 0.0:
        # Comonotone pair with equal sigmas: max is the larger-mean variable.
        if a.mu == b.mu:
            return a.mu, a.sigma**2
        winner = a if a.mu > b.mu else b
        return winner.mu, winner.sigma**2
    theta = np.sqrt(theta_sq)
    alpha = (a.mu - b.mu) / theta
    phi_a = std_normal_pdf(alpha)
    cdf_a = gauss_cdf(alpha)
    mean = a.mu * cdf_a + b.mu * (1.0 - cdf_a) + theta * phi_a
    second = (
        (a.mu**2 + a.sigma**2) * cdf_a
        + (b.mu**2 + b.sigma**2) * (1.0 - cdf_a)
        + (a.mu + b.mu) * theta * phi_a
    )
    return float(mean), float(second - mean**2)
