"""Gaussian source model, payoff function, and shared scalar numerics.

Everything downstream (quantizer tables, closed-form payoff curves, the
secrecy LP, the game simulator) is built on the exact Gaussian
quantities in this module.  All rates and entropies in this package are
in bits, and rate-distortion closed forms use 2**(-2*rate).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "GaussianSource",
    "STANDARD_SOURCE",
    "RatePair",
    "PayoffValue",
    "TruncatedMoments",
    "payoff",
    "sequence_payoff",
    "distortion_rate",
    "differential_entropy_bits",
    "std_normal",
    "normal_pdf",
    "normal_cdf",
    "truncated_moments",
    "entropy_bits",
    "binary_entropy",
]

_LOG2 = math.log(2.0)
_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Slack applied when validating "payoff <= 1": exact schemes satisfy the
# bound with equality in the limit and floating point must not trip it.
_PAYOFF_SLACK = 1e-9


@dataclass(frozen=True)
class GaussianSource:
    """An i.i.d. Gaussian source; every symbol is N(mean, variance).

    The variance doubles as the payoff normalizer, so it must be
    strictly positive.
    """

    mean: float = 0.0
    variance: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and math.isfinite(self.variance)):
            raise ValueError("source mean and variance must be finite")
        if self.variance <= 0.0:
            raise ValueError(f"source variance must be positive, got {self.variance}")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


STANDARD_SOURCE = GaussianSource(0.0, 1.0)


@dataclass(frozen=True)
class RatePair:
    """Operating point: message rate and key rate, both in bits per symbol."""

    rate: float
    key_rate: float

    def __post_init__(self) -> None:
        for name, value in (("rate", self.rate), ("key_rate", self.key_rate)):
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")


@dataclass(frozen=True)
class PayoffValue:
    """Normalized eavesdropper-minus-legitimate distortion gap.

    Bounded above by 1 (perfect reconstruction against a blind
    eavesdropper); may be arbitrarily negative.
    """

    value: float

    def __post_init__(self) -> None:
        if math.isnan(self.value):
            raise ValueError("payoff is NaN")
        if self.value > 1.0 + _PAYOFF_SLACK:
            raise ValueError(f"payoff {self.value} exceeds the unit bound")

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class TruncatedMoments:
    """Mass, conditional mean, and conditional second moment on an interval."""

    mass: float
    mean: float
    second_moment: float


def payoff(x: float, y: float, z: float, source: GaussianSource) -> float:
    """Per-symbol payoff: eavesdropper loss minus decoder loss, normalized.

    ((z - x)**2 - (y - x)**2) / variance, where x is the source symbol,
    y the legitimate reconstruction, and z the eavesdropper's estimate.
    """
    for name, value in (("x", x), ("y", y), ("z", z)):
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value}")
    return ((z - x) ** 2 - (y - x) ** 2) / source.variance


def sequence_payoff(xs, ys, zs, source: GaussianSource) -> float:
    """Average payoff over equal-length sequences of symbols."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    zs = np.asarray(zs, dtype=float)
    if not (xs.shape == ys.shape == zs.shape):
        raise ValueError("xs, ys, zs must have identical shapes")
    if xs.size == 0:
        raise ValueError("sequences must be non-empty")
    if not (np.isfinite(xs).all() and np.isfinite(ys).all() and np.isfinite(zs).all()):
        raise ValueError("sequence entries must be finite")
    gaps = (zs - xs) ** 2 - (ys - xs) ** 2
    return float(np.mean(gaps)) / source.variance


def distortion_rate(rate_bits: float, source: GaussianSource) -> float:
    """Least mean squared error achievable at the given rate in bits."""
    if not math.isfinite(rate_bits) or rate_bits < 0.0:
        raise ValueError(f"rate must be finite and >= 0, got {rate_bits}")
    return source.variance * 2.0 ** (-2.0 * rate_bits)


def differential_entropy_bits(source: GaussianSource) -> float:
    """Differential entropy of the source in bits."""
    return 0.5 * math.log2(2.0 * math.pi * math.e * source.variance)


def normal_pdf(x):
    """Standard normal density; accepts scalars or arrays."""
    x = np.asarray(x, dtype=float)
    out = _INV_SQRT_2PI * np.exp(-0.5 * np.square(x))
    return float(out) if out.ndim == 0 else out


def normal_cdf(x):
    """Standard normal distribution function via erfc; |error| < 1e-13 relative."""
    x = np.asarray(x, dtype=float)
    out = 0.5 * special.erfc(-x / _SQRT2)
    return float(out) if out.ndim == 0 else out


def std_normal(x: float) -> tuple[float, float]:
    """Density and distribution function of N(0, 1) at a scalar point."""
    if math.isnan(x):
        raise ValueError("x is NaN")
    if abs(x) > 40.0:
        pdf = 0.0
    else:
        pdf = _INV_SQRT_2PI * math.exp(-0.5 * x * x)
    return pdf, 0.5 * math.erfc(-x / _SQRT2)


def _upper_tail(x: float) -> float:
    """P(xi > x) for standard normal xi, accurate deep into the tail."""
    return 0.5 * math.erfc(x / _SQRT2)


def _interval_mass(alpha: float, beta: float) -> float:
    """P(alpha < xi <= beta), branch-selected to avoid cancellation."""
    if alpha >= 0.0:
        return max(0.0, _upper_tail(alpha) - _upper_tail(beta))
    if beta <= 0.0:
        return max(0.0, _upper_tail(-beta) - _upper_tail(-alpha))
    # Straddles zero: erf terms are both positive, no cancellation.
    return 0.5 * (math.erf(beta / _SQRT2) + math.erf(-alpha / _SQRT2))


def _pdf_scalar(x: float) -> float:
    if not math.isfinite(x) or abs(x) > 40.0:
        return 0.0
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def truncated_moments(a: float, b: float, source: GaussianSource) -> TruncatedMoments:
    """Moments of the source conditioned on the interval (a, b].

    Endpoints may be infinite.  When the interval mass underflows to
    zero the conditional mean is pinned to the endpoint nearest the
    source mean, which keeps downstream tables finite.
    """
    if math.isnan(a) or math.isnan(b):
        raise ValueError("interval endpoints must not be NaN")
    if not a < b:
        raise ValueError(f"interval must satisfy a < b, got [{a}, {b}]")
    mu, sigma = source.mean, source.std
    alpha = (a - mu) / sigma if math.isfinite(a) else -math.inf
    beta = (b - mu) / sigma if math.isfinite(b) else math.inf

    mass = _interval_mass(alpha, beta)
    if mass < 1e-300:
        edge = a if alpha > 0.0 else b
        if not math.isfinite(edge):
            # Both endpoints infinite would have mass 1; only one can be.
            edge = b if math.isfinite(b) else a
        return TruncatedMoments(0.0, edge, edge * edge)

    pdf_a, pdf_b = _pdf_scalar(alpha), _pdf_scalar(beta)
    first = (pdf_a - pdf_b) / mass
    excess = 0.0
    if math.isfinite(alpha):
        excess += alpha * pdf_a
    if math.isfinite(beta):
        excess -= beta * pdf_b
    second_std = 1.0 + excess / mass
    var_std = max(second_std - first * first, 0.0)

    mean = mu + sigma * first
    second = mean * mean + source.variance * var_std
    return TruncatedMoments(mass, mean, second)


def entropy_bits(probs) -> float:
    """Shannon entropy in bits of a probability vector; 0*log(0) = 0."""
    p = np.asarray(probs, dtype=float)
    if p.size and (p < -1e-12).any():
        raise ValueError("probabilities must be nonnegative")
    return float(-np.sum(special.xlogy(p, np.clip(p, 0.0, None))) / _LOG2)


def binary_entropy(p: float) -> float:
    """Entropy in bits of a Bernoulli(p) variable."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))
