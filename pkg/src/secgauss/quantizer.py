"""Symmetric uniform quantization of a Gaussian source.

Bins are indexed by the nearest-integer multiple of the step about the
source mean, tails are folded into the outermost kept bins, and every
bin carries its exact probability, centroid, and second moment.  All
entropy and distortion summaries of a quantized source are computed
from these tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import special

from .errors import SolverError
from .model import (
    GaussianSource,
    binary_entropy,
    entropy_bits,
    truncated_moments,
)

__all__ = [
    "QuantizerSpec",
    "BinTable",
    "quantize_index",
    "build_bin_table",
    "fold_bin_table",
    "output_entropy",
    "entropy_given_magnitude",
    "entropy_given_residue",
    "bob_distortion",
    "eve_mmse_given_residue",
    "eve_mmse_given_magnitude",
    "step_size_for_entropy",
]

# Bin-table construction refuses to allocate more than this many bins;
# finer steps than roughly std/70000 are outside the supported regime.
_MAX_BINS = 1_000_000

# Half-width (in standard deviations) beyond which the two tails carry
# less than 1e-12 of probability: sqrt(2) * erfcinv(1e-12).
_TAIL_STDS = math.sqrt(2.0) * float(special.erfcinv(1e-12))

_SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class QuantizerSpec:
    """Step size, minimum index extent, and reconstruction rule."""

    step: float
    max_index: int = 1
    reconstruction: Literal["lattice", "centroid"] = "lattice"

    def __post_init__(self) -> None:
        if not math.isfinite(self.step) or self.step <= 0.0:
            raise ValueError(f"step must be finite and positive, got {self.step}")
        if int(self.max_index) != self.max_index or self.max_index < 1:
            raise ValueError(f"max_index must be an integer >= 1, got {self.max_index}")
        if self.reconstruction not in ("lattice", "centroid"):
            raise ValueError(f"unknown reconstruction rule {self.reconstruction!r}")


@dataclass(frozen=True, eq=False)
class BinTable:
    """Per-bin law of the quantizer output for one source and step.

    Rows run over indices -max_index..max_index.  `prob` sums to one
    because tail mass is folded into the outermost bins; `centroid` and
    `second_moment` are conditional on the bin (fold included).
    """

    indices: np.ndarray
    prob: np.ndarray
    centroid: np.ndarray
    second_moment: np.ndarray
    source: GaussianSource
    step: float

    def __post_init__(self) -> None:
        for name in ("indices", "prob", "centroid", "second_moment"):
            arr = getattr(self, name)
            object.__setattr__(self, name, _frozen(arr))
        n = len(self.indices)
        if n % 2 != 1 or n < 3:
            raise ValueError("table must cover -k..k for some k >= 1")
        if not (len(self.prob) == len(self.centroid) == len(self.second_moment) == n):
            raise ValueError("table columns must have equal length")
        total = float(self.prob.sum())
        if abs(total - 1.0) > 1e-10:
            raise SolverError(f"bin probabilities sum to {total}, expected 1")

    @property
    def max_index(self) -> int:
        return (len(self.indices) - 1) // 2

    def row(self, index: int) -> int:
        """Position of bin `index` in the table arrays."""
        k = self.max_index
        if not -k <= index <= k:
            raise ValueError(f"bin index {index} outside [-{k}, {k}]")
        return index + k


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.setflags(write=False)
    return out


def quantize_index(x: float, step: float, source: GaussianSource) -> int:
    """Bin index of a sample: nearest integer (ties to even) of (x - mean)/step."""
    if not math.isfinite(x):
        raise ValueError(f"sample must be finite, got {x}")
    if not math.isfinite(step) or step <= 0.0:
        raise ValueError(f"step must be finite and positive, got {step}")
    return round((x - source.mean) / step)


def build_bin_table(source: GaussianSource, spec: QuantizerSpec) -> BinTable:
    """Exact bin table for a symmetric uniform quantizer.

    The index extent is grown beyond spec.max_index until the untruncated
    tails carry at most 1e-12 probability; those tails are then folded
    into the outermost bins so that the table is a true partition.
    """
    mu, sigma, t = source.mean, source.std, spec.step
    need = _TAIL_STDS * sigma / t - 0.5
    k_max = max(int(spec.max_index), int(math.ceil(need)), 1)
    if 2 * k_max + 1 > _MAX_BINS:
        raise ValueError(
            f"step {t} needs {2 * k_max + 1} bins, more than the {_MAX_BINS} supported"
        )

    prob = np.zeros(2 * k_max + 1)
    centroid = np.zeros(2 * k_max + 1)
    second = np.zeros(2 * k_max + 1)
    for k in range(k_max + 1):
        lo = mu + (k - 0.5) * t
        hi = mu + (k + 0.5) * t if k < k_max else math.inf
        m = truncated_moments(lo, hi, source)
        prob[k_max + k] = m.mass
        centroid[k_max + k] = m.mean
        second[k_max + k] = m.second_moment
        if k > 0:
            # Mirror image of bin k; exact by symmetry of the source.
            prob[k_max - k] = m.mass
            centroid[k_max - k] = 2.0 * mu - m.mean
            second[k_max - k] = 4.0 * mu * mu - 4.0 * mu * m.mean + m.second_moment

    indices = np.arange(-k_max, k_max + 1, dtype=np.int64)
    return BinTable(indices, prob, centroid, second, source, t)


def fold_bin_table(table: BinTable, max_index: int) -> BinTable:
    """Merge all bins with |index| >= max_index into the +-max_index bins."""
    if int(max_index) != max_index or max_index < 1:
        raise ValueError(f"max_index must be an integer >= 1, got {max_index}")
    k_old = table.max_index
    if max_index >= k_old:
        return table
    _require_symmetric(table)

    k = int(max_index)
    prob = np.zeros(2 * k + 1)
    centroid = np.zeros(2 * k + 1)
    second = np.zeros(2 * k + 1)
    mu = table.source.mean
    for j in range(k + 1):
        if j < k:
            rows = [table.row(j)]
        else:
            rows = [table.row(i) for i in range(k, k_old + 1)]
        p = float(sum(table.prob[r] for r in rows))
        if p > 0.0:
            c = float(sum(table.prob[r] * table.centroid[r] for r in rows)) / p
            s = float(sum(table.prob[r] * table.second_moment[r] for r in rows)) / p
        else:
            c = table.centroid[rows[0]]
            s = table.second_moment[rows[0]]
        prob[k + j] = p
        centroid[k + j] = c
        second[k + j] = s
        if j > 0:
            prob[k - j] = p
            centroid[k - j] = 2.0 * mu - c
            second[k - j] = 4.0 * mu * mu - 4.0 * mu * c + s

    indices = np.arange(-k, k + 1, dtype=np.int64)
    return BinTable(indices, prob, centroid, second, table.source, table.step)


def _require_symmetric(table: BinTable) -> None:
    p = table.prob
    c = table.centroid
    mu = table.source.mean
    if not np.allclose(p, p[::-1], rtol=0.0, atol=_SYMMETRY_TOL):
        raise SolverError("bin table is not symmetric about the source mean")
    if not np.allclose(c + c[::-1], 2.0 * mu, rtol=0.0, atol=_SYMMETRY_TOL * max(1.0, abs(mu))):
        raise SolverError("bin centroids are not symmetric about the source mean")


def output_entropy(table: BinTable) -> float:
    """Entropy in bits of the quantizer output."""
    return entropy_bits(table.prob)


def entropy_given_magnitude(table: BinTable) -> float:
    """Conditional entropy in bits of the output given its magnitude.

    Only the sign is left once the magnitude is known, so for a
    symmetric table this equals the probability that the output is
    nonzero.  Asymmetric tables are rejected.
    """
    _require_symmetric(table)
    acc = 0.0
    for k in range(1, table.max_index + 1):
        p_pos = float(table.prob[table.row(k)])
        p_neg = float(table.prob[table.row(-k)])
        pu = p_pos + p_neg
        if pu <= 0.0:
            continue
        acc += pu * binary_entropy(p_pos / pu)
    return acc


def entropy_given_residue(table: BinTable, modulus: int) -> float:
    """Conditional entropy in bits of the output given its index mod `modulus`.

    Residues are the nonnegative representatives 0..modulus-1, matching
    the arithmetic a decoder applies to received indices.
    """
    if int(modulus) != modulus or modulus < 1:
        raise ValueError(f"modulus must be an integer >= 1, got {modulus}")
    residues = np.mod(table.indices, modulus)
    acc = 0.0
    for u in range(int(modulus)):
        mask = residues == u
        pu = float(table.prob[mask].sum())
        if pu <= 0.0:
            continue
        acc += pu * entropy_bits(table.prob[mask] / pu)
    return acc


def bob_distortion(table: BinTable, reconstruction: str) -> float:
    """Mean squared error of the legitimate decoder for a reconstruction rule.

    `lattice` reconstructs bin k as mean + k*step; `centroid` uses the
    conditional mean and is never worse.
    """
    var = np.clip(table.second_moment - table.centroid**2, 0.0, None)
    if reconstruction == "centroid":
        return float(np.dot(table.prob, var))
    if reconstruction == "lattice":
        points = table.source.mean + table.indices * table.step
        return float(np.dot(table.prob, var + (table.centroid - points) ** 2))
    raise ValueError(f"unknown reconstruction rule {reconstruction!r}")


def eve_mmse_given_residue(table: BinTable, modulus: int) -> float:
    """Least mean squared error of an estimator that sees only index mod `modulus`."""
    if int(modulus) != modulus or modulus < 1:
        raise ValueError(f"modulus must be an integer >= 1, got {modulus}")
    second = float(np.dot(table.prob, table.second_moment))
    residues = np.mod(table.indices, modulus)
    acc = 0.0
    for u in range(int(modulus)):
        mask = residues == u
        pu = float(table.prob[mask].sum())
        if pu <= 0.0:
            continue
        mean_u = float(np.dot(table.prob[mask], table.centroid[mask])) / pu
        acc += pu * mean_u * mean_u
    return max(second - acc, 0.0)


def eve_mmse_given_magnitude(table: BinTable) -> float:
    """Least mean squared error of an estimator that sees only the magnitude.

    For a symmetric table the magnitude is independent of the sign and
    carries no information about the source beyond its mean, so the
    value must equal the source variance; that identity is asserted.
    """
    _require_symmetric(table)
    second = float(np.dot(table.prob, table.second_moment))
    acc = 0.0
    for u in range(table.max_index + 1):
        if u == 0:
            rows = [table.row(0)]
        else:
            rows = [table.row(u), table.row(-u)]
        pu = float(sum(table.prob[r] for r in rows))
        if pu <= 0.0:
            continue
        mean_u = float(sum(table.prob[r] * table.centroid[r] for r in rows)) / pu
        acc += pu * mean_u * mean_u
    mmse = max(second - acc, 0.0)
    expected = table.source.variance
    if abs(mmse - expected) > 1e-9 * max(1.0, expected):
        raise SolverError(
            f"magnitude-only MMSE {mmse} differs from the source variance {expected}"
        )
    return mmse


def step_size_for_entropy(
    source: GaussianSource,
    target_bits: float,
    bracket: tuple[float, float] | None = None,
    tol_bits: float = 1e-4,
) -> float:
    """Smallest step (to tolerance) whose output entropy does not exceed target.

    Output entropy decreases as the step grows, so the answer is the
    boundary step where the entropy crosses the target from above.  The
    returned step is always on the feasible side.  Monotonicity is
    spot-checked on the bracket; if it fails, a dense log-spaced scan
    picks the smallest feasible step instead.
    """
    if not math.isfinite(target_bits) or target_bits < 0.0:
        raise ValueError(f"target entropy must be finite and >= 0, got {target_bits}")
    if not math.isfinite(tol_bits) or tol_bits <= 0.0:
        raise ValueError(f"tol_bits must be positive, got {tol_bits}")

    def entropy_at(t: float) -> float:
        return output_entropy(build_bin_table(source, QuantizerSpec(step=t)))

    if bracket is not None:
        lo, hi = float(bracket[0]), float(bracket[1])
        if not (0.0 < lo < hi and math.isfinite(hi)):
            raise ValueError(f"bracket must satisfy 0 < lo < hi, got {bracket}")
        if entropy_at(hi) > target_bits:
            raise ValueError("bracket upper end is infeasible for the target entropy")
        if entropy_at(lo) <= target_bits:
            return lo
    else:
        hi = 8.0 * source.std * 2.0 ** (-target_bits)
        for _ in range(200):
            if entropy_at(hi) <= target_bits:
                break
            hi *= 2.0
        else:
            raise SolverError("could not find a feasible step for the target entropy")
        lo = hi / 2.0
        for _ in range(60):
            if entropy_at(lo) > target_bits:
                break
            hi = lo
            lo /= 2.0
        else:
            raise SolverError("could not bracket the target entropy from above")

    probes = np.exp(np.linspace(math.log(lo), math.log(hi), 9))
    values = [entropy_at(float(t)) for t in probes]
    if any(values[i + 1] > values[i] + 1e-9 for i in range(len(values) - 1)):
        # Monotonicity looks broken on this bracket; fall back to a scan.
        grid = np.exp(np.linspace(math.log(lo), math.log(hi), 512))
        for t in grid:
            if entropy_at(float(t)) <= target_bits:
                return float(t)
        return hi

    for _ in range(200):
        h_hi = entropy_at(hi)
        if h_hi >= target_bits - tol_bits or hi - lo <= 1e-13 * hi:
            return hi
        mid = 0.5 * (lo + hi)
        if entropy_at(mid) <= target_bits:
            hi = mid
        else:
            lo = mid
    return hi
