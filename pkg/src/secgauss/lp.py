"""Key-limited disclosure of a quantized Gaussian source as a linear program.

The quantized source is a finite pmf over bin centroids.  A disclosure
strategy mixes posterior candidates whose barycenter is that pmf and
whose average entropy fits the key rate; the best achievable
eavesdropper error is then a linear program over the mixture weights.
Candidates here are the subset restrictions of the pmf, and the solver
also accepts externally supplied candidate lists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import special

from .errors import SolverError
from .model import GaussianSource, PayoffValue, RatePair, entropy_bits
from .quantizer import QuantizerSpec, build_bin_table, fold_bin_table
from .simplex import linear_program_max

__all__ = [
    "QuantizedPmf",
    "PosteriorCandidate",
    "LpSolution",
    "build_quantized_pmf",
    "candidate_score",
    "enumerate_subset_candidates",
    "solve_secrecy_lp",
    "lp_payoff",
]

DEFAULT_SUPPORT_CAP = 15

_SCORE_MODES = ("continuous", "alphabet_restricted")


@dataclass(frozen=True, eq=False)
class QuantizedPmf:
    """Finite pmf over strictly increasing reconstruction points."""

    points: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        pr = np.asarray(self.probs, dtype=float)
        if pts.ndim != 1 or pts.size == 0 or pts.shape != pr.shape:
            raise ValueError("points and probs must be equal-length 1-d arrays")
        if not np.isfinite(pts).all():
            raise ValueError("points must be finite")
        if (np.diff(pts) <= 0.0).any():
            raise ValueError("points must be strictly increasing")
        if (pr < -1e-12).any():
            raise ValueError("probabilities must be nonnegative")
        total = float(pr.sum())
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {total}, expected 1")
        pr = np.clip(pr, 0.0, None)
        pts.setflags(write=False)
        pr.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "probs", pr)

    def mean(self) -> float:
        return float(np.dot(self.probs, self.points))

    def variance(self) -> float:
        m = self.mean()
        return float(np.dot(self.probs, (self.points - m) ** 2))

    def entropy_bits(self) -> float:
        return entropy_bits(self.probs)


@dataclass(frozen=True, eq=False)
class PosteriorCandidate:
    """One admissible posterior: its pmf, entropy, and eavesdropper error."""

    posterior: np.ndarray
    entropy_bits: float
    score: float
    label: str = ""

    def __post_init__(self) -> None:
        q = np.asarray(self.posterior, dtype=float)
        if q.ndim != 1 or q.size == 0 or (q < -1e-12).any():
            raise ValueError("posterior must be a nonnegative 1-d pmf")
        if abs(float(q.sum()) - 1.0) > 1e-9:
            raise ValueError("posterior must sum to 1")
        q = np.clip(q, 0.0, None)
        q.setflags(write=False)
        object.__setattr__(self, "posterior", q)
        if self.entropy_bits < -1e-12 or self.score < -1e-12:
            raise ValueError("entropy and score must be nonnegative")


@dataclass(frozen=True, eq=False)
class LpSolution:
    """Optimal mixture: eavesdropper error, weights, and key-rate slack."""

    value: float
    weights: np.ndarray
    feasible: bool
    slack_rs: float

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


def build_quantized_pmf(
    source: GaussianSource,
    spec: QuantizerSpec,
    max_support: Optional[int] = None,
) -> QuantizedPmf:
    """Pmf of the centroid-reconstructed quantizer output.

    Zero-mass bins are dropped.  With `max_support` (odd), outer bins
    are folded together first so that the support fits the LP cap; the
    fold only coarsens the pmf, so the entropy never grows.
    """
    table = build_bin_table(source, spec)
    if max_support is not None:
        if max_support < 1 or max_support % 2 == 0:
            raise ValueError(f"max_support must be a positive odd integer, got {max_support}")
        table = fold_bin_table(table, (max_support - 1) // 2)
    keep = table.prob > 0.0
    pmf = QuantizedPmf(table.centroid[keep], table.prob[keep])
    drift = abs(pmf.mean() - source.mean)
    if drift > 1e-9 * source.std:
        raise SolverError(f"quantized pmf mean drifted by {drift} from the source mean")
    return pmf


def candidate_score(points, q, mode: str = "continuous") -> float:
    """Least squared error of an eavesdropper who knows the posterior q.

    `continuous` allows any real estimate (the variance); the
    `alphabet_restricted` estimate must be one of the support points.
    """
    if mode not in _SCORE_MODES:
        raise ValueError(f"unknown score mode {mode!r}")
    points = np.asarray(points, dtype=float)
    q = np.asarray(q, dtype=float)
    if points.shape != q.shape:
        raise ValueError("points and q must have matching shapes")
    mean = float(np.dot(q, points))
    var = float(np.dot(q, (points - mean) ** 2))
    if mode == "continuous":
        return var
    return var + float(np.min((points - mean) ** 2))


def enumerate_subset_candidates(
    pmf: QuantizedPmf,
    k_cap: int = DEFAULT_SUPPORT_CAP,
    mode: str = "continuous",
) -> list[PosteriorCandidate]:
    """All subset restrictions of the pmf, in ascending bitmask order.

    Candidate for subset S: the pmf renormalized on S.  Mixtures of
    these realize every "reveal which subset the symbol fell in"
    disclosure.  Supports larger than k_cap are refused outright rather
    than approximated.
    """
    if mode not in _SCORE_MODES:
        raise ValueError(f"unknown score mode {mode!r}")
    k = int(pmf.points.size)
    if k > k_cap:
        raise ValueError(
            f"support size {k} exceeds the cap {k_cap}; fold the pmf or raise the cap"
        )
    masks = np.arange(1, 2**k, dtype=np.int64)
    member = ((masks[:, None] >> np.arange(k)) & 1).astype(float)
    raw = member * pmf.probs
    totals = raw.sum(axis=1)
    live = totals > 0.0
    # Subsets of zero total mass cannot be disclosed; skip them.
    masks, member, raw, totals = masks[live], member[live], raw[live], totals[live]
    q = raw / totals[:, None]

    with np.errstate(divide="ignore", invalid="ignore"):
        ent = -np.sum(special.xlogy(q, q), axis=1) / math.log(2.0)
    means = q @ pmf.points
    seconds = q @ (pmf.points**2)
    var = np.clip(seconds - means**2, 0.0, None)
    if mode == "continuous":
        scores = var
    else:
        gaps = (means[:, None] - pmf.points[None, :]) ** 2
        scores = var + gaps.min(axis=1)

    out = []
    for i in range(masks.size):
        bits = [str(j) for j in range(k) if member[i, j]]
        out.append(
            PosteriorCandidate(
                posterior=q[i],
                entropy_bits=float(max(ent[i], 0.0)),
                score=float(scores[i]),
                label="+".join(bits),
            )
        )
    return out


def solve_secrecy_lp(
    pmf: QuantizedPmf,
    rates: RatePair,
    candidates: Optional[Sequence[PosteriorCandidate]] = None,
    mode: str = "continuous",
) -> LpSolution:
    """Best eavesdropper error over key-feasible mixtures of candidates.

    Maximizes the weighted score subject to the mixture reproducing the
    pmf and the average candidate entropy fitting the key rate.  The
    message rate must cover the pmf entropy outright; otherwise the
    instance is reported infeasible without solving.  When `candidates`
    is omitted the subset family is enumerated with the given mode;
    supplied candidates are trusted as scored.
    """
    if rates.rate < pmf.entropy_bits() - 1e-9:
        return LpSolution(value=math.nan, weights=np.zeros(0), feasible=False, slack_rs=math.nan)
    if candidates is None:
        candidates = enumerate_subset_candidates(pmf, mode=mode)
    if not candidates:
        raise ValueError("candidate list is empty")
    k = pmf.points.size
    n = len(candidates)
    for cand in candidates:
        if cand.posterior.size != k:
            raise ValueError("candidate posterior length does not match the pmf support")

    # Columns: candidate weights plus one slack for the entropy row.
    a = np.zeros((k + 1, n + 1))
    for j, cand in enumerate(candidates):
        a[:k, j] = cand.posterior
        a[k, j] = cand.entropy_bits
    a[k, n] = 1.0
    b = np.concatenate([pmf.probs, [rates.key_rate]])
    cost = np.array([cand.score for cand in candidates] + [0.0])

    # Equilibrate before solving: outer bins carry probabilities many
    # orders below 1, and a raw tableau loses feasibility in the noise.
    # Unit-rhs rows then unit-max columns turn subset candidates into a
    # 0/1 incidence system.
    row_scale = np.ones(k + 1)
    row_scale[:k] = np.where(pmf.probs > 0.0, pmf.probs, 1.0)
    a_scaled = a / row_scale[:, None]
    b_scaled = b / row_scale
    col_scale = np.abs(a_scaled).max(axis=0)
    col_scale[col_scale <= 0.0] = 1.0
    a_scaled /= col_scale[None, :]

    x_scaled, _ = linear_program_max(cost / col_scale, a_scaled, b_scaled, tol=1e-10)
    x = x_scaled / col_scale
    value = float(cost @ x)
    weights = x[:n]
    recon = a[:k, :n] @ weights
    if np.max(np.abs(recon - pmf.probs)) > 1e-8:
        raise SolverError("LP solution violates the barycenter constraint")
    total = float(weights.sum())
    if abs(total - 1.0) > 1e-8:
        raise SolverError(f"LP weights sum to {total}, expected 1")
    used = float(np.dot(weights, [cand.entropy_bits for cand in candidates]))
    if used > rates.key_rate + 1e-8:
        raise SolverError("LP solution violates the key-rate constraint")
    return LpSolution(
        value=float(max(value, 0.0)),
        weights=weights,
        feasible=True,
        slack_rs=float(rates.key_rate - used),
    )


def lp_payoff(solution: LpSolution, source: GaussianSource) -> PayoffValue:
    """Normalized payoff of a feasible LP solution."""
    if not solution.feasible:
        raise ValueError("payoff is undefined for an infeasible LP solution")
    return PayoffValue(solution.value / source.variance)
