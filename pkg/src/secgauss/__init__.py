"""Secrecy payoff analysis for lossy compression of a Gaussian source.

A library and CLI for computing, optimizing, and empirically validating
the trade-off between message rate, secret-key rate, and the payoff (the
eavesdropper's excess squared error over the legitimate decoder's).
"""

from .errors import InfeasibleError, SolverError
from .lp import (
    LpSolution,
    PosteriorCandidate,
    QuantizedPmf,
    build_quantized_pmf,
    candidate_score,
    enumerate_subset_candidates,
    lp_payoff,
    solve_secrecy_lp,
)
from .model import (
    STANDARD_SOURCE,
    GaussianSource,
    PayoffValue,
    RatePair,
    TruncatedMoments,
    binary_entropy,
    differential_entropy_bits,
    distortion_rate,
    entropy_bits,
    normal_cdf,
    normal_pdf,
    payoff,
    sequence_payoff,
    std_normal,
    truncated_moments,
)
from .quantizer import (
    BinTable,
    QuantizerSpec,
    bob_distortion,
    build_bin_table,
    entropy_given_magnitude,
    entropy_given_residue,
    eve_mmse_given_magnitude,
    eve_mmse_given_residue,
    fold_bin_table,
    output_entropy,
    quantize_index,
    step_size_for_entropy,
)
from .schemes import (
    SCHEME_IDS,
    CorrelationTriple,
    FiniteJoint,
    FiniteStrategyReport,
    GeneralAwarenessReport,
    GreedyQuantizedScheme,
    GreedySearch,
    PayoffPoint,
    asymptotic_quantization_bound,
    evaluate_finite_strategy,
    greedy_quantized_scheme,
    jointly_gaussian_payoff,
    optimal_high_key_payoff,
    sign_split_key_requirement,
    verify_general_awareness_construction,
    verify_jointly_gaussian_grid,
    weak_eavesdropper_payoff,
)
from .sim import (
    SIM_SCENARIOS,
    SIM_SCHEMES,
    SimConfig,
    SimResult,
    eve_oracle_estimate,
    run_sim,
    standard_error,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "InfeasibleError",
    "SolverError",
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
    "entropy_bits",
    "binary_entropy",
    "truncated_moments",
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
    "SCHEME_IDS",
    "PayoffPoint",
    "CorrelationTriple",
    "FiniteJoint",
    "FiniteStrategyReport",
    "GeneralAwarenessReport",
    "GreedySearch",
    "GreedyQuantizedScheme",
    "weak_eavesdropper_payoff",
    "jointly_gaussian_payoff",
    "optimal_high_key_payoff",
    "asymptotic_quantization_bound",
    "verify_jointly_gaussian_grid",
    "sign_split_key_requirement",
    "verify_general_awareness_construction",
    "greedy_quantized_scheme",
    "evaluate_finite_strategy",
    "QuantizedPmf",
    "PosteriorCandidate",
    "LpSolution",
    "build_quantized_pmf",
    "candidate_score",
    "enumerate_subset_candidates",
    "solve_secrecy_lp",
    "lp_payoff",
    "SIM_SCHEMES",
    "SIM_SCENARIOS",
    "SimConfig",
    "SimResult",
    "run_sim",
    "eve_oracle_estimate",
    "standard_error",
]
