"""The secrecy LP: candidate family, endpoints, brute-force oracle."""

import itertools
import math

import numpy as np
import pytest

from secgauss import (
    STANDARD_SOURCE,
    GaussianSource,
    QuantizedPmf,
    QuantizerSpec,
    RatePair,
    build_quantized_pmf,
    candidate_score,
    enumerate_subset_candidates,
    lp_payoff,
    solve_secrecy_lp,
)


@pytest.fixture(scope="module")
def unit_pmf():
    return build_quantized_pmf(STANDARD_SOURCE, QuantizerSpec(step=1.0, max_index=7))


@pytest.fixture(scope="module")
def small_pmf():
    # Five points, hand-checkable, asymmetric masses.
    return QuantizedPmf(
        points=np.array([-2.0, -0.5, 0.0, 1.0, 2.5]),
        probs=np.array([0.1, 0.25, 0.3, 0.25, 0.1]),
    )


def brute_force_value(pmf, rs, candidates):
    """Exhaustive vertex enumeration over basic candidate subsets.

    A basic optimal solution activates at most K+1 candidates (K
    barycenter rows plus the entropy row), so checking every subset of
    that size is a complete oracle for small K.
    """
    k = pmf.points.size
    post = np.array([c.posterior for c in candidates])
    ent = np.array([c.entropy_bits for c in candidates])
    score = np.array([c.score for c in candidates])
    best = -1.0
    for size in range(1, k + 2):
        for idx in itertools.combinations(range(len(candidates)), size):
            cols = np.array(idx)
            a_eq = post[cols].T
            # Entropy tight or slack: try both basic configurations.
            for with_entropy in (False, True):
                if with_entropy:
                    a = np.vstack([a_eq, ent[cols]])
                    b = np.concatenate([pmf.probs, [rs]])
                else:
                    a = a_eq
                    b = pmf.probs
                w, *_ = np.linalg.lstsq(a, b, rcond=None)
                if (w < -1e-9).any():
                    continue
                w = np.clip(w, 0.0, None)
                if np.abs(a @ w - b).max() > 1e-9:
                    continue
                if float(ent[cols] @ w) > rs + 1e-9:
                    continue
                if abs(float(w.sum()) - 1.0) > 1e-9:
                    continue
                best = max(best, float(score[cols] @ w))
    return best


class TestQuantizedPmf:
    def test_stats(self, small_pmf):
        pts, pr = small_pmf.points, small_pmf.probs
        assert small_pmf.mean() == pytest.approx(float(pts @ pr), abs=1e-15)
        m = small_pmf.mean()
        assert small_pmf.variance() == pytest.approx(
            float(pr @ (pts - m) ** 2), abs=1e-15
        )
        assert small_pmf.entropy_bits() == pytest.approx(
            -float(np.sum(pr * np.log2(pr))), abs=1e-12
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            QuantizedPmf(np.array([1.0, 0.5]), np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            QuantizedPmf(np.array([0.0, 1.0]), np.array([0.7, 0.7]))
        with pytest.raises(ValueError):
            QuantizedPmf(np.array([0.0, 1.0]), np.array([1.5, -0.5]))

    def test_read_only(self, small_pmf):
        with pytest.raises(ValueError):
            small_pmf.probs[0] = 0.9


class TestBuildQuantizedPmf:
    def test_matches_bin_table(self, unit_pmf):
        assert unit_pmf.points.size == 15
        assert unit_pmf.entropy_bits() == pytest.approx(2.104832654177669, abs=1e-11)
        assert unit_pmf.mean() == pytest.approx(0.0, abs=1e-12)

    def test_fold_to_cap(self):
        pmf = build_quantized_pmf(
            STANDARD_SOURCE, QuantizerSpec(step=1.0, max_index=7), max_support=7
        )
        assert pmf.points.size == 7
        full = build_quantized_pmf(STANDARD_SOURCE, QuantizerSpec(step=1.0, max_index=7))
        # Folding merges outer mass; entropy and variance both shrink.
        assert pmf.entropy_bits() <= full.entropy_bits()
        assert pmf.variance() <= full.variance() + 1e-12

    def test_even_support_rejected(self):
        with pytest.raises(ValueError):
            build_quantized_pmf(
                STANDARD_SOURCE, QuantizerSpec(step=1.0), max_support=8
            )


class TestCandidateScore:
    def test_continuous_is_variance(self):
        pts = np.array([0.0, 1.0])
        q = np.array([0.5, 0.5])
        assert candidate_score(pts, q, "continuous") == pytest.approx(0.25, abs=1e-15)

    def test_restricted_adds_nearest_gap(self):
        pts = np.array([0.0, 1.0])
        q = np.array([0.5, 0.5])
        # Eve must answer 0 or 1; either is 0.5 away from the mean.
        assert candidate_score(pts, q, "alphabet_restricted") == pytest.approx(
            0.5, abs=1e-15
        )

    def test_restricted_no_worse_than_continuous(self, small_pmf):
        pts = small_pmf.points
        cands = enumerate_subset_candidates(small_pmf)
        for cand in cands[:10]:
            c = candidate_score(pts, cand.posterior, "continuous")
            r = candidate_score(pts, cand.posterior, "alphabet_restricted")
            assert r >= c - 1e-15

    def test_singleton_scores_zero(self):
        pts = np.array([-1.0, 3.0])
        assert candidate_score(pts, np.array([1.0, 0.0]), "continuous") == 0.0
        assert (
            candidate_score(pts, np.array([1.0, 0.0]), "alphabet_restricted") == 0.0
        )

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            candidate_score(np.array([0.0]), np.array([1.0]), "quantized")


class TestEnumerateCandidates:
    def test_two_point_family(self):
        pmf = QuantizedPmf(np.array([-1.0, 1.0]), np.array([0.5, 0.5]))
        cands = enumerate_subset_candidates(pmf)
        assert [c.label for c in cands] == ["0", "1", "0+1"]
        assert [c.entropy_bits for c in cands] == [0.0, 0.0, 1.0]
        assert cands[2].score == pytest.approx(1.0, abs=1e-15)
        np.testing.assert_allclose(cands[2].posterior, [0.5, 0.5])

    def test_count(self, small_pmf):
        cands = enumerate_subset_candidates(small_pmf)
        assert len(cands) == 2**5 - 1

    def test_cap_enforced(self, small_pmf):
        with pytest.raises(ValueError):
            enumerate_subset_candidates(small_pmf, k_cap=4)

    def test_posteriors_match_renormalization(self, small_pmf):
        cands = enumerate_subset_candidates(small_pmf)
        # Subset {1, 3} has bitmask 0b01010 = 10; candidates are in
        # ascending mask order starting at 1.
        cand = cands[10 - 1]
        assert cand.label == "1+3"
        expect = np.zeros(5)
        expect[[1, 3]] = small_pmf.probs[[1, 3]]
        expect /= expect.sum()
        np.testing.assert_allclose(cand.posterior, expect, atol=1e-15)
        p = expect[expect > 0]
        assert cand.entropy_bits == pytest.approx(
            -float(np.sum(p * np.log2(p))), abs=1e-12
        )


class TestSolveEndpoints:
    def test_zero_key_rate_is_zero(self, small_pmf):
        sol = solve_secrecy_lp(small_pmf, RatePair(5.0, 0.0))
        assert sol.feasible
        assert sol.value == pytest.approx(0.0, abs=1e-12)

    def test_full_key_rate_is_variance(self, small_pmf):
        h = small_pmf.entropy_bits()
        sol = solve_secrecy_lp(small_pmf, RatePair(5.0, h))
        assert sol.value == pytest.approx(small_pmf.variance(), abs=1e-9)
        beyond = solve_secrecy_lp(small_pmf, RatePair(5.0, h + 2.0))
        assert beyond.value == pytest.approx(small_pmf.variance(), abs=1e-9)
        assert beyond.slack_rs > 1.0

    def test_message_rate_gate(self, small_pmf):
        sol = solve_secrecy_lp(small_pmf, RatePair(1.0, 0.5))
        assert not sol.feasible
        assert math.isnan(sol.value)

    def test_monotone_in_key_rate(self, small_pmf):
        prev = -1.0
        for rs in np.linspace(0.0, 2.5, 11):
            sol = solve_secrecy_lp(small_pmf, RatePair(5.0, float(rs)))
            assert sol.value >= prev - 1e-9
            assert sol.value <= small_pmf.variance() + 1e-9
            prev = sol.value

    def test_weights_form_distribution(self, small_pmf):
        sol = solve_secrecy_lp(small_pmf, RatePair(5.0, 0.8))
        assert float(sol.weights.sum()) == pytest.approx(1.0, abs=1e-8)
        assert (sol.weights >= -1e-10).all()


class TestHandInstance:
    def test_symmetric_pair_half_bit(self):
        # Equal masses at -m and m with half a bit of key: the best
        # mixture discloses nothing half the time, everything the other
        # half, leaving m^2 / 2.
        m = math.sqrt(2.0 / math.pi)
        pmf = QuantizedPmf(np.array([-m, m]), np.array([0.5, 0.5]))
        sol = solve_secrecy_lp(pmf, RatePair(2.0, 0.5))
        assert sol.value == pytest.approx(0.5 * m * m, abs=1e-8)
        assert sol.slack_rs == pytest.approx(0.0, abs=1e-8)


class TestBruteForceOracle:
    @pytest.mark.parametrize("seed", [3, 11])
    @pytest.mark.parametrize("rs", [0.0, 0.4, 1.0])
    def test_matches_small_instances(self, seed, rs):
        rng = np.random.default_rng(seed)
        k = int(rng.integers(2, 5))
        pts = np.sort(rng.normal(size=k))
        pr = rng.random(k) + 0.2
        pr /= pr.sum()
        pmf = QuantizedPmf(pts, pr)
        cands = enumerate_subset_candidates(pmf)
        sol = solve_secrecy_lp(pmf, RatePair(5.0, rs), candidates=cands)
        ref = brute_force_value(pmf, rs, cands)
        assert sol.value == pytest.approx(ref, abs=1e-8)


class TestInvariances:
    def test_candidate_order_irrelevant(self, small_pmf):
        cands = enumerate_subset_candidates(small_pmf)
        sol1 = solve_secrecy_lp(small_pmf, RatePair(5.0, 0.6), candidates=cands)
        sol2 = solve_secrecy_lp(
            small_pmf, RatePair(5.0, 0.6), candidates=list(reversed(cands))
        )
        assert sol1.value == pytest.approx(sol2.value, abs=1e-9)

    def test_mirror_symmetry(self):
        pts = np.array([-2.0, -1.0, 1.0, 2.0])
        pr = np.array([0.1, 0.4, 0.4, 0.1])
        mirrored = QuantizedPmf(-pts[::-1], pr[::-1])
        a = solve_secrecy_lp(QuantizedPmf(pts, pr), RatePair(5.0, 0.7))
        b = solve_secrecy_lp(mirrored, RatePair(5.0, 0.7))
        assert a.value == pytest.approx(b.value, abs=1e-9)

    def test_restricted_mode_dominates(self, small_pmf):
        for rs in (0.3, 0.8, 1.5):
            cont = solve_secrecy_lp(small_pmf, RatePair(5.0, rs), mode="continuous")
            restr = solve_secrecy_lp(
                small_pmf, RatePair(5.0, rs), mode="alphabet_restricted"
            )
            assert restr.value >= cont.value - 1e-9

    def test_weak_duality_cap(self, unit_pmf):
        # No disclosure mixture can beat the blind variance.
        for rs in (0.5, 1.5, 3.0):
            sol = solve_secrecy_lp(unit_pmf, RatePair(5.0, rs))
            assert sol.value <= unit_pmf.variance() + 1e-9


class TestLpPayoff:
    def test_normalizes_by_variance(self, small_pmf):
        sol = solve_secrecy_lp(small_pmf, RatePair(5.0, 0.5))
        v = lp_payoff(sol, GaussianSource(0.0, 2.0))
        assert float(v) == pytest.approx(sol.value / 2.0, abs=1e-12)

    def test_infeasible_rejected(self, small_pmf):
        sol = solve_secrecy_lp(small_pmf, RatePair(0.5, 0.5))
        with pytest.raises(ValueError):
            lp_payoff(sol, STANDARD_SOURCE)
