import math

import pytest
from scipy.optimize import brentq

from digitprod.digits import DigitTally, context, is_member
from digitprod.lower_bounds import (
    AlphaProfile,
    construct_witnesses,
    feasibility,
    maximize,
    multinomial_rate,
    objective,
    supported_digits,
)

REFERENCE_ALPHA_10 = (1.331, 1.331, 0.476, 0.0, 0.170, 1.0, 0.0, 0.0, 0.060, 0.0)


def inclusive_rate(alpha, b):
    """Oracle: entropy rate with sums over every digit index including 0."""
    total = math.fsum(alpha)
    entropy = total * math.log(total) - math.fsum(a * math.log(a) for a in alpha if a > 0)
    return entropy / ((1 + total) * math.log(b))


def index1_rate(alpha, b):
    """Oracle: the same formula read with sums starting at digit index 1."""
    total = math.fsum(alpha[1:])
    entropy = total * math.log(total) - math.fsum(a * math.log(a) for a in alpha[1:] if a > 0)
    return entropy / ((1 + total) * math.log(b))


def kkt_fixed_point_base10():
    """Independent stationarity oracle for the base-10 optimum.

    At an interior optimum every free weight equals T * b**-rho damped by
    exp(-c * nu_2(d)) on the budget-tied digits, with the weight on digit 5
    pinned at its budget. Solving that two-level fixed point gives the
    optimal value without any gradient ascent.
    """

    def given_a(a):
        theta = brentq(lambda t: a * (t + 2 * t * t + 3 * t**3) - 1.0, 1e-12, 1.0)
        alpha = [a, a, a * theta, 0.0, a * theta**2, 1.0, 0.0, 0.0, a * theta**3, 0.0]
        rho = inclusive_rate(alpha, 10)
        total = math.fsum(alpha)
        return total * 10**-rho - a, rho

    a_star = brentq(lambda a: given_a(a)[0], 0.5, 3.0, xtol=1e-14)
    return given_a(a_star)[1]


class TestFeasibility:
    def test_reference_profile_feasible(self):
        report = feasibility(context(10), REFERENCE_ALPHA_10)
        assert report.feasible
        assert report.violations == ()
        # budget loads: 0.476 + 2*0.170 + 3*0.060 = 0.996 and alpha_5 = 1
        assert 0.476 + 2 * 0.170 + 3 * 0.060 == pytest.approx(0.996)

    def test_unsupported_digit(self):
        report = feasibility(context(10), (0, 0, 0, 0.1, 0, 0, 0, 0, 0, 0))
        assert not report.feasible
        assert "support d=3" in report.violations

    def test_budget_overrun(self):
        report = feasibility(context(10), (0, 0, 0, 0, 0, 0, 0, 0, 0.4, 0))
        assert not report.feasible
        assert "budget p=2" in report.violations

    def test_negative_entry(self):
        report = feasibility(context(10), (-0.5, 0, 0, 0, 0, 0, 0, 0, 0, 0))
        assert not report.feasible
        assert "negative d=0" in report.violations

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError):
            feasibility(context(10), (1.0, 2.0))

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            feasibility(context(10), (math.inf,) + (0.0,) * 9)

    def test_supported_digits(self):
        assert supported_digits(context(10)) == (2, 4, 5, 8)
        assert supported_digits(context(7)) == ()
        assert supported_digits(context(12)) == (2, 3, 4, 6, 8, 9)
        assert supported_digits(context(4)) == (2,)


class TestObjective:
    def test_reference_profile_value(self):
        value = objective(context(10), REFERENCE_ALPHA_10)
        # frozen from the inclusive-index oracle
        assert value == pytest.approx(0.5260406560523914, abs=1e-12)
        assert 0.526 < value < 0.5262
        assert value == pytest.approx(inclusive_rate(REFERENCE_ALPHA_10, 10), abs=1e-14)

    def test_index1_reading_contradicts_published_claim(self):
        # the same vector under the index-1 reading lands near 0.411,
        # far below 0.526; only the inclusive convention matches
        literal = index1_rate(REFERENCE_ALPHA_10, 10)
        assert literal == pytest.approx(0.4105765519114934, abs=1e-12)
        assert literal == pytest.approx(0.411, abs=1e-3)
        assert literal < 0.526 < objective(context(10), REFERENCE_ALPHA_10)

    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0, 10.0])
    def test_binary_support_closed_form(self, t):
        for b in (5, 10):
            alpha = [t, t] + [0.0] * (b - 2)
            want = 2 * t * math.log(2) / ((1 + 2 * t) * math.log(b))
            assert objective(context(b), alpha) == pytest.approx(want, abs=1e-13)

    def test_single_support_is_zero(self):
        assert objective(context(10), (0, 1, 0, 0, 0, 0, 0, 0, 0, 0)) == pytest.approx(0.0, abs=1e-15)

    def test_infeasible_rejected(self):
        with pytest.raises(ValueError):
            objective(context(10), (0, 0, 0, 1, 0, 0, 0, 0, 0, 0))

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError):
            objective(context(10), (0.0,) * 10)

    @pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
    def test_scaling_structure(self, c):
        # objective(c*alpha) = c*T*H / ((1 + c*T) log b) with H the entropy
        # of the normalized profile
        ctx = context(10)
        # budgets at c = 2: p2 load 0.7 and p5 load 1.0, both feasible
        alpha = [0.8, 0.4, 0.1, 0, 0.05, 0.5, 0, 0, 0.05, 0]
        scaled = [c * a for a in alpha]
        total = math.fsum(alpha)
        probs = [a / total for a in alpha if a > 0]
        entropy = -math.fsum(p * math.log(p) for p in probs)
        want = c * total * entropy / ((1 + c * total) * math.log(10))
        assert objective(ctx, scaled) == pytest.approx(want, abs=1e-10)


class TestMaximize:
    def test_base_10_beats_published_bound(self):
        profile = maximize(context(10))
        assert profile.feasible
        assert profile.objective >= 0.526
        assert profile.objective < 0.787

    def test_base_10_matches_stationarity_oracle(self):
        oracle = kkt_fixed_point_base10()
        assert oracle == pytest.approx(0.526538773501803, abs=1e-12)
        profile = maximize(context(10))
        assert profile.objective == pytest.approx(oracle, abs=1e-7)

    def test_prime_base_supremum(self):
        for b in (3, 5, 7, 11, 13):
            profile = maximize(context(b))
            want = math.log(2) / math.log(b)
            assert profile.is_limit
            assert -1e-6 <= profile.objective - want <= 0.01 * want
            assert profile.alpha[0] == profile.alpha[1] > 0

    def test_base_7_value(self):
        assert maximize(context(7)).objective == pytest.approx(0.3562071871080222, abs=1e-12)

    def test_base_4_beats_binary_support(self):
        profile = maximize(context(4))
        assert profile.objective > math.log(2) / math.log(4)
        # frozen from a (t, u) grid-search oracle over alpha = (t, t, u, 0)
        assert profile.objective >= 0.6357766

    def test_trace_monotone(self):
        profile = maximize(context(6), starts=8)
        assert profile.trace
        assert all(b >= a for a, b in zip(profile.trace, profile.trace[1:]))

    def test_cap_corner_lower_bound(self):
        cap = 64.0
        for b in (4, 6, 12):
            profile = maximize(context(b), cap=cap, starts=4)
            floor_value = (1 - 1 / (1 + 2 * cap)) * math.log(2) / math.log(b)
            assert profile.objective >= floor_value

    def test_deterministic_given_seed(self):
        a = maximize(context(6), starts=6, seed=99)
        b = maximize(context(6), starts=6, seed=99)
        assert a.alpha == b.alpha
        assert a.objective == b.objective


class TestWitnesses:
    def test_minimal_example(self):
        batch = construct_witnesses(context(10), 100, (0, 1) + (0,) * 8, 5, seed=3)
        assert batch.s == 1
        assert set(batch.members) == {10}

    def test_block_exponent_shrinks_to_fit(self):
        # alpha = (1,1,1,0) at x = 4**6 gives s = 1 from the floor formula;
        # every member must stay within x
        ctx = context(4)
        batch = construct_witnesses(ctx, 4**6, (1.0, 1.0, 1.0, 0.0), 20, seed=5)
        assert batch.s == 1
        assert batch.tallies.counts == (1, 1, 1, 0)
        assert all(n <= 4**6 for n in batch.members)

    def test_reference_profile_batch(self):
        ctx = context(10)
        x = 10**12
        batch = construct_witnesses(ctx, x, REFERENCE_ALPHA_10, 300, seed=11)
        assert len(batch.members) == 300
        assert all(n <= x and is_member(ctx, n, "nonzero") for n in batch.members)

    def test_soundness_across_bases(self):
        profiles = {
            4: (1.0, 1.0, 1.0, 0.0),
            6: (1.0, 1.0, 0.5, 1.0, 0.25, 0.0),
            10: REFERENCE_ALPHA_10,
            12: (1.0, 1.0, 0.5, 0.5, 0.125, 0.0, 0.25, 0.0, 0.0, 0.125, 0.0, 0.0),
        }
        for b, alpha in profiles.items():
            ctx = context(b)
            x = b**12
            batch = construct_witnesses(ctx, x, alpha, 250, seed=b)
            assert all(n <= x and is_member(ctx, n, "nonzero") for n in batch.members)

    def test_infeasible_profile_rejected(self):
        with pytest.raises(ValueError):
            construct_witnesses(context(10), 10**6, (0, 0, 0, 1, 0, 0, 0, 0, 0, 0), 5)

    def test_x_below_base_rejected(self):
        with pytest.raises(ValueError):
            construct_witnesses(context(10), 5, (1, 1) + (0,) * 8, 5)

    def test_too_small_x_for_profile(self):
        # total weight 128 squeezes s to 0, leaving an empty digit block
        with pytest.raises(ValueError):
            construct_witnesses(context(10), 1000, (64.0, 64.0) + (0,) * 8, 5)

    def test_deterministic_given_seed(self):
        a = construct_witnesses(context(10), 10**9, REFERENCE_ALPHA_10, 50, seed=42)
        b = construct_witnesses(context(10), 10**9, REFERENCE_ALPHA_10, 50, seed=42)
        assert a.members == b.members


class TestMultinomialRate:
    def test_two_singletons(self):
        assert multinomial_rate(DigitTally((1, 1))) == pytest.approx(math.log(2), abs=1e-12)

    def test_single_symbol(self):
        assert multinomial_rate(DigitTally((0, 0, 0, 0, 0, 3))) == pytest.approx(0.0, abs=1e-12)

    def test_exact_small_multinomial(self):
        # 5! / (2! 2! 1!) = 30
        assert multinomial_rate(DigitTally((2, 2, 1))) == pytest.approx(math.log(30), abs=1e-12)

    def test_stirling_convergence_to_entropy_numerator(self):
        s = 1000
        counts = tuple(int(a * s) for a in REFERENCE_ALPHA_10)
        rate = multinomial_rate(DigitTally(counts)) / s
        total = math.fsum(REFERENCE_ALPHA_10)
        numerator = total * math.log(total) - math.fsum(
            a * math.log(a) for a in REFERENCE_ALPHA_10 if a > 0
        )
        assert numerator == pytest.approx(6.502008105915319, abs=1e-12)
        assert rate == pytest.approx(numerator, rel=0.02)
