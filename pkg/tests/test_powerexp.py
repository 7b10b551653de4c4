"""Closed-form log derivatives, the beta threshold, kernels and classification."""

from fractions import Fraction

import pytest
from mpmath import mp

from monolab.errors import DomainError, InvalidParameter, PoleError
from monolab.expr import Expr, make_power_expr
from monolab.jets import derivatives_from_jet, jet_lift
from monolab.powerexp import (
    ParamPoint,
    classify,
    critical_beta,
    log_deriv1,
    log_deriv2,
    p_kernel,
    q_kernel,
    shifted_cm_check,
)

P11 = ParamPoint(Fraction(1), Fraction(1))


class TestLogDerivatives:
    def test_second_derivative_closed_form(self):
        # a*((2b-a)*1 + a*b) / (1*(1+1)^2) = 2/4
        with mp.workprec(256):
            assert log_deriv2(P11, 1) == mp.mpf(1) / 2

    def test_first_derivative_closed_form(self):
        with mp.workprec(256):
            want = mp.ln(2) - 1
            assert abs(log_deriv1(P11, 1) - want) < mp.mpf(2) ** -250

    def test_far_field_limits(self):
        big = Fraction(10) ** 8
        assert abs(log_deriv1(P11, big)) < 1e-6
        assert abs(log_deriv2(P11, big)) < 1e-6
        assert abs(log_deriv1(P11, -big)) < 1e-6
        assert abs(log_deriv2(P11, -big)) < 1e-6

    def test_pole_points(self):
        with pytest.raises(PoleError):
            log_deriv1(P11, 0)
        with pytest.raises(PoleError):
            log_deriv2(P11, -1)

    def test_inadmissible_region(self):
        # between the poles 1+a/x < 0 and ln F is undefined
        with pytest.raises(DomainError):
            log_deriv1(P11, Fraction(-1, 2))

    @pytest.mark.parametrize("alpha,beta,x", [
        (Fraction(1), Fraction(1), Fraction(3, 2)),
        (Fraction(-1), Fraction(-2), Fraction(5, 4)),
        (Fraction(2), Fraction(-1), Fraction(-7, 2)),
        (Fraction(-1, 2), Fraction(3), Fraction(-1, 4)),
    ])
    def test_closed_forms_match_jets(self, alpha, beta, x):
        point = ParamPoint(alpha, beta)
        fam = make_power_expr(alpha, beta)
        derivs = derivatives_from_jet(jet_lift(Expr.ln(fam.expr), x, 2))
        with mp.workprec(256):
            assert abs(log_deriv1(point, x) - derivs[1]) <= abs(derivs[1]) * 1e-30
            assert abs(log_deriv2(point, x) - derivs[2]) <= abs(derivs[2]) * 1e-30


class TestCriticalBeta:
    def test_endpoint_limit(self):
        # approaches alpha at the finite endpoint, logarithmically slowly
        value = critical_beta(-1, 1 + Fraction(1, 10**8))
        assert abs(value - (-1)) < 1e-3

    def test_infinity_limit(self):
        value = critical_beta(-1, Fraction(10) ** 8)
        assert abs(value - mp.mpf("-0.5")) < 1e-6

    def test_zero_limit(self):
        value = critical_beta(1, Fraction(1, 10**8))
        assert abs(value) < 1e-6

    @pytest.mark.parametrize("alpha,x", [
        (Fraction(1), Fraction(7, 2)),
        (Fraction(-2), Fraction(5, 2)),
        (Fraction(1), Fraction(-3, 2)),
        (Fraction(-1, 2), Fraction(-1, 4)),
    ])
    def test_zeroes_the_first_log_derivative(self, alpha, x):
        beta = critical_beta(alpha, x)
        with mp.workprec(256):
            assert abs(log_deriv1(ParamPoint(alpha, beta), x)) < 1e-25

    def test_zeroing_at_random_admissible_points(self):
        import random

        rng = random.Random(11)
        with mp.workprec(256):
            for _ in range(25):
                alpha = Fraction(rng.choice([s for s in range(-12, 13) if s != 0]), 4)
                offset = Fraction(rng.randint(1, 50), 10) ** rng.choice([1, 2])
                if rng.random() < 0.5:
                    x = max(Fraction(0), -alpha) + offset
                else:
                    x = min(Fraction(0), -alpha) - offset
                beta = critical_beta(alpha, x)
                assert abs(log_deriv1(ParamPoint(alpha, beta), x)) < 1e-25

    def test_alpha_zero_rejected(self):
        with pytest.raises(InvalidParameter):
            critical_beta(0, 1)


class TestKernels:
    def test_q_limits(self):
        assert abs(q_kernel(-1e-8) - 0.5) < 1e-6
        assert abs(q_kernel(1e-8) - 0.5) < 1e-6
        assert q_kernel(0) == 0.5
        # the far-field limits are approached like 1/|u|
        assert abs(q_kernel(-1e8) - 1) < 1e-6
        assert abs(q_kernel(1e8)) < 1e-6
        assert abs(q_kernel(-50) - mp.mpf("0.98")) < 1e-12
        assert abs(q_kernel(50) - mp.mpf("0.02")) < 1e-12

    def test_p_limits(self):
        assert abs(p_kernel(-1e-8) + 0.5) < 1e-6
        assert abs(p_kernel(1e-8) + 0.5) < 1e-6
        assert p_kernel(0) == -0.5
        assert abs(p_kernel(-1e8)) < 1e-6
        assert abs(p_kernel(1e8) + 1) < 1e-6

    def test_series_joins_direct_evaluation_smoothly(self):
        # just below the cutoff the series route must agree with a direct
        # evaluation carried out with enough bits to survive the cancellation
        with mp.workprec(512):
            for sign in (1, -1):
                u = sign * mp.mpf(2) ** -8 * mp.mpf("0.99")
                direct_q = (mp.expm1(u) - u) / (u * mp.expm1(u))
                direct_p = (1 + (u - 1) * mp.exp(u)) / (u * (-mp.expm1(u)))
                assert abs(q_kernel(u) - direct_q) < 1e-14  # 5-term series truncation
                assert abs(p_kernel(u) - direct_p) < 1e-14
                above = sign * mp.mpf(2) ** -8 * mp.mpf("1.01")
                assert abs(q_kernel(above) - q_kernel(above, precision=512)) < 1e-40

    @staticmethod
    def _log_spaced(lo_exp, hi_exp, count, sign):
        with mp.workprec(256):
            return [sign * mp.power(10, lo_exp + (hi_exp - lo_exp) * mp.mpf(i) / (count - 1))
                    for i in range(count)]

    def test_q_strictly_decreasing(self):
        # points ascend in u on both half-lines, so values must strictly descend
        negatives = self._log_spaced(mp.log10(50), -8, 200, -1)  # -50 up toward 0
        values = [q_kernel(u) for u in negatives]
        assert all(a > b for a, b in zip(values, values[1:]))
        positives = self._log_spaced(-8, mp.log10(50), 200, 1)
        values = [q_kernel(u) for u in positives]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_p_strictly_decreasing(self):
        negatives = self._log_spaced(mp.log10(50), -8, 200, -1)
        values = [p_kernel(u) for u in negatives]
        assert all(a > b for a, b in zip(values, values[1:]))
        positives = self._log_spaced(-8, mp.log10(50), 200, 1)
        values = [p_kernel(u) for u in positives]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestClassify:
    def test_alpha_positive_example(self):
        r = classify(ParamPoint(Fraction(1), Fraction(1)))
        assert r.entry(2, "f").holds is True  # 2b >= a
        assert r.entry(2, "reciprocal").holds is False  # b <= 0 fails
        assert r.entry(4, "f").holds is False  # 2b <= a fails
        assert r.entry(4, "reciprocal").holds is True  # b >= a, at equality
        assert r.entry(4, "reciprocal").boundary is True
        assert r.entry(1, "f").applicable is False

    def test_alpha_negative_example(self):
        r = classify(ParamPoint(Fraction(-1), Fraction(-1)))
        assert r.entry(1, "f").holds is True
        assert r.entry(1, "f").boundary is True  # b = a exactly
        assert r.entry(1, "reciprocal").holds is False  # 2b >= a fails
        assert r.entry(3, "f").holds is False  # b >= 0 fails
        assert r.entry(3, "reciprocal").holds is True  # 2b <= a
        assert r.entry(2, "f").applicable is False

    def test_boundary_flag_on_half_line(self):
        r = classify(ParamPoint(Fraction(2), Fraction(1)))
        entry = r.entry(2, "f")
        assert entry.holds is True and entry.boundary is True

    def test_intervals_follow_alpha_sign(self):
        r = classify(ParamPoint(Fraction(-1), Fraction(0)))
        assert r.entry(1, "f").interval.display() == "(1,inf)"
        assert r.entry(3, "f").interval.display() == "(-inf,0)"
        r = classify(ParamPoint(Fraction(2), Fraction(0)))
        assert r.entry(2, "f").interval.display() == "(0,inf)"
        assert r.entry(4, "f").interval.display() == "(-inf,-2)"

    def test_exactly_eight_entries_four_applicable(self):
        r = classify(ParamPoint(Fraction(3, 2), Fraction(-1, 4)))
        assert len(r.entries) == 8
        assert sum(e.applicable for e in r.entries) == 4

    def test_alpha_zero_rejected(self):
        with pytest.raises(InvalidParameter):
            ParamPoint(Fraction(0), Fraction(1))


class TestShiftedCm:
    @pytest.mark.parametrize("alpha,beta,expected", [
        (Fraction(1), Fraction(1), ("consistent", "refuted")),
        (Fraction(1), Fraction(-1), ("refuted", "consistent")),
        (Fraction(-1), Fraction(-2), ("consistent", "refuted")),
    ])
    def test_verdicts_match_conditions(self, alpha, beta, expected):
        report = shifted_cm_check(ParamPoint(alpha, beta))
        assert report.ok
        assert tuple(e.verdict.verdict for e in report.entries) == expected

    def test_limit_at_infinity(self):
        report = shifted_cm_check(ParamPoint(Fraction(1), Fraction(1)))
        assert report.limit_rel_err < 1e-5

    def test_reciprocal_without_shift_for_negative_alpha(self):
        report = shifted_cm_check(ParamPoint(Fraction(-1), Fraction(0)))
        assert report.entries[1].subject == "reciprocal"
        # 2b >= a holds, so plain 1/F must sweep consistent
        assert report.entries[1].condition_holds is True
        assert report.entries[1].verdict.verdict == "consistent"
