"""Quadrature, gamma, the integral representations and measure synthesis."""

from fractions import Fraction

import pytest
from mpmath import mp

from monolab.core import Interval
from monolab.errors import BranchError, InvalidParameter, QuadratureNonConvergence
from monolab.expr import evaluate, to_text
from monolab.laplace import (
    DiscreteMeasure,
    bernstein_synthesize,
    exp_tail_cutoff,
    gamma_value,
    integrate_to_convergence,
    log_deriv2_integral,
    power_identity_check,
)
from monolab.mono import MonotoneClass, check_class
from monolab.powerexp import ParamPoint, log_deriv2

POS_AXIS = Interval.parse("(0,inf)")


class TestQuadrature:
    def test_plain_exponential(self):
        value, _ = integrate_to_convergence(lambda t: mp.exp(-t), 0, 200, precision=256)
        assert abs(value - 1) < 1e-13
        tight, _ = integrate_to_convergence(lambda t: mp.exp(-t), 0, 200, precision=256,
                                            rel_tol=1e-30)
        assert abs(tight - 1) < 1e-28

    def test_nonconvergence_raises(self):
        with pytest.raises(QuadratureNonConvergence):
            integrate_to_convergence(lambda t: mp.exp(-t), 0, 50, precision=256,
                                     rel_tol=0.0, max_doublings=3)

    def test_tail_cutoff_bound(self):
        T = exp_tail_cutoff(mp.mpf(1), 2, 256)
        assert T**2 * mp.exp(-T) < mp.mpf(2) ** -128

    def test_rate_must_be_positive(self):
        with pytest.raises(InvalidParameter):
            exp_tail_cutoff(mp.mpf(0), 1, 256)


class TestGamma:
    def test_half_is_sqrt_pi(self):
        with mp.workprec(256):
            assert abs(gamma_value(Fraction(1, 2)) - mp.sqrt(mp.pi)) < mp.mpf(2) ** -240

    def test_integers(self):
        with mp.workprec(256):
            assert abs(gamma_value(1) - 1) < mp.mpf(2) ** -240
            assert abs(gamma_value(2) - 1) < mp.mpf(2) ** -240
            assert abs(gamma_value(5) - 24) < mp.mpf(2) ** -230

    def test_against_mpmath_gamma(self):
        # cross-library oracle at matched precision
        with mp.workprec(256):
            for r in (mp.mpf("0.25"), mp.mpf("1.5"), mp.mpf("3.7"), mp.mpf("10.2")):
                want = mp.gamma(r)
                assert abs(gamma_value(r) - want) <= abs(want) * mp.mpf(2) ** -240

    def test_rejects_nonpositive(self):
        with pytest.raises(InvalidParameter):
            gamma_value(0)


class TestPowerIdentity:
    @pytest.mark.parametrize("r,x,expected", [
        (1, 2, 0.5),
        (2, 3, 1.0 / 9.0),
        (Fraction(1, 2), 1, 1.0),
    ])
    def test_trivial_values(self, r, x, expected):
        check = power_identity_check(x, r)
        assert abs(check.lhs - expected) < 1e-12
        assert check.rel_err <= 1e-8

    def test_rejects_bad_arguments(self):
        with pytest.raises(InvalidParameter):
            power_identity_check(-1, 1)
        with pytest.raises(InvalidParameter):
            power_identity_check(1, 0)


class TestLogDeriv2Integral:
    def test_upper_branch_negative_alpha(self):
        check = log_deriv2_integral(ParamPoint(Fraction(-1), Fraction(-1)), 2)
        assert check.branch == "upper"
        assert abs(check.closed_form - 0.25) < 1e-15
        assert check.rel_err <= 1e-8

    def test_lower_branch_negative_alpha(self):
        point = ParamPoint(Fraction(-1), Fraction(0))
        check = log_deriv2_integral(point, -1)
        assert check.branch == "lower"
        with mp.workprec(256):
            want = log_deriv2(point, -1)
            assert abs(check.integral - float(want)) <= abs(float(want)) * 1e-8

    def test_upper_branch_positive_alpha(self):
        check = log_deriv2_integral(ParamPoint(Fraction(1), Fraction(1)), 1)
        assert check.branch == "upper"
        assert abs(check.closed_form - 0.5) < 1e-15
        assert check.rel_err <= 1e-8

    def test_between_branches_rejected(self):
        with pytest.raises(BranchError):
            log_deriv2_integral(ParamPoint(Fraction(1), Fraction(0)), Fraction(-1, 2))

    def test_doubling_stability(self):
        # recomputing with twice the panels moves the value by < 1e-10 relative
        point = ParamPoint(Fraction(-1), Fraction(-1))
        first = log_deriv2_integral(point, 2)
        from monolab.laplace import _integrate_panels, exp_tail_cutoff
        from monolab.powerexp import q_kernel

        with mp.workprec(256):
            av, bv, xv = mp.mpf(-1), mp.mpf(-1), mp.mpf(2)

            def integrand(t):
                return (bv - av * q_kernel(av * t)) * t * mp.expm1(av * t) * mp.exp(-(xv + av) * t)

            T = exp_tail_cutoff(xv + av, 2, 256, scale=3)
            doubled = _integrate_panels(integrand, 0, T, 2 * first.panels, 256)
            assert abs(doubled - mp.mpf(first.integral)) <= abs(doubled) * 1e-10

    def test_kernel_sign_factor_upper_branch(self):
        # for a < 0 and x > -a the factor t*(e^(a*t)-1)*e^(-(x+a)t) is <= 0,
        # so the integrand's sign is ruled by (b - a*q(a*t))
        with mp.workprec(256):
            av, xv = mp.mpf(-1), mp.mpf(2)
            for i in range(1, 200):
                t = mp.mpf(i) / 10
                factor = t * mp.expm1(av * t) * mp.exp(-(xv + av) * t)
                assert factor <= 0


class TestSynthesis:
    def test_single_atom(self):
        expr = bernstein_synthesize(DiscreteMeasure.of([(1, 1)]))
        assert to_text(expr) == "exp(-x)"
        assert check_class(expr, POS_AXIS, MonotoneClass.CM).verdict == "consistent"

    def test_atom_at_zero_is_constant(self):
        expr = bernstein_synthesize(DiscreteMeasure.of([(0, 1)]))
        assert to_text(expr) == "1"
        assert check_class(expr, POS_AXIS, MonotoneClass.CM).verdict == "consistent"

    def test_two_atoms(self):
        expr = bernstein_synthesize(DiscreteMeasure.of([(1, 1), (2, 3)]))
        assert evaluate(expr, 0) == 4
        assert check_class(expr, POS_AXIS, MonotoneClass.CM, max_order=10).verdict == "consistent"

    def test_sum_and_product_stay_cm(self):
        # the class is closed under addition and multiplication
        from monolab.expr import Expr

        f = bernstein_synthesize(DiscreteMeasure.of([(1, 1), (Fraction(1, 2), 2)]))
        g = bernstein_synthesize(DiscreteMeasure.of([(3, Fraction(1, 4)), (0, 1)]))
        for combined in (Expr.add(f, g), Expr.mul(f, g)):
            assert check_class(combined, POS_AXIS, MonotoneClass.CM,
                               max_order=8).verdict == "consistent"

    def test_measure_validation(self):
        with pytest.raises(InvalidParameter):
            DiscreteMeasure.of([(1, 0)])  # zero weight
        with pytest.raises(InvalidParameter):
            DiscreteMeasure.of([(-1, 1)])  # negative location
        with pytest.raises(InvalidParameter):
            DiscreteMeasure(((Fraction(2), Fraction(1)), (Fraction(1), Fraction(1))))

    def test_of_sorts_atoms(self):
        m = DiscreteMeasure.of([(2, 1), (1, 1)])
        assert [t for t, _ in m.atoms] == [1, 2]
