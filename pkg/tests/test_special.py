import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from besselwave.errors import AccuracyError, DomainError
from besselwave.special import (BesselCliffordParams, bessel_clifford,
                                double_factorial_odd, gamma, pochhammer,
                                solution_consts, sphere_area_const)


class TestBesselClifford:
    def test_value_at_zero_is_one(self):
        for nu in (-0.4, 0.0, 0.7, 2.0, 5.5):
            assert bessel_clifford(nu, 0.0) == pytest.approx(1.0, abs=1e-15)

    def test_half_order_identities(self):
        # jbar(-1/2, z) = cos z and jbar(1/2, z) = sin(z)/z
        assert bessel_clifford(-0.5, math.pi) == pytest.approx(-1.0, abs=1e-13)
        assert bessel_clifford(0.5, math.pi) == pytest.approx(0.0, abs=1e-13)
        z = np.linspace(-20.0, 20.0, 401)
        assert np.max(np.abs(bessel_clifford(-0.5, z) - np.cos(z))) <= 1e-12
        z = z[np.abs(z) > 1e-3]
        assert np.max(np.abs(bessel_clifford(0.5, z) - np.sin(z) / z)) <= 1e-12

    def test_defining_ode_residual_order(self):
        # y = jbar(nu, mu t) solves y'' + ((2 nu + 1)/t) y' + mu^2 y = 0
        mu = 1.4
        for nu in (-0.4, 0.0, 0.7, 2.0):
            for t in (0.5, 3.0, 11.0):
                res = []
                hs = (4e-3, 2e-3, 1e-3)
                for h in hs:
                    yp = bessel_clifford(nu, mu * (t + h))
                    ym = bessel_clifford(nu, mu * (t - h))
                    y0 = bessel_clifford(nu, mu * t)
                    r = ((yp - 2.0 * y0 + ym) / h ** 2
                         + (2.0 * nu + 1.0) / t * (yp - ym) / (2.0 * h)
                         + mu ** 2 * y0)
                    res.append(abs(r))
                order = np.polyfit(np.log(hs), np.log(res), 1)[0]
                assert 1.7 <= order <= 2.3

    def test_order_domain(self):
        with pytest.raises(DomainError):
            bessel_clifford(-1.0, 1.0)
        with pytest.raises(DomainError):
            BesselCliffordParams(order=-1.5)

    def test_argument_range_guard(self):
        with pytest.raises(AccuracyError):
            bessel_clifford(0.0, 51.0)

    def test_max_terms_exhaustion(self):
        params = BesselCliffordParams(order=0.0, max_terms=3)
        with pytest.raises(AccuracyError):
            bessel_clifford(0.0, 20.0, params=params)

    def test_param_validation(self):
        with pytest.raises(DomainError):
            BesselCliffordParams(order=0.0, max_terms=0)
        with pytest.raises(DomainError):
            BesselCliffordParams(order=0.0, term_tolerance=0.0)


class TestPochhammer:
    def test_examples(self):
        assert pochhammer(7.3, 0) == 1.0
        assert pochhammer(0.5, 2) == pytest.approx(0.75, rel=1e-15)
        assert pochhammer(1.0, 5) == pytest.approx(120.0, rel=1e-15)

    @given(st.floats(-5, 5, allow_nan=False), st.integers(0, 12))
    def test_recurrence(self, x, k):
        assert pochhammer(x, k + 1) == pytest.approx(
            pochhammer(x, k) * (x + k), rel=1e-12, abs=1e-12)

    def test_negative_order(self):
        with pytest.raises(DomainError):
            pochhammer(1.0, -1)


class TestDoubleFactorial:
    def test_examples(self):
        assert double_factorial_odd(0) == 1
        assert double_factorial_odd(1) == 1
        assert double_factorial_odd(3) == 15
        assert double_factorial_odd(5) == 945

    def test_guards(self):
        with pytest.raises(DomainError):
            double_factorial_odd(-1)
        with pytest.raises(DomainError):
            double_factorial_odd(151)


class TestSphereArea:
    def test_known_dimensions(self):
        assert sphere_area_const(1) == pytest.approx(2.0, rel=1e-14)
        assert sphere_area_const(2) == pytest.approx(2.0 * math.pi, rel=1e-14)
        assert sphere_area_const(3) == pytest.approx(4.0 * math.pi, rel=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            sphere_area_const(0)


class TestSolutionConsts:
    def test_n3_alpha1(self):
        g, gbar, _ = solution_consts(3, 1.0)
        assert g == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-14)
        assert gbar == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-14)

    def test_n2_tilde(self):
        _, _, gtilde = solution_consts(2, 0.7)
        assert gtilde == pytest.approx(1.0 / sphere_area_const(3), rel=1e-14)

    def test_n5_gbar(self):
        _, gbar, _ = solution_consts(5, 0.5)
        expected = 1.0 / (3.0 * sphere_area_const(5) * gamma(0.5))
        assert gbar == pytest.approx(expected, rel=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            solution_consts(1, 1.0)
        with pytest.raises(DomainError):
            solution_consts(3, 0.0)
