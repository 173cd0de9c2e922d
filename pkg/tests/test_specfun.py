import math

import numpy as np
import pytest
from scipy.special import chndtr

from cascadesense import specfun as sf
from cascadesense.errors import (DomainError, NumericsError, OverflowRangeError,
                                 as_probability)

import oracles as oc

# Frozen via the independent oracles in oracles.py (series for the lower
# incomplete gamma, bracketing bisection + Newton, ascending Bessel series,
# quadrature of the K integral representation, high-precision Marcum series).
REG_Q_5_45 = 0.5321035763747146
INV_Q_5_01 = 7.9935895860526225
BESSEL_I0_2 = 2.2795853023360673
BESSEL_K0_2 = 0.11389387274953344
MARCUM_1_1_1 = 0.7328798037968203


class TestRegularizedGammaQ:
    def test_at_zero_is_one(self):
        assert sf.regularized_gamma_q(5.0, 0.0) == 1.0

    def test_exponential_reduction(self):
        # Q(1, x) = e^-x
        assert sf.regularized_gamma_q(1.0, math.log(10.0)) == pytest.approx(0.1, rel=1e-14)

    def test_frozen_value(self):
        assert sf.regularized_gamma_q(5.0, 4.5) == pytest.approx(REG_Q_5_45, rel=1e-14)

    def test_matches_series_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            u = rng.uniform(0.2, 9.0)
            x = rng.uniform(0.0, 20.0)
            assert sf.regularized_gamma_q(u, x) == pytest.approx(
                oc.lower_gamma_series_q(u, x), abs=1e-13)

    def test_decreasing_in_x(self):
        xs = np.linspace(0.0, 30.0, 200)
        vals = [sf.regularized_gamma_q(4.0, x) for x in xs]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            sf.regularized_gamma_q(0.0, 1.0)
        with pytest.raises(DomainError):
            sf.regularized_gamma_q(1.0, -0.5)


class TestInverseRegularizedGammaQ:
    def test_p_one_is_zero(self):
        assert sf.inverse_regularized_gamma_q(5.0, 1.0) == 0.0

    def test_exponential_reduction(self):
        assert sf.inverse_regularized_gamma_q(1.0, 0.1) == pytest.approx(
            math.log(10.0), rel=1e-12)

    def test_frozen_value(self):
        assert sf.inverse_regularized_gamma_q(5.0, 0.1) == pytest.approx(
            INV_Q_5_01, rel=1e-12)

    def test_roundtrip_property(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            u = rng.uniform(0.3, 8.0)
            p = rng.uniform(1e-6, 1.0)
            x = sf.inverse_regularized_gamma_q(u, p)
            assert sf.regularized_gamma_q(u, x) == pytest.approx(p, abs=1e-10)

    def test_domain_errors(self):
        for bad_p in (0.0, -0.1, 1.5):
            with pytest.raises(DomainError):
                sf.inverse_regularized_gamma_q(2.0, bad_p)


class TestBesselI:
    def test_zero_argument(self):
        assert sf.bessel_i(0.0, 0.0) == 1.0
        assert sf.bessel_i(1.0, 0.0) == 0.0

    def test_frozen_value(self):
        assert sf.bessel_i(0.0, 2.0) == pytest.approx(BESSEL_I0_2, rel=1e-13)

    def test_matches_series_oracle(self):
        for nu in (0.0, 1.0, 2.5):
            for x in (0.3, 2.0, 11.0):
                assert sf.bessel_i(nu, x) == pytest.approx(
                    oc.bessel_i_series(nu, x), rel=1e-12)

    def test_overflow_signalled(self):
        with pytest.raises(OverflowRangeError):
            sf.bessel_i(0.0, 800.0)
        sf.bessel_i(0.0, 700.0)  # still representable

    def test_domain_error(self):
        with pytest.raises(DomainError):
            sf.bessel_i(0.0, -1.0)


class TestBesselK:
    def test_monotone_decay(self):
        vals = [sf.bessel_k(0.0, x) for x in (1.0, 5.0, 20.0, 80.0)]
        assert all(a > b > 0 for a, b in zip(vals, vals[1:]))

    def test_half_order_closed_form(self):
        assert sf.bessel_k(0.5, 1.0) == pytest.approx(
            math.sqrt(math.pi / 2.0) * math.exp(-1.0), rel=1e-13)

    def test_frozen_value_and_integral_oracle(self):
        assert sf.bessel_k(0.0, 2.0) == pytest.approx(BESSEL_K0_2, rel=1e-12)
        for nu, x in ((0.0, 0.7), (1.0, 3.0), (2.0, 10.0)):
            assert sf.bessel_k(nu, x) == pytest.approx(
                oc.bessel_k_integral(nu, x), rel=1e-11)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            sf.bessel_k(0.0, 0.0)


class TestMarcumQ:
    def test_b_zero_exactly_one(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            u = rng.uniform(0.3, 9.0)
            a = rng.uniform(0.0, 12.0)
            assert sf.marcum_q(u, a, 0.0) == 1.0

    def test_a_zero_reduces_to_gamma_tail(self):
        assert sf.marcum_q(5.0, 0.0, 3.0) == pytest.approx(
            sf.regularized_gamma_q(5.0, 4.5), rel=1e-14)

    def test_frozen_canonical_value(self):
        assert sf.marcum_q(1.0, 1.0, 1.0) == pytest.approx(MARCUM_1_1_1, abs=2e-14)

    def test_against_noncentral_chisquare_tail(self):
        rng = np.random.default_rng(17)
        for _ in range(60):
            u = rng.uniform(0.5, 8.0)
            a = rng.uniform(0.0, 9.0)
            b = rng.uniform(0.01, 9.0)
            ref = 1.0 - chndtr(b * b, 2.0 * u, a * a)
            assert sf.marcum_q(u, a, b) == pytest.approx(ref, abs=5e-12)

    def test_monotone_decreasing_in_b(self):
        rng = np.random.default_rng(23)
        for _ in range(15):
            u = rng.uniform(0.5, 6.0)
            a = rng.uniform(0.0, 6.0)
            bs = np.sort(rng.uniform(0.0, 10.0, size=12))
            vals = [sf.marcum_q(u, a, b) for b in bs]
            assert all(x >= y - 1e-14 for x, y in zip(vals, vals[1:]))

    def test_nondecreasing_in_a(self):
        rng = np.random.default_rng(29)
        for _ in range(15):
            u = rng.uniform(0.5, 6.0)
            b = rng.uniform(0.1, 8.0)
            avals = np.sort(rng.uniform(0.0, 10.0, size=12))
            vals = [sf.marcum_q(u, a, b) for a in avals]
            assert all(y >= x - 1e-14 for x, y in zip(vals, vals[1:]))

    def test_grid_evaluator_matches_scalar(self):
        rng = np.random.default_rng(31)
        u, half_b2 = 3.5, 4.2
        xs = np.concatenate([[0.0, 1e-16], rng.uniform(0.0, 900.0, size=300)])
        grid = sf._marcum_q_grid(u, xs, half_b2)
        for x, g in zip(xs[:40], grid[:40]):
            scalar = sf.marcum_q(u, math.sqrt(2.0 * x), math.sqrt(2.0 * half_b2))
            assert g == pytest.approx(scalar, abs=5e-13)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            sf.marcum_q(0.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            sf.marcum_q(1.0, -1.0, 1.0)
        with pytest.raises(DomainError):
            sf.marcum_q(1.0, 1.0, -1.0)


class TestWronskianCrossCheck:
    def test_bessel_wronskian(self):
        # I_nu(x) K_{nu+1}(x) + I_{nu+1}(x) K_nu(x) = 1/x
        rng = np.random.default_rng(41)
        for _ in range(30):
            nu = rng.uniform(0.0, 3.0)
            x = rng.uniform(0.1, 50.0)
            w = sf.bessel_i(nu, x) * sf.bessel_k(nu + 1.0, x) \
                + sf.bessel_i(nu + 1.0, x) * sf.bessel_k(nu, x)
            assert w == pytest.approx(1.0 / x, rel=1e-10)


class TestProbabilityClamp:
    def test_roundoff_clamped(self):
        assert as_probability(1.0 + 1e-10) == 1.0
        assert as_probability(-1e-10) == 0.0

    def test_real_excursion_raises(self):
        with pytest.raises(NumericsError):
            as_probability(1.0 + 1e-8)
        with pytest.raises(NumericsError):
            as_probability(-1e-8)
