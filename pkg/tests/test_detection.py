import math

import numpy as np
import pytest
from scipy import integrate

from cascadesense import detection as dt
from cascadesense import mcsim as mc
from cascadesense import mellin as ml
from cascadesense import specfun as sf
from cascadesense.errors import DivergentIntegralError, DomainError

import oracles as oc

LAMBDA_5_01 = 15.987179172105245       # 2 * invQ(5, 0.1), bisection+Newton oracle
PD_AWGN_5_10_L = 0.9389252794566552    # Q_5(sqrt 20, sqrt lambda), Marcum series
AVG_PD_5_01_10DB_N2 = 0.5734719717777417  # scipy quad over mpmath kernel oracle


class TestThresholds:
    def test_pf_one_gives_zero_threshold(self):
        assert dt.threshold_from_pf(5.0, 1.0) == 0.0

    def test_exponential_case(self):
        assert dt.threshold_from_pf(1.0, 0.1) == pytest.approx(2.0 * math.log(10.0),
                                                               rel=1e-12)

    def test_frozen_threshold(self):
        assert dt.threshold_from_pf(5.0, 0.1) == pytest.approx(LAMBDA_5_01, rel=1e-12)

    def test_roundtrip(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            u = rng.uniform(0.5, 8.0)
            pf = rng.uniform(1e-5, 1.0)
            lam = dt.threshold_from_pf(u, pf)
            assert dt.pf_from_threshold(u, lam) == pytest.approx(pf, abs=1e-10)

    def test_pf_zero_threshold(self):
        assert dt.pf_from_threshold(5.0, 0.0) == 1.0

    def test_pf_monotone_decreasing(self):
        lams = np.linspace(0.0, 40.0, 100)
        vals = [dt.pf_from_threshold(4.0, lam) for lam in lams]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        for lam in (0.5, 4.0, 17.0):
            assert dt.pf_from_threshold(4.0, lam) == pytest.approx(
                oc.lower_gamma_series_q(4.0, lam / 2.0), abs=1e-13)


class TestPdAwgn:
    def test_zero_snr_degenerates_to_pf(self):
        lam = 9.3
        assert dt.pd_awgn(3.0, 0.0, lam) == pytest.approx(
            dt.pf_from_threshold(3.0, lam), rel=1e-14)

    def test_zero_threshold_is_one(self):
        assert dt.pd_awgn(3.0, 4.0, 0.0) == 1.0

    def test_frozen_marcum_value(self):
        assert dt.pd_awgn(5.0, 10.0, LAMBDA_5_01) == pytest.approx(
            PD_AWGN_5_10_L, abs=2e-13)


class TestTheorem1:
    def test_paths_agree_on_sample_grid(self):
        rng = np.random.default_rng(9)
        for _ in range(5):
            params = dt.Theorem1Params(
                t=float(rng.uniform(0.5, 2.0)), u=float(rng.choice([1.0, 2.0, 5.0])),
                b=float(rng.uniform(0.5, 3.0)), c=float(rng.uniform(0.5, 3.0)),
                k=float(rng.uniform(0.5, 3.0)), gspec=ml.cascaded_gspec(int(rng.integers(1, 4))))
            quad = dt.theorem1_integral(params, "quadrature")
            closed = dt.theorem1_integral(params, "closed_form")
            assert abs(quad - closed) <= 1e-6 * (1.0 + abs(quad))

    def test_detection_scenario_equals_avg_pd(self):
        # t=0, b=sqrt2, c=sqrt(lambda), k=1/gbar reproduces the fading average
        gbar = 10.0
        params = dt.Theorem1Params(t=0.0, u=5.0, b=math.sqrt(2.0),
                                   c=math.sqrt(LAMBDA_5_01), k=1.0 / gbar,
                                   gspec=ml.cascaded_gspec(2))
        want = dt.avg_pd_cascaded(5.0, 0.1, gbar, 2, "quadrature")
        assert dt.theorem1_integral(params, "quadrature") == pytest.approx(want, abs=1e-8)
        assert dt.theorem1_integral(params, "closed_form") == pytest.approx(want, abs=1e-8)

    def test_divergent_origin_rejected(self):
        params = dt.Theorem1Params(t=-1.0, u=1.0, b=1.0, c=1.0, k=1.0,
                                   gspec=ml.cascaded_gspec(1))
        with pytest.raises(DivergentIntegralError):
            dt.theorem1_integral(params, "quadrature")

    def test_unknown_method(self):
        params = dt.Theorem1Params(t=1.0, u=1.0, b=1.0, c=1.0, k=1.0,
                                   gspec=ml.cascaded_gspec(1))
        with pytest.raises(DomainError):
            dt.theorem1_integral(params, "magic")


class TestCascadedPdf:
    def test_n1_exponential(self):
        for g, gbar in ((0.5, 1.0), (3.0, 2.0)):
            assert dt.cascaded_pdf(g, gbar, 1) == pytest.approx(
                math.exp(-g / gbar) / gbar, rel=1e-13)

    def test_n2_bessel(self):
        g, gbar = 1.4, 2.2
        want = 2.0 * sf.bessel_k(0.0, 2.0 * math.sqrt(g / gbar)) / gbar
        assert dt.cascaded_pdf(g, gbar, 2) == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
    def test_normalization(self, N):
        gbar = 1.7
        val, _ = integrate.quad(
            lambda v: dt.cascaded_pdf(gbar * math.exp(v), gbar, N) * gbar * math.exp(v),
            -50.0, N * math.log(60.0 / N) + 3.0, epsabs=1e-9, epsrel=1e-9, limit=300)
        assert val == pytest.approx(1.0, abs=1e-6)

    def test_domain(self):
        with pytest.raises(DomainError):
            dt.cascaded_pdf(0.0, 1.0, 1)


class TestAvgPdCascaded:
    def test_high_snr_monotone_to_one(self):
        vals = [dt.avg_pd_cascaded(5.0, 0.1, g, 2) for g in (10.0, 100.0, 1e4, 1e6)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[-1] > 0.999

    def test_frozen_quadrature_oracle(self):
        got = dt.avg_pd_cascaded(5.0, 0.1, 10.0, 2, "quadrature")
        assert got == pytest.approx(AVG_PD_5_01_10DB_N2, abs=1e-8)
        got_cf = dt.avg_pd_cascaded(5.0, 0.1, 10.0, 2, "closed_form")
        assert got_cf == pytest.approx(AVG_PD_5_01_10DB_N2, abs=1e-8)

    def test_rayleigh_closed_form_oracle(self):
        # classic textbook result for N = 1 and integer u
        for u in (1, 2, 5):
            for pf in (0.01, 0.1):
                for gbar in (1.0, 10.0, 100.0):
                    lam = dt.threshold_from_pf(u, pf)
                    want = oc.rayleigh_avg_pd(u, lam, gbar)
                    assert dt.avg_pd_cascaded(u, pf, gbar, 1, "quadrature") == \
                        pytest.approx(want, abs=1e-8)
                    assert dt.avg_pd_cascaded(u, pf, gbar, 1, "closed_form") == \
                        pytest.approx(want, abs=1e-8)

    def test_pf_one_gives_pd_one(self):
        assert dt.avg_pd_cascaded(4.0, 1.0, 5.0, 3) == 1.0

    def test_result_provenance_fields(self):
        res = dt.avg_pd_cascaded_result(5.0, 0.1, 10.0, 2, "closed_form")
        assert res.method_used == "closed_form"
        assert res.verified
        res_q = dt.avg_pd_cascaded_result(5.0, 0.1, 10.0, 2, "quadrature")
        assert res_q.method_used == "quadrature"

    def test_zero_snr_limit_is_pf(self):
        got = dt.avg_pd_cascaded(3.0, 0.07, 1e-12, 2, "quadrature")
        assert got == pytest.approx(0.07, abs=1e-6)


class TestSls:
    def test_single_branch_reduces(self):
        lam = dt.threshold_from_pf(4.0, 0.1)
        gbar = 10.0 ** 1.2
        single = dt.avg_pd_cascaded(4.0, 0.1, gbar, 5)
        assert dt.avg_pd_sls(4.0, lam, [gbar], 5) == pytest.approx(single, rel=1e-12)

    def test_absorbing_branch(self):
        # threshold 0 makes every branch certain: result is exactly 1
        assert dt.avg_pd_sls(4.0, 0.0, [1.0, 2.0], 3) == 1.0

    def test_product_formula_against_quadrature(self):
        u, gdb, N, L = 4.0, 12.0, 5, 3
        gbar = 10.0 ** (gdb / 10.0)
        lam = dt.threshold_from_pf(u, 0.1)
        per_branch = dt._avg_pd_from_threshold(u, lam, gbar, N, "quadrature", None).value
        want = 1.0 - (1.0 - per_branch) ** L
        assert dt.avg_pd_sls(u, lam, [gbar] * L, N, "quadrature") == \
            pytest.approx(want, rel=1e-10)
        assert dt.avg_pd_sls(u, lam, [gbar] * L, N, "closed_form") == \
            pytest.approx(want, abs=1e-9)

    def test_unequal_branches(self):
        lam = dt.threshold_from_pf(2.0, 0.05)
        snrs = [3.0, 8.0, 20.0]
        pds = [dt._avg_pd_from_threshold(2.0, lam, g, 2, "quadrature", None).value
               for g in snrs]
        want = 1.0 - np.prod([1.0 - p for p in pds])
        assert dt.avg_pd_sls(2.0, lam, snrs, 2, "quadrature") == \
            pytest.approx(want, rel=1e-10)

    def test_monotone_in_branch_count(self):
        lam = dt.threshold_from_pf(4.0, 0.1)
        vals = [dt.avg_pd_sls(4.0, lam, [10.0] * L, 3) for L in (1, 2, 3, 4)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_pf_sls(self):
        lam = dt.threshold_from_pf(4.0, 0.1)
        assert dt.pf_sls(4.0, lam, 1) == pytest.approx(
            dt.pf_from_threshold(4.0, lam), rel=1e-13)
        assert dt.pf_sls(4.0, 0.0, 3) == 1.0
        assert dt.pf_sls(4.0, lam, 3) == pytest.approx(1.0 - 0.9 ** 3, rel=1e-12)

    def test_pf_sls_against_mc_central_draws(self):
        # empirical max of L central statistics vs the complement rule
        u, L, n = 4, 3, 200_000
        lam = dt.threshold_from_pf(float(u), 0.2)
        gen = mc.RngStream(314, 5).generator()
        y = gen.standard_normal((n, L, 2 * u)) ** 2
        best = y.sum(axis=2).max(axis=1)
        p_emp = float(np.mean(best > lam))
        want = dt.pf_sls(float(u), lam, L)
        stderr = math.sqrt(want * (1.0 - want) / n)
        assert abs(p_emp - want) <= 3.0 * stderr


class TestDetectorConfig:
    def test_exactly_one_of_threshold_pf(self):
        with pytest.raises(DomainError):
            dt.DetectorConfig(u=1.0, avg_snr=1.0, threshold=1.0, target_pf=0.1)
        with pytest.raises(DomainError):
            dt.DetectorConfig(u=1.0, avg_snr=1.0)

    def test_resolution(self):
        cfg = dt.DetectorConfig(u=5.0, avg_snr=2.0, target_pf=0.1)
        assert cfg.resolved_threshold() == pytest.approx(LAMBDA_5_01, rel=1e-12)
        cfg2 = dt.DetectorConfig(u=5.0, avg_snr=2.0, threshold=3.0)
        assert cfg2.resolved_threshold() == 3.0

    def test_branch_snr_validation(self):
        with pytest.raises(DomainError):
            dt.DetectorConfig(u=1.0, avg_snr=1.0, target_pf=0.1, branch_snrs=[1.0, -2.0])
