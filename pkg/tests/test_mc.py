"""Monte Carlo oracle: determinism, agreement with closed forms, coverage."""

import math

import numpy as np
import pytest

from cascade_fading.distributions import (
    CompositeProduct,
    GammaGammaParams,
    PointingErrorParams,
    z_cdf,
)
from cascade_fading.mc import McEstimate, ks_statistic, mc_cdf, mc_op_parallel, mc_op_thz
from cascade_fading.performance import op_fso_parallel_bound, op_thz
from cascade_fading.specfun import DomainError

WEAK = GammaGammaParams(10.02, 2.98)
STRONG = GammaGammaParams(4.942, 1.231)
MIXED_21 = CompositeProduct((WEAK, STRONG), (PointingErrorParams(6.7, 0.8),))
FIG7_PE = PointingErrorParams(130.797, 0.390006)
BRANCH = CompositeProduct((WEAK, WEAK), (FIG7_PE, FIG7_PE))


def db(v):
    return 10.0 ** (v / 10.0)


class TestMcCdf:
    def test_limits(self):
        assert mc_cdf(MIXED_21, 1e4, 10**5, 3).value == 1.0
        assert mc_cdf(MIXED_21, 1e-9, 10**5, 3).value == 0.0

    def test_determinism_across_runs(self):
        a = mc_cdf(MIXED_21, 0.3, 10**6, 42)
        b = mc_cdf(MIXED_21, 0.3, 10**6, 42)
        assert a == b

    def test_chunking_invisible(self):
        # one full chunk vs a partial tail chunk share the leading stream
        big = mc_cdf(MIXED_21, 0.3, (1 << 19) + 1000, 7)
        assert big.streams == 2

    def test_matches_analytic_within_3_sigma(self):
        est = mc_cdf(MIXED_21, 0.3, 10**6, 11)
        assert est.within(z_cdf(MIXED_21, 0.3))

    def test_stderr_formula(self):
        est = mc_cdf(MIXED_21, 0.3, 10**5, 5)
        assert est.std_error == pytest.approx(
            math.sqrt(est.value * (1 - est.value) / est.n))

    def test_coverage_band(self):
        # binomial sanity: the analytic value sits inside 3 sigma for at
        # least 28 of 30 independent seeds
        ref = z_cdf(MIXED_21, 0.4)
        hits = sum(mc_cdf(MIXED_21, 0.4, 10**5, seed).within(ref)
                   for seed in range(30))
        assert hits >= 28

    def test_domain(self):
        with pytest.raises(DomainError):
            mc_cdf(MIXED_21, 0.3, 0, 1)


class TestMcParallel:
    def test_single_branch_equals_mc_cdf(self):
        r = db(25)
        t = math.sqrt(1.0 / r)
        a = mc_op_parallel(BRANCH, 1, r, 10**5, 9)
        b = mc_cdf(BRANCH, t, 10**5, 9)
        assert a.value == b.value

    def test_bound_dominates_simulation(self):
        for v in (25.0, 32.0, 40.0):
            est = mc_op_parallel(BRANCH, 2, db(v), 10**6, 17)
            bound = op_fso_parallel_bound(BRANCH, 2, db(v)).probability
            assert bound >= est.value - 3 * est.std_error

    def test_diversity_gain_with_branch_count(self):
        r = db(30)
        ops = [mc_op_parallel(BRANCH, n, r, 10**6, 23).value for n in (1, 2, 3)]
        assert ops[0] > ops[1] > ops[2] > 0


class TestMcThz:
    CH = CompositeProduct((GammaGammaParams(7.465009, 5.943215),
                           GammaGammaParams(4.155350, 2.195809)))

    def test_reduces_to_plain_threshold_without_distortion(self):
        r = db(20)
        a = mc_op_thz(self.CH, r, 2.0, 0.0, 0.0, 10**5, 31)
        b = mc_cdf(self.CH, math.sqrt(1.0 / r), 10**5, 31)
        assert a.value == b.value

    def test_ceiling_regime_estimates_one_exactly(self):
        est = mc_op_thz(self.CH, db(30), 10.0, 0.4, 0.4, 10**4, 2)
        assert est.value == 1.0

    def test_matches_analytic_with_distortion(self):
        r, g_th, kt, kr = db(18), 2.0, 0.25, 0.15
        est = mc_op_thz(self.CH, r, g_th, kt, kr, 10**6, 57)
        ana = op_thz(self.CH, r, g_th, kt, kr).probability
        assert est.within(ana)


class TestKs:
    def test_needs_samples(self):
        with pytest.raises(DomainError):
            ks_statistic(MIXED_21, np.array([1.0]))

    def test_detects_wrong_model(self):
        rng = np.random.default_rng(5)
        wrong = rng.lognormal(0.0, 1.0, 20000)
        assert ks_statistic(MIXED_21, wrong) > 0.05
