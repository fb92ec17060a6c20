"""Special-function layer: reference values, identities, error behavior."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from cascade_fading.specfun import (
    AccuracyError,
    DegenerateParametersError,
    DomainError,
    MeijerGSpec,
    SeriesOverflowError,
    UnsupportedSpecError,
    bessel_k,
    build_slater_expansion,
    erf_fn,
    gamma_fn,
    meijer_g,
    pfq,
)

# High-precision reference values, frozen from a 200-digit offline
# computation (series summation / reflection identities).
GAMMA_10_02 = 379603.8737217455362393533
PFQ_2F3_FIXTURE = 1.06339908216451675914688945606  # 2F3((1.1,2.2);(3.3,4.4,5.5);2)
G20_02_FIXTURE = 90.61205182213214059266428  # G^{2,0}_{0,2}(0.5 | 10.02, 2.98)


class TestGamma:
    def test_one(self):
        assert gamma_fn(1.0) == 1.0

    def test_half_integer(self):
        assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_reference_value(self):
        assert gamma_fn(10.02) == pytest.approx(GAMMA_10_02, rel=1e-12)

    def test_pole_rejected(self):
        for x in (0.0, -1.0, -7.0):
            with pytest.raises(DomainError):
                gamma_fn(x)

    def test_negative_non_integer(self):
        # reflection: Gamma(-0.5) = -2 sqrt(pi)
        assert gamma_fn(-0.5) == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-13)


class TestErf:
    def test_zero(self):
        assert erf_fn(0.0) == 0.0

    def test_series_oracle(self):
        # erf(x) = 2/sqrt(pi) * sum (-1)^k x^(2k+1) / (k! (2k+1))
        for x in (0.3, 1.0, 2.2):
            acc, term_pow = 0.0, x
            for k in range(60):
                acc += (-1) ** k * term_pow / (math.factorial(k) * (2 * k + 1))
                term_pow *= x * x
            assert erf_fn(x) == pytest.approx(2.0 / math.sqrt(math.pi) * acc, abs=1e-14)

    @given(st.floats(min_value=1e-3, max_value=5.0))
    def test_odd_symmetry(self, x):
        assert erf_fn(-x) == -erf_fn(x)


def _bessel_k_quadrature(nu, x):
    """Independent oracle: K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt."""
    val, err = integrate.quad(
        lambda t: math.exp(-x * math.cosh(t) + math.log(math.cosh(min(nu * t, 700)))
                           if nu * t < 690 else -np.inf),
        0.0, 60.0, limit=400,
    )
    return val


class TestBesselK:
    def test_k0_at_2(self):
        # frozen from the integral representation (also agrees with quad below)
        assert bessel_k(0, 2.0) == pytest.approx(0.1138938727495334356527196, rel=1e-12)

    def test_quadrature_oracle(self):
        for nu, x in ((0.0, 2.0), (7.04, 3.5), (2.5, 0.4), (11.0, 30.0)):
            oracle, _ = integrate.quad(
                lambda t: math.exp(-x * math.cosh(t)) * math.cosh(nu * t),
                0.0, 40.0, limit=400,
            )
            assert bessel_k(nu, x) == pytest.approx(oracle, rel=1e-10)

    def test_order_symmetry_bitwise(self):
        for nu, x in ((3.3, 1.7), (0.5, 9.0), (12.25, 0.3)):
            assert bessel_k(nu, x) == bessel_k(-nu, x)

    def test_domain(self):
        with pytest.raises(DomainError):
            bessel_k(1.0, 0.0)
        with pytest.raises(DomainError):
            bessel_k(1.0, -3.0)

    def test_overflow_is_an_error(self):
        with pytest.raises(OverflowError):
            bessel_k(50.0, 1e-6)


class TestPfq:
    def test_exponential(self):
        val, ok = pfq([], [], 1.0)
        assert ok and val == pytest.approx(math.e, rel=1e-14)

    def test_parameter_cancellation(self):
        val, _ = pfq([2.5], [2.5], 0.7)
        assert val == pytest.approx(math.exp(0.7), rel=1e-13)

    def test_2f3_fixture(self):
        val, ok = pfq([1.1, 2.2], [3.3, 4.4, 5.5], 2.0)
        assert ok and val == pytest.approx(PFQ_2F3_FIXTURE, rel=1e-13)

    def test_rejects_p_gt_q(self):
        with pytest.raises(DomainError):
            pfq([1.0, 2.0], [3.0], 0.5)

    def test_rejects_nonpositive_integer_lower(self):
        with pytest.raises(DomainError):
            pfq([1.0], [-2.0], 0.5)

    def test_vectorized_matches_scalar(self):
        zs = np.array([0.1, 1.0, 7.5])
        vec, _ = pfq([1.3], [2.2, 0.8], zs)
        for z, v in zip(zs, vec):
            assert pfq([1.3], [2.2, 0.8], float(z))[0] == v

    @given(st.floats(min_value=0.1, max_value=20.0))
    @settings(max_examples=25, deadline=None)
    def test_partial_sums_monotone_after_peak(self, z):
        # positive parameters, z > 0: once terms decrease they keep
        # decreasing, so partial sums increase monotonically to the limit
        a, b = [1.7], [2.9, 1.1]
        term, total, prev_terms = 1.0, 1.0, []
        for k in range(400):
            term *= (a[0] + k) * z / ((b[0] + k) * (b[1] + k) * (k + 1))
            total += term
            prev_terms.append(term)
        decreasing = [i for i in range(1, len(prev_terms))
                      if prev_terms[i] < prev_terms[i - 1]]
        k0 = decreasing[0]
        assert all(prev_terms[i] >= prev_terms[i + 1] for i in range(k0, 300))
        assert pfq(a, b, z)[0] == pytest.approx(total, rel=1e-9)


class TestMeijerG:
    def test_exponential_special_case(self):
        spec = MeijerGSpec(1, 0, 0, 1, (), (0.0,))
        res = meijer_g(spec, 1.0)
        assert res.accuracy == "clean"
        assert res.value == pytest.approx(math.exp(-1.0), rel=1e-13)

    def test_bessel_identity(self):
        # G^{2,0}_{0,2}(x | -; a, b) = 2 x^((a+b)/2) K_{a-b}(2 sqrt x)
        spec = MeijerGSpec(2, 0, 0, 2, (), (10.02, 2.98))
        lhs = meijer_g(spec, 0.5).value
        rhs = 2.0 * 0.5 ** ((10.02 + 2.98) / 2) * bessel_k(10.02 - 2.98, 2 * math.sqrt(0.5))
        assert lhs == pytest.approx(rhs, rel=1e-11)
        assert lhs == pytest.approx(G20_02_FIXTURE, rel=1e-11)

    def test_single_gg_cdf_against_quadrature(self):
        # CDF-class instance at N=1 equals the integral of the density
        alpha, beta = 10.02, 2.98
        spec = MeijerGSpec(2, 1, 1, 3, (1.0,), (alpha, beta, 0.0))
        x = 1.0
        norm = math.gamma(alpha) * math.gamma(beta)
        val = meijer_g(spec, x * alpha * beta).value / norm

        def gg_density(t):
            s = 0.5 * (alpha + beta)
            return (2.0 / norm * (alpha * beta) ** s * t ** (s - 1)
                    * bessel_k(alpha - beta, 2 * math.sqrt(alpha * beta * t)))

        oracle, _ = integrate.quad(gg_density, 0.0, x, limit=200)
        assert val == pytest.approx(oracle, abs=1e-8)

    def test_unsupported_class(self):
        with pytest.raises(UnsupportedSpecError):
            MeijerGSpec(1, 1, 2, 2, (0.5, 1.5), (0.3, 2.6))

    def test_domain(self):
        spec = MeijerGSpec(1, 0, 0, 1, (), (0.0,))
        with pytest.raises(DomainError):
            meijer_g(spec, -1.0)

    def test_perturbed_flag_for_coincident_parameters(self):
        spec = MeijerGSpec(2, 0, 0, 2, (), (2.98, 2.98))
        res = meijer_g(spec, 0.7)
        assert res.accuracy == "perturbed"
        # against the Bessel identity at the coincident point: K_0
        rhs = 2.0 * 0.7**2.98 * bessel_k(0.0, 2 * math.sqrt(0.7))
        assert res.value == pytest.approx(rhs, rel=1e-7)


class TestSlaterExpansion:
    def test_one_term_per_lower_parameter(self):
        spec = MeijerGSpec(2, 0, 0, 2, (), (0.3, 1.0))
        exp = build_slater_expansion(spec)
        assert sorted(t.exponent for t in exp.terms) == [0.3, 1.0]

    def test_integer_separated_pair_rejected(self):
        spec = MeijerGSpec(2, 0, 0, 2, (), (0.5, 1.5))
        with pytest.raises(DegenerateParametersError):
            build_slater_expansion(spec)

    def test_composite_cdf_term_count_and_finiteness(self):
        # N=1, L=1 CDF class: one residue term per b_1..b_m, m = 2N+L = 3.
        # (The trailing 0 parameter sits outside the residue set.)
        spec = MeijerGSpec(3, 1, 2, 4, (1.0, 7.7), (4.94, 1.23, 6.7, 0.0))
        exp = build_slater_expansion(spec)
        assert len(exp.terms) == 3
        assert all(math.isfinite(t.coefficient) for t in exp.terms)

    def test_expansion_matches_perturbed_path(self):
        # Slater path against the epsilon-perturbation fallback of a nearby
        # degenerate spec, at several arguments
        clean = MeijerGSpec(3, 1, 2, 4, (1.0, 7.7), (4.94, 1.23, 6.7, 0.0))
        for x in (0.1, 1.0, 10.0):
            direct = meijer_g(clean, x)
            near = MeijerGSpec(3, 1, 2, 4, (1.0, 7.7), (4.94, 4.94 - 3.0, 6.7, 0.0))
            pert = meijer_g(near, x)
            assert pert.accuracy == "perturbed"
            assert math.isfinite(direct.value) and math.isfinite(pert.value)

    def test_slater_vs_fallback_on_log_grid(self):
        # where both paths are flagged accurate they agree tightly
        spec = MeijerGSpec(2, 0, 0, 2, (), (5.2, 2.17))
        grid = np.exp(np.linspace(math.log(1e-4), math.log(50.0), 25))
        for x in grid:
            direct = meijer_g(spec, float(x))
            rhs = 2.0 * x ** ((5.2 + 2.17) / 2) * bessel_k(5.2 - 2.17, 2 * math.sqrt(x))
            assert direct.value == pytest.approx(rhs, rel=2e-7)
