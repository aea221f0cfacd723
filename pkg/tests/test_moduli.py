"""Moduli of continuity: allowability, derived scales, divergence integrals.

Expected values marked "oracle" were computed with tools/oracles.py
(mpmath, 50 digits) independently of the implementation.
"""

import math

import numpy as np
import pytest

from gmtcover.errors import DomainRangeError, PreconditionError
from gmtcover.moduli import (
    CallableModulus,
    IterLogModulus,
    PowerModulus,
    check_allowable,
    classify_divergence,
    divergence_integral_psi,
    divergence_integral_u,
    iterated_log,
    modulus_from_spec,
)


class TestIteratedLog:
    def test_basic_values(self):
        assert iterated_log(1, math.e) == pytest.approx(1.0)
        assert iterated_log(2, math.e**math.e) == pytest.approx(1.0)
        assert iterated_log(3, math.exp(math.e**math.e)) == pytest.approx(1.0)

    def test_domain_violation(self):
        with pytest.raises(DomainRangeError):
            iterated_log(2, 1.0)  # log(log(1)) = log(0)


class TestPowerModulus:
    def test_alpha_is_gamma_t(self):
        m = PowerModulus(C=1, gamma=0.5, t0=0.5, beta=2)
        t = np.geomspace(1e-12, 0.5, 40)
        assert np.allclose(m.alpha(t) / t, 0.5, rtol=1e-12)

    def test_alpha_identity_case(self):
        m = PowerModulus(C=1, gamma=1.0, t0=0.5, beta=2.1)
        assert m.alpha(0.25) == pytest.approx(0.25, rel=1e-12)

    def test_lambda_constant(self):
        m = PowerModulus(C=1, gamma=0.5, t0=0.5, beta=2)
        assert m.lam(1) == pytest.approx(2.0, rel=1e-12)
        assert m.lam(30) == pytest.approx(2.0, rel=1e-12)

    def test_round_trip(self):
        m = PowerModulus(C=2.0, gamma=0.7)
        t = np.geomspace(1e-9, m.t0, 50)
        assert np.allclose(m.psi(m.psi_inv(t)), t, rtol=1e-9)

    def test_allowable_gamma_half(self):
        # power law with gamma=1/2 passes all three conditions
        m = PowerModulus(C=1, gamma=0.5, t0=0.5, beta=2)
        rep = check_allowable(m, 64)
        assert rep.passed
        assert [e["condition"] for e in rep.to_json()] == [
            "inverse_ratio_decreasing",
            "sqrt_log_comparison",
            "log_slope_monotone",
        ]

    def test_identity_passes_pseudomonotone(self):
        # gamma=1: the derivative-ratio quantity is constant, which the
        # pseudomonotone relaxation admits
        m = PowerModulus(C=1, gamma=1.0, t0=0.5, beta=2.1)
        assert check_allowable(m, 64).passed

    def test_alpha_out_of_range(self):
        m = PowerModulus(C=1, gamma=0.5, t0=0.5, beta=2)
        with pytest.raises(DomainRangeError):
            m.alpha(0.9)

    def test_grid_too_small(self):
        m = PowerModulus()
        with pytest.raises(PreconditionError):
            check_allowable(m, 8)


class TestIterLogModulus:
    def test_minimal_cl(self):
        m = IterLogModulus(l=2, s=1)
        assert m.Cl == pytest.approx(2 * math.e**math.e, rel=1e-12)
        assert iterated_log(2, m.Cl / 2) >= 1.0 - 1e-12

    def test_allowable_on_default_range(self):
        m = IterLogModulus(l=2, s=1, C=1, n=2)
        rep = check_allowable(m, 48, eps=1e-8)
        assert rep.passed

    def test_round_trip(self):
        # u(t) sits far below t for this family; stay where u(t) >= 1e-300
        m = IterLogModulus(l=2, s=1)
        t = np.geomspace(1e-4, m.t0, 30)
        assert np.allclose(m.psi(m.psi_inv(t)), t, rtol=1e-9)

    def test_alpha_lambda_oracle(self):
        # oracle: tools/oracles.py (mpmath, 50 digits)
        m = IterLogModulus(l=2, s=1, C=1, n=2)
        assert m.alpha(2.0**-20) == pytest.approx(4.0957693939168475e-9, rel=1e-10)
        assert m.lam(20) == pytest.approx(232.84375283009684, rel=1e-10)
        assert m.lam(21) == pytest.approx(247.69495016238351, rel=1e-10)
        assert m.lam(21) >= m.lam(20)

    def test_lambda_increasing_from_base(self):
        for spec in ("iterlog:2,1", "iterlog:3,1", "power:1,0.5"):
            m = modulus_from_spec(spec)
            m.assert_lambda_increasing()

    def test_t0_range_guard(self):
        with pytest.raises(DomainRangeError):
            IterLogModulus(l=2, s=2, t0=0.4)


class TestDivergenceIntegrals:
    def test_psi_closed_form_power(self):
        # psi = t^(1/2), n=2: integrand is exactly gamma^2/t
        m = PowerModulus(C=1, gamma=0.5, t0=0.5, beta=2)
        val = divergence_integral_psi(m, math.exp(-10), math.exp(-1), 2)
        assert val == pytest.approx(0.25 * 9, rel=1e-6)

    def test_psi_closed_form_identity(self):
        m = PowerModulus(C=1, gamma=1.0, t0=0.5, beta=2.1)
        for k in (5, 12, 20):
            val = divergence_integral_psi(m, math.exp(-k), math.exp(-1), 2)
            assert val == pytest.approx(k - 1, rel=1e-6)

    def test_u_closed_form(self):
        # u/u' = gamma t: integrand gamma^(n-1)/t
        m = PowerModulus(C=1, gamma=0.5, t0=0.5, beta=2)
        val = divergence_integral_u(m, math.exp(-9), math.exp(-1), 2)
        assert val == pytest.approx(0.5 * 8, rel=1e-6)
        val3 = divergence_integral_u(m, math.exp(-9), math.exp(-1), 3)
        assert val3 == pytest.approx(0.25 * 8, rel=1e-6)

    def test_psi22_truncations_bounded(self):
        # oracle: tools/oracles.py; the tail converges
        m = IterLogModulus(l=2, s=2, C=1, n=2)
        expected = [0.221657379764, 0.328101125971, 0.369960159999, 0.393866498937]
        vals = [divergence_integral_psi(m, None, 0.01, 2, s_eps=s1) for s1 in (10, 20, 30, 40)]
        assert vals == pytest.approx(expected, rel=1e-6)
        increments = np.diff(vals)
        assert np.all(increments[1:] < increments[:-1])

    def test_matched_rates_iterlog21(self):
        # both truncated integrals grow without bound at comparable rates
        m = IterLogModulus(l=2, s=1, C=1, n=2)
        upper = m.t0
        ratios = []
        vals_psi, vals_u = [], []
        for s1 in (2.0**8, 2.0**11, 2.0**14):
            vp = divergence_integral_psi(m, None, upper, 2, s_eps=s1)
            vu = divergence_integral_u(m, None, upper, 2, s_eps=s1)
            vals_psi.append(vp)
            vals_u.append(vu)
            ratios.append(vp / vu)
        assert all(np.diff(vals_psi) > 0) and all(np.diff(vals_u) > 0)
        assert all(1.0 / 25 <= r <= 25 for r in ratios)

    def test_bad_bounds(self):
        m = PowerModulus()
        with pytest.raises(DomainRangeError):
            divergence_integral_psi(m, 0.5, 0.1, 2)


class TestClassification:
    @pytest.mark.parametrize(
        "spec,expected",
        [
            ("power:1,0.25", "divergent"),
            ("power:1,0.5", "divergent"),
            ("power:1,1", "divergent"),
            ("iterlog:2,1", "divergent"),
            ("iterlog:2,0.5", "divergent"),
            ("iterlog:2,2", "convergent"),
            ("iterlog:3,1", "divergent"),
            ("iterlog:3,2", "convergent"),
        ],
    )
    def test_known_families(self, spec, expected):
        m = modulus_from_spec(spec)
        assert classify_divergence(m, 2) == expected

    def test_dimension_three(self):
        assert classify_divergence(modulus_from_spec("power:1,0.5", n=3), 3) == "divergent"
        assert classify_divergence(modulus_from_spec("iterlog:2,2", n=3), 3) == "convergent"


class TestCallableModulus:
    def test_wraps_power(self):
        m = CallableModulus(lambda t: np.sqrt(t), t0=0.5, beta=2.0, n=2, label="sqrt")
        t = np.geomspace(1e-6, 0.4, 20)
        assert np.allclose(m.psi_inv(t), t**2, rtol=1e-7)
        assert np.allclose(m.psi_inv_deriv(t), 2 * t, rtol=1e-5)
        assert check_allowable(m, 32, eps=1e-5).passed

    def test_no_analytic_classification_falls_back(self):
        m = CallableModulus(lambda t: np.sqrt(t), t0=0.5, beta=2.0, n=2, label="sqrt")
        assert classify_divergence(m, 2) in ("divergent", "undecided")


class TestSpecParser:
    def test_power_spec(self):
        m = modulus_from_spec("power:2,0.7")
        assert (m.C, m.gamma) == (2.0, 0.7)

    def test_iterlog_defaults(self):
        m = modulus_from_spec("iterlog:2,1")
        assert (m.l, m.s_param, m.C) == (2, 1.0, 1.0)

    def test_bad_spec(self):
        from gmtcover.errors import ConfigError

        with pytest.raises(ConfigError):
            modulus_from_spec("nope:1")
