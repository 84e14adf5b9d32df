"""Tests for the truncated heavy-tail specialization.

Analytic oracle for the normalizing constant: int_R dx/(1+|x|^s) equals
2 (pi/s) / sin(pi/s).  The finite-n quadrature of the defining moment ratio
is the oracle for the closed-form A_k.
"""

import numpy as np
import pytest

from wishartlaw.errors import ParameterError
from wishartlaw import heavytail as ht
from wishartlaw import limitlaw as ll
from wishartlaw.treewords import table_provider

TABLES = table_provider()


def integral_oracle(beta):
    return 2 * (np.pi / beta) / np.sin(np.pi / beta)


class TestNormalizingConstant:
    def test_beta2_is_inv_pi(self):
        assert ht.c_beta(2.0) == pytest.approx(1 / np.pi, rel=1e-10)

    def test_beta3_closed_form(self):
        # int dx/(1+|x|^3) = 4 pi / (3 sqrt(3))
        assert ht.c_beta(3.0) == pytest.approx(3 * np.sqrt(3) / (4 * np.pi), rel=1e-10)

    @pytest.mark.parametrize("beta", [1.2, 1.5, 2.0, 2.5, 2.9])
    def test_against_analytic(self, beta):
        assert ht.c_beta(beta) == pytest.approx(1 / integral_oracle(beta), rel=1e-10)

    def test_positive_on_range(self):
        for beta in np.linspace(1.05, 2.95, 12):
            assert ht.c_beta(float(beta)) > 0

    def test_nonintegrable(self):
        with pytest.raises(ParameterError):
            ht.c_beta(1.0)


class TestParams:
    def test_validation(self):
        with pytest.raises(ParameterError):
            ht.HeavyTailParams(beta=3.5, B=1.0, alpha=1.0)
        with pytest.raises(ParameterError):
            ht.HeavyTailParams(beta=2.0, B=0.0, alpha=1.0)
        with pytest.raises(ParameterError):
            ht.HeavyTailParams(beta=2.0, B=1.0, alpha=-1.0)

    def test_cutoff_scale(self):
        p = ht.HeavyTailParams(beta=2.0, B=0.5, alpha=1.0)
        assert p.cutoff(10**4) == pytest.approx(0.5 * 10**4)


class TestHeavyA:
    @pytest.mark.parametrize("beta", [1.5, 2.0, 2.5])
    @pytest.mark.parametrize("b_scale", [0.3, 1.0, 2.0])
    def test_a2_exactly_one(self, beta, b_scale):
        p = ht.HeavyTailParams(beta=beta, B=b_scale, alpha=2.0)
        assert ht.heavy_A(p, 6)[2] == 1.0

    def test_odd_entries_vanish(self):
        p = ht.HeavyTailParams(beta=2.0, B=1.0, alpha=2.0)
        seq = ht.heavy_A(p, 9)
        assert all(seq[k] == 0.0 for k in (3, 5, 7, 9))

    @pytest.mark.parametrize("beta", [1.5, 2.0, 2.5])
    def test_b_scaling_exact(self, beta):
        base = ht.heavy_A(ht.HeavyTailParams(beta=beta, B=1.0, alpha=2.0), 10)
        scaled = ht.heavy_A(ht.HeavyTailParams(beta=beta, B=0.37, alpha=2.0), 10)
        for k in (4, 6, 8, 10):
            factor = 0.37 ** ((beta - 1.0) * (k / 2.0 - 1.0))
            assert scaled[k] == pytest.approx(base[k] * factor, rel=1e-13)

    def test_quadrature_oracle_spotcheck(self):
        p = ht.HeavyTailParams(beta=2.0, B=1.0, alpha=2.0)
        ratio = ht.finite_n_ratio(4, p, 10**6)
        assert ratio == pytest.approx(ht.heavy_A(p, 4)[4], rel=0.05)

    def test_total_mass_of_truncated_law(self):
        """M_0(P_n) = 1 validates the boundary-atom normalization."""
        for beta in (1.5, 2.0, 2.5):
            for n in (10, 10**4):
                p = ht.HeavyTailParams(beta=beta, B=1.0, alpha=2.0)
                assert ht.truncated_moment(0, p, n) == pytest.approx(1.0, rel=1e-10)
        tiny = ht.HeavyTailParams(beta=2.0, B=0.1, alpha=2.0)  # cutoff below 2
        assert ht.truncated_moment(0, tiny, 2) == pytest.approx(1.0, rel=1e-10)


class TestMoments:
    def test_first_moment(self):
        p = ht.HeavyTailParams(beta=2.0, B=1.0, alpha=2.5)
        assert ht.heavy_moments(p, 1, TABLES).moment(1) == pytest.approx(2.5)

    def test_k2_composition(self):
        p = ht.HeavyTailParams(beta=2.0, B=0.1, alpha=2.0)
        a4 = ht.heavy_A(p, 4)[4]
        expected = 2.0**2 + 2.0 + 2.0 * a4
        assert ht.heavy_moments(p, 2, TABLES).moment(2) == pytest.approx(expected, rel=1e-13)

    def test_small_b_recovers_mp(self):
        p = ht.HeavyTailParams(beta=2.0, B=1e-4, alpha=2.0)
        got = ht.heavy_moments(p, 5, TABLES).values
        mp = ll.mp_moments(2.0, 5).values
        assert np.max(np.abs(got - mp) / np.maximum(1.0, mp)) < 1e-3


class TestExpansionCheck:
    def test_k1_trivial(self):
        p = ht.HeavyTailParams(beta=1.5, B=0.2, alpha=2.0)
        chk = ht.expansion_check(p, 1, TABLES)
        assert chk.lhs == 0.0 and chk.rhs_theorem == 0.0 and chk.rhs_a4 == 0.0

    def test_k2_identity_exact(self):
        for beta in (1.5, 2.5):
            p = ht.HeavyTailParams(beta=beta, B=0.1, alpha=2.0)
            chk = ht.expansion_check(p, 2, TABLES)
            assert chk.lhs == pytest.approx(2.0 * ht.heavy_A(p, 4)[4], rel=1e-12)
            assert chk.rhs_a4 == pytest.approx(chk.lhs, rel=1e-12)

    def test_beta2_pole_flagged(self):
        p = ht.HeavyTailParams(beta=2.0, B=0.1, alpha=2.0)
        chk = ht.expansion_check(p, 4, TABLES)
        assert chk.beta_pole
        assert np.isnan(chk.rhs_theorem)
        assert np.isfinite(chk.rhs_a4)

    def test_b_halving_rate(self):
        """lhs shrinks like B^{beta-1} to first order."""
        beta = 2.5
        for k in (2, 3, 4):
            lhs_big = ht.expansion_check(
                ht.HeavyTailParams(beta=beta, B=0.1, alpha=2.0), k, TABLES
            ).lhs
            lhs_small = ht.expansion_check(
                ht.HeavyTailParams(beta=beta, B=0.05, alpha=2.0), k, TABLES
            ).lhs
            assert lhs_small / lhs_big == pytest.approx(2.0 ** -(beta - 1), rel=0.1)

    def test_theorem_coefficient_disagreement_is_reported(self):
        """The printed theorem coefficient and the A_4-implied one differ;
        both must be exposed rather than silently reconciled."""
        p = ht.HeavyTailParams(beta=1.5, B=0.01, alpha=2.0)
        chk = ht.expansion_check(p, 4, TABLES)
        assert chk.ratio_a4 == pytest.approx(1.0, abs=0.05)
        assert abs(chk.ratio_theorem - 1.0) > 0.2


class TestSampling:
    def test_support_bound(self):
        p = ht.HeavyTailParams(beta=2.0, B=1.0, alpha=2.0)
        draws = ht.sample_truncated(p, 100, 50_000, seed=1)
        assert np.max(np.abs(draws)) <= p.cutoff(100)

    def test_symmetry(self):
        p = ht.HeavyTailParams(beta=2.5, B=1.0, alpha=2.0)
        draws = ht.sample_truncated(p, 10**4, 10**6, seed=2)
        se = draws.std() / np.sqrt(len(draws))
        assert abs(draws.mean()) < 4 * se

    def test_deterministic(self):
        p = ht.HeavyTailParams(beta=1.5, B=0.5, alpha=2.0)
        a = ht.sample_truncated(p, 100, 1000, seed=3)
        b = ht.sample_truncated(p, 100, 1000, seed=3)
        assert np.array_equal(a, b)

    def test_core_distribution(self):
        """Fraction of draws in [-1, 1] matches the quadrature mass."""
        p = ht.HeavyTailParams(beta=2.0, B=1.0, alpha=2.0)
        draws = ht.sample_truncated(p, 10**4, 200_000, seed=4)
        frac = np.mean(np.abs(draws) <= 1.0)
        expected = 2 * ht.c_beta(2.0) * np.arctan(1.0)  # 2C int_0^1 dx/(1+x^2)
        assert frac == pytest.approx(expected, abs=4 * np.sqrt(0.25 / 200_000))

    @pytest.mark.slow
    def test_moment_ratio_against_quadrature(self):
        p = ht.HeavyTailParams(beta=2.0, B=1.0, alpha=2.0)
        n = 10**4
        draws = ht.sample_truncated(p, n, 10**7, seed=5)
        emp = np.mean(draws**4) / np.mean(draws**2) ** 2
        quad = ht.truncated_moment(4, p, n) / ht.truncated_moment(2, p, n) ** 2
        assert emp == pytest.approx(quad, rel=0.02)
