"""Tests for the analytic core: series, densities, transforms, quadrature.

Independent oracles used here: Narayana numbers for the Marchenko-Pastur
moment polynomials, arcsine-moment algebra for the perturbation moments
(via quadrature), and high-precision mpmath evaluation for the Laurent
coefficients of the perturbation transform.
"""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wishartlaw.errors import NumericError, ParameterError
from wishartlaw import limitlaw as ll
from wishartlaw.bernoulli import bernoulli_A
from wishartlaw.treewords import table_provider

TABLES = table_provider()


def narayana_poly(k):
    """MP moment polynomial from the Narayana closed form, the independent
    combinatorial oracle: a_k = sum_r (1/k) C(k,r) C(k,r-1) alpha^r."""
    coeffs = [0] * (k + 1)
    for r in range(1, k + 1):
        coeffs[r] = math.comb(k, r) * math.comb(k, r - 1) // k
    return tuple(coeffs)


class TestMpSeries:
    def test_polys_match_narayana(self):
        a, _ = ll.mp_series_polys(10)
        for k in range(1, 11):
            assert ll.poly_trim(a[k]) == ll.poly_trim(narayana_poly(k))

    def test_alpha_one_catalan(self):
        assert list(ll.mp_moments(1.0, 5).values) == [1, 2, 5, 14, 42]

    def test_alpha_two(self):
        # the series recursion and the Narayana oracle both give 22 at k=3:
        # a_3 = alpha + 3 alpha^2 + alpha^3 = 2 + 12 + 8
        assert list(ll.mp_moments(2.0, 3).values) == [2, 6, 22]

    @given(alpha=st.floats(0.05, 20.0))
    @settings(max_examples=50)
    def test_first_moment_is_alpha(self, alpha):
        assert ll.mp_moments(alpha, 1).moment(1) == pytest.approx(alpha, rel=1e-12)

    def test_mp_equals_delta2_limit_moments(self):
        """Oracle triangle: enumeration route with A = delta_2 reproduces the
        series route exactly."""
        for alpha in (0.5, 1.0, 2.0, 4.0):
            via_table = ll.limit_moments(ll.delta2_sequence(12), alpha, 6, TABLES)
            via_series = ll.mp_moments(alpha, 6)
            assert np.allclose(via_table.values, via_series.values, rtol=0, atol=0)

    def test_limit_moments_requires_long_sequence(self):
        with pytest.raises(ParameterError):
            ll.limit_moments(ll.delta2_sequence(4), 1.0, 6, TABLES)

    def test_sequence_validates_a2(self):
        with pytest.raises(ParameterError):
            ll.AsymptoticSequence(values=np.array([0.0, 0.0, 1.5]), gamma=1.0)


class TestPerturbSeries:
    def test_seeds_vanish(self):
        a1, b1 = ll.perturb_series(6)
        assert ll.poly_trim(a1[0]) == ll.poly_trim(a1[1]) == (0,)
        assert ll.poly_trim(b1[0]) == ll.poly_trim(b1[1]) == (0,)

    def test_first_coefficients(self):
        a1, b1 = ll.perturb_series(4)
        assert ll.poly_trim(a1[2]) == (0, 1)  # alpha
        assert ll.poly_trim(b1[2]) == (1,)
        assert ll.poly_trim(a1[3]) == (0, 3, 3)

    def test_closed_form_consistency(self):
        """A1 = AB * q / (1 - q) with q = alpha (z A B)^2, checked as series
        in z with rational coefficients at fixed integer alpha."""
        kmax = 8
        for alpha in (1, 2, 5):
            a, b = ll.mp_series_polys(kmax)
            a_num = [ll.poly_eval(p, alpha) for p in a]
            b_num = [ll.poly_eval(p, alpha) for p in b]

            def smul(s, t):
                return [
                    sum(s[i] * t[n - i] for i in range(n + 1)) for n in range(kmax + 1)
                ]

            ab = smul(a_num, b_num)
            zab = [0.0] + ab[:-1]
            q = [alpha * v for v in smul(zab, zab)]
            geom = [0.0] * (kmax + 1)
            geom[0] = 1.0
            for n in range(1, kmax + 1):  # 1/(1-q) without the constant term of q
                geom[n] = sum(q[i] * geom[n - i] for i in range(1, n + 1))
            closed = smul(smul(ab, q), geom)
            a1, _ = ll.perturb_series(kmax)
            for k in range(kmax + 1):
                assert closed[k] == pytest.approx(ll.poly_eval(a1[k], alpha), rel=1e-12)


class TestDensities:
    def test_mp_density_value(self):
        assert ll.mp_density(2.0, 1.0) == pytest.approx(1 / (2 * np.pi), rel=1e-14)

    def test_mp_density_support(self):
        assert ll.mp_density(-0.5, 2.0) == 0.0
        assert ll.mp_density(9.0, 2.0) == 0.0
        assert ll.mp_density(1.0, 4.0) == 0.0  # left edge at alpha=4

    def test_mp_atom(self):
        assert ll.mp_model(0.25).atom0 == pytest.approx(0.75)
        assert ll.mp_model(2.0).atom0 == 0.0

    def test_perturb_density_value(self):
        assert ll.perturb_density(2.0, 1.0) == pytest.approx(-1 / (2 * np.pi), rel=1e-14)

    def test_perturb_density_outside(self):
        assert ll.perturb_density(-1.0, 1.0) == 0.0
        assert ll.perturb_density(4.5, 1.0) == 0.0

    def test_perturb_alpha1_closed_form(self):
        xs = np.linspace(0.1, 3.9, 25)
        expected = (xs**2 - 4 * xs + 2) / (2 * np.pi * np.sqrt(xs * (4 - xs)))
        assert np.allclose(ll.perturb_density(xs, 1.0), expected, atol=1e-12)


class TestStieltjes:
    def test_residual_on_random_points(self):
        rng = np.random.default_rng(1)
        z = rng.uniform(-3, 8, 20) + 1j * rng.uniform(0.01, 5, 20)
        for alpha in (0.5, 1.0, 2.0, 4.0):
            s = ll.mp_stieltjes(z, alpha)
            assert np.max(np.abs(z * s**2 - (alpha - z - 1) * s + 1)) < 1e-12
            assert np.all(s.imag > 0)

    def test_branch_positive_imaginary(self):
        rng = np.random.default_rng(2)
        z = rng.uniform(-3, 8, 50) + 1j * rng.uniform(1e-6, 5, 50)
        lo, hi = ll.support_edges(2.0)
        root = ll._sqrt_upper(z, lo, hi)
        assert np.all(root.imag > 0)

    def test_decay(self):
        assert ll.mp_stieltjes(500j, 2.0) == pytest.approx(-1 / 500j, rel=2e-2)

    def test_quadrature_cross_check(self):
        """S(z) against direct quadrature of 1/(x-z), including the atom."""
        for alpha in (0.5, 2.0):
            model = ll.mp_model(alpha)
            for z in (2 + 0.5j, -1 + 1j, 4 + 0.8j):
                direct = complex(
                    ll.signed_quadrature(lambda x: np.real(1 / (x - z)), model),
                    ll.signed_quadrature(lambda x: np.imag(1 / (x - z)), model),
                )
                direct += model.atom0 * (1 / (0 - z))
                assert ll.mp_stieltjes(z, alpha) == pytest.approx(direct, abs=1e-6)

    def test_domain_error(self):
        with pytest.raises(ParameterError):
            ll.mp_stieltjes(1.0 - 0.1j, 2.0)
        with pytest.raises(ParameterError):
            ll.perturb_stieltjes(np.array([1 + 1j, 1 - 1j]), 2.0)

    def test_perturb_decay_is_cubic(self):
        # mass-zero and mean-zero measure: S1 ~ -a_2^(1) / z^3
        for alpha in (1.0, 2.0):
            v50 = ll.perturb_stieltjes(50j, alpha)
            v100 = ll.perturb_stieltjes(100j, alpha)
            assert abs(v100) < 1e-4
            assert abs(v50 / v100) == pytest.approx(8.0, rel=0.15)

    def test_perturb_inversion(self):
        for alpha in (1.0, 2.0, 4.0):
            lo, hi = ll.support_edges(alpha)
            x = lo + (hi - lo) * np.linspace(0.1, 0.9, 10)
            recovered = np.imag(ll.perturb_stieltjes(x + 1e-6j, alpha)) / np.pi
            assert np.max(np.abs(recovered - ll.perturb_density(x, alpha))) < 1e-4

    @pytest.mark.parametrize("alpha", [1.0, 2.0])
    def test_laurent_coefficients(self, alpha):
        """Peel 1/z coefficients of S1 at high precision; they must equal the
        series coefficients a_k^(1) (identity S1(z) = -A1(1/z)/z)."""
        mpmath.mp.dps = 80
        root_alpha = mpmath.sqrt(alpha)
        lo, hi = (1 - root_alpha) ** 2, (1 + root_alpha) ** 2

        def s1(z):
            root = mpmath.sqrt((z - lo) * (z - hi))
            if mpmath.im(root) <= 0:
                root = -root
            num = z**2 - 2 * z * (alpha + 1) + alpha**2 + 1
            return -num / (2 * alpha * root) + (z - alpha - 1) / (2 * alpha)

        # at z = iR the nearest contamination of the k-th real part is
        # a_{k+2}^(1) / R^2, far below 1e-8 at this radius
        z = mpmath.mpc(0, 10**7)
        remainder = s1(z)
        a1, _ = ll.perturb_series(6)
        for k in range(2, 7):
            coeff = -remainder * z ** (k + 1)
            assert abs(float(coeff.real) - ll.poly_eval(a1[k], alpha)) < 1e-8
            remainder += ll.poly_eval(a1[k], alpha) / z ** (k + 1)


class TestQuadrature:
    def test_mp_mass(self):
        for alpha, expected in ((2.0, 1.0), (1.0, 1.0), (0.5, 0.5)):
            got = ll.signed_quadrature(lambda x: np.ones_like(x), ll.mp_model(alpha))
            assert got == pytest.approx(expected, abs=1e-10)

    def test_mp_mean(self):
        for alpha in (0.5, 1.0, 2.0, 4.0):
            got = ll.signed_quadrature(lambda x: x, ll.mp_model(alpha))
            assert got == pytest.approx(alpha, abs=1e-9)

    def test_mp_moments_match_series(self):
        for alpha in (1.0, 2.0, 4.0):
            model = ll.mp_model(alpha)
            series = ll.mp_moments(alpha, 10)
            for k in range(1, 11):
                got = ll.signed_quadrature(lambda x: x**k, model)
                assert got == pytest.approx(series.moment(k), rel=1e-8)

    def test_perturb_mass_zero(self):
        for alpha in (1.0, 2.0, 4.0):
            got = ll.signed_quadrature(lambda x: np.ones_like(x), ll.perturb_model(alpha))
            assert abs(got) < 1e-10

    def test_perturb_moments(self):
        for alpha in (1.0, 2.0, 4.0):
            model = ll.perturb_model(alpha)
            for k in range(1, 9):
                got = ll.signed_quadrature(lambda x: x**k, model)
                assert got == pytest.approx(ll.perturb_coeff(k, alpha), abs=1e-8)

    def test_generic_path_without_weight(self):
        """Without weight_smooth the quadrature falls back to density * jacobian."""
        alpha = 2.0
        base = ll.mp_model(alpha)
        generic = ll.DensityModel(
            support=base.support,
            atom0=base.atom0,
            evaluate=base.evaluate,
            stieltjes=base.stieltjes,
        )
        got = ll.signed_quadrature(lambda x: x, generic, order=512)
        assert got == pytest.approx(alpha, abs=1e-8)

    def test_non_finite_integrand(self):
        with pytest.raises(NumericError):
            ll.signed_quadrature(
                lambda x: np.full_like(x, np.nan), ll.mp_model(1.0)
            )


class TestCarlemanGrowth:
    @pytest.mark.parametrize(
        "A_factory",
        [
            lambda: ll.delta2_sequence(16),
            lambda: bernoulli_A(0.2, 16),
            lambda: bernoulli_A(25.0, 16),
        ],
    )
    def test_moment_growth_bound(self, A_factory):
        """M_k stays below k^{Ck} for a constant fitted on small k: the
        log-ratio log(M_k)/(k log k) must not keep climbing."""
        mv = ll.limit_moments(A_factory(), 4.0, 8, TABLES)
        ratios = [
            np.log(mv.moment(k)) / (k * np.log(k)) for k in range(2, 9)
        ]
        fitted = max(ratios[:3])
        assert all(r <= fitted + 0.35 for r in ratios)
        assert fitted < 4.0
