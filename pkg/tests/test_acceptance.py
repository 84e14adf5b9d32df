"""Acceptance suite: every criterion at its stated tolerance, one printed
pass/fail line each.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the lines as they
complete.  Criteria 7-9 are Monte Carlo at desk scale (several minutes);
they carry the ``slow`` marker but run by default.
"""

import numpy as np
import pytest

from wishartlaw import bernoulli as br
from wishartlaw import checks
from wishartlaw import limitlaw as ll
from wishartlaw import treewords as tw

WORKERS = 2


def report(criterion: int, result: checks.CheckResult) -> None:
    print(f"criterion {criterion:2d} {result.line()}", flush=True)
    assert result.passed, result.line()


def test_criterion_01_contour_oracle():
    """Exact alpha-polynomial equality, enumeration vs A = 1 + alpha z A B."""
    report(1, checks.check_contour_oracle(kmax=8))


def test_criterion_02_quadruple_oracle():
    """Exact equality of quadruple-edge counts and the perturbation series."""
    report(2, checks.check_quadruple_oracle(kmax=8))


def test_criterion_03_mass_and_moments():
    """Quadrature identities at alpha in {1, 2, 4}."""
    report(3, checks.check_mass_moment_identities(alphas=(1.0, 2.0, 4.0)))


def test_criterion_04_stieltjes_consistency():
    """Quadratic residual at random points; S1 inversion at bulk points."""
    report(4, checks.check_stieltjes_consistency(seed=0))


def test_criterion_05_bernoulli_k2():
    """M_2 = alpha^2 + alpha + alpha/c for five (alpha, c) pairs, to 1e-14."""
    report(5, checks.check_bernoulli_k2())


def test_criterion_06_inverse_c_rate():
    """residual(c=100)/residual(c=1000) in [5, 20] for k = 4, 6 at alpha=2."""
    report(6, checks.check_inverse_c_expansion(alpha=2.0, ks=(4, 6)))


@pytest.mark.slow
def test_criterion_07a_monte_carlo_moments():
    """Trial-mean M_k within 3 SE of the formula values, k <= 5."""
    report(
        7,
        checks.check_mc_moments(
            alpha=2.0, c=20.0, n=1500, trials=20, kmax=5, seed=2027, workers=WORKERS
        ),
    )


@pytest.mark.slow
def test_criterion_07b_figure_regime_histograms():
    """Pooled histograms at n=3000, c=20, alpha in {2, 4} vs the overlay."""
    report(
        7,
        checks.check_figure1(
            alphas=(2.0, 4.0), c=20.0, n=3000, trials=100, seed=777, workers=WORKERS
        ),
    )


@pytest.mark.slow
def test_criterion_08_popdyn_vs_simulation():
    """|m_popdyn - m_empirical| < 0.02 at 10 bulk points, pool 1e5, n=3000."""
    report(
        8,
        checks.check_popdyn_vs_simulation(
            alpha=2.0, c=20.0, n=3000, pool_size=100_000, sweeps=120, seed=31,
            points=10,
        ),
    )


@pytest.mark.slow
def test_criterion_09_variance_decay():
    """log-log slope of Var(M_2) over n in {200, 400, 800}, 50 trials."""
    report(
        9,
        checks.check_variance_decay(
            alpha=2.0, c=5.0, n_list=(200, 400, 800), trials=50, k=2, seed=5,
            workers=WORKERS,
        ),
    )


def test_criterion_10_heavy_tail():
    """Closed-form A_k vs finite-n quadrature, exact identities, small-B
    stabilization, and the reported theorem-coefficient comparison."""
    for result in checks.check_heavy_tail(alpha=2.0, betas=(1.5, 2.5), bs=(0.5, 1.0)):
        report(10, result)


def test_runtime_contract_criterion_1_and_2():
    """Criteria 1 and 2 must complete well inside the stated two minutes."""
    import time

    start = time.time()
    checks.check_contour_oracle(kmax=8)
    checks.check_quadruple_oracle(kmax=8)
    assert time.time() - start < 120.0


def test_bernoulli_moments_match_mp_plus_perturbation():
    """Theorem-level restatement: c (M_k(mu_{alpha,c}) - M_k(mu_alpha))
    converges to a_k^(1) for k <= 6."""
    tables = tw.table_provider()
    for k in range(1, 7):
        gaps = []
        for c in (10.0**3, 10.0**4):
            p = br.BernoulliParams(alpha=2.0, c=c)
            excess = ll.limit_moment_excess(br.bernoulli_A(c, 2 * k), 2.0, k, tables)
            gaps.append(abs(c * excess - ll.perturb_coeff(k, 2.0)))
        assert gaps[1] <= gaps[0] / 5 + 1e-12
