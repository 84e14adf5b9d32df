"""Bernoulli(c/n) Wishart matrices: the asymptotic sequence c^{1-k/2}, the
moments of mu_{alpha,c}, the 1/c expansion around Marchenko-Pastur, and the
population-dynamics solver for the resolvent of the local limit tree.

The local limit of the percolated complete bipartite graph is an alternating
two-type Galton-Watson tree.  Row vertices (density 1/(1+alpha) among all
vertices) have Poisson(alpha c) column children and column vertices have
Poisson(c) row children; the resolvent fixed point is sampled by population
dynamics and the spectral measure of the hermitized matrix is recovered as
the type mixture.  The pairing of Poisson rates with mixture weights is
pinned by the exact second moment of the symmetrized law,
M_2(mu'_c) = 2 alpha c / (1 + alpha), and cross-validated against direct
simulation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericError, ParameterError
from . import limitlaw
from .limitlaw import AsymptoticSequence, MomentVector
from .treewords import CountTable, table_provider


@dataclass(frozen=True)
class BernoulliParams:
    """Aspect ratio alpha = lim m/n, edge intensity c, and the choice between
    centered entries (P_n as stated) and raw 0/1 entries (the A_n variant);
    the two limits coincide.

    c = 0 is tolerated as the degenerate all-zero simulation model; the
    analytic operations require c > 0 and validate it themselves.
    """

    alpha: float
    c: float
    centered: bool = False

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if self.c < 0:
            raise ParameterError(f"c must be nonnegative, got {self.c}")


def _require_positive_c(c: float) -> float:
    if not c > 0:
        raise ParameterError(f"this operation requires c > 0, got {c}")
    return float(c)


def bernoulli_A(c: float, kmax: int) -> AsymptoticSequence:
    """A_k = c^{1 - k/2} for k >= 2 (A_2 = 1 automatically)."""
    c = _require_positive_c(c)
    values = np.zeros(max(kmax, 2) + 1)
    for k in range(2, len(values)):
        values[k] = c ** (1.0 - k / 2.0)
    values[2] = 1.0
    return AsymptoticSequence(values=values, gamma=max(1.0, c**-0.5))


def bernoulli_moments(
    p: BernoulliParams,
    kmax: int,
    tables: Callable[[int], CountTable] | None = None,
) -> MomentVector:
    """Moments of mu_{alpha,c} via the universal formula with A_k = c^{1-k/2}."""
    tables = tables if tables is not None else table_provider()
    return limitlaw.limit_moments(bernoulli_A(p.c, 2 * kmax), p.alpha, kmax, tables)


def expansion_residual(
    p: BernoulliParams,
    k: int,
    tables: Callable[[int], CountTable] | None = None,
) -> float:
    """c * (M_k(mu_{alpha,c}) - M_k(mu_alpha)) - a_k^(1)(alpha).

    Vanishes at rate O(1/c); identically zero for k <= 2 where the only
    excess class is the single quadruple edge.  The difference is summed
    directly over the above-quadratic multiplicity classes, so there is no
    cancellation error at large c.
    """
    tables = tables if tables is not None else table_provider()
    A = bernoulli_A(p.c, 2 * k)
    excess = limitlaw.limit_moment_excess(A, p.alpha, k, tables)
    return p.c * excess - limitlaw.perturb_coeff(k, p.alpha)


# ---------------------------------------------------------------------------
# population dynamics
# ---------------------------------------------------------------------------

@dataclass
class PopdynResult:
    """Mixture estimate of a Stieltjes transform with its run diagnostics."""

    value: complex
    z: complex
    pool_size: int
    sweeps: int
    seed: int
    residual: float
    converged: bool
    stderr: float

    def __complex__(self) -> complex:
        return self.value


def _poisson_resample(
    rng: np.random.Generator, rate: float, source: np.ndarray, z: complex
) -> np.ndarray:
    """One synchronous sweep for one pool: every entry is replaced by
    -(z + sum of N resamples from the other pool)^{-1}, N ~ Poisson(rate)."""
    size = len(source)
    counts = rng.poisson(rate, size)
    total = int(counts.sum())
    picks = source[rng.integers(0, size, total)]
    ids = np.repeat(np.arange(size), counts)
    sums = np.bincount(ids, weights=picks.real, minlength=size) + 1j * np.bincount(
        ids, weights=picks.imag, minlength=size
    )
    return -1.0 / (z + sums)


def popdyn_resolvent(
    p: BernoulliParams,
    z: complex,
    pool_size: int = 100_000,
    sweeps: int = 200,
    seed: int = 0,
    damping: float = 0.5,
    convergence_tol: float = 0.01,
) -> PopdynResult:
    """Stieltjes transform m_{mu'_c}(z) of the symmetrized limit law by
    population dynamics on the two-type resolvent recursion.

    Both pools start at -1/z (exact for c = 0).  Each sweep updates both
    pools synchronously from the previous sweep's frozen values; the mixture
    estimate (1/(1+alpha)) E[X_row] + (alpha/(1+alpha)) E[X_col] is damped
    across sweeps.  Deterministic for a fixed seed.
    """
    z = complex(z)
    if z.imag <= 0:
        raise ParameterError("population dynamics requires Im z > 0")
    if pool_size < 1000:
        raise ParameterError(f"pool_size must be >= 1000, got {pool_size}")
    if sweeps < 1:
        raise ParameterError(f"sweeps must be >= 1, got {sweeps}")
    alpha, c = p.alpha, p.c
    rng = np.random.default_rng(seed)
    x_row = np.full(pool_size, -1.0 / z, dtype=complex)
    x_col = np.full(pool_size, -1.0 / z, dtype=complex)
    estimate = None
    tail: list[complex] = []
    tail_len = max(5, sweeps // 4)
    for sweep in range(sweeps):
        new_row = _poisson_resample(rng, alpha * c, x_col, z)
        new_col = _poisson_resample(rng, c, x_row, z)
        x_row, x_col = new_row, new_col
        if not (np.all(x_row.imag > 0) and np.all(x_col.imag > 0)):
            raise NumericError("population pool left the upper half-plane")
        mixture = (x_row.mean() + alpha * x_col.mean()) / (1.0 + alpha)
        estimate = mixture if estimate is None else damping * estimate + (1 - damping) * mixture
        tail.append(mixture)
        if len(tail) > tail_len:
            tail.pop(0)
    tail_arr = np.array(tail)
    residual = float(np.max(np.abs(tail_arr - tail_arr.mean()))) if len(tail) > 1 else 0.0
    stderr = float(
        np.sqrt(
            (x_row.real.var() + x_row.imag.var() + alpha**2 * (x_col.real.var() + x_col.imag.var()))
        )
        / ((1 + alpha) * np.sqrt(pool_size))
    )
    return PopdynResult(
        value=complex(estimate),
        z=z,
        pool_size=pool_size,
        sweeps=sweeps,
        seed=seed,
        residual=residual,
        converged=residual <= convergence_tol,
        stderr=stderr,
    )


def _to_symmetrized_argument(c: float, z: complex) -> complex:
    """w = sqrt(c z) on the upper half-plane branch."""
    w = np.sqrt(complex(c) * complex(z))
    return w if w.imag > 0 else -w


def popdyn_wishart_stieltjes(p: BernoulliParams, z: complex, **popdyn_kwargs) -> PopdynResult:
    """Stieltjes transform of mu_{alpha,c} itself (the Wishart side).

    Eigenvalues of A A^T / c are h^2 / c for h in the hermitized spectrum, and
    the (n+m)-point symmetrized law carries |1-alpha|/(1+alpha) extra mass at
    zero, so  m_W(z) = (c / 2w) [ (1+alpha) m'(w) + (alpha-1)/w ],
    w = sqrt(c z).
    """
    z = complex(z)
    if z.imag <= 0:
        raise ParameterError("Stieltjes transforms are evaluated at Im z > 0 only")
    _require_positive_c(p.c)
    w = _to_symmetrized_argument(p.c, z)
    res = popdyn_resolvent(p, w, **popdyn_kwargs)
    value = (p.c / (2 * w)) * ((1 + p.alpha) * res.value + (p.alpha - 1) / w)
    return PopdynResult(
        value=value,
        z=z,
        pool_size=res.pool_size,
        sweeps=res.sweeps,
        seed=res.seed,
        residual=res.residual,
        converged=res.converged,
        stderr=abs(p.c / (2 * w)) * (1 + p.alpha) * res.stderr,
    )


def popdyn_wishart_density(
    p: BernoulliParams,
    x: float,
    epsilon: float | None = None,
    **popdyn_kwargs,
) -> PopdynResult:
    """Continuous density of mu_{alpha,c} at x > 0 reconstructed from the
    symmetrized law: with g(t) = (1/pi) Im m'(t + i eps),

        density(x) = (1+alpha)/2 * sqrt(c/x) * g(sqrt(c x)).

    The (1+alpha)/2 factor converts the (n+m)-point hermitized normalization
    back to the n-point Wishart one; it is pinned by the total-mass check and
    the Marchenko-Pastur limit.  The atom at zero is not included (see
    popdyn_wishart_atom).  eps defaults to 0.05/sqrt(c), a bias/noise
    heuristic with no sharper guidance available.
    """
    if not x > 0:
        raise ParameterError(f"density reconstruction requires x > 0, got {x}")
    _require_positive_c(p.c)
    eps = 0.05 / np.sqrt(p.c) if epsilon is None else float(epsilon)
    if not eps > 0:
        raise ParameterError(f"epsilon must be positive, got {eps}")
    t = float(np.sqrt(p.c * x))
    res = popdyn_resolvent(p, t + 1j * eps, **popdyn_kwargs)
    scale = (1 + p.alpha) / 2.0 * np.sqrt(p.c / x) / np.pi
    return PopdynResult(
        value=scale * res.value.imag,
        z=t + 1j * eps,
        pool_size=res.pool_size,
        sweeps=res.sweeps,
        seed=res.seed,
        residual=res.residual,
        converged=res.converged,
        stderr=scale * res.stderr,
    )


def popdyn_wishart_atom(
    p: BernoulliParams, epsilon: float = 1e-3, **popdyn_kwargs
) -> float:
    """Estimate of the mu_{alpha,c} atom at zero from eps * Im m'(i eps).

    The symmetrized law carries atom mass mu'({0}); mapping eigenvalue counts
    back to the Wishart side gives W({0}) = ((1+alpha) mu'({0}) - (alpha-1))/2,
    clipped at zero.
    """
    res = popdyn_resolvent(p, 1j * epsilon, **popdyn_kwargs)
    sym_atom = epsilon * res.value.imag
    return max(0.0, ((1 + p.alpha) * sym_atom - (p.alpha - 1)) / 2.0)
