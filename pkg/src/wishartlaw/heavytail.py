"""Truncated heavy-tailed entries: the law C(beta)/(1+|x|^beta) truncated at
+-B n^{1/(beta-1)}, its asymptotic sequence, limiting moments, and the
small-B expansion around Marchenko-Pastur.

The truncation point is B times the largest n-th quantile of the tail, the
unique scale at which the ratios M_k(P_n) / (n^{k/2-1} M_2(P_n)^{k/2}) have
finite nonzero limits.  Each boundary atom carries the one-sided tail mass
C int_Q^inf (1+x^beta)^{-1} dx, so P_n is a probability law by construction.

With T_j = 1/(j+1-beta) + 1/(beta-1), the closed form implemented here is

    A_k = (2C)^{1-k/2} * T_k / T_2^{k/2} * B^{(beta-1)(k/2-1)}   (k even),

and A_k = 0 for odd k by symmetry.  The T_j bracket is the sum of the
truncated-integral part 1/(j+1-beta) and the boundary-atom part 1/(beta-1);
both are positive, which the finite-n quadrature of the defining ratio
confirms directly (see ``finite_n_ratio``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import NumericError, ParameterError
from . import limitlaw
from .limitlaw import AsymptoticSequence, MomentVector
from .treewords import CountTable, table_provider


@dataclass(frozen=True)
class HeavyTailParams:
    """Tail exponent beta in (1,3), truncation scale B > 0, aspect ratio alpha."""

    beta: float
    B: float
    alpha: float

    def __post_init__(self):
        if not 1.0 < self.beta < 3.0:
            raise ParameterError(f"beta must lie in (1, 3), got {self.beta}")
        if not self.B > 0:
            raise ParameterError(f"B must be positive, got {self.B}")
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")

    def cutoff(self, n: int) -> float:
        """Truncation point B * n^{1/(beta-1)}."""
        return self.B * float(n) ** (1.0 / (self.beta - 1.0))


@lru_cache(maxsize=None)
def c_beta(beta: float) -> float:
    """Normalizing constant C(beta) = (int (1+|x|^beta)^{-1} dx)^{-1}.

    Computed by quadrature (core on [0,1] plus the u = 1/x transform of the
    tail, both smooth), relative error well under 1e-10.
    """
    beta = float(beta)
    if beta <= 1.0:
        raise ParameterError(f"(1+|x|^beta)^-1 is not integrable for beta={beta}")
    core, _ = quad(lambda x: 1.0 / (1.0 + x**beta), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
    tail, _ = quad(
        lambda u: u ** (beta - 2.0) / (1.0 + u**beta), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13
    )
    return 1.0 / (2.0 * (core + tail))


def _tail_bracket(j: int, beta: float) -> float:
    """T_j = 1/(j+1-beta) + 1/(beta-1), the asymptotic weight of the truncated
    j-th moment in units of 2C Q^{j+1-beta}."""
    denom = j + 1.0 - beta
    if abs(denom) < 1e-12:
        raise NumericError(f"moment index j={j} hits the pole j+1-beta=0 at beta={beta}")
    return 1.0 / denom + 1.0 / (beta - 1.0)


def heavy_A(p: HeavyTailParams, kmax: int) -> AsymptoticSequence:
    """Asymptotic sequence of the truncated heavy-tail family.

    Even entries follow the closed form in the module docstring (the k = 2
    entry collapses to exactly 1); odd entries vanish because P_n is
    symmetric.
    """
    if kmax < 2:
        raise ParameterError(f"kmax must be >= 2, got {kmax}")
    two_c = 2.0 * c_beta(p.beta)
    t2 = _tail_bracket(2, p.beta)
    values = np.zeros(kmax + 1)
    values[2] = 1.0
    for k in range(4, kmax + 1, 2):
        values[k] = (
            two_c ** (1.0 - k / 2.0)
            * _tail_bracket(k, p.beta)
            / t2 ** (k / 2.0)
            * p.B ** ((p.beta - 1.0) * (k / 2.0 - 1.0))
        )
    gamma = max(1.0, p.B ** ((p.beta - 1.0) / 2.0) / np.sqrt(two_c * t2))
    return AsymptoticSequence(values=values, gamma=gamma)


def heavy_moments(
    p: HeavyTailParams,
    kmax: int,
    tables: Callable[[int], CountTable] | None = None,
) -> MomentVector:
    """Moments of the limit law mu_{alpha,beta,B} via the universal formula."""
    tables = tables if tables is not None else table_provider()
    return limitlaw.limit_moments(heavy_A(p, 2 * kmax), p.alpha, kmax, tables)


# ---------------------------------------------------------------------------
# finite-n truncated moments (the quadrature oracle for the closed form)
# ---------------------------------------------------------------------------

def _power_integral(k: int, beta: float, lo: float, hi: float) -> float:
    """int_lo^hi x^k / (1 + x^beta) dx for lo >= 2, via the geometric
    expansion 1/(1+x^beta) = sum (-1)^j x^{-beta(j+1)}; converges like
    lo^{-beta j}."""
    total = 0.0
    for j in range(200):
        expo = k + 1.0 - beta * (j + 1.0)
        if abs(expo) < 1e-12:
            term = np.log(hi / lo)
        else:
            term = (hi**expo - lo**expo) / expo
        term *= (-1.0) ** j
        total += term
        if abs(term) < 1e-16 * max(1.0, abs(total)):
            break
    else:
        raise NumericError("tail expansion of the truncated moment did not converge")
    return total


def truncated_moment(k: int, p: HeavyTailParams, n: int) -> float:
    """Exact k-th moment of the truncated law P_n (zero for odd k).

    Continuous part by adaptive quadrature on [0, 2] plus the geometric tail
    expansion on [2, Q]; each boundary atom at +-Q carries the one-sided
    tail mass.
    """
    if k % 2 == 1:
        return 0.0
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    beta = p.beta
    q_cut = p.cutoff(n)
    c = c_beta(beta)
    split = 2.0
    if q_cut <= split:
        core, _ = quad(
            lambda x: x**k / (1.0 + x**beta), 0.0, q_cut, epsabs=1e-14, epsrel=1e-12
        )
        tail_part = 0.0
        atom_mass, _ = quad(
            lambda x: 1.0 / (1.0 + x**beta), q_cut, split, epsabs=1e-14, epsrel=1e-12
        )
        atom_mass += _power_integral(0, beta, split, np.inf)
    else:
        core, _ = quad(
            lambda x: x**k / (1.0 + x**beta), 0.0, split, epsabs=1e-14, epsrel=1e-12, limit=200
        )
        tail_part = _power_integral(k, beta, split, q_cut)
        atom_mass = _power_integral(0, beta, q_cut, np.inf)
    return 2.0 * c * (core + tail_part + atom_mass * q_cut**k)


def finite_n_ratio(k: int, p: HeavyTailParams, n: int) -> float:
    """The defining ratio M_k(P_n) / (n^{k/2-1} M_2(P_n)^{k/2}) at finite n;
    converges to A_k and serves as the independent oracle for heavy_A."""
    m_k = truncated_moment(k, p, n)
    m_2 = truncated_moment(2, p, n)
    return m_k / (float(n) ** (k / 2.0 - 1.0) * m_2 ** (k / 2.0))


# ---------------------------------------------------------------------------
# the small-B expansion of Theorem-level coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpansionCheck:
    """Both candidate first-order terms of M_k(mu_{alpha,beta,B}) - M_k(mu_alpha).

    ``lhs`` is the exact moment gap; ``rhs_theorem`` uses the printed
    coefficient B^{beta-1}/(2C) * (3-beta)^2/((2-beta)(5-beta)); ``rhs_a4``
    uses A_4 * a_k^(1), the first-order term implied directly by the moment
    formula.  The two disagree; both are reported and only the exact k = 2
    identity lhs = alpha * A_4 is asserted downstream.
    """

    k: int
    lhs: float
    rhs_theorem: float
    rhs_a4: float
    beta_pole: bool

    @property
    def ratio_theorem(self) -> float:
        return self.lhs / self.rhs_theorem if self.rhs_theorem else np.nan

    @property
    def ratio_a4(self) -> float:
        return self.lhs / self.rhs_a4 if self.rhs_a4 else np.nan


def expansion_check(
    p: HeavyTailParams,
    k: int,
    tables: Callable[[int], CountTable] | None = None,
) -> ExpansionCheck:
    """Compare the exact moment gap against both first-order candidates.

    At beta = 2 the printed coefficient has a pole; rhs_theorem is then NaN
    and ``beta_pole`` is set, while rhs_a4 stays finite.
    """
    if k < 1:
        raise ParameterError(f"moment index k must be >= 1, got {k}")
    tables = tables if tables is not None else table_provider()
    A = heavy_A(p, max(2 * k, 4))
    lhs = limitlaw.limit_moment_excess(A, p.alpha, k, tables)
    a1_k = limitlaw.perturb_coeff(k, p.alpha)
    rhs_a4 = A[4] * a1_k
    beta_pole = abs(p.beta - 2.0) < 1e-12
    if beta_pole:
        rhs_theorem = np.nan
    else:
        coeff = (3.0 - p.beta) ** 2 / ((2.0 - p.beta) * (5.0 - p.beta))
        rhs_theorem = p.B ** (p.beta - 1.0) / (2.0 * c_beta(p.beta)) * coeff * a1_k
    return ExpansionCheck(
        k=k, lhs=lhs, rhs_theorem=rhs_theorem, rhs_a4=rhs_a4, beta_pole=beta_pole
    )


# ---------------------------------------------------------------------------
# sampling from P_n
# ---------------------------------------------------------------------------

def sample_truncated(
    p: HeavyTailParams,
    n: int,
    count: int,
    seed: int | np.random.SeedSequence | np.random.Generator = 0,
) -> np.ndarray:
    """i.i.d. draws from the truncated law P_n.

    Draws from the untruncated law by rejection (uniform envelope on the
    core |x| <= 1, Pareto envelope on the tails, both exact) and clips at
    +-Q: clipping moves exactly the one-sided tail mass onto each boundary
    atom, which is the definition of P_n.
    """
    if n < 1 or count < 1:
        raise ParameterError("n and count must both be >= 1")
    beta, q_cut = p.beta, p.cutoff(n)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    # envelope: density C on [-1,1], Pareto C |x|^{-beta} outside; the core
    # carries weight (beta-1)/beta of the envelope mass.
    p_core = (beta - 1.0) / beta
    out = np.empty(count)
    filled = 0
    while filled < count:
        batch = max(1024, int(1.4 * (count - filled)))
        is_core = rng.random(batch) < p_core
        u = rng.random(batch)
        sign = np.where(rng.random(batch) < 0.5, -1.0, 1.0)
        with np.errstate(over="ignore"):
            # the u floor only affects draws far beyond any practical cutoff,
            # all of which clip to +-Q below
            mag = np.where(is_core, u, np.maximum(u, 1e-14) ** (-1.0 / (beta - 1.0)))
            mag_b = mag**beta
            # accept with prob 1/(1+x^beta) under the flat core envelope,
            # x^beta/(1+x^beta) under the Pareto tail envelope
            u_acc = rng.random(batch)
            accept = np.where(
                is_core, u_acc * (1.0 + mag_b) <= 1.0, u_acc * (1.0 + mag_b) <= mag_b
            )
        vals = (sign * mag)[accept]
        take = min(len(vals), count - filled)
        out[filled : filled + take] = vals[:take]
        filled += take
    return np.clip(out, -q_cut, q_cut)
