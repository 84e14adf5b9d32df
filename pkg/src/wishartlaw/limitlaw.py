"""Analytic limit laws: universal moment formula, Marchenko-Pastur law, and
the first-order 1/c perturbation measure.

The module keeps two independent routes to the same numbers and exposes both:

* combinatorial: the moment formula summing count-table entries against an
  asymptotic sequence A (``limit_moments``);
* generating series: the coupled recursion a_{k+1} = alpha * sum a_p b_q,
  b_{k+1} = sum a_p b_q, equivalent to A = 1 + alpha z A B, B = 1 + z A B,
  whose coefficients are the Marchenko-Pastur moments, and the linear system
  A1 = alpha z A^2 B1 + alpha z^2 A^3 B^2 (with its B-counterpart) for the
  perturbation coefficients.

Series coefficients are exact integer-coefficient polynomials in alpha so the
cross-checks against enumeration are exact, not float-tolerant.

Stieltjes transforms use the square root branch with positive imaginary part
on the upper half-plane throughout; with the m(z) = int (x - z)^{-1} d mu
convention used here, densities are recovered as (1/pi) Im m(x + i0).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import NumericError, ParameterError
from .treewords import CountTable

IntPoly = tuple[int, ...]  # coefficients, index = power of alpha


# ---------------------------------------------------------------------------
# exact integer polynomials in alpha
# ---------------------------------------------------------------------------

def poly_add(p: IntPoly, q: IntPoly) -> IntPoly:
    n = max(len(p), len(q))
    return tuple(
        (p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)
    )


def poly_mul(p: IntPoly, q: IntPoly) -> IntPoly:
    out = [0] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if pi:
            for j, qj in enumerate(q):
                out[i + j] += pi * qj
    return tuple(out)


def poly_shift(p: IntPoly) -> IntPoly:
    """Multiply by alpha (shift all powers up by one)."""
    return (0,) + p


def poly_trim(p: IntPoly) -> IntPoly:
    n = len(p)
    while n > 1 and p[n - 1] == 0:
        n -= 1
    return tuple(p[:n])


def poly_eval(p: IntPoly, alpha: float) -> float:
    acc = 0.0
    for coeff in reversed(p):
        acc = acc * alpha + coeff
    return acc


def _series_product_coeff(s: Sequence[IntPoly], t: Sequence[IntPoly], n: int) -> IntPoly:
    acc: IntPoly = (0,)
    for i in range(n + 1):
        acc = poly_add(acc, poly_mul(s[i], t[n - i]))
    return acc


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticSequence:
    """The sequence A_k = lim M_k(P_n) / (n^{k/2-1} M_2(P_n)^{k/2}).

    ``values[k]`` holds A_k for 0 <= k <= kmax (indices 0 and 1 are unused
    and zero for centered entry laws); ``gamma`` is a growth constant with
    |A_k| <= C gamma^k.
    """

    values: np.ndarray
    gamma: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if not np.all(np.isfinite(vals)):
            raise ParameterError("asymptotic sequence contains non-finite values")
        if len(vals) >= 3 and vals[2] != 1.0:
            raise ParameterError(
                f"A_2 must equal 1 exactly (it is M_2/M_2), got {vals[2]!r}"
            )

    @property
    def kmax(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])


def delta2_sequence(kmax: int) -> AsymptoticSequence:
    """The sequence with A_2 = 1 and A_k = 0 otherwise (Marchenko-Pastur)."""
    values = np.zeros(max(kmax, 2) + 1)
    values[2] = 1.0
    return AsymptoticSequence(values=values, gamma=1.0)


@dataclass(frozen=True)
class MomentVector:
    """Moments M_1..M_kmax of a limit law at aspect ratio alpha."""

    alpha: float
    values: np.ndarray

    @property
    def kmax(self) -> int:
        return len(self.values)

    def moment(self, k: int) -> float:
        if not 1 <= k <= self.kmax:
            raise ParameterError(f"moment index {k} outside 1..{self.kmax}")
        return float(self.values[k - 1])


@dataclass(frozen=True)
class DensityModel:
    """An evaluable (possibly signed) density on [lo, hi] with an optional
    atom at zero and a Stieltjes evaluator.

    ``weight_smooth``, when given, is density(x) * sqrt((hi-x)(x-lo)) as a
    smooth function; quadrature uses it to absorb the endpoint singularity
    exactly.
    """

    support: tuple[float, float]
    atom0: float
    evaluate: Callable[[np.ndarray], np.ndarray]
    stieltjes: Callable[[complex], complex]
    weight_smooth: Callable[[np.ndarray], np.ndarray] | None = None


def support_edges(alpha: float) -> tuple[float, float]:
    """The bulk support [(1-sqrt(alpha))^2, (1+sqrt(alpha))^2]."""
    r = np.sqrt(alpha)
    return ((1.0 - r) ** 2, (1.0 + r) ** 2)


def _require_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > 0:
        raise ParameterError(f"aspect ratio alpha must be positive, got {alpha}")
    return alpha


# ---------------------------------------------------------------------------
# moment formula (combinatorial route)
# ---------------------------------------------------------------------------

def limit_moments(
    A: AsymptoticSequence,
    alpha: float,
    kmax: int,
    tables: Callable[[int], CountTable],
) -> MomentVector:
    """Moments of the limit law mu_{A,alpha} from exact count tables.

    M_k = sum_{a,l,b} alpha^l |W_k(a, a+1, l, b)| prod_i A_{b_i}; only even
    multiplicities occur in the tables, so odd A entries are never read.
    """
    alpha = _require_alpha(alpha)
    if kmax < 1:
        raise ParameterError(f"kmax must be >= 1, got {kmax}")
    if A.kmax < 2 * kmax:
        raise ParameterError(
            f"asymptotic sequence indexed to {A.kmax} but 2*kmax = {2 * kmax} is required"
        )
    out = np.empty(kmax)
    for k in range(1, kmax + 1):
        table = tables(k)
        m = 0.0
        for key, count in sorted(table.entries.items()):
            weight = count * alpha**key.l
            for bi in key.b:
                weight *= A[bi]
            m += weight
        out[k - 1] = m
    return MomentVector(alpha=alpha, values=out)


def limit_moment_excess(
    A: AsymptoticSequence,
    alpha: float,
    k: int,
    tables: Callable[[int], CountTable],
) -> float:
    """M_k(mu_{A,alpha}) - M_k(mu_alpha) summed directly over the classes with
    some multiplicity above 2, avoiding the cancellation of the subtraction.

    The b = (2,...,2) classes contribute exactly the Marchenko-Pastur moment
    (A_2 = 1), so they drop out identically.
    """
    alpha = _require_alpha(alpha)
    table = tables(k)
    all_two = (2,) * k
    excess = 0.0
    for key, count in sorted(table.entries.items()):
        if key.b == all_two:
            continue
        weight = count * alpha**key.l
        for bi in key.b:
            weight *= A[bi]
        excess += weight
    return excess


# ---------------------------------------------------------------------------
# generating series (independent route)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def mp_series_polys(kmax: int) -> tuple[tuple[IntPoly, ...], tuple[IntPoly, ...]]:
    """Coefficients a_k, b_k of A = 1 + alpha z A B and B = 1 + z A B as exact
    polynomials in alpha, for 0 <= k <= kmax."""
    a: list[IntPoly] = [(1,)]
    b: list[IntPoly] = [(1,)]
    for k in range(kmax):
        conv = _series_product_coeff(a, b, k)
        a.append(poly_trim(poly_shift(conv)))
        b.append(poly_trim(conv))
    return tuple(a), tuple(b)


@lru_cache(maxsize=None)
def perturb_series(kmax: int) -> tuple[tuple[IntPoly, ...], tuple[IntPoly, ...]]:
    """Coefficients a_k^(1), b_k^(1) of the perturbation series as exact
    polynomials in alpha, for 0 <= k <= kmax.

    Solved order by order from A1 = alpha z A^2 B1 + alpha z^2 A^3 B^2 and
    B1 = z A1 B^2 + z^2 A^2 B^3, seeded with vanishing orders 0 and 1.
    """
    if kmax < 2:
        raise ParameterError(f"perturbation series starts at k = 2, got kmax={kmax}")
    a, b = mp_series_polys(kmax)
    a2 = [_series_product_coeff(a, a, n) for n in range(kmax + 1)]
    a3 = [_series_product_coeff(a2, a, n) for n in range(kmax + 1)]
    b2 = [_series_product_coeff(b, b, n) for n in range(kmax + 1)]
    b3 = [_series_product_coeff(b2, b, n) for n in range(kmax + 1)]
    a1: list[IntPoly] = [(0,), (0,)]
    b1: list[IntPoly] = [(0,), (0,)]
    for k in range(2, kmax + 1):
        term_a = _series_product_coeff(a2, b1, k - 1)
        term_a = poly_add(term_a, _series_product_coeff(a3, b2, k - 2))
        a1.append(poly_trim(poly_shift(term_a)))
        term_b = _series_product_coeff(a1, b2, k - 1)
        term_b = poly_add(term_b, _series_product_coeff(a2, b3, k - 2))
        b1.append(poly_trim(term_b))
    return tuple(a1), tuple(b1)


def mp_moments(alpha: float, kmax: int) -> MomentVector:
    """Marchenko-Pastur moments a_1..a_kmax from the series recursion."""
    alpha = _require_alpha(alpha)
    a, _ = mp_series_polys(kmax)
    return MomentVector(
        alpha=alpha, values=np.array([poly_eval(a[k], alpha) for k in range(1, kmax + 1)])
    )


def perturb_coeff(k: int, alpha: float) -> float:
    """Numeric value of a_k^(1)(alpha), the k-th moment of the perturbation."""
    alpha = _require_alpha(alpha)
    if k < 0:
        raise ParameterError(f"k must be >= 0, got {k}")
    if k < 2:
        return 0.0
    a1, _ = perturb_series(k)
    return poly_eval(a1[k], alpha)


# ---------------------------------------------------------------------------
# densities and Stieltjes transforms
# ---------------------------------------------------------------------------

def _require_upper_half_plane(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ParameterError("Stieltjes transforms are evaluated at Im z > 0 only")
    return z


def _sqrt_upper(z, lo: float, hi: float):
    """sqrt((z-lo)(z-hi)) on the branch with positive imaginary part,
    realized as exp((log(z-lo) + log(z-hi))/2) with principal logs."""
    root = np.exp(0.5 * (np.log(z - lo) + np.log(z - hi)))
    return np.where(root.imag > 0, root, -root)


def mp_density(x, alpha: float):
    """Continuous Marchenko-Pastur density sqrt((b-x)(x-a)) / (2 pi x).

    Zero outside the open bulk (a, b); the atom max(0, 1 - alpha) at zero is
    reported separately on the DensityModel.
    """
    alpha = _require_alpha(alpha)
    lo, hi = support_edges(alpha)
    x = np.asarray(x, dtype=float)
    inside = (x > lo) & (x < hi)
    x_safe = np.where(inside, x, 1.0)
    dens = np.where(
        inside, np.sqrt(np.abs((hi - x_safe) * (x_safe - lo))) / (2 * np.pi * x_safe), 0.0
    )
    return dens if dens.ndim else float(dens)


def mp_stieltjes(z, alpha: float):
    """S(z) = (alpha - z - 1 + sqrt((z-b)(z-a))) / (2z) for Im z > 0."""
    alpha = _require_alpha(alpha)
    z = _require_upper_half_plane(z)
    lo, hi = support_edges(alpha)
    s = (alpha - z - 1 + _sqrt_upper(z, lo, hi)) / (2 * z)
    return s if s.ndim else complex(s)


def perturb_density(x, alpha: float):
    """Signed density of the first-order correction measure:
    (x^2 - 2x(alpha+1) + alpha^2 + 1) / (2 alpha pi sqrt((b-x)(x-a))) on (a, b).

    The 1/pi factor follows from Stieltjes inversion of the transform below
    and is pinned by the exact moment identity int x^2 dmu^(1) = alpha.
    """
    alpha = _require_alpha(alpha)
    lo, hi = support_edges(alpha)
    x = np.asarray(x, dtype=float)
    inside = (x > lo) & (x < hi)
    x_safe = np.where(inside, x, (lo + hi) / 2)
    num = x_safe**2 - 2 * x_safe * (alpha + 1) + alpha**2 + 1
    dens = np.where(
        inside,
        num / (2 * alpha * np.pi * np.sqrt(np.abs((hi - x_safe) * (x_safe - lo)))),
        0.0,
    )
    return dens if dens.ndim else float(dens)


def perturb_stieltjes(z, alpha: float):
    """S1(z) = -(z^2 - 2z(alpha+1) + alpha^2 + 1) / (2 alpha sqrt((z-b)(z-a)))
    + (z - alpha - 1) / (2 alpha), same branch as mp_stieltjes.

    Equals -A1(1/z)/z as a Laurent series at infinity, so (1/pi) Im S1(x+i0)
    recovers perturb_density.
    """
    alpha = _require_alpha(alpha)
    z = _require_upper_half_plane(z)
    lo, hi = support_edges(alpha)
    num = z**2 - 2 * z * (alpha + 1) + alpha**2 + 1
    s = -num / (2 * alpha * _sqrt_upper(z, lo, hi)) + (z - alpha - 1) / (2 * alpha)
    return s if s.ndim else complex(s)


def mp_model(alpha: float) -> DensityModel:
    """DensityModel for the Marchenko-Pastur law mu_alpha."""
    alpha = _require_alpha(alpha)
    lo, hi = support_edges(alpha)

    def weight_smooth(x):
        return (hi - x) * (x - lo) / (2 * np.pi * x)

    return DensityModel(
        support=(lo, hi),
        atom0=max(0.0, 1.0 - alpha),
        evaluate=lambda x: mp_density(x, alpha),
        stieltjes=lambda z: mp_stieltjes(z, alpha),
        weight_smooth=weight_smooth,
    )


def perturb_model(alpha: float) -> DensityModel:
    """DensityModel for the signed, mass-zero perturbation measure mu_alpha^(1)."""
    alpha = _require_alpha(alpha)
    lo, hi = support_edges(alpha)

    def weight_smooth(x):
        return (x**2 - 2 * x * (alpha + 1) + alpha**2 + 1) / (2 * alpha * np.pi)

    return DensityModel(
        support=(lo, hi),
        atom0=0.0,
        evaluate=lambda x: perturb_density(x, alpha),
        stieltjes=lambda z: perturb_stieltjes(z, alpha),
        weight_smooth=weight_smooth,
    )


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def signed_quadrature(
    f: Callable[[np.ndarray], np.ndarray],
    model: DensityModel,
    order: int = 256,
) -> float:
    """Integral of f against the continuous part of a DensityModel.

    Substitutes x = (lo+hi)/2 + (hi-lo)/2 * sin(theta), which turns the
    1/sqrt endpoint singularity into a smooth integrand, then applies
    fixed-order Gauss-Legendre in theta.  Atoms are not included.
    """
    lo, hi = model.support
    mid, rad = (lo + hi) / 2, (hi - lo) / 2
    nodes, weights = _gauss_legendre(order)
    theta = nodes * (np.pi / 2)
    x = mid + rad * np.sin(theta)
    fx = np.asarray(f(x), dtype=float)
    if model.weight_smooth is not None:
        integrand = fx * model.weight_smooth(x)
    else:
        integrand = fx * np.asarray(model.evaluate(x), dtype=float) * rad * np.cos(theta)
    if not np.all(np.isfinite(integrand)):
        raise NumericError("non-finite integrand values in signed_quadrature")
    return float(np.sum(weights * integrand) * (np.pi / 2))
