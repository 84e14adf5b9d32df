"""Monte Carlo ground truth: sample normalized Wishart matrices, diagonalize
them fully, and expose the empirical spectral measures.

Samples carry their generation parameters and seed; trials use per-trial
streams spawned from a single SeedSequence, so parallel execution is
reproducible and independent of scheduling.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .bernoulli import BernoulliParams
from .errors import NumericError, ParameterError
from .heavytail import HeavyTailParams, sample_truncated, truncated_moment
from .limitlaw import MomentVector, support_edges

#: Recorded in sample metadata: trial streams are PCG64 generators spawned
#: from numpy SeedSequence, a splittable construction.
RNG_LABEL = "pcg64-seedseq"

#: Relative tolerance for the positive-semidefiniteness check of eigensolves.
PSD_TOL = 1e-8

#: Dense symmetric eigensolves are cubic; this ceiling keeps one solve in
#: the minutes range on a desktop.
MAX_DENSE_N = 4000


@dataclass
class SpectralSample:
    """Eigenvalues of one simulated normalized Wishart matrix."""

    eigenvalues: np.ndarray
    n: int
    m: int
    model: BernoulliParams | HeavyTailParams
    seed: int
    rng: str = RNG_LABEL

    def __post_init__(self):
        eig = np.sort(np.asarray(self.eigenvalues, dtype=float))
        self.eigenvalues = eig
        if len(eig) != self.n:
            raise ParameterError(f"expected n={self.n} eigenvalues, got {len(eig)}")
        scale = max(1.0, float(eig[-1])) if len(eig) else 1.0
        if eig[0] < -PSD_TOL * scale:
            raise NumericError(
                f"Wishart sample is not PSD within tolerance: min eigenvalue {eig[0]:g}"
            )


@dataclass
class HistogramResult:
    """Unit-mass histogram of a spectral sample; out-of-range eigenvalues are
    accounted for in ``overflow`` rather than silently dropped."""

    centers: np.ndarray
    density: np.ndarray
    width: float
    overflow: float

    def mass(self) -> float:
        return float(np.sum(self.density) * self.width)


def _rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_dims(n: int, alpha: float) -> int:
    if n < 2:
        raise ParameterError(f"matrix size n must be >= 2, got {n}")
    if n > MAX_DENSE_N:
        raise ParameterError(
            f"n={n} exceeds the dense eigensolver ceiling {MAX_DENSE_N}"
        )
    m = int(round(alpha * n))
    if m < 1:
        raise ParameterError(f"m = round(alpha*n) = {m} must be >= 1")
    return m


def _bernoulli_entry_matrix(
    n: int, m: int, c: float, rng: np.random.Generator
) -> sp.csr_matrix:
    """Sparse 0/1 entry matrix with i.i.d. Bernoulli(c/n) entries."""
    row_counts = rng.binomial(m, c / n, size=n)
    rows = np.repeat(np.arange(n), row_counts)
    cols = (
        np.concatenate([rng.choice(m, size=k, replace=False) for k in row_counts])
        if row_counts.sum()
        else np.empty(0, dtype=int)
    )
    data = np.ones(len(rows))
    return sp.csr_matrix((data, (rows, cols)), shape=(n, m))


def bernoulli_wishart_matrix(n: int, p: BernoulliParams, seed=0) -> np.ndarray:
    """The dense normalized Wishart matrix of one Bernoulli trial.

    Uncentered: W = X X^T / c with 0/1 entries.  Centered: entries shifted by
    c/n and normalized by n M_2(P_n) with the exact M_2 = (c/n)(1 - c/n); the
    shift is applied as a rank-two correction of the sparse product.
    """
    m = _check_dims(n, p.alpha)
    if p.c >= n:
        raise ParameterError(f"edge intensity c={p.c} must be below n={n}")
    if p.c == 0:
        return np.zeros((n, n))
    rng = _rng_from(seed)
    x = _bernoulli_entry_matrix(n, m, p.c, rng)
    gram = np.asarray((x @ x.T).todense(), dtype=float)
    if not p.centered:
        return gram / p.c
    shift = p.c / n
    row_sums = np.asarray(x.sum(axis=1), dtype=float).ravel()
    gram -= shift * (row_sums[:, None] + row_sums[None, :])
    gram += shift**2 * m
    m2_exact = shift * (1.0 - shift)
    return gram / (n * m2_exact)


def sample_wishart_bernoulli(n: int, p: BernoulliParams, seed=0) -> SpectralSample:
    """Full spectrum of one Bernoulli(c/n) Wishart matrix."""
    w = bernoulli_wishart_matrix(n, p, seed)
    eig = np.linalg.eigvalsh(w)
    seed_label = seed if isinstance(seed, int) else -1
    return SpectralSample(
        eigenvalues=eig, n=n, m=_check_dims(n, p.alpha), model=p, seed=seed_label
    )


def heavy_wishart_matrix(n: int, p: HeavyTailParams, seed=0) -> np.ndarray:
    """Dense normalized Wishart matrix W = Y Y^T / (n M_2(P_n)) with truncated
    heavy-tailed entries."""
    m = _check_dims(n, p.alpha)
    rng = _rng_from(seed)
    y = sample_truncated(p, n, n * m, rng).reshape(n, m)
    m2 = truncated_moment(2, p, n)
    return (y @ y.T) / (n * m2)


def sample_wishart_heavy(n: int, p: HeavyTailParams, seed=0) -> SpectralSample:
    """Full spectrum of one truncated heavy-tail Wishart matrix."""
    w = heavy_wishart_matrix(n, p, seed)
    eig = np.linalg.eigvalsh(w)
    seed_label = seed if isinstance(seed, int) else -1
    return SpectralSample(
        eigenvalues=eig, n=n, m=_check_dims(n, p.alpha), model=p, seed=seed_label
    )


def empirical_moments(s: SpectralSample, kmax: int) -> MomentVector:
    """M_k = (1/n) sum lambda_i^k, the trace moments realized on eigenvalues."""
    if kmax < 1:
        raise ParameterError(f"kmax must be >= 1, got {kmax}")
    lam = s.eigenvalues
    values = np.array([np.mean(lam**k) for k in range(1, kmax + 1)])
    return MomentVector(alpha=s.model.alpha, values=values)


def empirical_stieltjes(s: SpectralSample, z: complex) -> complex:
    """(1/n) sum (lambda_i - z)^{-1} for Im z > 0."""
    z = complex(z)
    if z.imag <= 0:
        raise ParameterError("Stieltjes transforms are evaluated at Im z > 0 only")
    return complex(np.mean(1.0 / (s.eigenvalues - z)))


def histogram_of(
    values: np.ndarray, bins: int, value_range: tuple[float, float]
) -> HistogramResult:
    """Unit-mass density histogram with explicit overflow accounting."""
    if bins < 1:
        raise ParameterError(f"bins must be >= 1, got {bins}")
    lo, hi = value_range
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    total = len(values)
    width = (hi - lo) / bins
    inside = int(counts.sum())
    density = counts / (total * width)
    centers = (edges[:-1] + edges[1:]) / 2
    return HistogramResult(
        centers=centers, density=density, width=width, overflow=(total - inside) / total
    )


def default_range(alpha: float) -> tuple[float, float]:
    """Histogram default: [0, (1+sqrt(alpha))^2 + 1]."""
    return (0.0, support_edges(alpha)[1] + 1.0)


def histogram(
    s: SpectralSample, bins: int = 80, value_range: tuple[float, float] | None = None
) -> HistogramResult:
    if value_range is None:
        value_range = default_range(s.model.alpha)
    return histogram_of(s.eigenvalues, bins, value_range)


# ---------------------------------------------------------------------------
# trial running
# ---------------------------------------------------------------------------

def _sample_one(args):
    kind, n, params, ss = args
    sampler = sample_wishart_bernoulli if kind == "bernoulli" else sample_wishart_heavy
    return sampler(n, params, np.random.default_rng(ss))


def _limit_blas_threads():
    # one BLAS thread per worker so the pool does not oversubscribe the cores
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(1)
    except Exception:
        pass


def run_trials(
    n: int,
    params: BernoulliParams | HeavyTailParams,
    trials: int,
    seed: int = 0,
    workers: int | None = None,
) -> list[SpectralSample]:
    """Independent spectral samples with per-trial spawned seeds.

    Results are identical for any worker count: trial i always consumes the
    i-th spawned stream of SeedSequence(seed).
    """
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    kind = "bernoulli" if isinstance(params, BernoulliParams) else "heavy"
    streams = np.random.SeedSequence(seed).spawn(trials)
    jobs = [(kind, n, params, ss) for ss in streams]
    if workers is None:
        workers = min(os.cpu_count() or 1, trials)
    if workers <= 1:
        samples = [_sample_one(job) for job in jobs]
    else:
        import multiprocessing as mp

        with ProcessPoolExecutor(
            max_workers=workers,
            mp_context=mp.get_context("fork"),
            initializer=_limit_blas_threads,
        ) as pool:
            samples = list(pool.map(_sample_one, jobs))
    for i, s in enumerate(samples):
        s.seed = seed
        s.rng = f"{RNG_LABEL}-spawn{i}"
    return samples


@dataclass
class VarianceDecay:
    """Sample variance of an empirical moment across trials, per matrix size."""

    k: int
    points: list[tuple[int, float]]
    slope: float


def variance_decay_test(
    params: BernoulliParams | HeavyTailParams,
    n_list: Sequence[int],
    trials: int,
    k: int,
    seed: int = 0,
    workers: int | None = None,
) -> VarianceDecay:
    """Variance of M_k across independent trials for each n, with the fitted
    log-log slope (the in-probability convergence is an O(1/n) variance)."""
    if trials < 30:
        raise ParameterError(f"variance estimates need trials >= 30, got {trials}")
    points = []
    for i, n in enumerate(n_list):
        samples = run_trials(n, params, trials, seed=seed + i, workers=workers)
        moments = np.array([empirical_moments(s, k).moment(k) for s in samples])
        points.append((n, float(moments.var(ddof=1))))
    log_n = np.log([pt[0] for pt in points])
    log_v = np.log([max(pt[1], 1e-300) for pt in points])
    slope = float(np.polyfit(log_n, log_v, 1)[0])
    return VarianceDecay(k=k, points=points, slope=slope)


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def _model_dict(model) -> dict:
    if isinstance(model, BernoulliParams):
        return {
            "kind": "bernoulli",
            "alpha": model.alpha,
            "c": model.c,
            "centered": model.centered,
        }
    return {"kind": "heavy", "alpha": model.alpha, "beta": model.beta, "B": model.B}


def model_from_dict(data: dict):
    if data["kind"] == "bernoulli":
        return BernoulliParams(
            alpha=data["alpha"], c=data["c"], centered=data.get("centered", False)
        )
    return HeavyTailParams(beta=data["beta"], B=data["B"], alpha=data["alpha"])


def save_sample(s: SpectralSample, path_prefix: str) -> tuple[str, str]:
    """Persist eigenvalues as .npy with a JSON sidecar of the run metadata."""
    eig_path = path_prefix + ".npy"
    meta_path = path_prefix + ".json"
    np.save(eig_path, s.eigenvalues)
    meta = {
        "n": s.n,
        "m": s.m,
        "seed": s.seed,
        "rng": s.rng,
        "psd_tol": PSD_TOL,
        "model": _model_dict(s.model),
    }
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1)
    return eig_path, meta_path


def load_sample(path_prefix: str) -> SpectralSample:
    with open(path_prefix + ".json", "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    eig = np.load(path_prefix + ".npy")
    sample = SpectralSample(
        eigenvalues=eig,
        n=meta["n"],
        m=meta["m"],
        model=model_from_dict(meta["model"]),
        seed=meta["seed"],
        rng=meta.get("rng", RNG_LABEL),
    )
    return sample
