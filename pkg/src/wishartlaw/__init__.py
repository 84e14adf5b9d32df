"""Limiting spectral laws of Wishart matrices with size-dependent entries.

Three mutually cross-validating routes to the same spectra: exact tree-word
enumeration (moment method), closed-form densities and Stieltjes transforms,
and Monte Carlo / population-dynamics simulation.
"""

from .bernoulli import (
    BernoulliParams,
    PopdynResult,
    bernoulli_A,
    bernoulli_moments,
    expansion_residual,
    popdyn_resolvent,
    popdyn_wishart_atom,
    popdyn_wishart_density,
    popdyn_wishart_stieltjes,
)
from .errors import GuardLimitError, MalformedWordError, NumericError, ParameterError
from .heavytail import (
    ExpansionCheck,
    HeavyTailParams,
    c_beta,
    expansion_check,
    finite_n_ratio,
    heavy_A,
    heavy_moments,
    sample_truncated,
    truncated_moment,
)
from .limitlaw import (
    AsymptoticSequence,
    DensityModel,
    MomentVector,
    delta2_sequence,
    limit_moments,
    mp_density,
    mp_model,
    mp_moments,
    mp_series_polys,
    mp_stieltjes,
    perturb_coeff,
    perturb_density,
    perturb_model,
    perturb_series,
    perturb_stieltjes,
    signed_quadrature,
    support_edges,
)
from .spectra import (
    HistogramResult,
    SpectralSample,
    VarianceDecay,
    empirical_moments,
    empirical_stieltjes,
    histogram,
    run_trials,
    sample_wishart_bernoulli,
    sample_wishart_heavy,
    variance_decay_test,
)
from .treewords import (
    CanonicalWord,
    CountTable,
    WordClassKey,
    canonicalize,
    classify,
    count_quadruple_words,
    count_table,
    enumerate_tree_words,
    table_provider,
)

__version__ = "0.1.0"
