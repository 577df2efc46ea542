"""Spectrum simulation and exact verification for structured random matrices.

The package samples random matrices whose columns follow either a
block-independent model or a symmetric random tensor model, compares the
empirical spectral distribution of the sample covariance matrix against the
Marchenko-Pastur law (isotropic, variance-scaled, or anisotropic via the
Stieltjes fixed-point equation), and verifies variance bounds for quadratic
forms plus the exact binomial-coefficient combinatorics underpinning them.
"""

from .linalg import sample_covariance, eigvalsh, spectral_norm
from .mplaw import (
    MpLaw,
    SpectralMixture,
    mp_density,
    mp_cdf,
    stieltjes_anisotropic,
    density_from_stieltjes,
    ks_distance,
)
from .models import (
    EntryLaw,
    GaussianHermite,
    XorTriple,
    BasisVector,
    IidBlock,
    Iid,
    BlockIndependent,
    Tensor,
    SeedSpec,
    sample_block,
    tensor_column,
    build_matrix,
    empirical_covariance_of_column,
)
from .concentration import (
    QuadFormReport,
    NormStatistic,
    var_quadform_mc,
    bound_block,
    bound_tensor,
    decomposition_check,
    norm_statistic,
    yaskov_counterexample,
)
from . import combinatorics

__all__ = [
    "sample_covariance",
    "eigvalsh",
    "spectral_norm",
    "MpLaw",
    "SpectralMixture",
    "mp_density",
    "mp_cdf",
    "stieltjes_anisotropic",
    "density_from_stieltjes",
    "ks_distance",
    "EntryLaw",
    "GaussianHermite",
    "XorTriple",
    "BasisVector",
    "IidBlock",
    "Iid",
    "BlockIndependent",
    "Tensor",
    "SeedSpec",
    "sample_block",
    "tensor_column",
    "build_matrix",
    "empirical_covariance_of_column",
    "QuadFormReport",
    "NormStatistic",
    "var_quadform_mc",
    "bound_block",
    "bound_tensor",
    "decomposition_check",
    "norm_statistic",
    "yaskov_counterexample",
    "combinatorics",
]

__version__ = "0.1.0"
