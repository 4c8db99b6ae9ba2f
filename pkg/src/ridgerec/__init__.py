"""Ridge recovery via sliced inverse regression and sliced average variance estimation.

Given point queries (x, f(x)) of a deterministic function, the package
estimates the low-dimensional subspace that captures all of f's variation
(its central subspace).  Two moment-based estimators are provided: SIR,
built from slice means of the inverse image x|y, and SAVE, built from slice
covariances.  Supporting machinery covers input standardization, response
slicing, eigendecomposition with deterministic conventions, built-in test
functions with known subspaces, Monte Carlo convergence studies, and a CLI
that emits machine-readable CSV/JSON artifacts.
"""

from ridgerec.core import (
    SampleSet,
    SdrEstimate,
    Subspace,
    SymmetricSpectrum,
    validate_sample_set,
)
from ridgerec.estimators import estimate, sir_matrix, save_matrix
from ridgerec.measures import (
    InputMeasure,
    Standardizer,
    derive_seed,
    draw,
    fit_standardizer,
    pushforward_direction,
    standardize,
)
from ridgerec.slicing import (
    SlicePartition,
    SliceStats,
    default_slice_count,
    partition_equal_count,
    partition_fixed,
    slice_stats,
)
from ridgerec.spectral import (
    GapProfile,
    decompose,
    gap_profile,
    orthonormal_basis,
    subspace_distance,
)
from ridgerec.testfns import generate_samples, get_test_function

__all__ = [
    "GapProfile",
    "InputMeasure",
    "SampleSet",
    "SdrEstimate",
    "SlicePartition",
    "SliceStats",
    "Standardizer",
    "Subspace",
    "SymmetricSpectrum",
    "decompose",
    "default_slice_count",
    "derive_seed",
    "draw",
    "estimate",
    "fit_standardizer",
    "gap_profile",
    "generate_samples",
    "get_test_function",
    "orthonormal_basis",
    "partition_equal_count",
    "partition_fixed",
    "pushforward_direction",
    "save_matrix",
    "sir_matrix",
    "slice_stats",
    "standardize",
    "subspace_distance",
    "validate_sample_set",
]

__version__ = "0.1.0"
