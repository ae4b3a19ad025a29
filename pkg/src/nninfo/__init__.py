"""Typical information content and PAC-Bayes certificates for infinitely wide relu networks."""

__version__ = "0.1.0"

from .errors import (
    BadMagic,
    DomainError,
    InsufficientData,
    InvalidArgument,
    LabelOutOfRange,
    NNInfoError,
    NotPositiveDefinite,
    ResidualTooLarge,
    TruncatedFile,
    ZeroInputRow,
)
from .kernel import ArchSpec, arccos_step, kernel_matrix, normalize_inputs
from .linalg import CholeskyFactor, cholesky, inverse_from_cholesky, normalized_det_root, residual_check
from .orthant import (
    InfoEstimate,
    c1_bound,
    estimate_c0,
    info_upper_bound,
    info_upper_display,
    orthant_oracle,
    sign_flip_canonicalize,
)
from .pac_bayes import GeneralisationBound, realisable_bound, symmetry_info_bound
from .data import Dataset, RawImageSet, Variant, build_dataset, load_mnist, parse_idx_images, parse_idx_labels, synthetic_dataset
