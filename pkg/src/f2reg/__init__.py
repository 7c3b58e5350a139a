"""f2reg: delta-regularity of functions on F2^n under affine restrictions."""

from ._kernels import BACKEND
from .f2core import (
    AffineSubspace,
    Mat2,
    Subspace,
    count_weight_t,
    direct_sum_check,
    enumerate_subspaces,
    invert,
    orthogonal,
    rref,
    transform_subspace,
)
from .restrict import (
    RegularityCertificate,
    certificate_verify,
    compose_linear,
    coset_sum_coefficient,
    fix_single_parity,
    restrict_affine,
    restrict_coords,
    restrict_via_transform,
)
from .regularize import (
    exact_regularity_number,
    greedy_regularize,
    min_certificate,
    parity_kill,
    partition_regularize,
    pigeonhole_step,
    regularize_bounded_degree,
    shrink_top_level,
)
from .scalars import Dyadic
from .spectrum import (
    FunctionTable,
    SparseSpectrum,
    Spectrum,
    degree,
    granularity_claim_check,
    inverse_wht,
    is_regular,
    level_split,
    tv_distance,
    wht,
)

__version__ = "0.1.0"
