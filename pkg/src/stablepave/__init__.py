"""Paving bounds for multi-affine real stable polynomials and strongly
Rayleigh point processes, verified against brute-force oracles at desk
scale."""

from ._kernels import NUMBA_ENABLED
from .multiaffine import MultiAffinePoly
from .multidegree import MultiDegreePoly
from .paving import (
    Partition,
    PavingParams,
    PavingResult,
    certified_maxroot_bound,
    exhaustive_paving,
    interlacing_descent,
    lr_bound,
    matrix_paving,
    two_stage_paving,
    zero_diag_bound,
)
from .processes import (
    PointProcess,
    determinantal_process,
    entropy,
    kernel_poly,
    process_from_kernel,
    sr_paving,
)
from .univariate import RealRootedPoly, RootVector, majorizes, maxroot, roots

__version__ = "0.1.0"

__all__ = [
    "MultiAffinePoly",
    "MultiDegreePoly",
    "NUMBA_ENABLED",
    "Partition",
    "PavingParams",
    "PavingResult",
    "PointProcess",
    "RealRootedPoly",
    "RootVector",
    "certified_maxroot_bound",
    "determinantal_process",
    "entropy",
    "exhaustive_paving",
    "interlacing_descent",
    "kernel_poly",
    "lr_bound",
    "majorizes",
    "matrix_paving",
    "maxroot",
    "process_from_kernel",
    "roots",
    "sr_paving",
    "two_stage_paving",
    "zero_diag_bound",
]
