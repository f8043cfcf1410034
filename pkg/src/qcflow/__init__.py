"""Numerics for evolving conformal maps with quasiconformal extensions."""

import os as _os

_threads = _os.environ.get("QCFLOW_THREADS")
if _threads and _threads.isdigit() and int(_threads) >= 1:
    # must happen before numpy loads its BLAS
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ[_var] = _threads

__version__ = "0.1.0"

from .errors import (BandLimitError, CuspError, DomainError, GridMismatchError,  # noqa: E402
                     NearSingularError, PositivityError, QCFlowError, SingularJacobianError,
                     SolverError, UnivalenceError)
from .grid import (CircleGrid, DiskQuadrature, cauchy_transform_disk,  # noqa: E402
                   complete_elliptic_K, disk_integral, schwarz_integral, subordination_constant)
from .fields import BeltramiField, DiskHolomorphic  # noqa: E402
from .laurent import LaurentMap  # noqa: E402
from .vect import CircleField, kirillov_variation, poisson_lie_bracket  # noqa: E402
from .teich import (b_norm, bergman_reproduce, coupling, lambda_dot, lambda_star,  # noqa: E402
                    petersson_product, wp_pairing)
from .douady_earle import (CircleHomeomorphism, beltrami_of_extension, extend,  # noqa: E402
                           nu_from_field, variational_nu)
from .loewner import (CSplitChain, HerglotzFunction, characteristics_check,  # noqa: E402
                      lk_ode_integrate, lk_pde_evolve, whole_plane_G)
from .heleshaw import PGState, cotangent_vector, evolve, tangent_vector  # noqa: E402

__all__ = [
    "BandLimitError", "CuspError", "DomainError", "GridMismatchError", "NearSingularError",
    "PositivityError", "QCFlowError", "SingularJacobianError", "SolverError", "UnivalenceError",
    "CircleGrid", "DiskQuadrature", "cauchy_transform_disk", "complete_elliptic_K",
    "disk_integral", "schwarz_integral", "subordination_constant", "BeltramiField",
    "DiskHolomorphic", "LaurentMap", "CircleField", "kirillov_variation", "poisson_lie_bracket",
    "b_norm", "bergman_reproduce", "coupling", "lambda_dot", "lambda_star", "petersson_product",
    "wp_pairing", "CircleHomeomorphism", "beltrami_of_extension", "extend", "nu_from_field",
    "variational_nu", "CSplitChain", "HerglotzFunction", "characteristics_check",
    "lk_ode_integrate", "lk_pde_evolve", "whole_plane_G", "PGState", "cotangent_vector",
    "evolve", "tangent_vector", "__version__",
]
