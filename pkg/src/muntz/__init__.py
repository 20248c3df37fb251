"""Müntz-Legendre polynomials, Goursat-Volterra kernels and the Brownian
transforms they generate."""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .exponents import (ExponentSequence, SequenceClass, SequenceKind, classify,
                        geometric_p_family, hyperharmonic_family, validate)
from .gram import covariance_matrix, gram_pair, inverse_closed, reproducing_kernel_eval
from .kernel import (GoursatKernel, coefficients_closed, coefficients_system, goursat_kernel,
                     identity_kernel, recurrence_step)
from .legendre import MuntzLegendreBasis, build_basis, legendre_coefficients
from .spectral import (BlaschkeProduct, ExponentialSum, eta_from_kernel, fourier_closed,
                       ou_covariance, pi_infinity_truncated)
from .verify import run_identities
