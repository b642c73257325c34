"""Spectral analysis of functions on the Hamming cube {-1,1}^n.

Transforms and band projections (cube), the radial fast path (radial),
spectral multiplier operators (operators), norms and functionals (analysis),
the one-dimensional/complex-plane toolbox (classical), the theorem
verification harness (verify), and extremal search (extremal).
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .cube import (
    SCALAR,
    CubeFunction,
    SpectralBand,
    Spectrum,
    TargetSpace,
    character,
    fwht,
    ifwht,
    partial_derivative,
    project,
    random_function,
)
from .radial import LevelSpectrum, RadialFunction, krawtchouk

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "SCALAR",
    "CubeFunction",
    "SpectralBand",
    "Spectrum",
    "TargetSpace",
    "character",
    "fwht",
    "ifwht",
    "partial_derivative",
    "project",
    "random_function",
    "LevelSpectrum",
    "RadialFunction",
    "krawtchouk",
    "__version__",
]
