"""Spectral multiplier operators: heat flow, Laplacian powers, gradients.

Every operator here acts through the Walsh spectrum by a level multiplier
(values[k] applied to all coefficients at level |A| = k), except for the
probabilistic heat representation, which is a purely pointwise enumeration
kept deliberately independent of the transform so it can serve as an oracle.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .cube import CubeFunction, Spectrum, fwht, ifwht, levels, partial_derivative
from .radial import RadialFunction, apply_level_multiplier_radial

INVERSE_HEAT_CONDITION_LIMIT = 1e12


class ConditioningWarning(UserWarning):
    """Raised when an operator amplifies roundoff beyond trust (e.g. e^{t Delta})."""


def apply_multiplier(f, values):
    """Apply a level multiplier to a CubeFunction, Spectrum or RadialFunction."""
    if isinstance(f, RadialFunction):
        return apply_level_multiplier_radial(f, np.asarray(values, dtype=np.complex128))
    spec = fwht(f) if isinstance(f, CubeFunction) else f
    vals = np.asarray(values, dtype=np.complex128)
    if vals.shape != (spec.n + 1,):
        raise ValueError(f"multiplier must have length n+1={spec.n + 1}")
    mult = vals[levels(spec.n)]
    coeffs = spec.coeffs * (mult if spec.target.is_scalar else mult[:, None])
    out = Spectrum(spec.n, spec.target, coeffs)
    return ifwht(out) if isinstance(f, CubeFunction) else out


def _level_range(n):
    return np.arange(n + 1, dtype=np.float64)


def heat(f, t: float):
    """e^{-t Delta}: multiply level k by e^{-tk}."""
    if t < 0:
        raise ValueError("t must be >= 0 (use complex_heat for w^Delta)")
    return apply_multiplier(f, np.exp(-t * _level_range(f.n)))


def complex_heat(f, w: complex):
    """w^Delta for w in the closed unit disc: multiply level k by w^k."""
    if abs(w) > 1 + 1e-12:
        raise ValueError("|w| > 1 is outside the contractivity scope")
    return apply_multiplier(f, np.asarray(w, dtype=np.complex128) ** _level_range(f.n))


def inverse_heat(f, t: float):
    """e^{+t Delta}; warns when the top-level amplification e^{tn} exceeds 1e12."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if math.exp(min(t * f.n, 700.0)) > INVERSE_HEAT_CONDITION_LIMIT:
        warnings.warn(
            f"inverse heat amplification e^(t n) = e^{t * f.n:.3g} exceeds "
            f"{INVERSE_HEAT_CONDITION_LIMIT:g}; result digits are untrustworthy",
            ConditioningWarning,
            stacklevel=2,
        )
    return apply_multiplier(f, np.exp(t * _level_range(f.n)))


def laplacian(f):
    """Delta: multiply level k by k."""
    return apply_multiplier(f, _level_range(f.n))


def fractional_laplacian(f, gamma: float):
    """Delta^gamma with the 0^gamma = 0 convention."""
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    k = _level_range(f.n)
    vals = np.zeros_like(k)
    vals[1:] = k[1:] ** gamma
    return apply_multiplier(f, vals)


def falling_laplacian(f, k: int):
    """Delta (Delta - 1) ... (Delta - k + 1), the k-step falling product."""
    if k < 1:
        raise ValueError("k must be >= 1")
    lv = _level_range(f.n)
    vals = np.ones_like(lv)
    for i in range(k):
        vals *= lv - i
    return apply_multiplier(f, vals)


def level_projection(f, k: int):
    """Projection onto Walsh level k (the level-k Rademacher projection)."""
    vals = np.zeros(f.n + 1)
    vals[k] = 1.0
    return apply_multiplier(f, vals)


def heat_probabilistic(f: CubeFunction, t: float, n_limit: int = 10) -> CubeFunction:
    """Heat flow by exact enumeration of the mixture representation.

    (e^{-t Delta} f)(eps) = sum_B e^{-t|B|}(1-e^{-t})^{n-|B|} *
    average over delta of f(eps on B, delta off B). Deterministic oracle,
    cost O(n 4^n); independent of the spectral path.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    n = f.n
    if n > n_limit:
        raise ValueError(f"n={n} exceeds the O(4^n) oracle limit {n_limit}")
    size = 1 << n
    idx = np.arange(size)
    # partial averages over the coordinates outside B, filled by decreasing |B|
    averages = [None] * size
    averages[size - 1] = f.values.astype(np.complex128)
    for b in range(size - 2, -1, -1):
        missing = (~b) & (size - 1)
        bit = missing & (-missing)  # lowest coordinate not in B
        src = averages[b | bit]
        averages[b] = (src + src[idx ^ bit]) / 2.0
    x = math.exp(-t)
    counts = np.bitwise_count(np.arange(size, dtype=np.uint32)).astype(np.float64)
    weights = x**counts * (1.0 - x) ** (n - counts)
    out = np.zeros_like(averages[0])
    for b in range(size):
        if weights[b] != 0.0:
            out += weights[b] * averages[b]
    return CubeFunction(n, f.target, out)


def gradient_norm(f: CubeFunction) -> CubeFunction:
    """Pointwise (sum_i |d_i f|^2)^(1/2); scalar targets only.

    For complex scalars |.|^2 is the squared modulus.
    """
    if not f.target.is_scalar:
        raise ValueError("gradient_norm is defined for scalar targets only")
    acc = np.zeros(1 << f.n)
    for i in range(1, f.n + 1):
        acc += np.abs(partial_derivative(f, i).values) ** 2
    return CubeFunction(f.n, f.target, np.sqrt(acc).astype(np.complex128))
