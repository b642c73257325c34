"""Norms and functionals over cube functions."""

from __future__ import annotations

import math

import numpy as np

from .cube import CubeFunction, fwht, partial_derivative

ENTROPY_FLOOR = 1e-300  # below this, values are treated as exact zeros in h*log(h)


def lp_norm(f: CubeFunction, p: float) -> float:
    """Vector-valued L_p norm, ((1/2^n) sum ||f(eps)||_X^p)^(1/p); max at p = inf."""
    if p < 1:
        raise ValueError("p must be >= 1")
    mags = f.pointwise_norms()
    if math.isinf(p):
        return float(mags.max())
    if p == 1.0:
        return float(mags.mean())
    if p == 2.0:
        return float(math.sqrt((mags * mags).mean()))
    return float((mags**p).mean() ** (1.0 / p))


def influence(f: CubeFunction, p: float) -> float:
    """Total p-influence, sum_i ||d_i f||_p^p (scalar functions, p finite)."""
    if not f.target.is_scalar:
        raise ValueError("influence is defined for scalar targets only")
    if math.isinf(p):
        raise ValueError("p = inf is not admitted for influences")
    if p < 1:
        raise ValueError("p must be >= 1")
    return float(
        sum(lp_norm(partial_derivative(f, i), p) ** p for i in range(1, f.n + 1))
    )


def entropy(f: CubeFunction, q: float) -> float:
    """Ent(||f||_X^q) = E[h log h] - E[h] log E[h] for h = ||f||_X^q.

    Uses the 0*log(0) = 0 convention; magnitudes below 1e-300 count as exact
    zeros to dodge log underflow. The result is clamped at 0 (it is
    nonnegative by Jensen; roundoff can produce -1e-17 for near-constant h).
    """
    if q <= 0:
        raise ValueError("q must be > 0")
    h = f.pointwise_norms() ** q
    mean_h = float(h.mean())
    if mean_h <= ENTROPY_FLOOR:
        return 0.0
    live = h > ENTROPY_FLOOR
    e_hlogh = float((h[live] * np.log(h[live])).sum()) / h.size
    return max(0.0, e_hlogh - mean_h * math.log(mean_h))


def log_norm_is_convex_in_reciprocal(f: CubeFunction, r_grid) -> bool:
    """Midpoint-convexity of r -> log ||f||_{1/r} on a grid (Hoelder)."""
    r = np.asarray(sorted(r_grid), dtype=np.float64)
    vals = np.array([math.log(lp_norm(f, 1.0 / ri)) for ri in r])
    for i in range(1, len(r) - 1):
        lam = (r[i + 1] - r[i]) / (r[i + 1] - r[i - 1])
        chord = lam * vals[i - 1] + (1 - lam) * vals[i + 1]
        if vals[i] > chord + 1e-9 * (1.0 + abs(chord)):
            return False
    return True


def dual_gradient_functional(f: CubeFunction, p: float, n_limit: int = 10) -> float:
    """((1/2^n) sum_delta || sum_i delta_i d_i f ||_p^p)^(1/p).

    Exact enumeration over delta in {-1,1}^n; cost O(4^n), so n is capped.
    """
    if math.isinf(p):
        raise ValueError("p must be finite")
    if p < 1:
        raise ValueError("p must be >= 1")
    if f.n > n_limit:
        raise ValueError(f"n={f.n} exceeds the O(4^n) enumeration limit {n_limit}")
    n = f.n
    derivs = np.stack(
        [partial_derivative(f, i).values for i in range(1, n + 1)]
    )  # (n, 2^n[, m])
    idx = np.arange(1 << n, dtype=np.uint32)
    signs = np.where(
        (idx[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1, -1.0, 1.0
    )  # (2^n, n); row delta uses the vertex bit convention
    combined = np.tensordot(signs, derivs, axes=(1, 0))  # (2^n_delta, 2^n[, m])
    mags = f.target.norm(combined) if not f.target.is_scalar else np.abs(combined)
    inner = (mags**p).mean(axis=1)  # ||.||_p^p per delta
    return float(inner.mean() ** (1.0 / p))


def parseval_gap(f: CubeFunction) -> float:
    """Relative gap |  ||f||_2^2 - sum |f-hat|^2 | / ||f||_2^2 (scalar targets)."""
    s = fwht(f)
    energy_point = float((f.pointwise_norms() ** 2).mean())
    energy_spec = float((s.coeff_magnitudes() ** 2).sum())
    if energy_point == 0.0:
        return abs(energy_spec)
    return abs(energy_point - energy_spec) / energy_point
