"""Fast O(n)-O(n^2) path for functions of the coordinate sum.

A radial function is stored as phi[j], the value at any vertex with exactly
j coordinates equal to -1 (coordinate sum s = n - 2j). Its Walsh spectrum is
constant on levels; the level values are reached through the Krawtchouk
transform. All binomial weights go through log space, and the transform
accumulations are compensated, so the path stays usable into the thousands
of dimensions needed by the sharpness scans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .cube import SCALAR, CubeFunction


def krawtchouk(k: int, j: int, n: int) -> float:
    """K_k(j; n) = sum_i (-1)^i C(j,i) C(n-j,k-i) by the recurrence in k.

    The two-term recurrence (k+1) K_{k+1} = (n-2j) K_k - (n-k+1) K_{k-1}
    is exact in double precision for n <= 30 (all intermediates stay below
    2^53), which the big-integer oracle test pins down.
    """
    if not (0 <= k <= n and 0 <= j <= n):
        raise ValueError(f"indices k={k}, j={j} out of range for n={n}")
    prev, cur = 1.0, float(n - 2 * j)
    if k == 0:
        return prev
    for kk in range(1, k):
        prev, cur = cur, ((n - 2 * j) * cur - (n - kk + 1) * prev) / (kk + 1)
    return cur


def krawtchouk_exact(k: int, j: int, n: int) -> int:
    """Big-integer evaluation straight from the defining sum (test oracle)."""
    if not (0 <= k <= n and 0 <= j <= n):
        raise ValueError(f"indices k={k}, j={j} out of range for n={n}")
    return sum(
        (-1) ** i * math.comb(j, i) * math.comb(n - j, k - i)
        for i in range(0, min(j, k) + 1)
    )


def log_binomial_weights(n: int) -> np.ndarray:
    """log of C(n,j)/2^n for j = 0..n."""
    j = np.arange(n + 1, dtype=np.float64)
    return gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1) - n * math.log(2.0)


@dataclass(frozen=True)
class RadialFunction:
    n: int
    phi: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.phi, dtype=np.complex128)
        if arr.shape != (self.n + 1,):
            raise ValueError(f"phi must have length n+1={self.n + 1}")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("phi contains non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "phi", arr)

    def to_json_dict(self) -> dict:
        return {"n": self.n, "phi": [[z.real, z.imag] for z in self.phi]}

    @staticmethod
    def from_json_dict(doc: dict) -> "RadialFunction":
        return RadialFunction(
            int(doc["n"]), np.array([complex(re, im) for re, im in doc["phi"]])
        )


@dataclass(frozen=True)
class LevelSpectrum:
    """c[k] = common value of f-hat(A) over |A| = k."""

    n: int
    c: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.c, dtype=np.complex128)
        if arr.shape != (self.n + 1,):
            raise ValueError(f"c must have length n+1={self.n + 1}")
        arr.setflags(write=False)
        object.__setattr__(self, "c", arr)


def _csum(real: np.ndarray, imag: np.ndarray) -> complex:
    """Exactly rounded complex accumulation."""
    return complex(math.fsum(real), math.fsum(imag))


def _orthonormal_rows(n: int, top: int):
    """Yield rows M_k[j] = sqrt(C(n,j)/2^n) * K_k(j;n) / sqrt(C(n,k)), k <= top.

    The rows are orthonormal in j and every entry stays in [-1, 1]. The
    three-term recurrence is only run for k <= n/2, where the true solution
    dominates (running it into the decaying regime k > n/2 amplifies
    roundoff catastrophically at extreme j); callers reach the upper half
    through the exact symmetry K_{n-k}(j) = (-1)^j K_k(j).
    """
    if top > n // 2:
        raise ValueError("rows above n/2 must come from the parity symmetry")
    j = np.arange(n + 1, dtype=np.float64)
    body = n - 2.0 * j
    prev = np.zeros(n + 1)
    cur = np.exp(0.5 * log_binomial_weights(n))
    yield 0, cur
    for k in range(0, top):
        nxt = body * cur
        if k > 0:
            nxt -= math.sqrt(k * (n - k + 1.0)) * prev
        nxt /= math.sqrt((k + 1.0) * (n - k))
        prev, cur = cur, nxt
        yield k + 1, cur


def _parity(n: int) -> np.ndarray:
    return np.where(np.arange(n + 1) % 2, -1.0, 1.0)


def _log_sqrt_binom(n: int, k: np.ndarray) -> np.ndarray:
    return 0.5 * (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def radial_to_levels(f: RadialFunction, max_level: int | None = None) -> LevelSpectrum:
    """Krawtchouk transform: level coefficients of a radial function.

    c[k] = (1/(2^n C(n,k))) sum_j C(n,j) phi[j] K_k(j;n), accumulated with
    compensated summation in an orthonormal normalization.
    """
    n = f.n
    top = n if max_level is None else min(max_level, n)
    sqrt_w = np.exp(0.5 * log_binomial_weights(n))
    psi = sqrt_w * f.phi
    psi_alt = _parity(n) * psi
    a = np.zeros(n + 1, dtype=np.complex128)
    stop = n // 2 if top > n // 2 else top
    for k, row in _orthonormal_rows(n, stop):
        if k <= top:
            a[k] = _csum(row * psi.real, row * psi.imag)
        mirror = n - k
        if mirror != k and mirror <= top:
            a[mirror] = _csum(row * psi_alt.real, row * psi_alt.imag)
    scale = np.exp(-_log_sqrt_binom(n, np.arange(n + 1, dtype=np.float64)))
    return LevelSpectrum(n, a * scale)


def _plain_rows(n: int, top: int):
    """Unnormalized K_k(j;n) rows for k <= top <= n/2 (entries <= C(n,top))."""
    j = np.arange(n + 1, dtype=np.float64)
    body = n - 2.0 * j
    prev = np.zeros(n + 1)
    cur = np.ones(n + 1)
    yield 0, cur
    for k in range(0, top):
        nxt = (body * cur - (n - k + 1.0) * prev) / (k + 1.0) if k > 0 else body * cur
        prev, cur = cur, nxt
        yield k + 1, cur


def _kahan(total, compensation, term):
    y = term - compensation
    t = total + y
    return t, (t - total) - y


def levels_to_radial(s: LevelSpectrum) -> RadialFunction:
    """Inverse transform: phi[j] = sum_k c[k] K_k(j;n).

    Low levels (and their parity mirrors near n) go through the plain
    Krawtchouk rows; otherwise the accumulation runs in the orthonormal
    normalization, which covers full spectra up to n ~ 2100 before the
    binomial scaling leaves double range.
    """
    n = s.n
    nonzero = np.nonzero(s.c)[0]
    if nonzero.size == 0:
        return RadialFunction(n, np.zeros(n + 1, dtype=np.complex128))
    # base row index for level k is min(k, n-k); advance the recurrence there
    stop = int(max(min(k, n - k) for k in nonzero))
    log_top = _log_sqrt_binom(n, np.array([float(stop)]))[0] * 2.0

    phi = np.zeros(n + 1, dtype=np.complex128)
    comp = np.zeros(n + 1, dtype=np.complex128)
    phi_alt = np.zeros(n + 1, dtype=np.complex128)
    comp_alt = np.zeros(n + 1, dtype=np.complex128)

    if log_top < 700.0:  # plain rows stay within double range
        for k, row in _plain_rows(n, stop):
            if s.c[k] != 0:
                phi, comp = _kahan(phi, comp, s.c[k] * row)
            mirror = n - k
            if mirror != k and s.c[mirror] != 0:
                phi_alt, comp_alt = _kahan(phi_alt, comp_alt, s.c[mirror] * row)
        return RadialFunction(n, phi + _parity(n) * phi_alt)

    sqrt_w = np.exp(0.5 * log_binomial_weights(n))
    if sqrt_w.min() == 0.0:
        raise ValueError(
            f"level spectrum too deep for n={n}: pointwise values at extreme "
            "vertices are not representable in double precision"
        )
    log_sb = _log_sqrt_binom(n, np.arange(n + 1, dtype=np.float64))
    a = np.zeros(n + 1, dtype=np.complex128)
    live = s.c != 0
    a[live] = s.c[live] * np.exp(log_sb[live])
    for k, row in _orthonormal_rows(n, stop):
        if s.c[k] != 0:
            phi, comp = _kahan(phi, comp, a[k] * row)
        mirror = n - k
        if mirror != k and s.c[mirror] != 0:
            phi_alt, comp_alt = _kahan(phi_alt, comp_alt, a[mirror] * row)
    return RadialFunction(n, (phi + _parity(n) * phi_alt) / sqrt_w)


def apply_level_multiplier_radial(f: RadialFunction, values: np.ndarray) -> RadialFunction:
    """Multiply the level-k coefficient by values[k] and return to point form."""
    if len(values) != f.n + 1:
        raise ValueError("multiplier length must be n+1")
    spec = radial_to_levels(f)
    return levels_to_radial(LevelSpectrum(f.n, spec.c * np.asarray(values)))


def radial_laplacian(f: RadialFunction) -> RadialFunction:
    """Laplacian of a radial function via flip counting.

    (Delta f)[j] = ((n-j)(phi[j]-phi[j+1]) + j(phi[j]-phi[j-1]))/2, with the
    out-of-range differences dropped at j = 0 and j = n.
    """
    n, phi = f.n, f.phi
    j = np.arange(n + 1, dtype=np.float64)
    up = np.zeros(n + 1, dtype=np.complex128)
    down = np.zeros(n + 1, dtype=np.complex128)
    up[:-1] = phi[:-1] - phi[1:]
    down[1:] = phi[1:] - phi[:-1]
    return RadialFunction(n, ((n - j) * up + j * down) / 2.0)


def radial_gradient_norm(f: RadialFunction) -> RadialFunction:
    """Pointwise Euclidean gradient norm (radial again by symmetry)."""
    n, phi = f.n, f.phi
    j = np.arange(n + 1, dtype=np.float64)
    up = np.zeros(n + 1)
    down = np.zeros(n + 1)
    up[:-1] = np.abs((phi[:-1] - phi[1:]) / 2.0) ** 2
    down[1:] = np.abs((phi[1:] - phi[:-1]) / 2.0) ** 2
    return RadialFunction(n, np.sqrt((n - j) * up + j * down))


def radial_lp_norm(f: RadialFunction, p: float) -> float:
    """L_p norm with binomial vertex weights, log-space for large n."""
    if p < 1:
        raise ValueError("p must be >= 1")
    mags = np.abs(f.phi)
    if math.isinf(p):
        return float(mags.max())
    logw = log_binomial_weights(f.n)
    with np.errstate(divide="ignore"):
        terms = logw + p * np.log(mags)
    terms = terms[mags > 0.0]
    if terms.size == 0:
        return 0.0
    return float(math.exp(logsumexp(terms) / p))


def radial_mean(f: RadialFunction) -> complex:
    logw = log_binomial_weights(f.n)
    w = np.exp(logw)
    return _csum(w * f.phi.real, w * f.phi.imag)


def radial_to_cube(f: RadialFunction) -> CubeFunction:
    """Dense expansion (oracle path, small n only)."""
    counts = np.bitwise_count(np.arange(1 << f.n, dtype=np.uint32))
    return CubeFunction(f.n, SCALAR, f.phi[counts])


def radial_heat(f: RadialFunction, t: float, max_level: int | None = None) -> RadialFunction:
    """e^{-t Delta} along the level path."""
    if t < 0:
        raise ValueError("t must be >= 0")
    spec = radial_to_levels(f, max_level=max_level)
    decay = np.exp(-t * np.arange(f.n + 1, dtype=np.float64))
    return levels_to_radial(LevelSpectrum(f.n, spec.c * decay))
