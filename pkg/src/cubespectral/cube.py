"""Functions on the Hamming cube {-1,1}^n and their Walsh spectra.

Conventions, fixed package-wide:

* Vertex index v encodes the point eps via bit i of v: bit 0 means
  eps_{i+1} = +1, bit 1 means eps_{i+1} = -1.
* Subset masks A use the same bit layout (bit i-1 set iff i in A), so the
  character w_A evaluated at vertex v is (-1)^popcount(v & A).
* Spectra are normalized so that coeffs[A] = (1/2^n) sum_v f(v) w_A(v);
  the expansion f = sum_A coeffs[A] w_A inverts it exactly.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from ._kernels import fwht_inplace

DEFAULT_MAX_N = 22
BAND_TOL = 1e-12


def max_dimension() -> int:
    """Dimension guard, configurable via CUBE_SPECTRAL_MAX_N (hard cap 26)."""
    return min(int(os.environ.get("CUBE_SPECTRAL_MAX_N", DEFAULT_MAX_N)), 26)


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"cube dimension must be >= 1, got {n}")
    if n > max_dimension():
        raise ValueError(
            f"n={n} exceeds the memory guard ({max_dimension()}); "
            "raise CUBE_SPECTRAL_MAX_N to override"
        )


@dataclass(frozen=True)
class TargetSpace:
    """Value space of a cube function: complex scalars or l_q^m vectors."""

    kind: str = "scalar"  # "scalar" | "lq"
    q: float = 2.0
    m: int = 1

    def __post_init__(self):
        if self.kind not in ("scalar", "lq"):
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.kind == "lq":
            if not (self.q >= 1.0):  # admits q = inf
                raise ValueError("vector exponent q must satisfy q >= 1")
            if self.m < 1:
                raise ValueError("vector dimension m must be >= 1")

    @property
    def is_scalar(self) -> bool:
        return self.kind == "scalar"

    def norm(self, values: np.ndarray) -> np.ndarray:
        """Pointwise target norm: |.| for scalars, l_q^m norm along the last axis."""
        if self.is_scalar:
            return np.abs(values)
        a = np.abs(values)
        if math.isinf(self.q):
            return a.max(axis=-1)
        if self.q == 1.0:
            return a.sum(axis=-1)
        if self.q == 2.0:
            return np.sqrt((a * a).sum(axis=-1))
        return (a**self.q).sum(axis=-1) ** (1.0 / self.q)


SCALAR = TargetSpace()


def linf_target(m: int) -> TargetSpace:
    return TargetSpace("lq", math.inf, m)


@dataclass(frozen=True)
class SpectralBand:
    """Closed level range [low, high] of Walsh levels |A|."""

    low: int
    high: int

    def validate(self, n: int) -> None:
        if not (0 <= self.low <= self.high <= n):
            raise ValueError(f"band [{self.low},{self.high}] invalid for n={n}")


def _frozen_array(values, shape, obj, name="values"):
    arr = np.ascontiguousarray(values, dtype=np.complex128)
    if arr.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    object.__setattr__(obj, name, arr)
    return arr


def _value_shape(n: int, target: TargetSpace):
    return (1 << n,) if target.is_scalar else (1 << n, target.m)


@dataclass(frozen=True)
class CubeFunction:
    """Dense table of values over all 2^n vertices."""

    n: int
    target: TargetSpace
    values: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        _frozen_array(self.values, _value_shape(self.n, self.target), self)

    def pointwise_norms(self) -> np.ndarray:
        """Real array of ||f(eps)||_X over vertices."""
        return self.target.norm(self.values)

    def mean(self):
        """f-hat(empty set): the average value."""
        return self.values.mean(axis=0)

    def negate_inputs(self) -> "CubeFunction":
        """The function eps -> f(-eps)."""
        idx = np.arange(1 << self.n) ^ ((1 << self.n) - 1)
        return CubeFunction(self.n, self.target, self.values[idx])

    def to_json_dict(self) -> dict:
        return _function_json(self.n, self.target, "point", self.values)

    def __eq__(self, other):
        return (
            isinstance(other, CubeFunction)
            and self.n == other.n
            and self.target == other.target
            and np.array_equal(self.values, other.values)
        )


def levels(n: int) -> np.ndarray:
    """|A| for every subset mask A in index order."""
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint32)).astype(np.int64)


@dataclass(frozen=True)
class Spectrum:
    """Walsh coefficients indexed by subset bitmask, with cached band info."""

    n: int
    target: TargetSpace
    coeffs: np.ndarray
    band_tol: float = BAND_TOL
    band_low: int = field(default=-1)
    band_high: int = field(default=-1)

    def __post_init__(self):
        _check_n(self.n)
        _frozen_array(self.coeffs, _value_shape(self.n, self.target), self, "coeffs")
        lo, hi = _detect_band(self.n, self.target, self.coeffs, self.band_tol)
        object.__setattr__(self, "band_low", lo)
        object.__setattr__(self, "band_high", hi)

    def coeff_magnitudes(self) -> np.ndarray:
        return self.target.norm(self.coeffs)

    def restricted(self, band: SpectralBand) -> "Spectrum":
        band.validate(self.n)
        lv = levels(self.n)
        keep = (lv >= band.low) & (lv <= band.high)
        out = self.coeffs.copy()
        out[~keep] = 0.0
        return Spectrum(self.n, self.target, out, self.band_tol)

    def to_json_dict(self) -> dict:
        return _function_json(self.n, self.target, "spectrum", self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, Spectrum)
            and self.n == other.n
            and self.target == other.target
            and np.array_equal(self.coeffs, other.coeffs)
        )


def _detect_band(n, target, coeffs, tol):
    mags = target.norm(coeffs)
    top = mags.max()
    if top == 0.0:
        return 0, 0
    lv = levels(n)
    active = lv[mags > tol * top]
    if active.size == 0:
        return 0, 0
    return int(active.min()), int(active.max())


def _as_columns(values: np.ndarray) -> np.ndarray:
    """Writable (2^n, k) view-copy of a value table for the kernel."""
    if values.ndim == 1:
        return np.ascontiguousarray(values.reshape(-1, 1))
    return np.ascontiguousarray(values)


def butterfly(values: np.ndarray) -> np.ndarray:
    """Unnormalized Hadamard transform of a (2^n,) or (2^n, k) array."""
    cols = _as_columns(values).astype(np.complex128, copy=True)
    fwht_inplace(cols)
    return cols.reshape(values.shape)


def fwht(f: CubeFunction) -> Spectrum:
    """Walsh-Fourier transform, coeffs[A] = (1/2^n) sum_v f(v) w_A(v)."""
    out = butterfly(f.values) / (1 << f.n)
    return Spectrum(f.n, f.target, out)


def ifwht(s: Spectrum) -> CubeFunction:
    """Inverse transform: evaluate f = sum_A coeffs[A] w_A on all vertices."""
    return CubeFunction(s.n, s.target, butterfly(s.coeffs))


def character(n: int, mask: int) -> CubeFunction:
    """The Walsh function w_A as a +-1 table; mask encodes A."""
    _check_n(n)
    if not 0 <= mask < (1 << n):
        raise ValueError(f"mask {mask} out of range for n={n}")
    par = np.bitwise_count(np.arange(1 << n, dtype=np.uint32) & np.uint32(mask)) & 1
    return CubeFunction(n, SCALAR, np.where(par, -1.0, 1.0).astype(np.complex128))


def partial_derivative(f: CubeFunction, i: int) -> CubeFunction:
    """Discrete i-th partial derivative, (f(eps) - f(eps with eps_i flipped))/2."""
    if not 1 <= i <= f.n:
        raise ValueError(f"coordinate i={i} out of range 1..{f.n}")
    flipped = np.arange(1 << f.n) ^ (1 << (i - 1))
    return CubeFunction(f.n, f.target, (f.values - f.values[flipped]) / 2.0)


def project(f: CubeFunction, band: SpectralBand) -> CubeFunction:
    """Spectral projection onto Walsh levels low <= |A| <= high."""
    return ifwht(fwht(f).restricted(band))


def trial_rng(seed: int, trial: int = 0) -> np.random.Generator:
    """Documented seed->stream mapping: one independent substream per trial.

    Streams are spawned as SeedSequence(seed, spawn_key=(trial,)), so reports
    citing (seed, trial) are reproducible independently of trial order.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))


def random_spectrum(
    n: int,
    band: SpectralBand,
    target: TargetSpace = SCALAR,
    seed: int = 0,
    trial: int = 0,
) -> Spectrum:
    """Spectrum with i.i.d. standard complex Gaussian coefficients in the band.

    A band with low > high (e.g. [d+1, n] at d = n) is empty and yields the
    zero spectrum; other operations require a well-formed band.
    """
    _check_n(n)
    if band.low > band.high:
        return Spectrum(n, target, np.zeros(_value_shape(n, target), dtype=np.complex128))
    band.validate(n)
    rng = trial_rng(seed, trial)
    lv = levels(n)
    keep = (lv >= band.low) & (lv <= band.high)
    shape = _value_shape(n, target)
    coeffs = np.zeros(shape, dtype=np.complex128)
    k = int(keep.sum())
    vec_shape = (k,) if target.is_scalar else (k, target.m)
    draw = rng.standard_normal(vec_shape) + 1j * rng.standard_normal(vec_shape)
    coeffs[keep] = draw / math.sqrt(2.0)
    return Spectrum(n, target, coeffs)


def random_function(
    n: int,
    band: SpectralBand,
    target: TargetSpace = SCALAR,
    seed: int = 0,
    trial: int = 0,
) -> CubeFunction:
    """Random band-limited function; deterministic under (seed, trial)."""
    return ifwht(random_spectrum(n, band, target, seed, trial))


# ---------------------------------------------------------------------------
# JSON file format
# ---------------------------------------------------------------------------


def _q_to_json(q: float):
    return "inf" if math.isinf(q) else q


def _q_from_json(q) -> float:
    return math.inf if q == "inf" else float(q)


def _function_json(n, target, repr_kind, values) -> dict:
    if target.is_scalar:
        data = [[z.real, z.imag] for z in values]
        tgt = {"kind": "scalar"}
    else:
        data = [[[z.real, z.imag] for z in row] for row in values]
        tgt = {"kind": "lq", "q": _q_to_json(target.q), "m": target.m}
    return {"n": n, "target": tgt, "repr": repr_kind, "data": data}


def _values_from_json(doc) -> tuple[int, TargetSpace, np.ndarray]:
    n = int(doc["n"])
    tgt = doc["target"]
    if tgt["kind"] == "scalar":
        target = SCALAR
        arr = np.array([complex(re, im) for re, im in doc["data"]])
    else:
        target = TargetSpace("lq", _q_from_json(tgt["q"]), int(tgt["m"]))
        arr = np.array(
            [[complex(re, im) for re, im in row] for row in doc["data"]]
        )
    return n, target, arr


def function_from_json(doc: dict):
    """Load a CubeFunction or Spectrum from the function file schema."""
    n, target, arr = _values_from_json(doc)
    if doc.get("repr", "point") == "spectrum":
        return Spectrum(n, target, arr)
    return CubeFunction(n, target, arr)


def load_function(path: str):
    with open(path) as fh:
        return function_from_json(json.load(fh))


def save_function(obj, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(obj.to_json_dict(), fh)
