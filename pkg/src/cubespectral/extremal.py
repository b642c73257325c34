"""Nonconvex search for worst-case functions of operator-ratio functionals.

The search space is the coefficient vector restricted to a spectral band
(optionally the radial subspace), the objective is a ratio of norms, and the
method is gradient ascent with backtracking on the step, geometric decay,
and seeded restarts. Estimates produced here are lower bounds on operator
norms by construction: every iterate is a feasible function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import analysis
from .cube import (
    SCALAR,
    CubeFunction,
    Spectrum,
    SpectralBand,
    TargetSpace,
    butterfly,
    levels,
    trial_rng,
)
from .classical import chebyshev_t
from .radial import (
    LevelSpectrum,
    RadialFunction,
    levels_to_radial,
    radial_gradient_norm,
    radial_laplacian,
    radial_lp_norm,
)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 4
    max_iters: int = 150
    step_init: float = 0.5
    step_decay: float = 0.995
    grad_mode: str = "analytic"  # "analytic" | "central-difference"
    h: float = 1e-6
    seed: int = 0
    normalize_every: int = 10
    surrogate_p: float = 64.0
    max_halvings: int = 25

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.h <= 0:
            raise ValueError("finite-difference step h must be > 0")


@dataclass
class ExtremalResult:
    ratio: float
    function: object  # CubeFunction | RadialFunction
    trace: list = field(default_factory=list)  # (iter, ratio, step) of best restart
    best_restart: int = 0
    evaluations: int = 0


def level_multiplier(op: str, n: int, param=None) -> np.ndarray:
    """Multiplier table for the named operator at dimension n."""
    k = np.arange(n + 1, dtype=np.float64)
    if op == "laplacian":
        return k.astype(np.complex128)
    if op == "heat":
        if param is None or param < 0:
            raise ValueError("heat requires t >= 0")
        return np.exp(-param * k).astype(np.complex128)
    if op == "fractional_laplacian":
        if param is None or param <= 0:
            raise ValueError("fractional_laplacian requires gamma > 0")
        out = np.zeros(n + 1, dtype=np.complex128)
        out[1:] = k[1:] ** param
        return out
    if op == "w_delta":
        w = complex(param)
        if abs(w) > 1 + 1e-12:
            raise ValueError("|w| must be <= 1")
        return np.asarray(w, dtype=np.complex128) ** k
    raise ValueError(f"unknown operator {op!r}")


def _surrogate(p: float, cfg: OptimizerConfig) -> float:
    return cfg.surrogate_p if math.isinf(p) else p


class _DenseObjective:
    """Ratio ||Op f||_p_out / ||f||_p_in over coefficients in a band."""

    def __init__(self, mult, p_in, p_out, band, n, target: TargetSpace):
        self.n = n
        self.target = target
        lv = levels(n)
        self.mask = np.nonzero((lv >= band.low) & (lv <= band.high))[0]
        self.mult = np.asarray(mult, dtype=np.complex128)[lv]
        self.p_in = p_in
        self.p_out = p_out
        self.m = 1 if target.is_scalar else target.m
        self.dim = 2 * self.mask.size * self.m
        self.evals = 0

    def _coeffs(self, x: np.ndarray) -> np.ndarray:
        half = x.size // 2
        c = x[:half] + 1j * x[half:]
        shape = (1 << self.n,) if self.target.is_scalar else (1 << self.n, self.m)
        full = np.zeros(shape, dtype=np.complex128)
        full[self.mask] = c if self.target.is_scalar else c.reshape(self.mask.size, self.m)
        return full

    def tables(self, x):
        c = self._coeffs(x)
        fvals = butterfly(c)
        op_c = c * (self.mult if self.target.is_scalar else self.mult[:, None])
        gvals = butterfly(op_c)
        return fvals, gvals

    def _norm(self, vals, p):
        mags = self.target.norm(vals)
        if math.isinf(p):
            return float(mags.max())
        return float((mags**p).mean() ** (1.0 / p))

    def value(self, x, p_in=None, p_out=None):
        self.evals += 1
        fvals, gvals = self.tables(x)
        den = self._norm(fvals, p_in if p_in is not None else self.p_in)
        if den == 0.0:
            return 0.0
        return self._norm(gvals, p_out if p_out is not None else self.p_out) / den

    def gradient(self, x):
        """Analytic gradient; requires scalar target and finite exponents > 1."""
        fvals, gvals = self.tables(x)
        size = 1 << self.n
        po, pi = self.p_out, self.p_in

        def half_grad(vals, lam, p):
            mags = np.abs(vals)
            norm = (float((mags**p).mean())) ** (1.0 / p)
            if norm == 0.0:
                return 0.0, np.zeros(2 * self.mask.size)
            h = np.zeros(size, dtype=np.complex128)
            live = mags > 0
            h[live] = mags[live] ** (p - 2.0) * np.conj(vals[live])
            ht = butterfly(h)[self.mask] * lam
            scale = norm ** (1.0 - p) / size
            return norm, scale * np.concatenate([ht.real, -ht.imag])

        nval, ngrad = half_grad(gvals, self.mult[self.mask], po)
        dval, dgrad = half_grad(fvals, np.ones(self.mask.size), pi)
        if dval == 0.0:
            return np.zeros(x.size)
        return (ngrad * dval - nval * dgrad) / (dval * dval)

    def function(self, x) -> CubeFunction:
        return CubeFunction(self.n, self.target, butterfly(self._coeffs(x)))

    def normalize(self, x):
        fvals, _ = self.tables(x)
        den = self._norm(fvals, self.p_in if not math.isinf(self.p_in) else 2.0)
        return x / den if den > 0 else x


class _RadialObjective:
    """Same ratio over the radial subspace, parametrized by level values."""

    def __init__(self, mult, p_in, p_out, band, n):
        self.n = n
        self.band = band
        self.ks = np.arange(band.low, band.high + 1)
        self.mult = np.asarray(mult, dtype=np.complex128)
        self.p_in = p_in
        self.p_out = p_out
        self.dim = 2 * self.ks.size
        self.evals = 0

    def _level_c(self, x):
        half = x.size // 2
        c = np.zeros(self.n + 1, dtype=np.complex128)
        c[self.ks] = x[:half] + 1j * x[half:]
        return c

    def value(self, x, p_in=None, p_out=None):
        self.evals += 1
        c = self._level_c(x)
        f = levels_to_radial(LevelSpectrum(self.n, c))
        g = levels_to_radial(LevelSpectrum(self.n, c * self.mult))
        den = radial_lp_norm(f, p_in if p_in is not None else self.p_in)
        if den == 0.0:
            return 0.0
        return radial_lp_norm(g, p_out if p_out is not None else self.p_out) / den

    def gradient(self, x):
        raise NotImplementedError  # radial mode always uses central differences

    def function(self, x) -> RadialFunction:
        return levels_to_radial(LevelSpectrum(self.n, self._level_c(x)))

    def normalize(self, x):
        f = self.function(x)
        p = self.p_in if not math.isinf(self.p_in) else 2.0
        den = radial_lp_norm(f, p)
        return x / den if den > 0 else x


def _cd_gradient(obj, x, h, p_in, p_out):
    g = np.zeros(x.size)
    for i in range(x.size):
        step = h * max(1.0, abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += step
        xm[i] -= step
        g[i] = (obj.value(xp, p_in, p_out) - obj.value(xm, p_in, p_out)) / (2 * step)
    return g


def _ascend(obj, x0, cfg: OptimizerConfig, p_in, p_out):
    """One restart of backtracking gradient ascent; trace is nondecreasing."""
    x = obj.normalize(np.asarray(x0, dtype=np.float64))
    best = obj.value(x, p_in, p_out)
    trace = [(0, best, cfg.step_init)]
    step = cfg.step_init
    analytic = (
        cfg.grad_mode == "analytic"
        and isinstance(obj, _DenseObjective)
        and obj.target.is_scalar
        and 1.0 < p_in < math.inf
        and 1.0 < p_out < math.inf
        and p_in == obj.p_in
        and p_out == obj.p_out
    )
    for it in range(1, cfg.max_iters + 1):
        grad = obj.gradient(x) if analytic else _cd_gradient(obj, x, cfg.h, p_in, p_out)
        gn = float(np.linalg.norm(grad))
        if not math.isfinite(gn) or gn == 0.0:
            break
        improved = False
        for _ in range(cfg.max_halvings):
            cand = x + (step / gn) * grad
            val = obj.value(cand, p_in, p_out)
            if math.isfinite(val) and val > best:
                x, best, improved = cand, val, True
                break
            step /= 2.0
        if not improved:
            break
        if it % cfg.normalize_every == 0:
            x = obj.normalize(x)
        step *= cfg.step_decay
        trace.append((it, best, step))
    return x, best, trace


def maximize_ratio(
    op: str,
    p_in: float,
    p_out: float,
    band: SpectralBand,
    n: int,
    cfg: OptimizerConfig = OptimizerConfig(),
    op_param=None,
    target: TargetSpace = SCALAR,
    radial: bool = False,
    inits: list | None = None,
) -> ExtremalResult:
    """Best ratio ||Op f||_p_out / ||f||_p_in over band-limited f.

    Infinite exponents are optimized through the finite surrogate
    cfg.surrogate_p and the returned ratio is re-evaluated at the true
    exponents. Restart 0 can be warm-started via `inits`; remaining restarts
    draw Gaussian coefficients from seeded substreams.
    """
    band.validate(n)
    mult = level_multiplier(op, n, op_param)
    if radial:
        if not target.is_scalar:
            raise ValueError("radial mode is scalar-valued")
        obj = _RadialObjective(mult, p_in, p_out, band, n)
    else:
        obj = _DenseObjective(mult, p_in, p_out, band, n, target)
    pi_s, po_s = _surrogate(p_in, cfg), _surrogate(p_out, cfg)

    starts = list(inits or [])
    for r in range(len(starts), cfg.restarts):
        rng = trial_rng(cfg.seed, r)
        starts.append(rng.standard_normal(obj.dim))

    best_val, best_x, best_trace, best_r = -math.inf, None, [], 0
    for r, x0 in enumerate(starts):
        x0 = np.asarray(x0, dtype=np.float64)
        if x0.size != obj.dim:
            raise ValueError(f"restart {r}: init has size {x0.size}, expected {obj.dim}")
        x, _, trace = _ascend(obj, x0, cfg, pi_s, po_s)
        # surrogate ascent may drift off the true-exponent optimum, so the
        # starting point competes at the true exponents as well
        for cand in (x, obj.normalize(x0)):
            true_val = obj.value(cand, p_in, p_out)
            if math.isfinite(true_val) and true_val > best_val:
                best_val, best_x, best_trace, best_r = true_val, cand, trace, r
    if best_x is None:
        raise RuntimeError("all restarts diverged")
    return ExtremalResult(best_val, obj.function(best_x), best_trace, best_r, obj.evals)


def chebyshev_radial_profile(n: int, d: int) -> RadialFunction:
    """phi[j] = T_d(1 - 2j/n), the extremal family of the degree-d scans."""
    j = np.arange(n + 1, dtype=np.float64)
    return RadialFunction(n, np.array([chebyshev_t(d, 1.0 - 2.0 * jj / n) for jj in j]))


def _radial_level_init(n: int, d: int, band: SpectralBand) -> np.ndarray:
    """Warm start from the Chebyshev profile, expressed in level coordinates."""
    from .radial import radial_to_levels

    prof = radial_to_levels(chebyshev_radial_profile(n, d), max_level=band.high)
    c = prof.c[band.low : band.high + 1]
    return np.concatenate([c.real, c.imag])


def maximize_laplacian_ratio_radial(
    d: int, n: int, p: float, cfg: OptimizerConfig = OptimizerConfig()
) -> ExtremalResult:
    """Radial search for ||Delta f||_p/||f||_p over degree <= d, warm-started."""
    band = SpectralBand(0, d)
    init = _radial_level_init(n, d, band)
    return maximize_ratio(
        "laplacian", p, p, band, n, cfg, radial=True, inits=[init]
    )


def estimate_operator_norm(
    w: complex,
    p: float,
    n: int,
    cfg: OptimizerConfig = OptimizerConfig(),
    p_out: float | None = None,
    warm_start: np.ndarray | None = None,
) -> ExtremalResult:
    """Lower bound on ||w^Delta||_{L_p -> L_p} (or -> L_p_out) by search.

    Restart 0 is the constant function (ratio exactly 1 for L_p -> L_p), so
    estimates never fall below the trivial witness; pass `warm_start` (a
    parameter vector from a smaller n, cylinder-embedded by the caller) to
    enforce the monotonicity contract across dimensions.
    """
    if abs(w) > 1 + 1e-12:
        raise ValueError("|w| must be <= 1")
    const = np.zeros(2 * (1 << n))
    const[0] = 1.0
    inits = [const]
    if warm_start is not None:
        inits.append(warm_start)
    return maximize_ratio(
        "w_delta",
        p,
        p if p_out is None else p_out,
        SpectralBand(0, n),
        n,
        cfg,
        op_param=w,
        inits=inits,
    )


def embed_parameters(f: CubeFunction | Spectrum, n_new: int) -> np.ndarray:
    """Cylinder-embed a maximizer into dimension n_new as a warm start."""
    from .cube import fwht

    spec = fwht(f) if isinstance(f, CubeFunction) else f
    full = np.zeros(1 << n_new, dtype=np.complex128)
    full[: 1 << spec.n] = spec.coeffs  # masks of old coords keep their bit pattern
    return np.concatenate([full.real, full.imag])


def parse_n_rule(rule: str):
    """n rules for scans: 'd^2', '100*d^2', '4*d^2' or a plain integer."""
    rule = rule.replace(" ", "").replace("**2", "^2").replace("*d", "d")
    if rule.isdigit():
        val = int(rule)
        return lambda d: val
    if rule == "d^2":
        return lambda d: d * d
    if rule.endswith("d^2") and rule[:-3].isdigit():
        c = int(rule[:-3])
        return lambda d: c * d * d
    raise ValueError(f"cannot parse n rule {rule!r}")


def sharpness_scan(family: str, d_values, n_rule="100*d^2") -> list[dict]:
    """Witness-family scan: rows of (d, n, ratio, bound, ratio/bound).

    Families: MARKOV_D2 (Laplacian sup-norm ratio against d^2) and
    GRAD_INF_ENDPOINT (gradient sup-norm ratio against 2d). The radial path
    keeps this O(n) per point, so n in the tens of thousands is fine.
    """
    rule = parse_n_rule(n_rule) if isinstance(n_rule, str) else n_rule
    rows = []
    for d in d_values:
        n = int(rule(d))
        wit = chebyshev_radial_profile(n, d)
        sup = radial_lp_norm(wit, math.inf)
        closed = (n / 2.0) * (1.0 - chebyshev_t(d, 1.0 - 2.0 / n))
        if family == "MARKOV_D2":
            ratio = radial_lp_norm(radial_laplacian(wit), math.inf) / sup
            bound = float(d * d)
        elif family == "GRAD_INF_ENDPOINT":
            ratio = radial_lp_norm(radial_gradient_norm(wit), math.inf) / sup
            bound = 2.0 * d
            closed = closed / math.sqrt(n)  # sqrt(n)/2 * (1 - T_d(1-2/n))
        else:
            raise ValueError(f"no radial witness registered for family {family!r}")
        rows.append(
            {
                "d": d,
                "n": n,
                "ratio": ratio,
                "bound": bound,
                "ratio_over_bound": ratio / bound,
                "closed_form": closed,
            }
        )
    return rows
