"""Theorem registry and randomized/witness-based verification harness.

Each registered check draws seeded random band-limited functions (or a named
extremal witness), evaluates both sides of the inequality with the module
operators and the closed-form bound registry, and reports the worst ratio.

Ratio orientation is always lhs/rhs with "pass" meaning worst <= 1 + tol.
Equivalence checks (PARSEVAL, HEAT_EQUIV) report discrepancy divided by the
target tolerance in the same slot. Measured-constant checks never fail; they
record the empirical constant (max of lhs/shape for upper-bound forms, min
for the reverse inequalities REV_GRAD and DELTA_HALF_RATIO).
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import analysis, classical, extremal, operators
from .classical import LensDomain, bound_value, chebyshev_t, theta_and_radius
from .cube import (
    SCALAR,
    CubeFunction,
    SpectralBand,
    Spectrum,
    TargetSpace,
    character,
    fwht,
    function_from_json,
    ifwht,
    random_function,
    trial_rng,
)
from .radial import (
    RadialFunction,
    radial_gradient_norm,
    radial_heat,
    radial_laplacian,
    radial_lp_norm,
    radial_mean,
    radial_to_cube,
)

DEFAULT_T_GRID = (0.1, 0.25, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0)
DEFAULT_TOL = 1e-9
HEAT_EQUIV_TOL = 1e-10
PARSEVAL_TOL = 1e-12
CONTRACTION_TOL = 1e-6

MEASURED_MIN = {"REV_GRAD", "DELTA_HALF_RATIO"}
MEASURED_MAX = {"ENTROPY_RATIO", "GRAD_SCALAR", "INFLUENCE", "GRAD_DECAY_LP"}
MEASURED_IDS = MEASURED_MIN | MEASURED_MAX


# ---------------------------------------------------------------------------
# Radial-aware functional helpers (witness evaluation reuses the fast path)
# ---------------------------------------------------------------------------


def _lp(f, p):
    return radial_lp_norm(f, p) if isinstance(f, RadialFunction) else analysis.lp_norm(f, p)


def _lap(f):
    return radial_laplacian(f) if isinstance(f, RadialFunction) else operators.laplacian(f)


def _heat(f, t, d=None):
    if isinstance(f, RadialFunction):
        return radial_heat(f, t, max_level=d)
    return operators.heat(f, t)


def _grad_norm(f):
    return radial_gradient_norm(f) if isinstance(f, RadialFunction) else operators.gradient_norm(f)


def _centered_norm(f, p):
    if isinstance(f, RadialFunction):
        mu = radial_mean(f)
        return radial_lp_norm(RadialFunction(f.n, f.phi - mu), p)
    return analysis.lp_norm(CubeFunction(f.n, f.target, f.values - f.mean()), p)


# ---------------------------------------------------------------------------
# Check specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckSpec:
    theorem: str
    n: int = 6
    d: int | None = None
    m: int | None = None
    k: int | None = None
    p: float | None = None
    q: float | None = None
    beta: float | None = None
    t_grid: tuple = DEFAULT_T_GRID
    trials: int = 200
    seed: int = 0
    target: TargetSpace = SCALAR
    witness_only: bool = False
    tol: float | None = None
    threads: int = 1

    def effective_tol(self) -> float:
        if self.tol is not None:
            return self.tol
        if self.theorem in ("WEISSLER_CONTRACTION", "BECKNER_CONTRACTION"):
            return CONTRACTION_TOL
        return DEFAULT_TOL


@dataclass
class CheckReport:
    spec: CheckSpec
    worst_ratio: float
    mean_ratio: float
    passed: bool
    measured_constant: float | None
    witness: dict | None
    discarded: int
    runtime_ms: int

    def to_json_dict(self, timing: bool = False) -> dict:
        return {
            "theorem": self.spec.theorem,
            "params": _params_echo(self.spec),
            "trials": self.spec.trials,
            "worst_ratio": self.worst_ratio,
            "mean_ratio": self.mean_ratio,
            "pass": self.passed,
            "measured_constant": self.measured_constant,
            "witness": self.witness,
            "seed": self.spec.seed,
            "discarded": self.discarded,
            "runtime_ms": self.runtime_ms if timing else 0,
        }

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_json_dict(timing=timing), indent=2)


def _num(x):
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _params_echo(spec: CheckSpec) -> dict:
    tgt = {"kind": spec.target.kind}
    if not spec.target.is_scalar:
        tgt["q"] = _num(spec.target.q)
        tgt["m"] = spec.target.m
    return {
        "n": spec.n,
        "d": spec.d,
        "m": spec.m,
        "k": spec.k,
        "p": _num(spec.p),
        "q": _num(spec.q),
        "beta": spec.beta,
        "t_grid": list(spec.t_grid),
        "target": tgt,
        "tol": spec.effective_tol(),
        "witness_only": spec.witness_only,
    }


# ---------------------------------------------------------------------------
# Per-theorem definitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TheoremDef:
    hypothesis: str
    kind: str  # proven | measured | equivalence | optimizer | gridcheck
    band: object = None  # callable spec -> SpectralBand, None for non-trial checks
    evaluate: object = None  # callable (spec, f) -> list of (lhs, rhs, at)
    validate: object = None
    scalar_only: bool = False


def _need(cond, msg):
    if not cond:
        raise ValueError(msg)


def _finite_p(spec, lo=1.0, hi=math.inf, closed_hi=False):
    _need(spec.p is not None, f"{spec.theorem} needs p")
    ok_hi = spec.p <= hi if closed_hi else spec.p < hi
    _need(spec.p >= lo and ok_hi, f"{spec.theorem}: p out of range")


def _need_d(spec):
    _need(spec.d is not None and 1 <= spec.d <= spec.n, f"{spec.theorem}: needs 1 <= d <= n")


def _band_degree(spec):
    return SpectralBand(0, spec.d)


def _band_tail(spec):
    return SpectralBand(spec.d, spec.n)


def _band_window(spec):
    return SpectralBand(spec.d, spec.d + spec.m)


def _band_full(spec):
    return SpectralBand(0, spec.n)


def _ts(spec):
    return [t for t in spec.t_grid if t >= 0]


def _ev_heat_lower_general(spec, f):
    base = _lp(f, spec.p)
    out = []
    for t in _ts(spec):
        rhs = chebyshev_t(spec.d, math.exp(t)) * _lp(_heat(f, t, spec.d), spec.p)
        out.append((base, rhs, {"t": t}))
    return out


def _ev_moment_general(spec, f):
    rhs = bound_value("MOMENT_GENERAL", d=spec.d, p=spec.p, q=spec.q) * _lp(f, spec.q)
    return [(_lp(f, spec.p), rhs, {})]


def _ev_pisier(factor):
    def ev(spec, f):
        rhs = factor(spec) * analysis.dual_gradient_functional(f, spec.p)
        return [(_centered_norm(f, spec.p), rhs, {})]

    return ev


def _ev_markov_d2(spec, f):
    return [(_lp(_lap(f), spec.p), spec.d**2 * _lp(f, spec.p), {})]


def _ev_markov_higher(spec, f):
    lhs = _lp(operators.falling_laplacian(f, spec.k), spec.p)
    return [(lhs, bound_value("MARKOV_HIGHER_K", d=spec.d, k=spec.k) * _lp(f, spec.p), {})]


def _ev_chsqrt(spec, f):
    out = []
    for t in _ts(spec):
        if t == 0:
            continue
        lhs = chebyshev_t(spec.d, math.exp(t))
        out.append((lhs, bound_value("CHSQRT", d=spec.d, t=t), {"t": t}))
    return out


def _ev_heat_lower_scalar(spec, f):
    base = _lp(f, spec.p)
    out = []
    for t in _ts(spec):
        lhs = bound_value("HEAT_LOWER_SCALAR", d=spec.d, p=spec.p, t=t) * base
        out.append((lhs, _lp(_heat(f, t, spec.d), spec.p), {"t": t}))
    return out


def _ev_heat_upper_tail(spec, f):
    base = _lp(f, spec.p)
    out = []
    for t in _ts(spec):
        rhs = bound_value("HEAT_UPPER_TAIL", d=spec.d, p=spec.p, t=t) * base
        out.append((_lp(_heat(f, t), spec.p), rhs, {"t": t}))
    return out


def _ev_moment_scalar(spec, f):
    rhs = bound_value("MOMENT_SCALAR", d=spec.d, p=spec.p, q=spec.q) * _lp(f, spec.q)
    return [(_lp(f, spec.p), rhs, {})]


def _ev_l1l2(spec, f):
    return [(_lp(f, 2.0), bound_value("L1L2", d=spec.d) * _lp(f, 1.0), {})]


def _ev_sqrt_pminus1(spec, f):
    rhs = bound_value("SQRT_PMINUS1", d=spec.d, p=spec.p) * _lp(f, 2.0)
    return [(_lp(f, spec.p), rhs, {})]


def _ev_bonami(spec, f):
    t_c = bound_value("BONAMI", p=spec.p, q=spec.q)
    ts = sorted({max(t, t_c) for t in _ts(spec)} | {t_c})
    base = _lp(f, spec.q)
    return [(_lp(_heat(f, t), spec.p), base, {"t": t}) for t in ts]


def _ev_laplacian_scalar(spec, f):
    rhs = bound_value("LAPLACIAN_SCALAR", d=spec.d, p=spec.p) * _lp(f, spec.p)
    return [(_lp(_lap(f), spec.p), rhs, {})]


def _ev_grad_inf(spec, f):
    rhs = bound_value("GRAD_INF_ENDPOINT", d=spec.d) * _lp(f, math.inf)
    return [(_lp(_grad_norm(f), math.inf), rhs, {})]


def _ev_grad_l1(spec, f):
    rhs = bound_value("GRAD_L1_ENDPOINT", d=spec.d) * _lp(f, 1.0)
    return [(_lp(_grad_norm(f), 1.0), rhs, {})]


def _ev_heat_grad_decay_inf(spec, f):
    base = _lp(f, math.inf)
    out = []
    for t in _ts(spec):
        if t <= 0:
            continue
        rhs = bound_value("HEAT_GRAD_DECAY_INF", t=t) * base
        out.append((_lp(_grad_norm(_heat(f, t)), math.inf), rhs, {"t": t}))
    return out


def _ev_naos(spec, f):
    beta = spec.beta if spec.beta is not None else 0.5
    lhs = _lp(operators.fractional_laplacian(f, beta), spec.p)
    rhs = bound_value(
        "NAOS_INTERP", beta=beta, delta_norm=_lp(_lap(f), spec.p), g_norm=_lp(f, spec.p)
    )
    return [(lhs, rhs, {"beta": beta})]


def _ev_parseval(spec, f):
    return [(analysis.parseval_gap(f), PARSEVAL_TOL, {})]


def _ev_heat_equiv(spec, f):
    out = []
    for t in _ts(spec):
        a = operators.heat(f, t)
        b = operators.heat_probabilistic(f, t)
        disc = float(f.target.norm(a.values - b.values).max())
        out.append((disc, HEAT_EQUIV_TOL, {"t": t}))
    return out


def _ev_rev_grad(spec, f):
    shape = bound_value("REV_GRAD", d=spec.d, m=spec.m) * _lp(f, spec.p)
    return [(_lp(_grad_norm(f), spec.p), shape, {})]


def _ev_delta_half(spec, f):
    shape = bound_value("REV_GRAD", d=spec.d, m=spec.m) * _lp(f, spec.p)
    return [(_lp(operators.fractional_laplacian(f, 0.5), spec.p), shape, {})]


def _qth_moment(f, q):
    """E ||f||_X^q, valid for any q > 0 (quasi-norm range included)."""
    if isinstance(f, RadialFunction):
        return radial_lp_norm(RadialFunction(f.n, np.abs(f.phi) ** q), 1.0)
    return float((f.pointwise_norms() ** q).mean())


def _ev_entropy_ratio(spec, f):
    q = spec.q if spec.q is not None else 2.0
    shape = spec.d * _qth_moment(f, q)
    return [(analysis.entropy(f, q), shape, {"q": q})]


def _ev_grad_scalar(spec, f):
    shape = bound_value("GRAD_SCALAR", d=spec.d, p=spec.p) * _lp(f, spec.p)
    return [(_lp(_grad_norm(f), spec.p), shape, {})]


def _ev_influence(spec, f):
    shape = bound_value("INFLUENCE", d=spec.d, p=spec.p) * _lp(f, math.inf) ** spec.p
    return [(analysis.influence(f, spec.p), shape, {})]


def _ev_grad_decay_lp(spec, f):
    base = _lp(f, spec.p)
    out = []
    for t in _ts(spec):
        if t <= 0:
            continue
        shape = base / math.expm1(spec.p * t) ** (1.0 / spec.p)
        out.append((_lp(_grad_norm(_heat(f, t)), spec.p), shape, {"t": t}))
    return out


def _val_moment(spec):
    _need(spec.q is not None and spec.p is not None and spec.p > spec.q > 1,
          f"{spec.theorem}: moment comparison requires p > q > 1")
    _need_d(spec)


def _val_window(spec):
    _need_d(spec)
    _need(spec.m is not None and spec.m >= 1 and spec.d + spec.m <= spec.n,
          f"{spec.theorem}: needs bandwidth m >= 1 with d + m <= n")
    _finite_p(spec, lo=1.0 + 1e-12)


THEOREMS: dict[str, TheoremDef] = {
    "HEAT_LOWER_GENERAL": TheoremDef(
        "degree <= d, any Banach target, p in [1,inf], t >= 0: ||e^{-tD}f||_p >= ||f||_p / T_d(e^t)",
        "proven", _band_degree, _ev_heat_lower_general,
        lambda s: (_need_d(s), _finite_p(s, closed_hi=True)),
    ),
    "MOMENT_GENERAL": TheoremDef(
        "degree <= d, any Banach target, p > q > 1: ||f||_p <= T_d(sqrt((p-1)/(q-1))) ||f||_q",
        "proven", _band_degree, _ev_moment_general, _val_moment,
    ),
    "PISIER_LOWDEG": TheoremDef(
        "degree <= d, p in [1,inf): ||f - mean||_p <= 3(log d + 1) * dual gradient functional",
        "proven", _band_degree, _ev_pisier(lambda s: 3.0 * (math.log(s.d) + 1.0)),
        lambda s: (_need_d(s), _finite_p(s), _need(s.n <= 10, "PISIER checks cap n at 10 (O(4^n) functional)")),
    ),
    "PISIER_FULL": TheoremDef(
        "any f, p in [1,inf): ||f - mean||_p <= (log n + 1) * dual gradient functional",
        "proven", _band_full, _ev_pisier(lambda s: math.log(s.n) + 1.0),
        lambda s: (_finite_p(s), _need(s.n <= 10, "PISIER checks cap n at 10 (O(4^n) functional)")),
    ),
    "MARKOV_D2": TheoremDef(
        "degree <= d, any Banach target, p in [1,inf]: ||Delta f||_p <= d^2 ||f||_p",
        "proven", _band_degree, _ev_markov_d2,
        lambda s: (_need_d(s), _finite_p(s, closed_hi=True)),
    ),
    "MARKOV_HIGHER_K": TheoremDef(
        "degree <= d, 1 <= k <= d: ||D(D-1)...(D-k+1) f||_p <= T_d^(k)(1) ||f||_p "
        "(k > d degenerates to a zero bound)",
        "proven", _band_degree, _ev_markov_higher,
        lambda s: (_need_d(s), _finite_p(s, closed_hi=True),
                   _need(s.k is not None and 1 <= s.k <= s.d,
                         "needs derivative order 1 <= k <= d")),
    ),
    "CHSQRT": TheoremDef(
        "d >= 1, t > 0: T_d(e^t) <= e^{3 max(t, sqrt t) d} (1-D grid check)",
        "gridcheck", None, _ev_chsqrt, lambda s: _need(s.d is not None and s.d >= 1, "needs d >= 1"),
    ),
    "HEAT_LOWER_SCALAR": TheoremDef(
        "scalar, degree <= d, p in (1,inf): heat decay lower bound with the exterior lens factor",
        "proven", _band_degree, _ev_heat_lower_scalar,
        lambda s: (_need_d(s), _finite_p(s, lo=1.0 + 1e-12)), scalar_only=True,
    ),
    "HEAT_UPPER_TAIL": TheoremDef(
        "scalar, d-th tail space, p in (1,inf): heat decay upper bound with the interior lens factor",
        "proven", _band_tail, _ev_heat_upper_tail,
        lambda s: (_need_d(s), _finite_p(s, lo=1.0 + 1e-12)), scalar_only=True,
    ),
    "MOMENT_SCALAR": TheoremDef(
        "scalar, degree <= d, p > q > 1: lens-sharpened moment comparison",
        "proven", _band_degree, _ev_moment_scalar, _val_moment, scalar_only=True,
    ),
    "L1L2": TheoremDef(
        "scalar, degree <= d: ||f||_2 <= 2.69076^d ||f||_1",
        "proven", _band_degree, _ev_l1l2, _need_d, scalar_only=True,
    ),
    "SQRT_PMINUS1": TheoremDef(
        "scalar, degree <= d, p > 2: ||f||_p <= (p-1)^{d/2} ||f||_2",
        "proven", _band_degree, _ev_sqrt_pminus1,
        lambda s: (_need_d(s), _need(s.p is not None and s.p > 2, "needs p > 2")), scalar_only=True,
    ),
    "BONAMI": TheoremDef(
        "any target, p > q > 1, t >= (1/2) log((p-1)/(q-1)): ||e^{-tD}f||_p <= ||f||_q",
        "proven", _band_full, _ev_bonami,
        lambda s: _need(s.p is not None and s.q is not None and s.p > s.q > 1,
                        "hypercontractivity requires p > q > 1"),
    ),
    "LAPLACIAN_SCALAR": TheoremDef(
        "scalar, degree <= d, p in [1,inf]: ||Delta f||_p <= 10 d^{2-theta_p/pi} ||f||_p",
        "proven", _band_degree, _ev_laplacian_scalar,
        lambda s: (_need_d(s), _finite_p(s, closed_hi=True)), scalar_only=True,
    ),
    "GRAD_INF_ENDPOINT": TheoremDef(
        "scalar, degree <= d: ||grad f||_inf <= 2d ||f||_inf",
        "proven", _band_degree, _ev_grad_inf, _need_d, scalar_only=True,
    ),
    "GRAD_L1_ENDPOINT": TheoremDef(
        "scalar, degree <= d: ||grad f||_1 <= 2.69076^d sqrt(d) ||f||_1",
        "proven", _band_degree, _ev_grad_l1, _need_d, scalar_only=True,
    ),
    "HEAT_GRAD_DECAY_INF": TheoremDef(
        "scalar, any f, t > 0: ||grad e^{-tD} f||_inf <= ||f||_inf / sqrt(e^{2t}-1)",
        "proven", _band_full, _ev_heat_grad_decay_inf, None, scalar_only=True,
    ),
    "NAOS_INTERP": TheoremDef(
        "any target, beta in (0,1): ||D^beta g||_p <= 4 ||D g||_p^beta ||g||_p^{1-beta}",
        "proven", lambda s: _band_degree(s) if s.d else _band_full(s), _ev_naos,
        lambda s: _finite_p(s, closed_hi=True),
    ),
    "PARSEVAL": TheoremDef(
        "scalar: relative gap between ||f||_2^2 and sum |f-hat|^2, target 1e-12",
        "equivalence", _band_full, _ev_parseval, None, scalar_only=True,
    ),
    "HEAT_EQUIV": TheoremDef(
        "any target, t >= 0: spectral heat vs exact mixture enumeration, target 1e-10",
        "equivalence", _band_full, _ev_heat_equiv,
        lambda s: _need(s.n <= 10, "heat oracle caps n at 10 (O(n 4^n))"),
    ),
    "REV_GRAD": TheoremDef(
        "scalar, band [d, d+m], p in (1,inf): measures c_p in ||grad f||_p >= c_p sqrt(d/m) ||f||_p",
        "measured", _band_window, _ev_rev_grad, _val_window, scalar_only=True,
    ),
    "DELTA_HALF_RATIO": TheoremDef(
        "any target, band [d, d+m], p in (1,inf): measures c in ||D^{1/2} f||_p >= c sqrt(d/m) ||f||_p",
        "measured", _band_window, _ev_delta_half, _val_window,
    ),
    "ENTROPY_RATIO": TheoremDef(
        "any target, degree <= d, q > 0: measures C_q in Ent(||f||^q) <= C_q d ||f||_q^q",
        "measured", _band_degree, _ev_entropy_ratio,
        lambda s: (_need_d(s), _need(s.q is None or s.q > 0, "needs q > 0")),
    ),
    "GRAD_SCALAR": TheoremDef(
        "scalar, degree <= d, p in (1,inf): measures C_p against the two-case degree shape",
        "measured", _band_degree, _ev_grad_scalar,
        lambda s: (_need_d(s), _finite_p(s, lo=1.0 + 1e-12)), scalar_only=True,
    ),
    "INFLUENCE": TheoremDef(
        "scalar, degree <= d, p in (1,4/3): measures K_p in Inf^p f <= K_p d^{2-theta_p/(2pi)} ||f||_inf^p",
        "measured", _band_degree, _ev_influence,
        lambda s: (_need_d(s), _need(s.p is not None and 1 < s.p < 4.0 / 3.0, "needs p in (1, 4/3)")),
        scalar_only=True,
    ),
    "GRAD_DECAY_LP": TheoremDef(
        "scalar, any f, p in (1,2], t > 0: measures A_p in ||grad e^{-tD} f||_p <= A_p (e^{pt}-1)^{-1/p} ||f||_p",
        "measured", _band_full, _ev_grad_decay_lp,
        lambda s: _need(s.p is not None and 1 < s.p <= 2, "needs p in (1, 2]"), scalar_only=True,
    ),
    "WEISSLER_CONTRACTION": TheoremDef(
        "scalar, p in (1,inf): lower-bound estimates of ||w^Delta||_{p->p} for sampled w in the lens of r_p",
        "optimizer", None, None, lambda s: _finite_p(s, lo=1.0 + 1e-12), scalar_only=True,
    ),
    "BECKNER_CONTRACTION": TheoremDef(
        "scalar, p > 2: lower-bound estimates of ||w^Delta||_{p->p*} for sampled w in the two-focus domain",
        "optimizer", None, None,
        lambda s: _need(s.p is not None and s.p > 2, "needs p > 2"), scalar_only=True,
    ),
}

THEOREM_IDS = frozenset(THEOREMS)


def hypothesis_line(theorem: str) -> str:
    return THEOREMS[theorem].hypothesis


# ---------------------------------------------------------------------------
# Witness registry
# ---------------------------------------------------------------------------


def witness(theorem: str, n: int, d: int, m_dim: int | None = None):
    """Named extremal families, radial where possible.

    MARKOV_D2 / LAPLACIAN_SCALAR / GRAD_* use the radial Chebyshev profile
    T_d of the normalized coordinate sum; HEAT_* use the top character; the
    Maurey-Pisier two-variable construction (target l_inf^{2^n}) backs the
    vector-valued sharpness of the d^2 bound.
    """
    if theorem in ("MARKOV_D2", "LAPLACIAN_SCALAR", "GRAD_INF_ENDPOINT",
                   "GRAD_L1_ENDPOINT", "GRAD_SCALAR", "CHEBYSHEV_RADIAL"):
        return extremal.chebyshev_radial_profile(n, d)
    if theorem in ("HEAT_LOWER_GENERAL", "HEAT_LOWER_SCALAR", "HEAT_UPPER_TAIL",
                   "CHARACTER"):
        return character(n, (1 << d) - 1)
    if theorem in ("COTYPE", "MAUREY_PISIER"):
        size = 1 << n
        idx = np.arange(size, dtype=np.uint32)
        overlap = n - 2.0 * np.bitwise_count(idx[:, None] ^ idx[None, :]).astype(float)
        tab = np.vectorize(lambda s: chebyshev_t(d, s / n))(overlap)
        return CubeFunction(n, TargetSpace("lq", math.inf, size), tab.astype(np.complex128))
    raise KeyError(f"no registered witness for {theorem!r}")


# ---------------------------------------------------------------------------
# The harness
# ---------------------------------------------------------------------------


def _draw_trial(spec: CheckSpec, band: SpectralBand, trial: int) -> CubeFunction:
    f = random_function(spec.n, band, spec.target, spec.seed, trial)
    if band.high >= band.low and band.high > 0:
        # degree-exact draws: the top level must carry mass, else d is vacuous
        s = fwht(f)
        from .cube import levels as _levels

        top = s.coeff_magnitudes()[_levels(spec.n) == band.high]
        if top.size and top.max() <= 1e-13:
            raise RuntimeError("degenerate draw: empty top level")
    return f


def _serialize_witness(f, trial, at, ratio):
    doc = {"trial": trial, "at": {k: _num(v) for k, v in at.items()}, "ratio": ratio}
    if isinstance(f, RadialFunction):
        doc["form"] = "radial"
        doc["function"] = f.to_json_dict()
    else:
        doc["form"] = "cube"
        doc["function"] = f.to_json_dict()
    return doc


def _sample_w(spec: CheckSpec, trial: int) -> complex:
    rng = trial_rng(spec.seed, trial)
    if spec.theorem == "WEISSLER_CONTRACTION":
        _, r_p = theta_and_radius(spec.p)
        dom = LensDomain(r_p)
        top = r_p - dom.focus
        while True:
            w = complex(rng.uniform(-1, 1), rng.uniform(-top, top))
            if dom.classify(w) == "interior":
                return w
    c = (spec.p - 2.0) / (2.0 * (spec.p - 1.0))
    radius = spec.p / (2.0 * (spec.p - 1.0))
    span_re, span_im = radius - c, math.sqrt(radius * radius - c * c)
    while True:
        w = complex(rng.uniform(-span_re, span_re), rng.uniform(-span_im, span_im))
        if max(abs(w - c), abs(w + c)) < radius * (1 - 1e-9):
            return w


def _run_optimizer_check(spec: CheckSpec, t0: float) -> CheckReport:
    p_out = spec.p if spec.theorem == "WEISSLER_CONTRACTION" else spec.p / (spec.p - 1.0)
    cfg = extremal.OptimizerConfig(restarts=3, max_iters=100)
    ratios, witness_doc, worst = [], None, -math.inf
    for trial in range(spec.trials):
        w = _sample_w(spec, trial)
        seed = int(np.random.SeedSequence(entropy=spec.seed, spawn_key=(trial,)).generate_state(1)[0])
        res = extremal.estimate_operator_norm(w, spec.p, spec.n, replace(cfg, seed=seed), p_out=p_out)
        ratios.append(res.ratio)
        if res.ratio > worst:
            worst = res.ratio
            witness_doc = _serialize_witness(
                res.function, trial, {"w_re": w.real, "w_im": w.imag}, res.ratio
            )
    tol = spec.effective_tol()
    return CheckReport(
        spec, worst, float(np.mean(ratios)), worst <= 1.0 + tol, None, witness_doc,
        0, int((time.perf_counter() - t0) * 1000),
    )


def run_check(spec: CheckSpec) -> CheckReport:
    """Run one registered check and assemble its report.

    Deterministic under (seed, trials): trial k always uses the substream
    spawned with spawn_key=(k,), whatever the thread count.
    """
    t0 = time.perf_counter()
    if spec.theorem not in THEOREMS:
        raise KeyError(f"unknown theorem id {spec.theorem!r}")
    td = THEOREMS[spec.theorem]
    if td.validate is not None:
        td.validate(spec)
    if td.scalar_only and not spec.target.is_scalar:
        raise ValueError(f"{spec.theorem} is scalar-valued; hypothesis: {td.hypothesis}")

    if td.kind == "optimizer":
        return _run_optimizer_check(spec, t0)

    if td.kind == "gridcheck":
        samples = td.evaluate(spec, None)
        ratios = [lhs / rhs for lhs, rhs, _ in samples]
        worst = max(ratios)
        passed = worst <= 1.0 + spec.effective_tol()
        return CheckReport(spec, worst, float(np.mean(ratios)), passed, None, None,
                           0, int((time.perf_counter() - t0) * 1000))

    band = td.band(spec)
    band.validate(spec.n)

    if spec.witness_only:
        funcs = [(0, witness(spec.theorem, spec.n, spec.d or 1))]
    else:
        indices = list(range(spec.trials))
        if spec.threads > 1:
            with ThreadPoolExecutor(max_workers=spec.threads) as ex:
                drawn = list(ex.map(lambda k: _draw_trial(spec, band, k), indices))
            funcs = list(zip(indices, drawn))
        else:
            funcs = [(k, _draw_trial(spec, band, k)) for k in indices]

    def eval_one(item):
        k, f = item
        return k, f, td.evaluate(spec, f)

    if spec.threads > 1 and not spec.witness_only:
        with ThreadPoolExecutor(max_workers=spec.threads) as ex:
            evaluated = list(ex.map(eval_one, funcs))
    else:
        evaluated = [eval_one(item) for item in funcs]

    minimizing = spec.theorem in MEASURED_MIN
    worst, worst_item, ratios, discarded = -math.inf, None, [], 0
    best_measured, best_item = (math.inf, None) if minimizing else (-math.inf, None)
    for k, f, samples in evaluated:
        trial_vals = []
        for lhs, rhs, at in samples:
            if not (math.isfinite(lhs) and math.isfinite(rhs)) or (rhs == 0.0 and lhs != 0.0):
                discarded += 1
                continue
            ratio = 0.0 if lhs == rhs == 0.0 else lhs / rhs
            trial_vals.append((ratio, at))
        if not trial_vals:
            continue
        top_ratio, top_at = max(trial_vals, key=lambda v: v[0])
        low_ratio, low_at = min(trial_vals, key=lambda v: v[0])
        ratios.append(top_ratio)
        if top_ratio > worst:
            worst, worst_item = top_ratio, (k, f, top_at, top_ratio)
        if minimizing:
            if low_ratio < best_measured:
                best_measured, best_item = low_ratio, (k, f, low_at, low_ratio)
        else:
            if top_ratio > best_measured:
                best_measured, best_item = top_ratio, (k, f, top_at, top_ratio)

    if worst_item is None:
        raise RuntimeError(f"{spec.theorem}: every trial was discarded")

    tol = spec.effective_tol()
    measured = None
    if td.kind == "measured":
        measured = best_measured
        passed = True
        wit = _serialize_witness(best_item[1], best_item[0], best_item[2], best_item[3])
    else:
        passed = worst <= 1.0 + tol
        wit = _serialize_witness(worst_item[1], worst_item[0], worst_item[2], worst_item[3])
    return CheckReport(spec, worst, float(np.mean(ratios)), passed, measured, wit,
                       discarded, int((time.perf_counter() - t0) * 1000))


def re_evaluate_witness(report: dict) -> float:
    """Recompute the recorded witness ratio from a serialized report."""
    spec = spec_from_params(report["theorem"], report["params"], report["seed"])
    wdoc = report["witness"]
    if wdoc["form"] == "radial":
        f = RadialFunction.from_json_dict(wdoc["function"])
    else:
        f = function_from_json(wdoc["function"])
    td = THEOREMS[spec.theorem]
    samples = td.evaluate(spec, f)
    target_at = wdoc["at"]
    best = None
    for lhs, rhs, at in samples:
        if {k: _num(v) for k, v in at.items()} == target_at:
            best = lhs / rhs if rhs != 0 else (0.0 if lhs == 0 else math.inf)
    if best is None:
        raise ValueError("witness evaluation point not found in report")
    return best


def _p_from_json(v):
    return math.inf if v == "inf" else v


def spec_from_params(theorem: str, params: dict, seed: int = 0) -> CheckSpec:
    tgt = params.get("target", {"kind": "scalar"})
    if tgt.get("kind") == "scalar":
        target = SCALAR
    else:
        target = TargetSpace("lq", _p_from_json(tgt["q"]), tgt["m"])
    return CheckSpec(
        theorem=theorem,
        n=params["n"],
        d=params.get("d"),
        m=params.get("m"),
        k=params.get("k"),
        p=_p_from_json(params.get("p")),
        q=_p_from_json(params.get("q")),
        beta=params.get("beta"),
        t_grid=tuple(params.get("t_grid", DEFAULT_T_GRID)),
        trials=params.get("trials", 200),
        seed=seed,
        target=target,
        witness_only=params.get("witness_only", False),
        tol=params.get("tol"),
    )


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

SWEEP_AXES = ("n", "d", "m", "k", "p", "q", "t", "trials")


def sweep(template: CheckSpec, axis: str, values) -> list[CheckReport]:
    """Run the template across axis values; per-point seed is seed XOR index."""
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}")
    reports = []
    for i, v in enumerate(values):
        kwargs = {"seed": template.seed ^ i}
        if axis == "t":
            kwargs["t_grid"] = (v,)
        else:
            kwargs[axis] = v
        try:
            reports.append(run_check(replace(template, **kwargs)))
        except (ValueError, RuntimeError, KeyError) as exc:
            reports.append(exc)
    return reports


CSV_COLUMNS = [
    "theorem", "n", "d", "m", "k", "p", "q", "trials", "seed",
    "worst_ratio", "mean_ratio", "pass", "measured_constant", "error",
]


def reports_to_csv(reports) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for rep in reports:
        if isinstance(rep, Exception):
            lines.append(",".join([""] * (len(CSV_COLUMNS) - 1) + [str(rep).replace(",", ";")]))
            continue
        s = rep.spec
        row = [
            s.theorem, s.n, s.d, s.m, s.k, _num(s.p), _num(s.q), s.trials, s.seed,
            repr(rep.worst_ratio), repr(rep.mean_ratio), rep.passed,
            "" if rep.measured_constant is None else repr(rep.measured_constant), "",
        ]
        lines.append(",".join("" if x is None else str(x) for x in row))
    return "\n".join(lines) + "\n"
