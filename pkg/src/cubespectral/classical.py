"""Chebyshev polynomials, lens-domain geometry and closed-form bound values.

Everything in here is plain one-dimensional real/complex arithmetic: no cube
data. The bound registry maps a bound id to its closed-form right-hand-side
factor; the verification harness pairs those factors with cube functionals.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# Constant of the L1-L2 moment comparison theorem (the proven statement uses
# this value; moment_comp1_constant() computes the sharper grid infimum).
L1L2_CONSTANT = 2.69076


# ---------------------------------------------------------------------------
# Chebyshev polynomials
# ---------------------------------------------------------------------------


def chebyshev_t(d: int, z):
    """T_d(z) for real or complex z.

    Uses the cosine form on [-1,1], the growth identity
    ((z + sqrt(z^2-1))^d + (z - sqrt(z^2-1))^d)/2 outside (branch-independent),
    and plain complex arithmetic elsewhere.
    """
    if d < 0:
        raise ValueError("degree must be >= 0")
    if d == 0:
        return 1.0
    if isinstance(z, complex) and z.imag != 0.0:
        s = cmath.sqrt(z * z - 1.0)
        return ((z + s) ** d + (z - s) ** d) / 2.0
    x = z.real if isinstance(z, complex) else float(z)
    if abs(x) <= 1.0:
        return math.cos(d * math.acos(x))
    sign = 1.0 if x > 0 or d % 2 == 0 else -1.0
    y = abs(x)
    s = math.sqrt(y * y - 1.0)
    return sign * ((y + s) ** d + (y - s) ** d) / 2.0


def chebyshev_t_recurrence(d: int, z):
    """T_d by the three-term recurrence (agreement oracle for chebyshev_t)."""
    if d == 0:
        return 1.0
    prev, cur = 1.0, z
    for _ in range(d - 1):
        prev, cur = cur, 2 * z * cur - prev
    return cur


def chebyshev_coefficients(d: int) -> list[int]:
    """Integer monomial coefficients of T_d, low order first."""
    if d == 0:
        return [1]
    prev, cur = [1], [0, 1]
    for _ in range(d - 1):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


def chebyshev_deriv_at_one(d: int, k: int) -> int:
    """T_d^(k)(1) = d^2 (d^2-1) ... (d^2-(k-1)^2) / (1*3*...*(2k-1)), exactly."""
    if k < 1:
        raise ValueError("k must be >= 1")
    num = Fraction(1)
    for i in range(k):
        num *= Fraction(d * d - i * i, 2 * i + 1)
    assert num.denominator == 1
    return int(num)


# ---------------------------------------------------------------------------
# Exponents and the lens domain
# ---------------------------------------------------------------------------


def theta_p(p: float) -> float:
    """Interior lens angle 2 arcsin(2 sqrt(p-1)/p); 0 at both endpoints p=1, inf."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if math.isinf(p):
        return 0.0
    arg = 2.0 * math.sqrt(p - 1.0) / p
    return 2.0 * math.asin(min(arg, 1.0))


def theta_and_radius(p: float) -> tuple[float, float]:
    """(theta_p, r_p) with r_p = p/(2 sqrt(p-1)); requires p in (1, inf)."""
    if not (1.0 < p < math.inf):
        raise ValueError("p must lie in (1, inf)")
    return theta_p(p), p / (2.0 * math.sqrt(p - 1.0))


@dataclass(frozen=True)
class LensDomain:
    """Intersection of the two discs of radius r centered at +-i sqrt(r^2-1)."""

    r: float

    def __post_init__(self):
        if self.r < 1.0:
            raise ValueError("r must be >= 1")

    @property
    def theta(self) -> float:
        return 2.0 * math.asin(1.0 / self.r)

    @property
    def focus(self) -> float:
        return math.sqrt(self.r * self.r - 1.0)

    def classify(self, w: complex, tol: float = 1e-12) -> str:
        dist = max(abs(w - 1j * self.focus), abs(w + 1j * self.focus))
        if abs(dist - self.r) <= tol * max(1.0, self.r):
            return "boundary"
        return "interior" if dist < self.r else "exterior"

    def boundary_points(self, count: int, corner_margin: float = 0.02) -> np.ndarray:
        """Points along both arcs, keeping a small margin off the corners +-1."""
        c, r = self.focus, self.r
        lo = math.atan2(c, 1.0)
        hi = math.pi - lo
        span = hi - lo
        angles = np.linspace(lo + corner_margin * span, hi - corner_margin * span,
                             max(count // 2, 2))
        upper = -1j * c + r * np.exp(1j * angles)
        return np.concatenate([upper, np.conj(upper)])


def _principal_power(z: complex, alpha: float) -> complex:
    if z.real <= 0.0 and abs(z.imag) < 1e-300:
        raise ValueError(f"point {z} falls on the branch cut (-inf, 0]")
    return cmath.exp(alpha * cmath.log(z))


def lens_map(r: float, w: complex, side: str = "interior") -> complex:
    """Conformal map of the lens (or its exterior) onto the (co-)disc.

    interior: psi1 o z^(pi/theta) o psi1 with psi1(z) = (1-z)/(1+z);
    exterior: psi2 o z^(pi/(2 pi - theta)) o psi2 with psi2(z) = (z+1)/(z-1).
    Both fix the normalization map(0) = 0 resp. infinity -> infinity.
    """
    dom = LensDomain(r)
    w = complex(w)
    where = dom.classify(w)
    if where == "boundary":
        raise ValueError(f"w={w} lies on the lens boundary (within 1e-12)")
    if side == "interior":
        if where != "interior":
            raise ValueError(f"w={w} is not inside the lens of r={r}")
        z = (1.0 - w) / (1.0 + w)
        z = _principal_power(z, math.pi / dom.theta)
        return (1.0 - z) / (1.0 + z)
    if side == "exterior":
        if where != "exterior":
            raise ValueError(f"w={w} is not outside the closed lens of r={r}")
        z = (w + 1.0) / (w - 1.0)
        z = _principal_power(z, math.pi / (2.0 * math.pi - dom.theta))
        return (z + 1.0) / (z - 1.0)
    raise ValueError("side must be 'interior' or 'exterior'")


def lens_interior_at_exp(theta: float, t: float) -> float:
    """Closed form of the interior map at w = e^{-t}."""
    a = math.pi / theta
    up, dn = (1.0 + math.exp(-t)) ** a, (1.0 - math.exp(-t)) ** a
    return (up - dn) / (up + dn)


def lens_exterior_at_exp(theta: float, t: float) -> float:
    """Closed form of the exterior map at w = e^{t}."""
    a = math.pi / (2.0 * math.pi - theta)
    up, dn = (math.exp(t) + 1.0) ** a, (math.exp(t) - 1.0) ** a
    return (up + dn) / (up - dn)


# ---------------------------------------------------------------------------
# Grid + refinement maximization (sound-side certificates)
# ---------------------------------------------------------------------------


def golden_max(fn, lo: float, hi: float, iters: int = 80):
    """Golden-section maximization of a unimodal-enough fn on [lo, hi]."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if b - a < 1e-14 * max(1.0, abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fn(d)
    return (c, fc) if fc >= fd else (d, fd)


def refined_max(fn, lo: float, hi: float, nodes: int = 4096):
    """Chebyshev-node grid scan plus one golden-section refinement pass.

    Returns (argmax, max). The grid value is a lower bound of the sup; the
    refinement recovers the local max around the grid argmax. fn may be
    vectorized over a numpy array (preferred) or scalar-only.
    """
    i = np.arange(nodes)
    xs = lo + (hi - lo) * (1.0 + np.cos(math.pi * i / (nodes - 1))) / 2.0
    try:
        vals = np.asarray(fn(xs), dtype=float)
        if vals.shape != xs.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.array([fn(x) for x in xs])
    k = int(np.argmax(vals))
    left = xs[min(k + 1, nodes - 1)]
    right = xs[max(k - 1, 0)]
    x_ref, f_ref = golden_max(fn, min(left, right), max(left, right))
    if f_ref >= vals[k]:
        return x_ref, f_ref
    return float(xs[k]), float(vals[k])


# ---------------------------------------------------------------------------
# Erdelyi's reverse Bernstein inequality for incomplete polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ErdelyiResult:
    lhs: float          # |P(1)|
    rhs: float          # 6 sqrt(m/d) * sup_{[0,1]} sqrt(1-x^2)|P'(x)|
    sup_point: float
    certificate: float  # relative width of the refinement certificate


def erdelyi_evaluate(coeffs, d: int, certificate: float = 1e-6) -> ErdelyiResult:
    """Evaluate both sides of |P(1)| <= 6 sqrt(m/d) ||sqrt(1-x^2) P'||_[0,1].

    coeffs are a_d, ..., a_{d+m} for P(x) = sum a_k x^k.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if d < 1:
        raise ValueError("d must be >= 1")
    m = len(coeffs) - 1
    lhs = abs(float(coeffs.sum()))
    if m == 0:
        if lhs > 0.0:
            raise ValueError("m=0 with P(1) != 0: the bound degenerates (m >= 1 required)")
        return ErdelyiResult(0.0, 0.0, 0.0, certificate)
    dcoeffs = np.zeros(d + m)  # coefficients of P', low order first
    ks = np.arange(d, d + m + 1)
    dcoeffs[d - 1 : d + m] = ks * coeffs

    def weighted(x):
        return np.sqrt(np.clip(1.0 - x * x, 0.0, None)) * np.abs(
            np.polynomial.polynomial.polyval(x, dcoeffs)
        )

    x_star, sup = refined_max(weighted, 0.0, 1.0)
    return ErdelyiResult(lhs, 6.0 * math.sqrt(m / d) * sup, x_star, certificate)


# ---------------------------------------------------------------------------
# Beckner-Weissler two-focus domain and the L1-L2 constant
# ---------------------------------------------------------------------------


def beckner_membership(p: float, w: complex) -> bool:
    """Whether w satisfies max|w -+ (p-2)/(2(p-1))| <= p/(2(p-1)), p > 2."""
    if p <= 2:
        raise ValueError("p must be > 2")
    c = (p - 2.0) / (2.0 * (p - 1.0))
    radius = p / (2.0 * (p - 1.0))
    slack = 1.0 + 4.0 * np.finfo(float).eps  # admits the exact boundary points
    return max(abs(w - c), abs(w + c)) <= radius * slack


def _l1l2_objective(p: float) -> float:
    a = math.pi / (2.0 * math.pi - theta_p(p))
    root = 1j * math.sqrt(p - 1.0)
    z1 = _principal_power(root - 1.0, a)
    z2 = _principal_power(root + 1.0, a)
    return abs((z1 + z2) / (z1 - z2)) ** (p / (2.0 * (p - 2.0)))


def moment_comp1_constant(grid_points: int = 10_000, details: bool = False):
    """Grid infimum over p > 2 of |phi_p(1)|^(p/(2(p-2))).

    Log-spaced grid on (2+1e-3, 1e3) with golden-section refinement around
    the grid minimizer; no optimality claim beyond the grid.
    """
    ps = np.exp(np.linspace(math.log(2.0 + 1e-3), math.log(1e3), grid_points))
    vals = np.array([_l1l2_objective(p) for p in ps])
    k = int(np.argmin(vals))
    lo, hi = ps[max(k - 1, 0)], ps[min(k + 1, grid_points - 1)]
    p_star, neg = golden_max(lambda p: -_l1l2_objective(p), lo, hi)
    best = min(float(vals[k]), -neg)
    p_best = p_star if -neg <= vals[k] else float(ps[k])
    if details:
        return best, {
            "p_star": p_best,
            "grid": {
                "points": grid_points,
                "lo": float(ps[0]),
                "hi": float(ps[-1]),
                "spacing": "log",
            },
        }
    return best


# ---------------------------------------------------------------------------
# Closed-form bound registry
# ---------------------------------------------------------------------------


def _require(params: dict, *names):
    missing = [x for x in names if params.get(x) is None]
    if missing:
        raise ValueError(f"missing parameters {missing}")
    return [params[x] for x in names]


def _heat_lower_general(params):
    d, t = _require(params, "d", "t")
    return 1.0 / chebyshev_t(d, math.exp(t))


def _moment_general(params):
    d, p, q = _require(params, "d", "p", "q")
    if not p > q > 1:
        raise ValueError("moment comparison requires p > q > 1")
    return float(chebyshev_t(d, math.sqrt((p - 1.0) / (q - 1.0))))


def _markov_higher(params):
    d, k = _require(params, "d", "k")
    return float(chebyshev_deriv_at_one(d, k))


def _chsqrt(params):
    d, t = _require(params, "d", "t")
    return math.exp(3.0 * max(t, math.sqrt(t)) * d)


def _heat_lower_scalar(params):
    d, p, t = _require(params, "d", "p", "t")
    return lens_exterior_at_exp(theta_p(p), t) ** (-d)


def _heat_upper_tail(params):
    d, p, t = _require(params, "d", "p", "t")
    return lens_interior_at_exp(theta_p(p), t) ** d


def _moment_scalar(params):
    d, p, q = _require(params, "d", "p", "q")
    if not p > q > 1:
        raise ValueError("moment comparison requires p > q > 1")
    a = math.pi / (2.0 * math.pi - theta_p(p))
    u, v = math.sqrt(p - 1.0) + math.sqrt(q - 1.0), math.sqrt(p - 1.0) - math.sqrt(q - 1.0)
    return ((u**a + v**a) / (u**a - v**a)) ** d


def _laplacian_scalar(params):
    d, p = _require(params, "d", "p")
    return 10.0 * d ** (2.0 - theta_p(p) / math.pi)


def _grad_scalar_shape(params):
    d, p = _require(params, "d", "p")
    if not 1 < p < math.inf:
        raise ValueError("p must lie in (1, inf)")
    if p < 2:
        return d ** (2.0 / p - theta_p(p) / (p * math.pi)) * math.log(d + 1.0)
    return d ** (1.0 - theta_p(p) / (2.0 * math.pi))


def _influence_shape(params):
    d, p = _require(params, "d", "p")
    if not 1 < p < 4.0 / 3.0:
        raise ValueError("influence bound requires p in (1, 4/3)")
    return d ** (2.0 - theta_p(p) / (2.0 * math.pi))


def _rev_grad(params):
    d, m = _require(params, "d", "m")
    if m < 1:
        raise ValueError("bandwidth m must be >= 1")
    return math.sqrt(d / m)


def _bonami(params):
    p, q = _require(params, "p", "q")
    if not p > q > 1:
        raise ValueError("hypercontractivity requires p > q > 1")
    return 0.5 * math.log((p - 1.0) / (q - 1.0))


def _sqrt_pminus1(params):
    d, p = _require(params, "d", "p")
    if p <= 2:
        raise ValueError("requires p > 2")
    return (p - 1.0) ** (d / 2.0)


def _grad_l1_endpoint(params):
    (d,) = _require(params, "d")
    return L1L2_CONSTANT**d * math.sqrt(d)


def _heat_grad_decay_inf(params):
    (t,) = _require(params, "t")
    if t <= 0:
        raise ValueError("t must be > 0")
    return 1.0 / math.sqrt(math.expm1(2.0 * t))


def _naos_interp(params):
    beta, dn, gn = _require(params, "beta", "delta_norm", "g_norm")
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0,1)")
    return 4.0 * dn**beta * gn ** (1.0 - beta)


BOUND_FORMULAS = {
    "HEAT_LOWER_GENERAL": _heat_lower_general,
    "MOMENT_GENERAL": _moment_general,
    "PISIER_LOWDEG": lambda p: 3.0 * (math.log(_require(p, "d")[0]) + 1.0),
    "MARKOV_D2": lambda p: float(_require(p, "d")[0]) ** 2,
    "MARKOV_HIGHER_K": _markov_higher,
    "CHSQRT": _chsqrt,
    "HEAT_LOWER_SCALAR": _heat_lower_scalar,
    "HEAT_UPPER_TAIL": _heat_upper_tail,
    "MOMENT_SCALAR": _moment_scalar,
    "L1L2": lambda p: L1L2_CONSTANT ** _require(p, "d")[0],
    "LAPLACIAN_SCALAR": _laplacian_scalar,
    "GRAD_SCALAR": _grad_scalar_shape,
    "INFLUENCE": _influence_shape,
    "REV_GRAD": _rev_grad,
    "BONAMI": _bonami,
    "SQRT_PMINUS1": _sqrt_pminus1,
    "GRAD_INF_ENDPOINT": lambda p: 2.0 * float(_require(p, "d")[0]),
    "GRAD_L1_ENDPOINT": _grad_l1_endpoint,
    "HEAT_GRAD_DECAY_INF": _heat_grad_decay_inf,
    "NAOS_INTERP": _naos_interp,
}

BOUND_IDS = frozenset(BOUND_FORMULAS)


def bound_value(bound_id: str, **params) -> float:
    """Closed-form RHS factor for a registered bound id. Pure arithmetic."""
    if bound_id not in BOUND_FORMULAS:
        raise KeyError(f"unknown bound id {bound_id!r}")
    return float(BOUND_FORMULAS[bound_id](params))
