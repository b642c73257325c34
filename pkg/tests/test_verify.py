import json
import math

import numpy as np
import pytest

from cubespectral import verify
from cubespectral.analysis import lp_norm
from cubespectral.classical import chebyshev_t
from cubespectral.cube import SCALAR, TargetSpace, character
from cubespectral.operators import heat, laplacian
from cubespectral.radial import RadialFunction
from cubespectral.verify import CheckSpec, run_check, sweep, witness


def test_registry_covers_spec_ids():
    required = {
        "HEAT_LOWER_GENERAL", "MOMENT_GENERAL", "PISIER_LOWDEG", "MARKOV_D2",
        "MARKOV_HIGHER_K", "CHSQRT", "HEAT_LOWER_SCALAR", "HEAT_UPPER_TAIL",
        "MOMENT_SCALAR", "L1L2", "LAPLACIAN_SCALAR", "GRAD_SCALAR", "INFLUENCE",
        "REV_GRAD", "BONAMI", "SQRT_PMINUS1", "GRAD_INF_ENDPOINT",
        "GRAD_L1_ENDPOINT", "HEAT_GRAD_DECAY_INF", "NAOS_INTERP",
        "PARSEVAL", "HEAT_EQUIV", "ENTROPY_RATIO", "DELTA_HALF_RATIO",
        "WEISSLER_CONTRACTION", "BECKNER_CONTRACTION", "PISIER_FULL",
    }
    assert required <= set(verify.THEOREMS)
    for tid in required:
        assert verify.hypothesis_line(tid)


def test_markov_d2_500_trials():
    rep = run_check(CheckSpec("MARKOV_D2", n=6, d=3, p=2.0, trials=500, seed=7))
    assert rep.passed
    assert rep.worst_ratio <= 1.0


def test_heat_equiv_check():
    rep = run_check(CheckSpec("HEAT_EQUIV", n=6, t_grid=(0.7,), trials=20, seed=1))
    assert rep.passed  # discrepancy under 1e-10


def test_bonami_explicit_example():
    rep = run_check(
        CheckSpec("BONAMI", n=5, p=4.0, q=2.0, t_grid=(0.5 * math.log(3),), trials=100, seed=2)
    )
    assert rep.passed


def test_heat_lower_general_vector_targets():
    for target in (TargetSpace("lq", 1.0, 3), TargetSpace("lq", math.inf, 3)):
        rep = run_check(
            CheckSpec("HEAT_LOWER_GENERAL", n=5, d=2, p=3.0, trials=60, seed=3, target=target)
        )
        assert rep.passed


def test_scalar_only_enforced():
    with pytest.raises(ValueError):
        run_check(CheckSpec("LAPLACIAN_SCALAR", n=5, d=2, p=2.0,
                            target=TargetSpace("lq", 2.0, 2)))


def test_hypothesis_validation_messages():
    with pytest.raises(ValueError):
        run_check(CheckSpec("BONAMI", n=4, p=2.0, q=3.0))  # p <= q
    with pytest.raises(ValueError):
        run_check(CheckSpec("MARKOV_D2", n=4, d=9, p=2.0))  # d > n
    with pytest.raises(ValueError):
        run_check(CheckSpec("INFLUENCE", n=4, d=2, p=2.0))  # p outside (1,4/3)
    with pytest.raises(KeyError):
        run_check(CheckSpec("NOT_A_THEOREM", n=4))


def test_measured_ids_always_pass_and_record_constant():
    rep = run_check(CheckSpec("GRAD_SCALAR", n=5, d=2, p=3.0, trials=40, seed=5))
    assert rep.passed and rep.measured_constant > 0
    rep = run_check(CheckSpec("DELTA_HALF_RATIO", n=6, d=2, m=2, p=2.0, trials=40, seed=6,
                              target=TargetSpace("lq", 1.0, 3)))
    assert rep.passed and rep.measured_constant > 0
    # reverse-inequality constants record the worst (smallest) observed ratio
    assert rep.measured_constant <= rep.worst_ratio


def test_witness_radial_chebyshev_profile():
    w = witness("MARKOV_D2", n=100, d=2)
    assert isinstance(w, RadialFunction)
    expect = [chebyshev_t(2, 1 - 2 * j / 100) for j in range(101)]
    assert np.abs(w.phi - np.array(expect)).max() < 1e-12


def test_witness_character_heat_equality():
    w = witness("HEAT_LOWER_GENERAL", n=6, d=3)
    t = 0.8
    assert lp_norm(heat(w, t), 2.0) == pytest.approx(math.exp(-3 * t), rel=1e-12)
    assert lp_norm(heat(w, t), math.inf) == pytest.approx(math.exp(-3 * t), rel=1e-12)


def test_maurey_pisier_witness_ratio():
    # two-variable construction with l_inf^{2^n} target at n = d^2, d = 2:
    # the Delta sup-ratio equals (n/2)(1 - T_d(1-2/n)) exactly here
    d, n = 2, 4
    F = witness("MAUREY_PISIER", n=n, d=d)
    assert F.target.q == math.inf and F.target.m == 16
    closed = (n / 2) * (1 - chebyshev_t(d, 1 - 2 / n))
    ratio = lp_norm(laplacian(F), math.inf) / lp_norm(F, math.inf)
    assert ratio == pytest.approx(closed, rel=1e-12)
    assert lp_norm(F, math.inf) == pytest.approx(1.0, abs=1e-12)


def test_witness_only_heat_checks():
    # the top character is the eigenfunction equality family for the heat
    # bounds in both orientations
    rep = run_check(CheckSpec("HEAT_LOWER_GENERAL", n=6, d=3, p=2.0,
                              t_grid=(0.5, 1.0), witness_only=True))
    assert rep.passed
    rep = run_check(CheckSpec("HEAT_UPPER_TAIL", n=6, d=6, p=2.0,
                              t_grid=(0.5, 1.0), witness_only=True))
    assert rep.passed
    assert rep.worst_ratio == pytest.approx(1.0, abs=1e-12)  # exact equality at p=2


def test_witness_only_run_markov():
    rep = run_check(CheckSpec("MARKOV_D2", n=400, d=2, p=math.inf, witness_only=True))
    closed = (400 / 2) * (1 - chebyshev_t(2, 1 - 2 / 400))
    assert rep.worst_ratio == pytest.approx(closed / 4.0, rel=1e-9)
    assert rep.witness["form"] == "radial"


def test_report_schema_and_roundtrip():
    rep = run_check(CheckSpec("L1L2", n=5, d=2, trials=30, seed=4))
    doc = rep.to_json_dict()
    for key in ("theorem", "params", "trials", "worst_ratio", "mean_ratio",
                "pass", "measured_constant", "witness", "seed", "runtime_ms"):
        assert key in doc
    assert doc["runtime_ms"] == 0  # deterministic default
    assert rep.to_json_dict(timing=True)["runtime_ms"] >= 0
    assert doc["pass"] == (doc["worst_ratio"] <= 1 + doc["params"]["tol"])


def test_witness_reproduces_worst_ratio():
    for thm, kw in (
        ("MARKOV_D2", dict(d=3, p=2.0)),
        ("HEAT_LOWER_SCALAR", dict(d=2, p=1.5)),
        ("MOMENT_GENERAL", dict(d=2, p=3.0, q=2.0)),
        ("ENTROPY_RATIO", dict(d=2, q=2.0)),
    ):
        rep = run_check(CheckSpec(thm, n=5, trials=40, seed=8, **kw))
        doc = json.loads(rep.to_json())
        again = verify.re_evaluate_witness(doc)
        assert again == pytest.approx(doc["witness"]["ratio"], rel=1e-9)


def test_determinism_same_seed_byte_identical():
    a = run_check(CheckSpec("MARKOV_D2", n=5, d=2, p=2.0, trials=50, seed=9)).to_json()
    b = run_check(CheckSpec("MARKOV_D2", n=5, d=2, p=2.0, trials=50, seed=9)).to_json()
    assert a == b


def test_determinism_across_threads():
    one = run_check(CheckSpec("MARKOV_D2", n=5, d=2, p=2.0, trials=64, seed=10, threads=1))
    eight = run_check(CheckSpec("MARKOV_D2", n=5, d=2, p=2.0, trials=64, seed=10, threads=8))
    assert abs(one.worst_ratio - eight.worst_ratio) <= 1e-12


def test_gridcheck_chsqrt():
    rep = run_check(CheckSpec("CHSQRT", d=16, t_grid=tuple(np.linspace(0.05, 3, 30))))
    assert rep.passed


def test_sweep_per_point_seeds_and_errors():
    template = CheckSpec("MARKOV_D2", n=5, d=2, p=2.0, trials=20, seed=6)
    reports = sweep(template, "d", [1, 2, 9])  # d=9 > n errors, sweep continues
    assert len(reports) == 3
    assert reports[0].spec.seed == 6 ^ 0
    assert reports[1].spec.seed == 6 ^ 1
    assert isinstance(reports[2], Exception)
    csv = verify.reports_to_csv(reports)
    lines = csv.strip().split("\n")
    assert lines[0].startswith("theorem,n,d,")
    assert len(lines) == 4


def test_sweep_t_axis():
    template = CheckSpec("HEAT_LOWER_GENERAL", n=4, d=2, p=2.0, trials=10, seed=0)
    reports = sweep(template, "t", [0.2, 1.0])
    assert all(r.passed for r in reports)
    assert reports[0].spec.t_grid == (0.2,)


def test_discarded_trials_counted():
    rep = run_check(CheckSpec("MARKOV_D2", n=5, d=2, p=2.0, trials=30, seed=11))
    assert rep.discarded == 0


def test_weissler_contraction_small():
    rep = run_check(CheckSpec("WEISSLER_CONTRACTION", n=3, p=4.0, trials=4, seed=12))
    assert rep.passed
    assert rep.worst_ratio <= 1 + 1e-6


def test_beckner_contraction_small():
    rep = run_check(CheckSpec("BECKNER_CONTRACTION", n=3, p=4.0, trials=4, seed=13))
    assert rep.passed
    assert rep.worst_ratio <= 1 + 1e-6


def test_naos_and_higher_markov_and_endpoints():
    assert run_check(CheckSpec("NAOS_INTERP", n=5, d=3, p=2.0, beta=0.5, trials=40, seed=1)).passed
    assert run_check(CheckSpec("MARKOV_HIGHER_K", n=5, d=3, k=2, p=2.0, trials=40, seed=2)).passed
    assert run_check(CheckSpec("GRAD_INF_ENDPOINT", n=5, d=2, trials=40, seed=3)).passed
    assert run_check(CheckSpec("GRAD_L1_ENDPOINT", n=5, d=2, trials=40, seed=4)).passed
    assert run_check(CheckSpec("HEAT_GRAD_DECAY_INF", n=5, t_grid=(0.3, 1.0), trials=40, seed=5)).passed
    assert run_check(CheckSpec("SQRT_PMINUS1", n=5, d=2, p=4.0, trials=40, seed=6)).passed
    assert run_check(CheckSpec("PISIER_LOWDEG", n=5, d=2, p=2.0, trials=30, seed=7)).passed
    assert run_check(CheckSpec("PISIER_FULL", n=5, p=2.0, trials=30, seed=8)).passed
    assert run_check(CheckSpec("PARSEVAL", n=6, trials=30, seed=9)).passed


def test_entropy_and_influence_and_decay_measurements():
    rep = run_check(CheckSpec("ENTROPY_RATIO", n=5, d=2, q=2.0, trials=30, seed=10))
    assert rep.measured_constant > 0
    rep = run_check(CheckSpec("INFLUENCE", n=5, d=2, p=1.2, trials=30, seed=11))
    assert rep.measured_constant > 0
    rep = run_check(CheckSpec("GRAD_DECAY_LP", n=5, p=1.5, t_grid=(0.2, 0.8), trials=30, seed=12))
    assert rep.measured_constant > 0
    rep = run_check(CheckSpec("REV_GRAD", n=6, d=2, m=2, p=2.0, trials=30, seed=13))
    assert rep.measured_constant > 0


def test_run_check_matches_manual_reconstruction():
    # rebuild MARKOV_D2 trial-by-trial from the documented substreams and
    # dense formulas; the report's worst ratio must match exactly
    from cubespectral.cube import SpectralBand, random_function

    spec = CheckSpec("MARKOV_D2", n=5, d=3, p=2.5, trials=40, seed=77)
    rep = run_check(spec)
    ratios = []
    for k in range(spec.trials):
        f = random_function(spec.n, SpectralBand(0, spec.d), seed=spec.seed, trial=k)
        ratios.append(lp_norm(laplacian(f), spec.p) / (spec.d**2 * lp_norm(f, spec.p)))
    assert rep.worst_ratio == max(ratios)
    assert rep.witness["trial"] == int(np.argmax(ratios))


def test_beckner_point_estimate_is_unit():
    from cubespectral.extremal import OptimizerConfig, estimate_operator_norm

    p = 4.0
    w = 1j * math.sqrt(p / (p - 1.0) - 1.0)  # boundary point of the two-focus domain
    res = estimate_operator_norm(w, p, 3, OptimizerConfig(restarts=2, max_iters=60, seed=3),
                                 p_out=p / (p - 1.0))
    assert 1.0 - 1e-12 <= res.ratio <= 1.0 + 1e-6


def test_radial_heat_band_limited_consistency():
    from cubespectral.extremal import chebyshev_radial_profile
    from cubespectral.radial import radial_heat

    f = chebyshev_radial_profile(64, 4)
    full = radial_heat(f, 0.6)
    banded = radial_heat(f, 0.6, max_level=4)
    assert np.abs(full.phi - banded.phi).max() < 1e-10


def test_vector_witness_reevaluation():
    rep = run_check(CheckSpec("HEAT_LOWER_GENERAL", n=4, d=2, p=3.0, trials=30, seed=19,
                              target=TargetSpace("lq", 1.0, 3)))
    doc = json.loads(rep.to_json())
    assert verify.re_evaluate_witness(doc) == pytest.approx(doc["witness"]["ratio"], rel=1e-9)


def test_desk_scale_grid_every_explicit_id_passes():
    """Every explicit-constant check passes at tol 1e-9 on the desk grid.

    One representative dimension (n=6), d in {1, 3, 6}, the full exponent
    set {1, 4/3, 1.5, 2, 3, 4, inf} restricted per hypothesis, 200 trials.
    """
    ps_all = (1.0, 4 / 3, 1.5, 2.0, 3.0, 4.0, math.inf)
    ps_open = (4 / 3, 1.5, 2.0, 3.0, 4.0)
    pq_pairs = ((1.5, 4 / 3), (2.0, 1.5), (3.0, 2.0), (4.0, 3.0))
    n = 6
    runs = []
    for d in (1, 3, 6):
        for p in ps_all:
            runs.append(CheckSpec("HEAT_LOWER_GENERAL", n=n, d=d, p=p, trials=200, seed=41))
            runs.append(CheckSpec("MARKOV_D2", n=n, d=d, p=p, trials=200, seed=42))
            runs.append(CheckSpec("MARKOV_HIGHER_K", n=n, d=d, k=min(2, d), p=p,
                                  trials=200, seed=43))
            runs.append(CheckSpec("LAPLACIAN_SCALAR", n=n, d=d, p=p, trials=200, seed=44))
            if not math.isinf(p):
                runs.append(CheckSpec("NAOS_INTERP", n=n, d=d, p=p, beta=0.5, trials=200, seed=45))
        for p in ps_open:
            runs.append(CheckSpec("HEAT_LOWER_SCALAR", n=n, d=d, p=p, trials=200, seed=46))
            runs.append(CheckSpec("HEAT_UPPER_TAIL", n=n, d=d, p=p, trials=200, seed=47))
        for p, q in pq_pairs:
            runs.append(CheckSpec("MOMENT_GENERAL", n=n, d=d, p=p, q=q, trials=200, seed=48))
            runs.append(CheckSpec("MOMENT_SCALAR", n=n, d=d, p=p, q=q, trials=200, seed=49))
        runs.append(CheckSpec("L1L2", n=n, d=d, trials=200, seed=50))
        runs.append(CheckSpec("SQRT_PMINUS1", n=n, d=d, p=3.0, trials=200, seed=51))
        runs.append(CheckSpec("SQRT_PMINUS1", n=n, d=d, p=4.0, trials=200, seed=52))
        runs.append(CheckSpec("GRAD_INF_ENDPOINT", n=n, d=d, trials=200, seed=53))
        runs.append(CheckSpec("GRAD_L1_ENDPOINT", n=n, d=d, trials=200, seed=54))
        runs.append(CheckSpec("CHSQRT", d=d, trials=1, seed=55))
        for p in (1.0, 4 / 3, 2.0, 4.0):
            runs.append(CheckSpec("PISIER_LOWDEG", n=n, d=d, p=p, trials=100, seed=56))
    for p, q in pq_pairs:
        runs.append(CheckSpec("BONAMI", n=n, p=p, q=q, trials=200, seed=57))
    for p in (1.0, 4 / 3, 2.0, 4.0):
        runs.append(CheckSpec("PISIER_FULL", n=n, p=p, trials=100, seed=58))
    runs.append(CheckSpec("HEAT_GRAD_DECAY_INF", n=n, t_grid=(0.2, 0.8, 2.0), trials=200, seed=59))
    # vector-target coverage for the Banach-valued theorems
    for target in (TargetSpace("lq", 1.0, 3), TargetSpace("lq", math.inf, 3)):
        for p in (4 / 3, 4.0):
            runs.append(CheckSpec("HEAT_LOWER_GENERAL", n=n, d=3, p=p, trials=200,
                                  seed=60, target=target))
            runs.append(CheckSpec("MARKOV_D2", n=n, d=3, p=p, trials=200, seed=61,
                                  target=target))
    worst, worst_spec = 0.0, None
    for spec in runs:
        rep = run_check(spec)
        assert rep.passed, (spec.theorem, spec.d, spec.p, spec.q, rep.worst_ratio)
        if rep.worst_ratio > worst:
            worst, worst_spec = rep.worst_ratio, spec.theorem
    assert worst <= 1 + 1e-9
    print(f"\n  desk-scale grid: {len(runs)} checks, worst ratio {worst!r} ({worst_spec})")


def test_laplacian_ratio_sweep_reported():
    # empirical max ratios across degrees; the trend is reported, not asserted
    template = CheckSpec("LAPLACIAN_SCALAR", n=8, d=1, p=2.0, trials=50, seed=14)
    reports = sweep(template, "d", [1, 2, 3, 4, 5, 6])
    ratios = [r.worst_ratio for r in reports]
    print("\n  laplacian ratio vs d:", [f"{x:.4f}" for x in ratios])
    assert all(math.isfinite(x) and 0 < x <= 1 + 1e-9 for x in ratios)


def test_gradient_endpoint_witness_sweep():
    from cubespectral.extremal import sharpness_scan

    for row in sharpness_scan("GRAD_INF_ENDPOINT", [2, 4, 8], "d^2"):
        d = row["d"]
        closed = (d / 2) * (1 - chebyshev_t(d, 1 - 2 / d**2))
        assert row["ratio"] >= closed - 1e-9


def test_spec_from_params_roundtrip():
    spec = CheckSpec("MOMENT_GENERAL", n=5, d=2, p=math.inf, q=2.0, trials=10, seed=3,
                     target=TargetSpace("lq", math.inf, 3))
    rebuilt = verify.spec_from_params(spec.theorem, verify._params_echo(spec), spec.seed)
    assert rebuilt.p == math.inf
    assert rebuilt.target == spec.target
    assert rebuilt.t_grid == spec.t_grid
