"""End-to-end acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is repeated in the terminal summary.
"""

from functools import lru_cache

import numpy as np
import pytest

from cdasym.core import INF
from cdasym.diagnostics import weak_rate_check
from cdasym.scenarios import P_VALUES, Scenario, burgers_error, heat_oracle, p_label, weak_trajectory

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]


@lru_cache(maxsize=None)
def scenario(name):
    return Scenario(name, {}).execute()


@lru_cache(maxsize=None)
def weak(q):
    return weak_trajectory(q)


def check_value(res, name):
    return res.check(name).value


def test_criterion_01_heat_oracle(record):
    # 4096 -> 8191 nodes halves dx exactly
    err, fine = heat_oracle(4096, 0.01), heat_oracle(8191, 0.005)
    order = np.log2(err / fine)
    ok = err < 1e-5 and 1.8 <= order <= 2.2
    record(1, ok, f"sup error {err:.3g} at n=4096 (< 1e-5), observed order {order:.3f} in [1.8, 2.2]")


def test_criterion_02_linear_attractor(record):
    res = scenario("heat-asymptotics")
    parts, ok = [], True
    for p in P_VALUES:
        lab = p_label(p)
        dec = res.check(f"strictly_decreasing_p{lab}").passed
        ratio = check_value(res, f"final_over_initial_p{lab}")
        ok = ok and dec and ratio < 0.15
        parts.append(f"p={lab}: decreasing={dec}, final/initial={ratio:.3f}")
    record(2, ok, "; ".join(parts) + " (< 0.15)")


def test_criterion_03_zero_mass_decay(record):
    rep = scenario("decay-suite").report("zero_mass_sup_norm", INF)
    ok = abs(rep.fitted_slope + 1.0) <= 0.1
    record(3, ok, f"dipole sup-norm slope {rep.fitted_slope:.4f} (target -1 +/- 10%)")


def test_criterion_04_hopf_cole(record):
    e1, _ = burgers_error(2048, 0.002, 1.0)
    e10, _ = burgers_error(2048, 0.002, 10.0)
    ok = e1 < 1e-4 and e10 < 1e-3
    record(4, ok, f"L1 error {e1:.3g} at t=1 (< 1e-4), {e10:.3g} at t=10 (< 1e-3)")


def test_criterion_05_burgers_attractor(record):
    res = scenario("self-similar-critical")
    d1 = res.check("attractor_distance_decreasing_p1").passed
    dinf = res.check("attractor_distance_decreasing_pinf").passed
    final = check_value(res, "attractor_distance_final_p1")
    ok = d1 and dinf and final < 1e-2
    record(5, ok, f"decreasing p=1 {d1}, p=inf {dinf}; final p=1 value {final:.4f} (< 1e-2)")


def test_criterion_06_spectral(record):
    res = scenario("similarity-spectral")
    resid = max(check_value(res, f"eigen_residual_l{l}") for l in range(1, 7))
    rate = res.report("zero_mass_k_norm_rate").fitted_slope
    gap = check_value(res, "spectral_vs_timestepper_l1")
    ok = resid < 1e-4 and abs(rate - 0.5) <= 0.05 and gap < 1e-5
    record(6, ok, f"max eigen-residual {resid:.3g} (< 1e-4), zero-mass rate {rate:.4f} "
                  f"(0.5 +/- 10%), spectral vs timestepper {gap:.3g} (< 1e-5)")


def test_criterion_07_sup_norm_decay(record):
    res = scenario("decay-suite")
    parts, ok = [], True
    for q in (2, 3):
        rep = res.report(f"sup_norm_q{q}", INF)
        l1 = res.check(f"l1_non_increasing_q{q}").passed
        good = abs(rep.fitted_slope + 0.5) <= 0.05 and rep.window == (10.0, 100.0) and l1
        ok = ok and good
        parts.append(f"q={q}: slope {rep.fitted_slope:.4f} over {rep.window}, L1 non-increasing {l1}")
    record(7, ok, "; ".join(parts))


def test_criterion_08_gradient_decay(record):
    rep = scenario("decay-suite").report("gradient_sup_norm_q2", INF)
    ok = abs(rep.fitted_slope + 1.0) <= 0.15
    record(8, ok, f"q=2 gradient sup-norm slope {rep.fitted_slope:.4f} (target -1 +/- 15%)")


def test_criterion_09_contraction(record):
    res = scenario("contraction-suite")
    names = [c.name for c in res.checks]
    ok = res.passed and len(names) == 4
    record(9, ok, ", ".join(f"{c.name}={c.passed}" for c in res.checks))


def test_criterion_10_steady_profiles(record):
    res = scenario("self-similar-critical")
    dists = {m: check_value(res, f"steady_state_l1_M{m}") for m in ("0.5", "1", "2")}
    pos = res.check("profiles_positive").passed
    mono = res.check("profiles_monotone_in_mass").passed
    ok = max(dists.values()) < 1e-4 and pos and mono
    detail = ", ".join(f"M={m}: {d:.3g}" for m, d in dists.items())
    record(10, ok, f"steady-state L1 {detail} (< 1e-4); positive {pos}; monotone in M {mono}")


def test_criterion_11_weak_rates(record):
    parts, ok = [], True
    for q in (2.5, 3.0, 4.0):
        for rep in (weak_rate_check(weak(q), q, p) for p in P_VALUES):
            ok = ok and rep.verdict
            parts.append(f"q={q:g} p={p_label(rep.p)}: {rep.fitted_slope:.3f} vs {rep.target_slope:g} "
                         f"({100 * rep.relative_error:.0f}% <= {100 * rep.tolerance:.0f}%)")
    record(11, ok, "; ".join(parts))


def test_criterion_12_strong_regime(record):
    res = scenario("nwave-strong")
    rep = res.report("sup_norm_strong", INF)
    slope_ok = abs(rep.fitted_slope + 2 / 3) <= 0.1 * 2 / 3
    bound = check_value(res, "sup_bound_ratio_max")
    ent = res.check("entropy_excess_main").passed and res.check("entropy_excess_refined").passed
    dec = res.check("nwave_distance_decreasing").passed
    ratio = check_value(res, "nwave_distance_final_over_initial")
    ok = slope_ok and bound <= 1.02 and ent and dec and ratio < 0.3
    record(12, ok, f"sup slope {rep.fitted_slope:.4f} (-2/3 +/- 10%), sup/bound max {bound:.3f} (<= 1.02), "
                   f"entropy monitor {ent}, N-wave distance decreasing {dec}, final/initial {ratio:.3f} (< 0.3)")


def test_criterion_13_conservation(record):
    worst, ok, n = 0.0, True, 0
    for name in ("heat-asymptotics", "linear-convection", "burgers-hopfcole", "decay-suite",
                 "self-similar-critical", "nwave-strong"):
        for c in scenario(name).checks:
            if c.name == "mass_drift":
                n += 1
                ok = ok and c.passed
                worst = max(worst, c.value / c.limit)
    for q in (2.5, 3.0, 4.0):
        tr = weak(q)
        ratio = tr.max_mass_drift() / (1e-8 * (1 + abs(tr.mass0)))
        n += 1
        ok = ok and ratio <= 1.0
        worst = max(worst, ratio)
    record(13, ok, f"{n} runs, worst drift / 1e-8(1+|M|) = {worst:.3g}")
