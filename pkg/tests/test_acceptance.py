"""Acceptance gate: one test (and one printed pass/fail line) per primary
claim of the laboratory.

Each test runs its criterion at the stated tolerance and prints
`[PRIMARY] <name>: PASS|FAIL` regardless of capture settings, then asserts.
"""

import time

import numpy as np
import pytest

from blowuplab import (
    InitialDataSpec,
    Problem,
    check_orbit_asymptotics,
    find_compact_profile_by_slope,
    find_compact_subsolution_profile,
    integrate_stationary_profile,
    phase_map,
    phase_orbit_from_P0,
    profile_residual,
    rescale_stationary,
    run_blowup_scenario,
    run_comparison_scenario,
    run_fsp_scenario,
    run_no_localization_scenario,
    run_threshold_scenario,
    similarity_exponents,
    stationary_residual,
    unit_stationary_profile,
    make_grid,
)
from blowuplab.selfsimilar import inner_contact_slope
from blowuplab.stationary_phase import phase_system_residual
from oracles import barenblatt_error, reaction_ode_relative_error

BUMP = InitialDataSpec(kind="compact_bump", amplitude=1.0, radius=1.0)


def _gate(capsys, name: str, ok: bool, detail: str = ""):
    with capsys.disabled():
        print(f"[PRIMARY] {name}: {'PASS' if ok else 'FAIL'}"
              + (f"  ({detail})" if detail else ""), flush=True)
    assert ok, f"{name}: {detail}"


def test_exponent_algebra(capsys):
    t0 = time.perf_counter()
    e1 = similarity_exponents(Problem(2.0, 1.5, 1.0, 1))
    e2 = similarity_exponents(Problem(3.0, 2.0, 2.0, 3))
    elapsed = time.perf_counter() - t0
    ok = (
        (e1.alpha, e1.beta, e1.bigL) == (1.5, 0.25, 2.0)
        and (e2.alpha, e2.beta, e2.bigL) == (2.0 / 3.0, 1.0 / 6.0, 6.0)
        and elapsed < 1e-3
    )
    _gate(capsys, "exponent algebra", ok, f"elapsed={elapsed * 1e6:.0f}us")


def test_solver_diffusion_oracle(capsys):
    e_h = barenblatt_error(cells=100)
    e_h2 = barenblatt_error(cells=200)
    ratio = e_h / e_h2
    _gate(capsys, "solver validation (diffusion)", ratio >= 1.7,
          f"Linf ratio h->h/2 = {ratio:.2f}")


def test_solver_reaction_oracle(capsys):
    err = reaction_ode_relative_error(dt_max=1e-5, t_end=1.9)
    _gate(capsys, "solver validation (reaction)", err < 1e-3,
          f"rel err at t=1.9: {err:.2e}")


def test_threshold_bound(capsys):
    prob = Problem(2.0, 1.5, 1.0, 1)
    res = run_threshold_scenario(prob, [0.5, 1.0, 2.0])
    detail = "; ".join(
        f"c={c:g}: T={res.metrics.get(f't_hat_c={c:g}', float('nan')):.4g}"
        f" bound={res.metrics.get(f'bound_c={c:g}', float('nan')):.4g}"
        for c in (0.5, 1.0, 2.0)
    )
    _gate(capsys, "grow-up threshold bound", res.verdict == "PASS", detail)


def test_comparison_principle(capsys):
    prob = Problem(2.0, 1.5, 1.0, 1)
    hi = InitialDataSpec(kind="compact_bump", amplitude=2.0, radius=1.5)
    res_h = run_comparison_scenario(prob, BUMP, hi, grid=make_grid(16.0, 480))
    res_h2 = run_comparison_scenario(prob, BUMP, hi, grid=make_grid(16.0, 960))
    v1 = res_h.metrics["max_violation"]
    v2 = res_h2.metrics["max_violation"]
    # the violation must halve with the mesh; identically-zero violations
    # (monotone scheme) satisfy the halving vacuously
    halves = (v1 < 1e-12 and v2 < 1e-12) or (0.35 * v1 <= v2 <= 0.65 * v1)
    ok = res_h.verdict == "PASS" and res_h2.verdict == "PASS" and halves
    _gate(capsys, "comparison principle", ok, f"violation h={v1:.2e}, h/2={v2:.2e}")


@pytest.mark.parametrize("quad", [(2.0, 1.5, 1.0, 1), (2.0, 1.0, 2.0, 1)],
                         ids=["p=1.5", "p=1"])
def test_blowup_with_subsolution(capsys, quad):
    prob = Problem(*quad[:3], quad[3])
    u_cap = 1e4 if prob.p > 1 else 1e3
    res = run_blowup_scenario(prob, BUMP, u_cap=u_cap)
    detail = (f"T_hat={res.metrics.get('t_hat', float('nan')):.5g}, "
              f"refine rel={res.metrics.get('t_hat_refinement_rel', float('nan')):.2e}, "
              f"dominance viol={res.metrics.get('dominance_max_violation', float('nan')):.2e}")
    _gate(capsys, f"finite-time blow-up (p={prob.p:g})", res.verdict == "PASS", detail)


def test_finite_speed_of_propagation(capsys):
    prob = Problem(2.0, 1.5, 1.0, 1)
    res = run_fsp_scenario(prob, BUMP)
    worst = max(res.metrics[f"checkpoint_{j}_max_violation"] for j in range(3))
    _gate(capsys, "finite speed of propagation", res.verdict == "PASS",
          f"max dominance violation {worst:.2e}")


def test_no_localization(capsys):
    prob = Problem(2.0, 1.5, 1.0, 1)
    res = run_no_localization_scenario(prob, BUMP)
    detail = (f"ladder zeta={['%.3g' % z for z in res.metrics['ladder_zeta']]}, "
              f"growth={res.metrics.get('zeta_growth_factor', float('nan')):.2f}")
    _gate(capsys, "absence of localization", res.verdict == "PASS", detail)


def test_profile_certificates(capsys, compact_2151):
    prof = compact_2151
    res = profile_residual(prof)
    certs = (
        prof.f[0] == 0.0
        and prof.f[-1] == 0.0
        and inner_contact_slope(prof) > 0
        and np.all(prof.f[1:-1] > 0)
    )
    alt = find_compact_profile_by_slope(prof.prob, prof.xi1)
    agree = abs(alt.xi2 - prof.xi2) / prof.xi2
    ok = res < 1e-4 and certs and agree < 1e-4 and abs(alt.xi1 - prof.xi1) < 1e-4
    _gate(capsys, "profile certificates", ok,
          f"residual={res:.2e}, dual xi2 agreement={agree:.2e}")


def test_stationary_phase_crosscheck(capsys, unit_3223):
    probs = [Problem(3.0, 2.0, 2.0, 3), Problem(2.0, 1.5, 1.0, 1)]
    residuals, slopes_ok = [], []
    for prob in probs:
        prof = integrate_stationary_profile(prob, D=1.0)
        residuals.append(phase_system_residual(phase_map(prof)))
        fit = check_orbit_asymptotics(phase_orbit_from_P0(prob))
        slopes_ok.append(abs(fit.slope - fit.expected_slope) <= 0.05 * fit.expected_slope)
    scaled = rescale_stationary(unit_3223, 2.0)
    rescale_exact = scaled.R0 == 2.0 * unit_3223.R0
    ratio_ok = abs(scaled.w0() / unit_3223.w0() - 16.0) < 1e-8
    ok = (max(residuals) < 1e-5 and all(slopes_ok) and rescale_exact and ratio_ok)
    _gate(capsys, "stationary/phase cross-check", ok,
          f"max system residual={max(residuals):.2e}")
