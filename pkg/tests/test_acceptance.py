"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion."""

import numpy as np
import pytest

from gdmsteer.cli import run_sweep, run_thresholds
from gdmsteer.model import GdmParams, PhaseLabel, critical_coupling
from gdmsteer.oracle import compare
from gdmsteer.reconcile import reconciliation_report
from gdmsteer.scenario import preset
from gdmsteer.steering import (
    Direction,
    SteeringClass,
    classify,
    qpt_witness,
    steering_at,
    steering_closed_form,
    steering_from_moments,
)
from gdmsteer.supermode import (
    Branch,
    build_problem,
    diagonalize,
    displacements,
    ground_state_moments,
)

SEED = 20240611


def test_critical_coupling(acceptance):
    on = critical_coupling(preset("fig1").params)
    off = critical_coupling(preset("fig2").params)
    ok = abs(on - 3.873) <= 0.005 and abs(off - 9.487) <= 0.005
    assert acceptance("1 critical coupling", ok,
                      f"impurity on {on:.5f} (3.873 +/- 0.005), off {off:.5f} (9.487 +/- 0.005)")


def test_normal_phase_threshold(acceptance):
    hits = [h for h in run_thresholds(preset("fig2")) if h.which is Direction.ATOMS_TO_PHOTONS]
    lam = hits[0].lam if hits else float("nan")
    ok = len(hits) == 1 and abs(lam - 0.53) <= 0.05
    assert acceptance("2 normal-phase threshold", ok, f"fig2 E12 crosses 1/2 at {lam:.6f} (0.53 +/- 0.05)")


@pytest.mark.parametrize("name, which, target, tol", [
    ("fig5", Direction.ATOMS_TO_PHOTONS, 8.2, 0.3),
    ("fig7", Direction.PHOTONS_TO_ATOMS, 12.4, 0.4),
    ("fig8", Direction.PHOTONS_TO_ATOMS, 17.4, 0.5),
])
def test_superradiant_thresholds(acceptance, name, which, target, tol):
    sc = preset(name)
    hits = [h.lam for h in run_thresholds(sc) if h.which is which]
    ok = len(hits) == 1 and abs(hits[0] - target) <= tol
    found = ", ".join(f"{x:.6f}" for x in hits) or "none"
    if not ok:
        print(reconciliation_report(sc.params, sc.branch, which, target))
    assert acceptance(f"3 superradiant threshold {name}", ok,
                      f"E_{which.value} crosses at {found} ({target} +/- {tol})")


def _classes(name, lo=None, hi=None, points=200):
    sc = preset(name)
    rows = run_sweep(sc, sc.lambda_min if lo is None else lo, sc.lambda_max if hi is None else hi, points)
    return [r for r in rows if r.phase is not PhaseLabel.CRITICAL]


def test_one_way_regimes(acceptance):
    fig1 = _classes("fig1")
    ok1 = all(r.e_photons_to_atoms < 0.5 < r.e_atoms_to_photons for r in fig1)
    fig3, fig4 = _classes("fig3"), _classes("fig4")
    ok34 = all(r.e_atoms_to_photons < 0.5 < r.e_photons_to_atoms for r in fig3 + fig4)
    lam_c = preset("fig6").lambda_c
    grid = np.linspace(1.05 * lam_c, 25.0, 202)[1:-1]
    fig6 = [classify(steering_at(preset("fig6").params, float(x), Branch.SIN_POSITIVE,
                                 PhaseLabel.SUPERRADIANT).pair) for x in grid]
    ok6 = all(c is SteeringClass.TWO_WAY for c in fig6)
    assert acceptance("4 one-way regimes", ok1 and ok34 and ok6,
                      f"fig1 {len(fig1)} rows {'ok' if ok1 else 'violated'}, "
                      f"fig3/fig4 {len(fig3) + len(fig4)} rows {'ok' if ok34 else 'violated'}, "
                      f"fig6 {len(fig6)} points {'TwoWay' if ok6 else 'not TwoWay'}")


def test_qpt_witness(acceptance):
    details, ok = [], True
    expected = {Branch.SIN_POSITIVE: Direction.ATOMS_TO_PHOTONS, Branch.SIN_NEGATIVE: Direction.PHOTONS_TO_ATOMS}
    for name in ("fig9", "fig10"):
        params = preset(name).params
        for branch, dominant in expected.items():
            w = qpt_witness(params, branch)
            base = qpt_witness(params, branch, same_formula=True)
            ratios = (w.jump_atoms_to_photons / base.jump_atoms_to_photons,
                      w.jump_photons_to_atoms / base.jump_photons_to_atoms)
            good = max(ratios) >= 10.0 and w.dominant is dominant
            ok &= good
            details.append(f"{name}/{branch.name} ratio {max(ratios):.3g} dominant {w.dominant.value}")
    assert acceptance("5 QPT witness", ok, "; ".join(details))


def _random_normal(rng):
    omega = rng.uniform(0.5, 5.0)
    delta = rng.uniform(-1.0, 1.0)
    kappa = rng.uniform(0.0, 0.2)
    chi_pp = 1.0 - rng.uniform(0.5, 2.0) - kappa * (1.0 + delta)
    p = GdmParams(omega=omega, chi_pp=chi_pp, kappa=kappa, xi1=rng.uniform(0.0, 0.1),
                  xi2=rng.uniform(0.0, 0.5), delta=delta)
    return p.with_lambda(rng.uniform(0.05, 0.95) * critical_coupling(p))


def _random_superradiant(rng):
    p = _random_normal(rng)
    p = GdmParams(**{**p.__dict__, "chi": rng.uniform(0.0, 1.0)})
    return p.with_lambda(rng.uniform(1.05, 2.0) * critical_coupling(p))


def test_oracle_equivalence(acceptance):
    rng = np.random.default_rng(SEED)
    scenarios = [_random_normal(rng) for _ in range(20)] + [_random_superradiant(rng) for _ in range(10)]
    worst, failures = 0.0, 0
    for p in scenarios:
        r = compare(p)
        worst = max(worst, r.max_delta)
        failures += (not r.converged) or r.max_delta > 1e-5
    fig1 = compare(preset("fig1").params.with_lambda(2.0))
    fig5 = compare(preset("fig5").params.with_lambda(8.0))
    spot_ok = all(r.converged and r.max_delta <= 1e-4 for r in (fig1, fig5))
    assert acceptance("6 oracle equivalence", failures == 0 and spot_ok,
                      f"30 random scenarios, {failures} failures, worst delta {worst:.2e} (<= 1e-5); "
                      f"fig1 lambda=2 {fig1.max_delta:.2e}, lambda=8 {fig5.max_delta:.2e} (<= 1e-4)")


def _random_params(rng):
    p = _random_superradiant(rng) if rng.random() < 0.5 else _random_normal(rng)
    if rng.random() < 0.3:
        # paper-scale frequencies
        p = GdmParams(**{**p.__dict__, "omega": rng.uniform(50.0, 500.0)})
        lam_c = critical_coupling(p)
        p = p.with_lambda(lam_c * (rng.uniform(0.05, 0.95) if rng.random() < 0.5 else rng.uniform(1.05, 3.0)))
    return p


def test_algebraic_identities(acceptance):
    rng = np.random.default_rng(SEED + 1)
    worst = dict(pipeline=0.0, trig=0.0, trace=0.0, det=0.0, purity=0.0)
    plain_relative = 0.0
    drive_ok = True
    for _ in range(1000):
        p = _random_params(rng)
        branch = Branch.SIN_POSITIVE if rng.random() < 0.5 else Branch.SIN_NEGATIVE
        pr = build_problem(p)
        s = diagonalize(pr, branch)
        m = ground_state_moments(s, displacements(s, pr))
        closed = steering_closed_form(s)
        piped = steering_from_moments(m)
        # E = var - cov/var' can cancel to ~0, so differences are taken
        # relative to the size of the terms rather than to |E|
        for a, b, scale in ((closed.e_atoms_to_photons, piped.e_atoms_to_photons, m.var1 + abs(m.cov / m.var2)),
                            (closed.e_photons_to_atoms, piped.e_photons_to_atoms, m.var2 + abs(m.cov / m.var1))):
            worst["pipeline"] = max(worst["pipeline"], abs(a - b) / scale)
            plain_relative = max(plain_relative, abs(a - b) / abs(b))
        worst["trig"] = max(worst["trig"], abs(s.sin2theta ** 2 + s.cos2theta ** 2 - 1.0))
        worst["trace"] = max(worst["trace"], abs(s.omega_hi ** 2 + s.omega_lo ** 2 - pr.trace) / pr.trace)
        worst["det"] = max(worst["det"], abs(s.omega_hi ** 2 * s.omega_lo ** 2 - pr.determinant) / pr.determinant)
        purity = 1.0 / (4.0 * s.omega_hi * s.omega_lo)
        worst["purity"] = max(worst["purity"], abs(m.var1 * m.var2 - m.cov ** 2 - purity) / purity)
        pairs = [steering_at(GdmParams(**{**p.__dict__, "xi2": xi2}), p.lambda_coupling, branch).pair
                 for xi2 in (0.0, 1.0, 10.0)]
        drive_ok &= pairs[0] == pairs[1] == pairs[2]
    limits = dict(pipeline=1e-12, trig=1e-12, trace=1e-9, det=1e-9, purity=1e-12)
    ok = drive_ok and all(worst[k] <= limits[k] for k in limits)
    detail = ", ".join(f"{k} {worst[k]:.1e} (<= {limits[k]:.0e})" for k in limits)
    assert acceptance("7 algebraic identities", ok,
                      f"1000 draws: {detail}, drive invariance {'bitwise' if drive_ok else 'broken'}; "
                      f"pipeline relative to |E| {plain_relative:.1e} (informational)")


def test_gap_closure(acceptance):
    params = preset("fig9").params
    lam_c = critical_coupling(params)
    ok, details = True, []
    for side, phase in ((-1.0, PhaseLabel.NORMAL), (1.0, PhaseLabel.SUPERRADIANT)):
        gaps = [diagonalize(build_problem(params.with_lambda(lam_c * (1 + side * 10.0 ** -k)), phase),
                            Branch.SIN_NEGATIVE).omega_lo for k in range(2, 7)]
        monotone = all(a > b > 0 for a, b in zip(gaps, gaps[1:]))
        ratio = gaps[-1] / gaps[0]
        ok &= monotone and ratio < 1e-2
        details.append(f"{phase.value} side monotone={monotone} ratio {ratio:.6g} (< 1e-2)")
    assert acceptance("8 gap closure", ok, "; ".join(details))
