"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion lines
as they complete.  Criterion 5a is expected to fail and is marked strict-xfail:
the analytic value of its target, computed with its own stated oracle, lies
outside the demanded window (see the companion test and the README note).
"""

import sys
import warnings
from math import lgamma

import numpy as np
import pytest

from dlab.errors import NoContractionError
from dlab.grid import (
    FREQUENCY,
    PHYSICAL,
    Field,
    SpectralGrid,
    lp_norm,
    random_field,
    sobolev_norm,
    to_frequency,
    to_physical,
)
from dlab.norms import EpsilonPolicy, divisibility_check
from dlab.projections import annihilation_residual, partition_of_unity_residual
from dlab.propagate import free_trajectory, schrodinger_flow, wave_energy, wave_flow
from dlab import estimates as E
from dlab import montecarlo as MC
from dlab import solver as S
from dlab.randomize import RadialProfileSpec, RandomizationSpec, make_radial_data, randomize_schrodinger

warnings.filterwarnings("ignore", message="dt\\*max")


def record(criterion: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {criterion}: {detail}", file=sys.stderr, flush=True)


# ---------------------------------------------------------------- 1


def test_criterion_1_spectral_core():
    ok = True
    details = []
    for m in (8, 16):
        g = SpectralGrid(m=m, L=16.0)
        w = (g.dxi / (2 * np.pi)) ** 4
        worst_rt, worst_par = 0.0, 0.0
        for seed in range(100):
            f = random_field(g, seed)
            fh = to_frequency(f)
            back = to_physical(fh)
            worst_rt = max(
                worst_rt, np.abs(back.values - f.values).max() / np.abs(f.values).max()
            )
            a = lp_norm(f, 2)
            b = np.sqrt(w * np.sum(np.abs(fh.values) ** 2))
            worst_par = max(worst_par, abs(a - b) / a)
        ok &= worst_rt <= 1e-12 and worst_par <= 1e-12
        details.append(f"m={m}: roundtrip {worst_rt:.1e}, parseval {worst_par:.1e}")
    pu = max(
        partition_of_unity_residual(SpectralGrid(m=8, L=16.0)),
        partition_of_unity_residual(SpectralGrid(m=16, L=4 * np.pi)),
    )
    ok &= pu <= 1e-10
    g = SpectralGrid(m=16, L=4 * np.pi)
    ann = max(annihilation_residual(g, 1.0), annihilation_residual(g, 2.0))
    ok &= ann <= 1e-12
    record(
        "criterion 1 (spectral core)",
        ok,
        "; ".join(details) + f"; partition {pu:.1e}; annihilation {ann:.1e}",
    )
    assert ok


# ---------------------------------------------------------------- 2


def test_criterion_2_propagator_exactness():
    g = SpectralGrid(m=8, L=2 * np.pi)
    xi0 = np.array([1.0, 2.0, 0.0, -1.0])
    phase = np.broadcast_to(sum(xi0[i] * g.axis_coord(i + 1) for i in range(4)), g.shape)
    f = Field.physical(g, np.exp(1j * phase))
    t = 0.77
    pw_err = np.abs(
        schrodinger_flow(f, t).values - np.exp(-1j * t * np.sum(xi0**2)) * f.values
    ).max()

    # width-2 gaussian on the (32, 32) grid: truncation tails sit below 1e-6
    # (the width-1 profile of the working example cannot reach 1e-6 on any
    # feasible grid here; see the README verification notes)
    gg = SpectralGrid(m=32, L=32.0)
    sigma = 2.0
    f2 = Field.physical(gg, np.exp(-gg.x_squared / (2 * sigma**2)))
    z = sigma**2 + 2j
    exact = (sigma**2 / z) ** 2 * np.exp(-gg.x_squared / (2 * z))
    gauss_err = np.abs(schrodinger_flow(f2, 1.0).in_domain(PHYSICAL).values - exact).max()

    gw = SpectralGrid(m=16, L=16.0)
    f0 = Field.physical(gw, random_field(gw, 2).values.real)
    f1 = Field.physical(gw, random_field(gw, 3).values.real)
    u0, ut0 = wave_flow(f0, f1, 0.0)
    u2, ut2 = wave_flow(f0, f1, 2.0)
    e0, e2 = wave_energy(u0, ut0), wave_energy(u2, ut2)
    wave_drift = abs(e2 - e0) / e0

    ok = pw_err <= 1e-12 and gauss_err <= 1e-6 and wave_drift <= 1e-12
    record(
        "criterion 2 (propagator exactness)",
        ok,
        f"plane-wave {pw_err:.1e}; gaussian {gauss_err:.1e}; wave energy {wave_drift:.1e}",
    )
    assert ok


# ---------------------------------------------------------------- 3


def test_criterion_3_integrator_quality():
    g = SpectralGrid(m=16, L=8.0)
    u0 = Field.physical(g, 1.2 * np.exp(-g.x_squared / 2.0).astype(complex))
    run = S.splitstep_nls(u0, S.NLSRunConfig(mu=+1, dt=0.01, T=0.3, dealias=False))
    m0 = S.mass(run.frames[0])
    mass_drift = abs(S.mass(run.frames[-1]) - m0) / m0

    e0 = S.energy(u0)
    drift = {}
    for dt in (0.02, 0.01):
        r = S.splitstep_nls(u0, S.NLSRunConfig(mu=+1, dt=dt, T=0.4, dealias=True))
        drift[dt] = abs(S.energy(r.frames[-1]) - e0)
    ratio = drift[0.02] / drift[0.01]

    F0 = Field.physical(g, 0.7 * np.exp(-g.x_squared / 2.0) * np.exp(1j * g.axis_coord(1)))
    cfg = S.NLSRunConfig(mu=+1, dt=0.01, T=0.2, dealias=False)
    F = free_trajectory(F0, 0.0, cfg.dt, cfg.n_steps + 1).map_frames(
        lambda fr: fr.in_domain(PHYSICAL)
    )
    v = S.splitstep_forced(Field.zero(g, PHYSICAL), F, cfg)
    tot0 = S.mass(Field.physical(g, v.frames[0].values + F.frames[0].values))
    totT = S.mass(Field.physical(g, v.frames[-1].values + F.frames[-1].values))
    forced_drift = abs(totT - tot0) / tot0

    ok = mass_drift <= 1e-10 and 3.5 <= ratio <= 4.5 and forced_drift <= 1e-10
    record(
        "criterion 3 (integrator quality)",
        ok,
        f"mass drift {mass_drift:.1e}; energy ratio {ratio:.2f}; forced mass {forced_drift:.1e}",
    )
    assert ok


# ---------------------------------------------------------------- 4


@pytest.fixture(scope="module")
def fit_grid():
    return SpectralGrid(m=32, L=4 * np.pi)


def test_criterion_4_unit_maximal_vs_dyadic_control():
    rep, control = E.verify_unit_maximal()
    ok = (
        abs(rep.slope - 0.5) <= 0.15
        and abs(control.slope - 1.5) <= 0.2
        and rep.metadata["separation"] >= 0.5
    )
    record(
        "criterion 4a (unit-scale maximal)",
        ok,
        f"slope {rep.slope:.3f} (0.5 +- 0.15) vs dyadic control {control.slope:.3f}",
    )
    assert ok


def test_criterion_4_lateral_slopes(fit_grid):
    rep_max = E.verify_lateral_dyadic(fit_grid, (1.0, 2.0, 4.0), 2, np.inf, 1)
    rep_ls = E.verify_lateral_dyadic(fit_grid, (1.0, 2.0, 4.0), np.inf, 2, 1)
    ok = abs(rep_max.slope - 1.5) <= 0.2 and abs(rep_ls.slope + 0.5) <= 0.2
    sep = abs(rep_max.slope - rep_ls.slope)
    ok &= sep >= 0.5
    record(
        "criterion 4b (lateral exponents)",
        ok,
        f"L(2,inf) {rep_max.slope:.3f} (1.5 +- 0.2); L(inf,2) {rep_ls.slope:.3f} (-0.5 +- 0.2); separation {sep:.2f}",
    )
    assert ok


def test_criterion_4_local_smoothing_and_energy_decay(fit_grid):
    rep_s = E.verify_local_smoothing(fit_grid, (1.0, 2.0, 4.0), (1.0, 2.0, 4.0))
    rep_w = E.verify_local_smoothing(
        fit_grid, (1.0, 2.0, 4.0), (0.5, 1.0, 2.0), T0=4.0, flow="halfwave"
    )
    ok = abs(rep_s.slope) <= 0.2 and abs(rep_w.slope) <= 0.2 and rep_s.metadata["cap_ok"]
    record(
        "criterion 4c (local smoothing / energy decay N-uniformity)",
        ok,
        f"smoothing slope {rep_s.slope:.3f}; wave decay slope {rep_w.slope:.3f} (0 +- 0.2)",
    )
    assert ok


def test_criterion_4_bernstein():
    rep = E.verify_bernstein(SpectralGrid(m=32, L=4.0))
    ok = abs(rep.slope - 1.0) <= 0.1
    record(
        "criterion 4d (dyadic Bernstein)",
        ok,
        f"slope {rep.slope:.3f} (1.0 +- 0.1); flat control slope 0",
    )
    assert ok


# ---------------------------------------------------------------- 5


RAYLEIGH_P = [2, 4, 8, 16, 32]


def rayleigh_analytic_slope():
    xs = np.log(RAYLEIGH_P)
    ys = np.array([lgamma(p / 2 + 1) / p for p in RAYLEIGH_P])
    A = np.vstack([xs, np.ones_like(xs)]).T
    return float(np.linalg.lstsq(A, ys, rcond=None)[0][0])


@pytest.mark.xfail(
    strict=True,
    reason=(
        "spec defect: the stated oracle (analytic Rayleigh moments "
        "Gamma(p/2+1)^(1/p)) gives log-log LSQ slope 0.347 over p in {2..32}, "
        "outside the demanded window 0.5 +- 0.05; no fit over this p-range can "
        "reach 0.45 (see decisions ledger)"
    ),
)
def test_criterion_5a_rayleigh_slope_as_stated():
    c = np.full(16, 0.25)
    stats = MC.moment_growth(MC.linear_gaussian_statistic(c, seed=123), RAYLEIGH_P, Q=100_000)
    ok = abs(stats.moment_slope - 0.5) <= 0.05
    record(
        "criterion 5a (Rayleigh moment slope, as stated)",
        ok,
        f"slope {stats.moment_slope:.3f} vs demanded 0.5 +- 0.05 "
        f"(analytic target of the stated oracle: {rayleigh_analytic_slope():.3f})",
    )
    assert ok


def test_criterion_5a_companion_oracle_anchor():
    # the empirical slope must match the analytic value of its own oracle,
    # and the top-pair local slope must approach 1/2 from below
    oracle = rayleigh_analytic_slope()
    c = np.full(16, 0.25)
    stats = MC.moment_growth(MC.linear_gaussian_statistic(c, seed=123), RAYLEIGH_P, Q=100_000)
    ok = abs(stats.moment_slope - oracle) <= 0.03
    local = (lgamma(17) / 32 - lgamma(9) / 16) / np.log(2.0)
    ok &= 0.40 <= local <= 0.5
    record(
        "criterion 5a' (Rayleigh slope vs oracle)",
        ok,
        f"empirical {stats.moment_slope:.3f} vs analytic {oracle:.3f}; local(16,32) {local:.3f} -> 1/2",
    )
    assert ok


def test_criterion_5b_gaussian_tail_slope():
    ok = True
    details = []
    for norm_sq, lams in ((1.0, [0.8, 1.0, 1.2, 1.5, 1.8]), (4.0, [1.6, 2.0, 2.4, 3.0, 3.6])):
        n = 8
        c = np.full(n, np.sqrt(norm_sq / n))
        stats = MC.tail_fit(MC.linear_gaussian_statistic(c, seed=31), lams, Q=100_000)
        target = -1.0 / norm_sq
        ok &= abs(stats.tail_slope - target) <= 0.1 * abs(target)
        details.append(f"|c|^2={norm_sq}: {stats.tail_slope:.4f} vs {target}")
    record("criterion 5b (Gaussian tail anchor)", ok, "; ".join(details))
    assert ok


def test_criterion_5c_thread_reproducibility(monkeypatch):
    c = np.full(8, 0.35)
    stat = MC.linear_gaussian_statistic(c, seed=5)
    monkeypatch.setenv("DLAB_THREADS", "1")
    a = MC.evaluate_draws(stat, 400)
    monkeypatch.setenv("DLAB_THREADS", "4")
    b = MC.evaluate_draws(stat, 400)
    ok = np.array_equal(a, b)
    record("criterion 5c (bit-for-bit reproducibility)", ok, f"400 draws, threads 1 vs 4")
    assert ok


# ---------------------------------------------------------------- 6


@pytest.fixture(scope="module")
def ensemble_grid():
    return SpectralGrid(m=16, L=4 * np.pi)


@pytest.mark.parametrize(
    "which,s,alpha,eps",
    [
        ("Y", 0.4, 0.5, 0.02),
        ("weighted_grad_L2Linf", 0.6, 0.75, 0.05),
        ("weighted_L2Linf", 0.4, 0.5, 0.02),
        ("wave_L3L6", 0.4, 0.5, 0.02),
    ],
)
def test_criterion_6_as_bound_ensembles(ensemble_grid, which, s, alpha, eps):
    f = make_radial_data(RadialProfileSpec(kind="fourier_powerlaw", target_s=s), ensemble_grid)
    pol = EpsilonPolicy(eps=eps, s=s)
    stats = MC.as_norm_ensemble(
        which, f, s=s, pol=pol, Q=200, seed=12, alpha=alpha, T=4.0, n_frames=9
    )
    lams = sorted(stats.exceedances)
    counts = [stats.exceedances[l] for l in lams]
    monotone = all(b <= a for a, b in zip(counts, counts[1:]))
    finite = np.isfinite(stats.values).all() and stats.metadata["median"] > 0
    ok = bool(finite and stats.tail_slope < 0 and monotone)
    record(
        f"criterion 6 ({which} ensemble, Q=200)",
        ok,
        f"median {stats.metadata['median']:.3g}, tail slope {stats.tail_slope:.3g} < 0, monotone counts {monotone}",
    )
    assert ok


# ---------------------------------------------------------------- 7


def test_criterion_7_main_linear_constant():
    rep = E.verify_main_linear(SpectralGrid(m=16, L=2 * np.pi), n_samples=20)
    ok = rep.worst <= 50.0
    record(
        "criterion 7a (main linear estimate)",
        ok,
        f"constant {rep.worst:.2f} <= 50 over 20 samples",
    )
    assert ok


def test_criterion_7_duhamel_retarded():
    rep = E.verify_duhamel_retarded(SpectralGrid(m=16, L=2 * np.pi), 2.0)
    ok = rep.max_constant <= 100.0
    record(
        "criterion 7b (retarded Duhamel bounds)",
        ok,
        f"constant {rep.max_constant:.2f} <= 100",
    )
    assert ok


TRILINEAR_CAPS = {case: 0.1 for case in E.TRILINEAR_CASES}


def test_criterion_7_trilinear_all_cases():
    g = SpectralGrid(m=16, L=np.pi)
    harness = E.TrilinearHarness(g, (2.0, 4.0), T=0.4, n_frames=7, seed=0)
    configs = [
        (2, 4, 4, 4),
        (2, 4, 4, 2),
        (2, 4, 2, 2),
        (4, 4, 4, 4),
        (4, 4, 4, 2),
        (2, 2, 2, 2),
    ]
    ok = True
    worst = {}
    for case in E.TRILINEAR_CASES:
        rep = E.verify_trilinear(case, configs, harness, TRILINEAR_CAPS[case])
        worst[case] = rep.max_ratio
        ok &= rep.passed
    record(
        "criterion 7c (eight trilinear cases)",
        ok,
        "max ratios " + ", ".join(f"{c}={v:.2g}" for c, v in worst.items()) + " (caps 0.1)",
    )
    assert ok


def test_criterion_7_divisibility_never_violated():
    g = SpectralGrid(m=16, L=4 * np.pi)
    pol = EpsilonPolicy()
    ok = True
    for seed in range(5):
        f = random_field(g, seed, domain=FREQUENCY, band_limit=2.5)
        v = free_trajectory(f, 0.0, 0.05, 9).map_frames(lambda fr: fr.in_domain(PHYSICAL))
        for which in ("X", "Y"):
            rep = divisibility_check(v, [0.1, 0.2, 0.3], which, pol)
            ok &= rep.ok
    record("criterion 7d (time divisibility)", ok, "5 random trajectories, X and Y, J=4")
    assert ok


# ---------------------------------------------------------------- 8


def test_criterion_8_picard_fixed_point():
    g = SpectralGrid(m=16, L=8.0)
    gaussian = np.exp(-g.x_squared / 2.0).astype(complex)
    h1 = sobolev_norm(Field.physical(g, gaussian), 1.0, homogeneous=True)
    v0 = Field.physical(g, (1e-2 / h1) * gaussian)
    dt = 0.03125
    traj, rec = S.picard_iterate(v0, None, S.PicardConfig(tau=0.5, dt=dt, tolerance=1e-13))
    contracts = rec.converged and all(r <= 0.5 for r in rec.ratios)
    run = S.splitstep_nls(v0, S.NLSRunConfig(mu=+1, dt=dt, T=0.5, dealias=False))
    worst = max(
        lp_norm(Field.physical(g, a.values - b.values), 2)
        for a, b in zip(traj.frames, run.frames)
    )
    agreement = worst <= 10.0 * dt**2
    diverged = False
    try:
        S.picard_iterate(
            Field.physical(g, 40.0 * gaussian), None, S.PicardConfig(tau=0.5, dt=0.05)
        )
    except NoContractionError:
        diverged = True
    ok = contracts and agreement and diverged
    record(
        "criterion 8 (Picard fixed point)",
        ok,
        f"ratios <= 1/2: {contracts}; |picard - splitstep| {worst:.2e} <= 10 dt^2; "
        f"large-data no-contraction: {diverged}",
    )
    assert ok


# ---------------------------------------------------------------- 9


def test_criterion_9_morawetz_identity_and_bulk():
    g = SpectralGrid(m=32, L=8.0)
    F0 = Field.physical(
        g, 0.9 * np.exp(-g.x_squared / 2.0) * np.exp(1j * g.axis_coord(1))
    )
    cfg = S.NLSRunConfig(mu=+1, dt=0.001, T=0.1, dealias=False)
    F = free_trajectory(F0, 0.0, cfg.dt, cfg.n_steps + 1).map_frames(
        lambda fr: fr.in_domain(PHYSICAL)
    )
    run = S.splitstep_forced(Field.zero(g, PHYSICAL), F, cfg)
    rep = S.morawetz_audit(run, F)
    ok = rep.identity_ok and rep.bulk >= 0.0 and np.isfinite(rep.constant)
    record(
        "criterion 9a (Morawetz identity and bulk)",
        ok,
        f"identity mismatch {rep.identity_mismatch:.2e} <= {rep.identity_tolerance:.1e}; "
        f"bulk {rep.bulk:.3g} >= 0; inequality constant {rep.constant:.3g}",
    )
    assert ok


def test_criterion_9_energy_growth_randomized_forcing():
    g = SpectralGrid(m=16, L=8.0)
    base = make_radial_data(RadialProfileSpec(kind="gaussian_bump", width=1.5), g)
    fw = randomize_schrodinger(base, RandomizationSpec(seed=7), 0)
    amp = np.abs(fw.in_domain(PHYSICAL).values).max()
    fw = Field.frequency(g, fw.in_domain(FREQUENCY).values * (0.9 / amp))
    cfg = S.NLSRunConfig(mu=+1, dt=0.002, T=0.1, dealias=False)
    F = free_trajectory(fw, 0.0, cfg.dt, cfg.n_steps + 1).map_frames(
        lambda fr: fr.in_domain(PHYSICAL)
    )
    run = S.splitstep_forced(Field.zero(g, PHYSICAL), F, cfg)
    series, rep = S.energy_growth_audit(run, F)
    ok = rep.terms_ok and rep.mass_ok and rep.growth_ok
    record(
        "criterion 9b (energy growth, randomized forcing)",
        ok,
        f"five Holder majorants dominate: {rep.terms_ok}; mass bound: {rep.mass_ok}; "
        f"sup E {rep.sup_energy:.3g} <= bound {rep.growth_bound:.3g}",
    )
    assert ok


# ---------------------------------------------------------------- 10


def test_criterion_10_scattering_diagnostic():
    g = SpectralGrid(m=16, L=8.0)
    gaussian = np.exp(-g.x_squared / 2.0).astype(complex)
    h1 = sobolev_norm(Field.physical(g, gaussian), 1.0, homogeneous=True)
    v0 = Field.physical(g, (5e-3 / h1) * gaussian)
    run = S.splitstep_nls(v0, S.NLSRunConfig(mu=+1, dt=0.01, T=2.0, dealias=True))
    _, rep = S.scattering_state(run)
    ok = rep.decreasing and rep.final_relative <= 1e-3
    record(
        "criterion 10 (scattering diagnostic)",
        ok,
        f"ladder decreasing: {rep.decreasing}; final delta {rep.final_relative:.2e} <= 1e-3",
    )
    assert ok
