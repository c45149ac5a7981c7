"""Full-scale acceptance criteria.

Each test prints one PASS/FAIL line (repeated in the terminal summary).
Run alone with ``pytest -m acceptance -s``.
"""

import itertools
import os

import numpy as np
import pytest

from conftest import crandn, random_row_unitary
from jrchybrid.hybrid import (
    HybridConfig, analog_from_phases, design_hybrid, solve_fbb, solve_ut, subarray_layout, weighted_objective,
)
from jrchybrid.metrics import PowerModel
from jrchybrid.radar import RadarScene, build_radar_precoder, local_maxima
from jrchybrid.rfselect import RfSelectConfig, power_terms, rate_parallel, select_rf_chains, waterfill_step
from jrchybrid.harness import ExperimentSpec, run_experiment

pytestmark = pytest.mark.acceptance

TRIALS = 1000
WORKERS = max(1, min(8, os.cpu_count() or 1))
RHOS = [0.4, 0.6, 0.8, 1.0]


def cells_by(result, axis):
    out = {}
    for c in result.summary["cells"]:
        out.setdefault(c[axis], {})[c["rho"]] = c
    return out


@pytest.fixture(scope="module")
def snr_sweep():
    spec = ExperimentSpec(experiment="ee_rate_vs_snr", trials=TRIALS, workers=WORKERS)
    return cells_by(run_experiment(spec), "snr_db")


@pytest.fixture(scope="module")
def nrx_sweep():
    spec = ExperimentSpec(experiment="ee_rate_vs_nrx", trials=TRIALS, workers=WORKERS)
    return cells_by(run_experiment(spec), "n_rx")


def test_c1_rf_chain_pmf(report):
    res = run_experiment(ExperimentSpec(experiment="rfchain_pmf", trials=TRIALS, workers=WORKERS))
    pmf = {p["p_max_w"]: p for p in res.summary["l_opt_pmf"]}
    c1 = {int(k): v for k, v in pmf[1.0]["counts"].items()}
    c4 = {int(k): v for k, v in pmf[0.25]["counts"].items()}
    mode = max(c1, key=c1.get)
    share = c1[mode] / pmf[1.0]["n"]
    low = (c4.get(4, 0) + c4.get(5, 0)) / pmf[0.25]["n"]
    ok = mode == 5 and share >= 0.45 and low >= 0.75
    report(1, ok, f"P_max=1W counts={c1} mode={mode} share={share:.3f}; P_max=0.25W counts={c4} P(4|5)={low:.3f}")
    assert ok


def test_c2_ee_advantage(report, snr_sweep):
    at5 = snr_sweep[5.0]
    ee1 = at5[1.0]["mean_ee_bits_hz_j"]
    ee04 = at5[0.4]["mean_ee_bits_hz_j"]
    base = at5[1.0]["mean_baseline_ee_bits_hz_j"]
    g_base, g_rho = ee1 / base - 1, ee1 / ee04 - 1
    ok = 0.15 <= g_base <= 0.35 and 0.05 <= g_rho <= 0.25
    report(2, ok, f"SNR=5dB EE rho=1 {ee1:.4f}, FD {base:.4f} (+{g_base:.1%}, want 15-35%), "
                  f"rho=0.4 {ee04:.4f} (+{g_rho:.1%}, want 5-25%)")
    assert ok


def test_c3_low_snr_rate_match(report, snr_sweep):
    at = snr_sweep[-25.0]
    fd = at[1.0]["mean_baseline_rate_bps_hz"]
    rel = {rho: at[rho]["mean_rate_bps_hz"] / fd - 1 for rho in RHOS}
    ok = all(abs(v) <= 0.10 for v in rel.values())
    report(3, ok, f"SNR=-25dB FD rate {fd:.4f}; hybrid relative gap "
                  + ", ".join(f"rho={r}: {v:+.1%}" for r, v in rel.items()) + " (want within 10%)")
    assert ok


def test_c4_rho_ordering(report, snr_sweep, nrx_sweep):
    bad = []
    for name, sweep in (("snr_db", snr_sweep), ("n_rx", nrx_sweep)):
        for pt, cells in sweep.items():
            for key in ("mean_ee_bits_hz_j", "mean_rate_bps_hz"):
                vals = [cells[r][key] for r in RHOS]
                if np.any(np.diff(vals) < 0):
                    bad.append(f"{name}={pt} {key}")
    ok = not bad
    report(4, ok, f"{len(snr_sweep) + len(nrx_sweep)} sweep points, violations: {bad or 'none'}")
    assert ok


def test_c5_beampattern_mainlobes(report):
    res = run_experiment(ExperimentSpec(experiment="beampattern", trials=TRIALS, workers=WORKERS,
                                        sweep={"rho": [0.2, 0.4]}))
    grid = np.asarray(res.patterns["angles_deg"])
    targets = np.array([-30.0, 0.0, 30.0])
    details, ok = [], True
    for rho in (0.2, 0.4):
        peaks = np.sort(local_maxima(res.patterns[f"rho={rho:g}"], grid, 3))
        good = len(peaks) == 3 and np.all(np.abs(peaks - targets) <= 2.0)
        ok &= bool(good)
        details.append(f"rho={rho}: peaks {peaks.tolist()}")
    report(5, ok, "; ".join(details) + " (want within 2 deg of -30, 0, 30)")
    assert ok


# -- criterion 6: invariants on randomized small instances -----------------------

def _dinkelbach_run(r):
    L = int(r.integers(1, 7))
    gains = np.sort(r.exponential(size=L) * 10 ** r.uniform(-3, 3, L))[::-1]
    pm = PowerModel(p_max=float(r.choice([0.25, 1.0, 4.0])), connectivity=str(r.choice(["partial", "full"])))
    cfg = RfSelectConfig()
    sel = select_rf_chains(gains, 10 ** (-r.uniform(-30, 20) / 10), pm, cfg)
    errs = []
    if np.any(np.diff(sel.nu_trace) < -1e-12):
        errs.append("nu decreased")
    if sel.converged and abs(sel.g_trace[-1]) > cfg.beta:
        errs.append("|G| > beta at convergence")
    if abs(sel.p_b.sum() - pm.p_max) > 1e-9 or np.any(sel.p_b < 0):
        errs.append("power allocation off budget")
    return errs


def _altmin_run(r):
    l_t = int(r.choice([1, 2, 3, 4, 6]))
    n_tx = 12
    n_s = int(r.integers(2, 5))
    n_p = int(r.integers(1, n_s + 1))
    p_max = float(r.choice([0.25, 1.0, 4.0]))
    F_DF = crandn(r, n_tx, n_s)
    F_DF *= np.sqrt(p_max) / np.linalg.norm(F_DF)
    scene = RadarScene(target_angles=tuple(r.uniform(-1.2, 1.2, n_p)), n_tx=n_tx)
    F_RD = build_radar_precoder(scene).F_RD
    hp = design_hybrid(F_DF, F_RD, HybridConfig(rho=float(r.uniform()), p_max=p_max), l_t, r)
    errs = []
    if np.any(np.diff(hp.objective_trace) > 1e-12):
        errs.append("objective increased")
    owner = subarray_layout(n_tx, hp.l_t)
    nz = hp.F_RF[np.arange(n_tx), owner]
    if np.max(np.abs(np.abs(nz) - 1)) > 1e-12 or np.count_nonzero(hp.F_RF) != n_tx:
        errs.append("analog structure")
    if np.linalg.norm(hp.U_T @ hp.U_T.conj().T - np.eye(n_p)) > 1e-10:
        errs.append("U_T not row-unitary")
    if abs(np.linalg.norm(hp.precoder) ** 2 - p_max) > 1e-9:
        errs.append("transmit power")
    return errs


def test_c6_algorithmic_invariants(report):
    runs = 10_000
    failures = {}
    for seed in range(runs):
        r = np.random.default_rng([6, seed])
        errs = _dinkelbach_run(r) if seed % 2 == 0 else _altmin_run(r)
        for e in errs:
            failures[e] = failures.get(e, 0) + 1
    ok = not failures
    report(6, ok, f"{runs} randomized runs ({runs // 2} Dinkelbach, {runs // 2} alternating minimization), "
                  f"violations: {failures or 'none'}")
    assert ok


# -- criterion 7: oracle equivalence -----------------------------------------------

def _grid_best_ee(gains, noise_var, pm, points):
    alpha, static = power_terms(pm, 120)
    axis = np.linspace(0, pm.p_max, points)
    best = -np.inf
    for head in itertools.product(axis, repeat=len(gains) - 1):
        last = pm.p_max - sum(head)
        if last < -1e-12:
            continue
        p = np.array([*head, max(last, 0.0)])
        best = max(best, rate_parallel(gains, p, noise_var) / (alpha * p.sum() + static))
    return best


def _projected_gradient(F_RF, target, radius, B, steps=2000, lr=0.02):
    for _ in range(steps):
        B = B - lr * 2 * F_RF.conj().T @ (F_RF @ B - target)
        B *= radius / np.linalg.norm(B)
    return B


def test_c7_oracle_equivalence(report):
    pm = PowerModel()
    alpha, static = power_terms(pm, 120)
    wf_gap = 0.0
    for seed in range(30):
        r = np.random.default_rng([7, seed])
        L = 1 + seed % 4
        gains = np.sort(r.exponential(size=L) * 10 ** r.uniform(-1, 2, L))[::-1]
        s2 = 10 ** (-r.uniform(-15, 10) / 10)
        p = waterfill_step(gains, 0.0, s2, alpha, pm.p_max)
        ee = rate_parallel(gains, p, s2) / (alpha * p.sum() + static)
        best = _grid_best_ee(gains, s2, pm, {1: 2, 2: 2001, 3: 201, 4: 41}[L])
        wf_gap = max(wf_gap, (best - ee) / best)

    fbb_gap = -np.inf
    ut_gap = -np.inf
    for seed in range(10):
        r = np.random.default_rng([70, seed])
        n_tx, l_t, n_s, n_p = 8, 2, 2, 2
        rho = float(r.uniform(0.1, 0.9))
        owner = subarray_layout(n_tx, l_t)
        F_RF = analog_from_phases(r.uniform(0, 2 * np.pi, n_tx), owner, l_t)
        F_DF = crandn(r, n_tx, n_s)
        F_DF /= np.linalg.norm(F_DF)
        F_RD = build_radar_precoder(RadarScene(target_angles=tuple(r.uniform(-1.2, 1.2, n_p)), n_tx=n_tx)).F_RD
        U_T = random_row_unitary(r, n_p, n_s)
        radius = np.sqrt(l_t / n_tx)
        B = solve_fbb(F_RF, F_DF, F_RD, U_T, rho, 1.0, n_tx, l_t)
        f = weighted_objective(F_RF, B, U_T, F_DF, F_RD, rho)
        Z = r.standard_normal((10_000, l_t, n_s)) + 1j * r.standard_normal((10_000, l_t, n_s))
        Z *= radius / np.linalg.norm(Z, axis=(1, 2), keepdims=True)
        X = np.einsum("ij,njk->nik", F_RF, Z)
        T = F_RD @ U_T
        probes = rho * np.sum(np.abs(X - F_DF) ** 2, (1, 2)) + (1 - rho) * np.sum(np.abs(X - T) ** 2, (1, 2))
        pg = _projected_gradient(F_RF, rho * F_DF + (1 - rho) * T, radius, Z[0])
        f_pg = weighted_objective(F_RF, pg, U_T, F_DF, F_RD, rho)
        fbb_gap = max(fbb_gap, f - min(probes.min(), f_pg))

        Ut = solve_ut(F_RD, F_RF, B)
        X0 = F_RF @ B
        f_ut = np.linalg.norm(F_RD @ Ut - X0) ** 2
        f_probe = min(np.linalg.norm(F_RD @ random_row_unitary(r, n_p, n_s) - X0) ** 2 for _ in range(1000))
        ut_gap = max(ut_gap, f_ut - f_probe)

    ok = wf_gap <= 1e-3 and fbb_gap <= 1e-6 and ut_gap <= 0
    report(7, ok, f"waterfill worst relative EE gap to grid {wf_gap:.2e} (<=1e-3); "
                  f"F_BB worst excess over probes/PG {fbb_gap:.2e} (<=1e-6); "
                  f"U_T worst excess over 1000 probes {ut_gap:.2e} (<=0)")
    assert ok


def test_c8_determinism(report, tmp_path):
    paths = []
    for name in ("a.csv", "b.csv"):
        spec = ExperimentSpec(experiment="ee_rate_vs_snr", trials=20, master_seed=123,
                              sweep={"snr_db": [-25, 5]})
        run_experiment(spec, tmp_path / name)
        paths.append(tmp_path / name)
    ok = paths[0].read_bytes() == paths[1].read_bytes()
    report(8, ok, f"two runs with master seed 123, {paths[0].stat().st_size} bytes, identical={ok}")
    assert ok
