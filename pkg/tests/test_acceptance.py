"""Acceptance criteria at the stated tolerances.

Each test records one PASS/FAIL line, echoed in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, dbm_for_snr, unit_realization
from ntnsim import engine
from ntnsim.channel import fspl_db
from ntnsim.cli import main
from ntnsim.impairments import link_kappas, relay_ceiling
from ntnsim.ris import align_phases, cascaded_channel
from ntnsim.scenario import CONDITIONS, SCHEMES, RicianK, ScenarioConfig, ShadowingSigma
from ntnsim.schemes import SLOT_FRACTION, evaluate_scheme

TRIALS = 10_000


def verdict(number: int, title: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def default_run():
    """Both default sweeps at 10^4 trials with per-trial arrays kept."""
    cfg = ScenarioConfig()
    t0 = time.perf_counter()
    power = engine.run_sweep(cfg, engine.sweep_from_config(cfg, "power", TRIALS), keep_trials=True)
    rho = engine.run_sweep(cfg, engine.sweep_from_config(cfg, "rho", TRIALS), keep_trials=True)
    return {"power": power, "rho": rho, "elapsed": time.perf_counter() - t0}


def index(records):
    return {(r.axis_value, r.scheme, r.condition): r for r in records}


def test_criterion_1_scheme_ordering():
    cfg = ScenarioConfig()
    t0 = time.perf_counter()
    spec = engine.SweepSpec("tx_power_dbm", (30.0,), TRIALS, cfg.run.seed, SCHEMES, ("ideal",))
    recs = {r.scheme: r for r in engine.run_sweep(cfg, spec)}
    elapsed = time.perf_counter() - t0
    gaps = []
    ok = elapsed < 30.0
    for hi, lo in (("IV", "III"), ("III", "II"), ("II", "I")):
        gap = recs[hi].sum_rate_mean - recs[lo].sum_rate_mean
        ci = recs[hi].sum_rate_ci95 + recs[lo].sum_rate_ci95
        ok &= gap > ci
        gaps.append(f"{hi}-{lo} {gap:.3f}>{ci:.3f}")
    means = " ".join(f"{s}={recs[s].sum_rate_mean:.3f}" for s in SCHEMES)
    verdict(1, "sum-rate ordering IV>III>II>I at 30 dBm", ok, f"{means}; {', '.join(gaps)}; {elapsed:.1f} s")


def test_criterion_2_impairment_degradation(default_run):
    violations = 0
    checked = 0
    for sweep in ("power", "rho"):
        recs, trials = default_run[sweep]
        idx = index(recs)
        for (value, s, c), rec in idx.items():
            if c != "ideal":
                continue
            imp = idx[(value, s, "impaired")]
            violations += imp.sum_rate_mean > rec.sum_rate_mean
            violations += imp.energy_efficiency > rec.energy_efficiency
            violations += imp.coverage_all_users > rec.coverage_all_users
            violations += imp.coverage_per_user_mean > rec.coverage_per_user_mean
            a, b = trials[(value, s, "ideal")], trials[(value, s, "impaired")]
            violations += int(np.count_nonzero(b["sum_rate"] > a["sum_rate"]))
            violations += int(np.count_nonzero(b["rates"] > a["rates"]))
            violations += int(np.count_nonzero(b["power"] != a["power"]))
            checked += 1
    verdict(2, "impaired <= ideal for sum rate, EE, coverage", violations == 0,
            f"{checked} point/scheme pairs, {violations} violations")


def test_criterion_3_rate_ceiling():
    cfg = ScenarioConfig().replace(geometry={"num_users": 1}, noma={"coefficients": (1.0,), "rate_targets": (0.1,)})
    tx = dbm_for_snr(cfg, 1e8)
    real = unit_realization(M=cfg.M, N=cfg.N, L=1)
    kap = link_kappas(cfg.impairments, "impaired")
    errors = {}
    for s in SCHEMES:
        if s == "II":
            ceiling_sndr = relay_ceiling(cfg.impairments)
        else:
            ceiling_sndr = 1.0 / (kap["ris"] if s in ("III", "IV") else kap["direct"]) ** 2
        ceiling = SLOT_FRACTION[s] * math.log2(1.0 + ceiling_sndr)
        rate = float(evaluate_scheme(s, real, cfg, "impaired", tx_power_dbm=tx).per_user_rate[0])
        errors[s] = abs(rate - ceiling) / ceiling
    ok = all(e <= 0.02 for e in errors.values())
    verdict(3, "impaired rate within 2% of ceiling at +80 dB", ok,
            " ".join(f"{s}={e:.2e}" for s, e in errors.items()))


def test_criterion_4_energy_efficiency(default_run):
    recs, _ = default_run["rho"]
    idx = index(recs)
    values = ScenarioConfig().sweep.rho
    ok = True
    notes = []
    for c in CONDITIONS:
        iv4, iv1 = idx[(4.0, "IV", c)], idx[(1.0, "IV", c)]
        ok &= iv4.energy_efficiency - iv1.energy_efficiency > iv4.energy_efficiency_ci95 + iv1.energy_efficiency_ci95
        notes.append(f"{c} IV(4)/IV(1)={iv4.energy_efficiency / iv1.energy_efficiency:.2f}")
        for v in values:
            iii = idx[(v, "III", c)]
            for other in ("I", "II"):
                o = idx[(v, other, c)]
                ok &= iii.energy_efficiency - o.energy_efficiency > iii.energy_efficiency_ci95 + o.energy_efficiency_ci95
        worst = min(idx[(v, "III", c)].energy_efficiency / max(idx[(v, "I", c)].energy_efficiency,
                                                               idx[(v, "II", c)].energy_efficiency) for v in values)
        notes.append(f"{c} min III/max(I,II)={worst:.2f}")
    verdict(4, "EE(IV,rho=4)>EE(IV,rho=1); EE(III)>EE(I),EE(II) at every rho", ok, "; ".join(notes))


def test_criterion_5_coverage(default_run):
    recs, _ = default_run["power"]
    idx = index(recs)
    ok = True
    notes = []
    for metric in ("coverage_all_users", "coverage_per_user_mean"):
        cov = {s: getattr(idx[(30.0, s, "ideal")], metric) for s in SCHEMES}
        drop = {s: cov[s] - getattr(idx[(30.0, s, "impaired")], metric) for s in SCHEMES}
        ok &= cov["IV"] > cov["III"] > cov["II"] > cov["I"]
        ok &= min(drop["I"], drop["II"]) > max(drop["III"], drop["IV"])
        notes.append(f"{metric}: " + " ".join(f"{s}={cov[s]:.3f}/drop {drop[s]:.4f}" for s in SCHEMES))
    verdict(5, "coverage IV>III>II>I and larger drop for I, II", ok, "; ".join(notes))


def test_criterion_6_rayleigh_outage():
    rate = 1.0
    cfg = ScenarioConfig().replace(
        geometry={"num_users": 1, "user_area_radius": 0.0},
        noma={"coefficients": (1.0,), "rate_targets": (rate,)},
        radio={"num_haps_antennas": 1, "rician_k": RicianK(-math.inf, -math.inf, 15.0, 10.0),
               "shadowing_sigma": ShadowingSigma(0.0, 0.0), "clutter_loss": 0.0},
        ris={"num_ris_elements": 1},
        impairments={"enabled": False},
    )
    n = 100_000
    h = cfg.geometry.haps_position
    g_pl = 10.0 ** (-fspl_db(math.dist((h.x, h.y, h.z), (0.0, 0.0, 0.0)), cfg.radio.carrier_frequency) / 10.0)
    # transmit power placing the analytic coverage near 0.5
    p = (2**rate - 1) * cfg.radio.noise_power / (g_pl * math.log(2.0))
    tx = 10.0 * math.log10(p) + 30.0
    spec = engine.SweepSpec("tx_power_dbm", (tx,), n, 606, ("I",), ("ideal",))
    (rec,) = engine.run_sweep(cfg, spec)
    expected = math.exp(-(2**rate - 1) * cfg.radio.noise_power / (p * g_pl))
    se = math.sqrt(expected * (1 - expected) / n)
    z = (rec.coverage_all_users - expected) / se
    verdict(6, "Rayleigh outage oracle within 3 SE at 1e5 trials", abs(z) <= 3.0,
            f"MC {rec.coverage_all_users:.5f} vs analytic {expected:.5f}, z={z:+.2f}")


def test_criterion_7_n_squared_law():
    rng = np.random.default_rng(7)
    draws = 10_000
    power = {}
    for n in (32, 64):
        g = (rng.standard_normal((draws, n)) + 1j * rng.standard_normal((draws, n))) / math.sqrt(2)
        f = (rng.standard_normal((draws, n)) + 1j * rng.standard_normal((draws, n))) / math.sqrt(2)
        c = cascaded_channel(g, f, align_phases(g, f, np.zeros(draws)), 1.0)
        power[n] = float(np.mean(np.abs(c) ** 2))
    ratio = power[64] / power[32]
    verdict(7, "aligned cascaded power N=64 vs N=32 in [3.6, 4.4]", 3.6 <= ratio <= 4.4, f"ratio {ratio:.3f}")


def test_criterion_8_determinism(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("sweep:\n  power_dbm: [10, 30, 50]\n")
    trials = 16 * engine.CHUNK_TRIALS
    outputs = {}
    for workers in (1, 4, 16):
        out = tmp_path / f"w{workers}"
        code = main(["run", "--config", str(cfg), "--sweep", "power", "--trials", str(trials), "--seed", "99",
                     "--workers", str(workers), "--out", str(out)])
        assert code == 0
        outputs[workers] = (out / "sweep_power.csv").read_bytes()
    ok = outputs[1] == outputs[4] == outputs[16]
    verdict(8, "byte-identical CSV for 1, 4, 16 workers", ok, f"{len(outputs[1])} bytes, {trials} trials")


def test_criterion_9_full_run_time(default_run):
    elapsed = default_run["elapsed"]
    n = len(default_run["power"][0]) + len(default_run["rho"][0])
    verdict(9, "full default run (both sweeps, 1e4 trials) < 120 s", elapsed < 120.0,
            f"{n} records in {elapsed:.1f} s on one worker")
