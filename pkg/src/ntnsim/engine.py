"""Monte Carlo orchestration: seeding, sweeps and metric aggregation.

Every trial owns a generator seeded from ``(master_seed, trial_index)``.
Trials are drawn and evaluated in fixed-size chunks; the chunk layout does
not depend on the worker count and per-trial values are concatenated in
trial order before any reduction, so output is identical for any number of
workers.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import schemes as sch
from .scenario import CONDITIONS, SCHEMES, ScenarioConfig

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
# splitmix64 constants
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB

CHUNK_TRIALS = 1000
Z95 = 1.959963984540054

AXES = {"power": "tx_power_dbm", "rho": "rho"}


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    """splitmix64 output for stream position ``trial_index + 1``.

    The state increment is odd and the finalizer is a bijection on 64-bit
    words, so seeds are distinct for distinct indices below 2**64.
    """
    z = (master_seed + (trial_index + 1) * GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * MIX_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_2) & MASK64
    return z ^ (z >> 31)


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_trial_seed(master_seed, trial_index)))


@dataclass(frozen=True)
class SweepSpec:
    axis: str  # tx_power_dbm | rho
    values: tuple[float, ...]
    trials: int
    master_seed: int
    schemes: tuple[str, ...] = SCHEMES
    conditions: tuple[str, ...] = CONDITIONS

    def __post_init__(self) -> None:
        if self.axis not in AXES.values():
            raise ValueError(f"unknown sweep axis {self.axis!r}")
        if not self.values:
            raise ValueError("sweep values must not be empty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(s not in SCHEMES for s in self.schemes) or any(c not in CONDITIONS for c in self.conditions):
            raise ValueError("unknown scheme or condition")


@dataclass(frozen=True)
class MetricsRecord:
    scheme: str
    condition: str
    axis: str
    axis_value: float
    sum_rate_mean: float
    sum_rate_ci95: float
    energy_efficiency: float
    coverage_all_users: float
    coverage_per_user_mean: float
    trials: int
    master_seed: int
    total_power_mean: float = 0.0
    energy_efficiency_ci95: float = 0.0


def sweep_from_config(config: ScenarioConfig, sweep: str, trials: int | None = None,
                      seed: int | None = None) -> SweepSpec:
    """SweepSpec for ``power`` or ``rho`` using the config's sweep section."""
    if sweep not in AXES:
        raise ValueError(f"unknown sweep {sweep!r}; expected one of {sorted(AXES)}")
    values = config.sweep.power_dbm if sweep == "power" else config.sweep.rho
    return SweepSpec(
        axis=AXES[sweep],
        values=tuple(values),
        trials=config.run.trials if trials is None else trials,
        master_seed=config.run.seed if seed is None else seed,
        schemes=config.sweep.schemes,
        conditions=config.sweep.conditions,
    )


def draw_chunk(config: ScenarioConfig, master_seed: int, start: int, stop: int) -> sch.ChannelRealization:
    reals = [sch.draw_realization(config, trial_rng(master_seed, i)) for i in range(start, stop)]
    return sch.stack_realizations(reals)


def run_trial(config: ScenarioConfig, schemes=SCHEMES, conditions=CONDITIONS,
              rng: np.random.Generator | None = None, tx_power_dbm: float | None = None,
              rho: float | None = None) -> list[sch.SchemeResult]:
    """Draw one realization and evaluate every requested scheme/condition on it."""
    if rng is None:
        rng = trial_rng(config.run.seed, 0)
    real = sch.draw_realization(config, rng)
    return [
        sch.evaluate_scheme(s, real, config, c, tx_power_dbm, rho)
        for s in schemes
        for c in conditions
    ]


def coverage_probability(per_trial_rates, targets) -> tuple[float, float]:
    """Fraction of trials where all users meet their targets, and the mean per-user success rate."""
    r = np.asarray(per_trial_rates, dtype=float)
    t = np.asarray(targets, dtype=float)
    if r.ndim != 2 or r.shape[1] != t.shape[0]:
        raise ValueError("rates must be (trials, users) matching the targets")
    ok = r >= t
    return float(np.mean(np.all(ok, axis=1))), float(np.mean(ok))


def energy_efficiency(sum_rate_mean: float, bandwidth: float, total_power_mean: float) -> float:
    """Delivered bits per Joule."""
    if not total_power_mean > 0:
        raise ValueError("total power must be positive")
    return bandwidth * sum_rate_mean / total_power_mean


def _point_kwargs(spec: SweepSpec, value: float, config: ScenarioConfig) -> dict:
    if spec.axis == "tx_power_dbm":
        return {"tx_power_dbm": value, "rho": None}
    return {"tx_power_dbm": config.radio.tx_power_dbm, "rho": value}


def _evaluate_chunk(args) -> dict:
    """Per-trial arrays for every (axis value, scheme, condition) of one chunk."""
    config, spec, start, stop = args
    real = draw_chunk(config, spec.master_seed, start, stop)
    out = {}
    for value in spec.values:
        kw = _point_kwargs(spec, value, config)
        for s in spec.schemes:
            for c in spec.conditions:
                res = sch.evaluate_scheme(s, real, config, c, **kw)
                out[(value, s, c)] = (res.sum_rate, res.per_user_rate, res.total_power)
    return out


def run_sweep(config: ScenarioConfig, spec: SweepSpec, workers: int = 1,
              keep_trials: bool = False):
    """Run a sweep; returns records ordered by (axis_value, scheme, condition).

    With ``keep_trials`` the per-trial arrays are returned too, keyed by
    ``(axis_value, scheme, condition)``.
    """
    chunks = [(config, spec, a, min(a + CHUNK_TRIALS, spec.trials)) for a in range(0, spec.trials, CHUNK_TRIALS)]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(chunks))) as pool:
            parts = list(pool.map(_evaluate_chunk, chunks))
    else:
        parts = [_evaluate_chunk(c) for c in chunks]

    order = {s: i for i, s in enumerate(SCHEMES)}
    corder = {c: i for i, c in enumerate(CONDITIONS)}
    keys = sorted(parts[0], key=lambda k: (k[0], order[k[1]], corder[k[2]]))
    records = []
    per_trial = {}
    for key in keys:
        value, s, c = key
        sum_rate = np.concatenate([p[key][0] for p in parts])
        rates = np.concatenate([p[key][1] for p in parts])
        power = np.concatenate([p[key][2] for p in parts])
        records.append(aggregate(spec, config, value, s, c, sum_rate, rates, power))
        if keep_trials:
            per_trial[key] = {"sum_rate": sum_rate, "rates": rates, "power": power}
    log.info("sweep %s: %d records over %d trials", spec.axis, len(records), spec.trials)
    return (records, per_trial) if keep_trials else records


def aggregate(spec: SweepSpec, config: ScenarioConfig, value: float, scheme: str, condition: str,
              sum_rate: np.ndarray, rates: np.ndarray, power: np.ndarray) -> MetricsRecord:
    n = sum_rate.shape[0]
    mean = float(np.mean(sum_rate))
    sd = float(np.std(sum_rate, ddof=1)) if n > 1 else 0.0
    ci = Z95 * sd / math.sqrt(n)
    p_mean = float(np.mean(power))
    bw = config.radio.bandwidth
    cov_all, cov_user = coverage_probability(rates, config.noma.rate_targets)
    return MetricsRecord(
        scheme=scheme,
        condition=condition,
        axis=spec.axis,
        axis_value=float(value),
        sum_rate_mean=mean,
        sum_rate_ci95=ci,
        energy_efficiency=energy_efficiency(mean, bw, p_mean),
        coverage_all_users=cov_all,
        coverage_per_user_mean=cov_user,
        trials=n,
        master_seed=spec.master_seed,
        total_power_mean=p_mean,
        energy_efficiency_ci95=bw * ci / p_mean,
    )
