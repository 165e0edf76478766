"""Large-scale path loss and small-scale Rician fading."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .scenario import DEFAULT_LOS_TABLE, LinkGeometry, RadioConfig

# Below 1 m the far-field free-space model is not used.
MIN_DISTANCE = 1.0
# Finite stand-in for an infinite K-factor in vectorised draws.
K_CAP = 1e12


@dataclass(frozen=True)
class LinkState:
    is_los: bool
    shadowing_db: float
    pathloss_db: float


def fspl_db(distance, frequency):
    """Free-space path loss in dB for distance in m and frequency in Hz."""
    d = np.asarray(distance, dtype=float)
    if np.any(d < MIN_DISTANCE):
        raise ValueError(f"distance below {MIN_DISTANCE} m is outside the model range")
    if np.any(np.asarray(frequency) <= 0):
        raise ValueError("frequency must be positive")
    out = 20.0 * np.log10(d) + 20.0 * np.log10(frequency) - 147.55
    return float(out) if out.ndim == 0 else out


def los_probability(elevation, environment: str = "urban",
                    table: Sequence[tuple[float, float]] = DEFAULT_LOS_TABLE):
    """LoS probability by linear interpolation in an elevation table.

    Elevations outside the table are clamped to the first/last row.
    """
    if environment != "urban":
        raise ValueError(f"unsupported environment {environment!r}")
    el = np.asarray(elevation, dtype=float)
    if np.any((el < 0) | (el > 90)):
        raise ValueError("elevation must lie in [0, 90] degrees")
    xs = np.array([row[0] for row in table], dtype=float)
    ps = np.array([row[1] for row in table], dtype=float)
    out = np.clip(np.interp(el, xs, ps), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def k_linear(k_db: float) -> float:
    return 0.0 if k_db == -math.inf else 10.0 ** (k_db / 10.0)


def link_k_factor(radio: RadioConfig, link_class: str, is_los) -> np.ndarray:
    """Linear K-factor for a link class; ``is_los`` only matters for haps_ground."""
    k = radio.rician_k
    if link_class == "haps_ground":
        return np.where(is_los, k_linear(k.haps_ground_los), k_linear(k.haps_ground_nlos))
    if link_class == "haps_uav":
        return np.full(np.shape(is_los), k_linear(k.haps_uav))
    if link_class == "uav_ground":
        return np.full(np.shape(is_los), k_linear(k.uav_ground))
    raise ValueError(f"unknown link class {link_class!r}")


def pathloss_from_draws(radio: RadioConfig, link_class: str, fspl, elevation, u, z):
    """Vectorised link state from pre-drawn uniforms ``u`` and normals ``z``.

    Returns ``(is_los, shadowing_db, pathloss_db)`` arrays.
    uav_ground links are always LoS; the other classes are LoS with the
    elevation-dependent table probability.
    """
    if link_class == "uav_ground":
        is_los = np.ones(np.shape(u), dtype=bool)
    else:
        p = los_probability(elevation, radio.environment, radio.los_table)
        is_los = np.asarray(u) < p
    sigma = np.where(is_los, radio.shadowing_sigma.los, radio.shadowing_sigma.nlos)
    shadow = sigma * np.asarray(z)
    clutter = radio.clutter_loss if link_class == "haps_ground" else radio.aerial_clutter_loss
    pl = fspl + shadow + np.where(is_los, 0.0, clutter)
    return is_los, shadow, pl


def sample_link_state(geom: LinkGeometry, radio: RadioConfig, rng: np.random.Generator) -> LinkState:
    """Draw LoS state and shadowing for one link."""
    fspl = fspl_db(geom.slant_distance, radio.carrier_frequency)
    u = rng.random()
    z = rng.standard_normal()
    is_los, shadow, pl = pathloss_from_draws(radio, geom.link_class, fspl, geom.elevation_angle, u, z)
    return LinkState(bool(is_los), float(shadow), float(pl))


def rician_from_normals(k_factor, mean_power, w):
    """Rician gain from standard complex Gaussian samples ``w``."""
    k = np.minimum(np.asarray(k_factor, dtype=float), K_CAP)
    los = np.sqrt(k / (k + 1.0))
    nlos = np.sqrt(1.0 / (k + 1.0))
    return np.sqrt(mean_power) * (los + nlos * w)


def complex_normal(rng: np.random.Generator, shape=()) -> np.ndarray:
    """Circularly-symmetric complex Gaussian with unit variance."""
    parts = rng.standard_normal((2, *np.atleast_1d(shape))) if shape != () else rng.standard_normal(2)
    return (parts[0] + 1j * parts[1]) * math.sqrt(0.5)


def sample_rician(k_factor, mean_power, rng: np.random.Generator, size=()):
    """Rician-faded complex gain with E|g|^2 = mean_power.

    ``k_factor`` is linear; ``math.inf`` gives the deterministic LoS gain.
    """
    if np.any(np.asarray(k_factor) < 0):
        raise ValueError("k_factor must be >= 0")
    if np.any(np.asarray(mean_power) <= 0):
        raise ValueError("mean_power must be > 0")
    if np.all(np.isinf(k_factor)):
        g = np.full(size, math.sqrt(mean_power), dtype=complex)
        return complex(g) if g.ndim == 0 else g
    w = complex_normal(rng, size)
    g = rician_from_normals(k_factor, mean_power, w)
    return complex(g) if np.ndim(g) == 0 else g


def channel_gain(state, fading):
    """Scale a fading coefficient by the amplitude of the path loss.

    ``state`` is a :class:`LinkState` or a path loss in dB (scalar or array).
    """
    pl = state.pathloss_db if isinstance(state, LinkState) else state
    g = np.asarray(fading) * np.sqrt(10.0 ** (-np.asarray(pl, dtype=float) / 10.0))
    return complex(g) if g.ndim == 0 else g
