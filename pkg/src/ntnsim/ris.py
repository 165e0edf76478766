"""Transmissive RIS: phase alignment, cascaded channel, active-mode noise and power."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PASSIVE_ELEMENT_POWER = 0.010
ACTIVE_ELEMENT_POWER = 0.025


@dataclass(frozen=True)
class RisConfig:
    n_elements: int
    mode: str = "passive"
    rho: float = 1.0
    element_noise_power: float = 0.0
    element_static_power: float = PASSIVE_ELEMENT_POWER
    amp_efficiency: float = 0.5

    def __post_init__(self) -> None:
        if self.n_elements < 0:
            raise ValueError("n_elements must be >= 0")
        if self.mode == "passive":
            if not 0 < self.rho <= 1:
                raise ValueError("passive amplitude must be <= 1")
            if self.element_noise_power != 0:
                raise ValueError("a passive surface injects no noise")
        elif self.mode == "active":
            if self.rho < 1:
                raise ValueError("active amplitude must be >= 1")
        else:
            raise ValueError(f"unknown RIS mode {self.mode!r}")


def align_phases(g, f, direct):
    """Element phases that co-phase every cascaded term with the direct path.

    Works on arrays: ``g`` and ``f`` share a trailing element axis, ``direct``
    broadcasts against their leading axes. A zero direct path is taken to have
    phase 0. Returned phases lie in [0, 2*pi).
    """
    g = np.asarray(g)
    f = np.asarray(f)
    if g.shape[-1:] != f.shape[-1:]:
        raise ValueError(f"length mismatch: {g.shape[-1:]} vs {f.shape[-1:]}")
    ref = np.angle(np.asarray(direct))[..., None]
    theta = ref - np.angle(g) - np.angle(f)
    return np.mod(theta, 2.0 * math.pi)


def cascaded_channel(g, f, phases, rho):
    """Sum over elements of rho * g_n * exp(j theta_n) * f_n (last axis)."""
    g = np.asarray(g)
    f = np.asarray(f)
    phases = np.asarray(phases)
    if not (g.shape[-1:] == f.shape[-1:] == phases.shape[-1:]):
        raise ValueError("g, f and phases must have equal length")
    out = rho * np.sum(g * np.exp(1j * phases) * f, axis=-1)
    return complex(out) if np.ndim(out) == 0 else out


def forwarded_noise_power(ris: RisConfig, f):
    """Amplifier noise an active surface forwards to a receiver.

    Element noise adds incoherently: rho^2 * sigma^2 * sum |f_n|^2 over the
    trailing element axis. Zero for a passive surface.
    """
    if ris.mode == "passive":
        return 0.0 if np.ndim(f) <= 1 else np.zeros(np.shape(f)[:-1])
    out = ris.rho**2 * ris.element_noise_power * np.sum(np.abs(np.asarray(f)) ** 2, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def ris_power_consumption(ris: RisConfig, incident_power):
    """DC power drawn by the surface in W.

    Active elements pay (rho^2 - 1) of the incident power through an amplifier
    of efficiency ``amp_efficiency`` on top of the static per-element draw.
    """
    if np.any(np.asarray(incident_power) < 0):
        raise ValueError("incident power must be >= 0")
    static = ris.n_elements * ris.element_static_power
    if ris.mode == "passive":
        return static if np.ndim(incident_power) == 0 else np.full(np.shape(incident_power), static)
    extra = max(ris.rho**2 - 1.0, 0.0) * np.asarray(incident_power, dtype=float) / ris.amp_efficiency
    out = static + extra
    return float(out) if np.ndim(out) == 0 else out
