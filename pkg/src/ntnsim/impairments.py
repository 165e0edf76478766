"""Aggregate residual hardware-impairment model.

Transmitter and receiver distortion are modelled as additive noise whose
power is proportional to the signal power (kappa^2 * P), which turns an SNR
``g`` into the SNDR ``g / (g * kappa^2 + 1)``.
"""

from __future__ import annotations

import numpy as np

from .scenario import ImpairmentProfile


def aggregate_kappa(kappas) -> float:
    """Root-sum-square of independent distortion levels."""
    k = np.asarray(kappas, dtype=float)
    if np.any(k < 0):
        raise ValueError("impairment levels must be >= 0")
    return float(np.sqrt(np.sum(k * k)))


def effective_sndr(snr, kappa_agg):
    """SNDR after aggregate distortion ``kappa_agg``; saturates at 1 / kappa^2."""
    snr = np.asarray(snr, dtype=float)
    k2 = float(kappa_agg) ** 2
    if k2 == 0.0:
        out = snr
    else:
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(np.isinf(snr), 1.0 / k2, snr / (snr * k2 + 1.0))
    return float(out) if out.ndim == 0 else out


def af_cascade_sndr(gamma1, gamma2):
    """End-to-end SNR of a variable-gain amplify-and-forward relay."""
    g1 = np.asarray(gamma1, dtype=float)
    g2 = np.asarray(gamma2, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = g1 * g2 / (g1 + g2 + 1.0)
        # one infinite hop leaves the other hop's SNR
        out = np.where(np.isinf(g2), g1, out)
        out = np.where(np.isinf(g1), g2, out)
    return float(out) if out.ndim == 0 else out


def link_kappas(profile: ImpairmentProfile, condition: str) -> dict[str, float]:
    """Aggregate kappa for each physical chain used by the schemes.

    ``direct`` is HAPS transmitter + user receiver, ``hop1`` HAPS transmitter +
    UAV receiver, ``hop2`` UAV transmitter + user receiver, and ``ris`` adds
    the surface's own level to the direct chain.
    """
    if condition == "ideal" or not profile.enabled:
        return {"direct": 0.0, "hop1": 0.0, "hop2": 0.0, "ris": 0.0}
    if condition != "impaired":
        raise ValueError(f"unknown condition {condition!r}")
    tx, rx, ris = profile.kappa_tx, profile.kappa_rx, profile.kappa_ris
    chain = aggregate_kappa([tx, rx])
    return {"direct": chain, "hop1": chain, "hop2": chain, "ris": aggregate_kappa([tx, rx, ris])}


def relay_ceiling(profile: ImpairmentProfile) -> float:
    """High-SNR SNDR limit of the relayed scheme: direct branch plus AF branch.

    Both AF hops saturate at 1/kappa^2, so the combined limit is
    ``1/k_d^2 + af(1/k_1^2, 1/k_2^2)``.
    """
    k = link_kappas(profile, "impaired")
    return 1.0 / k["direct"] ** 2 + af_cascade_sndr(1.0 / k["hop1"] ** 2, 1.0 / k["hop2"] ** 2)
