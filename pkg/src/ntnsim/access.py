"""Power-domain NOMA with perfect SIC, Shannon rates and transmit antenna selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NomaAllocation:
    coefficients: tuple[float, ...]  # descending, one per SIC rank
    order: tuple[int, ...]  # user indices, weakest first

    def __post_init__(self) -> None:
        c = self.coefficients
        if len(c) != len(self.order):
            raise ValueError("coefficients and order must have equal length")
        if any(a <= 0 for a in c) or abs(sum(c) - 1.0) > 1e-9:
            raise ValueError("coefficients must be positive and sum to 1")
        if any(b > a for a, b in zip(c, c[1:])):
            raise ValueError("coefficients must be in descending order")
        if sorted(self.order) != list(range(len(c))):
            raise ValueError("order must be a permutation of user indices")


def sic_order(effective_gains) -> list[int]:
    """User indices sorted by ascending gain, ties broken by lower index."""
    g = np.asarray(effective_gains, dtype=float)
    if np.any(g < 0):
        raise ValueError("gains must be >= 0")
    return [int(i) for i in np.argsort(g, kind="stable")]


def allocate(effective_gains, coefficients) -> NomaAllocation:
    """Pair descending power fractions with users from weakest to strongest."""
    return NomaAllocation(tuple(sorted(coefficients, reverse=True)), tuple(sic_order(effective_gains)))


def noma_sindrs(effective_gains, allocation: NomaAllocation, tx_power, noise_power, kappa_agg=0.0):
    """Per-user SINDR after perfect SIC, indexed like ``effective_gains``.

    The user at SIC rank k keeps interference from the stronger ranks only;
    hardware distortion scales with its own received power.
    """
    g = np.asarray(effective_gains, dtype=float)
    if g.shape != (len(allocation.order),):
        raise ValueError("gains and allocation have mismatched lengths")
    a_user, rest_user = _rank_terms(np.asarray(allocation.order), np.asarray(allocation.coefficients))
    return _sindr(tx_power * g / noise_power, a_user, rest_user, kappa_agg)


def noma_sindrs_batch(snr, coefficients, kappa_agg=0.0, order_by=None):
    """Vectorised NOMA SINDRs over leading axes; the user axis is last.

    ``snr`` is the per-user P*G/N0. SIC order follows ``order_by`` (defaults
    to ``snr``) so paired comparisons can share one ordering.
    """
    snr = np.asarray(snr, dtype=float)
    key = snr if order_by is None else np.asarray(order_by, dtype=float)
    order = np.argsort(key, axis=-1, kind="stable")
    coeffs = np.sort(np.asarray(coefficients, dtype=float))[::-1]
    a_user, rest_user = _rank_terms(order, coeffs)
    return _sindr(snr, a_user, rest_user, kappa_agg)


def _rank_terms(order, coeffs):
    """Per-user own coefficient and sum of coefficients of stronger ranks."""
    tail = np.concatenate([np.cumsum(coeffs[::-1])[::-1][1:], [0.0]])
    rank = np.argsort(order, axis=-1, kind="stable")
    return coeffs[rank], tail[rank]


def _sindr(snr, a, rest, kappa_agg):
    k2 = float(kappa_agg) ** 2
    return a * snr / (snr * (rest + k2) + 1.0)


def rates(sindrs, slot_fraction: float = 1.0):
    """Spectral efficiency in bit/s/Hz per user."""
    s = np.asarray(sindrs, dtype=float)
    if np.any(s < 0):
        raise ValueError("SINDR must be >= 0")
    if not 0 < slot_fraction <= 1:
        raise ValueError("slot_fraction must lie in (0, 1]")
    out = slot_fraction * np.log2(1.0 + s)
    return float(out) if out.ndim == 0 else out


def select_antenna(per_antenna_sum_rates) -> int:
    """Index of the best antenna, lowest index on ties."""
    r = np.asarray(per_antenna_sum_rates, dtype=float)
    if r.size < 1:
        raise ValueError("need at least one antenna")
    return int(np.argmax(r))
