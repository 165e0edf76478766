import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from ntnsim.impairments import aggregate_kappa, af_cascade_sndr, effective_sndr, link_kappas, relay_ceiling
from ntnsim.scenario import ImpairmentProfile

snr_st = st.floats(0, 1e9, allow_nan=False)
kappa_st = st.floats(0, 1.0, allow_nan=False)


@pytest.mark.parametrize("kappas, expected", [([0.1, 0.0], 0.1), ([0, 0, 0], 0.0), ([0.1, 0.1], 0.14142)])
def test_aggregate_examples(kappas, expected):
    assert aggregate_kappa(kappas) == pytest.approx(expected, abs=1e-5)


def test_aggregate_rejects_negative():
    with pytest.raises(ValueError):
        aggregate_kappa([0.1, -0.1])


def test_effective_sndr_examples():
    assert effective_sndr(7.3, 0.0) == 7.3
    assert effective_sndr(math.inf, 0.1) == pytest.approx(100.0)
    assert effective_sndr(1e15, 0.1) == pytest.approx(100.0, rel=1e-9)
    assert effective_sndr(10.0, 0.1) == pytest.approx(9.0909, abs=1e-4)


@given(snr_st, snr_st, st.floats(1e-3, 1.0))
def test_effective_sndr_monotone_in_snr(a, b, k):
    lo, hi = sorted((a, b))
    assume(hi > lo * (1 + 1e-9))
    assert effective_sndr(lo, k) < effective_sndr(hi, k) or effective_sndr(hi, k) == pytest.approx(1 / k**2)
    assert effective_sndr(hi, k) <= 1.0 / k**2


@given(st.floats(1e-6, 1e9), st.floats(1e-3, 1.0), st.floats(1e-3, 1.0))
def test_effective_sndr_decreasing_in_kappa(snr, k1, k2):
    lo, hi = sorted((k1, k2))
    assume(hi > lo * 1.001)
    assert effective_sndr(snr, hi) <= effective_sndr(snr, lo)


@given(snr_st, kappa_st)
def test_effective_sndr_never_exceeds_snr(snr, k):
    out = effective_sndr(snr, k)
    assert out <= snr
    if k == 0 or snr == 0:
        assert out == snr


def test_af_examples():
    assert af_cascade_sndr(0.0, 5.0) == 0.0
    assert af_cascade_sndr(10.0, 10.0) == pytest.approx(4.7619, abs=1e-4)
    g = 1e9
    assert af_cascade_sndr(g, g) / (g / 2) == pytest.approx(1.0, rel=1e-6)
    assert af_cascade_sndr(math.inf, 3.0) == 3.0
    assert af_cascade_sndr(2.0, math.inf) == 2.0


@given(snr_st, snr_st)
def test_af_below_weaker_hop(g1, g2):
    assert af_cascade_sndr(g1, g2) <= min(g1, g2)


def test_af_vectorised():
    out = af_cascade_sndr(np.array([10.0, 0.0]), np.array([10.0, 1.0]))
    assert out == pytest.approx([100 / 21, 0.0])


def test_link_kappas():
    prof = ImpairmentProfile(kappa_tx=0.1, kappa_rx=0.1, kappa_ris=0.05)
    assert set(link_kappas(prof, "ideal").values()) == {0.0}
    k = link_kappas(prof, "impaired")
    assert k["direct"] == k["hop1"] == k["hop2"] == pytest.approx(math.sqrt(0.02))
    assert k["ris"] == pytest.approx(0.15)
    assert set(link_kappas(ImpairmentProfile(enabled=False), "impaired").values()) == {0.0}
    with pytest.raises(ValueError):
        link_kappas(prof, "broken")


def test_relay_ceiling():
    prof = ImpairmentProfile(kappa_tx=0.1, kappa_rx=0.1)
    c = 1 / 0.02
    assert relay_ceiling(prof) == pytest.approx(c + c * c / (2 * c + 1))
