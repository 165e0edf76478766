"""Channel realizations and per-trial evaluation of the four access schemes.

Scheme I    single HAPS antenna, direct NOMA link.
Scheme II   HAPS with antenna selection, UAV amplify-and-forward relay over two
            half-duplex slots, direct and relayed copies combined by MRC.
Scheme III  HAPS with antenna selection, UAV-mounted passive transmissive RIS.
Scheme IV   as III with an active (amplifying) surface.

All array code carries arbitrary leading batch axes so a stack of trials is
evaluated in one pass; a single realization is the batch shape ``()``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import access, channel, impairments, ris as ris_mod
from .scenario import SCHEMES, Position3D, ScenarioConfig, _disc_offsets

SLOT_FRACTION = {"I": 1.0, "II": 0.5, "III": 1.0, "IV": 1.0}


def dbm_to_watts(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


@dataclass
class ChannelRealization:
    """Complex link gains of one trial (or a stack of trials along axis 0).

    ``direct``          (..., M, L)  HAPS antenna -> user
    ``haps_ris``        (..., M, N)  HAPS antenna -> RIS element
    ``ris_user``        (..., N, L)  RIS element -> user
    ``haps_uav_relay``  (..., M)     HAPS antenna -> relay receiver
    ``uav_user_relay``  (..., L)     relay transmitter -> user
    ``link_states``     per link class: ``is_los``, ``shadowing_db``, ``pathloss_db``
    """

    direct: np.ndarray
    haps_ris: np.ndarray
    ris_user: np.ndarray
    haps_uav_relay: np.ndarray
    uav_user_relay: np.ndarray
    link_states: dict[str, dict[str, np.ndarray]] = field(default_factory=dict)

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.direct.shape[:-2]

    @cached_property
    def ris_paths(self) -> "RisPaths":
        return _ris_paths(self)


@dataclass(frozen=True)
class RisPaths:
    """Unit-amplitude (rho = 1) aligned cascaded channels for every antenna."""

    cascaded: np.ndarray  # (..., M, L)
    incident_gain: np.ndarray  # (..., M)  sum_n |g_mn|^2
    forward_gain: np.ndarray  # (..., L)  sum_n |f_nl|^2


@dataclass
class SchemeResult:
    scheme: str
    condition: str
    per_user_sindr: np.ndarray
    per_user_rate: np.ndarray
    sum_rate: np.ndarray
    total_power: np.ndarray
    antenna: np.ndarray | None = None


# ---------------------------------------------------------------------------
# drawing


def draw_realization(config: ScenarioConfig, rng: np.random.Generator) -> ChannelRealization:
    """One full draw of link states and fading for a trial.

    Draw order is fixed so that a seed maps to one realization everywhere.
    """
    geo, radio = config.geometry, config.radio
    M, N, L = config.M, config.N, config.L
    haps = geo.haps_position.as_array()
    uav = geo.uav_position.as_array()

    offsets = _disc_offsets(L, geo.user_area_radius, rng)
    users = np.zeros((L, 3))
    users[:, 0] = uav[0] + offsets[:, 0]
    users[:, 1] = uav[1] + offsets[:, 1]

    u_hg = rng.random(L)
    z_hg = rng.standard_normal(L)
    u_hu = rng.random()
    z_hu = rng.standard_normal()
    z_ug = rng.standard_normal(L)

    f = radio.carrier_frequency
    d_hg = np.linalg.norm(haps - users, axis=1)
    el_hg = np.degrees(np.arctan2(haps[2] - users[:, 2], np.hypot(haps[0] - users[:, 0], haps[1] - users[:, 1])))
    d_hu = float(np.linalg.norm(haps - uav))
    el_hu = math.degrees(math.atan2(haps[2] - uav[2], math.hypot(haps[0] - uav[0], haps[1] - uav[1])))
    d_ug = np.linalg.norm(uav - users, axis=1)
    el_ug = np.degrees(np.arctan2(uav[2] - users[:, 2], np.hypot(uav[0] - users[:, 0], uav[1] - users[:, 1])))

    hg = channel.pathloss_from_draws(radio, "haps_ground", channel.fspl_db(d_hg, f), el_hg, u_hg, z_hg)
    hu = channel.pathloss_from_draws(radio, "haps_uav", channel.fspl_db(d_hu, f), el_hu, u_hu, z_hu)
    ug = channel.pathloss_from_draws(radio, "uav_ground", channel.fspl_db(d_ug, f), el_ug, np.zeros(L), z_ug)

    k_hg = channel.link_k_factor(radio, "haps_ground", hg[0])  # (L,)
    k_hu = float(channel.link_k_factor(radio, "haps_uav", hu[0]))
    k_ug = channel.link_k_factor(radio, "uav_ground", ug[0])  # (L,)

    w_direct = channel.complex_normal(rng, (M, L))
    w_haps_ris = channel.complex_normal(rng, (M, N))
    w_ris_user = channel.complex_normal(rng, (N, L))
    w_h1 = channel.complex_normal(rng, (M,))
    w_h2 = channel.complex_normal(rng, (L,))

    elem = 10.0 ** (config.ris.element_gain / 20.0)
    direct = channel.channel_gain(hg[2][None, :], channel.rician_from_normals(k_hg[None, :], 1.0, w_direct))
    haps_ris = elem * channel.channel_gain(hu[2], channel.rician_from_normals(k_hu, 1.0, w_haps_ris))
    ris_user = elem * channel.channel_gain(ug[2][None, :], channel.rician_from_normals(k_ug[None, :], 1.0, w_ris_user))
    h1 = channel.channel_gain(hu[2], channel.rician_from_normals(k_hu, 1.0, w_h1))
    h2 = channel.channel_gain(ug[2], channel.rician_from_normals(k_ug, 1.0, w_h2))

    states = {
        name: {"is_los": np.asarray(s[0]), "shadowing_db": np.asarray(s[1], dtype=float),
               "pathloss_db": np.asarray(s[2], dtype=float)}
        for name, s in (("haps_ground", hg), ("haps_uav", hu), ("uav_ground", ug))
    }
    return ChannelRealization(direct, haps_ris, ris_user, h1, h2, states)


def stack_realizations(reals: list[ChannelRealization]) -> ChannelRealization:
    """Stack single realizations along a new leading trial axis."""
    states = {
        name: {key: np.stack([r.link_states[name][key] for r in reals]) for key in reals[0].link_states[name]}
        for name in reals[0].link_states
    }
    return ChannelRealization(
        np.stack([r.direct for r in reals]),
        np.stack([r.haps_ris for r in reals]),
        np.stack([r.ris_user for r in reals]),
        np.stack([r.haps_uav_relay for r in reals]),
        np.stack([r.uav_user_relay for r in reals]),
        states,
    )


# ---------------------------------------------------------------------------
# evaluation


def _ris_paths(real: ChannelRealization) -> RisPaths:
    # Phases target the weakest direct user of each antenna.
    h = real.direct  # (..., M, L)
    g = real.haps_ris  # (..., M, N)
    f = real.ris_user  # (..., N, L)
    weakest = np.argmin(np.abs(h) ** 2, axis=-1)  # (..., M)
    h_w = np.take_along_axis(h, weakest[..., None], axis=-1)[..., 0]  # (..., M)
    f_t = np.swapaxes(f, -1, -2)  # (..., L, N)
    f_w = np.take_along_axis(f_t[..., None, :, :], weakest[..., None, None], axis=-2)[..., 0, :]  # (..., M, N)
    theta = ris_mod.align_phases(g, f_w, h_w)
    weighted = g * np.exp(1j * theta)  # (..., M, N)
    cascaded = np.matmul(weighted, f)  # (..., M, L)
    return RisPaths(
        cascaded=cascaded,
        incident_gain=np.sum(np.abs(g) ** 2, axis=-1),
        forward_gain=np.sum(np.abs(f) ** 2, axis=-2),
    )


def surface_config(config: ScenarioConfig, mode: str, rho: float | None = None) -> ris_mod.RisConfig:
    """RisConfig for Scheme III (passive) or IV (active).

    ``ris.rho`` parameterizes the surface whose mode matches ``ris.ris_mode``;
    the other surface runs at unity amplitude.
    """
    sec = config.ris
    if rho is None:
        rho = sec.rho if sec.ris_mode == mode else 1.0
    default_static = ris_mod.PASSIVE_ELEMENT_POWER if mode == "passive" else ris_mod.ACTIVE_ELEMENT_POWER
    static = default_static if sec.element_static_power is None else sec.element_static_power
    if mode == "passive":
        noise = 0.0
    else:
        noise = config.radio.thermal_noise_power if sec.element_noise_power is None else sec.element_noise_power
    return ris_mod.RisConfig(sec.num_ris_elements, mode, rho, noise, static, sec.amp_efficiency)


def total_power(scheme_id: str, config: ScenarioConfig, incident_ris_power=0.0, tx_power_w: float | None = None,
                rho: float | None = None):
    """Consumed power in W: HAPS PA and circuits, user circuits, scheme extras."""
    pw = config.power
    p_tx = dbm_to_watts(config.radio.tx_power_dbm) if tx_power_w is None else tx_power_w
    base = p_tx / pw.pa_efficiency + pw.haps_static + config.L * pw.user_static
    if scheme_id == "I":
        extra = 0.0
    elif scheme_id == "II":
        extra = pw.uav_circuit + relay_power(config, p_tx) / pw.pa_efficiency
    elif scheme_id == "III":
        extra = ris_mod.ris_power_consumption(surface_config(config, "passive"), incident_ris_power)
    elif scheme_id == "IV":
        extra = ris_mod.ris_power_consumption(surface_config(config, "active", rho), incident_ris_power)
    else:
        raise ValueError(f"invalid scheme id {scheme_id!r}")
    return base + extra


def relay_power(config: ScenarioConfig, p_tx: float) -> float:
    override = config.power.relay_tx_power_dbm
    return p_tx if override is None else float(dbm_to_watts(override))


def _select(values, antenna):
    """Pick ``values[..., antenna, :]`` with a per-trial antenna index."""
    return np.take_along_axis(values, antenna[..., None, None], axis=-2)[..., 0, :]


def _tas(snr_ideal, coeffs, slot):
    """Antenna maximizing the impairment-free NOMA sum rate."""
    sindr = access.noma_sindrs_batch(snr_ideal, coeffs)
    sums = np.sum(access.rates(sindr, slot), axis=-1)  # (..., M)
    return np.argmax(sums, axis=-1)


def evaluate_scheme(scheme_id: str, realization: ChannelRealization, config: ScenarioConfig,
                    condition: str, tx_power_dbm: float | None = None, rho: float | None = None) -> SchemeResult:
    """Evaluate one scheme under one hardware condition.

    ``tx_power_dbm`` defaults to ``radio.tx_power_dbm``; ``rho`` overrides the
    active surface amplitude (Scheme IV only). Antenna selection and SIC order
    use the impairment-free channel, so ideal and impaired results of a trial
    share them.
    """
    if scheme_id not in SCHEMES:
        raise ValueError(f"invalid scheme id {scheme_id!r}")
    if tx_power_dbm is None:
        tx_power_dbm = config.radio.tx_power_dbm
    p = float(dbm_to_watts(tx_power_dbm))
    n0 = config.radio.noise_power
    coeffs = config.noma.coefficients
    kap = impairments.link_kappas(config.impairments, condition)
    slot = SLOT_FRACTION[scheme_id]
    real = realization
    batch = real.batch_shape
    incident = np.zeros(batch)

    if scheme_id == "I":
        snr = p * np.abs(real.direct[..., 0, :]) ** 2 / n0
        sindr = access.noma_sindrs_batch(snr, coeffs, kap["direct"])
        antenna = np.zeros(batch, dtype=int)

    elif scheme_id == "II":
        p_r = relay_power(config, p)
        snr_d = p * np.abs(real.direct) ** 2 / n0  # (..., M, L)
        snr_1 = p * np.abs(real.haps_uav_relay) ** 2 / n0  # (..., M)
        snr_2 = p_r * np.abs(real.uav_user_relay) ** 2 / n0  # (..., L)
        ideal = snr_d + impairments.af_cascade_sndr(snr_1[..., :, None], snr_2[..., None, :])
        antenna = _tas(ideal, coeffs, slot)
        eff = (impairments.effective_sndr(snr_d, kap["direct"])
               + impairments.af_cascade_sndr(
                   impairments.effective_sndr(snr_1, kap["hop1"])[..., :, None],
                   impairments.effective_sndr(snr_2, kap["hop2"])[..., None, :]))
        ideal_sel, eff_sel = _select(ideal, antenna), _select(eff, antenna)
        # distortion already folded into the combined SNDR
        sindr = access.noma_sindrs_batch(eff_sel, coeffs, 0.0, order_by=ideal_sel)

    else:
        mode = "passive" if scheme_id == "III" else "active"
        surf = surface_config(config, mode, rho if scheme_id == "IV" else None)
        paths = real.ris_paths
        h_eff = real.direct + surf.rho * paths.cascaded  # (..., M, L)
        noise = n0 + surf.rho**2 * surf.element_noise_power * paths.forward_gain if mode == "active" \
            else np.full(paths.forward_gain.shape, n0)
        snr_all = p * np.abs(h_eff) ** 2 / noise[..., None, :]
        antenna = _tas(snr_all, coeffs, slot)
        snr = _select(snr_all, antenna)
        # an empty surface contributes no distortion of its own
        kappa = kap["ris"] if real.haps_ris.shape[-1] > 0 else kap["direct"]
        sindr = access.noma_sindrs_batch(snr, coeffs, kappa)
        incident = p * np.take_along_axis(paths.incident_gain, antenna[..., None], axis=-1)[..., 0]

    per_rate = access.rates(sindr, slot)
    power = total_power(scheme_id, config, incident, p, rho if scheme_id == "IV" else None)
    return SchemeResult(
        scheme=scheme_id,
        condition=condition,
        per_user_sindr=sindr,
        per_user_rate=per_rate,
        sum_rate=np.sum(per_rate, axis=-1),
        total_power=np.broadcast_to(power, batch).copy() if np.ndim(power) == 0 else power,
        antenna=antenna,
    )
