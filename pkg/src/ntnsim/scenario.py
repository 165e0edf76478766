"""Scenario configuration, geometry helpers and user placement.

The configuration document is YAML with one mapping per section
(``geometry``, ``radio``, ``ris``, ``noma``, ``impairments``, ``power``,
``sweep``, ``run``). Every key is optional; missing keys take the defaults
declared on the dataclasses below. Unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np
import yaml


class ConfigError(ValueError):
    """Raised for malformed or constraint-violating configuration documents."""


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite coordinate in {self}")
        if self.z < 0:
            raise ValueError(f"altitude must be >= 0, got {self.z}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class LinkGeometry:
    slant_distance: float
    elevation_angle: float
    link_class: str  # haps_ground | haps_uav | uav_ground


LINK_CLASSES = ("haps_ground", "haps_uav", "uav_ground")

# Urban LoS probability vs elevation, 10 degree steps (3GPP TR 38.811 dense-urban/urban style column).
DEFAULT_LOS_TABLE = (
    (10.0, 0.246),
    (20.0, 0.386),
    (30.0, 0.493),
    (40.0, 0.613),
    (50.0, 0.726),
    (60.0, 0.805),
    (70.0, 0.919),
    (80.0, 0.968),
    (90.0, 0.992),
)


@dataclass(frozen=True)
class GeometryConfig:
    haps_position: Position3D = Position3D(10000.0, 0.0, 20000.0)
    uav_position: Position3D = Position3D(0.0, 0.0, 200.0)
    user_area_radius: float = 500.0
    num_users: int = 3


@dataclass(frozen=True)
class RicianK:
    """Rician K-factors in dB; ``-inf`` means Rayleigh."""

    haps_ground_los: float = 10.0
    haps_ground_nlos: float = -math.inf
    haps_uav: float = 15.0
    uav_ground: float = 10.0


@dataclass(frozen=True)
class ShadowingSigma:
    los: float = 4.0
    nlos: float = 6.0


@dataclass(frozen=True)
class RadioConfig:
    num_haps_antennas: int = 4
    carrier_frequency: float = 2.0e9
    bandwidth: float = 10.0e6
    noise_figure: float = 7.0
    noise_density: float = -174.0  # dBm/Hz
    environment: str = "urban"
    tx_power_dbm: float = 30.0
    rician_k: RicianK = RicianK()
    shadowing_sigma: ShadowingSigma = ShadowingSigma()
    clutter_loss: float = 20.0
    aerial_clutter_loss: float = 0.0
    los_table: tuple[tuple[float, float], ...] = DEFAULT_LOS_TABLE

    @property
    def noise_power(self) -> float:
        """Receiver noise power in W (thermal floor plus noise figure)."""
        dbm = self.noise_density + 10.0 * math.log10(self.bandwidth) + self.noise_figure
        return 10.0 ** ((dbm - 30.0) / 10.0)

    @property
    def thermal_noise_power(self) -> float:
        """Thermal noise floor over the bandwidth in W, without noise figure."""
        dbm = self.noise_density + 10.0 * math.log10(self.bandwidth)
        return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class RisSection:
    num_ris_elements: int = 50
    ris_mode: str = "active"
    rho: float = 4.0
    element_gain: float = 24.0  # dB, per hop
    element_static_power: float | None = None  # W; None -> 10 mW passive / 25 mW active
    element_noise_power: float | None = None  # W; None -> thermal floor
    amp_efficiency: float = 0.5


@dataclass(frozen=True)
class NomaConfig:
    coefficients: tuple[float, ...] = (0.6, 0.3, 0.1)
    rate_targets: tuple[float, ...] = (0.2, 0.2, 0.2)


@dataclass(frozen=True)
class ImpairmentProfile:
    enabled: bool = True
    kappa_tx: float = 0.1
    kappa_rx: float = 0.1
    kappa_ris: float = 0.05

    @property
    def is_ideal(self) -> bool:
        return not self.enabled or (self.kappa_tx == 0 and self.kappa_rx == 0 and self.kappa_ris == 0)


@dataclass(frozen=True)
class PowerModel:
    pa_efficiency: float = 0.4
    haps_static: float = 5.0
    user_static: float = 0.1
    uav_circuit: float = 5.0
    relay_tx_power_dbm: float | None = None  # None -> same as HAPS transmit power


@dataclass(frozen=True)
class SweepConfig:
    power_dbm: tuple[float, ...] = tuple(float(p) for p in range(0, 55, 5))
    rho: tuple[float, ...] = (1.0, 2.0, 4.0, 6.0, 8.0, 10.0)
    schemes: tuple[str, ...] = ("I", "II", "III", "IV")
    conditions: tuple[str, ...] = ("ideal", "impaired")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 20240601
    trials: int = 10000
    workers: int = 1


@dataclass(frozen=True)
class ScenarioConfig:
    geometry: GeometryConfig = GeometryConfig()
    radio: RadioConfig = RadioConfig()
    ris: RisSection = RisSection()
    noma: NomaConfig = NomaConfig()
    impairments: ImpairmentProfile = ImpairmentProfile()
    power: PowerModel = PowerModel()
    sweep: SweepConfig = SweepConfig()
    run: RunConfig = RunConfig()

    @property
    def M(self) -> int:
        return self.radio.num_haps_antennas

    @property
    def N(self) -> int:
        return self.ris.num_ris_elements

    @property
    def L(self) -> int:
        return self.geometry.num_users

    def replace(self, **sections: Any) -> "ScenarioConfig":
        """Return a copy with individual section fields overridden.

        ``cfg.replace(radio={"tx_power_dbm": 40})`` updates one field.
        """
        updates = {}
        for name, changes in sections.items():
            updates[name] = dataclasses.replace(getattr(self, name), **changes)
        return dataclasses.replace(self, **updates)


SCHEMES = ("I", "II", "III", "IV")
CONDITIONS = ("ideal", "impaired")


# ---------------------------------------------------------------------------
# loading / dumping


def _coerce(value: Any, tp: Any, where: str) -> Any:
    if dataclasses.is_dataclass(tp):
        if tp is Position3D:
            if isinstance(value, Mapping):
                value = [value.get(k) for k in ("x", "y", "z")]
            if not isinstance(value, (list, tuple)) or len(value) != 3:
                raise ConfigError(f"{where}: expected [x, y, z]")
            try:
                return Position3D(*(float(v) for v in value))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{where}: {exc}") from None
        if not isinstance(value, Mapping):
            raise ConfigError(f"{where}: expected a mapping")
        return _build(tp, value, where)
    return value


def _build(cls: type, doc: Mapping[str, Any], where: str) -> Any:
    known = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(doc) - set(known))
    if unknown:
        prefix = f"{where}." if where else ""
        raise ConfigError(f"unknown key {prefix}{unknown[0]}")
    defaults = cls()
    kwargs = {}
    for name, value in doc.items():
        default = getattr(defaults, name)
        key = f"{where}.{name}" if where else name
        if dataclasses.is_dataclass(default):
            kwargs[name] = _coerce(value, type(default), key)
        elif isinstance(default, tuple):
            if not isinstance(value, (list, tuple)):
                raise ConfigError(f"{key}: expected a list")
            if name == "los_table":
                value = tuple((float(e), float(p)) for e, p in value)
            elif name in ("schemes", "conditions"):
                value = tuple(str(v) for v in value)
            else:
                value = tuple(float(v) for v in value)
            kwargs[name] = value
        elif isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"{key}: expected true/false")
            kwargs[name] = value
        elif isinstance(default, int):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{key}: expected an integer")
            kwargs[name] = value
        elif isinstance(default, float) or default is None:
            if value is None:
                kwargs[name] = None
            else:
                try:
                    kwargs[name] = float(value)
                except (TypeError, ValueError):
                    raise ConfigError(f"{key}: expected a number") from None
        else:
            kwargs[name] = str(value)
    return cls(**kwargs)


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check cross-field constraints; raise ConfigError naming the key."""
    g, r, ris, noma = cfg.geometry, cfg.radio, cfg.ris, cfg.noma
    if r.num_haps_antennas < 1:
        raise ConfigError("radio.num_haps_antennas must be >= 1")
    if ris.num_ris_elements < 1:
        raise ConfigError("ris.num_ris_elements must be >= 1")
    if g.num_users < 1:
        raise ConfigError("geometry.num_users must be >= 1")
    if g.user_area_radius < 0:
        raise ConfigError("geometry.user_area_radius must be >= 0")
    if not g.haps_position.z > g.uav_position.z > 0:
        raise ConfigError("geometry: haps altitude > uav altitude > 0 required")
    if r.carrier_frequency <= 0 or r.bandwidth <= 0:
        raise ConfigError("radio.carrier_frequency and radio.bandwidth must be > 0")
    if r.environment != "urban":
        raise ConfigError("radio.environment must be 'urban'")
    if r.clutter_loss < 0 or r.aerial_clutter_loss < 0:
        raise ConfigError("radio.clutter_loss must be >= 0")
    if r.shadowing_sigma.los < 0 or r.shadowing_sigma.nlos < 0:
        raise ConfigError("radio.shadowing_sigma must be >= 0")
    if not r.los_table:
        raise ConfigError("radio.los_table must not be empty")
    elevations = [e for e, _ in r.los_table]
    if any(b <= a for a, b in zip(elevations, elevations[1:])):
        raise ConfigError("radio.los_table elevations must be strictly increasing")
    if any(not 0.0 <= p <= 1.0 for _, p in r.los_table):
        raise ConfigError("radio.los_table probabilities must lie in [0, 1]")

    coeffs = noma.coefficients
    if len(coeffs) != g.num_users:
        raise ConfigError("noma.coefficients must have one entry per user")
    if any(a <= 0 for a in coeffs):
        raise ConfigError("noma.coefficients must be strictly positive")
    if abs(sum(coeffs) - 1.0) > 1e-9:
        raise ConfigError("noma.coefficients must sum to 1")
    if len(noma.rate_targets) != g.num_users:
        raise ConfigError("noma.rate_targets must have one entry per user")
    if any(t < 0 for t in noma.rate_targets):
        raise ConfigError("noma.rate_targets must be >= 0")

    if ris.ris_mode not in ("passive", "active"):
        raise ConfigError("ris.ris_mode must be 'passive' or 'active'")
    if ris.ris_mode == "passive" and not 0 < ris.rho <= 1:
        raise ConfigError("ris.rho: passive amplitude must be <= 1 (and > 0)")
    if ris.ris_mode == "active" and ris.rho < 1:
        raise ConfigError("ris.rho: active amplitude must be >= 1")
    if not 0 < ris.amp_efficiency <= 1:
        raise ConfigError("ris.amp_efficiency must lie in (0, 1]")

    imp = cfg.impairments
    if min(imp.kappa_tx, imp.kappa_rx, imp.kappa_ris) < 0:
        raise ConfigError("impairments.kappa_* must be >= 0")
    pw = cfg.power
    if not 0 < pw.pa_efficiency <= 1:
        raise ConfigError("power.pa_efficiency must lie in (0, 1]")
    if min(pw.haps_static, pw.user_static, pw.uav_circuit) < 0:
        raise ConfigError("power static terms must be >= 0")

    sw = cfg.sweep
    for key, values in (("power_dbm", sw.power_dbm), ("rho", sw.rho)):
        if not values:
            raise ConfigError(f"sweep.{key} must not be empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError(f"sweep.{key} must be strictly increasing")
    if any(v < 1 for v in sw.rho):
        raise ConfigError("sweep.rho: active amplitude must be >= 1")
    if not sw.schemes or any(s not in SCHEMES for s in sw.schemes):
        raise ConfigError(f"sweep.schemes must be a non-empty subset of {SCHEMES}")
    if not sw.conditions or any(c not in CONDITIONS for c in sw.conditions):
        raise ConfigError(f"sweep.conditions must be a non-empty subset of {CONDITIONS}")
    if cfg.run.trials < 1:
        raise ConfigError("run.trials must be >= 1")
    if cfg.run.workers < 1:
        raise ConfigError("run.workers must be >= 1")
    if not 0 <= cfg.run.seed < 2**64:
        raise ConfigError("run.seed must be an unsigned 64-bit integer")
    return cfg


def load_config(text: str) -> ScenarioConfig:
    """Parse and validate a YAML configuration document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"parse failure: {exc}") from None
    if doc is None:
        doc = {}
    if not isinstance(doc, Mapping):
        raise ConfigError("parse failure: top level must be a mapping")
    cfg = _build(ScenarioConfig, doc, "")
    return validate_config(cfg)


def _plain(value: Any) -> Any:
    if isinstance(value, Position3D):
        return [value.x, value.y, value.z]
    if dataclasses.is_dataclass(value):
        return {f.name: _plain(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


def dump_config(cfg: ScenarioConfig) -> str:
    """Serialize to a YAML document that :func:`load_config` reads back identically."""
    return yaml.safe_dump(_plain(cfg), sort_keys=False)


# ---------------------------------------------------------------------------
# geometry


def slant_distance(a: Position3D, b: Position3D) -> float:
    return math.dist((a.x, a.y, a.z), (b.x, b.y, b.z))


def elevation_angle(ground_point: Position3D, aerial_point: Position3D) -> float:
    """Elevation of ``aerial_point`` seen from ``ground_point``, in degrees."""
    dz = aerial_point.z - ground_point.z
    horizontal = math.hypot(aerial_point.x - ground_point.x, aerial_point.y - ground_point.y)
    if dz == 0 and horizontal == 0:
        raise ValueError("co-located points have no elevation angle")
    if dz < 0:
        raise ValueError("aerial point must lie above the ground point")
    return math.degrees(math.atan2(dz, horizontal))


def link_geometry(a: Position3D, b: Position3D, link_class: str) -> LinkGeometry:
    """Geometry of the link between the lower endpoint ``a`` and the upper ``b``."""
    return LinkGeometry(slant_distance(a, b), elevation_angle(a, b), link_class)


def place_users(config: ScenarioConfig, rng: np.random.Generator) -> list[Position3D]:
    """Drop ``L`` users uniformly in the disc under the UAV's ground projection."""
    xy = _disc_offsets(config.geometry.num_users, config.geometry.user_area_radius, rng)
    cx, cy = config.geometry.uav_position.x, config.geometry.uav_position.y
    return [Position3D(cx + dx, cy + dy, 0.0) for dx, dy in xy]


def _disc_offsets(n: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    u = rng.random((2, n))
    r = radius * np.sqrt(u[0])
    phi = 2.0 * np.pi * u[1]
    return np.stack([r * np.cos(phi), r * np.sin(phi)], axis=-1)
