"""Scenario assembly, file ingestion, serialization and digests.

Scenario files are flat INI sections mirroring the component types; any
field left out falls back to the simulation defaults.  Unknown sections or
keys are rejected so config typos fail loudly.
"""

import configparser
import hashlib
import io
from dataclasses import dataclass, replace

from .channel_models import (SCINTILLATION_PRESETS, Atmosphere,
                             PointingErrorModel, ScintillationModel)
from .mc_oracle import McSettings
from .opt3d import OptimizerSettings
from .relay_capacity import OpticalLink, RelayConfig
from .rf_uplink import SensorField
from .solar_power import SolarPlatform


class ScenarioError(ValueError):
    """Configuration file problem; message names the offending field."""


# Standardized sensor layout used by the 3-D studies
DEFAULT_SENSOR_X = (700, 800, 900, 1000, 1200, 1400, 1500, 1600, 1800, 2000)
DEFAULT_SENSOR_Y = (800, 900, 1000, 1200, 1300, 1500, 1600, 1700, 1900, 2000)
DEFAULT_SENSOR_POWER = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0)


@dataclass(frozen=True)
class Scenario:
    sensor_field: SensorField
    atmosphere: Atmosphere
    optical_link: OpticalLink
    solar_platform: SolarPlatform
    relay: RelayConfig
    optimizer: OptimizerSettings
    mc: McSettings

    def __post_init__(self):
        d = self.optimizer.box_size
        xs, ys, _ = self.sensor_field.arrays()
        if xs.min() < 0 or ys.min() < 0 or xs.max() > d or ys.max() > d:
            raise ScenarioError(
                "optimizer.box_size must cover the sensor bounding box "
                f"(sensors span x:[{xs.min():g},{xs.max():g}] "
                f"y:[{ys.min():g},{ys.max():g}], box_size={d:g})")


def default_scenario() -> Scenario:
    """The standard simulation setup (all defaults from the parameter table)."""
    return Scenario(
        sensor_field=SensorField(x=DEFAULT_SENSOR_X, y=DEFAULT_SENSOR_Y,
                                 power=DEFAULT_SENSOR_POWER,
                                 reference_gain=0.4, rf_noise=1e-6),
        atmosphere=Atmosphere(),
        optical_link=OpticalLink(),
        solar_platform=SolarPlatform(),
        relay=RelayConfig(),
        optimizer=OptimizerSettings(),
        mc=McSettings(),
    )


def _floats(text):
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _hover(text):
    t = text.strip().lower()
    if t in ("auto", "none", ""):
        return None
    return float(t)


def _int(text):
    return int(text, 0)


# section -> key -> (constructor-keyword, parser); grid axes are folded below
_SCHEMA = {
    "sensor_field": {
        "x": ("x", _floats),
        "y": ("y", _floats),
        "power": ("power", _floats),
        "reference_gain": ("reference_gain", float),
        "rf_noise": ("rf_noise", float),
    },
    "atmosphere": {
        "cloud_thickness": ("cloud_thickness", float),
        "cloud_base": ("cloud_base", float),
        "laser_ext_air": ("laser_ext_air", float),
        "laser_ext_cloud": ("laser_ext_cloud", float),
        "solar_ext_cloud": ("solar_ext_cloud", float),
        "solar_ext_air": ("solar_ext_air", float),
    },
    "optical_link": {
        "ogs_photo_eff": ("ogs_photo_eff", float),
        "ogs_noise": ("ogs_noise", float),
        "aperture_radius": ("aperture_radius", float),
        "beamwidth": ("beamwidth", float),
        "jitter": ("jitter", float),
        "fading_mode": ("fading_mode", str.strip),
        "scint_preset": ("scint_preset", str.strip),
        "scint_shape_a": ("scint_shape_a", float),
        "scint_shape_b": ("scint_shape_b", float),
        "scint_scale": ("scint_scale", float),
    },
    "solar_platform": {
        "photo_eff": ("photo_eff", float),
        "panel_area": ("panel_area", float),
        "solar_const": ("solar_const", float),
        "transmittance_max": ("transmittance_max", float),
        "transmittance_ext": ("transmittance_ext", float),
        "scale_height": ("scale_height", float),
        "uav_mass": ("uav_mass", float),
        "gravity": ("gravity", float),
        "rotor_radius": ("rotor_radius", float),
        "air_density": ("air_density", float),
        "hover_power": ("hover_power_override", _hover),
    },
    "relay": {
        "scheme": ("scheme", str.strip),
        "df_alpha": ("df_alpha", float),
        "capacity_unit": ("capacity_unit", str.strip),
    },
    "optimizer": {
        "box_size": ("box_size", float),
        "z_max": ("z_max", float),
        "starts": ("starts", _int),
        "grid_x": ("grid_x", _int),
        "grid_y": ("grid_y", _int),
        "grid_z": ("grid_z", _int),
        "local_tol": ("local_tol", float),
        "max_evals": ("max_evals", _int),
        "seed": ("seed", _int),
    },
    "mc": {
        "samples": ("samples", _int),
        "seed": ("seed", _int),
        "antithetic": ("antithetic", _bool),
    },
}


def _parse_sections(text):
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"cannot parse scenario file: {exc}") from exc
    values = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ScenarioError(f"unknown section [{section}]")
        values[section] = {}
        for key, raw in cp[section].items():
            if key not in _SCHEMA[section]:
                raise ScenarioError(f"unknown key {section}.{key}")
            kw, parser = _SCHEMA[section][key]
            try:
                values[section][kw] = parser(raw)
            except ValueError as exc:
                raise ScenarioError(f"bad value for {section}.{key}: {exc}") from exc
    return values


def _build_optical_link(kw):
    preset = kw.pop("scint_preset", None)
    explicit = {k: kw.pop(k) for k in ("scint_shape_a", "scint_shape_b",
                                       "scint_scale") if k in kw}
    if preset is not None and explicit:
        raise ScenarioError(
            "optical_link.scint_preset conflicts with explicit scint_* values")
    scintillation = None
    if preset is not None:
        if preset not in SCINTILLATION_PRESETS:
            names = ", ".join(sorted(SCINTILLATION_PRESETS))
            raise ScenarioError(
                f"optical_link.scint_preset must be one of: {names}")
        scintillation = SCINTILLATION_PRESETS[preset]
    elif explicit:
        if len(explicit) != 3:
            raise ScenarioError(
                "optical_link needs all of scint_shape_a, scint_shape_b, "
                "scint_scale (or a scint_preset)")
        scintillation = ScintillationModel(shape_a=explicit["scint_shape_a"],
                                           shape_b=explicit["scint_shape_b"],
                                           scale=explicit["scint_scale"])
    pointing = PointingErrorModel(
        aperture_radius=kw.pop("aperture_radius", 0.5),
        beamwidth=kw.pop("beamwidth", 1e-2),
        jitter=kw.pop("jitter", 1e-2))
    base = OpticalLink()
    if scintillation is None and kw.get("fading_mode") == "composite":
        scintillation = SCINTILLATION_PRESETS["moderate"]
    return OpticalLink(ogs_photo_eff=kw.get("ogs_photo_eff", base.ogs_photo_eff),
                       ogs_noise=kw.get("ogs_noise", base.ogs_noise),
                       pointing=pointing, scintillation=scintillation,
                       fading_mode=kw.get("fading_mode", base.fading_mode))


def _build_optimizer(kw):
    base = OptimizerSettings()
    grid = list(base.coarse_grid)
    for axis, idx in (("grid_x", 0), ("grid_y", 1), ("grid_z", 2)):
        if axis in kw:
            grid[idx] = kw.pop(axis)
    kw["coarse_grid"] = tuple(grid)
    return OptimizerSettings(**kw)


def scenario_from_text(text: str) -> Scenario:
    """Build a validated Scenario from INI text; absent fields use defaults."""
    values = _parse_sections(text)
    try:
        fld_kw = values.get("sensor_field", {})
        fld = SensorField(x=fld_kw.get("x", DEFAULT_SENSOR_X),
                          y=fld_kw.get("y", DEFAULT_SENSOR_Y),
                          power=fld_kw.get("power", DEFAULT_SENSOR_POWER),
                          **{k: v for k, v in fld_kw.items()
                             if k in ("reference_gain", "rf_noise")})
        return Scenario(
            sensor_field=fld,
            atmosphere=Atmosphere(**values.get("atmosphere", {})),
            optical_link=_build_optical_link(dict(values.get("optical_link", {}))),
            solar_platform=SolarPlatform(**values.get("solar_platform", {})),
            relay=RelayConfig(**values.get("relay", {})),
            optimizer=_build_optimizer(dict(values.get("optimizer", {}))),
            mc=McSettings(**values.get("mc", {})),
        )
    except ScenarioError:
        raise
    except (TypeError, ValueError) as exc:
        raise ScenarioError(str(exc)) from exc


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_text(fh.read())


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return " ".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_scenario(scn: Scenario) -> str:
    """Serialize to the INI schema with round-trip float formatting."""
    link, opt = scn.optical_link, scn.optimizer
    sections = {
        "sensor_field": {
            "x": scn.sensor_field.x, "y": scn.sensor_field.y,
            "power": scn.sensor_field.power,
            "reference_gain": scn.sensor_field.reference_gain,
            "rf_noise": scn.sensor_field.rf_noise,
        },
        "atmosphere": {k: getattr(scn.atmosphere, k)
                       for k in _SCHEMA["atmosphere"]},
        "optical_link": {
            "ogs_photo_eff": link.ogs_photo_eff,
            "ogs_noise": link.ogs_noise,
            "aperture_radius": link.pointing.aperture_radius,
            "beamwidth": link.pointing.beamwidth,
            "jitter": link.pointing.jitter,
            "fading_mode": link.fading_mode,
        },
        "solar_platform": {
            **{k: getattr(scn.solar_platform, k)
               for k in _SCHEMA["solar_platform"] if k != "hover_power"},
            "hover_power": ("auto" if scn.solar_platform.hover_power_override
                            is None else scn.solar_platform.hover_power_override),
        },
        "relay": {k: getattr(scn.relay, k) for k in _SCHEMA["relay"]},
        "optimizer": {
            "box_size": opt.box_size, "z_max": opt.z_max,
            "starts": opt.starts,
            "grid_x": opt.coarse_grid[0], "grid_y": opt.coarse_grid[1],
            "grid_z": opt.coarse_grid[2],
            "local_tol": opt.local_tol, "max_evals": opt.max_evals,
            "seed": opt.seed,
        },
        "mc": {"samples": scn.mc.samples, "seed": scn.mc.seed,
               "antithetic": scn.mc.antithetic},
    }
    if link.scintillation is not None:
        sections["optical_link"].update({
            "scint_shape_a": link.scintillation.shape_a,
            "scint_shape_b": link.scintillation.shape_b,
            "scint_scale": link.scintillation.scale,
        })
    out = io.StringIO()
    for name, body in sections.items():
        out.write(f"[{name}]\n")
        for key, value in body.items():
            out.write(f"{key} = {_fmt(value)}\n")
        out.write("\n")
    return out.getvalue()


def save_scenario(scn: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_scenario(scn))


def scenario_digest(scn: Scenario) -> str:
    """Content hash of the canonical serialization; file ordering irrelevant."""
    return hashlib.sha256(dump_scenario(scn).encode()).hexdigest()


def with_overrides(scn: Scenario, scheme=None, fading=None, unit=None,
                   seed=None) -> Scenario:
    """Apply CLI-level overrides, returning a new Scenario."""
    if scheme or unit:
        scn = replace(scn, relay=replace(scn.relay,
                                         **({"scheme": scheme} if scheme else {}),
                                         **({"capacity_unit": unit} if unit else {})))
    if fading:
        link = scn.optical_link
        scint = link.scintillation
        if fading == "composite" and scint is None:
            scint = SCINTILLATION_PRESETS["moderate"]
        scn = replace(scn, optical_link=replace(link, fading_mode=fading,
                                                scintillation=scint))
    if seed is not None:
        scn = replace(scn, mc=replace(scn.mc, seed=seed),
                      optimizer=replace(scn.optimizer, seed=seed))
    return scn
