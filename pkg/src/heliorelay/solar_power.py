"""Solar harvesting vs altitude, hover power draw, and the feasibility floor.

Harvested power follows the clear-sky transmittance profile, further cut by
whatever cloud/dirt lies above the platform.  The minimum sustainable
altitude is where harvested power first exceeds the hover draw.
"""

import math
from dataclasses import dataclass
from typing import Optional

from .channel_models import Atmosphere, _require


class InfeasibleAltitudeError(RuntimeError):
    """Raised when no altitude (or the requested one) yields positive net power."""


@dataclass(frozen=True)
class SolarPlatform:
    """Photovoltaic and airframe parameters of the hovering UAV."""

    photo_eff: float = 0.4          # panel photoconversion efficiency
    panel_area: float = 2.0         # m^2
    solar_const: float = 1361.0     # W/m^2
    transmittance_max: float = 0.8978    # A_0
    transmittance_ext: float = 0.2804    # B_0 (dimensionless despite the usual m^-1 label)
    scale_height: float = 8000.0    # m
    uav_mass: float = 5.0           # kg
    gravity: float = 9.8            # m/s^2
    rotor_radius: float = 0.5       # m
    air_density: float = 1.225      # kg/m^3
    hover_power_override: Optional[float] = 100.0  # W; None computes from the airframe

    def __post_init__(self):
        for name in ("photo_eff", "panel_area", "solar_const",
                     "transmittance_max", "transmittance_ext", "scale_height",
                     "uav_mass", "gravity", "rotor_radius", "air_density"):
            _require(getattr(self, name) > 0, f"{name} must be > 0")
        if self.hover_power_override is not None:
            _require(self.hover_power_override > 0,
                     "hover_power_override must be > 0")
        _require(self.transmittance_max > self.transmittance_ext,
                 "transmittance_max must exceed transmittance_ext "
                 "(ground-level transmittance would not be positive)")


@dataclass(frozen=True)
class PowerBudget:
    harvested: float
    consumed: float

    @property
    def net(self):
        return self.harvested - self.consumed


def transmittance(z: float, platform: SolarPlatform) -> float:
    """Clear-sky atmospheric transmittance above the clouds at altitude z."""
    if z < 0:
        raise ValueError("altitude must be >= 0")
    return (platform.transmittance_max
            - platform.transmittance_ext * math.exp(-z / platform.scale_height))


def harvested_power(z: float, platform: SolarPlatform, atm: Atmosphere) -> float:
    """Solar power [W] collected at altitude z under the layered atmosphere.

    Above the cloud only the transmittance profile applies; inside the cloud
    the remaining cloud column attenuates; below the cloud base both the
    full cloud and the remaining dirt column attenuate.
    """
    if z <= 0:
        raise ValueError("altitude must be > 0")
    base = platform.photo_eff * platform.panel_area * platform.solar_const
    p = base * transmittance(z, platform)
    top = atm.cloud_top
    if z >= top:
        return p
    if z >= atm.cloud_base:
        return p * math.exp(-atm.solar_ext_cloud * (top - z))
    return (p * math.exp(-atm.solar_ext_cloud * atm.cloud_thickness)
            * math.exp(-atm.solar_ext_air * (atm.cloud_base - z)))


def hover_power(platform: SolarPlatform) -> float:
    """Rotor power needed to hover [W]; the override takes precedence."""
    if platform.hover_power_override is not None:
        return platform.hover_power_override
    m, g = platform.uav_mass, platform.gravity
    r, rho = platform.rotor_radius, platform.air_density
    return math.sqrt((m * g) ** 3 / (2.0 * math.pi * r * r * rho))


def power_budget(z: float, platform: SolarPlatform, atm: Atmosphere) -> PowerBudget:
    return PowerBudget(harvested=harvested_power(z, platform, atm),
                       consumed=hover_power(platform))


def min_altitude(platform: SolarPlatform, atm: Atmosphere,
                 tol: float = 1e-3) -> float:
    """Lowest altitude with non-negative net power, to within tol meters.

    Harvested power is strictly increasing in z, so the root is unique.
    Raises InfeasibleAltitudeError when hovering can never be sustained.
    """
    p0 = hover_power(platform)
    if p0 <= 0:
        return 0.0
    lo = 0.0
    # harvested_power requires z > 0; probe the floor just above ground
    eps = 1e-9
    if harvested_power(eps, platform, atm) >= p0:
        return 0.0
    hi = 10.0 * platform.scale_height
    if harvested_power(hi, platform, atm) < p0:
        hi *= 2.0  # one bracket expansion before giving up
        if harvested_power(hi, platform, atm) < p0:
            ceiling = (platform.photo_eff * platform.panel_area
                       * platform.solar_const * platform.transmittance_max)
            raise InfeasibleAltitudeError(
                f"hover power {p0:.1f} W exceeds the harvesting ceiling "
                f"{ceiling:.1f} W at all altitudes")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if harvested_power(max(mid, eps), platform, atm) >= p0:
            hi = mid
        else:
            lo = mid
    return hi
