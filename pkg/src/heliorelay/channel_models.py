"""Optical channel models for the UAV-to-ground-station laser link.

The received optical gain factors into four pieces: a random pointing-error
loss, a random scintillation loss from turbulence, and two deterministic
Beer-Lambert attenuations (cloud and clear air).  This module provides the
individual distributions, the deterministic path geometry, and the numeric
density of the composite product gain.
"""

import math
from dataclasses import dataclass

from .quadrature import integrate


def _require(cond, msg):
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class UavPosition:
    """UAV location in meters; the optical ground station sits at the origin."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        _require(math.isfinite(self.x) and math.isfinite(self.y)
                 and math.isfinite(self.z), "coordinates must be finite")
        _require(self.z > 0, "z must be positive (UAV above ground)")

    @property
    def slant_range(self):
        """Line-of-sight distance to the ground station [m]."""
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


@dataclass(frozen=True)
class Atmosphere:
    """Layered atmosphere: dirt up to cloud_base, cloud above it.

    Extinction coefficients are per meter; laser_* attenuate the optical
    signal, solar_* attenuate sunlight reaching the UAV panels.
    """

    cloud_thickness: float = 500.0   # Z_c
    cloud_base: float = 500.0        # Z_d
    laser_ext_air: float = 0.001     # psi_a
    laser_ext_cloud: float = 0.003   # psi_c
    solar_ext_cloud: float = 0.003   # beta_c
    solar_ext_air: float = 0.5       # beta_a

    def __post_init__(self):
        _require(self.cloud_thickness >= 0, "cloud_thickness must be >= 0")
        _require(self.cloud_base >= 0, "cloud_base must be >= 0")
        for name in ("laser_ext_air", "laser_ext_cloud",
                     "solar_ext_cloud", "solar_ext_air"):
            _require(getattr(self, name) >= 0, f"{name} must be >= 0")

    @property
    def cloud_top(self):
        return self.cloud_base + self.cloud_thickness


@dataclass(frozen=True)
class PathSegments:
    """Slant-path split into in-cloud and in-air lengths [m]."""

    in_cloud: float
    in_air: float

    @property
    def total(self):
        return self.in_cloud + self.in_air


def cloud_path_length(pos: UavPosition, atm: Atmosphere) -> PathSegments:
    """Split the UAV-OGS slant path by the cloud layer (similar triangles).

    Boundary altitudes belong to the upper branch so the split is
    continuous in z.
    """
    slant = pos.slant_range
    z = pos.z
    if z >= atm.cloud_top:
        d_c = atm.cloud_thickness * slant / z
    elif z >= atm.cloud_base:
        d_c = (z - atm.cloud_base) * slant / z
    else:
        d_c = 0.0
    return PathSegments(in_cloud=d_c, in_air=slant - d_c)


def attenuation_gains(seg: PathSegments, atm: Atmosphere):
    """Beer-Lambert gains (h_cloud, h_air), each in (0, 1]."""
    h_c = math.exp(-atm.laser_ext_cloud * seg.in_cloud)
    h_a = math.exp(-atm.laser_ext_air * seg.in_air)
    return h_c, h_a


def deterministic_gain(pos: UavPosition, atm: Atmosphere) -> float:
    """Combined cloud+air attenuation h_c * h_a for the laser path."""
    h_c, h_a = attenuation_gains(cloud_path_length(pos, atm), atm)
    return h_c * h_a


@dataclass(frozen=True)
class PointingErrorModel:
    """Power-law fading from Rayleigh-distributed beam misalignment.

    aperture_radius [m] is the receiver telescope radius, beamwidth and
    jitter [rad] are the angular beam divergence and the angular pointing
    standard deviation.  The gain density at a given UAV position is
        f(h) = coeff * h^(exponent)   on [0, peak_gain),
    with exponent = (beamwidth^2 - jitter^2) / jitter^2.
    """

    aperture_radius: float = 0.5
    beamwidth: float = 1e-2
    jitter: float = 1e-2

    def __post_init__(self):
        _require(self.aperture_radius > 0, "aperture_radius must be > 0")
        _require(self.beamwidth > 0, "beamwidth must be > 0")
        _require(self.jitter > 0, "jitter must be > 0")

    @property
    def shape_ratio(self):
        """beamwidth^2 / jitter^2; the pdf is shape_ratio * h^(shape_ratio-1) / B^shape_ratio."""
        return (self.beamwidth / self.jitter) ** 2

    def peak_gain(self, pos: UavPosition) -> float:
        """Maximum pointing gain B at this position (misalignment = 0)."""
        r2 = pos.x * pos.x + pos.y * pos.y + pos.z * pos.z
        return self.aperture_radius ** 2 / (2.0 * self.beamwidth ** 2 * r2)

    def coeff(self, pos: UavPosition) -> float:
        """Normalizing constant of the gain density at this position."""
        return self.shape_ratio * self.peak_gain(pos) ** (-self.shape_ratio)

    def pdf(self, h, pos: UavPosition) -> float:
        """Density of the pointing gain; zero outside [0, peak_gain)."""
        b = self.peak_gain(pos)
        if h < 0 or h >= b:
            return 0.0
        p = self.shape_ratio
        return p * b ** (-p) * h ** (p - 1.0)


def pointing_pdf(h, model: PointingErrorModel, pos: UavPosition) -> float:
    return model.pdf(h, pos)


@dataclass(frozen=True)
class ScintillationModel:
    """Exponentiated Weibull turbulence fading.

    shape_a relates to aperture averaging, shape_b to the scintillation
    index, scale is the Weibull scale parameter.
    """

    shape_a: float
    shape_b: float
    scale: float

    def __post_init__(self):
        _require(self.shape_a > 0, "shape_a must be > 0")
        _require(self.shape_b > 0, "shape_b must be > 0")
        _require(self.scale > 0, "scale must be > 0")

    def pdf(self, h) -> float:
        if h < 0:
            return 0.0
        a, b, eta = self.shape_a, self.shape_b, self.scale
        if h == 0:
            # limit of the density as h -> 0+
            if b > 1 or (b == 1 and a > 1):
                return 0.0
            if b == 1 and a == 1:
                return 1.0 / eta
            return math.inf
        log_t = b * math.log(h / eta)
        if log_t > 6.6:  # t > ~740: exp(-t) underflows, density is exactly 0
            return 0.0
        t = math.exp(log_t)
        if t == 0.0:
            return 0.0
        w = -math.expm1(-t)  # 1 - exp(-t), accurate for small t
        return (a * b / eta) * (h / eta) ** (b - 1.0) * math.exp(-t) * w ** (a - 1.0)

    def cdf(self, h) -> float:
        if h <= 0:
            return 0.0
        log_t = self.shape_b * math.log(h / self.scale)
        if log_t > 6.6:
            return 1.0
        t = math.exp(log_t)
        return (-math.expm1(-t)) ** self.shape_a

    def ppf(self, u) -> float:
        """Inverse CDF; u must lie strictly inside (0, 1)."""
        if not 0.0 < u < 1.0:
            raise ValueError(f"quantile level must be in (0, 1), got {u}")
        inner = -math.log1p(-u ** (1.0 / self.shape_a))
        return self.scale * inner ** (1.0 / self.shape_b)

    def upper_support(self, tail=1e-9) -> float:
        """Quantile used to truncate integrals over the (infinite) support."""
        return self.ppf(1.0 - tail)


def scintillation_pdf(h, model: ScintillationModel) -> float:
    return model.pdf(h)


def scintillation_inverse_cdf(u, model: ScintillationModel) -> float:
    return model.ppf(u)


# Named turbulence presets (configuration, not measurements): tail thins as
# severity drops.
SCINTILLATION_PRESETS = {
    "weak": ScintillationModel(4.0, 2.5, 0.8),
    "moderate": ScintillationModel(2.5, 1.5, 0.9),
    "strong": ScintillationModel(1.5, 1.0, 1.0),
}


def pointing_only_pdf(h, pos: UavPosition, atm: Atmosphere,
                      pe: PointingErrorModel) -> float:
    """Density of pointing_gain * h_cloud * h_air (no turbulence).

    Closed form: scaled power law on [0, peak_gain * h_cloud * h_air).
    """
    att = deterministic_gain(pos, atm)
    top = pe.peak_gain(pos) * att
    if h < 0 or h >= top:
        return 0.0
    p = pe.shape_ratio
    return p * top ** (-p) * h ** (p - 1.0)


def composite_pdf(h, pos: UavPosition, atm: Atmosphere,
                  pe: PointingErrorModel, sc: ScintillationModel) -> float:
    """Density of the full product gain pointing * scintillation * cloud * air.

    Evaluated as the exact mixing integral over the pointing component;
    quadrature failures propagate as QuadratureError with diagnostics.
    """
    if h <= 0:
        return 0.0
    att = deterministic_gain(pos, atm)
    top = pe.peak_gain(pos) * att    # support bound of the deterministic-scaled pointing gain
    p = pe.shape_ratio

    # With x = top*v the mixing integral becomes
    #   f(h) = (p/top) * int_0^1 v^(p-2) f_s(h/(top*v)) dv.
    def integrand(v):
        return v ** (p - 2.0) * sc.pdf(h / (top * v))

    value, _, _ = integrate(integrand, 0.0, 1.0)
    return p / top * value


def composite_support(pos: UavPosition, atm: Atmosphere,
                      pe: PointingErrorModel, sc: ScintillationModel,
                      tail=1e-9) -> float:
    """Effective upper end of the composite gain for truncated integrals."""
    att = deterministic_gain(pos, atm)
    return pe.peak_gain(pos) * att * sc.upper_support(tail)
