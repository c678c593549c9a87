"""Sensor-to-UAV RF uplink: per-sensor gains, Shannon rates, aggregate signal.

All rates are in nats/s/Hz (natural log).  The channel is line-of-sight
inverse-square with a reference power gain at 1 m.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channel_models import UavPosition, _require


@dataclass(frozen=True)
class SensorField:
    """Ground sensors: positions [m], transmit powers [W], common RF parameters."""

    x: tuple
    y: tuple
    power: tuple
    reference_gain: float = 0.4   # channel power gain at 1 m
    rf_noise: float = 1e-6        # thermal noise power per sensor channel [W]

    def __post_init__(self):
        _require(len(self.x) == len(self.y) == len(self.power),
                 "x, y and power must have equal lengths")
        _require(len(self.power) >= 1, "at least one sensor required")
        _require(all(p > 0 for p in self.power), "power entries must be > 0")
        _require(self.reference_gain > 0, "reference_gain must be > 0")
        _require(self.rf_noise > 0, "rf_noise must be > 0")
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        object.__setattr__(self, "power", tuple(float(v) for v in self.power))

    @property
    def count(self):
        return len(self.power)

    def arrays(self):
        return (np.asarray(self.x), np.asarray(self.y), np.asarray(self.power))


@dataclass(frozen=True)
class UplinkStats:
    """Aggregate amplitude sum and total noise variance at the relay."""

    sum_amplitude: float   # S_X [sqrt(W)]
    noise_power: float     # sigma_s^2 = M * sigma_0^2 [W]


def _sq_distances(pos: UavPosition, fld: SensorField):
    xs, ys, _ = fld.arrays()
    return pos.z ** 2 + (xs - pos.x) ** 2 + (ys - pos.y) ** 2


def channel_gain(pos: UavPosition, fld: SensorField, m: int) -> float:
    """LoS power gain of sensor m's channel to the UAV."""
    if not 0 <= m < fld.count:
        raise IndexError(f"sensor index {m} out of range [0, {fld.count})")
    d2 = pos.z ** 2 + (fld.x[m] - pos.x) ** 2 + (fld.y[m] - pos.y) ** 2
    return fld.reference_gain / d2


def sensor_capacity(pos: UavPosition, fld: SensorField, m: int) -> float:
    """Shannon rate of sensor m's uplink [nats/s/Hz]."""
    snr = fld.power[m] * channel_gain(pos, fld, m) / fld.rf_noise
    return math.log1p(snr)


def sum_rate(pos: UavPosition, fld: SensorField) -> float:
    """Aggregate uplink rate: sum of per-sensor Shannon rates [nats/s/Hz]."""
    _, _, powers = fld.arrays()
    snr = powers * fld.reference_gain / (fld.rf_noise * _sq_distances(pos, fld))
    return float(np.sum(np.log1p(snr)))


def uplink_stats(pos: UavPosition, fld: SensorField) -> UplinkStats:
    """Coherent amplitude sum and aggregate noise seen by an AF relay."""
    _, _, powers = fld.arrays()
    amp = np.sqrt(powers * fld.reference_gain / _sq_distances(pos, fld))
    return UplinkStats(sum_amplitude=float(np.sum(amp)),
                       noise_power=fld.count * fld.rf_noise)


def sum_rate_gradient(pos: UavPosition, fld: SensorField):
    """(d/dx, d/dy) of sum_rate at fixed altitude; used for stationarity checks."""
    xs, ys, powers = fld.arrays()
    kappa = powers * fld.reference_gain / fld.rf_noise
    d2 = _sq_distances(pos, fld)
    w = -2.0 * kappa / (d2 * (d2 + kappa))
    gx = float(np.sum(w * (pos.x - xs)))
    gy = float(np.sum(w * (pos.y - ys)))
    return gx, gy
