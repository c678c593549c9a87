"""Seeded Monte Carlo estimates of fading-averaged capacity.

Serves as the independent cross-check for every quadrature and closed-form
result.  Sampling uses the counter-based Philox generator keyed by
(seed, chunk index), so fixed seeds reproduce bit-identical streams across
runs and the chunks form independent sub-streams.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channel_models import (Atmosphere, PointingErrorModel,
                             ScintillationModel, UavPosition, _require,
                             deterministic_gain)
from .relay_capacity import COMPOSITE_FADING, POINTING_FADING, _LinkState, af_gain

CHUNK = 1 << 17  # fixed chunk size: part of the reproducibility contract


@dataclass(frozen=True)
class McSettings:
    samples: int = 1_000_000
    seed: int = 12345
    antithetic: bool = False

    def __post_init__(self):
        _require(self.samples >= 1_000, "samples must be >= 1000")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    samples: int


def _chunk_rng(seed, index):
    return np.random.Generator(np.random.Philox(key=[seed, index]))


def _uniforms(rng, n, antithetic):
    if not antithetic:
        return rng.random(n)
    half = (n + 1) // 2
    u = rng.random(half)
    return np.concatenate([u, 1.0 - u])[:n]


def sample_channel_gain(rng, pos: UavPosition, atm: Atmosphere,
                        pe: PointingErrorModel,
                        sc: ScintillationModel | None,
                        mode: str, n: int, antithetic: bool = False):
    """Draw n composite (or pointing-only) optical gains.

    The pointing draw follows the generative model: a Rayleigh radial
    offset R = jitter * slant * sqrt(-2 ln u) plugged into the Gaussian
    beam profile, which reproduces the power-law gain density.
    """
    slant = pos.slant_range
    b = pe.peak_gain(pos)
    u = _uniforms(rng, n, antithetic)
    with np.errstate(divide="ignore"):
        radial = pe.jitter * slant * np.sqrt(-2.0 * np.log(u))
    h = b * np.exp(-radial ** 2 / (2.0 * pe.beamwidth ** 2 * slant ** 2))
    h *= deterministic_gain(pos, atm)
    if mode == COMPOSITE_FADING:
        if sc is None:
            raise ValueError("composite sampling requires a scintillation model")
        v = _uniforms(rng, n, antithetic)
        h *= sc.scale * (-np.log1p(-v ** (1.0 / sc.shape_a))) ** (1.0 / sc.shape_b)
    elif mode != POINTING_FADING:
        raise ValueError(f"unknown fading mode {mode!r}")
    return h


def mc_capacity(scenario, pos: UavPosition, scheme: str,
                settings: McSettings) -> McEstimate:
    """Sample mean and standard error of the conditional end-to-end rate."""
    state = _LinkState(pos, scenario)
    link = state.link

    if scheme == "af":
        g = af_gain(state.budget, state.stats)
        c_sig = (link.ogs_photo_eff * g) ** 2 * state.stats.sum_amplitude ** 2
        c_noise = (link.ogs_photo_eff * g) ** 2 * state.stats.noise_power

        def conditional(h):
            a2 = h * h
            return np.log1p(c_sig * a2 / (c_noise * a2 + link.ogs_noise))
    elif scheme == "df":
        w = state.budget.net * link.ogs_photo_eff / math.sqrt(link.ogs_noise)
        c_s = state.sum_rate

        def conditional(h):
            with np.errstate(over="ignore"):
                backhaul = np.log1p((w * h) ** 2)
            return np.minimum(backhaul, c_s)
    else:
        raise ValueError(f"unknown relay scheme {scheme!r}")

    total = 0
    acc_sum = 0.0
    acc_sq = 0.0
    index = 0
    while total < settings.samples:
        n = min(CHUNK, settings.samples - total)
        rng = _chunk_rng(settings.seed, index)
        h = sample_channel_gain(rng, pos, scenario.atmosphere, link.pointing,
                                link.scintillation, link.fading_mode, n,
                                settings.antithetic)
        c = conditional(h)
        acc_sum += float(np.sum(c))
        acc_sq += float(np.sum(c * c))
        total += n
        index += 1

    mean = acc_sum / total
    var = max(acc_sq - total * mean * mean, 0.0) / (total - 1)
    return McEstimate(mean=mean, std_error=math.sqrt(var / total),
                      samples=total)


def empirical_cdf(samples, grid):
    """Fraction of samples at or below each grid point."""
    data = np.sort(np.asarray(samples))
    return np.searchsorted(data, grid, side="right") / data.size
