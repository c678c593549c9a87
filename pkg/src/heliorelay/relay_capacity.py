"""End-to-end relay capacity: amplify-and-forward and decode-and-forward.

Conditional rates are exact; fading-averaged rates integrate them against
either the pointing-only gain density (closed-form power law) or the
composite pointing+turbulence density.  Closed-form approximations and the
asymptotic regimes are provided alongside for cross-validation.

Averages integrate in the probability domain: with p the pointing shape
ratio, w = (h / (B*h_a*h_c))**p maps the pointing gain to Uniform(0,1),
which keeps the quadrature well conditioned for any jitter level.
"""

import math
from dataclasses import dataclass
from typing import Optional

from .channel_models import (PointingErrorModel, ScintillationModel,
                             UavPosition, _require, deterministic_gain)
from .quadrature import QuadratureError, integrate
from .rf_uplink import sum_rate, uplink_stats
from .solar_power import InfeasibleAltitudeError, PowerBudget, power_budget

POINTING_FADING = "pointing"
COMPOSITE_FADING = "composite"

# conditional-capacity evaluations allowed per averaged-capacity call
EVAL_BUDGET = 10_000


@dataclass(frozen=True)
class OpticalLink:
    """UAV-to-OGS laser link parameters and the fading model selection."""

    ogs_photo_eff: float = 0.4
    ogs_noise: float = 1e-10             # sigma_N^2 [W]
    pointing: PointingErrorModel = PointingErrorModel()
    scintillation: Optional[ScintillationModel] = None
    fading_mode: str = POINTING_FADING

    def __post_init__(self):
        _require(0 < self.ogs_photo_eff <= 1,
                 "ogs_photo_eff must lie in (0, 1]")
        _require(self.ogs_noise > 0, "ogs_noise must be > 0")
        _require(self.fading_mode in (POINTING_FADING, COMPOSITE_FADING),
                 f"fading_mode must be '{POINTING_FADING}' or "
                 f"'{COMPOSITE_FADING}'")
        if self.fading_mode == COMPOSITE_FADING:
            _require(self.scintillation is not None,
                     "composite fading requires a scintillation model")


@dataclass(frozen=True)
class RelayConfig:
    scheme: str = "af"
    df_alpha: float = 100.0    # sharpness of the log approximation in the DF closed form
    capacity_unit: str = "nats"

    def __post_init__(self):
        _require(self.scheme in ("af", "df"), "scheme must be 'af' or 'df'")
        _require(self.df_alpha >= 10, "df_alpha must be >= 10")
        _require(self.capacity_unit in ("nats", "bits"),
                 "capacity_unit must be 'nats' or 'bits'")


@dataclass(frozen=True)
class CapacityResult:
    value: float               # nats/s/Hz
    method: str
    error_estimate: float = 0.0
    evaluations: int = 0


def af_gain(budget: PowerBudget, stats) -> float:
    """Relay voltage gain that spends exactly the net harvested power."""
    if budget.net < 0:
        raise InfeasibleAltitudeError(
            f"harvested power {budget.harvested:.2f} W below hover draw "
            f"{budget.consumed:.2f} W")
    return math.sqrt(budget.net / (stats.sum_amplitude ** 2 + stats.noise_power))


def _log1p_sq(v):
    """log(1 + v^2) robust to v^2 overflowing."""
    if v > 1e150:
        return 2.0 * math.log(v)
    return math.log1p(v * v)


def af_conditional_capacity(h, link: OpticalLink, budget: PowerBudget,
                            stats) -> float:
    """AF end-to-end rate for a given optical gain h [nats/s/Hz]."""
    if h < 0:
        raise ValueError("optical gain must be >= 0")
    g = af_gain(budget, stats)
    amp = link.ogs_photo_eff * h * g
    num = (amp * stats.sum_amplitude) ** 2
    den = amp * amp * stats.noise_power + link.ogs_noise
    return math.log1p(num / den)


class _LinkState:
    """Per-position quantities shared by every capacity expression."""

    def __init__(self, pos: UavPosition, scenario):
        self.pos = pos
        self.link = scenario.optical_link
        self.budget = power_budget(pos.z, scenario.solar_platform,
                                   scenario.atmosphere)
        if self.budget.net < 0:
            raise InfeasibleAltitudeError(
                f"net power {self.budget.net:.2f} W negative at z={pos.z:.1f} m")
        self.stats = uplink_stats(pos, scenario.sensor_field)
        self.sum_rate = sum_rate(pos, scenario.sensor_field)
        self.attenuation = deterministic_gain(pos, scenario.atmosphere)
        self.peak = self.link.pointing.peak_gain(pos) * self.attenuation
        self.shape = self.link.pointing.shape_ratio


class _CumulativeIntegral:
    """J(H) = integral of f on [0, H], extended incrementally with caching.

    Repeated queries share work: a new H only integrates from the nearest
    previously computed endpoint, so a whole family of nested ranges costs
    about one sweep of the largest.
    """

    def __init__(self, f, points=()):
        self.f = f
        self.points = sorted(points)
        self.known = {0.0: (0.0, 0.0)}
        self.evaluations = 0

    def __call__(self, upper):
        hit = self.known.get(upper)
        if hit is not None:
            return hit
        start = max(k for k in self.known if k <= upper)
        base, base_err = self.known[start]
        val, err, n = integrate(self.f, start, upper,
                                points=[q for q in self.points
                                        if start < q < upper],
                                epsrel=1e-9)
        self.evaluations += n
        result = (base + val, base_err + err)
        self.known[upper] = result
        return result


def _average(state: _LinkState, conditional, method, scale_hs=()):
    """Average `conditional(h)` over the selected fading distribution.

    The pointing dimension integrates in probability space (w = CDF of the
    pointing gain), which stays conditioned for any jitter level.  For
    composite fading an outer quadrature runs over the scintillation
    factor, with the pointing integral served from a shared cumulative
    integral in gain space.  `scale_hs` lists gain values where the
    conditional rate changes regime; they seed the adaptive subdivision.
    """
    link = state.link
    top, p = state.peak, state.shape
    evals = 0

    def budget_guard(n):
        nonlocal evals
        evals += n
        if evals > EVAL_BUDGET:
            raise QuadratureError(
                f"capacity evaluation exceeded {EVAL_BUDGET} integrand calls",
                evaluations=evals)

    def pointing_average(scale, epsrel):
        # E[conditional(top*scale*u)] with u the pointing fraction
        def f(w):
            return conditional(top * scale * w ** (1.0 / p))
        pts = []
        for h in scale_hs:
            u = h / (top * scale)
            if 0.0 < u < 1.0:
                pts.append(u ** p)
        val, err, n = integrate(f, 0.0, 1.0, points=pts or None, epsrel=epsrel)
        budget_guard(n)
        return val, err

    if link.fading_mode == POINTING_FADING:
        value, err = pointing_average(1.0, 1e-9)
        return CapacityResult(value=value, method=method,
                              error_estimate=err, evaluations=evals)

    sc = link.scintillation
    s_hi = sc.upper_support()

    if p <= 4.0:
        # E[conditional | scint = s] = J(top*s) / (top*s)^p with
        # J(H) = int_0^H conditional(h) p h^(p-1) dh, shared across s
        cum = _CumulativeIntegral(
            lambda h: conditional(h) * p * h ** (p - 1.0), points=scale_hs)

        def outer(s):
            upper = top * s
            val, _ = cum(upper)
            return val / upper ** p * sc.pdf(s)
    else:
        # concentrated pointing: probability space keeps the inner cheap
        def outer(s):
            val, _ = pointing_average(s, 1e-8)
            return val * sc.pdf(s)

        cum = None

    outer_pts = [h / top for h in scale_hs if 0.0 < h / top < s_hi]
    value, err, n_outer = integrate(outer, 0.0, s_hi, points=outer_pts or None,
                                    epsrel=1e-7)
    if cum is not None:
        budget_guard(cum.evaluations)
    evals += n_outer
    return CapacityResult(value=value, method=method,
                          error_estimate=err, evaluations=evals)


def af_average_capacity(pos: UavPosition, scenario) -> CapacityResult:
    """AF rate averaged over the optical fading [nats/s/Hz]."""
    state = _LinkState(pos, scenario)
    g = af_gain(state.budget, state.stats)
    eta = state.link.ogs_photo_eff
    s2 = state.stats.sum_amplitude ** 2
    noise = state.stats.noise_power
    sigma_n2 = state.link.ogs_noise

    def conditional(h):
        amp2 = (eta * h * g) ** 2
        return math.log1p(amp2 * s2 / (amp2 * noise + sigma_n2))

    # regime transitions: end-to-end SNR reaches 1; relay noise overtakes
    # the OGS noise (rate ceiling onset)
    knees = [math.sqrt(sigma_n2 / (s2 + noise)) / (eta * g)] if g > 0 else []
    if noise > 0 and g > 0:
        knees.append(math.sqrt(sigma_n2 / noise) / (eta * g))
    return _average(state, conditional, method="quadrature", scale_hs=knees)


def capacity_of_optical_snr(t: float) -> float:
    """(1 + 1/t) ln(1 + t) - 1; strictly increasing on t > 0."""
    if t <= 0:
        raise ValueError("optical SNR parameter t must be > 0")
    return (1.0 + 1.0 / t) * math.log1p(t) - 1.0


def af_asymptotic1_closed_form(pos: UavPosition, scenario) -> float:
    """AF rate when the backhaul dominates and beamwidth^2 = 2 jitter^2.

    Closed form in t = eta^2 (h_a h_c B)^2 (P_H - P_0) / sigma_N^2.
    """
    pe = scenario.optical_link.pointing
    if abs(pe.shape_ratio - 2.0) > 1e-9:
        raise ValueError(
            "closed form requires beamwidth^2 = 2 * jitter^2 "
            f"(shape ratio is {pe.shape_ratio:g})")
    state = _LinkState(pos, scenario)
    t = (state.link.ogs_photo_eff ** 2 * state.peak ** 2
         * state.budget.net / state.link.ogs_noise)
    return capacity_of_optical_snr(t)


def af_asymptotic3(h, pos: UavPosition, scenario) -> float:
    """AF rate in the high-OGS-noise regime (noise term of the relay dropped)."""
    state = _LinkState(pos, scenario)
    eta = state.link.ogs_photo_eff
    denom = state.stats.sum_amplitude ** 2 + state.stats.noise_power
    x = (eta * eta * h * h * (state.budget.net / denom)
         * state.stats.sum_amplitude ** 2 / state.link.ogs_noise)
    return math.log1p(x)


def df_backhaul_capacity(h, state: _LinkState) -> float:
    w = state.budget.net * state.link.ogs_photo_eff / math.sqrt(state.link.ogs_noise)
    return _log1p_sq(w * h)


def df_conditional_capacity(h, pos: UavPosition, scenario) -> float:
    """DF end-to-end rate: min of backhaul and aggregate uplink rates."""
    state = _LinkState(pos, scenario)
    return min(df_backhaul_capacity(h, state), state.sum_rate)


def df_average_capacity(pos: UavPosition, scenario) -> CapacityResult:
    """DF rate averaged over the optical fading [nats/s/Hz]."""
    state = _LinkState(pos, scenario)
    c_s = state.sum_rate
    w = state.budget.net * state.link.ogs_photo_eff / math.sqrt(state.link.ogs_noise)

    def conditional(h):
        return min(_log1p_sq(w * h), c_s)

    # regime transitions: backhaul SNR reaches 1; backhaul overtakes the
    # uplink ceiling at h_star
    knees = [1.0 / w, math.sqrt(math.expm1(c_s)) / w] if w > 0 else []
    return _average(state, conditional, method="quadrature", scale_hs=knees)


def df_closed_form(pos: UavPosition, scenario, alpha: Optional[float] = None) -> float:
    """Approximate DF average rate under pointing-only fading [nats/s/Hz].

    Piecewise treatment of the backhaul log: quadratic below unit SNR, a
    sharpness-alpha power-law expansion above it, and the uplink ceiling
    beyond the crossover gain.  Exact integration of each piece against the
    pointing power-law density gives the closed form.
    """
    if alpha is None:
        alpha = scenario.relay.df_alpha
    _require(alpha >= 10, "alpha must be >= 10")
    state = _LinkState(pos, scenario)
    c_s = state.sum_rate
    top, p = state.peak, state.shape
    if state.budget.net == 0:
        return 0.0
    w = state.budget.net * state.link.ogs_photo_eff / math.sqrt(state.link.ogs_noise)

    h_hat = 1.0 / w                         # backhaul SNR reaches 1
    h_star = math.sqrt(math.expm1(c_s)) / w  # backhaul rate reaches the uplink ceiling
    v_star = min(h_star, top)
    v_hat = min(h_hat, h_star, top)

    norm = p / top ** p                      # density is norm * h^(p-1)
    low = w * w * norm * v_hat ** (p + 2.0) / (p + 2.0)

    q = p + 2.0 / alpha
    high = alpha * w ** (2.0 / alpha) * norm * (v_star ** q - v_hat ** q) / q
    r = p + 2.0 / alpha - 2.0
    coef = w ** (2.0 / alpha - 2.0) * norm
    if abs(r) > 1e-12:
        high += coef * (v_star ** r - v_hat ** r) / r
    elif v_hat > 0:
        high += coef * math.log(v_star / v_hat)
    high -= alpha * norm * (v_star ** p - v_hat ** p) / p

    ceiling = c_s * (1.0 - (v_star / top) ** p)
    return low + high + ceiling


def average_capacity(pos: UavPosition, scenario) -> CapacityResult:
    """Fading-averaged rate under the scenario's relay scheme."""
    if scenario.relay.scheme == "af":
        return af_average_capacity(pos, scenario)
    return df_average_capacity(pos, scenario)
