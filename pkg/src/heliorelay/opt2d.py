"""Horizontal UAV placement against the sensor field at fixed altitude.

Covers the closed-form sum-rate optima (high- and low-SNR regimes), an
exact numeric optimizer with stationarity verification, and the two-step
max-min fairness solver built on capacity-curve intersections.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.optimize

from .channel_models import UavPosition, _require
from .rf_uplink import SensorField, sum_rate_gradient


@dataclass(frozen=True)
class Approx2DSolution:
    x: float
    y: float
    regime: str                    # "high-snr" or "low-snr"
    gamma: Optional[float] = None  # log-approximation sharpness (metadata)


@dataclass(frozen=True)
class MaxMinSolution:
    position: tuple
    value: float                   # worst per-sensor rate at position [nats/s/Hz]
    intersections: list            # accepted capacity-curve crossings
    binding_sensor: Optional[int]  # input index whose curve binds at the optimum
    special_case: bool = False     # weakest sensor already binding at its own location


def highsnr_optimum(fld: SensorField, z: float, gamma: float = 100.0) -> Approx2DSolution:
    """Weighted-mean placement valid when every sensor SNR is large.

    Weights are rf_noise/(power*reference_gain) - 1/z^2; they must share a
    sign for the stationary point to be a weighted mean.
    """
    _require(z > 0, "z must be > 0")
    xs, ys, powers = fld.arrays()
    w = fld.rf_noise / (powers * fld.reference_gain) - 1.0 / (z * z)
    if np.any(w > 0) and np.any(w < 0):
        raise ValueError(
            "mixed-sign weights: the high-SNR closed form does not apply; "
            "use numeric_optimum_2d")
    total = float(np.sum(w))
    if abs(total) < 1e-15 * float(np.sum(np.abs(w))) or total == 0.0:
        raise ValueError(
            "weight sum vanishes: the high-SNR closed form is degenerate; "
            "use numeric_optimum_2d")
    return Approx2DSolution(x=float(np.sum(xs * w) / total),
                            y=float(np.sum(ys * w) / total),
                            regime="high-snr", gamma=gamma)


def lowsnr_optimum(fld: SensorField) -> Approx2DSolution:
    """Power-weighted centroid; valid when every sensor SNR is small."""
    xs, ys, powers = fld.arrays()
    total = float(np.sum(powers))
    return Approx2DSolution(x=float(np.sum(powers * xs) / total),
                            y=float(np.sum(powers * ys) / total),
                            regime="low-snr")


def nmse(approx, exact) -> float:
    """Normalized mean-square position error of an approximate optimum."""
    ax, ay = approx
    ex, ey = exact
    denom = ex * ex + ey * ey
    if denom == 0:
        raise ValueError("exact optimum at the origin: NMSE undefined")
    return ((ax - ex) ** 2 + (ay - ey) ** 2) / denom


def _sum_rate_grid(fld: SensorField, z, gx, gy):
    xs, ys, powers = fld.arrays()
    kappa = powers * fld.reference_gain / fld.rf_noise
    total = np.zeros(np.broadcast(gx, gy).shape)
    for xm, ym, km in zip(xs, ys, kappa):
        d2 = z * z + (gx - xm) ** 2 + (gy - ym) ** 2
        total += np.log1p(km / d2)
    return total


def inflated_box(fld: SensorField, factor: float = 1.5):
    """Sensor bounding box grown symmetrically; degenerate boxes get 1 m pad."""
    xs, ys, _ = fld.arrays()
    cx, cy = 0.5 * (xs.min() + xs.max()), 0.5 * (ys.min() + ys.max())
    hx = max(0.5 * factor * (xs.max() - xs.min()), 1.0)
    hy = max(0.5 * factor * (ys.max() - ys.min()), 1.0)
    return (cx - hx, cx + hx), (cy - hy, cy + hy)


def grid_argmax(objective, box, coarse_steps=200, refine_levels=2,
                refine_factor=10):
    """Best point of a vectorized objective(X, Y) by grid + local refinement."""
    (x_lo, x_hi), (y_lo, y_hi) = box
    step_x = (x_hi - x_lo) / coarse_steps
    step_y = (y_hi - y_lo) / coarse_steps
    lo_x, hi_x, lo_y, hi_y = x_lo, x_hi, y_lo, y_hi
    best = None
    for _ in range(refine_levels + 1):
        gx = np.linspace(lo_x, hi_x, max(int(round((hi_x - lo_x) / step_x)), 2) + 1)
        gy = np.linspace(lo_y, hi_y, max(int(round((hi_y - lo_y) / step_y)), 2) + 1)
        mx, my = np.meshgrid(gx, gy, indexing="ij")
        vals = objective(mx, my)
        i, j = np.unravel_index(np.argmax(vals), vals.shape)
        best = (float(gx[i]), float(gy[j]), float(vals[i, j]))
        # shrink to a 3x3-cell window around the incumbent, refine the step
        lo_x = max(x_lo, best[0] - 1.5 * step_x)
        hi_x = min(x_hi, best[0] + 1.5 * step_x)
        lo_y = max(y_lo, best[1] - 1.5 * step_y)
        hi_y = min(y_hi, best[1] + 1.5 * step_y)
        step_x /= refine_factor
        step_y /= refine_factor
    return best


def numeric_optimum_2d(fld: SensorField, z: float, box=None):
    """Exact sum-rate maximizer over a bounded box.

    Coarse grid plus two refinement passes locate the basin; a gradient
    polish drives the stationarity residual below 1e-6 for interior optima.
    Boundary optima trigger a warning instead.
    """
    _require(z > 0, "z must be > 0")
    if box is None:
        box = inflated_box(fld)
    bx, by = grid_argmax(lambda gx, gy: _sum_rate_grid(fld, z, gx, gy), box)[:2]

    def negative(v):
        pos = UavPosition(v[0], v[1], z)
        gx, gy = sum_rate_gradient(pos, fld)
        value = float(_sum_rate_grid(fld, z, np.float64(v[0]), np.float64(v[1])))
        return -value, np.array([-gx, -gy])

    res = scipy.optimize.minimize(
        negative, x0=np.array([bx, by]), jac=True, method="L-BFGS-B",
        bounds=[box[0], box[1]], options={"gtol": 1e-12, "ftol": 0.0})
    x, y = float(res.x[0]), float(res.x[1])
    on_edge = any(abs(v - side) < 1e-9 for v, bounds in zip((x, y), box)
                  for side in bounds)
    if on_edge:
        warnings.warn("sum-rate optimum lies on the search-box boundary",
                      stacklevel=2)
    return x, y


def _capacity_1d(power, anchor_x, fld: SensorField, z, x):
    d2 = z * z + (x - anchor_x) ** 2
    return math.log1p(power * fld.reference_gain / (fld.rf_noise * d2))


def _sorted_by_power(fld: SensorField):
    order = sorted(range(fld.count), key=lambda m: (fld.power[m], fld.x[m], fld.y[m]))
    pts = [(fld.x[m], fld.y[m]) for m in order]
    if len(set(pts)) != len(pts):
        raise ValueError("sensors at identical positions are not supported")
    return order


def _quadratic_roots(a, b, c):
    if a == 0.0:
        if b == 0.0:
            return ()
        return (-c / b,)
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return ()
    root = math.sqrt(disc)
    return ((-b + root) / (2.0 * a), (-b - root) / (2.0 * a))


def maxmin_1d(fld: SensorField, z: float) -> MaxMinSolution:
    """Max-min fair placement along the sensor line at fixed altitude.

    Sensors are sorted by power internally; the sorted positions must run
    left to right (nondecreasing-power arrangement), and all sensors must
    share one y coordinate.
    """
    _require(z > 0, "z must be > 0")
    if len(set(fld.y)) != 1:
        raise ValueError("maxmin_1d requires all sensors on one horizontal line")
    y0 = fld.y[0]
    order = _sorted_by_power(fld)
    px = [fld.x[m] for m in order]
    pw = [fld.power[m] for m in order]
    if any(px[i] >= px[i + 1] for i in range(len(px) - 1)):
        raise ValueError(
            "sorted-by-power sensor positions must increase left to right")

    def cap(i, x):
        return _capacity_1d(pw[i], px[i], fld, z, x)

    rates_at_x0 = [cap(i, px[0]) for i in range(fld.count)]
    if rates_at_x0[0] <= min(rates_at_x0[1:], default=math.inf):
        return MaxMinSolution(position=(px[0], y0), value=rates_at_x0[0],
                              intersections=[], binding_sensor=order[0],
                              special_case=True)

    candidates = []
    for i in range(1, fld.count):
        a = pw[i] - pw[0]
        b = 2.0 * (pw[0] * px[i] - pw[i] * px[0])
        c = pw[i] * px[0] ** 2 - pw[0] * px[i] ** 2 + (pw[i] - pw[0]) * z * z
        for root in _quadratic_roots(a, b, c):
            if root >= 0 and abs(cap(0, root) - cap(i, root)) < 1e-6:
                candidates.append((root, order[i]))
                break
    if not candidates:
        return MaxMinSolution(position=(px[0], y0), value=rates_at_x0[0],
                              intersections=[], binding_sensor=order[0],
                              special_case=True)
    x_star, binding = max(candidates, key=lambda t: t[0])
    value = min(cap(i, x_star) for i in range(fld.count))
    return MaxMinSolution(position=(x_star, y0), value=value,
                          intersections=candidates, binding_sensor=binding)


def maxmin_2d(fld: SensorField, z: float) -> MaxMinSolution:
    """Max-min fair placement in the plane at fixed altitude.

    Capacity-curve crossings are found along each ray from the weakest
    sensor; the paper's selection rule keeps the crossing farthest from the
    origin.
    """
    _require(z > 0, "z must be > 0")
    order = _sorted_by_power(fld)
    pts = [(fld.x[m], fld.y[m]) for m in order]
    pw = [fld.power[m] for m in order]
    x0, y0 = pts[0]

    def cap_at(i, x, y):
        d2 = z * z + (x - pts[i][0]) ** 2 + (y - pts[i][1]) ** 2
        return math.log1p(pw[i] * fld.reference_gain / (fld.rf_noise * d2))

    rates_at_origin = [cap_at(i, x0, y0) for i in range(fld.count)]
    if rates_at_origin[0] <= min(rates_at_origin[1:], default=math.inf):
        return MaxMinSolution(position=(x0, y0), value=rates_at_origin[0],
                              intersections=[], binding_sensor=order[0],
                              special_case=True)

    candidates = []
    for i in range(1, fld.count):
        dist = math.hypot(pts[i][0] - x0, pts[i][1] - y0)
        theta = math.atan2(pts[i][1] - y0, pts[i][0] - x0)
        a = pw[0] - pw[i]
        b = -2.0 * pw[0] * dist
        c = (pw[0] - pw[i]) * z * z + pw[0] * dist * dist
        roots = _quadratic_roots(a, b, c)
        # the paper keeps (-b - sqrt)/(2a); with a==0 the single root applies
        ordered = roots if len(roots) < 2 else (roots[1], roots[0])
        for d in ordered:
            if d <= 0:
                continue
            point = (x0 + d * math.cos(theta), y0 + d * math.sin(theta))
            if abs(cap_at(0, *point) - cap_at(i, *point)) < 1e-6:
                candidates.append((point, order[i]))
                break
    if not candidates:
        return MaxMinSolution(position=(x0, y0), value=rates_at_origin[0],
                              intersections=[], binding_sensor=order[0],
                              special_case=True)
    (px, py), binding = max(candidates, key=lambda t: math.hypot(*t[0]))
    value = min(cap_at(i, px, py) for i in range(fld.count))
    return MaxMinSolution(position=(px, py), value=value,
                          intersections=candidates, binding_sensor=binding)


def min_rate_grid(fld: SensorField, z, gx, gy):
    """Vectorized worst per-sensor rate; the brute-force max-min objective."""
    xs, ys, powers = fld.arrays()
    worst = None
    for xm, ym, pm in zip(xs, ys, powers):
        d2 = z * z + (gx - xm) ** 2 + (gy - ym) ** 2
        r = np.log1p(pm * fld.reference_gain / (fld.rf_noise * d2))
        worst = r if worst is None else np.minimum(worst, r)
    return worst
