"""Constrained 3-D placement of the solar relay and the parameter sweeps.

The capacity surface is multimodal in altitude (one candidate peak inside
the cloud layer, one above it), so optimization runs a stratified coarse
grid followed by bounded simplex refinements from the best cells.
"""

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.optimize

from .channel_models import UavPosition, _require
from .relay_capacity import average_capacity
from .solar_power import InfeasibleAltitudeError, hover_power, min_altitude

CAPACITY_TIE = 1e-9


@dataclass(frozen=True)
class OptimizerSettings:
    box_size: float = 2000.0          # D: (x, y) range is [0, D]
    z_max: float = 10_000.0
    starts: int = 8                   # refined local searches from the best grid cells
    coarse_grid: tuple = (20, 20, 40)
    local_tol: float = 0.1            # m; simplex size and boundary-flag margin
    max_evals: int = 60_000
    seed: int = 0

    def __post_init__(self):
        _require(self.box_size > 0, "box_size must be > 0")
        _require(self.z_max > 0, "z_max must be > 0")
        _require(self.starts >= 4, "starts must be >= 4")
        _require(len(self.coarse_grid) == 3
                 and all(int(n) >= 2 for n in self.coarse_grid),
                 "coarse_grid needs three axis counts >= 2")
        _require(self.local_tol > 0, "local_tol must be > 0")
        _require(self.max_evals >= 100, "max_evals must be >= 100")


@dataclass(frozen=True)
class CouplingModel:
    """Linear tie between laser and sunlight cloud extinction: beta_c = slope * psi_c."""

    slope: float = 1.0
    psi_lo: float = 0.001
    psi_hi: float = 0.01

    def __post_init__(self):
        _require(self.slope > 0, "slope must be > 0")
        _require(0 <= self.psi_lo <= self.psi_hi, "need 0 <= psi_lo <= psi_hi")


@dataclass(frozen=True)
class OptimizationResult:
    position: UavPosition
    capacity: float                  # nats/s/Hz
    scheme: str
    evals: int
    all_starts: tuple                # (start point, local optimum, value) per refinement
    constraint_active: dict
    budget_exhausted: bool = False


def _stratified_z_grid(z_lo, z_hi, atm, count):
    """Altitude nodes covering every atmospheric layer inside (z_lo, z_hi]."""
    edges = [z_lo]
    for b in (atm.cloud_base, atm.cloud_top):
        if z_lo < b < z_hi:
            edges.append(b)
    edges.append(z_hi)
    spans = [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]
    weights = np.array([hi - lo for lo, hi in spans], dtype=float)
    alloc = np.maximum(np.round(count * weights / weights.sum()).astype(int), 3)
    nodes = []
    for (lo, hi), n in zip(spans, alloc):
        nodes.extend(np.linspace(lo, hi, n + 1)[1:])  # skip lo: belongs to the span below
    nodes.append(z_lo + 1e-6)  # probe just above the feasibility floor
    return np.unique(np.clip(nodes, z_lo, z_hi))


def feasible_z_range(scenario):
    """(z floor, z ceiling) allowed by power balance and the search box."""
    z0 = min_altitude(scenario.solar_platform, scenario.atmosphere)
    z_max = scenario.optimizer.z_max
    if z0 >= z_max:
        raise InfeasibleAltitudeError(
            f"minimum sustainable altitude {z0:.1f} m exceeds z_max {z_max:.1f} m")
    return z0, z_max


def optimize_position(scenario, settings: Optional[OptimizerSettings] = None) -> OptimizationResult:
    """Maximize the fading-averaged end-to-end rate over the position box."""
    if settings is None:
        settings = scenario.optimizer
    z0, z_max = feasible_z_range(scenario)
    z_lo = z0 + max(settings.local_tol * 1e-3, 1e-6)  # keep z > z0 strictly
    d = settings.box_size
    evals = 0
    exhausted = False

    def capacity(x, y, z):
        nonlocal evals
        evals += 1
        return average_capacity(UavPosition(x, y, z), scenario).value

    nx, ny, nz = settings.coarse_grid
    gx = np.linspace(0.0, d, nx)
    gy = np.linspace(0.0, d, ny)
    gz = _stratified_z_grid(z_lo, z_max, scenario.atmosphere, nz)

    nodes = []
    best_grid = -math.inf
    for z in gz:
        for x in gx:
            for y in gy:
                if evals >= settings.max_evals:
                    exhausted = True
                    break
                v = capacity(x, y, z)
                best_grid = max(best_grid, v)
                nodes.append((v, x, y, z))
            if exhausted:
                break
        if exhausted:
            break

    nodes.sort(key=lambda t: -t[0])
    starts = nodes[:settings.starts]
    bounds = [(0.0, d), (0.0, d), (z_lo, z_max)]
    all_starts = []
    for v0, x, y, z in starts:
        if evals >= settings.max_evals:
            exhausted = True
            all_starts.append(((x, y, z), (x, y, z), v0))
            continue
        budget = max((settings.max_evals - evals) // max(len(starts), 1), 50)
        res = scipy.optimize.minimize(
            lambda v: -capacity(v[0], v[1], v[2]),
            x0=np.array([x, y, z]), method="Nelder-Mead", bounds=bounds,
            options={"xatol": settings.local_tol, "fatol": 1e-12,
                     "maxfev": budget})
        all_starts.append(((x, y, z), tuple(float(c) for c in res.x),
                           float(-res.fun)))

    def better(a, b):
        """Is candidate a strictly preferable to b (value, then z, x, y)?"""
        if a[2] > b[2] + CAPACITY_TIE:
            return True
        if a[2] < b[2] - CAPACITY_TIE:
            return False
        return a[1] < b[1]  # (z, x, y) lexicographic

    best = None
    for _, opt, val in all_starts:
        cand = (opt, (opt[2], opt[0], opt[1]), val)
        if best is None or better(cand, best):
            best = cand
    (bx, by, bz), _, bval = best
    assert bval >= best_grid - CAPACITY_TIE, "refinement lost the grid incumbent"

    pos = UavPosition(bx, by, bz)
    fresh = average_capacity(pos, scenario).value
    tol = settings.local_tol
    active = {
        "x_low": bx <= tol, "x_high": bx >= d - tol,
        "y_low": by <= tol, "y_high": by >= d - tol,
        "z_low": bz <= z_lo + tol, "z_high": bz >= z_max - tol,
    }
    return OptimizationResult(position=pos, capacity=fresh,
                              scheme=scenario.relay.scheme, evals=evals,
                              all_starts=tuple(all_starts),
                              constraint_active=active,
                              budget_exhausted=exhausted)


def capacity_slice(scenario, axis: str, fixed_coords, grid):
    """Capacity along one axis with the other coordinates pinned.

    fixed_coords maps the two non-swept axis names to values.  Rows are
    (coordinate, capacity); altitudes below the feasibility floor yield NaN.
    """
    _require(axis in ("x", "y", "z"), "axis must be 'x', 'y' or 'z'")
    others = {k: float(v) for k, v in fixed_coords.items()}
    _require(set(others) == {"x", "y", "z"} - {axis},
             f"fixed_coords must pin exactly the axes other than {axis!r}")
    rows = []
    for c in grid:
        coords = dict(others)
        coords[axis] = float(c)
        try:
            value = average_capacity(UavPosition(**coords), scenario).value
        except InfeasibleAltitudeError:
            value = math.nan
        rows.append((float(c), value))
    return rows


def _with_parameter(scenario, parameter, value, coupling):
    if parameter == "sigma_N2":
        link = dataclasses.replace(scenario.optical_link, ogs_noise=value)
        return dataclasses.replace(scenario, optical_link=link)
    if parameter == "psi_c":
        slope = coupling.slope if coupling is not None else 1.0
        atm = dataclasses.replace(scenario.atmosphere, laser_ext_cloud=value,
                                  solar_ext_cloud=slope * value)
        return dataclasses.replace(scenario, atmosphere=atm)
    raise ValueError(f"unknown sweep parameter {parameter!r}")


def sweep_optimal_position(scenario, parameter: str, values,
                           coupling: Optional[CouplingModel] = None):
    """Re-optimize the UAV position for each parameter value.

    For psi_c sweeps the sunlight extinction follows the linear coupling.
    Rows are (value, x*, y*, z*, capacity).
    """
    values = list(values)
    _require(all(values[i] <= values[i + 1] for i in range(len(values) - 1)),
             "sweep values must be sorted ascending")
    rows = []
    for v in values:
        modified = _with_parameter(scenario, parameter, float(v), coupling)
        result = optimize_position(modified)
        p = result.position
        rows.append((float(v), p.x, p.y, p.z, result.capacity))
    return rows
