"""Command-line interface: solve, slice, sweep, maxmin, validate, defaults.

All numeric file output uses round-trip float formatting so runs are
reproducible byte-for-byte given the same scenario and seed.
"""

import argparse
import csv
import dataclasses
import datetime
import json
import math
import sys

import numpy as np

from . import __version__
from .channel_models import (SCINTILLATION_PRESETS, PointingErrorModel,
                             UavPosition)
from .mc_oracle import mc_capacity
from .opt2d import maxmin_1d, maxmin_2d
from .opt3d import CouplingModel, capacity_slice, optimize_position, sweep_optimal_position
from .quadrature import QuadratureError
from .relay_capacity import af_average_capacity, df_average_capacity
from .rf_uplink import SensorField
from .scenario import (ScenarioError, default_scenario, dump_scenario,
                       load_scenario, scenario_digest, with_overrides)
from .solar_power import InfeasibleAltitudeError

LN2 = math.log(2.0)


def build_parser():
    top = argparse.ArgumentParser(
        prog="heliorelay",
        description="Solar-powered UAV relay placement planner")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, seeded=True):
        p.add_argument("--scenario", help="scenario file (defaults otherwise)")
        p.add_argument("--scheme", choices=["af", "df"])
        p.add_argument("--fading", choices=["pointing", "composite"])
        p.add_argument("--unit", choices=["nats", "bits"])
        if seeded:
            p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output file (stdout otherwise)")

    p = sub.add_parser("solve", help="optimize the 3-D UAV position")
    common(p)

    p = sub.add_parser("slice", help="capacity along one axis")
    common(p)
    p.add_argument("--axis", choices=["x", "y", "z"], required=True)
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--z", type=float)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)

    p = sub.add_parser("sweep", help="re-optimize over a parameter range")
    common(p)
    p.add_argument("--param", choices=["psi_c", "sigma_N2"], required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--log", action="store_true", help="log-spaced values")
    p.add_argument("--coupling", type=float, default=1.0,
                   help="solar extinction slope for psi_c sweeps")

    p = sub.add_parser("maxmin", help="max-min fair 2-D placement")
    common(p, seeded=False)
    p.add_argument("--z", type=float, required=True, help="fixed UAV altitude")
    p.add_argument("--dim", choices=["1", "2", "auto"], default="auto")

    p = sub.add_parser("validate", help="quadrature vs Monte Carlo report")
    common(p)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--cases", type=int, default=5,
                   help="randomized scenarios besides the default")

    p = sub.add_parser("defaults", help="emit the default scenario file")
    p.add_argument("--out", help="output file (stdout otherwise)")
    return top


def _scenario_for(args):
    scn = load_scenario(args.scenario) if args.scenario else default_scenario()
    return with_overrides(scn, scheme=getattr(args, "scheme", None),
                          fading=getattr(args, "fading", None),
                          unit=getattr(args, "unit", None),
                          seed=getattr(args, "seed", None))


def _in_unit(value, scn):
    return value / LN2 if scn.relay.capacity_unit == "bits" else value


def _unit_name(scn):
    return scn.relay.capacity_unit


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(rows, header, out):
    buf = []
    writer = csv.writer(_ListWriter(buf))
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    _emit("".join(buf), out)


class _ListWriter:
    def __init__(self, sink):
        self.sink = sink

    def write(self, text):
        self.sink.append(text)


def _record(scn, args, **payload):
    return {
        "scenario_digest": scenario_digest(scn),
        "command": args.command,
        "library_version": __version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        **payload,
    }


def _cmd_solve(args):
    scn = _scenario_for(args)
    result = optimize_position(scn)
    pos = result.position
    value = _in_unit(result.capacity, scn)
    record = _record(
        scn, args,
        position={"x": pos.x, "y": pos.y, "z": pos.z},
        capacity=value, unit=_unit_name(scn), scheme=result.scheme,
        evaluations=result.evals,
        constraint_active={k: bool(v) for k, v in result.constraint_active.items()},
        budget_exhausted=result.budget_exhausted,
    )
    _emit(json.dumps(record, indent=2) + "\n", args.out)
    print(f"optimum at x={pos.x:.2f} m  y={pos.y:.2f} m  z={pos.z:.2f} m  "
          f"capacity={value:.6f} {_unit_name(scn)}/s/Hz "
          f"({result.scheme}, {result.evals} evaluations)", file=sys.stderr)
    return 0


def _cmd_slice(args):
    scn = _scenario_for(args)
    fixed = {}
    for axis in ("x", "y", "z"):
        if axis != args.axis:
            value = getattr(args, axis)
            if value is None:
                raise ScenarioError(f"slice along {args.axis!r} needs --{axis}")
            fixed[axis] = value
    grid = np.linspace(args.start, args.stop, args.steps)
    rows = capacity_slice(scn, args.axis, fixed, grid)
    rows = [(c, _in_unit(v, scn)) for c, v in rows]
    _write_csv(rows, [args.axis, f"capacity_{_unit_name(scn)}"], args.out)
    return 0


def _cmd_sweep(args):
    scn = _scenario_for(args)
    if args.log:
        values = np.geomspace(args.start, args.stop, args.steps)
    else:
        values = np.linspace(args.start, args.stop, args.steps)
    coupling = CouplingModel(slope=args.coupling) if args.param == "psi_c" else None
    rows = sweep_optimal_position(scn, args.param, values, coupling)
    rows = [(v, x, y, z, _in_unit(c, scn)) for v, x, y, z, c in rows]
    _write_csv(rows, [args.param, "x_opt", "y_opt", "z_opt",
                      f"capacity_{_unit_name(scn)}"], args.out)
    return 0


def _cmd_maxmin(args):
    scn = _scenario_for(args)
    fld = scn.sensor_field
    dim = args.dim
    if dim == "auto":
        dim = "1" if len(set(fld.y)) == 1 else "2"
    solution = maxmin_1d(fld, args.z) if dim == "1" else maxmin_2d(fld, args.z)
    record = _record(
        scn, args,
        dimension=int(dim),
        position=list(solution.position),
        min_rate=_in_unit(solution.value, scn),
        unit=_unit_name(scn),
        special_case=solution.special_case,
        binding_sensor=solution.binding_sensor,
        candidates=[{"point": c if dim == "2" else [c, solution.position[1]],
                     "sensor": i}
                    for c, i in ((cand, idx) for cand, idx in solution.intersections)],
    )
    _emit(json.dumps(record, indent=2) + "\n", args.out)
    return 0


def validation_cases(base, seed, count):
    """Randomized (scenario, position) pairs for cross-method validation."""
    rng = np.random.Generator(np.random.Philox(key=[seed, 0xC0FFEE]))
    presets = sorted(SCINTILLATION_PRESETS)
    cases = []
    for k in range(count):
        m = int(rng.integers(3, 9))
        fld = SensorField(
            x=tuple(rng.uniform(0, 1500, m)),
            y=tuple(rng.uniform(0, 1500, m)),
            power=tuple(rng.uniform(0.3, 5.0, m)),
            reference_gain=float(rng.uniform(0.2, 0.6)),
            rf_noise=1e-6)
        atm = dataclasses.replace(
            base.atmosphere,
            laser_ext_cloud=float(rng.uniform(0.001, 0.01)),
            laser_ext_air=float(rng.uniform(5e-4, 2e-3)))
        fading = "pointing" if k % 2 == 0 else "composite"
        pointing = PointingErrorModel(
            aperture_radius=0.5, beamwidth=1e-2,
            jitter=float(1e-2 * rng.uniform(0.8, 1.4)))
        link = dataclasses.replace(
            base.optical_link, pointing=pointing, fading_mode=fading,
            scintillation=SCINTILLATION_PRESETS[presets[int(rng.integers(len(presets)))]],
            ogs_noise=float(10.0 ** rng.uniform(-12, -8)))
        scn = dataclasses.replace(base, sensor_field=fld, atmosphere=atm,
                                  optical_link=link)
        pos = UavPosition(float(rng.uniform(200, 1300)),
                          float(rng.uniform(200, 1300)),
                          float(rng.uniform(1100, 3000)))
        cases.append((f"random-{k}", scn, pos))
    return cases


def validation_report(base, samples, seed, cases=5):
    """Quadrature vs Monte Carlo rows for the default plus random scenarios.

    Row: (case, scheme, fading, quadrature value, MC mean, MC std error,
    deviation in standard errors).
    """
    default_pos = UavPosition(1200.0, 1200.0, 1500.0)
    work = [("default", base, default_pos)]
    work += validation_cases(base, seed, cases)
    rows = []
    for name, scn, pos in work:
        for scheme in ("af", "df"):
            quad = (af_average_capacity if scheme == "af"
                    else df_average_capacity)(pos, scn).value
            mc = mc_capacity(scn, pos, scheme,
                             dataclasses.replace(scn.mc, samples=samples,
                                                 seed=seed))
            sigma = (abs(quad - mc.mean) / mc.std_error
                     if mc.std_error > 0 else 0.0)
            rows.append((name, scheme, scn.optical_link.fading_mode,
                         quad, mc.mean, mc.std_error, sigma))
    return rows


def _cmd_validate(args):
    scn = _scenario_for(args)
    seed = args.seed if args.seed is not None else scn.mc.seed
    rows = validation_report(scn, args.samples, seed, args.cases)
    _write_csv(rows, ["case", "scheme", "fading", "quadrature", "mc_mean",
                      "mc_std_error", "sigmas"], args.out)
    worst = max(r[-1] for r in rows)
    print(f"worst deviation: {worst:.3f} standard errors "
          f"across {len(rows)} checks", file=sys.stderr)
    return 0 if worst < 3.0 else 1


def _cmd_defaults(args):
    _emit(dump_scenario(default_scenario()), args.out)
    return 0


_HANDLERS = {
    "solve": _cmd_solve,
    "slice": _cmd_slice,
    "sweep": _cmd_sweep,
    "maxmin": _cmd_maxmin,
    "validate": _cmd_validate,
    "defaults": _cmd_defaults,
}


def run_command(argv):
    """Run one CLI invocation; domain failures become JSON error records."""
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ScenarioError, InfeasibleAltitudeError, QuadratureError,
            ValueError, OSError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 1


def main():
    sys.exit(run_command(sys.argv[1:]))
