"""Command-line entry point: bound evaluation, parameter sweeps, light-cone
scans, QRAM simulation runs, and the verification suite.

Exit codes: 0 ok, 1 verification failure, 2 config error, 3 retrieval
mismatch.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import bounds, lattice, qram, verify
from .params import (Conventions, HardwareParams, ParamsError, load_config,
                     tau0, validate, validate_conventions)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_RETRIEVAL = 3

# Default operating point: micron spacing, millisecond stage time
# (g1 = g2 = 2000*pi so tau0 = 1e-3 s), unit couplings.
PRESET_PARAMS = HardwareParams(a=1e-6, delta_t=1e-3, g1=2000.0 * math.pi,
                               g2=2000.0 * math.pi, lam=(1.0,), m=1.0,
                               d=1, nu=1)

SOUND_SPEED = 6000.0  # m/s, typical solid


@dataclass(frozen=True)
class AxisSpec:
    name: str     # "velocity" | "g" | "v2"
    lo: float
    hi: float
    points: int
    log: bool = True

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class SweepGrid:
    axes: tuple[AxisSpec, ...]
    fixed: HardwareParams
    conventions: Conventions
    dims: tuple[int, ...] = (1,)

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ParamsError("sweep needs 1 or 2 axes")
        total = 1
        for ax in self.axes:
            if ax.points < 2:
                raise ParamsError("points >= 2 per axis")
            if ax.lo <= 0 or ax.hi <= ax.lo:
                raise ParamsError("axis range must satisfy 0 < lo < hi")
            if ax.name not in ("velocity", "g", "v2"):
                raise ParamsError(f"unknown sweep axis {ax.name!r}")
            total *= ax.points
        if total > 10 ** 6:
            raise ParamsError("sweep grid exceeds 10^6 points")


def _evaluate_point(grid: SweepGrid, values: dict[str, float], d: int) -> float:
    params = replace(grid.fixed, d=d)
    conv = grid.conventions
    if "g" in values:
        params = replace(params, g1=values["g"], g2=values["g"])
    if "velocity" in values:
        conv = replace(conv, velocity_source=float(values["velocity"]))
    if "v2" in values:
        conv = replace(conv, velocity_source=float(math.sqrt(values["v2"])))
    return bounds.qram_max_qubits(params, conv).max_qubits_total


def run_sweep(grid: SweepGrid, out_path: str | Path) -> int:
    """Evaluate the grid and write a CSV with a conventions comment line;
    returns the number of data rows."""
    conv = validate_conventions(grid.conventions)
    grid = replace(grid, conventions=conv)
    validate(grid.fixed)
    axis_cols = [ax.name for ax in grid.axes]
    out_cols = [f"max_qubits_d{d}" for d in grid.dims]
    source = ("axis" if any(ax.name in ("velocity", "v2") for ax in grid.axes)
              else conv.velocity_source)
    meta = (f"# log_base={conv.log_base} depth_exponent={conv.depth_exponent}"
            f" velocity_source={source}"
            f" a={grid.fixed.a:g} tau0={tau0(grid.fixed.g1, grid.fixed.g2):g}"
            f" dims={','.join(str(d) for d in grid.dims)}")
    lines = [meta, ",".join(axis_cols + out_cols)]
    grids = [ax.values() for ax in grid.axes]
    points = ([(x,) for x in grids[0]] if len(grids) == 1
              else [(x, y) for x in grids[0] for y in grids[1]])
    for point in points:
        values = dict(zip(axis_cols, point))
        row = [f"{v:.10g}" for v in point]
        for d in grid.dims:
            cell = _evaluate_point(grid, values, d)
            if not math.isfinite(cell):
                raise ParamsError("non-finite sweep value")
            row.append(f"{cell:.10g}")
        lines.append(",".join(row))
    Path(out_path).write_text("\n".join(lines) + "\n")
    return len(points)


def fig3_grid(depth_exponent: int = 2, log_base: str = "natural") -> SweepGrid:
    """Velocity axis up to the sound-speed scale, one capacity column per
    dimension, micron spacing and millisecond stage time."""
    return SweepGrid(
        axes=(AxisSpec("velocity", 1e2, SOUND_SPEED, 50, log=True),),
        fixed=PRESET_PARAMS,
        conventions=Conventions(log_base=log_base, depth_exponent=depth_exponent),
        dims=(1, 2, 3),
    )


def fig4_grid(depth_exponent: int = 2, log_base: str = "natural") -> SweepGrid:
    """Coupling axis vs squared-speed-limit axis at millimeter spacing,
    1D capacity heat map."""
    return SweepGrid(
        axes=(AxisSpec("g", 1e-4, 1.0, 40, log=True),
              AxisSpec("v2", 1e2, SOUND_SPEED ** 2, 40, log=True)),
        fixed=replace(PRESET_PARAMS, a=1e-3),
        conventions=Conventions(log_base=log_base, depth_exponent=depth_exponent),
        dims=(1,),
    )


def _print_bound(result: bounds.BoundResult, file=None) -> None:
    file = file or sys.stdout
    conv = result.conventions
    print(f"max qubits (total):  {result.max_qubits_total:.6e}", file=file)
    print(f"max linear extent:   {result.max_linear_extent:.6e}", file=file)
    print(f"velocity used [m/s]: {result.velocity_used:.6g}", file=file)
    print(f"conventions: log_base={conv.log_base}"
          f" depth_exponent={conv.depth_exponent}"
          f" velocity_source={conv.velocity_source}", file=file)
    record = {
        "max_qubits_total": result.max_qubits_total,
        "max_linear_extent": result.max_linear_extent,
        "velocity_used": result.velocity_used,
        "log_base": conv.log_base,
        "depth_exponent": conv.depth_exponent,
        "velocity_source": conv.velocity_source,
        "a": result.inputs_digest.a,
        "tau0": tau0(result.inputs_digest.g1, result.inputs_digest.g2),
        "d": result.inputs_digest.d,
    }
    print("record " + json.dumps(record), file=file)


def _load_params(args) -> HardwareParams:
    if args.config is not None:
        return load_config(args.config)
    return validate(PRESET_PARAMS)


def _conventions(args) -> Conventions:
    source: str | float
    if getattr(args, "velocity", None) is not None:
        source = float(args.velocity)
    else:
        source = getattr(args, "velocity_source", "lieb_robinson")
    return validate_conventions(Conventions(
        log_base=args.log_base,
        depth_exponent=args.depth_exponent,
        velocity_source=source,
    ))


def _cmd_bound(args) -> int:
    try:
        params = _load_params(args)
        conv = _conventions(args)
        if args.kind == "naive":
            n_max = bounds.naive_max_qubits(params.a, params.delta_t,
                                            params.c_max, conv.log_base)
            print(f"naive causality bound: N <= {n_max:.6e} "
                  f"(a={params.a:g} m, delta_t={params.delta_t:g} s, "
                  f"c={params.c_max:g} m/s, log_base={conv.log_base})")
            return EXIT_OK
        if args.kind == "teleport":
            result = bounds.teleport_hybrid_max_qubits(params, conv)
        else:
            result = bounds.qram_max_qubits(params, conv)
        _print_bound(result)
        return EXIT_OK
    except (ParamsError, bounds.BoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _cmd_sweep(args) -> int:
    try:
        if args.preset == "fig3":
            grid = fig3_grid(args.depth_exponent, args.log_base)
        elif args.preset == "fig4":
            grid = fig4_grid(args.depth_exponent, args.log_base)
        else:
            if not args.axis:
                raise ParamsError("custom sweep needs --axis")
            axes = tuple(_parse_axis(a) for a in args.axis)
            params = _load_params(args)
            dims = tuple(int(x) for x in args.dims.split(","))
            grid = SweepGrid(
                axes=axes, fixed=params,
                conventions=Conventions(log_base=args.log_base,
                                        depth_exponent=args.depth_exponent),
                dims=dims)
        n = run_sweep(grid, args.out)
        print(f"wrote {n} rows to {args.out}")
        return EXIT_OK
    except (ParamsError, bounds.BoundError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _parse_axis(text: str) -> AxisSpec:
    parts = text.split(":")
    if len(parts) != 5:
        raise ParamsError("axis format: name:lo:hi:points:lin|log")
    name, lo, hi, points, scale = parts
    if scale not in ("lin", "log"):
        raise ParamsError("axis scale must be lin or log")
    return AxisSpec(name=name, lo=float(lo), hi=float(hi),
                    points=int(points), log=scale == "log")


def _cmd_lightcone(args) -> int:
    try:
        lam = tuple(float(x) for x in args.lam.split(","))
        spec = lattice.LatticeSpec(d=args.d, L=args.L, lam=lam, m=args.m,
                                   a=args.a)
        r_max = args.r_max if args.r_max is not None else spec.L // 2 - spec.nu
        scan = lattice.measure_light_cone(spec, threshold=args.threshold,
                                          t_max=args.t_max, r_max=r_max,
                                          dt=args.dt, fit_r_min=args.fit_r_min)
    except (lattice.LatticeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    gv = lattice.max_group_velocity(spec)
    bound = lattice.lr_bound_velocity(spec)
    if args.out:
        lines = [f"# threshold={scan.threshold:g} t_max={scan.t_max:g} "
                 f"dt={scan.dt:g} d={spec.d} L={spec.L} lam={args.lam} m={spec.m:g}",
                 "r,t_arrival,commutator_peak"]
        for row in scan.rows:
            t_str = "" if row.t_arrival is None else f"{row.t_arrival:.10g}"
            lines.append(f"{row.r},{t_str},{row.peak:.10g}")
        Path(args.out).write_text("\n".join(lines) + "\n")
    fitted = scan.fitted_velocity_lattice
    print(f"fitted velocity:     {fitted:.6g} sites/s "
          f"({scan.fitted_velocity_physical:.6g} m/s)")
    print(f"group velocity max:  {gv.lattice_units:.6g} sites/s "
          f"({gv.physical:.6g} m/s)")
    print(f"commutator bound:    {bound:.6g} sites/s")
    ok = fitted <= bound
    print("PASS: fitted velocity below bound" if ok
          else "FAIL: fitted velocity exceeds bound")
    return EXIT_OK if ok else EXIT_VERIFY


def _cmd_qramsim(args) -> int:
    try:
        if args.db is not None:
            db = qram.read_database(args.db)
        elif args.random_db:
            if args.N is None:
                raise qram.QramError("--random-db needs --N")
            db = qram.random_database(args.N, seed=args.seed)
        else:
            raise qram.QramError("need --db or --random-db with --N")
        if args.N is not None and db.N != args.N:
            raise qram.QramError(f"database length {db.N} != N={args.N}")
        if db.N > qram.MAX_SIM_QUBITS:
            raise qram.QramError(f"state-vector cap: N <= {qram.MAX_SIM_QUBITS}")
        if args.address != "all":
            address = int(args.address)
            if not 0 <= address < db.N:
                raise qram.QramError(f"address {address} out of range for N={db.N}")
    except (qram.QramError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.address != "all":
        basis = np.zeros(db.N, dtype=complex)
        basis[address] = 1.0
        result = qram.simulate_query(db, basis, args.g1, args.g2)
        row = result.table[0]
        print("address expected read fidelity")
        print(f"{row.address:7d} {row.expected:8d} {row.read:4d} {row.fidelity:.12f}")
        ok = row.read == row.expected and result.fidelity >= 1.0 - 1e-9
        return EXIT_OK if ok else EXIT_RETRIEVAL

    report = qram.verify_retrieval(db, g1=args.g1, g2=args.g2, seed=args.seed)
    print("address expected read fidelity")
    for row in report.rows:
        print(f"{row.address:7d} {row.expected:8d} {row.read:4d} {row.fidelity:.12f}")
    print(f"min fidelity: {report.min_fidelity:.12f}")
    if report.failures:
        for failure in report.failures:
            print(f"MISMATCH {failure}")
        return EXIT_RETRIEVAL
    print("PASS: all addresses retrieved")
    return EXIT_OK


def _cmd_verify(args) -> int:
    return verify.run_verify()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qram-bounds",
        description="Causality capacity bounds for bucket-brigade quantum "
                    "RAM, with constructive lattice and gate-level checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_conventions(p, default_p=2):
        p.add_argument("--log-base", default="natural", choices=("natural", "2"))
        p.add_argument("--depth-exponent", type=int, default=default_p,
                       help="p in T ~ tau0 log^p N")

    p = sub.add_parser("bound", help="evaluate a single capacity bound")
    p.add_argument("--kind", choices=("naive", "qram", "teleport"), default="qram")
    p.add_argument("--config", help="hardware config file (key = value)")
    p.add_argument("--velocity", type=float,
                   help="explicit per-axis velocity in m/s")
    p.add_argument("--velocity-source", default="lieb_robinson",
                   choices=("lieb_robinson", "qft", "group"))
    add_conventions(p)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("sweep", help="write a capacity-bound CSV over a grid")
    p.add_argument("--preset", choices=("fig3", "fig4"))
    p.add_argument("--axis", action="append",
                   help="name:lo:hi:points:lin|log (velocity, g, or v2)")
    p.add_argument("--dims", default="1", help="comma list of dimensions")
    p.add_argument("--config", help="hardware config for custom sweeps")
    p.add_argument("--out", required=True)
    add_conventions(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("lightcone", help="measure an empirical light cone")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--L", type=int, default=400)
    p.add_argument("--lam", default="1.0", help="comma list of couplings")
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=1e-3)
    p.add_argument("--t-max", type=float, default=220.0)
    p.add_argument("--r-max", type=int, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--fit-r-min", type=int, default=1)
    p.add_argument("--out", help="CSV path for (r, t_arrival, peak) rows")
    p.set_defaults(func=_cmd_lightcone)

    p = sub.add_parser("qramsim", help="simulate retrieval on a database")
    p.add_argument("--db", help="text file of 0/1 characters, length N")
    p.add_argument("--N", type=int, help="database size for --random-db")
    p.add_argument("--random-db", action="store_true")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--address", default="all", help="'all' or a basis address")
    p.add_argument("--g1", type=float, default=math.pi)
    p.add_argument("--g2", type=float, default=math.pi)
    p.set_defaults(func=_cmd_qramsim)

    p = sub.add_parser("verify", help="run all module property suites")
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
