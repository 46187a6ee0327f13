"""Command-line interface: run, converge, kernel-check.

Exit codes: 0 success, 1 validation error, 2 runtime divergence, 3 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, OutputOptions, parse_config
from .fieldio import field_to_csv, write_atomic, write_snapshot
from .grid import vorticity
from .kernel import (
    C_SUMSQ,
    K_MOMENT,
    Kernel,
    KernelConstructionError,
    phi_weights,
)
from .sim import DivergenceError, SimConfig, run
from .verify import refine_study

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DIVERGENCE = 2
EXIT_IO = 3

C_REFERENCE = 0.326  # reported sum-of-squares constant
C_TOLERANCE = 5e-4
RESIDUAL_TOLERANCE = 1e-10


def _reynolds(cfg: SimConfig) -> float | None:
    if cfg.kern is None or cfg.u_mean is None or cfg.fluid.mu == 0:
        return None
    R = cfg.kern.effective_radius()
    return cfg.fluid.rho * cfg.u_mean * 2.0 * R / cfg.fluid.mu


def _trajectory_csv(record) -> str:
    lines = ["t,X1,X2,U1,U2,mean_u1,div_residual,kinetic_energy"]
    for i in range(len(record.t)):
        lines.append(
            f"{record.t[i]:.16e},{record.X1[i]:.16e},{record.X2[i]:.16e},"
            f"{record.U1[i]:.16e},{record.U2[i]:.16e},{record.mean_u1[i]:.16e},"
            f"{record.div_residual[i]:.16e},{record.kinetic_energy[i]:.16e}"
        )
    return "\n".join(lines) + "\n"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def cmd_run(args) -> int:
    try:
        cfg, out = parse_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.output_dir is not None:
        out = OutputOptions(dir=args.output_dir, cadence=out.cadence, formats=out.formats)

    re_number = _reynolds(cfg)
    if re_number is not None and not args.quiet:
        print(f"Re = {re_number:.4g}")

    out_dir = Path(out.dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory {out.dir}: {exc}", file=sys.stderr)
        return EXIT_IO

    written: list[Path] = []

    def on_snapshot(state):
        if not out.formats:
            return
        chans = {
            "u1": state.u.c1.values,
            "u2": state.u.c2.values,
            "vorticity": vorticity(state.u).values,
        }
        if "snapshot" in out.formats:
            path = out_dir / f"fields_{state.step_index:08d}.ibflow"
            write_snapshot(path, cfg.spec, chans)
            written.append(path)
        if "csv" in out.formats:
            for name, arr in chans.items():
                path = out_dir / f"{name}_{state.step_index:08d}.csv"
                from .grid import ScalarField

                write_atomic(path, field_to_csv(ScalarField(cfg.spec, arr)))
                written.append(path)

    started = time.monotonic()
    try:
        record, final = run(cfg, on_snapshot=on_snapshot)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except OSError as exc:
        print(f"error: I/O failure while writing outputs: {exc}", file=sys.stderr)
        return EXIT_IO
    wall = time.monotonic() - started

    try:
        traj_path = out_dir / "trajectory.csv"
        write_atomic(traj_path, _trajectory_csv(record))
        written.append(traj_path)
        manifest = {
            "version": __version__,
            "config": str(Path(args.config).resolve()),
            "grid": {"n1": cfg.spec.n1, "n2": cfg.spec.n2, "h": cfg.spec.h},
            "dt": cfg.dt,
            "t_end": cfg.t_end,
            "steps": cfg.n_steps(),
            "reynolds": re_number,
            "wall_clock_s": wall,
            "checksums": {p.name: _sha256(p) for p in written},
        }
        write_atomic(out_dir / "manifest.json", json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        print(f"error: I/O failure while writing outputs: {exc}", file=sys.stderr)
        return EXIT_IO

    if not args.quiet:
        where = f" X = ({final.X[0]:.6g}, {final.X[1]:.6g})" if final.X is not None else ""
        print(f"completed {cfg.n_steps()} steps in {wall:.2f} s;{where}")
    return EXIT_OK


def cmd_converge(args) -> int:
    if args.levels < 2:
        print("error: --levels must be at least 2", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        cfg, out = parse_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.output_dir is not None:
        out = OutputOptions(dir=args.output_dir, cadence=out.cadence, formats=out.formats)
    if cfg.spec.n1 % 2 or cfg.spec.n2 % 2:
        print(
            f"error: grid {cfg.spec.n1}x{cfg.spec.n2} is not halvable; "
            f"a refinement ladder needs even node counts",
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    cfg = replace(cfg, cadence=0)  # only final-time fields enter the study

    re_number = _reynolds(cfg)
    if re_number is not None and not args.quiet:
        print(f"Re = {re_number:.4g}")

    try:
        report = refine_study(cfg, args.levels)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    out_dir = Path(out.dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_atomic(out_dir / "refinement.csv", report.to_csv())
    except OSError as exc:
        print(f"error: cannot write refinement report: {exc}", file=sys.stderr)
        return EXIT_IO

    if not args.quiet:
        print(report.to_csv(), end="")
    ok = report.p_u is not None and args.order_min <= report.p_u <= args.order_max
    if report.p_X is not None:
        ok = ok and args.order_min <= report.p_X <= args.order_max
    if not ok:
        print(
            f"fitted orders p_u={report.p_u} p_X={report.p_X} outside "
            f"[{args.order_min}, {args.order_max}]",
            file=sys.stderr,
        )
        return EXIT_DIVERGENCE
    return EXIT_OK


def cmd_kernel_check(args) -> int:
    if args.samples < 1:
        print("error: --samples must be at least 1", file=sys.stderr)
        return EXIT_VALIDATION
    rng = np.random.default_rng(0)
    shifts = rng.uniform(0.0, 1.0, args.samples)
    offsets = np.array([-3.0, -2.0, -1.0, 0.0, 1.0, 2.0])
    lines = ["s,w0,w1,w2,w3,w4,w5,r_even,r_odd,r_m1,r_m2,r_m3,r_sumsq"]
    worst = 0.0
    try:
        for s in sorted(shifts):
            w = phi_weights(float(s))
            a = s + offsets
            r_even = abs(w[1] + w[3] + w[5] - 0.5)
            r_odd = abs(w[0] + w[2] + w[4] - 0.5)
            r_m1 = abs(float(a @ w))
            r_m2 = abs(float(a**2 @ w) - K_MOMENT)
            r_m3 = abs(float(a**3 @ w))
            r_sq = abs(float(w @ w) - C_SUMSQ)
            worst = max(worst, r_even, r_odd, r_m1, r_m2, r_m3, r_sq)
            lines.append(
                f"{s:.16e}," + ",".join(f"{v:.16e}" for v in w) + ","
                + ",".join(f"{v:.3e}" for v in (r_even, r_odd, r_m1, r_m2, r_m3, r_sq))
            )
    except KernelConstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    lines.append(f"# C = {C_SUMSQ:.12f}  max residual = {worst:.3e}")
    print("\n".join(lines))
    if worst > RESIDUAL_TOLERANCE or abs(C_SUMSQ - C_REFERENCE) > C_TOLERANCE:
        print(
            f"kernel check failed: max residual {worst:.3e}, C = {C_SUMSQ:.6f}",
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ibflow",
        description="Periodic immersed-boundary Navier-Stokes solver and verification harness",
    )
    parser.add_argument("--version", action="version", version=f"ibflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a simulation from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--output-dir", default=None)
    p_run.add_argument("--seed", type=int, default=None, help="reserved; the scheme is deterministic")
    p_run.add_argument("--quiet", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_conv = sub.add_parser("converge", help="grid-refinement convergence study")
    p_conv.add_argument("config")
    p_conv.add_argument("--levels", type=int, required=True)
    p_conv.add_argument("--order-min", type=float, default=1.7)
    p_conv.add_argument("--order-max", type=float, default=2.3)
    p_conv.add_argument("--output-dir", default=None)
    p_conv.add_argument("--seed", type=int, default=None)
    p_conv.add_argument("--quiet", action="store_true")
    p_conv.set_defaults(func=cmd_converge)

    p_kc = sub.add_parser("kernel-check", help="verify the six-point kernel constraints")
    p_kc.add_argument("--samples", type=int, default=1000)
    p_kc.add_argument("--seed", type=int, default=None)
    p_kc.add_argument("--quiet", action="store_true")
    p_kc.set_defaults(func=cmd_kernel_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
