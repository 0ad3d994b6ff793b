"""Command-line entry point: ``ringratchet <subcommand> [flags]``.

Every subcommand writes a CSV into the output directory (``--out``, else
``$RINGRATCHET_OUTPUT_DIR``, else the working directory), optionally an SVG
with ``--svg``, and prints a one-line summary. Exit status is 0 on success,
1 on a solver failure and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import analysis, io
from .errors import InvalidArgument, RingRatchetError
from .gp import gp_evolve
from .lyapunov import (TangentVector, evolve_with_tangent, lyapunov_exponent,
                       twin_trajectory_divergence)
from .model import (DriveParams, NumericsConfig, make_two_mode_state,
                    state_to_field)
from .tmm import tmm_evolve

SUBCOMMANDS = ("evolve-gp", "evolve-tmm", "lyapunov", "instability", "sweep",
               "transition", "portrait", "twin")

# Horizon (drive periods) when neither a flag nor the config file sets one.
DEFAULT_PERIODS = {"instability": 2000, "sweep": 2000, "transition": 2000,
                   "portrait": 2000, "twin": 500}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat 'key = value' file merged over defaults")
    p.add_argument("--g", type=float)
    p.add_argument("--K", "--k", dest="K", type=float)
    p.add_argument("--omega", "--w", dest="omega", type=float)
    p.add_argument("--grid-points", type=int)
    p.add_argument("--steps-per-period", type=int)
    p.add_argument("--periods", type=int, help="horizon in drive periods")
    p.add_argument("--sample-stride", type=int)
    p.add_argument("--w-minus1", type=float, help="initial population of mode -1")
    p.add_argument("--w-0", type=float, help="initial population of mode 0")
    p.add_argument("--phase", type=float, help="initial phase of mode -1")
    p.add_argument("--out", dest="output_dir", help="output directory")
    p.add_argument("--svg", action="store_true", help="also write an SVG plot")


def _scan_flags(p, default_param="g"):
    p.add_argument("--param", choices=analysis.PARAMETERS, default=default_param)
    p.add_argument("--from", dest="start", type=float)
    p.add_argument("--to", dest="stop", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ringratchet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name in ("evolve-gp", "evolve-tmm"):
        _common(sub.add_parser(name, help=f"time series from the {name[7:]} engine"))

    p = sub.add_parser("lyapunov", help="tangent growth and Lyapunov exponent")
    _common(p)
    p.add_argument("--eps", type=float, default=1e-20, help="initial (dA, dB, dC), each")
    p.add_argument("--method", choices=("slope", "endpoint"), default="slope")
    _scan_flags(p)

    p = sub.add_parser("instability", help="fidelity-based instability IF")
    _common(p)
    p.add_argument("--perturbation", type=float, default=1e-5)
    _scan_flags(p)

    p = sub.add_parser("sweep", help="time-averaged current versus a parameter")
    _common(p)
    _scan_flags(p)
    p.add_argument("--engine", choices=analysis.ENGINES, default="tmm")

    p = sub.add_parser("transition", help="bisect for the critical parameter value")
    _common(p)
    p.add_argument("--param", choices=analysis.PARAMETERS, default="g")
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--tol", type=float, default=2e-3)
    p.add_argument("--engine", choices=analysis.ENGINES, default="tmm")

    p = sub.add_parser("portrait", help="current vs phase difference arg A - arg B")
    _common(p)

    p = sub.add_parser("twin", help="currents from a state and its perturbed twin")
    _common(p)
    p.add_argument("--delta", type=float, default=1e-3)
    return parser


def _resolve(args):
    cfg = io.RunConfig(experiment=args.command)
    if args.command in DEFAULT_PERIODS:
        cfg = cfg.merged({"periods": DEFAULT_PERIODS[args.command]})
    if args.config:
        cfg = cfg.merged(_complete_weights(io.load_config(args.config)))
    keys = ("g", "K", "omega", "grid_points", "steps_per_period", "periods",
            "sample_stride", "w_minus1", "w_0", "phase", "output_dir")
    flags = {k: getattr(args, k) for k in keys}
    return cfg.merged(_complete_weights(flags))


def _complete_weights(values: dict) -> dict:
    """Giving one of the two mode weights implies the other."""
    w1, w0 = values.get("w_minus1"), values.get("w_0")
    if w1 is not None and w0 is None:
        values["w_0"] = 1.0 - float(w1)
    elif w0 is not None and w1 is None:
        values["w_minus1"] = 1.0 - float(w0)
    return values


def _objects(run: io.RunConfig):
    params = DriveParams(run.g, run.K, run.omega)
    numerics = NumericsConfig(run.grid_points, run.steps_per_period, run.periods,
                              run.sample_stride)
    state = make_two_mode_state(run.w_minus1, run.w_0, run.phase)
    return params, numerics, state


def _grid(args, default):
    start = default[0] if args.start is None else args.start
    stop = default[1] if args.stop is None else args.stop
    points = default[2] if args.points is None else args.points
    if points < 1:
        raise InvalidArgument("--points must be >= 1")
    return np.linspace(start, stop, points)


_SCAN_DEFAULTS = {"g": (0.0, 0.2, 21), "K": (0.0, 3.0, 31), "omega": (8.0, 12.0, 21)}


def _cmd_evolve(args, run, out):
    params, numerics, state = _objects(run)
    if args.command == "evolve-gp":
        traj = gp_evolve(state_to_field(state, numerics), params, numerics, n_max=1)
        pops = traj.mode_weights
        tag = "gp"
    else:
        traj = tmm_evolve(state, params, numerics)
        pops = traj.populations
        tag = "tmm"
    path = io.write_timeseries(out / f"evolve_{tag}.csv", traj.times, traj.currents, pops)
    if args.svg:
        io.write_svg(out / f"evolve_{tag}.svg", traj.times, [traj.currents],
                     ["I(t)"], f"current ({tag})", "t", "I")
    tac = analysis.time_averaged_current(traj.times, traj.currents)
    return (f"{args.command}: TAC={tac:.6f} I_min={traj.currents.min():.6f} "
            f"I_max={traj.currents.max():.6f} -> {path}")


def _cmd_lyapunov(args, run, out):
    params, numerics, state = _objects(run)
    eps0 = TangentVector.uniform(args.eps)
    if args.start is not None or args.stop is not None or args.points is not None:
        values = _grid(args, _SCAN_DEFAULTS["g"])
        if args.param != "g":
            raise InvalidArgument("the Lyapunov scan runs over g only")
        lam = analysis.lyapunov_scan(values, params, numerics, args.eps, state,
                                     args.method, args.workers)
        peak = values[int(np.nanargmax(lam))]
        ref = lam[int(np.argmin(np.abs(values - peak)))]
        ratio = lam / ref if ref else np.full_like(lam, np.nan)
        path = io.write_csv(out / "lyapunov_scan.csv", io.LYAPUNOV_SCAN_COLUMNS,
                            values, lam, ratio)
        if args.svg:
            io.write_svg(out / "lyapunov_scan.svg", values, [ratio], ["lambda/lambda_max"],
                         "Lyapunov exponent (normalised)", "g", "ratio")
        return f"lyapunov scan: argmax g={peak:.6g} lambda_max={np.nanmax(lam):.6e} -> {path}"
    _, rec = evolve_with_tangent(state, eps0, params, numerics)
    path = io.write_csv(out / "lyapunov.csv", io.LYAPUNOV_COLUMNS, rec.times, rec.log_ratio)
    if args.svg:
        io.write_svg(out / "lyapunov.svg", rec.times, [rec.log_ratio],
                     ["ln|dP(t)/dP(0)|"], "tangent growth", "t", "log ratio")
    lam = lyapunov_exponent(rec, args.method)
    return (f"lyapunov: lambda={lam:.6e} ({args.method}) lambda_endpoint="
            f"{rec.lambda_endpoint:.6e} final_log_ratio={rec.log_ratio[-1]:.4f} -> {path}")


def _cmd_instability(args, run, out):
    params, numerics, state = _objects(run)
    if args.start is None and args.stop is None and args.points is None:
        value = analysis.instability_fidelity(params, numerics, args.perturbation, state)
        path = io.write_csv(out / "instability.csv", io.INSTABILITY_COLUMNS,
                            [getattr(params, args.param)], [value])
        return f"instability: IF={value:.6e} -> {path}"
    values = _grid(args, (0.02, 0.2, 19))
    ifs = np.array([
        analysis.instability_fidelity(params.replace(**{args.param: float(v)}),
                                      numerics, args.perturbation, state)
        for v in values])
    path = io.write_csv(out / "instability.csv", io.INSTABILITY_COLUMNS, values, ifs)
    if args.svg:
        io.write_svg(out / "instability.svg", values, [ifs], ["IF"],
                     "instability fidelity", args.param, "IF")
    peak = values[int(np.argmax(ifs))]
    return f"instability: peak {args.param}={peak:.6g} IF_max={ifs.max():.6e} -> {path}"


def _cmd_sweep(args, run, out):
    params, numerics, state = _objects(run)
    values = _grid(args, _SCAN_DEFAULTS[args.param])
    res = analysis.sweep(args.param, values, params, numerics, args.engine, state,
                         args.workers)
    path = io.write_csv(out / "sweep.csv", io.SWEEP_COLUMNS, res.values, res.tac)
    if args.svg:
        io.write_svg(out / "sweep.svg", res.values, [res.tac], ["TAC"],
                     f"time-averaged current ({args.engine})", args.param, "TAC",
                     scatter=True)
    est = "none" if res.transition_estimate is None else f"{res.transition_estimate:.6g}"
    return f"sweep: {len(values)} points, transition {args.param}~{est} -> {path}"


def _cmd_transition(args, run, out):
    params, numerics, state = _objects(run)
    trace = []
    crit = analysis.find_transition(args.param, args.lo, args.hi, params, numerics,
                                    args.engine, args.tol, state, trace)
    trace.sort()
    path = io.write_csv(out / "transition.csv", io.SWEEP_COLUMNS,
                        [v for v, _ in trace], [t for _, t in trace])
    return f"transition: {args.param}_c={crit:.6g} ({len(trace)} probes) -> {path}"


def _cmd_portrait(args, run, out):
    params, numerics, state = _objects(run)
    portrait = analysis.phase_portrait(tmm_evolve(state, params, numerics))
    path = io.write_csv(out / "portrait.csv", io.PORTRAIT_COLUMNS,
                        portrait.currents, portrait.phase_diff)
    if args.svg:
        io.write_svg(out / "portrait.svg", portrait.phase_diff, [portrait.currents],
                     ["I"], "phase portrait", "arg A - arg B", "I", scatter=True)
    return (f"portrait: {len(portrait)} points ({portrait.omitted} omitted), I in "
            f"[{portrait.currents.min():.4f}, {portrait.currents.max():.4f}] -> {path}")


def _cmd_twin(args, run, out):
    params, numerics, state = _objects(run)
    a, b = twin_trajectory_divergence(state, args.delta, params, numerics)
    path = io.write_csv(out / "twin.csv", io.TWIN_COLUMNS, a.times, a.currents, b.currents)
    if args.svg:
        io.write_svg(out / "twin.svg", a.times, [a.currents, b.currents],
                     ["I", "I twin"], "twin trajectories", "t", "I")
    gap = float(np.max(np.abs(a.currents - b.currents)))
    return f"twin: max|I - I_twin|={gap:.6f} -> {path}"


_COMMANDS = {
    "evolve-gp": _cmd_evolve,
    "evolve-tmm": _cmd_evolve,
    "lyapunov": _cmd_lyapunov,
    "instability": _cmd_instability,
    "sweep": _cmd_sweep,
    "transition": _cmd_transition,
    "portrait": _cmd_portrait,
    "twin": _cmd_twin,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = _resolve(args)
        out = run.resolved_output_dir()
        out.mkdir(parents=True, exist_ok=True)
        summary = _COMMANDS[args.command](args, run, out)
    except InvalidArgument as exc:
        print(f"ringratchet {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (RingRatchetError, FloatingPointError) as exc:
        echo = " ".join(f"{k}={getattr(args, k)}" for k in ("g", "K", "omega")
                        if getattr(args, k, None) is not None)
        print(f"ringratchet {args.command}: runtime error: {exc} [{echo}]",
              file=sys.stderr)
        return 1
    print(summary)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
