"""Time-averaged currents, parameter sweeps, transition search, IF and portraits."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, InvalidArgument, RingRatchetError
from .gp import gp_evolve, propagate_batch
from .lyapunov import TangentVector, evolve_with_tangent, lyapunov_exponent
from .model import (DriveParams, NumericsConfig, ThreeModeState, ews_state,
                    state_to_field)
from .tmm import TmmTrajectory, tmm_evolve

PARAMETERS = ("g", "K", "omega")
ENGINES = ("gp", "tmm")

# |TAC| above this counts as the current-carrying branch (half of |I(0)| = 0.5).
BRANCH_THRESHOLD = 0.25
# Probes with |TAC| this close to the threshold are re-run on a longer horizon.
AMBIGUOUS_MARGIN = 0.1
LONG_HORIZON_FACTOR = 4


@dataclass(frozen=True, eq=False)
class SweepResult:
    parameter_name: str
    values: np.ndarray
    tac: np.ndarray
    transition_estimate: float | None = None


@dataclass(frozen=True)
class PortraitPoint:
    current: float
    phase_diff: float


@dataclass(frozen=True, eq=False)
class Portrait:
    currents: np.ndarray
    phase_diff: np.ndarray
    omitted: int

    @property
    def points(self) -> list[PortraitPoint]:
        return [PortraitPoint(float(i), float(p))
                for i, p in zip(self.currents, self.phase_diff)]

    def __len__(self):
        return len(self.currents)


def time_averaged_current(times, currents=None) -> float:
    """Trapezoidal mean of ``I(t)`` from the first to the last sample.

    Accepts ``(times, currents)`` arrays or any trajectory object exposing
    ``times`` and ``currents``.
    """
    if currents is None:
        times, currents = times.times, times.currents
    t = np.asarray(times, dtype=float)
    i = np.asarray(currents, dtype=float)
    if t.size < 2 or t.size != i.size:
        raise InvalidArgument("need at least two (time, current) samples")
    span = t[-1] - t[0]
    if not span > 0:
        raise InvalidArgument("time series must span a positive interval")
    return float(np.sum(0.5 * (i[1:] + i[:-1]) * np.diff(t)) / span)


def _check_parameter(name):
    if name not in PARAMETERS:
        raise InvalidArgument(f"parameter must be one of {PARAMETERS}, got {name!r}")


def _check_engine(engine):
    if engine not in ENGINES:
        raise InvalidArgument(f"engine must be one of {ENGINES}, got {engine!r}")


def run_currents(engine: str, initial: ThreeModeState, params: DriveParams,
                 cfg: NumericsConfig):
    """``(times, currents)`` from either engine starting at ``initial``."""
    _check_engine(engine)
    if engine == "tmm":
        traj = tmm_evolve(initial, params, cfg)
    else:
        traj = gp_evolve(state_to_field(initial, cfg), params, cfg, n_max=1)
    return traj.times, traj.currents


def tac_at(engine: str, params: DriveParams, cfg: NumericsConfig,
           initial: ThreeModeState | None = None) -> float:
    initial = ews_state() if initial is None else initial
    return time_averaged_current(*run_currents(engine, initial, params, cfg))


def _map(func, items, workers):
    if workers is None or workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def sweep(parameter_name: str, values, base: DriveParams, cfg: NumericsConfig,
          engine: str = "tmm", initial: ThreeModeState | None = None,
          workers: int = 1) -> SweepResult:
    """TAC for each value of one drive parameter, others held at ``base``."""
    _check_parameter(parameter_name)
    _check_engine(engine)
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise InvalidArgument("sweep grid is empty")
    if np.any(np.diff(values) <= 0):
        raise InvalidArgument("sweep grid must be strictly increasing")

    def one(v):
        try:
            return tac_at(engine, base.replace(**{parameter_name: float(v)}), cfg, initial)
        except RingRatchetError as exc:
            raise type(exc)(f"{exc} [at {parameter_name}={v}]") from exc

    tac = np.array(_map(one, values, workers))
    on = np.abs(tac) > BRANCH_THRESHOLD
    estimate = None
    flips = np.nonzero(on[1:] != on[:-1])[0]
    if flips.size:
        k = flips[0]
        estimate = float(0.5 * (values[k] + values[k + 1]))
    return SweepResult(parameter_name, values, tac, estimate)


def classify(parameter_name: str, value: float, base: DriveParams,
             cfg: NumericsConfig, engine: str = "tmm", long: bool = False,
             initial: ThreeModeState | None = None):
    """``(carries_current, tac)`` at one parameter value.

    A TAC within ``AMBIGUOUS_MARGIN`` of the threshold is recomputed with
    ``LONG_HORIZON_FACTOR`` times the horizon, since the exchange period
    grows without bound at the transition.
    """
    params = base.replace(**{parameter_name: float(value)})
    if long:
        cfg = cfg.replace(horizon_periods=cfg.horizon_periods * LONG_HORIZON_FACTOR)
    tac = tac_at(engine, params, cfg, initial)
    if not long and abs(abs(tac) - BRANCH_THRESHOLD) < AMBIGUOUS_MARGIN:
        return classify(parameter_name, value, base, cfg, engine, True, initial)
    return abs(tac) > BRANCH_THRESHOLD, tac


def find_transition(parameter_name: str, lo: float, hi: float, base: DriveParams,
                    cfg: NumericsConfig, engine: str = "tmm", tol: float = 1e-3,
                    initial: ThreeModeState | None = None, trace: list | None = None
                    ) -> float:
    """Bisect on the zero / current branch classifier.

    Once the bracket is narrower than eight tolerances every probe uses the
    long horizon. ``trace`` (if given) collects ``(value, tac)`` probes.
    """
    _check_parameter(parameter_name)
    _check_engine(engine)
    if not (lo < hi and tol > 0):
        raise InvalidArgument(f"need lo < hi and tol > 0, got {lo}, {hi}, {tol}")
    side_lo, tac_lo = classify(parameter_name, lo, base, cfg, engine, initial=initial)
    side_hi, tac_hi = classify(parameter_name, hi, base, cfg, engine, initial=initial)
    if trace is not None:
        trace.extend([(lo, tac_lo), (hi, tac_hi)])
    if side_lo == side_hi:
        raise BracketError(
            f"{parameter_name}={lo} and {parameter_name}={hi} fall on the same branch "
            f"(TAC {tac_lo:.3f}, {tac_hi:.3f})")
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        narrow = (hi - lo) < 8 * tol
        side, tac = classify(parameter_name, mid, base, cfg, engine, long=narrow,
                             initial=initial)
        if trace is not None:
            trace.append((mid, tac))
        if side == side_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def perturb_zero_mode(state: ThreeModeState, size: float) -> ThreeModeState:
    """Scale the n = 0 amplitude by ``1 + size`` and renormalise."""
    return ThreeModeState(state.A, state.B * (1.0 + size), state.C).normalized()


def fidelity_trace(params: DriveParams, cfg: NumericsConfig,
                   perturbation_size: float = 1e-5,
                   initial: ThreeModeState | None = None):
    """``(times, overlap)`` between the EWS run and its perturbed twin."""
    if not 0 < perturbation_size <= 1e-2:
        raise InvalidArgument(
            f"perturbation_size must be in (0, 1e-2], got {perturbation_size!r}")
    base = ews_state() if initial is None else initial
    twin = perturb_zero_mode(base, perturbation_size)
    ck = np.stack([np.fft.fft(state_to_field(s, cfg).samples) for s in (base, twin)])
    dt = cfg.dt(params)
    _, _, _, overlaps = propagate_batch(ck, params, dt, 0.0, cfg.total_steps,
                                        cfg.sample_stride, 0)
    times = dt * cfg.sample_stride * np.arange(overlaps.shape[0])
    return times, overlaps[:, 1]


def instability_fidelity(params: DriveParams, cfg: NumericsConfig,
                         perturbation_size: float = 1e-5,
                         initial: ThreeModeState | None = None) -> float:
    """``1 - min_t |<psi(t)|psi~(t)>|`` for GP runs from nearby initial states."""
    _, overlap = fidelity_trace(params, cfg, perturbation_size, initial)
    return float(min(1.0, max(0.0, 1.0 - overlap.min())))


def instability_scan(values, base: DriveParams, cfg: NumericsConfig,
                     perturbation_size: float = 1e-5, parameter_name: str = "g",
                     workers: int = 1) -> np.ndarray:
    _check_parameter(parameter_name)
    return np.array(_map(
        lambda v: instability_fidelity(base.replace(**{parameter_name: float(v)}),
                                       cfg, perturbation_size),
        list(values), workers))


def phase_portrait(traj: TmmTrajectory) -> Portrait:
    """Current vs arg A - arg B; samples with an undefined phase are dropped."""
    keep = traj.phase_defined
    return Portrait(traj.currents[keep], traj.phase_diff[keep],
                    int(keep.size - keep.sum()))


def lyapunov_scan(values, base: DriveParams, cfg: NumericsConfig,
                  eps_size: float = 1e-20, initial: ThreeModeState | None = None,
                  method: str = "slope", workers: int = 1) -> np.ndarray:
    """Lyapunov exponent estimate for each ``g`` in ``values``."""
    initial = ews_state() if initial is None else initial
    eps0 = TangentVector.uniform(eps_size)

    def one(g):
        _, rec = evolve_with_tangent(initial, eps0, base.replace(g=float(g)), cfg)
        return lyapunov_exponent(rec, method)

    return np.array(_map(one, list(values), workers))


def argmax_within(values, scores, target, steps=1) -> bool:
    """Whether ``argmax(scores)`` lies within ``steps`` grid steps of ``target``."""
    values = np.asarray(values, dtype=float)
    spacing = float(np.min(np.diff(values))) if values.size > 1 else math.inf
    best = values[int(np.nanargmax(scores))]
    return abs(best - target) <= steps * spacing + 1e-12
