"""Tangent-space growth of perturbations along three-mode trajectories.

The readout is the change of the n = -1 population,
``dP(t) = |A + dA|^2 - |A|^2``, evaluated as ``2 Re(conj(A) dA) + |dA|^2``.
The two forms are algebraically identical; the second avoids the total
cancellation the first suffers in floating point when ``|dA| ~ 1e-20``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidArgument, NumericalBlowup
from .model import DriveParams, NumericsConfig, ThreeModeState
from .tmm import TmmTrajectory, tmm_evolve

# Fraction of the record (from the end) used by the slope estimator.
SLOPE_WINDOW = 0.8
_RATIO_FLOOR = 1e2 * np.finfo(float).tiny


@dataclass(frozen=True)
class TangentVector:
    dA: complex
    dB: complex
    dC: complex

    def __post_init__(self):
        for name in ("dA", "dB", "dC"):
            z = complex(getattr(self, name))
            if not (np.isfinite(z.real) and np.isfinite(z.imag)):
                raise InvalidArgument(f"{name} must be finite, got {z!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.dA, self.dB, self.dC], dtype=np.complex128)

    @classmethod
    def uniform(cls, size: float) -> "TangentVector":
        return cls(complex(size), complex(size), complex(size))


@dataclass(frozen=True, eq=False)
class LyapunovRecord:
    times: np.ndarray
    log_ratio: np.ndarray
    lambda_endpoint: float
    lambda_slope: float
    delta_p: np.ndarray
    tangent: np.ndarray  # (samples, 3) complex


def population_deviation(A, dA):
    """``|A + dA|^2 - |A|^2`` without cancellation; broadcasts."""
    A = np.asarray(A)
    dA = np.asarray(dA)
    return 2.0 * np.real(np.conj(A) * dA) + np.abs(dA) ** 2


def tangent_rhs(state: ThreeModeState, eps: TangentVector, t: float,
                params: DriveParams) -> TangentVector:
    da, db, dc = kernels.tangent_derivs(
        complex(state.A), complex(state.B), complex(state.C),
        complex(eps.dA), complex(eps.dB), complex(eps.dC), float(t),
        float(params.g), float(params.K), float(params.omega))
    return TangentVector(da, db, dc)


def _slope(times, log_ratio, delta_p, delta0):
    start = int(len(times) * (1.0 - SLOPE_WINDOW))
    t = times[start:]
    y = log_ratio[start:]
    ok = np.abs(delta_p[start:] / delta0) > _RATIO_FLOOR
    ok &= np.isfinite(y)
    if ok.sum() < 2:
        return float("nan")
    t = t[ok]
    y = y[ok]
    tm = t.mean()
    return float(np.sum((t - tm) * (y - y.mean())) / np.sum((t - tm) ** 2))


def make_record(times, delta_p, tangent=None, log_scale=None) -> LyapunovRecord:
    """Build a record from a ``dP`` time series (``times[0]`` is the reference)."""
    times = np.asarray(times, dtype=float)
    delta_p = np.asarray(delta_p, dtype=float)
    delta0 = delta_p[0]
    if delta0 == 0:
        raise InvalidArgument("dP_-1(0) is zero; choose a perturbation that "
                              "changes the n=-1 population")
    with np.errstate(divide="ignore"):
        log_ratio = np.log(np.abs(delta_p / delta0))
    if log_scale is not None:
        log_ratio = log_ratio + log_scale
    log_ratio[0] = 0.0
    endpoint = float(log_ratio[-1] / (times[-1] - times[0])) if times[-1] > times[0] else float("nan")
    slope = _slope(times, log_ratio, delta_p, delta0)
    if tangent is None:
        tangent = np.empty((0, 3), dtype=np.complex128)
    return LyapunovRecord(times, log_ratio, endpoint, slope, delta_p, tangent)


def evolve_with_tangent(initial: ThreeModeState, eps0: TangentVector,
                        params: DriveParams, cfg: NumericsConfig,
                        t0: float = 0.0):
    """Co-integrate the amplitudes and the perturbation ``eps0``.

    Returns ``(TmmTrajectory, LyapunovRecord)``.
    """
    delta0 = population_deviation(initial.A, eps0.dA)
    if delta0 == 0:
        raise InvalidArgument(
            "eps0 leaves the n=-1 population unchanged at t=0 (dP_-1(0) = 0); "
            "choose a perturbation with Re(conj(A) dA) != 0")
    dt = cfg.dt(params)
    nsteps = cfg.total_steps
    stride = cfg.sample_stride
    rows = nsteps // stride + 1
    states = np.empty((rows, 3), dtype=np.complex128)
    tangent = np.empty((rows, 3), dtype=np.complex128)
    logscale = np.empty(rows)
    status = kernels.tangent_propagate(
        complex(initial.A), complex(initial.B), complex(initial.C),
        complex(eps0.dA), complex(eps0.dB), complex(eps0.dC),
        float(params.g), float(params.K), float(params.omega),
        float(t0), dt, nsteps, stride, states, tangent, logscale)
    if status >= 0:
        raise NumericalBlowup(
            "non-finite state or tangent vector", step=int(status),
            time=t0 + status * dt,
            context={"g": params.g, "K": params.K, "omega": params.omega})
    times = t0 + dt * stride * np.arange(rows)
    delta_p = population_deviation(states[:, 0], tangent[:, 0])
    rescaled = bool(np.any(logscale))
    record = make_record(times, delta_p, tangent, logscale if rescaled else None)
    return TmmTrajectory(times, states), record


def lyapunov_exponent(record: LyapunovRecord, method: str = "slope") -> float:
    if len(record.times) == 0 or record.times[-1] <= record.times[0]:
        raise InvalidArgument("record must span a positive time interval")
    if method == "endpoint":
        return record.lambda_endpoint
    if method == "slope":
        return record.lambda_slope
    raise InvalidArgument(f"method must be 'endpoint' or 'slope', got {method!r}")


def twin_trajectory_divergence(initial: ThreeModeState, delta: float,
                               params: DriveParams, cfg: NumericsConfig):
    """Evolve ``initial`` and ``initial + (delta, delta, delta)`` (renormalised)."""
    if not delta > 0:
        raise InvalidArgument(f"delta must be > 0, got {delta}")
    shifted = ThreeModeState(initial.A + delta, initial.B + delta,
                             initial.C + delta).normalized()
    return tmm_evolve(initial, params, cfg), tmm_evolve(shifted, params, cfg)


def max_current_gap(pair) -> float:
    a, b = pair
    return float(np.max(np.abs(a.currents - b.currents)))

