"""Split-step spectral solver for the driven Gross-Pitaevskii equation on a ring.

The time step is symmetric (Strang): half a kinetic step in momentum
space, the full nonlinear + drive phase in position space with the drive
taken at the step midpoint, then the second kinetic half step. Each factor
is a pure phase, so the norm is conserved to round-off.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import InvalidArgument, NumericalBlowup
from .model import (SQRT_TWO_PI, DriveParams, NumericsConfig, ThreeModeState,
                    WaveField, grid)


@dataclass(frozen=True, eq=False)
class GpTrajectory:
    times: np.ndarray
    currents: np.ndarray
    mode_weights: np.ndarray  # (samples, 2*n_max + 1), n = -n_max .. n_max
    norms: np.ndarray
    n_max: int
    final_field: WaveField

    def population(self, n: int) -> np.ndarray:
        if abs(n) > self.n_max:
            raise InvalidArgument(f"mode {n} outside recorded range +-{self.n_max}")
        return self.mode_weights[:, n + self.n_max]

    def outside_weight(self, keep=(-1, 0, 1)) -> np.ndarray:
        """Population outside the listed modes, from the full-spectrum norm."""
        inside = sum(self.population(n) for n in keep)
        return self.norms - inside


@lru_cache(maxsize=None)
def _grid_tables(n: int):
    rev, tw = kernels.fft_plan(n)
    wavenumber = np.fft.fftfreq(n, d=1.0 / n)
    x_sin = np.sin(grid(n))
    for arr in (rev, tw, wavenumber, x_sin):
        arr.setflags(write=False)
    return rev, tw, wavenumber, x_sin


@lru_cache(maxsize=32)
def _kinetic_step(n: int, dt: float) -> np.ndarray:
    """``exp(-i k^2 dt / 4) - 1`` without cancellation."""
    theta = -0.25 * _grid_tables(n)[2] ** 2 * dt
    out = -2.0 * np.sin(0.5 * theta) ** 2 + 1j * np.sin(theta)
    out.setflags(write=False)
    return out


def wavenumbers(n: int) -> np.ndarray:
    """Integer wavenumbers in FFT order ``0, 1, ..., N/2-1, -N/2, ..., -1``."""
    return _grid_tables(n)[2]


def coefficients(field: WaveField) -> np.ndarray:
    """Momentum amplitudes ``c_n`` in FFT order, basis ``exp(inx)/sqrt(2pi)``."""
    return np.fft.fft(field.samples) * (SQRT_TWO_PI / field.grid_points)


def propagate_batch(ck: np.ndarray, params: DriveParams, dt: float, t0: float,
                    nsteps: int, stride: int, n_max: int):
    """Run the kernel on a ``(members, N)`` batch of raw FFT coefficients.

    ``ck`` is modified in place. Returns ``(currents, weights, norms,
    overlaps)`` with one row per sample.
    """
    members, n = ck.shape
    if not 0 <= n_max < n // 2:
        raise InvalidArgument(f"n_max must be in [0, {n // 2 - 1}], got {n_max}")
    rev, tw, wavenumber, x_sin = _grid_tables(n)
    rows = nsteps // stride + 1
    currents = np.empty((rows, members))
    weights = np.empty((rows, members, 2 * n_max + 1))
    norms = np.empty((rows, members))
    overlaps = np.empty((rows, members))
    status = kernels.gp_propagate(
        ck, x_sin, wavenumber, _kinetic_step(n, float(dt)), float(params.g), float(params.K),
        float(params.omega), float(t0), float(dt), int(nsteps), int(stride),
        int(n_max), rev, tw, currents, weights, norms, overlaps)
    if status >= 0:
        raise NumericalBlowup(
            "non-finite wavefunction in split-step propagation",
            step=int(status), time=t0 + status * dt,
            context={"g": params.g, "K": params.K, "omega": params.omega})
    return currents, weights, norms, overlaps


def gp_step(field: WaveField, t: float, dt: float, params: DriveParams) -> WaveField:
    """One Strang step from time ``t`` to ``t + dt``."""
    if not dt > 0:
        raise InvalidArgument(f"dt must be > 0, got {dt}")
    if not np.all(np.isfinite(field.samples)):
        raise NumericalBlowup("non-finite input field", step=0, time=t)
    ck = np.fft.fft(field.samples)[None, :]
    propagate_batch(ck, params, dt, t, 1, 1, 0)
    return WaveField(np.fft.ifft(ck[0]), t + dt)


def gp_evolve(initial: WaveField, params: DriveParams, cfg: NumericsConfig,
              n_max: int = 2) -> GpTrajectory:
    """Integrate for ``cfg.horizon_periods`` drive periods from ``initial``."""
    if initial.grid_points != cfg.grid_points:
        raise InvalidArgument(
            f"field has {initial.grid_points} points, config expects {cfg.grid_points}")
    dt = cfg.dt(params)
    nsteps = cfg.total_steps
    t0 = initial.current_time
    ck = np.fft.fft(initial.samples)[None, :].copy()
    cur, w, norms, _ = propagate_batch(ck, params, dt, t0, nsteps,
                                       cfg.sample_stride, n_max)
    times = t0 + dt * cfg.sample_stride * np.arange(cur.shape[0])
    final = WaveField(np.fft.ifft(ck[0]), t0 + nsteps * dt)
    return GpTrajectory(times, cur[:, 0], w[:, 0, :], norms[:, 0], n_max, final)


def current(field: WaveField) -> float:
    """Momentum expectation ``sum_n n |c_n|^2`` (Nyquist mode excluded)."""
    n = field.grid_points
    c = coefficients(field)
    k = wavenumbers(n).copy()
    k[n // 2] = 0.0
    return float(np.sum(k * np.abs(c) ** 2))


def mode_populations(field: WaveField, n_max: int) -> np.ndarray:
    """``|c_n|^2`` for ``n = -n_max .. n_max``."""
    n = field.grid_points
    if not 0 <= n_max < n // 2:
        raise InvalidArgument(f"n_max must be in [0, {n // 2 - 1}], got {n_max}")
    c = coefficients(field)
    return np.abs(c[np.arange(-n_max, n_max + 1)]) ** 2


def field_to_state(field: WaveField) -> ThreeModeState:
    """Project onto modes -1, 0, +1."""
    c = coefficients(field)
    return ThreeModeState(complex(c[-1]), complex(c[0]), complex(c[1]))


def fidelity_overlap(a: WaveField, b: WaveField) -> float:
    """``|integral conj(a) b dx|``."""
    if a.grid_points != b.grid_points:
        raise InvalidArgument(
            f"grid mismatch: {a.grid_points} vs {b.grid_points} points")
    return float(abs(np.vdot(a.samples, b.samples)) * a.dx)


def gp_energy(field: WaveField, params: DriveParams, t: float | None = None) -> float:
    """Mean-field energy ``integral [|psi'|^2/2 + g|psi|^4/2] dx``.

    With ``t`` given, the drive energy ``integral V(x, t) |psi|^2 dx`` is added.
    """
    n = field.grid_points
    c = coefficients(field)
    k = wavenumbers(n).copy()
    k[n // 2] = 0.0
    kinetic = 0.5 * np.sum(k * k * np.abs(c) ** 2)
    dens = np.abs(field.samples) ** 2
    energy = kinetic + 0.5 * params.g * field.dx * np.sum(dens * dens)
    if t is not None:
        energy += field.dx * np.sum(
            params.K * np.sin(params.omega * t) * _grid_tables(n)[3] * dens)
    return float(energy)
