"""Domain types shared by the spectral and three-mode solvers.

Everything is dimensionless with hbar = 1. The ring coordinate ``x`` lives
in ``[0, 2*pi)`` and momentum eigenstates are ``exp(i*n*x) / sqrt(2*pi)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


def _finite_nonneg(name, value):
    if not math.isfinite(value) or value < 0:
        raise InvalidArgument(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class DriveParams:
    """Nonlinearity ``g``, drive amplitude ``K`` and drive frequency ``omega``."""

    g: float = 0.1
    K: float = 2.0
    omega: float = 10.0

    def __post_init__(self):
        _finite_nonneg("g", self.g)
        _finite_nonneg("K", self.K)
        if not math.isfinite(self.omega) or self.omega <= 0:
            raise InvalidArgument(f"omega must be finite and > 0, got {self.omega!r}")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def replace(self, **changes) -> "DriveParams":
        values = {"g": self.g, "K": self.K, "omega": self.omega}
        values.update(changes)
        return DriveParams(**values)


@dataclass(frozen=True)
class NumericsConfig:
    grid_points: int = 256
    steps_per_period: int = 1000
    horizon_periods: int = 2000
    sample_stride: int = 10

    def __post_init__(self):
        n = self.grid_points
        if not isinstance(n, (int, np.integer)) or n < 16 or n & (n - 1):
            raise InvalidArgument(f"grid_points must be a power of two >= 16, got {n!r}")
        if self.steps_per_period < 100:
            raise InvalidArgument(
                f"steps_per_period must be >= 100, got {self.steps_per_period!r}")
        if self.horizon_periods < 1:
            raise InvalidArgument(
                f"horizon_periods must be >= 1, got {self.horizon_periods!r}")
        if self.sample_stride < 1:
            raise InvalidArgument(
                f"sample_stride must be >= 1, got {self.sample_stride!r}")

    @property
    def total_steps(self) -> int:
        return self.horizon_periods * self.steps_per_period

    def dt(self, params: DriveParams) -> float:
        return params.period / self.steps_per_period

    def replace(self, **changes) -> "NumericsConfig":
        values = {
            "grid_points": self.grid_points,
            "steps_per_period": self.steps_per_period,
            "horizon_periods": self.horizon_periods,
            "sample_stride": self.sample_stride,
        }
        values.update(changes)
        return NumericsConfig(**values)


@dataclass(frozen=True)
class ThreeModeState:
    """Amplitudes of the momentum modes n = -1 (A), 0 (B) and +1 (C)."""

    A: complex
    B: complex
    C: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C], dtype=np.complex128)

    @classmethod
    def from_array(cls, arr) -> "ThreeModeState":
        a, b, c = (complex(v) for v in arr)
        return cls(a, b, c)

    @property
    def norm(self) -> float:
        return abs(self.A) ** 2 + abs(self.B) ** 2 + abs(self.C) ** 2

    def normalized(self) -> "ThreeModeState":
        s = math.sqrt(self.norm)
        if s == 0:
            raise InvalidArgument("cannot normalise the zero state")
        return ThreeModeState(self.A / s, self.B / s, self.C / s)


@dataclass(frozen=True, eq=False)
class WaveField:
    """Samples ``psi(x_j)`` on ``x_j = 2*pi*j/N`` plus the time they refer to."""

    samples: np.ndarray
    current_time: float = 0.0

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.complex128)
        n = arr.shape[0] if arr.ndim == 1 else -1
        if n < 2 or n & (n - 1):
            raise InvalidArgument(
                f"WaveField needs a 1-d power-of-two grid, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def grid_points(self) -> int:
        return self.samples.shape[0]

    @property
    def dx(self) -> float:
        return 2.0 * math.pi / self.grid_points

    @property
    def norm(self) -> float:
        return float(self.dx * np.sum(np.abs(self.samples) ** 2))


def grid(grid_points: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(grid_points) / grid_points


def make_two_mode_state(w_minus1: float, w_0: float,
                        relative_phase: float = 0.0) -> ThreeModeState:
    """Superpose modes -1 and 0 with population weights summing to one.

    The phase multiplies the n = -1 amplitude.
    """
    if w_minus1 < 0 or w_0 < 0:
        raise InvalidArgument(f"weights must be >= 0, got ({w_minus1}, {w_0})")
    if abs(w_minus1 + w_0 - 1.0) > 1e-12:
        raise InvalidArgument(f"weights must sum to 1, got {w_minus1 + w_0!r}")
    a = math.sqrt(w_minus1) * complex(math.cos(relative_phase), math.sin(relative_phase))
    return ThreeModeState(a, complex(math.sqrt(w_0)), 0j)


def ews_state() -> ThreeModeState:
    """Equal-weight superposition A = B = 1/sqrt(2), C = 0."""
    return make_two_mode_state(0.5, 0.5)


def uews_state() -> ThreeModeState:
    """Unequal-weight superposition A = sqrt(0.7), B = sqrt(0.3), C = 0."""
    return make_two_mode_state(0.7, 0.3)


def state_to_field(state: ThreeModeState, cfg: NumericsConfig | int,
                   time: float = 0.0) -> WaveField:
    n = cfg if isinstance(cfg, (int, np.integer)) else cfg.grid_points
    x = grid(n)
    psi = (state.A * np.exp(-1j * x) + state.B + state.C * np.exp(1j * x)) / SQRT_TWO_PI
    return WaveField(psi, time)


def drive_potential(x, t, params: DriveParams):
    """``K sin(omega t) sin(x)``; broadcasts over array ``x`` and ``t``."""
    return params.K * np.sin(params.omega * np.asarray(t)) * np.sin(x)
