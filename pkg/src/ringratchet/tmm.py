"""Three-mode truncation: modes n = -1, 0, +1 with amplitudes A, B, C."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NumericalBlowup
from .model import DriveParams, NumericsConfig, ThreeModeState

# |A| or |B| below this leaves arg(A) - arg(B) undefined.
PHASE_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class TmmTrajectory:
    times: np.ndarray
    amplitudes: np.ndarray  # (samples, 3) complex: A, B, C

    @property
    def states(self) -> list[ThreeModeState]:
        return [ThreeModeState.from_array(row) for row in self.amplitudes]

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def currents(self) -> np.ndarray:
        p = self.populations
        return p[:, 2] - p[:, 0]

    @property
    def norms(self) -> np.ndarray:
        return self.populations.sum(axis=1)

    @property
    def phase_defined(self) -> np.ndarray:
        a = np.abs(self.amplitudes)
        return (a[:, 0] >= PHASE_FLOOR) & (a[:, 1] >= PHASE_FLOOR)

    @property
    def phase_diff(self) -> np.ndarray:
        """arg A - arg B wrapped to (-pi, pi]; NaN where undefined."""
        d = np.angle(self.amplitudes[:, 0]) - np.angle(self.amplitudes[:, 1])
        d = -np.remainder(-d + np.pi, 2 * np.pi) + np.pi
        return np.where(self.phase_defined, d, np.nan)

    @property
    def final_state(self) -> ThreeModeState:
        return ThreeModeState.from_array(self.amplitudes[-1])


def tmm_rhs(state: ThreeModeState, t: float, params: DriveParams):
    return kernels.tmm_derivs(complex(state.A), complex(state.B), complex(state.C),
                              float(t), float(params.g), float(params.K),
                              float(params.omega))


def tmm_evolve(initial: ThreeModeState, params: DriveParams, cfg: NumericsConfig,
               t0: float = 0.0) -> TmmTrajectory:
    """Fixed-step RK4 over ``cfg.horizon_periods`` drive periods."""
    dt = cfg.dt(params)
    nsteps = cfg.total_steps
    stride = cfg.sample_stride
    out = np.empty((nsteps // stride + 1, 3), dtype=np.complex128)
    status = kernels.tmm_propagate(
        complex(initial.A), complex(initial.B), complex(initial.C),
        float(params.g), float(params.K), float(params.omega),
        float(t0), dt, nsteps, stride, out)
    if status >= 0:
        raise NumericalBlowup(
            "non-finite three-mode amplitudes", step=int(status),
            time=t0 + status * dt,
            context={"g": params.g, "K": params.K, "omega": params.omega})
    times = t0 + dt * stride * np.arange(out.shape[0])
    return TmmTrajectory(times, out)


def tmm_current(state: ThreeModeState) -> float:
    return abs(state.C) ** 2 - abs(state.A) ** 2


def effective_energy(state: ThreeModeState, t: float, params: DriveParams) -> float:
    """Mean-field energy of the three-mode ansatz at time ``t``.

    With ``d1 = conj(A) B + conj(B) C`` (the first harmonic of the density):
    kinetic ``(|A|^2 + |C|^2)/2``, interaction
    ``g/(4 pi) [S^2 + 2|d1|^2 + 2|A|^2 |C|^2]`` and drive
    ``-K sin(omega t) Im d1``.
    """
    A, B, C = state.A, state.B, state.C
    a2, b2, c2 = abs(A) ** 2, abs(B) ** 2, abs(C) ** 2
    s = a2 + b2 + c2
    d1 = A.conjugate() * B + B.conjugate() * C
    kinetic = 0.5 * (a2 + c2)
    interaction = params.g / (4 * math.pi) * (s * s + 2 * abs(d1) ** 2 + 2 * a2 * c2)
    drive = -params.K * math.sin(params.omega * t) * d1.imag
    return kinetic + interaction + drive
