"""Driven Bose-Einstein condensate on a ring: spectral GP solver, three-mode
model, tangent-space chaos diagnostics and ratchet-current analysis."""
from ._jit import backend
from .analysis import (Portrait, PortraitPoint, SweepResult, find_transition,
                       instability_fidelity, phase_portrait, sweep,
                       time_averaged_current)
from .errors import BracketError, InvalidArgument, NumericalBlowup
from .gp import (GpTrajectory, current, fidelity_overlap, field_to_state,
                 gp_energy, gp_evolve, gp_step, mode_populations)
from .lyapunov import (LyapunovRecord, TangentVector, evolve_with_tangent,
                       lyapunov_exponent, tangent_rhs, twin_trajectory_divergence)
from .model import (DriveParams, NumericsConfig, ThreeModeState, WaveField,
                    drive_potential, ews_state, make_two_mode_state,
                    state_to_field, uews_state)
from .tmm import (TmmTrajectory, effective_energy, tmm_current, tmm_evolve,
                  tmm_rhs)

__version__ = "0.1.0"
