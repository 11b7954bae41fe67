"""Opinion-accumulation reaction-diffusion model: analytic ladders and 1-D simulation."""

from .model import (AT_LEAST_CAP, FieldState, FrontTrace, Grid1D, H1Report, ModelParams,
                    OpinionParams, PropagationSequences, ValidationReport, check_h1,
                    validate_params)
from .sequences import (SweepTable, asymptotic_ratio, big_phi, bracket_n_star,
                        build_sequences, monotonicity_scan, reproduction_number,
                        solve_next_plateau, sweep_s0, u_sequence, wave_speed)
from .solver import BumpSpec, SolverConfig, cfl_dt, initial_state, run, step
from .frontlab import (PlateauReading, SpeedEstimate, estimate_speed, front_position,
                       plateau_value, track_fronts, vanishing_check)

__version__ = "0.1.0"
