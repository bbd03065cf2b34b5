"""Volatile memristor models and memristive reservoir computing."""

from .bank import (BankSpec, DesignMatrix, build_bank, design_matrix_buffered,
                   design_matrix_timeseries, numerical_rank, simulate_bank)
from .devices import (MemristorParams, Trajectory, WienerParams, closed_form_nonvolatile,
                      closed_form_volatile_nonlinear, integrate_volatile_nonlinear,
                      integrate_wiener_volatile, memristance_piecewise, memristance_wiener,
                      voltage_trace)
from .harmonics import (HarmonicCoeffs, SteadyState, convergence_pole_time, delay_phase,
                        empirical_harmonics, first_order_state_response,
                        first_order_wiener_state, harmonic_coeffs, steady_state_mean,
                        wiener_equivalent_params)
from .readout import (ReadoutModel, classify_z3, correlation_coefficient, predict,
                      random_truncated_matrix, ridge_fit)
from .signals import Signal, random_fourier_signal, sinusoid_with_mean, z3_encoding

__version__ = "0.1.0"
