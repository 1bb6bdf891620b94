"""Dipolar relaxation in magnetically trapped spin-polarized gases.

Predicts the Born spin-flip cross sections and thermally averaged two-body
rate coefficients of a dipolar gas held in its stretched Zeeman state,
simulates the resulting trap loss and heating, and recovers rate constants
from measured (or synthetic) time series.
"""

from .cross_sections import (CollisionKinematics, CrossSectionSet,
                             coupling_prefactor, cross_sections, exchange_ratio,
                             kinematics_from_energy, kinematics_from_wavevector,
                             wavevector_ratio)
from .dynamics import (CloudState, CloudTrajectory, EvolutionMode, RfShieldReport,
                       TrapConfig, analytic_two_body_decay, cloud_volume, evolve,
                       gaussian_widths, mean_volume, rf_shield_check)
from .errors import (ConfigError, DegenerateFitError, DipRelaxError, InputError,
                     InsufficientDataError, NumericalError, UnknownUnitError,
                     UnsupportedStatisticsError)
from .fitting import (FitResult, TimeSeries, fit_beta2, fit_method_i,
                      fit_method_ii, fit_method_iii, nonlinear_least_squares)
from .io import RunConfig, parse_config, parse_timeseries_csv
from .kernels import BACKEND
from .rates import (RateCoefficients, ThermalConditions, beta_elastic_dd_rate,
                    beta_event_rate, beta_loss_rate, mc_thermal_average,
                    mean_relative_speed, rate_coefficients, thermal_average)
from .species import (CHANNELS, SPECIES, RelaxationChannel, SpeciesConfig,
                      get_species, released_energy, temperature_step,
                      zeeman_splitting)
from .units import CONSTANTS, PhysicalConstants, Quantity, from_si, to_si

__version__ = "0.1.0"
