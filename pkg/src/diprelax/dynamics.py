"""Trapped-cloud evolution under dipolar relaxation.

Two evolution modes mirror the two ways the experiment is run:

* ``rf_shield`` - an rf knife ejects every relaxation product, so relaxation
  is a true loss channel: dN3/dt = -gamma_bg N3 - beta_event N3^2 / V, at
  constant temperature (the energetic products never thermalize).
* ``free_evolution`` - products stay trapped: the stretched state feeds the
  next sublevel down, the released Zeeman energy heats the cloud,
  dN3/dt = -gamma_bg N3 - beta_loss N3^2 / V,
  dN2/dt = +beta_loss N3^2 / V - beta2 N2^2 / V2,
  dT/dt = beta_loss (N3 / V) dT_step,
  with V recomputed from T at every step (V ~ T^(3/2) in a harmonic trap)
  and V2 = (3/2)^(3/2) V the volume of the thermalized next-lower cloud.

N1 is bookkept by conservation: the total trapped number decays only through
background collisions.  beta2 lumps every two-body process of the
next-lower sublevel (its own dipolar relaxation plus spin exchange) and is an
input parameter, not derived from the cross sections.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InputError, NumericalError
from .rates import RateCoefficients, ThermalConditions, beta_event_rate, beta_loss_rate
from .species import SpeciesConfig, temperature_step, zeeman_splitting
from .units import CONSTANTS

#: V2 / V for the thermalized cloud one sublevel down (trap stiffness ratio 2/3).
M2_VOLUME_RATIO = (3.0 / 2.0) ** 1.5

_VOLUME_PREFACTOR = math.sqrt(8.0) * (2.0 * math.pi) ** 1.5


class EvolutionMode(str, enum.Enum):
    RF_SHIELD = "rf_shield"
    FREE_EVOLUTION = "free_evolution"


@dataclass(frozen=True)
class TrapConfig:
    """Harmonic trap frequencies, offset field and background loss rate."""

    freq_x: float           # Hz
    freq_y: float           # Hz
    freq_z: float           # Hz
    offset_field: float     # T
    background_rate: float  # 1/s

    def __post_init__(self):
        for name in ("freq_x", "freq_y", "freq_z"):
            if not getattr(self, name) > 0.0:
                raise InputError(f"{name} must be > 0")
        if self.offset_field < 0.0:
            raise InputError("offset_field must be >= 0")
        if self.background_rate < 0.0:
            raise InputError("background_rate must be >= 0")

    @property
    def frequencies(self) -> tuple[float, float, float]:
        return (self.freq_x, self.freq_y, self.freq_z)


@dataclass(frozen=True)
class CloudState:
    """Sublevel populations, temperature and time stamp of the cloud."""

    n3: float
    n2: float
    n1: float
    temperature: float  # K
    time: float         # s

    def __post_init__(self):
        if min(self.n3, self.n2, self.n1) < 0.0:
            raise InputError("populations must be >= 0")
        if not self.temperature > 0.0:
            raise InputError("temperature must be > 0")

    @property
    def n_total(self) -> float:
        return self.n3 + self.n2 + self.n1


def gaussian_widths(temperature: float, trap: TrapConfig,
                    species: SpeciesConfig) -> tuple[float, float, float]:
    """1/sqrt(e) widths of the thermal Gaussian cloud along the trap axes, m."""
    if not temperature > 0.0:
        raise InputError(f"temperature must be > 0, got {temperature}")
    thermal_v = math.sqrt(CONSTANTS.boltzmann * temperature / species.mass)
    return tuple(thermal_v / (2.0 * math.pi * f) for f in trap.frequencies)


def mean_volume(widths: Sequence[float]) -> float:
    """Mean two-body collision volume sqrt(8) (2 pi)^(3/2) sx sy sz of a Gaussian cloud.

    The mean density of N atoms is N / V; at fixed trap the volume scales as
    T^(3/2).
    """
    sx, sy, sz = widths
    if min(sx, sy, sz) <= 0.0:
        raise InputError("widths must be > 0")
    return _VOLUME_PREFACTOR * sx * sy * sz


def cloud_volume(temperature: float, trap: TrapConfig, species: SpeciesConfig) -> float:
    """Mean volume at the given temperature (convenience wrapper)."""
    return mean_volume(gaussian_widths(temperature, trap, species))


@dataclass(frozen=True)
class CloudTrajectory:
    """Sampled evolution; arrays share the t_grid length."""

    times: np.ndarray
    n3: np.ndarray
    n2: np.ndarray
    n1: np.ndarray
    temperature: np.ndarray
    volume: np.ndarray

    @property
    def states(self) -> list[CloudState]:
        return [CloudState(n3=self.n3[i], n2=self.n2[i], n1=self.n1[i],
                           temperature=self.temperature[i], time=self.times[i])
                for i in range(len(self.times))]


def evolve(initial: CloudState, trap: TrapConfig, species: SpeciesConfig,
           mode: EvolutionMode | str, rates: RateCoefficients, beta2: float,
           t_grid: Sequence[float], *, rtol: float = 1e-9,
           recompute_rates: bool = False) -> CloudTrajectory:
    """Integrate the cloud ODEs on the given time grid.

    ``rates`` supplies beta_event (rf_shield) and beta_loss (free_evolution);
    they stay frozen at their input values by default, matching how decay
    curves are fitted.  With ``recompute_rates`` the relevant coefficient is
    re-evaluated from the cross sections as the temperature evolves.
    """
    mode = EvolutionMode(mode)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 2:
        raise InputError("t_grid must hold at least two times")
    if np.any(np.diff(t_grid) <= 0.0):
        raise InputError("t_grid must be strictly increasing")
    if not math.isclose(t_grid[0], initial.time, rel_tol=0.0, abs_tol=1e-12):
        raise InputError("t_grid must start at the initial state's time")
    if beta2 < 0.0 or min(rates.beta_event, rates.beta_loss) < 0.0:
        raise InputError("rate coefficients must be >= 0")

    gamma = trap.background_rate
    dt_step = temperature_step(species, trap.offset_field)
    n_tot0 = initial.n_total
    t0 = initial.time

    def beta_of(temperature: float) -> float:
        cond = ThermalConditions(temperature=temperature, field_b=trap.offset_field)
        if mode is EvolutionMode.RF_SHIELD:
            return beta_event_rate(species, cond)
        return beta_loss_rate(species, cond)

    if mode is EvolutionMode.RF_SHIELD:
        volume0 = cloud_volume(initial.temperature, trap, species)
        beta_rf = beta_of(initial.temperature) if recompute_rates else rates.beta_event

        def rhs(t, y):
            n3 = max(y[0], 0.0)
            return (-gamma * n3 - beta_rf * n3 * n3 / volume0, -gamma * y[1], 0.0)
    else:

        def rhs(t, y):
            n3, n2 = max(y[0], 0.0), max(y[1], 0.0)
            temp = max(y[2], 1e-12)
            vol = cloud_volume(temp, trap, species)
            beta = beta_of(temp) if recompute_rates else rates.beta_loss
            feed = beta * n3 * n3 / vol
            return (-gamma * n3 - feed,
                    feed - beta2 * n2 * n2 / (M2_VOLUME_RATIO * vol),
                    beta * (n3 / vol) * dt_step)

    y0 = (initial.n3, initial.n2, initial.temperature)
    atol = (rtol * max(initial.n3, 1.0), rtol * max(initial.n3, 1.0),
            rtol * initial.temperature)
    sol = solve_ivp(rhs, (t_grid[0], t_grid[-1]), y0, method="RK45",
                    t_eval=t_grid, rtol=rtol, atol=atol)
    if not sol.success:
        raise NumericalError(f"cloud integration failed: {sol.message}",
                             integrator_status=sol.status)

    n3 = np.maximum(sol.y[0], 0.0)
    n2 = np.maximum(sol.y[1], 0.0)
    temp = sol.y[2]
    decay = np.exp(-gamma * (t_grid - t0))
    if mode is EvolutionMode.RF_SHIELD:
        n1 = initial.n1 * decay
    else:
        n1 = np.maximum(n_tot0 * decay - n3 - n2, 0.0)
    volume = np.array([cloud_volume(t, trap, species) for t in temp])
    return CloudTrajectory(times=t_grid.copy(), n3=n3, n2=n2, n1=n1,
                           temperature=temp, volume=volume)


def analytic_two_body_decay(n0: float, gamma_bg: float, beta_over_v: float, t):
    """Closed-form population for dN/dt = -gamma N - (beta/V) N^2 at constant V.

    N(t) = gamma N0 e^(-gamma t) / (gamma + (beta/V) N0 (1 - e^(-gamma t))),
    reducing to pure exponential decay for beta = 0 and to the hyperbolic
    two-body law N0 / (1 + (beta/V) N0 t) for gamma = 0.  Used as the
    integrator oracle.
    """
    if n0 < 0.0 or gamma_bg < 0.0 or beta_over_v < 0.0:
        raise InputError("analytic decay parameters must be >= 0")
    t = np.asarray(t, dtype=float)
    if gamma_bg == 0.0:
        return n0 / (1.0 + beta_over_v * n0 * t)
    expfac = np.exp(-gamma_bg * t)
    return gamma_bg * n0 * expfac / (gamma_bg - beta_over_v * n0 * np.expm1(-gamma_bg * t))


@dataclass(frozen=True)
class RfShieldReport:
    """Validity report for an rf-shield frequency choice."""

    removal_ok: bool            # every product ejected: S (h nu - dE) < dE/2
    eta: float                  # truncation parameter S (h nu - dE) / (k_B T)
    eta_ok: bool                # eta >= 5: parent cloud not evaporated
    default_frequency: float    # Hz, the 7 dE / 6h - 1 MHz working point


def rf_shield_check(nu_rf: float, field_b: float, temperature: float,
                    species: SpeciesConfig) -> RfShieldReport:
    """Check an rf-shield frequency against the removal and evaporation bounds.

    A relaxation product in sublevel m_J reaches the resonance shell at extra
    potential energy m_J (h nu - dE); ejecting all products requires
    m_J (h nu - dE) < dE/2 at m_J = S, while keeping the parent cloud demands
    a truncation parameter eta = S (h nu - dE) / (k_B T) of at least 5.
    """
    if not nu_rf > 0.0:
        raise InputError(f"rf frequency must be > 0, got {nu_rf}")
    if not temperature > 0.0:
        raise InputError(f"temperature must be > 0, got {temperature}")
    de = zeeman_splitting(species, field_b)
    h = CONSTANTS.planck
    excess = species.spin_S * (h * nu_rf - de)
    removal_ok = excess < de / 2.0
    eta = excess / (CONSTANTS.boltzmann * temperature)
    default_frequency = 7.0 * de / (6.0 * h) - 1e6
    return RfShieldReport(removal_ok=removal_ok, eta=eta, eta_ok=eta >= 5.0,
                          default_frequency=default_frequency)
