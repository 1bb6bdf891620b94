"""Thermally averaged relaxation rate coefficients.

The measurable two-body coefficients are thermal averages of cross section
times relative speed over the Maxwell-Boltzmann distribution of the relative
motion (reduced mass m/2) at temperature T:

    beta_event = 2 <(s1 + s2) v>   two atoms removed per event (rf-shield mode)
    beta_loss  =  <(s1 + 2 s2) v>  atoms lost from the stretched state per event

Averaging convention
--------------------
With E the relative kinetic energy (the hbar^2 k^2 / m convention of
:mod:`diprelax.cross_sections`), the average of any f(E) is

    <f> = (2/sqrt(pi)) (k_B T)^(-3/2) Int_0^inf sqrt(E) e^(-E/kT) f(E) dE

and v(E) = 2 sqrt(E/m).  This normalization reproduces the mean relative
speed <v> = sqrt(16 k_B T / (pi m)) exactly, which anchors the convention.

Numerics: the elastic term factorizes exactly (s0 is energy-independent) and
the flip channels are integrated with generalized Gauss-Laguerre quadrature
of weight u^(1/2) e^(-u), whose weight function absorbs both the measure and
the E^(-1/2) density-of-states enhancement at the E -> 0 endpoint; the
remaining integrand is smooth and the fixed 96-point rule is exact to ~1e-5
or better everywhere (machine precision except for Zeeman splittings far
below k_B T).  Every evaluation is cross-checked against a higher-order rule.
A seeded Monte-Carlo estimator over the same distribution serves as the
independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np
from scipy.special import roots_genlaguerre

from . import kernels
from .cross_sections import coupling_prefactor
from .errors import InputError, NumericalError, UnsupportedStatisticsError
from .species import SpeciesConfig, zeeman_splitting
from .units import CONSTANTS

QUADRATURE_ORDER = 96
_CHECK_ORDER = 160
_CHECK_RTOL = 1e-4

MC_DEFAULT_SAMPLES = 10_000_000
MC_DEFAULT_SEED = 20230301


@dataclass(frozen=True)
class ThermalConditions:
    """Cloud temperature and magnetic offset field."""

    temperature: float  # K
    field_b: float      # T

    def __post_init__(self):
        if not self.temperature > 0.0:
            raise InputError(f"temperature must be > 0, got {self.temperature}")
        if self.field_b < 0.0:
            raise InputError(f"field must be >= 0, got {self.field_b}")


@dataclass(frozen=True)
class RateCoefficients:
    """Thermal rate coefficients in m^3/s."""

    beta_event: float       # event rate, rf-shield observable
    beta_loss: float        # stretched-state loss rate
    beta_elastic_dd: float  # <s0 v>, dipolar elastic part (diagnostic)


def mean_relative_speed(temperature: float, species: SpeciesConfig) -> float:
    """Mean relative speed sqrt(16 k_B T / (pi m)) of the colliding pair."""
    if not temperature > 0.0:
        raise InputError(f"temperature must be > 0, got {temperature}")
    return math.sqrt(16.0 * CONSTANTS.boltzmann * temperature /
                     (math.pi * species.mass))


@lru_cache(maxsize=8)
def _nodes(order: int):
    x, w = roots_genlaguerre(order, 0.5)
    return x, w


def _check_weights(weights: Mapping[int, float]) -> tuple[float, float, float]:
    w = {0: 0.0, 1: 0.0, 2: 0.0}
    for key, val in weights.items():
        if key not in w:
            raise InputError(f"channel weight keys must be 0, 1 or 2, got {key!r}")
        if val < 0.0:
            raise InputError(f"channel weights must be >= 0, got {key}: {val}")
        w[key] = float(val)
    return w[0], w[1], w[2]


def _sigma0(species: SpeciesConfig) -> float:
    return 0.5 * (16.0 * math.pi / 45.0) * species.spin_S**4 * coupling_prefactor(species)


def _flip_quadrature(species: SpeciesConfig, kt: float, de: float,
                     w1: float, w2: float, order: int) -> float:
    x, w = _nodes(order)
    f = kernels.weighted_sigma_v(x * kt, de, coupling_prefactor(species),
                                 species.spin_S, 0.0, w1, w2, species.mass)
    return 2.0 / math.sqrt(math.pi) * float(w @ f)


def thermal_average(species: SpeciesConfig, conditions: ThermalConditions,
                    weights: Mapping[int, float]) -> float:
    """<(w0 s0 + w1 s1 + w2 s2) v> over the relative-motion distribution, m^3/s."""
    if species.statistics_sign != +1:
        raise UnsupportedStatisticsError(
            f"thermal averages use the bosonic closed forms; "
            f"{species.label} is configured as a fermion")
    w0, w1, w2 = _check_weights(weights)
    kt = CONSTANTS.boltzmann * conditions.temperature
    de = zeeman_splitting(species, conditions.field_b)
    vbar = mean_relative_speed(conditions.temperature, species)

    total = w0 * _sigma0(species) * vbar
    if w1 == 0.0 and w2 == 0.0:
        return total
    if de == 0.0:
        # elastic limit: all cross sections energy-independent, average factorizes
        c = 8.0 * math.pi / 15.0 * coupling_prefactor(species) * 0.5
        return total + (w1 * c * species.spin_S**3 + w2 * c * species.spin_S**2) * vbar

    flip = _flip_quadrature(species, kt, de, w1, w2, QUADRATURE_ORDER)
    check = _flip_quadrature(species, kt, de, w1, w2, _CHECK_ORDER)
    scale = max(abs(flip), abs(check))
    err = abs(flip - check) / scale if scale > 0.0 else 0.0
    if err > _CHECK_RTOL:
        raise NumericalError(
            f"thermal-average quadrature did not converge "
            f"(relative change {err:.3e} between orders "
            f"{QUADRATURE_ORDER} and {_CHECK_ORDER})",
            error_estimate=err, order=QUADRATURE_ORDER)
    return total + flip


def beta_event_rate(species: SpeciesConfig, conditions: ThermalConditions) -> float:
    """Event rate 2 <(s1 + s2) v>: two atoms removed per relaxation event."""
    return 2.0 * thermal_average(species, conditions, {1: 1.0, 2: 1.0})


def beta_loss_rate(species: SpeciesConfig, conditions: ThermalConditions) -> float:
    """Stretched-state loss rate <(s1 + 2 s2) v>."""
    return thermal_average(species, conditions, {1: 1.0, 2: 2.0})


def beta_elastic_dd_rate(species: SpeciesConfig, conditions: ThermalConditions) -> float:
    """Dipolar elastic rate <s0 v> (diagnostic)."""
    return thermal_average(species, conditions, {0: 1.0})


def rate_coefficients(species: SpeciesConfig, conditions: ThermalConditions) -> RateCoefficients:
    """All three thermal coefficients at the given conditions."""
    return RateCoefficients(
        beta_event=beta_event_rate(species, conditions),
        beta_loss=beta_loss_rate(species, conditions),
        beta_elastic_dd=beta_elastic_dd_rate(species, conditions),
    )


def mc_thermal_average(species: SpeciesConfig, conditions: ThermalConditions,
                       weights: Mapping[int, float],
                       n_samples: int = MC_DEFAULT_SAMPLES,
                       seed: int = MC_DEFAULT_SEED) -> float:
    """Monte-Carlo oracle for :func:`thermal_average` (same distribution).

    Draws the squared standardized relative speed as chi-squared with three
    degrees of freedom, so E = k_B T chi2/2, and averages sigma*v directly.
    Deterministic for a given seed.
    """
    if species.statistics_sign != +1:
        raise UnsupportedStatisticsError(
            f"thermal averages use the bosonic closed forms; "
            f"{species.label} is configured as a fermion")
    w0, w1, w2 = _check_weights(weights)
    if n_samples < 1:
        raise InputError(f"n_samples must be >= 1, got {n_samples}")
    rng = np.random.default_rng(seed)
    usq = rng.chisquare(3, n_samples)
    kt = CONSTANTS.boltzmann * conditions.temperature
    de = zeeman_splitting(species, conditions.field_b)
    return kernels.weighted_sigma_v_mean(usq, kt, de, coupling_prefactor(species),
                                         species.spin_S, w0, w1, w2, species.mass)
