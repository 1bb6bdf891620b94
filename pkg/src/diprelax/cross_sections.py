"""Closed-form Born cross sections for dipolar spin-flip collisions.

Two identical bosons colliding in the stretched Zeeman state (m_S = S) can
flip zero, one or two spins through the magnetic dipole-dipole interaction.
Averaged over collision orientations, the first-order cross sections are

    s0 = (16 pi / 45) S^4 Q [1 + h(1)]
    s1 = ( 8 pi / 15) S^3 Q [1 + h(kf/ki)] (kf/ki)
    s2 = ( 8 pi / 15) S^2 Q [1 + h(kf/ki)] (kf/ki)

with Q = (mu0 (g_S mu_B)^2 m / (4 pi hbar^2))^2 the squared coupling length
and h the exchange-to-direct ratio.  s0 is the dipolar contribution to the
elastic cross section; s1 and s2 drive relaxation.

Energy convention
-----------------
``kinetic_energy`` here is E = hbar^2 k_i^2 / m, the kinetic energy of the
relative motion (reduced mass m/2) for relative wavevector modulus k_i.  The
outgoing/incoming wavevector ratios then read sqrt(1 + n dE / E) for n
flipped spins, with dE the Zeeman splitting.  Mixing this convention up with
E = hbar^2 k^2 / (2 mu) written in terms of other masses is the classic
factor-of-two trap; every consumer in this package uses E = hbar^2 k^2 / m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InputError, UnsupportedStatisticsError
from .species import SpeciesConfig, zeeman_splitting
from .units import CONSTANTS

_C_FLIP = 8.0 * math.pi / 15.0
_C_ELASTIC = 16.0 * math.pi / 45.0


@dataclass(frozen=True)
class CollisionKinematics:
    """Relative-motion state of the colliding pair.

    Invariant: kinetic_energy = hbar^2 k_initial^2 / m (see module docstring).
    """

    k_initial: float       # 1/m
    kinetic_energy: float  # J

    def __post_init__(self):
        if self.kinetic_energy < 0.0 or self.k_initial < 0.0:
            raise InputError("kinematics must have nonnegative energy and wavevector")
        if (self.k_initial == 0.0) != (self.kinetic_energy == 0.0):
            raise InputError("k_initial is zero iff kinetic_energy is zero")


def kinematics_from_energy(species: SpeciesConfig, kinetic_energy: float) -> CollisionKinematics:
    """Build kinematics from the relative kinetic energy E = hbar^2 k^2 / m."""
    if kinetic_energy < 0.0:
        raise InputError(f"kinetic energy must be >= 0, got {kinetic_energy}")
    k = math.sqrt(species.mass * kinetic_energy) / CONSTANTS.hbar
    return CollisionKinematics(k_initial=k, kinetic_energy=kinetic_energy)


def kinematics_from_wavevector(species: SpeciesConfig, k_initial: float) -> CollisionKinematics:
    """Build kinematics from the relative wavevector modulus."""
    if k_initial < 0.0:
        raise InputError(f"wavevector must be >= 0, got {k_initial}")
    energy = (CONSTANTS.hbar * k_initial) ** 2 / species.mass
    return CollisionKinematics(k_initial=k_initial, kinetic_energy=energy)


@dataclass(frozen=True)
class CrossSectionSet:
    """The three orientation-averaged cross sections at one (E, B) point."""

    sigma0: float          # m^2, elastic dipole-dipole part
    sigma1: float          # m^2, one spin flip
    sigma2: float          # m^2, two spin flips
    kf_over_ki_1: float
    kf_over_ki_2: float


def exchange_ratio(x):
    """Exchange-to-direct ratio h(x) for x >= 1; h(1) = -1/2, h(inf) = 1.

    Monotonically nondecreasing; approaches 1 - 4/x^2 for large arguments.
    Accepts scalars or arrays; raises for arguments below 1.
    """
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 1.0) or np.any(np.isnan(arr)):
        raise InputError("exchange ratio is defined for arguments >= 1 only")
    out = kernels.exchange_ratio_array(np.atleast_1d(arr))
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def coupling_prefactor(species: SpeciesConfig) -> float:
    """Squared coupling length Q = (mu0 (g mu_B)^2 m / (4 pi hbar^2))^2, in m^2.

    Computed from first principles so that g != 2 species stay correct; for
    g = 2 it collapses to ((m/m_e) r_0)^2 with r_0 the classical electron
    radius, which the tests use as an independent identity check.
    """
    c = CONSTANTS
    bracket = (c.vacuum_permeability * (species.lande_g * c.bohr_magneton) ** 2
               * species.mass / (4.0 * math.pi * c.hbar ** 2))
    return bracket ** 2


def wavevector_ratio(flips: int, kinematics: CollisionKinematics,
                     delta_e: float) -> float:
    """Outgoing/incoming wavevector ratio sqrt(1 + flips * dE / E).

    Encodes the density-of-states gain of an exothermic exit.  At E = 0 with
    dE > 0 the ratio diverges; math.inf is returned so thermal integrators
    can treat the (integrable) endpoint explicitly.
    """
    if flips not in (1, 2):
        raise InputError(f"flips must be 1 or 2, got {flips}")
    if delta_e < 0.0:
        raise InputError(f"released energy must be >= 0, got {delta_e}")
    if delta_e == 0.0:
        return 1.0
    if kinematics.kinetic_energy == 0.0:
        return math.inf
    return math.sqrt(1.0 + flips * delta_e / kinematics.kinetic_energy)


def cross_sections(species: SpeciesConfig, kinematics: CollisionKinematics,
                   field_b: float) -> CrossSectionSet:
    """Evaluate the three averaged cross sections at one collision energy.

    Only identical bosons in the stretched state are covered by the closed
    forms; fermionic species are rejected rather than guessed at.
    """
    if species.statistics_sign != +1:
        raise UnsupportedStatisticsError(
            f"closed-form cross sections hold for identical bosons; "
            f"{species.label} is configured as a fermion")
    delta_e = zeeman_splitting(species, field_b)
    q = coupling_prefactor(species)
    s = species.spin_S

    sigma0 = _C_ELASTIC * s**4 * q * (1.0 + exchange_ratio(1.0))

    r1 = wavevector_ratio(1, kinematics, delta_e)
    r2 = wavevector_ratio(2, kinematics, delta_e)
    h1 = exchange_ratio(r1) if math.isfinite(r1) else 1.0
    h2 = exchange_ratio(r2) if math.isfinite(r2) else 1.0
    sigma1 = _C_FLIP * s**3 * q * (1.0 + h1) * r1
    sigma2 = _C_FLIP * s**2 * q * (1.0 + h2) * r2
    return CrossSectionSet(sigma0=sigma0, sigma1=sigma1, sigma2=sigma2,
                           kf_over_ki_1=r1, kf_over_ki_2=r2)
