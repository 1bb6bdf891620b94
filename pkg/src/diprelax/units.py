"""Physical constants (CODATA 2018) and laboratory/SI unit conversion.

All computation inside the package happens in coherent SI; laboratory units
(G, uK, amu, cm^3/s, ...) appear only at the I/O boundary.  Conversions are
purely multiplicative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import UnknownUnitError


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values, SI."""

    bohr_magneton: float           # J/T
    boltzmann: float               # J/K
    planck: float                  # J s
    hbar: float                    # J s
    electron_mass: float           # kg
    classical_electron_radius: float  # m
    vacuum_permeability: float     # N/A^2
    atomic_mass_unit: float        # kg

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0.0:
                raise ValueError(f"constant {name} must be positive")


CONSTANTS = PhysicalConstants(
    bohr_magneton=9.2740100783e-24,
    boltzmann=1.380649e-23,
    planck=6.62607015e-34,
    hbar=6.62607015e-34 / (2.0 * math.pi),
    electron_mass=9.1093837015e-31,
    classical_electron_radius=2.8179403262e-15,
    vacuum_permeability=1.25663706212e-6,
    atomic_mass_unit=1.66053906660e-27,
)


# Multiplicative factor taking one unit of the tag to coherent SI.
_SI_FACTOR = {
    # magnetic field -> T
    "T": 1.0,
    "G": 1e-4,
    "mG": 1e-7,
    # temperature -> K
    "K": 1.0,
    "mK": 1e-3,
    "uK": 1e-6,
    # frequency -> Hz
    "Hz": 1.0,
    "kHz": 1e3,
    "MHz": 1e6,
    # mass -> kg
    "kg": 1.0,
    "amu": CONSTANTS.atomic_mass_unit,
    # two-body rate coefficient -> m^3/s
    "m3/s": 1.0,
    "cm3/s": 1e-6,
    # volume -> m^3
    "m3": 1.0,
    "cm3": 1e-6,
    # number density -> 1/m^3
    "1/m3": 1.0,
    "1/cm3": 1e6,
    # length -> m
    "m": 1.0,
    "um": 1e-6,
    # time -> s
    "s": 1.0,
    "ms": 1e-3,
}

SUPPORTED_UNITS = tuple(sorted(_SI_FACTOR))


@dataclass(frozen=True)
class Quantity:
    """A value tagged with one of the supported laboratory or SI units."""

    value: float
    unit: str


def _factor(unit: str) -> float:
    try:
        return _SI_FACTOR[unit]
    except KeyError:
        raise UnknownUnitError(
            f"unknown unit tag {unit!r}; supported: {', '.join(SUPPORTED_UNITS)}"
        ) from None


def to_si(q: Quantity) -> float:
    """Express a tagged quantity in coherent SI."""
    return q.value * _factor(q.unit)


def from_si(value: float, target_unit: str) -> Quantity:
    """Inverse of :func:`to_si`."""
    return Quantity(value / _factor(target_unit), target_unit)


def convert(value: float, unit: str, target_unit: str) -> float:
    """Convert between two supported unit tags (must share a dimension by use)."""
    return from_si(to_si(Quantity(value, unit)), target_unit).value
