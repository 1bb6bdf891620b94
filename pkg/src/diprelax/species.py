"""Species definitions, Zeeman structure and spin-flip relaxation channels.

A collision of two atoms in the stretched state (m_S = S) can flip zero, one
or two spins in first-order Born approximation; the one- and two-flip exits
release one and two Zeeman quanta g_S mu_B B shared between the pair.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .units import CONSTANTS


@dataclass(frozen=True)
class SpeciesConfig:
    """Atomic species with a pure electron-spin magnetic moment.

    ``statistics_sign`` is +1 for bosons and -1 for fermions, following the
    sign of the exchange term in the two-identical-particle cross section.
    """

    spin_S: float
    lande_g: float
    mass: float            # kg
    statistics_sign: int
    label: str

    def __post_init__(self):
        if self.spin_S < 0.5 or round(2 * self.spin_S) != 2 * self.spin_S:
            raise InputError(f"spin_S must be a half-integer >= 1/2, got {self.spin_S}")
        if not self.mass > 0.0:
            raise InputError(f"mass must be positive, got {self.mass}")
        if self.statistics_sign not in (+1, -1):
            raise InputError(f"statistics_sign must be +1 or -1, got {self.statistics_sign}")


@dataclass(frozen=True)
class RelaxationChannel:
    """Exit channel flipping ``flips`` spins and releasing ``flips`` Zeeman quanta."""

    flips: int

    def __post_init__(self):
        if self.flips not in (0, 1, 2):
            raise InputError(f"flips must be 0, 1 or 2, got {self.flips}")

    @property
    def released_energy_multiplier(self) -> int:
        return self.flips


#: The three channels open to a stretched-state pair at first order.
CHANNELS = (RelaxationChannel(0), RelaxationChannel(1), RelaxationChannel(2))

_AMU = CONSTANTS.atomic_mass_unit

SPECIES = {
    "52Cr": SpeciesConfig(spin_S=3.0, lande_g=2.0, mass=51.9405 * _AMU,
                          statistics_sign=+1, label="52Cr"),
    "50Cr": SpeciesConfig(spin_S=3.0, lande_g=2.0, mass=49.9460 * _AMU,
                          statistics_sign=+1, label="50Cr"),
    # metastable triplet helium, the classic S=1 cross-check case
    "He*": SpeciesConfig(spin_S=1.0, lande_g=2.0, mass=4.0026 * _AMU,
                         statistics_sign=+1, label="He*"),
}

_SPECIES_BY_KEY = {k.lower(): v for k, v in SPECIES.items()}


def get_species(label: str) -> SpeciesConfig:
    """Look up a built-in species preset by label (case-insensitive)."""
    try:
        return _SPECIES_BY_KEY[label.lower()]
    except KeyError:
        known = ", ".join(sorted(SPECIES))
        raise InputError(f"unknown species label {label!r}; known presets: {known}") from None


def zeeman_splitting(species: SpeciesConfig, field_b: float) -> float:
    """Energy spacing g_S mu_B B between adjacent Zeeman sublevels, in J."""
    if field_b < 0.0:
        raise InputError(f"magnetic field must be >= 0, got {field_b}")
    return species.lande_g * CONSTANTS.bohr_magneton * field_b


def released_energy(channel: RelaxationChannel, species: SpeciesConfig,
                    field_b: float) -> float:
    """Zeeman energy set free by one relaxation event in this channel, in J."""
    return channel.released_energy_multiplier * zeeman_splitting(species, field_b)


def temperature_step(species: SpeciesConfig, field_b: float) -> float:
    """Equilibrium temperature increase per thermalized single spin flip, in K.

    Each flip deposits half a Zeeman quantum of extra kinetic energy per
    colliding pair; sharing it over the six quadratic degrees of freedom of
    the pair gives dT = g_S mu_B B / (6 k_B).
    """
    return zeeman_splitting(species, field_b) / (6.0 * CONSTANTS.boltzmann)
