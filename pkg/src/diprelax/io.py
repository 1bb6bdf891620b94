"""Config-file parsing, CSV time-series ingestion and table emission.

Config grammar: flat ``key = value`` lines, ``#`` comments, laboratory units
carried in the key names (e.g. ``field_gauss = 27``).  A ``preset`` key pulls
in one of the scenario presets; explicit keys override preset values.

CSV vocabulary (header row): ``t_s, N3, N2, N1, T_uK, sigma_x_m, sigma_y_m,
sigma_z_m, V_cm3`` - any subset containing ``t_s`` plus at least one data
column.  Rows are sorted by time on ingestion; values are converted to SI.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .fitting import TimeSeries
from .presets import SCENARIOS
from .species import get_species

#: Numbers are emitted with nine significant digits: below the integrator
#: tolerance, above any realistic measurement noise.
_FMT = "{:.9g}"


def format_number(x: float) -> str:
    return _FMT.format(float(x))


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------

_MODES = ("rf_shield", "free_evolution")

_FIELD_RANGE_GAUSS = (0.0, 100.0)
_TEMP_RANGE_UK = (0.0, 10000.0)  # (0, 10 mK]


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters in SI units.

    ``beta_*`` rate constants are ``None`` when they should be evaluated
    from the cross-section model ("theory"); ``density`` is the mean number
    density N / V of the stretched-state cloud.
    """

    species_label: str
    field_b: float              # T
    temperature: float          # K
    freqs: tuple | None = None  # Hz
    background_rate: float = 0.0
    density: float | None = None       # 1/m^3
    polarization: float = 1.0
    mode: str | None = None
    beta_event: float | None = None    # m^3/s, None -> theory
    beta_loss: float | None = None     # m^3/s, None -> theory
    beta2: float = 0.0                 # m^3/s
    duration: float = 10.0             # s
    samples: int = 101
    seed: int = 0
    noise_fraction: float = 0.0


def _parse_float(key, raw, where):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{where}: value for {key!r} is not a number: {raw!r}") from None


def _parse_rate(key, raw, where):
    if raw == "theory":
        return None
    value = _parse_float(key, raw, where)
    if value < 0.0:
        raise ConfigError(f"{where}: {key} must be >= 0 or 'theory', got {raw}")
    return value


def _parse_int(key, raw, where):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{where}: value for {key!r} is not an integer: {raw!r}") from None


_KEY_PARSERS = {
    "preset": lambda k, v, w: str(v),
    "species": lambda k, v, w: str(v),
    "mode": lambda k, v, w: str(v),
    "field_gauss": _parse_float,
    "temp_uk": _parse_float,
    "freq_x_hz": _parse_float,
    "freq_y_hz": _parse_float,
    "freq_z_hz": _parse_float,
    "background_rate_hz": _parse_float,
    "density_cm3": _parse_float,
    "polarization": _parse_float,
    "beta_event_cm3s": _parse_rate,
    "beta_loss_cm3s": _parse_rate,
    "beta2_cm3s": _parse_rate,
    "duration_s": _parse_float,
    "samples": _parse_int,
    "seed": _parse_int,
    "noise_fraction": _parse_float,
}

CONFIG_KEYS = tuple(sorted(_KEY_PARSERS))

_REQUIRED_KEYS = ("species", "field_gauss", "temp_uk")


def read_config_file(path) -> dict:
    """Parse a config file into a raw key -> typed-value mapping."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        where = f"{path}:{lineno}"
        if "=" not in stripped:
            raise ConfigError(f"{where}: expected 'key = value', got {line.rstrip()!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEY_PARSERS:
            raise ConfigError(f"{where}: unknown key {key!r}; known keys: "
                              f"{', '.join(CONFIG_KEYS)}")
        if key in raw:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        raw[key] = _KEY_PARSERS[key](key, value, where)
    return raw


def expand_preset(raw: dict) -> dict:
    """Overlay raw values on their scenario preset, if one is named."""
    label = raw.get("preset")
    if label is None:
        return dict(raw)
    if label not in SCENARIOS:
        raise ConfigError(f"unknown preset {label!r}; known presets: "
                          f"{', '.join(sorted(SCENARIOS))}")
    merged = dict(SCENARIOS[label])
    merged.update({k: v for k, v in raw.items() if k != "preset"})
    return merged


def resolve_config(raw: dict) -> RunConfig:
    """Validate a raw mapping (grammar keys, lab units) into a RunConfig."""
    missing = [k for k in _REQUIRED_KEYS if k not in raw]
    if missing:
        raise ConfigError(f"missing required config key(s): {', '.join(missing)}")

    label = raw["species"]
    get_species(label)  # rejects unknown labels early

    gauss = raw["field_gauss"]
    if not _FIELD_RANGE_GAUSS[0] <= gauss <= _FIELD_RANGE_GAUSS[1]:
        raise ConfigError(f"field_gauss out of range {_FIELD_RANGE_GAUSS}: {gauss}")
    temp_uk = raw["temp_uk"]
    if not _TEMP_RANGE_UK[0] < temp_uk <= _TEMP_RANGE_UK[1]:
        raise ConfigError(f"temp_uk out of range ({_TEMP_RANGE_UK[0]}, "
                          f"{_TEMP_RANGE_UK[1]}]: {temp_uk}")

    freqs = None
    freq_keys = ("freq_x_hz", "freq_y_hz", "freq_z_hz")
    if any(k in raw for k in freq_keys):
        if not all(k in raw for k in freq_keys):
            raise ConfigError("trap frequencies must be given for all three axes")
        freqs = tuple(raw[k] for k in freq_keys)
        if min(freqs) <= 0.0:
            raise ConfigError(f"trap frequencies must be > 0, got {freqs}")

    mode = raw.get("mode")
    if mode is not None and mode not in _MODES:
        raise ConfigError(f"mode must be one of {_MODES}, got {mode!r}")

    density = raw.get("density_cm3")
    if density is not None:
        if density <= 0.0:
            raise ConfigError(f"density_cm3 must be > 0, got {density}")
        density = density * 1e6  # 1/cm^3 -> 1/m^3

    polarization = raw.get("polarization", 1.0)
    if not 0.0 < polarization <= 1.0:
        raise ConfigError(f"polarization must be in (0, 1], got {polarization}")

    background = raw.get("background_rate_hz", 0.0)
    if background < 0.0:
        raise ConfigError(f"background_rate_hz must be >= 0, got {background}")

    duration = raw.get("duration_s", 10.0)
    if duration <= 0.0:
        raise ConfigError(f"duration_s must be > 0, got {duration}")
    samples = raw.get("samples", 101)
    if samples < 2:
        raise ConfigError(f"samples must be >= 2, got {samples}")
    noise = raw.get("noise_fraction", 0.0)
    if noise < 0.0:
        raise ConfigError(f"noise_fraction must be >= 0, got {noise}")

    def rate_si(key):
        value = raw.get(key)
        if value is None or value == "theory":
            return None
        return value * 1e-6  # cm^3/s -> m^3/s

    beta2 = rate_si("beta2_cm3s")
    return RunConfig(
        species_label=label,
        field_b=gauss * 1e-4,
        temperature=temp_uk * 1e-6,
        freqs=freqs,
        background_rate=background,
        density=density,
        polarization=polarization,
        mode=mode,
        beta_event=rate_si("beta_event_cm3s"),
        beta_loss=rate_si("beta_loss_cm3s"),
        beta2=0.0 if beta2 is None else beta2,
        duration=duration,
        samples=samples,
        seed=raw.get("seed", 0),
        noise_fraction=noise,
    )


def parse_config(path) -> RunConfig:
    """Read, preset-expand and validate a config file."""
    return resolve_config(expand_preset(read_config_file(path)))


# ---------------------------------------------------------------------------
# time-series CSV
# ---------------------------------------------------------------------------

# header name -> (canonical column, SI factor)
CSV_COLUMNS = {
    "t_s": ("t", 1.0),
    "N3": ("N3", 1.0),
    "N2": ("N2", 1.0),
    "N1": ("N1", 1.0),
    "T_uK": ("T", 1e-6),
    "sigma_x_m": ("sigma_x", 1.0),
    "sigma_y_m": ("sigma_y", 1.0),
    "sigma_z_m": ("sigma_z", 1.0),
    "V_cm3": ("V", 1e-6),
}

CSV_HEADER_VOCABULARY = tuple(CSV_COLUMNS)


def parse_timeseries_csv(path) -> TimeSeries:
    """Ingest a time-series CSV into an SI TimeSeries, sorted by time."""
    try:
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise ConfigError(f"cannot read data file {path}: {exc}") from exc
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if not rows:
        raise ConfigError(f"{path}: empty CSV")
    header = [cell.strip() for cell in rows[0]]
    for col, name in enumerate(header, start=1):
        if name not in CSV_COLUMNS:
            raise ConfigError(
                f"{path}: row 1, column {col}: unknown column {name!r}; "
                f"vocabulary: {', '.join(CSV_HEADER_VOCABULARY)}")
    if len(set(header)) != len(header):
        raise ConfigError(f"{path}: row 1: duplicate column names")
    if "t_s" not in header:
        raise ConfigError(f"{path}: row 1: required column 't_s' is missing")
    if len(header) < 2:
        raise ConfigError(f"{path}: need at least one data column besides t_s")

    data = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ConfigError(f"{path}: row {i}: expected {len(header)} cells, "
                              f"got {len(row)}")
        for j, cell in enumerate(row):
            try:
                data[i - 2, j] = float(cell)
            except ValueError:
                raise ConfigError(
                    f"{path}: row {i}, column {j + 1} ({header[j]}): "
                    f"non-numeric cell {cell.strip()!r}") from None

    order = np.argsort(data[:, header.index("t_s")], kind="stable")
    data = data[order]
    times = data[:, header.index("t_s")]
    if np.any(np.diff(times) == 0.0):
        raise ConfigError(f"{path}: duplicate time values in column t_s")

    columns = {}
    for j, name in enumerate(header):
        canonical, factor = CSV_COLUMNS[name]
        if canonical == "t":
            continue
        columns[canonical] = data[:, j] * factor
    return TimeSeries(times=times, columns=columns)


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def emit_table(header, rows, out=None) -> None:
    """Write a CSV table with deterministic number formatting.

    ``out`` is a path, or None for stdout.  Newlines are always '\\n'.
    """
    lines = [",".join(header)]
    lines.extend(",".join(format_number(cell) if not isinstance(cell, str) else cell
                          for cell in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as handle:
            handle.write(text)


def trajectory_rows(trajectory):
    """CSV rows (t_s, N3, N2, N1, T_uK, V_cm3) for a CloudTrajectory."""
    for i in range(len(trajectory.times)):
        yield (trajectory.times[i], trajectory.n3[i], trajectory.n2[i],
               trajectory.n1[i], trajectory.temperature[i] * 1e6,
               trajectory.volume[i] * 1e6)


TRAJECTORY_HEADER = ("t_s", "N3", "N2", "N1", "T_uK", "V_cm3")
