"""Command-line surface.

Subcommands:
  rate      - thermal rate coefficients at one (B, T) point
  sweep     - rate coefficients along a field or temperature grid
  simulate  - forward cloud evolution, emitted as a time-series CSV
  fit       - rate-constant estimation from a time-series CSV
  presets   - list built-in species and scenario presets

Exit codes: 0 success, 1 numerical failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import dynamics, fitting, io, rates
from .errors import DipRelaxError, InputError, NumericalError
from .presets import SCENARIOS
from .species import SPECIES, get_species


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="config file (key = value lines)")
    parser.add_argument("--preset", metavar="LABEL", help="scenario preset to start from")
    parser.add_argument("--species", metavar="LABEL", help="species label (e.g. 52Cr)")
    parser.add_argument("--field-gauss", type=float, metavar="F", help="offset field in G")
    parser.add_argument("--temp-uk", type=float, metavar="T", help="temperature in uK")
    parser.add_argument("--mode", choices=("rf_shield", "free_evolution"),
                        help="evolution mode")
    parser.add_argument("--seed", type=int, metavar="N", help="random seed")
    parser.add_argument("--out", metavar="PATH", help="output file (default: stdout)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diprelax",
        description="Dipolar-relaxation rates, trap dynamics and rate-constant fits "
                    "for magnetically trapped spin-polarized gases.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_rate = sub.add_parser("rate", help="rate coefficients at one (B, T) point")
    _common_flags(p_rate)

    p_sweep = sub.add_parser("sweep", help="rate coefficients along a parameter grid")
    _common_flags(p_sweep)
    p_sweep.add_argument("--axis", choices=("field-gauss", "temp-uk"),
                         default="field-gauss", help="sweep axis")
    p_sweep.add_argument("--start", type=float, required=True, help="first grid point")
    p_sweep.add_argument("--stop", type=float, required=True, help="last grid point")
    p_sweep.add_argument("--points", type=int, required=True, help="number of grid points")
    p_sweep.add_argument("--log", action="store_true", help="logarithmic grid spacing")

    p_sim = sub.add_parser("simulate", help="forward cloud evolution")
    _common_flags(p_sim)
    p_sim.add_argument("--duration", type=float, metavar="S", help="evolution time in s")
    p_sim.add_argument("--samples", type=int, metavar="N", help="number of output samples")

    p_fit = sub.add_parser("fit", help="estimate rate constants from a CSV time series")
    _common_flags(p_fit)
    p_fit.add_argument("--method", choices=("i", "ii", "iii", "beta2"), required=True)
    p_fit.add_argument("--data", metavar="PATH", required=True, help="input CSV")

    p_presets = sub.add_parser("presets", help="list built-in presets")
    p_presets.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    return parser


_FLAG_TO_KEY = {
    "species": "species",
    "field_gauss": "field_gauss",
    "temp_uk": "temp_uk",
    "mode": "mode",
    "seed": "seed",
}


def _gather_config(args) -> io.RunConfig:
    raw = {}
    file_raw = io.read_config_file(args.config) if args.config else {}
    preset = args.preset or file_raw.get("preset")
    if preset is not None:
        raw.update(io.expand_preset({"preset": preset}))
    raw.update({k: v for k, v in file_raw.items() if k != "preset"})
    for attr, key in _FLAG_TO_KEY.items():
        value = getattr(args, attr, None)
        if value is not None:
            raw[key] = value
    if getattr(args, "duration", None) is not None:
        raw["duration_s"] = args.duration
    if getattr(args, "samples", None) is not None:
        raw["samples"] = args.samples
    return io.resolve_config(raw)


def _conditions(config: io.RunConfig, **overrides) -> rates.ThermalConditions:
    return rates.ThermalConditions(
        temperature=overrides.get("temperature", config.temperature),
        field_b=overrides.get("field_b", config.field_b))


_RATE_HEADER = ("B_gauss", "T_uK", "beta_event_cm3s", "beta_loss_cm3s",
                "beta_elastic_cm3s")


def _cmd_rate(args) -> int:
    config = _gather_config(args)
    species = get_species(config.species_label)
    coeff = rates.rate_coefficients(species, _conditions(config))
    row = (config.field_b * 1e4, config.temperature * 1e6,
           coeff.beta_event * 1e6, coeff.beta_loss * 1e6,
           coeff.beta_elastic_dd * 1e6)
    io.emit_table(_RATE_HEADER, [row], out=args.out)
    return 0


@dataclass(frozen=True)
class SweepSpec:
    """Grid over one thermal axis at otherwise fixed conditions."""

    axis: str              # "field-gauss" | "temp-uk"
    grid: np.ndarray       # lab units of the axis

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        object.__setattr__(self, "grid", grid)
        if len(grid) < 2 or np.any(np.diff(grid) <= 0.0):
            raise InputError("sweep grid needs >= 2 strictly increasing points")


def run_sweep(spec: SweepSpec, config: io.RunConfig):
    """Rate-coefficient rows along the sweep grid (grid order preserved)."""
    species = get_species(config.species_label)
    rows = []
    for value in spec.grid:
        if spec.axis == "field-gauss":
            cond = _conditions(config, field_b=value * 1e-4)
        else:
            cond = _conditions(config, temperature=value * 1e-6)
        coeff = rates.rate_coefficients(species, cond)
        rows.append((value, coeff.beta_event * 1e6, coeff.beta_loss * 1e6))
    return rows


def _cmd_sweep(args) -> int:
    # the swept axis needs no fixed condition; seed it from the grid start
    if args.axis == "field-gauss" and args.field_gauss is None:
        args.field_gauss = args.start
    if args.axis == "temp-uk" and args.temp_uk is None:
        args.temp_uk = args.start
    config = _gather_config(args)
    if args.points < 2:
        raise InputError("sweep needs at least 2 grid points")
    if not args.stop > args.start:
        raise InputError("sweep requires stop > start")
    if args.log:
        if args.start <= 0.0:
            raise InputError("logarithmic sweep requires start > 0")
        grid = np.geomspace(args.start, args.stop, args.points)
    else:
        grid = np.linspace(args.start, args.stop, args.points)
    spec = SweepSpec(axis=args.axis, grid=grid)
    axis_header = "B_gauss" if args.axis == "field-gauss" else "T_uK"
    rows = run_sweep(spec, config)
    io.emit_table((axis_header, "beta_event_cm3s", "beta_loss_cm3s"), rows,
                  out=args.out)
    return 0


def _initial_state(config: io.RunConfig, volume: float) -> dynamics.CloudState:
    n3 = config.density * volume
    n_total = n3 / config.polarization
    rest = 0.5 * (n_total - n3)
    return dynamics.CloudState(n3=n3, n2=rest, n1=rest,
                               temperature=config.temperature, time=0.0)


def _resolve_rates(config: io.RunConfig, species) -> rates.RateCoefficients:
    cond = _conditions(config)
    beta_event = config.beta_event
    beta_loss = config.beta_loss
    if beta_event is None:
        beta_event = rates.beta_event_rate(species, cond)
    if beta_loss is None:
        beta_loss = rates.beta_loss_rate(species, cond)
    return rates.RateCoefficients(beta_event=beta_event, beta_loss=beta_loss,
                                  beta_elastic_dd=0.0)


def simulate_trajectory(config: io.RunConfig) -> dynamics.CloudTrajectory:
    """Run the evolution described by a RunConfig (the `simulate` core)."""
    if config.freqs is None:
        raise InputError("simulate requires trap frequencies "
                         "(freq_x_hz, freq_y_hz, freq_z_hz)")
    if config.density is None:
        raise InputError("simulate requires an initial density (density_cm3)")
    if config.mode is None:
        raise InputError("simulate requires a mode (rf_shield or free_evolution)")
    species = get_species(config.species_label)
    trap = dynamics.TrapConfig(freq_x=config.freqs[0], freq_y=config.freqs[1],
                               freq_z=config.freqs[2], offset_field=config.field_b,
                               background_rate=config.background_rate)
    volume = dynamics.cloud_volume(config.temperature, trap, species)
    initial = _initial_state(config, volume)
    t_grid = np.linspace(0.0, config.duration, config.samples)
    trajectory = dynamics.evolve(initial, trap, species, config.mode,
                                 _resolve_rates(config, species), config.beta2,
                                 t_grid)
    if config.noise_fraction > 0.0:
        rng = np.random.default_rng(config.seed)
        noisy = {}
        for name in ("n3", "n2", "n1"):
            values = getattr(trajectory, name)
            factor = 1.0 + config.noise_fraction * rng.standard_normal(len(values))
            noisy[name] = np.maximum(values * factor, 0.0)
        trajectory = dynamics.CloudTrajectory(
            times=trajectory.times, temperature=trajectory.temperature,
            volume=trajectory.volume, **noisy)
    return trajectory


def _cmd_simulate(args) -> int:
    config = _gather_config(args)
    trajectory = simulate_trajectory(config)
    io.emit_table(io.TRAJECTORY_HEADER, io.trajectory_rows(trajectory), out=args.out)
    return 0


def _constant_volume(config: io.RunConfig) -> float | None:
    if config.freqs is None:
        return None
    species = get_species(config.species_label)
    trap = dynamics.TrapConfig(freq_x=config.freqs[0], freq_y=config.freqs[1],
                               freq_z=config.freqs[2], offset_field=config.field_b,
                               background_rate=config.background_rate)
    return dynamics.cloud_volume(config.temperature, trap, species)


def run_fit(method: str, data: fitting.TimeSeries, config: io.RunConfig) -> fitting.FitResult:
    """Dispatch one of the estimation methods on parsed data."""
    species = get_species(config.species_label)
    if method == "i":
        volume = None if data.volume_series() is not None else _constant_volume(config)
        if data.volume_series() is None and volume is None:
            raise InputError("method i needs volume data or trap frequencies "
                             "in the config")
        return fitting.fit_method_i(data, config.background_rate, volume=volume)
    if method == "ii":
        return fitting.fit_method_ii(data, config.background_rate)
    if method == "iii":
        return fitting.fit_method_iii(data, species, config.field_b)
    if method == "beta2":
        return fitting.fit_beta2(data)
    raise InputError(f"unknown fit method {method!r}")


def _cmd_fit(args) -> int:
    config = _gather_config(args)
    data = io.parse_timeseries_csv(args.data)
    result = run_fit(args.method, data, config)

    lines = [f"method={args.method}",
             f"model_tag={result.model_tag}",
             f"converged={str(result.converged).lower()}",
             f"residual_norm={io.format_number(result.residual_norm)}"]
    if result.flags:
        lines.append("flags=" + ";".join(result.flags))
    for name in result.param_names:
        lines.append(f"{name}={io.format_number(result.params[name])}"
                     f" +- {io.format_number(result.uncertainties[name])}")
    sys.stdout.write("\n".join(lines) + "\n")

    if args.out:
        rows = [(name, result.params[name], result.uncertainties[name])
                for name in result.param_names]
        io.emit_table(("param", "value", "uncertainty"), rows, out=args.out)
    return 0


def _cmd_presets(args) -> int:
    lines = ["species:"]
    for label in sorted(SPECIES):
        sp = SPECIES[label]
        lines.append(f"  {label}: S={io.format_number(sp.spin_S)}, "
                     f"g={io.format_number(sp.lande_g)}, "
                     f"mass_kg={io.format_number(sp.mass)}, "
                     f"statistics={'boson' if sp.statistics_sign > 0 else 'fermion'}")
    lines.append("scenarios:")
    for label in sorted(SCENARIOS):
        entries = ", ".join(
            f"{k}={io.format_number(v) if isinstance(v, float) else v}"
            for k, v in sorted(SCENARIOS[label].items()))
        lines.append(f"  {label}: {entries}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


_COMMANDS = {
    "rate": _cmd_rate,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "presets": _cmd_presets,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NumericalError as exc:
        print(f"diprelax: numerical failure: {exc}", file=sys.stderr)
        return 1
    except (InputError, DipRelaxError) as exc:
        print(f"diprelax: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
