"""Rate-constant estimation from measured or synthetic time series.

Implements the three standard ways of extracting the relaxation rate
constant from trap data, plus the two-body loss constant of the next-lower
sublevel:

* method i   - decay of the stretched-state population under an rf shield,
               fitted to the two-body + background loss solution
               (yields the event rate beta_event);
* method ii  - free-evolution decay with a linear-in-time cloud volume
               (yields beta_loss);
* method iii - heating slope of the cloud temperature (yields beta_loss);
* beta2      - loading curve of the next-lower sublevel, first-order
               expansion in its own loss constant.

All fits run through one damped Gauss-Newton engine with numerically
differenced Jacobians; parameter uncertainties come from the covariance
s^2 (J^T W J)^(-1) with s^2 the reduced residual variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import least_squares

from .dynamics import M2_VOLUME_RATIO
from .errors import (DegenerateFitError, InputError, InsufficientDataError,
                     NumericalError)
from .species import SpeciesConfig, temperature_step

_VOLUME_PREFACTOR = math.sqrt(8.0) * (2.0 * math.pi) ** 1.5

#: Fraction of the total population in the next-lower sublevel above which
#: free-evolution decay data are dropped from method-ii fits.
N2_WINDOW_FRACTION = 0.25

#: Method-iii default window keeps data while N3 is above this fraction of
#: its initial value (heating slope read off the initial decay).
N3_WINDOW_FRACTION = 0.8


@dataclass(frozen=True)
class TimeSeries:
    """Sampled trap observables on a common, strictly increasing time axis.

    ``columns`` maps canonical names (N3, N2, N1, T, sigma_x, sigma_y,
    sigma_z, V) to SI-valued arrays; ``noise_sigma`` optionally carries
    per-point uncertainties for a subset of columns.
    """

    times: np.ndarray
    columns: dict
    noise_sigma: dict = field(default_factory=dict)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        if times.ndim != 1 or len(times) == 0:
            raise InputError("times must be a nonempty 1-d array")
        if np.any(~np.isfinite(times)) or np.any(np.diff(times) <= 0.0):
            raise InputError("times must be finite and strictly increasing")
        cols = {}
        for name, values in self.columns.items():
            arr = np.asarray(values, dtype=float)
            if arr.shape != times.shape:
                raise InputError(f"column {name!r} length does not match times")
            if np.any(~np.isfinite(arr)):
                raise InputError(f"column {name!r} holds non-finite values")
            cols[name] = arr
        object.__setattr__(self, "columns", cols)

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (np.array_equal(self.times, other.times)
                and set(self.columns) == set(other.columns)
                and all(np.array_equal(v, other.columns[k])
                        for k, v in self.columns.items()))

    def require(self, *names: str) -> tuple[np.ndarray, ...]:
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise InputError(f"time series lacks required column(s): {', '.join(missing)}")
        return tuple(self.columns[n] for n in names)

    def volume_series(self) -> np.ndarray | None:
        """Mean-volume column, derived from widths when not given directly."""
        if "V" in self.columns:
            return self.columns["V"]
        widths = [self.columns.get(f"sigma_{ax}") for ax in "xyz"]
        if all(w is not None for w in widths):
            return _VOLUME_PREFACTOR * widths[0] * widths[1] * widths[2]
        return None


@dataclass(frozen=True)
class FitResult:
    """Point estimates, covariance-derived uncertainties and diagnostics."""

    params: dict
    uncertainties: dict
    covariance: np.ndarray
    param_names: tuple
    residual_norm: float
    model_tag: str
    converged: bool = True
    flags: tuple = ()


def nonlinear_least_squares(model: Callable, times, values, init: Mapping[str, float],
                            *, sigma=None, scales: Mapping[str, float] | None = None,
                            model_tag: str = "custom") -> FitResult:
    """Weighted least squares for ``model(times, theta) -> values``.

    ``init`` fixes the parameter order; ``scales`` (optional, defaulting to
    |init| or 1) rescales parameters internally so that the finite-difference
    Jacobian is well conditioned across the ~25 orders of magnitude between
    atom numbers and rate constants.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    names = tuple(init)
    p = len(names)
    if len(values) < p:
        raise InsufficientDataError(
            f"need at least {p} points to fit {p} parameters, got {len(values)}")
    if not np.all(np.isfinite(list(init.values()))):
        raise InputError("initial parameter values must be finite")

    scale = np.array([abs((scales or init).get(n) or 0.0) or 1.0 for n in names])
    x0 = np.array([init[n] for n in names]) / scale
    weights = 1.0 / np.asarray(sigma, dtype=float) if sigma is not None else 1.0

    def residual(theta):
        return (model(times, theta * scale) - values) * weights

    try:
        res = least_squares(residual, x0, method="trf", jac="3-point",
                            xtol=1e-13, ftol=1e-13, gtol=1e-13)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise DegenerateFitError(f"least-squares engine failed: {exc}") from exc

    flags = []
    converged = res.status > 0
    if not converged:
        flags.append("max_iterations_reached")

    n = len(values)
    ssr = 2.0 * res.cost
    jac = np.atleast_2d(res.jac)
    u, svals, vt = np.linalg.svd(jac, full_matrices=False)
    cutoff = np.finfo(float).eps * max(jac.shape) * (svals[0] if len(svals) else 0.0)
    if np.sum(svals > cutoff) < p:
        raise DegenerateFitError(
            "singular normal matrix: one or more parameters are unconstrained",
            singular_values=svals.tolist())
    if n > p:
        s2 = ssr / (n - p)
    else:
        s2 = 0.0
        flags.append("zero_degrees_of_freedom")
    cov_scaled = (vt.T / svals**2) @ vt * s2
    cov = cov_scaled * np.outer(scale, scale)

    theta = res.x * scale
    params = dict(zip(names, theta.tolist()))
    uncertainties = dict(zip(names, np.sqrt(np.maximum(np.diag(cov), 0.0)).tolist()))
    return FitResult(params=params, uncertainties=uncertainties, covariance=cov,
                     param_names=names, residual_norm=math.sqrt(ssr),
                     model_tag=model_tag, converged=converged, flags=tuple(flags))


def _cumulative_decay_integral(gamma_bg: float, t: np.ndarray,
                               volume_of_t: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """J(t) = Int_0^t exp(-gamma s) / V(s) ds on the (shifted) data times."""
    fine = np.linspace(0.0, t[-1], 4097)
    integrand = np.exp(-gamma_bg * fine) / volume_of_t(fine)
    j_fine = cumulative_trapezoid(integrand, fine, initial=0.0)
    return np.interp(t, fine, j_fine)


def _two_body_model(gamma_bg: float, j_at_t: np.ndarray):
    """N(t) = N0 e^(-gamma t) / (1 + N0 beta J(t)), theta = (N0, beta)."""

    def model(t, theta):
        n0, beta = theta
        return n0 * np.exp(-gamma_bg * t) / (1.0 + n0 * beta * j_at_t)

    return model


def _initial_beta_guess(t, y, gamma_bg, volume0) -> float:
    slope = (y[1] - y[0]) / (t[1] - t[0])
    if y[0] <= 0.0:
        return 0.0
    guess = -(slope + gamma_bg * y[0]) * volume0 / y[0] ** 2
    return guess if math.isfinite(guess) else 0.0


def _resolve_volume(data: TimeSeries, volume) -> np.ndarray:
    if volume is None:
        series = data.volume_series()
        if series is None:
            raise InputError("no volume information: pass one or include "
                             "V / width columns in the data")
        return series
    arr = np.asarray(volume, dtype=float)
    if arr.ndim == 0:
        return np.full_like(data.times, float(arr))
    if arr.shape != data.times.shape:
        raise InputError("volume series length does not match the data")
    return arr


def fit_method_i(data: TimeSeries, gamma_bg: float, volume=None) -> FitResult:
    """Rf-shield decay fit: recovers {N0, beta_event}.

    ``gamma_bg`` comes from an independent low-density measurement and is
    held fixed; ``volume`` may be a constant, a per-point series, or omitted
    when the data carry volume/width columns (heating during the measurement
    then enters the fit through the time-dependent volume).
    """
    (y,) = data.require("N3")
    if gamma_bg < 0.0:
        raise InputError("gamma_bg must be >= 0")
    vol = _resolve_volume(data, volume)
    t = data.times - data.times[0]
    j_at_t = _cumulative_decay_integral(gamma_bg, t,
                                        lambda s: np.interp(s, t, vol))
    model = _two_body_model(gamma_bg, j_at_t)
    init = {"N0": y[0], "beta_event": _initial_beta_guess(t, y, gamma_bg, vol[0])}
    scales = {"N0": max(abs(y[0]), 1.0),
              "beta_event": vol[0] / (max(abs(y[0]), 1.0) * t[-1])}
    return nonlinear_least_squares(model, t, y, init, scales=scales,
                                   sigma=data.noise_sigma.get("N3"),
                                   model_tag="method-i")


def _default_method_ii_mask(data: TimeSeries) -> np.ndarray:
    if "N2" not in data.columns:
        return np.ones_like(data.times, dtype=bool)
    n2 = data.columns["N2"]
    total = np.zeros_like(n2)
    for name in ("N1", "N2", "N3"):
        if name in data.columns:
            total = total + data.columns[name]
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(total > 0.0, n2 / total, 0.0)
    return frac < N2_WINDOW_FRACTION


def _window_mask(times: np.ndarray, window) -> np.ndarray:
    lo, hi = window
    return (times >= lo) & (times <= hi)


def fit_method_ii(data: TimeSeries, gamma_bg: float, *, window=None) -> FitResult:
    """Free-evolution decay fit with linear volume growth: recovers {N0, beta_loss}.

    The cloud volume is modeled as V(t) = V0 (1 + c t) with (V0, c) taken
    from a straight-line fit to the measured volume series.  Unless an
    explicit ``window`` (t_lo, t_hi) is given, points where the next-lower
    sublevel holds more than 25% of the total population are dropped.
    """
    (y,) = data.require("N3")
    if gamma_bg < 0.0:
        raise InputError("gamma_bg must be >= 0")
    vol = _resolve_volume(data, None)
    mask = (_window_mask(data.times, window) if window is not None
            else _default_method_ii_mask(data))
    if np.count_nonzero(mask) < 2:
        raise InsufficientDataError(
            "fewer than two data points remain after the selection window")
    t = data.times[mask] - data.times[mask][0]
    y = y[mask]
    vol = vol[mask]

    growth, v0 = np.polyfit(t, vol, 1)
    c = growth / v0
    j_at_t = _cumulative_decay_integral(gamma_bg, t,
                                        lambda s: v0 * (1.0 + c * s))
    model = _two_body_model(gamma_bg, j_at_t)
    sigma = data.noise_sigma.get("N3")
    init = {"N0": y[0], "beta_loss": _initial_beta_guess(t, y, gamma_bg, v0)}
    scales = {"N0": max(abs(y[0]), 1.0),
              "beta_loss": v0 / (max(abs(y[0]), 1.0) * t[-1])}
    return nonlinear_least_squares(model, t, y, init, scales=scales,
                                   sigma=sigma[mask] if sigma is not None else None,
                                   model_tag="method-ii")


def fit_method_iii(data: TimeSeries, species: SpeciesConfig, field_b: float,
                   *, window=None) -> FitResult:
    """Heating-slope fit: recovers beta_loss from the temperature rise.

    Assumes the cloud stays in thermal equilibrium, so the early temperature
    evolution is linear: T(t) = T0 + beta_loss nbar dT_step t.  The default
    window keeps points while N3 remains above 80% of its initial value and
    the density nbar is averaged over the window.  A nonpositive fitted
    slope is returned as beta_loss <= 0 with a flag rather than an error.
    """
    temp, n3 = data.require("T", "N3")
    vol = _resolve_volume(data, None)
    if window is not None:
        mask = _window_mask(data.times, window)
    else:
        mask = n3 >= N3_WINDOW_FRACTION * n3[0]
    if np.count_nonzero(mask) < 2:
        raise InsufficientDataError(
            "fewer than two data points remain after the selection window")
    t = data.times[mask] - data.times[mask][0]
    temp = temp[mask]

    def line(tt, theta):
        return theta[0] + theta[1] * tt

    span = t[-1] if t[-1] > 0 else 1.0
    slope_scale = max(abs(temp[-1] - temp[0]) / span, abs(temp[0]) * 1e-3 / span)
    sigma = data.noise_sigma.get("T")
    base = nonlinear_least_squares(
        line, t, temp, {"T0": temp[0], "heating_slope": 0.0},
        scales={"T0": abs(temp[0]), "heating_slope": slope_scale},
        sigma=sigma[mask] if sigma is not None else None, model_tag="method-iii")

    nbar = float(np.mean(n3[mask] / vol[mask]))
    dt_step = temperature_step(species, field_b)
    if nbar <= 0.0 or dt_step <= 0.0:
        raise InputError("method iii needs positive density and a nonzero field")
    k = 1.0 / (nbar * dt_step)
    slope = base.params["heating_slope"]
    beta = slope * k

    transform = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, k]])
    cov = transform @ base.covariance @ transform.T
    params = dict(base.params, beta_loss=beta)
    uncertainties = dict(base.uncertainties,
                         beta_loss=base.uncertainties["heating_slope"] * k)
    flags = base.flags + (("nonpositive_slope",) if slope <= 0.0 else ())
    return FitResult(params=params, uncertainties=uncertainties, covariance=cov,
                     param_names=base.param_names + ("beta_loss",),
                     residual_norm=base.residual_norm, model_tag="method-iii",
                     converged=base.converged, flags=flags)


def fit_beta2(data: TimeSeries, *, window=None) -> FitResult:
    """Two-body loss constant of the next-lower sublevel: recovers {N20, beta2}.

    For short times every atom leaving the stretched state loads the next
    sublevel, so at zeroth order N2(t) = N20 + (N30 - N3(t)); the loss of
    that level enters through the first-order term in beta2 with the
    thermalized volume V2 = (3/2)^(3/2) V taken constant.
    """
    n2, n3 = data.require("N2", "N3")
    vol = _resolve_volume(data, None)
    mask = (_window_mask(data.times, window) if window is not None
            else np.ones_like(data.times, dtype=bool))
    if np.count_nonzero(mask) < 2:
        raise InsufficientDataError(
            "fewer than two data points remain after the selection window")
    t = data.times[mask] - data.times[mask][0]
    n2 = n2[mask]
    n3 = n3[mask]
    v2 = M2_VOLUME_RATIO * vol[mask][0]
    delta_n3 = n3[0] - n3

    def model(tt, theta):
        n20, beta2 = theta
        base = n20 + delta_n3
        correction = cumulative_trapezoid(base * base, tt, initial=0.0) / v2
        return base - beta2 * correction

    base_mag = max(float(np.max(np.abs(n2))), float(np.max(delta_n3)), 1.0)
    span = t[-1] if t[-1] > 0 else 1.0
    sigma = data.noise_sigma.get("N2")
    return nonlinear_least_squares(
        model, t, n2, {"N20": n2[0], "beta2": 0.0},
        scales={"N20": base_mag, "beta2": v2 / (base_mag * span)},
        sigma=sigma[mask] if sigma is not None else None, model_tag="beta2")
