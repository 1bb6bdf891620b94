"""Pure-NumPy kernel backend.

Mirrors the compiled extension ``diprelax._kernels`` function for function;
:mod:`diprelax.kernels` picks whichever is importable.  Formulas must stay in
lockstep with the extension (enforced by the backend-equivalence tests).
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

_C_FLIP = 8.0 * np.pi / 15.0
_C_ELASTIC = 16.0 * np.pi / 45.0


def exchange_ratio(x: np.ndarray) -> np.ndarray:
    """Exchange-to-direct ratio h of the two-boson dipolar cross section.

    h(x) = -1/2 - (3/8) (1-x^2)^2 / (x(1+x^2)) * log((1-x)^2/(1+x)^2),
    evaluated for x >= 1 with the limit h(1) = -1/2.  Three regimes keep the
    evaluation stable: an exact rewrite in d = x-1 near 1 (the closed form is
    0*inf there), log1p in the bulk, and the large-x tail 1 - 4/x^2.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)

    one = x == 1.0
    big = x > 1e7
    near = (x - 1.0 < 1e-4) & ~one & ~big
    rest = ~(one | near | big)

    out[one] = -0.5

    d = x[near] - 1.0
    num = d * (2.0 + d)
    out[near] = -0.5 - 0.75 * num * num / ((1.0 + d) * (2.0 + d * (2.0 + d))) * np.log(
        d / (2.0 + d))

    xb = x[big]
    with np.errstate(over="ignore"):
        out[big] = 1.0 - 4.0 / (xb * xb)

    xr = x[rest]
    num = 1.0 - xr * xr
    out[rest] = -0.5 - 0.75 * num * num / (xr * (1.0 + xr * xr)) * np.log1p(
        -2.0 / (xr + 1.0))
    return out


def weighted_sigma_v(E, dE, bracket_sq, spin, w0, w1, w2, mass):
    """Elementwise (w0 s0 + w1 s1 + w2 s2)(E) * v_rel(E) in m^3/s.

    E is the relative kinetic energy (hbar^2 k^2 / m convention), dE the
    Zeeman splitting.  The flip terms are folded as s_n * v =
    c_n [1+h(r_n)] * 2 sqrt((E + n dE)/m), which stays finite at E -> 0.
    """
    E = np.asarray(E, dtype=np.float64)
    v = 2.0 * np.sqrt(E / mass)
    s0 = 0.5 * _C_ELASTIC * spin**4 * bracket_sq  # [1 + h(1)] = 1/2
    tot = w0 * s0 * v
    with np.errstate(divide="ignore"):
        if w1 != 0.0:
            r = np.sqrt(1.0 + dE / E)
            tot += w1 * _C_FLIP * spin**3 * bracket_sq \
                * (1.0 + exchange_ratio(r)) * 2.0 * np.sqrt((E + dE) / mass)
        if w2 != 0.0:
            r = np.sqrt(1.0 + 2.0 * dE / E)
            tot += w2 * _C_FLIP * spin**2 * bracket_sq \
                * (1.0 + exchange_ratio(r)) * 2.0 * np.sqrt((E + 2.0 * dE) / mass)
    return tot


def weighted_sigma_v_mean(usq, kT, dE, bracket_sq, spin, w0, w1, w2, mass):
    """Monte-Carlo reduction: mean of weighted sigma*v over chi^2_3 draws.

    ``usq`` holds chi-squared(3) samples of the standardized relative speed;
    E = kT * usq / 2.
    """
    E = 0.5 * kT * np.asarray(usq, dtype=np.float64)
    return float(np.mean(weighted_sigma_v(E, dE, bracket_sq, spin, w0, w1, w2, mass)))
