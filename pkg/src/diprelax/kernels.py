"""Kernel backend selection.

Imports the compiled extension when it is installed, otherwise falls back to
the NumPy implementation.  ``BACKEND`` names the active one; both expose
``exchange_ratio``, ``weighted_sigma_v`` and ``weighted_sigma_v_mean``.
"""

from __future__ import annotations

import numpy as np

from . import kernels_py

try:
    from . import _kernels  # type: ignore[attr-defined]
except ImportError:
    _kernels = None

_impl = _kernels if _kernels is not None else kernels_py
BACKEND: str = _impl.BACKEND_NAME


def available_backends() -> dict:
    """Importable backends keyed by name (for tests and benchmarks)."""
    out = {"python": kernels_py}
    if _kernels is not None:
        out["compiled"] = _kernels
    return out


def _as_c_double(x) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=np.float64)


def exchange_ratio_array(x) -> np.ndarray:
    return _impl.exchange_ratio(_as_c_double(x))


def weighted_sigma_v(E, dE, bracket_sq, spin, w0, w1, w2, mass) -> np.ndarray:
    return _impl.weighted_sigma_v(_as_c_double(E), dE, bracket_sq, spin,
                                  w0, w1, w2, mass)


def weighted_sigma_v_mean(usq, kT, dE, bracket_sq, spin, w0, w1, w2, mass) -> float:
    return _impl.weighted_sigma_v_mean(_as_c_double(usq), kT, dE, bracket_sq,
                                       spin, w0, w1, w2, mass)
