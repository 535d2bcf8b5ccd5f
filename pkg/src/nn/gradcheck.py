"""
Central finite differences, the oracle the analytic gradients are checked against.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

DEFAULT_STEP = 1e-5


def numerical_gradient(
    f: Callable[[np.ndarray], float], x: np.ndarray, h: float = DEFAULT_STEP
) -> np.ndarray:
    """``(f(x + h e_i) - f(x - h e_i)) / 2h`` for every entry of ``x``."""
    base = np.array(x, dtype=np.float64, copy=True)
    grad = np.zeros_like(base)
    flat = base.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        plus = f(base)
        flat[i] = original - h
        minus = f(base)
        flat[i] = original
        out[i] = (plus - minus) / (2.0 * h)
    return grad


def gradients_close(
    analytic: np.ndarray, numeric: np.ndarray, rtol: float = 1e-4, atol: float = 1e-8
) -> bool:
    """Relative agreement with an absolute floor for entries near zero."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    return bool(np.all(np.abs(analytic - numeric) <= np.maximum(rtol * scale, atol)))


__all__ = ["DEFAULT_STEP", "gradients_close", "numerical_gradient"]
