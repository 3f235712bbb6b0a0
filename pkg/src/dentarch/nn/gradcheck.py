"""Finite-difference gradient verification.

Central differences at h=1e-5 in float64; analytic gradients must match with
relative error below 1e-4 elementwise (absolute floor for near-zero entries).
"""

from __future__ import annotations

import numpy as np

from .tensor import Tensor


def gradcheck(fn, tensors: list[Tensor], h: float = 1e-5,
              rtol: float = 1e-4, atol: float = 1e-7) -> float:
    """Compare analytic and numeric gradients of scalar-valued fn(tensors).

    Returns the worst relative error; raises AssertionError on failure.
    """
    for t in tensors:
        t.zero_grad()
    out = fn()
    out.backward()
    worst = 0.0
    for t in tensors:
        analytic = t.grad if t.grad is not None else np.zeros_like(t.data)
        flat = t.data.reshape(-1)
        numeric = np.zeros_like(flat)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            hi = fn().item()
            flat[i] = orig - h
            lo = fn().item()
            flat[i] = orig
            numeric[i] = (hi - lo) / (2.0 * h)
        numeric = numeric.reshape(t.data.shape)
        denom = np.maximum(np.abs(numeric), np.abs(analytic))
        err = np.abs(analytic - numeric) / np.maximum(denom, atol / rtol)
        worst = max(worst, float(err.max()) if err.size else 0.0)
        if not np.all(err <= rtol):
            bad = np.unravel_index(err.argmax(), err.shape)
            raise AssertionError(
                f"gradcheck failed at {bad}: analytic={analytic[bad]:.8g} "
                f"numeric={numeric[bad]:.8g} rel={err[bad]:.3g}")
    return worst
