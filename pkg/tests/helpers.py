"""Shared test utilities: independent finite-difference oracles and map builders."""

from __future__ import annotations

import numpy as np

from singclass.model import MapModel


def fd_directional(model: MapModel, u, v, order: int, step: float = 1e-4) -> np.ndarray:
    """Central finite-difference directional derivative (independent of jets)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    f = lambda s: model(u + s * v)
    if order == 1:
        return (f(step) - f(-step)) / (2 * step)
    if order == 2:
        return (f(step) - 2 * f(0.0) + f(-step)) / step**2
    if order == 3:
        return (f(2 * step) - 2 * f(step) + 2 * f(-step) - f(-2 * step)) / (2 * step**3)
    raise ValueError("finite differences implemented up to order 3")


def reference_truncated_convolution(a: np.ndarray, b: np.ndarray, orders) -> np.ndarray:
    """Direct multi-index convolution; the independent oracle for jet products."""
    out = np.zeros_like(a)
    for idx in np.ndindex(*[o + 1 for o in orders]):
        total = 0.0
        for sub in np.ndindex(*[i + 1 for i in idx]):
            rest = tuple(i - s for i, s in zip(idx, sub))
            total += a[sub] * b[rest]
        out[idx] = total
    return out


def gallery_points(model: MapModel, rng: np.random.Generator, count: int, radius: float = 0.5):
    return [radius * rng.standard_normal(model.n) for _ in range(count)]
