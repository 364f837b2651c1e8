"""Finite-difference operators and discrete Lebesgue norms.

All operators act on periodic lattice fields and resolve neighbors through
the periodic wraparound.  They are pure functions on immutable snapshots.
"""

from __future__ import annotations

import numpy as np

from .grids import LatticeField

__all__ = [
    "discrete_laplacian",
    "forward_gradient",
    "backward_gradient",
    "centered_gradient",
    "lebesgue_norm",
    "power_nonlinearity",
    "laplacian_values",
    "forward_gradient_values",
]


def laplacian_values(values: np.ndarray, h: float) -> np.ndarray:
    """Nearest-neighbor second difference on a bare array (periodic)."""
    out = np.zeros_like(values, dtype=np.result_type(values, float))
    for axis in range(values.ndim):
        out += np.roll(values, -1, axis=axis) + np.roll(values, 1, axis=axis)
    out -= 2 * values.ndim * values
    out /= h * h
    return out


def discrete_laplacian(u: LatticeField) -> LatticeField:
    """Discrete Laplacian ``sum_j [u(a+h e_j) + u(a-h e_j) - 2 u(a)] / h^2``."""
    return LatticeField(u.grid, laplacian_values(u.values, u.grid.h))


def forward_gradient_values(values: np.ndarray, h: float) -> list:
    return [(np.roll(values, -1, axis=j) - values) / h for j in range(values.ndim)]


def forward_gradient(u: LatticeField) -> list:
    """Forward differences ``[u(a+h e_j) - u(a)] / h``, one field per axis."""
    return [LatticeField(u.grid, g) for g in forward_gradient_values(u.values, u.grid.h)]


def backward_gradient(u: LatticeField) -> list:
    """Backward differences ``[u(a) - u(a-h e_j)] / h``."""
    h = u.grid.h
    return [
        LatticeField(u.grid, (u.values - np.roll(u.values, 1, axis=j)) / h)
        for j in range(u.grid.d)
    ]


def centered_gradient(u: LatticeField) -> list:
    """Centered differences ``[u(a+h e_j) - u(a-h e_j)] / (2h)``.

    Equals the average of the forward and backward differences.
    """
    h = u.grid.h
    return [
        LatticeField(
            u.grid,
            (np.roll(u.values, -1, axis=j) - np.roll(u.values, 1, axis=j)) / (2 * h),
        )
        for j in range(u.grid.d)
    ]


def lebesgue_norm(u: LatticeField, q: float) -> float:
    """Discrete Lebesgue norm ``(h^d sum |u(a)|^q)^(1/q)``, or sup for q=inf."""
    if q == np.inf:
        return float(np.max(np.abs(u.values)))
    if q < 1:
        raise ValueError(f"Lebesgue exponent must satisfy q >= 1, got {q}")
    hd = u.grid.h ** u.grid.d
    if q == 2:
        # most common case; avoid the generic power
        return float(np.sqrt(hd * np.sum(np.abs(u.values) ** 2)))
    return float((hd * np.sum(np.abs(u.values) ** q)) ** (1.0 / q))


def power_values(values: np.ndarray, p: float) -> np.ndarray:
    """Pointwise ``|u|^(p-1) u`` with the 0 |-> 0 convention for fractional p."""
    if p == 3.0:
        return values * values * values
    absu = np.abs(values)
    # 0**(p-1) is 0 for p > 1, so no special casing is needed beyond p > 1
    return absu ** (p - 1.0) * values


def power_nonlinearity(u: LatticeField, p: float) -> LatticeField:
    """Defocusing power nonlinearity ``|u|^(p-1) u`` applied pointwise.

    Requires ``p > 1``; the configuration layer additionally rejects
    ``p >= 3`` in dimension 3.
    """
    if not p > 1:
        raise ValueError(f"nonlinearity exponent must satisfy p > 1, got {p}")
    if not u.is_real:
        raise ValueError("power nonlinearity is defined for real-valued fields")
    return LatticeField(u.grid, power_values(u.values, p))
