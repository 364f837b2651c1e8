"""Periodic lattice grids and grid functions.

The computational domain is a periodic truncation of the infinite lattice
``h*Z^d``: sites are ``a = h*k`` for integer multi-indices ``k`` in
``[-m/2, m/2)^d``, stored in row-major order with monotonically increasing
coordinates along every axis.  The dual frequency grid lives on the torus
``[-pi/h, pi/h)^d`` with spacing ``2*pi/(m*h)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = ["GridSpec", "LatticeField", "SpectralField"]


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on ``h*Z^d`` with ``m_per_axis`` sites per axis.

    Parameters
    ----------
    d : int
        Spatial dimension, 1 to 3.
    h : float
        Lattice step, strictly positive.
    m_per_axis : int
        Sites per axis; must be even and at least 4 so the frequency set
        is symmetric apart from the single Nyquist index per axis.
    """

    d: int
    h: float
    m_per_axis: int

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.d}")
        if not self.h > 0:
            raise ValueError(f"lattice step must be positive, got {self.h}")
        m = self.m_per_axis
        if m < 4 or m % 2 != 0:
            raise ValueError(f"m_per_axis must be even and >= 4, got {m}")

    @property
    def shape(self) -> tuple:
        return (self.m_per_axis,) * self.d

    @property
    def n_sites(self) -> int:
        return self.m_per_axis ** self.d

    @property
    def box_length(self) -> float:
        """Side length ``L = h * m_per_axis`` of the periodic box."""
        return self.h * self.m_per_axis

    def axis_sites(self) -> np.ndarray:
        """Site coordinates ``h*k`` along one axis, k = -m/2 .. m/2-1."""
        m = self.m_per_axis
        return self.h * (np.arange(m) - m // 2)

    def axis_frequencies(self) -> np.ndarray:
        """Frequencies ``2*pi*k/(m*h)`` along one axis, same ordering."""
        m = self.m_per_axis
        return 2.0 * np.pi * (np.arange(m) - m // 2) / (m * self.h)

    def site_mesh(self) -> tuple:
        """Tuple of d broadcastable coordinate arrays."""
        return _site_mesh(self)

    def frequency_mesh(self) -> tuple:
        return _freq_mesh(self)

    def refined(self, r: int) -> "GridSpec":
        """Grid with step ``h/r`` on the same box (r a positive power of 2)."""
        if r < 1 or (r & (r - 1)) != 0:
            raise ValueError(f"refinement factor must be a power of 2, got {r}")
        return GridSpec(self.d, self.h / r, self.m_per_axis * r)


@lru_cache(maxsize=64)
def _site_mesh(grid: GridSpec) -> tuple:
    ax = grid.axis_sites()
    return tuple(
        ax.reshape([-1 if j == i else 1 for j in range(grid.d)])
        for i in range(grid.d)
    )


@lru_cache(maxsize=64)
def _freq_mesh(grid: GridSpec) -> tuple:
    ax = grid.axis_frequencies()
    return tuple(
        ax.reshape([-1 if j == i else 1 for j in range(grid.d)])
        for i in range(grid.d)
    )


def _check_values(grid: GridSpec, values: np.ndarray, what: str) -> np.ndarray:
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise ValueError(
            f"{what} shape {values.shape} does not match grid shape {grid.shape}"
        )
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{what} contains non-finite entries")
    return values


@dataclass(frozen=True)
class LatticeField:
    """Values of a grid function ``u: h*Z^d -> R`` (or ``C``).

    Treated as an immutable snapshot: operations return new fields.
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "values", _check_values(self.grid, self.values, "field values")
        )

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)

    def astype_real(self, tol: float = 1e-10) -> "LatticeField":
        """Drop an imaginary part that is below ``tol`` relative to the field."""
        if self.is_real:
            return self
        scale = max(np.max(np.abs(self.values)), 1.0)
        imax = np.max(np.abs(self.values.imag))
        if imax > tol * scale:
            raise ValueError(
                f"imaginary part {imax:.3e} too large to discard (scale {scale:.3e})"
            )
        return LatticeField(self.grid, self.values.real.copy())

    def __add__(self, other: "LatticeField") -> "LatticeField":
        self._require_same_grid(other)
        return LatticeField(self.grid, self.values + other.values)

    def __sub__(self, other: "LatticeField") -> "LatticeField":
        self._require_same_grid(other)
        return LatticeField(self.grid, self.values - other.values)

    def __mul__(self, factor) -> "LatticeField":
        if isinstance(factor, LatticeField):
            self._require_same_grid(factor)
            return LatticeField(self.grid, self.values * factor.values)
        return LatticeField(self.grid, self.values * factor)

    __rmul__ = __mul__

    def _require_same_grid(self, other: "LatticeField"):
        if self.grid != other.grid:
            raise ValueError("fields live on different grids")


@dataclass(frozen=True)
class SpectralField:
    """Discrete Fourier coefficients ``g_hat(xi_k)`` on the frequency torus.

    Coefficients are indexed by integer frequencies ``k in [-m/2, m/2)^d``
    (same centered ordering as site indices), so ``xi_k = 2*pi*k/(m*h)``
    ranges over ``[-pi/h, pi/h)^d``.
    """

    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = _check_values(self.grid, self.coeffs, "spectral coefficients")
        object.__setattr__(self, "coeffs", np.asarray(coeffs, dtype=complex))
