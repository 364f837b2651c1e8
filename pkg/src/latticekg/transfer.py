"""Bridges between continuous functions and lattice fields.

Test-function side: a closed-form family of (modulated) Gaussians with
separable per-axis factors, so cell averaging, sampling and the continuous
Fourier transform all reduce to one-dimensional closed forms or
one-dimensional quadrature.  Lattice side: mean projection, Shannon
interpolation, continuous-weight Sobolev errors, and the bilinear aliasing
defect of the interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.special import erf

from .grids import GridSpec, LatticeField
from .spectral import dft_values, idft_values

__all__ = [
    "GaussianTerm",
    "SeparableTerm",
    "ContinuousFunction",
    "QuadratureError",
    "mean_project",
    "shannon_interpolate",
    "restrict_to_coarse",
    "projection_interpolation_residual",
    "hs_error",
    "continuous_sobolev_norm",
    "aliasing_defect",
    "sinc",
]

OUTSIDE_BOX_TOL = 1e-14


class QuadratureError(RuntimeError):
    """Cell quadrature failed to converge to the requested tolerance."""


def sinc(x: np.ndarray) -> np.ndarray:
    """sin(x)/x with sinc(0) = 1 (unnormalized convention)."""
    return np.sinc(np.asarray(x) / np.pi)


@dataclass(frozen=True)
class GaussianTerm:
    """One separable term ``A * Re prod_j exp(-(x_j-c_j)^2/(2 s^2) + i k_j (x_j-c_j))``.

    A zero wavevector gives a plain Gaussian; a nonzero one a plane-wave
    modulated Gaussian (cosine modulation after taking the real part).
    """

    amplitude: float
    center: tuple
    width: float
    wavevector: tuple

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("Gaussian width must be positive")
        if len(self.center) != len(self.wavevector):
            raise ValueError("center and wavevector dimensions differ")

    @property
    def d(self) -> int:
        return len(self.center)

    def _axis_factor(self, j: int, x: np.ndarray) -> np.ndarray:
        y = np.asarray(x, dtype=float) - self.center[j]
        g = np.exp(-(y * y) / (2.0 * self.width**2))
        k = self.wavevector[j]
        if k == 0.0:
            return g.astype(complex)
        return g * np.exp(1j * k * y)

    def _axis_fourier(self, j: int, xi: np.ndarray) -> np.ndarray:
        """1d transform of the complex axis factor, int f(x) e^{-i x xi} dx."""
        s = self.width
        k = self.wavevector[j]
        xi = np.asarray(xi, dtype=float)
        return (
            s
            * np.sqrt(2.0 * np.pi)
            * np.exp(-(s * s) * (xi - k) ** 2 / 2.0)
            * np.exp(-1j * self.center[j] * xi)
        )

    def _axis_cell_means(self, j: int, centers: np.ndarray, h: float) -> np.ndarray:
        """Per-cell means (1/h) int_{a-h/2}^{a+h/2} f_j(x) dx along axis j."""
        k = self.wavevector[j]
        s = self.width
        if k == 0.0:
            z = (centers - self.center[j]) / (s * np.sqrt(2.0))
            dz = h / (2.0 * s * np.sqrt(2.0))
            vals = s * np.sqrt(np.pi / 2.0) * (erf(z + dz) - erf(z - dz)) / h
            return vals.astype(complex)
        return _gl_cell_means(lambda x: self._axis_factor(j, x), centers, h)

    def support_radius(self, tol: float) -> float:
        """Radius around the origin outside which |term| <= tol."""
        amp = max(abs(self.amplitude), tol)
        reach = self.width * np.sqrt(2.0 * np.log(amp / tol))
        return float(np.linalg.norm(self.center) + reach)


# Gauss-Legendre order 8 reference rule on [-1/2, 1/2]
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GL_NODES = _GL_NODES / 2.0
_GL_WEIGHTS = _GL_WEIGHTS / 2.0


def _gl_cell_means(f, centers: np.ndarray, h: float, tol: float = 1e-12) -> np.ndarray:
    """Composite Gauss-Legendre (order 8 per panel) cell means with refinement.

    Panels per cell are doubled until two successive composite levels agree
    to ``tol`` per unit cell measure.
    """

    def level(n_panels: int) -> np.ndarray:
        width = h / n_panels
        offsets = (-h / 2.0 + width * (0.5 + np.arange(n_panels)))[:, None]
        nodes = offsets + width * _GL_NODES[None, :]  # (panels, 8)
        pts = centers[:, None, None] + nodes[None, :, :]
        vals = f(pts.ravel()).reshape(pts.shape)
        return np.tensordot(vals, _GL_WEIGHTS, axes=([2], [0])).sum(axis=1) / n_panels

    prev = level(1)
    n = 2
    while n <= 64:
        cur = level(n)
        if np.max(np.abs(cur - prev)) <= tol:
            return cur
        prev = cur
        n *= 2
    raise QuadratureError(
        f"cell quadrature did not converge to {tol} per cell at 64 panels"
    )


@dataclass(frozen=True)
class SeparableTerm:
    """Generic separable term ``A * Re prod_j f_j(x_j)`` with callable factors.

    Serves functions outside the Gaussian family (constants, polynomials);
    cell means always go through the quadrature path and the continuous
    Fourier transform is unavailable.
    """

    amplitude: float
    factors: tuple
    radius: float = np.inf

    @property
    def d(self) -> int:
        return len(self.factors)

    def _axis_factor(self, j: int, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.factors[j](np.asarray(x, dtype=float)), dtype=complex)

    def _axis_fourier(self, j: int, xi: np.ndarray) -> np.ndarray:
        raise NotImplementedError(
            "generic separable terms carry no closed-form Fourier transform"
        )

    def _axis_cell_means(self, j: int, centers: np.ndarray, h: float) -> np.ndarray:
        return _gl_cell_means(lambda x: self._axis_factor(j, x), centers, h)

    def support_radius(self, tol: float) -> float:
        return float(self.radius)


@dataclass(frozen=True)
class ContinuousFunction:
    """Real-valued test function: finite sum of separable Gaussian terms."""

    d: int
    terms: tuple

    def __post_init__(self):
        for t in self.terms:
            if t.d != self.d:
                raise ValueError("term dimension does not match function dimension")

    @classmethod
    def gaussian(
        cls, d: int, amplitude: float = 1.0, width: float = 1.0, center=None
    ) -> "ContinuousFunction":
        center = tuple(center) if center is not None else (0.0,) * d
        return cls(d, (GaussianTerm(amplitude, center, width, (0.0,) * d),))

    @classmethod
    def modulated_gaussian(
        cls, d: int, amplitude: float, width: float, wavevector, center=None
    ) -> "ContinuousFunction":
        center = tuple(center) if center is not None else (0.0,) * d
        return cls(d, (GaussianTerm(amplitude, center, width, tuple(wavevector)),))

    @classmethod
    def zero(cls, d: int) -> "ContinuousFunction":
        return cls(d, ())

    @property
    def is_zero(self) -> bool:
        return len(self.terms) == 0 or all(t.amplitude == 0.0 for t in self.terms)

    def __call__(self, *coords) -> np.ndarray:
        """Pointwise values on broadcastable coordinate arrays (one per axis)."""
        if len(coords) != self.d:
            raise ValueError(f"expected {self.d} coordinate arrays")
        shape = np.broadcast_shapes(*(np.shape(c) for c in coords))
        out = np.zeros(shape)
        for term in self.terms:
            prod = term.amplitude * reduce(
                np.multiply, (term._axis_factor(j, coords[j]) for j in range(self.d))
            )
            out = out + prod.real
        return out

    def fourier(self, *xis) -> np.ndarray:
        """Continuous Fourier transform ``int f(x) e^{-i x.xi} dx`` (complex)."""
        if len(xis) != self.d:
            raise ValueError(f"expected {self.d} frequency arrays")
        shape = np.broadcast_shapes(*(np.shape(x) for x in xis))
        out = np.zeros(shape, dtype=complex)
        for term in self.terms:
            plus = term.amplitude * reduce(
                np.multiply, (term._axis_fourier(j, xis[j]) for j in range(self.d))
            )
            minus = term.amplitude * reduce(
                np.multiply, (term._axis_fourier(j, -np.asarray(xis[j])) for j in range(self.d))
            )
            # transform of the real part
            out = out + 0.5 * (plus + np.conj(minus))
        return out

    def sample(self, grid: GridSpec) -> LatticeField:
        """Pointwise samples at the grid sites."""
        ax = grid.axis_sites()
        vals = np.zeros(grid.shape)
        for term in self.terms:
            factors = [term._axis_factor(j, ax) for j in range(self.d)]
            vals = vals + term.amplitude * _tensor_product(factors).real
        return LatticeField(grid, vals)

    def support_radius(self, tol: float = OUTSIDE_BOX_TOL) -> float:
        if self.is_zero:
            return 0.0
        return max(t.support_radius(tol) for t in self.terms if t.amplitude != 0.0)


def _tensor_product(factors: list) -> np.ndarray:
    return reduce(np.multiply.outer, factors)


def mean_project(phi: ContinuousFunction, grid: GridSpec) -> LatticeField:
    """Mean projection: per-cell averages ``h^-d int_cell phi(x) dx``.

    Pure Gaussian axes use the error-function closed form; modulated axes a
    converging composite Gauss-Legendre rule (order 8 per panel).
    """
    if phi.d != grid.d:
        raise ValueError("function and grid dimensions differ")
    centers = grid.axis_sites()
    vals = np.zeros(grid.shape)
    for term in phi.terms:
        factors = [term._axis_cell_means(j, centers, grid.h) for j in range(grid.d)]
        vals = vals + term.amplitude * _tensor_product(factors).real
    return LatticeField(grid, vals)


def shannon_interpolate(u: LatticeField, r: int) -> LatticeField:
    """Band-limited refinement: zero-pad the spectrum into the finer torus.

    Samples the periodized band-limited extension of ``u`` exactly at the
    sites of the grid with step ``h/r`` (r a power of 2).  The result is
    complex in general: the unpaired Nyquist mode of the coarse grid has no
    mirror partner after padding.
    """
    if r < 1 or (r & (r - 1)) != 0:
        raise ValueError(f"refinement factor must be a power of 2, got {r}")
    if r == 1:
        return LatticeField(u.grid, u.values.copy())
    grid = u.grid
    fine = grid.refined(r)
    coeffs = dft_values(u.values, grid.h)
    padded = np.zeros(fine.shape, dtype=complex)
    m = grid.m_per_axis
    off = fine.m_per_axis // 2 - m // 2
    padded[tuple(slice(off, off + m) for _ in range(grid.d))] = coeffs
    return LatticeField(fine, idft_values(padded, fine.h))


def restrict_to_coarse(u_fine: LatticeField, r: int) -> LatticeField:
    """Subsample every r-th site back onto the coarse grid."""
    fine = u_fine.grid
    if fine.m_per_axis % r != 0:
        raise ValueError("fine grid is not an r-fold refinement")
    coarse = GridSpec(fine.d, fine.h * r, fine.m_per_axis // r)
    vals = u_fine.values[tuple(slice(None, None, r) for _ in range(fine.d))]
    return LatticeField(coarse, vals.copy())


def projection_interpolation_residual(
    phi: ContinuousFunction, grid: GridSpec
) -> float:
    """Max deviation from the projection identity on the dual grid.

    Compares the transform of the mean projection against
    ``F(phi)(xi) * prod_j sinc(h xi_j / 2)`` frequency by frequency.  On the
    periodic box the left side is the periodization of the right, so the
    residual floors at the spectral mass beyond the torus; it is small only
    for functions decaying fast in both space and frequency.
    """
    if phi.is_zero:
        return 0.0
    proj = mean_project(phi, grid)
    lhs = dft_values(proj.values, grid.h)
    mesh = grid.frequency_mesh()
    rhs = phi.fourier(*mesh)
    for j in range(grid.d):
        rhs = rhs * sinc(grid.h * np.asarray(mesh[j]) / 2.0)
    return float(np.max(np.abs(lhs - rhs)))


def _continuous_weight(grid: GridSpec, s: float) -> np.ndarray:
    mesh = grid.frequency_mesh()
    xi2 = sum(np.broadcast_to(m * m, grid.shape) for m in mesh)
    return (1.0 + xi2) ** s


def hs_error(a: LatticeField, b: LatticeField, s: float) -> float:
    """Continuous-weight Sobolev norm ``H^s`` of ``a - b`` on a common grid.

    Uses the flat weight ``(1+|xi|^2)^s`` (not the lattice symbol): this is
    the norm in which band-limited interpolants are compared against
    continuum references on the fine grid.
    """
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    if s < 0:
        raise ValueError("hs_error expects s >= 0")
    grid = a.grid
    diff = dft_values(a.values - b.values, grid.h)
    total = np.sum(_continuous_weight(grid, s) * np.abs(diff) ** 2)
    return float(np.sqrt(total / (grid.m_per_axis * grid.h) ** grid.d))


def continuous_sobolev_norm(
    phi: ContinuousFunction, grid: GridSpec, s: float
) -> float:
    """Continuous ``H^s`` norm of ``phi`` by quadrature on the grid's dual box.

    Accurate once the dual box contains the spectral mass of ``phi``.
    """
    mesh = grid.frequency_mesh()
    fhat = phi.fourier(*mesh)
    total = np.sum(_continuous_weight(grid, s) * np.abs(fhat) ** 2)
    return float(np.sqrt(total / (grid.m_per_axis * grid.h) ** grid.d))


def aliasing_defect(
    f: LatticeField, g: LatticeField, s: float, r: int
) -> float:
    """Bilinear interpolation defect ``|| S_h(fg) - (S_h f)(S_h g) ||_{H^s}``.

    The lattice product ``fg`` aliases frequencies leaving the torus; the
    pointwise product of the interpolants keeps them.  Both sides are
    compared on the r-fold refined grid (r >= 2 represents the full product
    band of two coarse-band factors).
    """
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    product = LatticeField(f.grid, f.values * g.values)
    lhs = shannon_interpolate(product, r)
    sf = shannon_interpolate(f, r)
    sg = shannon_interpolate(g, r)
    rhs = LatticeField(lhs.grid, sf.values * sg.values)
    return hs_error(lhs, rhs, s)
