"""Dispersive decay machinery for the (mass, alpha) symbol family.

Covers the frequency-localized propagator kernels, the rescaled
oscillatory integral whose large-time decay governs the dispersive
estimates, velocity suprema for the decay conjecture, and log-log
exponent fitting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import GridSpec, LatticeField
from .spectral import LPCutoffs, idft_values, lattice_symbol, smooth_step

__all__ = [
    "DispersionSpec",
    "PhaseSpec",
    "RadialBump",
    "PeriodicCubeWindow",
    "ResolutionError",
    "linear_kernel",
    "minimal_kernel_grid",
    "oscillatory_integral",
    "sup_over_velocities",
    "VelocitySupResult",
    "kernel_decay_series",
    "DecaySeries",
    "fit_decay_exponent",
    "DecayFit",
    "conjecture_scan",
    "ConjectureRow",
]


class ResolutionError(RuntimeError):
    """Requested accuracy needs more quadrature points than the budget allows."""


@dataclass(frozen=True)
class DispersionSpec:
    """Symbol family ``w(xi) = (m^2 + (4/h^2) sum_j sin^2(h xi_j/2))^(alpha/2)``."""

    m: float
    alpha: float
    h: float
    d: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("mass must be nonnegative")
        if self.alpha not in (1.0, 2.0, 1, 2):
            raise ValueError("alpha must be 1 or 2")
        if not self.h > 0:
            raise ValueError("lattice step must be positive")
        if self.d not in (1, 2, 3):
            raise ValueError("dimension must be 1, 2 or 3")

    @classmethod
    def wave(cls, h: float, d: int) -> "DispersionSpec":
        return cls(0.0, 1.0, h, d)

    @classmethod
    def schrodinger(cls, h: float, d: int) -> "DispersionSpec":
        return cls(0.0, 2.0, h, d)

    @classmethod
    def klein_gordon(cls, h: float, d: int) -> "DispersionSpec":
        return cls(1.0, 1.0, h, d)

    @property
    def has_symbol_zero(self) -> bool:
        """True when w(0) = 0 (massless case), so 1/w is singular at xi = 0."""
        return self.m == 0.0

    def group_velocity_bound(self) -> float:
        """Upper bound on |grad w| over the torus: 1 for alpha=1, 2/h for alpha=2."""
        return 1.0 if self.alpha == 1 else 2.0 / self.h

    def omega_values(self, grid: GridSpec) -> np.ndarray:
        if grid.h != self.h or grid.d != self.d:
            raise ValueError("grid step/dimension do not match the dispersion spec")
        return (self.m**2 + lattice_symbol(grid)) ** (self.alpha / 2.0)


def minimal_kernel_grid(spec: DispersionSpec, t_max: float, margin: float = 5.0) -> GridSpec:
    """Smallest power-of-two grid avoiding wraparound up to time ``t_max``.

    The kernel spreads no faster than the group-velocity bound, so the box
    must satisfy ``L/2 >= v_max * t_max + margin``.
    """
    v = spec.group_velocity_bound()
    m_min = int(np.ceil(2.0 * (v * abs(t_max) + margin) / spec.h))
    m = max(8, 1 << int(np.ceil(np.log2(m_min))))
    return GridSpec(spec.d, spec.h, m)


def _kernel_weights(
    spec: DispersionSpec,
    grid: GridSpec,
    t: float,
    N: float | None,
    cutoffs: LPCutoffs | None,
    propagator: str,
) -> np.ndarray:
    omega = spec.omega_values(grid)
    if propagator == "U":
        mult = np.exp(-1j * t * omega)
    elif propagator == "K":
        # sin(t w)/w, extended by its limit t at a symbol zero
        mult = np.empty(grid.shape, dtype=complex)
        nz = omega > 0
        mult[nz] = np.sin(t * omega[nz]) / omega[nz]
        mult[~nz] = t
    else:
        raise ValueError(f"unknown propagator {propagator!r}")
    if N is None:
        return mult
    cutoffs = cutoffs or LPCutoffs()
    mesh = grid.frequency_mesh()
    radius = np.sqrt(sum(np.broadcast_to(x * x, grid.shape) for x in mesh))
    return mult * cutoffs.eta(grid.h * radius / N)


def linear_kernel(
    spec: DispersionSpec,
    grid: GridSpec,
    t: float,
    N: float | None = None,
    cutoffs: LPCutoffs | None = None,
    propagator: str = "U",
) -> LatticeField:
    """Propagator kernel: inverse transform of the flow multiplier.

    With ``N`` the multiplier is localized by the dyadic annulus cutoff
    ``eta(h|xi|/N)``.  ``propagator="U"`` gives the kernel of
    ``exp(-i t w)`` (at t=0 and no cutoff this is the discrete delta of
    height ``h^-d``); ``propagator="K"`` the kernel of ``sin(t w)/w``, the
    fundamental solution of the second-order equation, regular even for
    massless symbols.
    """
    weights = _kernel_weights(spec, grid, t, N, cutoffs, propagator)
    return LatticeField(grid, idft_values(weights, grid.h))


@dataclass(frozen=True)
class RadialBump:
    """Smooth radial window: 1 inside ``plateau``, 0 outside ``support``.

    Uses the same closed-form transition profile as the Littlewood-Paley
    cutoffs.  Defaults reproduce the LP psi profile (plateau pi, support
    2 pi) centered at the origin.
    """

    d: int
    center: tuple = None
    plateau: float = np.pi
    support: float = 2.0 * np.pi

    def __post_init__(self):
        if self.center is None:
            object.__setattr__(self, "center", (0.0,) * self.d)
        if not 0 < self.plateau < self.support:
            raise ValueError("need 0 < plateau < support")

    periodic = False

    def __call__(self, *xi) -> np.ndarray:
        r2 = sum((np.asarray(x) - c) ** 2 for x, c in zip(xi, self.center))
        r = np.sqrt(r2)
        return smooth_step((self.support - r) / (self.support - self.plateau))

    def support_box(self) -> list:
        return [(c - self.support, c + self.support) for c in self.center]


@dataclass(frozen=True)
class PeriodicCubeWindow:
    """Constant window 1 on the periodic cube [-pi, pi)^d.

    Valid only when the companion phase is periodic over the cube, which
    for the rescaled phase means ``tau * v`` must be an integer vector
    (lattice points a/h under the change of variables).
    """

    d: int
    periodic = True

    def __call__(self, *xi) -> np.ndarray:
        return np.ones(np.broadcast_shapes(*(np.shape(x) for x in xi)))

    def support_box(self) -> list:
        return [(-np.pi, np.pi) for _ in range(self.d)]


@dataclass(frozen=True)
class PhaseSpec:
    """Rescaled phase ``Phi_v(xi) = v.xi - gamma(xi)`` at rescaled time tau.

    ``gamma(xi) = sqrt(mass^2 h^2 + 4 sum_j sin^2(xi_j/2))`` is the
    Klein-Gordon symbol after pulling the lattice step out of the
    frequency variable; its gradient is bounded by 1 uniformly in h.
    """

    h: float
    d: int
    v: tuple
    tau: float
    mass: float = 1.0

    def __post_init__(self):
        if len(self.v) != self.d:
            raise ValueError("velocity dimension mismatch")

    def gamma(self, *xi) -> np.ndarray:
        acc = (self.mass * self.h) ** 2
        for x in xi:
            acc = acc + 4.0 * np.sin(np.asarray(x) / 2.0) ** 2
        return np.sqrt(acc)

    def phase(self, *xi) -> np.ndarray:
        lin = sum(vj * np.asarray(x) for vj, x in zip(self.v, xi))
        return lin - self.gamma(*xi)


def oscillatory_integral(
    phase: PhaseSpec,
    zeta,
    points_per_oscillation: float = 16.0,
    max_points: int = 1 << 25,
    certify: bool = False,
):
    """Trapezoid evaluation of ``J = int exp(i tau Phi_v) zeta dxi``.

    The integrand is smooth and either compactly supported inside the
    sampled box or periodic over it, so the uniform trapezoid rule is
    spectrally accurate.  Resolution scales with tau: at least
    ``points_per_oscillation`` samples per phase oscillation along each
    axis.  Raises ResolutionError when that exceeds ``max_points`` total.
    With ``certify=True`` returns ``(value, rel_change)`` where rel_change
    compares against a doubled-resolution evaluation.
    """
    box = zeta.support_box()
    if zeta.periodic:
        tv = phase.tau * np.asarray(phase.v)
        if not np.allclose(tv, np.round(tv), atol=1e-9):
            raise ValueError(
                "constant cube window requires tau*v to be an integer vector "
                "for a periodic integrand"
            )

    floor = 256 if phase.d <= 2 else 64  # resolve the window transitions

    def evaluate(scale: int) -> complex:
        ns = []
        for j, (lo, hi) in enumerate(box):
            width = hi - lo
            osc = abs(phase.tau) * (abs(phase.v[j]) + 1.0) * width / (2.0 * np.pi)
            n = max(floor, int(np.ceil(points_per_oscillation * osc)))
            n = 1 << int(np.ceil(np.log2(n)))
            ns.append(n * scale)
        total = int(np.prod([float(n) for n in ns]))
        if total > max_points:
            raise ResolutionError(
                f"oscillatory integral at tau={phase.tau} needs {ns} points "
                f"({total} total) exceeding the budget of {max_points}"
            )
        axes = [
            lo + (hi - lo) * np.arange(n) / n
            for (lo, hi), n in zip(box, ns)
        ]
        mesh = [
            ax.reshape([-1 if i == j else 1 for i in range(phase.d)])
            for j, ax in enumerate(axes)
        ]
        integrand = zeta(*mesh) * np.exp(1j * phase.tau * phase.phase(*mesh))
        cell = np.prod([(hi - lo) / n for (lo, hi), n in zip(box, ns)])
        return complex(np.sum(integrand) * cell)

    value = evaluate(1)
    if not certify:
        return value
    refined = evaluate(2)
    denom = max(abs(refined), 1e-300)
    return value, abs(value - refined) / denom


@dataclass(frozen=True)
class VelocitySupResult:
    value: float
    argmax_v: tuple
    on_boundary: bool
    certificate_rel_change: float
    n_per_axis: int


def _dual_grid_sup(gvals, dxi, tau, v_box, d):
    """|J| on the spectral dual velocity grid via one FFT, restricted to the box.

    For a window box centered at the origin, ``J(v_k)`` on the dual grid
    ``v_k = 2 pi k/(n dxi tau)`` is exactly the centered inverse-style DFT
    of the sampled integrand times the cell measure.
    """
    n = gvals.shape[0]
    G = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(gvals))) * (n**d) * (dxi**d)
    k = np.arange(n) - n // 2
    v_axis = 2.0 * np.pi * k / (n * dxi * tau)
    mask = np.abs(v_axis) <= v_box
    if not np.any(mask):
        raise ResolutionError("dual velocity grid does not intersect the box")
    sel = np.ix_(*([mask] * d))
    mag = np.abs(G[sel])
    vs = v_axis[mask]
    idx = np.unravel_index(np.argmax(mag), mag.shape)
    argmax = tuple(float(vs[i]) for i in idx)
    on_boundary = any(i in (0, len(vs) - 1) for i in idx)
    dv = float(vs[1] - vs[0]) if len(vs) > 1 else 0.0
    return float(mag[idx]), argmax, on_boundary, dv


def sup_over_velocities(
    spec: DispersionSpec,
    zeta,
    tau: float,
    v_box: float = 1.2,
    v_grid_n: int = 41,
) -> VelocitySupResult:
    """Maximize ``|J_{Phi_v, zeta}|`` over velocities in ``[-v_box, v_box]^d``.

    All dual-grid velocities come out of a single FFT of
    ``zeta exp(-i tau gamma)`` (the linear part of the phase is the DFT
    kernel, handled exactly); the dual grid is at least as fine as
    ``v_grid_n`` points per axis across the box, typically much finer for
    large tau.  One local refinement with a 5x finer tensor grid around the
    argmax follows.  The result carries a spectral convergence certificate
    (relative change of the sup under doubled frequency resolution) and a
    flag for an argmax sitting on the box boundary.
    """
    if spec.d not in (1, 2):
        raise ValueError("velocity sup is implemented for d = 1 and d = 2")
    if spec.alpha != 1:
        raise ValueError("the rescaled phase family has alpha = 1")
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    d = spec.d
    mass = spec.m
    if tau == 0.0:
        # the phase drops out: J = int zeta, identical for every velocity
        value = abs(
            oscillatory_integral(PhaseSpec(spec.h, d, (0.0,) * d, 0.0, mass=mass), zeta)
        )
        return VelocitySupResult(value, (0.0,) * d, False, 0.0, 0)
    phase0 = PhaseSpec(spec.h, d, (0.0,) * d, tau, mass=mass)
    box = zeta.support_box()
    widths = [b[1] - b[0] for b in box]
    if max(widths) - min(widths) > 1e-12:
        raise ValueError("velocity sup expects equal window widths per axis")
    width = widths[0]
    # the box-center phase only rotates J(v), so magnitudes come out of a
    # centered-index DFT regardless of where the window sits

    def sup_at(n: int):
        axes = [b[0] + width * np.arange(n) / n for b in box]
        mesh = [
            axes[j].reshape([-1 if i == j else 1 for i in range(d)])
            for j in range(d)
        ]
        g = zeta(*mesh) * np.exp(-1j * tau * phase0.gamma(*mesh))
        # zero-pad so the dual grid has at least v_grid_n points across the box
        dxi = width / n
        pad = 1
        while 2.0 * v_box * (n * pad) * dxi * tau / (2.0 * np.pi) < v_grid_n:
            pad *= 2
        if pad > 1:
            gp = np.zeros((n * pad,) * d, dtype=complex)
            off = (n * pad) // 2 - n // 2
            gp[tuple(slice(off, off + n) for _ in range(d))] = g
            val, argmax, bnd, dv = _dual_grid_sup(gp, dxi, tau, v_box, d)
        else:
            val, argmax, bnd, dv = _dual_grid_sup(g, dxi, tau, v_box, d)
        return val, argmax, bnd, dv, axes, g

    # base resolution: a few points per oscillation of gamma, certificate-checked
    osc = tau * width / (2.0 * np.pi)
    n = 1 << int(np.ceil(np.log2(max(512, 3 * osc))))
    if (n * 2) ** d > (1 << 26):
        raise ResolutionError(
            f"velocity sup at tau={tau} needs more than the point budget"
        )
    val1, _, _, _, _, _ = sup_at(n)
    val2, argmax, bnd, dv, axes, g = sup_at(2 * n)
    cert = abs(val1 - val2) / max(val2, 1e-300)

    # one local refinement: 5x finer tensor grid within +-2 dual cells
    if dv > 0:
        local = np.linspace(-2.0 * dv, 2.0 * dv, 21)
        vaxes = [np.clip(argmax[j] + local, -v_box, v_box) for j in range(d)]
        chirps = [np.exp(1j * tau * np.outer(vax, ax)) for vax, ax in zip(vaxes, axes)]
        dxi = width / len(axes[0])
        if d == 1:
            jloc = chirps[0] @ g * dxi
        else:
            jloc = chirps[0] @ g @ chirps[1].T * dxi * dxi
        jmax = float(np.max(np.abs(jloc)))
        if jmax > val2:
            idx = np.unravel_index(np.argmax(np.abs(jloc)), jloc.shape)
            argmax = tuple(float(vaxes[j][idx[j]]) for j in range(d))
            val2 = jmax
    return VelocitySupResult(val2, argmax, bnd, cert, len(axes[0]))


@dataclass(frozen=True)
class DecaySeries:
    ts: np.ndarray
    sup_norms: np.ndarray
    grid: GridSpec


def kernel_decay_series(
    spec: DispersionSpec,
    t_grid,
    grid: GridSpec | None = None,
    N: float | None = None,
    cutoffs: LPCutoffs | None = None,
    propagator: str = "U",
    margin: float = 5.0,
) -> DecaySeries:
    """Sup norm of the propagator kernel along an increasing time grid.

    The grid must out-run the group velocity: ``L/2 >= v_max t_max + margin``;
    a violating grid raises with the minimal admissible box named.  If no
    grid is given the minimal power-of-two one is built.
    """
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or len(ts) < 1 or np.any(np.diff(ts) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    t_max = ts[-1]
    needed = minimal_kernel_grid(spec, t_max, margin)
    if grid is None:
        grid = needed
    else:
        if grid.h != spec.h or grid.d != spec.d:
            raise ValueError("grid does not match the dispersion spec")
        if grid.box_length / 2.0 < spec.group_velocity_bound() * t_max + margin:
            raise ValueError(
                f"box {grid.box_length:g} too small for t_max={t_max:g}: "
                f"wraparound requires m_per_axis >= {needed.m_per_axis} at "
                f"h={spec.h:g} (L >= {needed.box_length:g})"
            )
    sups = np.empty(len(ts))
    for i, t in enumerate(ts):
        weights = _kernel_weights(spec, grid, t, N, cutoffs, propagator)
        sups[i] = np.max(np.abs(idft_values(weights, grid.h)))
    return DecaySeries(ts, sups, grid)


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    residual: float
    ci_halfwidth: float


def fit_decay_exponent(ts, values) -> DecayFit:
    """Least squares on log-log data with a normal-theory slope half-width."""
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(ts) < 8:
        raise ValueError(f"decay fit needs at least 8 points, got {len(ts)}")
    if np.any(values <= 0):
        raise ValueError("decay fit needs positive series values")
    x = np.log(ts)
    y = np.log(values)
    n = len(x)
    xbar = x.mean()
    sxx = np.sum((x - xbar) ** 2)
    slope = float(np.sum((x - xbar) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * xbar)
    resid = y - (intercept + slope * x)
    dof = max(n - 2, 1)
    sigma2 = float(np.sum(resid**2) / dof)
    se = np.sqrt(sigma2 / sxx)
    return DecayFit(slope, intercept, float(np.sqrt(sigma2)), float(1.96 * se))


@dataclass(frozen=True)
class ConjectureRow:
    h: float
    tau_min: float
    tau_max: float
    exponent: float
    ci_halfwidth: float
    argmax_on_boundary: bool
    worst_certificate: float


def conjecture_scan(
    zeta,
    h_list,
    tau_grid,
    d: int = 2,
    v_box: float = 1.2,
    v_grid_n: int = 41,
    mass: float = 1.0,
) -> list:
    """Fitted decay exponents of ``sup_v |J|`` in tau, one row per step h.

    The h=1 row probes the fixed-lattice Klein-Gordon rate; shrinking h
    probes the massless-limit trend.  Exponents are reported with
    confidence half-widths; the conjecture itself (an upper bound uniform
    in h) is not asserted.
    """
    taus = np.asarray(tau_grid, dtype=float)
    if len(taus) < 8:
        raise ValueError("conjecture scan needs a tau grid with >= 8 points")
    rows = []
    for h in h_list:
        spec = DispersionSpec(mass, 1.0, float(h), d)
        sups = np.empty(len(taus))
        boundary = False
        worst_cert = 0.0
        for i, tau in enumerate(taus):
            res = sup_over_velocities(spec, zeta, float(tau), v_box, v_grid_n)
            sups[i] = res.value
            boundary = boundary or res.on_boundary
            worst_cert = max(worst_cert, res.certificate_rel_change)
        fit = fit_decay_exponent(taus, sups)
        rows.append(
            ConjectureRow(
                float(h),
                float(taus[0]),
                float(taus[-1]),
                fit.slope,
                fit.ci_halfwidth,
                boundary,
                worst_cert,
            )
        )
    return rows
