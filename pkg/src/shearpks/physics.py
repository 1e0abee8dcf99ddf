"""Model terms: chemoattractant solve, velocity reconstruction, fluxes.

All operators act on :class:`~shearpks.spectral.SpectralField` objects in
the comoving frame; pass ``shear=s`` so vertical derivatives use the
physical wavenumber ``eta - k * s``.  Products are evaluated
pseudo-spectrally with 2/3-rule truncation of both factors and of the
result, which removes quadratic aliasing exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from shearpks.spectral import GridSpec, SpectralField
from shearpks.thresholds import NormParams


class SolvabilityError(ValueError):
    """Chemoattractant solve attempted with a nonzero-mean source at
    alpha = 0."""


def _symbols(grid: GridSpec, shear: float) -> Tuple[np.ndarray, np.ndarray]:
    kx, eta = grid.wavenumbers()
    return kx, eta - kx * shear


def dealias(field: SpectralField) -> SpectralField:
    return SpectralField(field.grid, field.coeffs * field.grid.dealias_keep())


def solve_chemoattractant(n: SpectralField, alpha: float, shear: float = 0.0,
                          subtract_mean: bool = False) -> SpectralField:
    """Solve the screened Poisson problem driven by the density.

    c_hat = n_hat / (alpha + |k|^2).  For alpha = 0 the box-mean of the
    source must vanish (the periodic analogue of decay at infinity);
    subtract_mean=True removes it instead of raising, and the potential is
    gauged to zero mean.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    grid = n.grid
    kx, xi = _symbols(grid, shear)
    lap = kx ** 2 + xi ** 2
    src = n.coeffs
    if alpha == 0.0:
        mean = float(src[0, 0].real)
        scale = float(np.max(np.abs(src))) if src.size else 0.0
        if not subtract_mean and abs(mean) > 1e-13 * max(1.0, scale):
            raise SolvabilityError(
                "alpha = 0 requires a mean-free source; offending mass = %r"
                % (mean * grid.lx * grid.ly,))
        with np.errstate(divide="ignore", invalid="ignore"):
            c = src / lap
        c[0, 0] = 0.0
        return SpectralField(grid, c)
    return SpectralField(grid, src / (alpha + lap))


def velocity_from_vorticity(w: SpectralField, shear: float = 0.0,
                            ) -> Tuple[SpectralField, SpectralField]:
    """Streamfunction inversion: u = (d_y Phi, -d_x Phi), lap Phi = w.

    The streamfunction is gauged to zero mean, so the mean velocity
    vanishes.
    """
    grid = w.grid
    kx, xi = _symbols(grid, shear)
    lap = kx ** 2 + xi ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = -w.coeffs / lap
    phi[0, 0] = 0.0
    u1 = SpectralField(grid, 1j * xi * phi)
    u2 = SpectralField(grid, -1j * kx * phi)
    return u1, u2


def velocity_divergence_check(w: SpectralField, shear: float = 0.0) -> float:
    """Maximum |divergence coefficient| of the reconstructed velocity with
    the two symbol products grouped first.

    (ik)(i xi) and (i xi)(-ik) are exact floating negatives (multiply is
    commutative), so the grouped sum is bitwise zero; this audits that the
    reconstruction cannot leak compressibility even at the last ulp.  A
    plain ik*u1 + i xi*u2 evaluation is allowed ~1 ulp of association dust.
    """
    grid = w.grid
    kx, xi = _symbols(grid, shear)
    lap = kx ** 2 + xi ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = -w.coeffs / lap
    phi[0, 0] = 0.0
    sym = (1j * kx) * (1j * xi) + (1j * xi) * (-1j * kx)
    return float(np.max(np.abs(sym * phi)))


def spectral_divergence(u1: SpectralField, u2: SpectralField,
                        shear: float = 0.0) -> SpectralField:
    """Plain divergence i*k*u1 + i*xi*u2 (no structural grouping)."""
    grid = u1.grid
    kx, xi = _symbols(grid, shear)
    return SpectralField(grid, 1j * kx * u1.coeffs + 1j * xi * u2.coeffs)


@dataclass
class FluxSet:
    """Nonlinear right-hand-side pieces, before the 1/A scaling.

    chemotaxis = -div(n grad c)
    advect_n   = -u . grad n      (divergence form; u is solenoidal)
    advect_w   = -u . grad w      (None when the fluid is off)
    buoyancy   = -d_x n           (vorticity forcing; None when off)
    """

    chemotaxis: SpectralField
    advect_n: Optional[SpectralField] = None
    advect_w: Optional[SpectralField] = None
    buoyancy: Optional[SpectralField] = None


def nonlinear_fluxes(n: SpectralField, c: SpectralField,
                     w: Optional[SpectralField] = None,
                     u: Optional[Tuple[SpectralField, SpectralField]] = None,
                     shear: float = 0.0) -> FluxSet:
    """Pseudo-spectral evaluation of every nonlinear term.

    Both factors of each product are truncated to the 2/3 band before the
    physical-space multiply and the result is truncated again; with the
    2/3 rule the aliased images of in-band quadratic products land outside
    the kept band, so this is alias-free.  Advection is computed in
    divergence form, which makes the (0, 0) flux coefficients vanish
    structurally and mass conservation exact.  Pass the vorticity (and
    optionally a precomputed velocity) to get the fluid terms.
    """
    grid = n.grid
    keep = grid.dealias_keep()
    kx, xi = _symbols(grid, shear)
    ikx, ixi = 1j * kx, 1j * xi
    nn = grid.nx * grid.ny

    def phys(coeffs: np.ndarray) -> np.ndarray:
        return np.fft.ifft2(coeffs * nn).real

    def spec(samples: np.ndarray) -> np.ndarray:
        return np.fft.fft2(samples) / nn

    def neg_div(f1: np.ndarray, f2: np.ndarray) -> SpectralField:
        out = -(ikx * spec(f1) + ixi * spec(f2)) * keep
        out[0, 0] = 0.0  # structurally zero already; pin against dust
        return SpectralField(grid, out)

    n_band = n.coeffs * keep
    c_band = c.coeffs * keep
    n_phys = phys(n_band)
    grad_c = (phys(ikx * c_band), phys(ixi * c_band))
    chemo = neg_div(n_phys * grad_c[0], n_phys * grad_c[1])

    if w is None and u is None:
        return FluxSet(chemotaxis=chemo)

    if u is None:
        u = velocity_from_vorticity(w, shear)
    u1_phys = phys(u[0].coeffs * keep)
    u2_phys = phys(u[1].coeffs * keep)
    advect_n = neg_div(u1_phys * n_phys, u2_phys * n_phys)

    advect_w = None
    buoyancy = None
    if w is not None:
        w_phys = phys(w.coeffs * keep)
        advect_w = neg_div(u1_phys * w_phys, u2_phys * w_phys)
        buoyancy = SpectralField(grid, -ikx * n.coeffs)
    return FluxSet(chemotaxis=chemo, advect_n=advect_n,
                   advect_w=advect_w, buoyancy=buoyancy)


def moser_sup_bound(grad_c_l4_sup: float, n_l2_sup: float, mass: float,
                    initial_sup: float) -> float:
    """A-independent ceiling on the running density sup.

    2^7 (sup_t ||grad c||_L4^2 + 1)(sup_t ||n||_L2 + mass + ||n_in||_inf + 1),
    from a Moser-type iteration on the advection-diffusion structure.  The
    solver reports rhs - ||n||_inf as a per-sample margin; a negative margin
    on a run that claims global regularity is a red flag.
    """
    return (128.0 * (grad_c_l4_sup ** 2 + 1.0)
            * (n_l2_sup + mass + initial_sup + 1.0))


@dataclass(frozen=True)
class MarginRow:
    name: str
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def hard_violation(self) -> bool:
        # leave a hair of quadrature headroom; a real violation is O(1)
        return self.lhs > self.rhs + 1e-8 * max(1.0, abs(self.rhs))


def grad_norms(field: SpectralField, shear: float) -> Tuple[float, float]:
    """(L2, L4) norms of the gradient by physical-space quadrature."""
    grid = field.grid
    kx, xi = _symbols(grid, shear)
    nn = grid.nx * grid.ny
    gx = np.fft.ifft2(1j * kx * field.coeffs * nn).real
    gy = np.fft.ifft2(1j * xi * field.coeffs * nn).real
    mag2 = gx ** 2 + gy ** 2
    da = grid.cell_area
    return (float(math.sqrt(np.sum(mag2) * da)),
            float(np.sum(mag2 ** 2) * da) ** 0.25)


def _weighted_l2(field: SpectralField, params: NormParams,
                 extra_symbol: np.ndarray) -> float:
    """L2 norm of N(field) with N = the anisotropic x-weight (k = 0 column
    zeroed) times an extra nonnegative symbol."""
    grid = field.grid
    kx = grid.kx()[:, None]
    with np.errstate(divide="ignore"):
        w = (1.0 + kx ** 2) ** params.high_exp \
            * np.where(kx == 0, 0.0, (1.0 + kx ** -2)) ** params.low_exp
    w = np.broadcast_to(w, field.coeffs.shape)
    total = np.sum(w * extra_symbol * np.abs(field.coeffs) ** 2)
    return float(math.sqrt(grid.lx * grid.ly * total))


def elliptic_margins(n: SpectralField, alpha: float, params: NormParams,
                     mass: Optional[float] = None,
                     shear: float = 0.0) -> List[MarginRow]:
    """Slack in the elliptic estimates for the potential driven by n.

    Two rows per case.  alpha = 0: Hessian bound through the weighted
    multiplier, and the gradient L4 bound with the Riesz-transform constant
    (2/pi)(3 + 2 sqrt(2)) against L2 + L1 mass.  alpha > 0: weighted
    gradient bound with 1/sqrt(2 alpha) and the gradient L4 bound with
    (1/(2 pi alpha))^(1/4).  L2/L4 norms by uniform grid quadrature.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    grid = n.grid
    kx, xi = _symbols(grid, shear)
    lap2 = (kx ** 2 + xi ** 2)
    c = solve_chemoattractant(n, alpha, shear=shear, subtract_mean=(alpha == 0.0))
    if mass is None:
        mass = float(np.sum(np.abs(n.to_physical())) * grid.cell_area)
    weighted_n = _weighted_l2(n, params, np.ones_like(lap2))
    _, grad_l4 = grad_norms(c, shear)
    n_l2 = n.l2_norm()
    rows = []
    if alpha == 0.0:
        rows.append(MarginRow(
            "hessian_l2_vs_weighted_density",
            _weighted_l2(c, params, lap2 ** 2), weighted_n))
        rows.append(MarginRow(
            "gradient_l4_vs_l2_plus_mass",
            grad_l4,
            (2.0 / math.pi) * (3.0 + 2.0 * math.sqrt(2.0)) * (n_l2 + mass)))
    else:
        rows.append(MarginRow(
            "gradient_l2_vs_weighted_density",
            _weighted_l2(c, params, lap2), weighted_n / math.sqrt(2.0 * alpha)))
        rows.append(MarginRow(
            "gradient_l4_vs_l2",
            grad_l4, (1.0 / (2.0 * math.pi * alpha)) ** 0.25 * n_l2))
    return rows
