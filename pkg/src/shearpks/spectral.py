"""Fourier-side building blocks: grids, fields, ghost weights, norms.

Conventions used throughout the package:

* Coefficients are stored as ``fft2(samples) / (nx * ny)``, so ``c[0, 0]``
  is the mean of the field and the lattice Parseval identity reads
  ``integral |f|^2 dx dy = lx * ly * sum |c|^2``.
* The x wavenumber of row ``j`` is ``j * 2 pi / lx`` with signed FFT
  ordering; same for y.  Arrays are shaped ``(nx, ny)`` with the x index
  first.
* In sheared runs the stored y label ``eta`` is comoving; the physical
  vertical wavenumber is ``eta - k * s`` where ``s`` is the shear phase
  since the last remap.  Functions that care accept ``shear=s``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from shearpks.thresholds import NormParams

CHECKPOINT_MAGIC = b"PKSC"
CHECKPOINT_VERSION = 1


def _is_pow2(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Periodic box [0, lx) x [0, ly) sampled on nx x ny points."""

    nx: int = 128
    ny: int = 128
    lx: float = 32.0 * np.pi
    ly: float = 32.0 * np.pi
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self) -> None:
        if not _is_pow2(self.nx) or not _is_pow2(self.ny):
            raise ValueError("grid sizes must be powers of two, got %dx%d"
                             % (self.nx, self.ny))
        if self.lx < 2.0 * np.pi or self.ly < 2.0 * np.pi:
            raise ValueError("box sides must be at least 2*pi")
        if not (0.0 < self.dealias_fraction <= 1.0):
            raise ValueError("dealias_fraction must lie in (0, 1]")

    # signed integer mode indices, FFT ordering
    def jx(self) -> np.ndarray:
        return np.fft.fftfreq(self.nx, d=1.0 / self.nx).astype(np.int64)

    def jy(self) -> np.ndarray:
        return np.fft.fftfreq(self.ny, d=1.0 / self.ny).astype(np.int64)

    def kx(self) -> np.ndarray:
        return self.jx() * (2.0 * np.pi / self.lx)

    def ky(self) -> np.ndarray:
        return self.jy() * (2.0 * np.pi / self.ly)

    def wavenumbers(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.kx(), self.ky(), indexing="ij")

    def index_mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.jx(), self.jy(), indexing="ij")

    def dealias_band(self) -> Tuple[int, int]:
        return (int(self.nx * self.dealias_fraction / 2.0),
                int(self.ny * self.dealias_fraction / 2.0))

    def dealias_keep(self) -> np.ndarray:
        bx, by = self.dealias_band()
        jx, jy = self.index_mesh()
        return (np.abs(jx) <= bx) & (np.abs(jy) <= by)

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def window(self) -> float:
        """Shear phase after which relabeling is lattice-exact: the x-to-y
        box ratio (modes shift by a whole number of y cells)."""
        return self.lx / self.ly


class SpectralField:
    """A real scalar field stored by its normalized Fourier coefficients."""

    __slots__ = ("grid", "coeffs")

    def __init__(self, grid: GridSpec, coeffs: np.ndarray):
        if coeffs.shape != (grid.nx, grid.ny):
            raise ValueError("coefficient array shape %r does not match grid %dx%d"
                             % (coeffs.shape, grid.nx, grid.ny))
        self.grid = grid
        self.coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SpectralField":
        return cls(grid, np.zeros((grid.nx, grid.ny), dtype=np.complex128))

    @classmethod
    def from_physical(cls, samples: np.ndarray, grid: GridSpec) -> "SpectralField":
        samples = np.asarray(samples, dtype=np.float64)
        if samples.shape != (grid.nx, grid.ny):
            raise ValueError("sample array shape %r does not match grid %dx%d"
                             % (samples.shape, grid.nx, grid.ny))
        return cls(grid, np.fft.fft2(samples) / (grid.nx * grid.ny))

    def to_physical(self) -> np.ndarray:
        return np.fft.ifft2(self.coeffs * (self.grid.nx * self.grid.ny)).real

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy())

    @property
    def mean(self) -> float:
        return float(self.coeffs[0, 0].real)

    @property
    def mass(self) -> float:
        """Integral of the field over the box."""
        return float(self.coeffs[0, 0].real) * self.grid.lx * self.grid.ly

    def l2_norm(self) -> float:
        return float(np.sqrt(self.grid.lx * self.grid.ly
                             * np.sum(np.abs(self.coeffs) ** 2)))

    def hermitian_defect(self) -> float:
        """max |c(-k) - conj(c(k))|; zero for a real field."""
        c = self.coeffs
        flipped = c[np.ix_((-np.arange(self.grid.nx)) % self.grid.nx,
                           (-np.arange(self.grid.ny)) % self.grid.ny)]
        return float(np.max(np.abs(flipped - np.conj(c))))

    def parseval_defect(self) -> float:
        """Relative gap between the physical and spectral L2 norms."""
        phys = self.to_physical()
        a = float(np.sum(phys ** 2)) * self.grid.cell_area
        b = self.grid.lx * self.grid.ly * float(np.sum(np.abs(self.coeffs) ** 2))
        return abs(a - b) / max(1e-300, b)

    def enforce_hermitian(self) -> None:
        c = self.coeffs
        flipped = c[np.ix_((-np.arange(self.grid.nx)) % self.grid.nx,
                           (-np.arange(self.grid.ny)) % self.grid.ny)]
        self.coeffs = 0.5 * (c + np.conj(flipped))


def forward_transform(samples: np.ndarray, grid: GridSpec) -> SpectralField:
    return SpectralField.from_physical(samples, grid)


def inverse_transform(field: SpectralField) -> np.ndarray:
    return field.to_physical()


def ghost_weight_parts(k, xi, amplitude: float, params: NormParams):
    """The two arctangent pieces of the ghost weight, each in (0, pi).

    The first tracks the shear-tilted critical layer (flat at k = 0 by
    convention), the second the plain wave angle.
    """
    if amplitude <= 0:
        raise ValueError("amplitude must be positive")
    k = np.asarray(k, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)
    absk = np.abs(k)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg1 = amplitude ** (-1.0 / 3.0) * absk ** (-1.0 / 3.0) * np.sign(k) * xi
        m1 = np.where(k == 0, np.pi / 2.0, np.arctan(arg1) + np.pi / 2.0)
        ratio = xi / k
        m2 = np.arctan(ratio) + np.pi / 2.0
    # 0/0 at the origin: both angles default to the midpoint
    m2 = np.where(np.isnan(m2), np.pi / 2.0, m2)
    return m1, m2


def ghost_weight(k, xi, amplitude: float, params: NormParams):
    """Bounded time-independent multiplier, 1 <= M <= 1 + weight_span."""
    m1, m2 = ghost_weight_parts(k, xi, amplitude, params)
    return params.weight_span * (m1 + m2) / (2.0 * np.pi) + 1.0


def weight_drift_check(k, xi, amplitude: float, params: NormParams):
    """(lhs, rhs) of the pointwise drift inequality the weight must obey.

    lhs is k * d(M1 + M2)/d xi, which the closing argument bounds below by
    rhs = theta_lin * A^(-1/3) |k|^(2/3) - theta_quad * xi^2 / A
        + k^2/(k^2 + xi^2).
    Guaranteed pointwise whenever theta_lin <= 2 sqrt(theta_quad) -
    theta_quad; equality is attained at (k, xi, A) = (1, 0, 1) with unit
    thetas.
    """
    if amplitude <= 0:
        raise ValueError("amplitude must be positive")
    k = np.asarray(k, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)
    absk = np.abs(k)
    a13 = amplitude ** (1.0 / 3.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        # A^(-1/3)|k|^(2/3) / (1 + A^(-2/3)|k|^(-2/3) xi^2), cleared of the
        # negative power so k = 0 is regular
        tilt = a13 * absk ** (4.0 / 3.0) / (a13 ** 2 * absk ** (2.0 / 3.0) + xi ** 2)
        angle = k ** 2 / (k ** 2 + xi ** 2)
    tilt = np.where(np.isnan(tilt), 0.0, tilt)
    angle = np.where(np.isnan(angle), 0.0, angle)
    lhs = tilt + angle
    rhs = (params.theta_lin / a13 * absk ** (2.0 / 3.0)
           - params.theta_quad / amplitude * xi ** 2 + angle)
    return lhs, rhs


class AnisotropicNorm(NamedTuple):
    value: float           # norm over the k != 0 columns
    zero_mode_mass: float  # L2 mass of the x-mean profile (k = 0 column)
    strict_finite: bool    # False: the unrestricted lattice norm diverges


def anisotropic_norm(field: SpectralField, high_exp: float,
                     low_exp: float) -> AnisotropicNorm:
    """Weighted L2 norm with <k>^high_exp <1/k>^low_exp in x only.

    The k = 0 column is excluded from the value (on the lattice the
    low-frequency weight diverges there) and its L2 mass is reported
    separately; callers that require mean-free-in-x data assert on it.
    """
    grid = field.grid
    c2 = np.abs(field.coeffs) ** 2
    scale = grid.lx * grid.ly
    zero_mass = float(np.sqrt(scale * np.sum(c2[0, :])))
    kx = grid.kx()[1:, None] if grid.nx > 1 else np.zeros((0, 1))
    w = (1.0 + kx ** 2) ** high_exp * (1.0 + kx ** -2) ** low_exp
    value = float(np.sqrt(scale * np.sum(w * c2[1:, :])))
    total = float(np.sqrt(scale * np.sum(c2)))
    strict = (low_exp == 0.0) or zero_mass <= 1e-12 * max(1.0, total)
    return AnisotropicNorm(value, zero_mass, strict)


def _sq_weight(grid: GridSpec, params: NormParams, amplitude: float,
               t: float, extra_kx13: bool) -> np.ndarray:
    """Squared x-multiplier of the space-time norm at time t; the k = 0
    column carries weight zero (same convention as anisotropic_norm)."""
    kx = grid.kx()[:, None]
    absk = np.abs(kx)
    with np.errstate(divide="ignore"):
        w = np.exp(2.0 * params.gain * amplitude ** (-1.0 / 3.0)
                   * absk ** (2.0 / 3.0) * t) \
            * (1.0 + kx ** 2) ** params.high_exp \
            * np.where(kx == 0, 0.0, (1.0 + kx ** -2)) ** params.low_exp
    w[0, :] = 0.0
    if extra_kx13:
        w = w * absk ** (2.0 / 3.0)
    return np.broadcast_to(w, (grid.nx, grid.ny)).copy()


class SpaceTimeAccumulator:
    """Running evaluation of the space-time energy functional of one field.

    Five pieces: a running sup of the weighted L2 norm and four
    time-integrated dissipation terms (vertical derivative, |Dx|^(1/3),
    horizontal derivative, and the bounded low-mode symbol |k|/|grad|),
    each with its closing-coefficient prefactor.  Updates accumulate at the
    left endpoint: call update(field, dt, shear) with the state at the
    start of the step.  extra_kx13 inserts the extra |k|^(1/3) multiplier
    used for the shifted-density copy of the functional.
    """

    PIECES = ("vertical", "fractional", "horizontal", "low_mode")

    def __init__(self, params: NormParams, amplitude: float,
                 extra_kx13: bool = False, label: str = ""):
        if amplitude <= 0:
            raise ValueError("amplitude must be positive")
        params.validate()
        self.params = params
        self.amplitude = amplitude
        self.extra_kx13 = extra_kx13
        self.label = label
        self.sup_sq = 0.0
        self.integrals = dict.fromkeys(self.PIECES, 0.0)
        self.t_last = 0.0

    def coefficients(self) -> dict:
        p, a = self.params, self.amplitude
        return {
            "vertical": p.damp_gap / a,
            "fractional": p.half_gap / a ** (1.0 / 3.0),
            "horizontal": 2.0 / a,
            "low_mode": p.span_frac,
        }

    def update(self, field: SpectralField, dt: float, shear: float = 0.0) -> None:
        if dt <= 0:
            raise ValueError("dt must be positive")
        pieces = instantaneous_pieces(field, self.params, self.amplitude,
                                      t=self.t_last, shear=shear,
                                      extra_kx13=self.extra_kx13)
        self.sup_sq = max(self.sup_sq, pieces["sup"])
        coef = self.coefficients()
        for name in self.PIECES:
            self.integrals[name] += coef[name] * pieces[name] * dt
        self.t_last += dt

    def total_sq(self) -> float:
        return self.sup_sq + sum(self.integrals.values())

    def value(self) -> float:
        return float(np.sqrt(self.total_sq()))


def instantaneous_pieces(field: SpectralField, params: NormParams,
                         amplitude: float, t: float = 0.0, shear: float = 0.0,
                         extra_kx13: bool = False) -> dict:
    """The five integrands of the space-time functional at a single time.

    Returns squared quantities without the closing-coefficient prefactors
    (the accumulator owns those).  Physical vertical wavenumber is
    eta - k * shear.
    """
    grid = field.grid
    w2 = _sq_weight(grid, params, amplitude, t, extra_kx13)
    c2 = np.abs(field.coeffs) ** 2
    kx, eta = grid.wavenumbers()
    xi = eta - kx * shear
    scale = grid.lx * grid.ly
    base = w2 * c2
    with np.errstate(invalid="ignore"):
        low_sym = kx ** 2 / (kx ** 2 + xi ** 2)
    low_sym = np.where(np.isnan(low_sym), 0.0, low_sym)
    absk = np.abs(kx)
    return {
        "sup": scale * float(np.sum(base)),
        "vertical": scale * float(np.sum(base * xi ** 2)),
        "fractional": scale * float(np.sum(base * absk ** (2.0 / 3.0))),
        "horizontal": scale * float(np.sum(base * kx ** 2)),
        "low_mode": scale * float(np.sum(base * low_sym)),
    }


def save_checkpoint(field: SpectralField, path: str) -> None:
    """Binary checkpoint: magic, version, grid shape and box, then the
    coefficient array row-major (x index major) as little-endian complex
    doubles."""
    grid = field.grid
    header = CHECKPOINT_MAGIC + struct.pack(
        "<III", CHECKPOINT_VERSION, grid.nx, grid.ny)
    header += struct.pack("<dd", grid.lx, grid.ly)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(field.coeffs, dtype="<c16").tobytes())


def load_checkpoint(path: str,
                    dealias_fraction: Optional[float] = None) -> SpectralField:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != CHECKPOINT_MAGIC:
        raise ValueError("not a spectral checkpoint (bad magic): %s" % path)
    version, nx, ny = struct.unpack_from("<III", blob, 4)
    if version != CHECKPOINT_VERSION:
        raise ValueError("unsupported checkpoint version %d" % version)
    lx, ly = struct.unpack_from("<dd", blob, 16)
    want = 32 + 16 * nx * ny
    if len(blob) != want:
        raise ValueError("checkpoint truncated: %d bytes, expected %d"
                         % (len(blob), want))
    kwargs = {} if dealias_fraction is None else \
        {"dealias_fraction": dealias_fraction}
    grid = GridSpec(nx=nx, ny=ny, lx=lx, ly=ly, **kwargs)
    coeffs = np.frombuffer(blob[32:], dtype="<c16").reshape(nx, ny)
    field = SpectralField(grid, coeffs.astype(np.complex128))
    defect = field.hermitian_defect()
    scale = float(np.max(np.abs(field.coeffs))) if field.coeffs.size else 0.0
    if defect > 1e-10 * max(1.0, scale):
        raise ValueError("checkpoint does not describe a real field "
                         "(hermitian defect %.3g)" % defect)
    return field
