"""Fourier grid and spectral fields on the sheared periodic channel.

The domain is T_x x T_y with x-period fixed at 2*pi and configurable
y-period L_y, so admissible wavenumbers are integers k and multiples
eta of 2*pi/L_y.  Coefficient arrays are indexed (k, eta) in standard
FFT order along both axes; a field f is represented as

    f(x, y) = sum_{k, eta} coeffs[k, eta] * exp(i*(k*x + eta*y)).

All operations are deterministic for a fixed grid: no FFT planning or
thread count leaks into the results.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class Grid:
    """Truncated Fourier lattice for the periodized channel.

    Attributes
    ----------
    n_x, n_y : int
        Modes in x and y (powers of two, >= 8).
    L_y : float
        y-period; the x-period is fixed at 2*pi.
    dealias_fraction : float
        Fraction of the Nyquist band kept by dealiasing (default 2/3).
    k_values, eta_values : ndarray
        Wavenumber enumerations in FFT order; eta spacing is exactly
        2*pi/L_y.
    """

    n_x: int
    n_y: int
    L_y: float
    dealias_fraction: float
    k_values: np.ndarray = field(repr=False)
    eta_values: np.ndarray = field(repr=False)

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return (self.n_x == other.n_x and self.n_y == other.n_y
                and self.L_y == other.L_y
                and self.dealias_fraction == other.dealias_fraction)

    def __hash__(self):
        return hash((self.n_x, self.n_y, self.L_y, self.dealias_fraction))

    def __post_init__(self):
        kk, ee = np.meshgrid(self.k_values.astype(float), self.eta_values, indexing="ij")
        object.__setattr__(self, "_K", kk)
        object.__setattr__(self, "_ETA", ee)
        k_cut = self.dealias_fraction * self.n_x / 2.0
        eta_cut = self.dealias_fraction * self.eta_spacing * self.n_y / 2.0
        mask = (np.abs(kk) <= k_cut + 1e-12) & (np.abs(ee) <= eta_cut + 1e-12)
        object.__setattr__(self, "_dealias_mask", mask)

    @property
    def eta_spacing(self) -> float:
        return 2.0 * np.pi / self.L_y

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_x, self.n_y)

    @property
    def K(self) -> np.ndarray:
        """Broadcast k array, shape (n_x, n_y)."""
        return self._K

    @property
    def ETA(self) -> np.ndarray:
        """Broadcast eta array, shape (n_x, n_y)."""
        return self._ETA

    @property
    def dealias_mask(self) -> np.ndarray:
        return self._dealias_mask

    def index_of_k(self, k: int) -> int:
        return int(k) % self.n_x

    def index_of_eta(self, eta: float) -> int:
        j = int(round(eta / self.eta_spacing))
        return j % self.n_y


def make_grid(n_x: int, n_y: int, L_y: float = 2.0 * np.pi,
              dealias_fraction: float = 2.0 / 3.0) -> Grid:
    """Build a grid; sizes must be powers of two >= 8 and L_y > 0."""
    if not (_is_power_of_two(n_x) and n_x >= 8):
        raise ConfigError(f"n_x must be a power of two >= 8, got {n_x}")
    if not (_is_power_of_two(n_y) and n_y >= 8):
        raise ConfigError(f"n_y must be a power of two >= 8, got {n_y}")
    if not L_y > 0:
        raise ConfigError(f"L_y must be positive, got {L_y}")
    if not 0 < dealias_fraction <= 1:
        raise ConfigError(f"dealias_fraction must lie in (0, 1], got {dealias_fraction}")
    k_values = np.fft.fftfreq(n_x, d=1.0 / n_x).astype(int)
    eta_values = np.fft.fftfreq(n_y, d=1.0 / n_y) * (2.0 * np.pi / L_y)
    return Grid(n_x=n_x, n_y=n_y, L_y=float(L_y),
                dealias_fraction=float(dealias_fraction),
                k_values=k_values, eta_values=eta_values)


@dataclass
class SpectralField:
    """Complex Fourier coefficients of one labeled unknown on a grid."""

    grid: Grid
    coeffs: np.ndarray
    label: str = ""

    def __post_init__(self):
        if self.coeffs.shape != self.grid.shape:
            raise ConfigError(
                f"coefficient shape {self.coeffs.shape} does not match grid {self.grid.shape}")
        self.coeffs = np.ascontiguousarray(self.coeffs, dtype=np.complex128)

    def copy(self, label: str | None = None) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy(),
                             self.label if label is None else label)

    def zero_like(self, label: str = "") -> "SpectralField":
        return SpectralField(self.grid, np.zeros(self.grid.shape, dtype=np.complex128), label)

    def conjugate_symmetry_defect(self) -> float:
        """max |coeffs(-k,-eta) - conj(coeffs(k,eta))|; zero for real fields."""
        flipped = _negate_indices(self.coeffs)
        return float(np.max(np.abs(flipped - np.conj(self.coeffs))))

    def enforce_reality(self) -> "SpectralField":
        """Project onto the conjugate-symmetric subspace (in place)."""
        flipped = _negate_indices(self.coeffs)
        self.coeffs = 0.5 * (self.coeffs + np.conj(flipped))
        return self

    def norm_l2(self) -> float:
        """L2 norm on the domain, i.e. sqrt(2*pi*L_y * sum |coeffs|^2)."""
        area = 2.0 * np.pi * self.grid.L_y
        return float(np.sqrt(area * np.sum(np.abs(self.coeffs) ** 2)))


def zero_field(grid: Grid, label: str = "") -> SpectralField:
    return SpectralField(grid, np.zeros(grid.shape, dtype=np.complex128), label)


def _negate_indices(coeffs: np.ndarray) -> np.ndarray:
    """coeffs at (-k, -eta): reverse both axes modulo n."""
    out = coeffs[::-1, :][:, ::-1]
    out = np.roll(out, 1, axis=0)
    out = np.roll(out, 1, axis=1)
    return out


def to_physical(f: SpectralField) -> np.ndarray:
    """Evaluate on the collocation lattice; complex array (n_x, n_y)."""
    return np.fft.ifft2(f.coeffs) * (f.grid.n_x * f.grid.n_y)


def from_physical(grid: Grid, values: np.ndarray, label: str = "") -> SpectralField:
    coeffs = np.fft.fft2(values) / (grid.n_x * grid.n_y)
    return SpectralField(grid, coeffs, label)


def moving_symbol(kind: str, k, eta, t: float):
    """Evaluate a moving-frame operator symbol at (k, eta, t).

    Kinds: laplacian_t, inv_laplacian_t, grad_t_x, grad_t_y, lambda_t,
    inv_lambda_t.  The shear frame makes the y-derivative i*(eta - k*t),
    so the Laplacian symbol is -(k^2 + (eta - k*t)^2).
    """
    k = np.asarray(k, dtype=float)
    eta = np.asarray(eta, dtype=float)
    shifted = eta - k * t
    p = k * k + shifted * shifted
    if kind == "laplacian_t":
        return -p
    if kind == "grad_t_x":
        return 1j * k
    if kind == "grad_t_y":
        return 1j * shifted
    if kind == "lambda_t":
        return np.sqrt(p)
    if kind in ("inv_laplacian_t", "inv_lambda_t"):
        singular = p == 0.0
        if np.ndim(p) == 0:
            if singular:
                raise DomainError(f"{kind} undefined at (k, eta) = (0, 0)")
            return -1.0 / p if kind == "inv_laplacian_t" else 1.0 / np.sqrt(p)
        with np.errstate(divide="ignore"):
            out = -1.0 / p if kind == "inv_laplacian_t" else 1.0 / np.sqrt(p)
        out[singular] = np.inf
        return out
    raise ConfigError(f"unknown symbol kind {kind!r}")


def apply_multiplier(f: SpectralField, symbol, t: float, label: str | None = None) -> SpectralField:
    """Pointwise Fourier multiplier f -> symbol(k, eta, t) * f.

    ``symbol`` is either a callable of broadcast arrays (K, ETA, t) or a
    precomputed array.  Singular symbol values are allowed only where the
    field coefficient vanishes; the result is zero there.
    """
    grid = f.grid
    sym = symbol(grid.K, grid.ETA, t) if callable(symbol) else symbol
    sym = np.asarray(sym)
    bad = ~np.isfinite(sym)
    if np.any(bad):
        hit = bad & (f.coeffs != 0)
        if np.any(hit):
            i, j = np.argwhere(hit)[0]
            raise DomainError(
                "singular symbol meets nonzero coefficient at "
                f"(k, eta) = ({grid.k_values[i]}, {grid.eta_values[j]:g})")
        sym = np.where(bad, 0.0, sym)
    return SpectralField(grid, sym * f.coeffs, f.label if label is None else label)


def project(f: SpectralField, part: str) -> SpectralField:
    """Keep (zero_mode) or remove (nonzero_modes) the k = 0 column."""
    out = np.zeros_like(f.coeffs) if part == "zero_mode" else f.coeffs.copy()
    if part == "zero_mode":
        out[0, :] = f.coeffs[0, :]
    elif part == "nonzero_modes":
        out[0, :] = 0.0
    else:
        raise ConfigError(f"unknown projection part {part!r}")
    return SpectralField(f.grid, out, f.label)


def dealias(f: SpectralField) -> SpectralField:
    return SpectralField(f.grid, np.where(f.grid.dealias_mask, f.coeffs, 0.0), f.label)


def transform_product(a: SpectralField, b: SpectralField, label: str = "") -> SpectralField:
    """Dealiased pseudo-spectral product of two fields on a shared grid.

    Computed by inverse transform, pointwise product, forward transform,
    then zeroing every mode outside the dealias ball.  For inputs
    supported inside the 2/3 ball this equals the exact convolution on
    the retained modes.
    """
    if a.grid is not b.grid and a.grid != b.grid:
        raise ConfigError("transform_product requires a shared grid")
    pa = to_physical(a)
    pb = to_physical(b)
    prod = from_physical(a.grid, pa * pb, label)
    return dealias(prod)


@dataclass
class FlowState:
    """The triple (phi, G, v0x) at a time t, sharing one grid.

    G is built from nonzero-x-frequency content only, so its k = 0
    column is identically zero; v0x lives on the k = 0 column alone.
    """

    t: float
    phi: SpectralField
    G: SpectralField
    v0x: SpectralField

    def __post_init__(self):
        g = self.phi.grid
        if self.G.grid != g or self.v0x.grid != g:
            raise ConfigError("FlowState fields must share one grid")
        if np.max(np.abs(self.G.coeffs[0, :])) > 0:
            raise ConfigError("G must have a zero k = 0 column")
        if np.max(np.abs(self.v0x.coeffs[1:, :])) > 0:
            raise ConfigError("v0x must be supported on the k = 0 column")

    @property
    def grid(self) -> Grid:
        return self.phi.grid
