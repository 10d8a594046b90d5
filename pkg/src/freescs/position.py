"""Coordinate representation: Fock functions, the SCS wavefunction, densities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError
from .fock import DEFAULT_EPS, coeffs_recurrence
from .params import EvolvedParams, ModelParams
from .statistics import moments

DEFAULT_POINTS = 1025
GRID_TOLERANCE = 1e-7


@dataclass(frozen=True)
class SpatialGrid:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 8:
            raise ValueError("a grid needs at least 8 points")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def spacing(self):
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def points(self):
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def refined(self, factor=2):
        """Same interval, spacing divided by ``factor``."""
        return SpatialGrid(self.x_min, self.x_max, factor * (self.n_points - 1) + 1)


@dataclass(frozen=True)
class WaveField:
    grid: SpatialGrid
    values: np.ndarray
    t: float
    norm_estimate: float
    grid_ok: bool = True


def auto_grid(ep: EvolvedParams, mp: ModelParams, n_points=DEFAULT_POINTS, sigmas=8.0):
    """Grid centred on the packet with half-width max(sigmas * sigma_x, 5 l)."""
    mo = moments(ep, mp)
    half = max(sigmas * mo.sigma_x, 5.0 * mp.l)
    return SpatialGrid(mo.mean_x - half, mo.mean_x + half, n_points)


def fock_functions(N: int, x, l: float) -> np.ndarray:
    """Psi_0..Psi_N at points x, shape (N + 1, len(x)).

    The Gaussian is folded into the recurrence so nothing overflows.
    """
    q = np.asarray(x, dtype=float) / l
    out = np.empty((N + 1,) + q.shape)
    out[0] = np.exp(-0.5 * q * q) / math.sqrt(l * math.sqrt(math.pi))
    if N >= 1:
        out[1] = math.sqrt(2.0) * q * out[0]
    for n in range(1, N):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * q * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def fock_function(n: int, x, mp: ModelParams):
    if n < 0:
        raise ValueError("n must be >= 0")
    return fock_functions(n, x, mp.l)[n]


def scs_values(ep: EvolvedParams, mp: ModelParams, x) -> np.ndarray:
    """Closed-form Gaussian <x|xi, zeta> with the dynamical phase."""
    zeta, xi, l = ep.zeta, ep.xi, mp.l
    one = 1.0 - abs(zeta) ** 2
    if not one > 0:
        raise AdmissibilityError(f"|zeta| = {abs(zeta):.17g} must be < 1")
    x = np.asarray(x, dtype=float)
    prefactor = one**0.25 / np.sqrt(math.sqrt(math.pi) * l * (1 - zeta))
    shifted = x + math.sqrt(2.0) * l * xi / (1 + zeta)
    expo = (
        -(1 + zeta) / (2 * l * l * (1 - zeta)) * shifted**2
        + (1 + zeta.conjugate()) * xi * xi / (2 * (1 + zeta) * one)
        - abs(xi) ** 2 / (2 * one)
        + 1j * ep.phase_phi
    )
    return prefactor * np.exp(expo)


def _field(values, grid, t, tol):
    norm = float(np.sum(np.abs(values) ** 2) * grid.spacing)
    return WaveField(
        grid=grid, values=values, t=t, norm_estimate=norm, grid_ok=abs(norm - 1.0) <= tol
    )


def scs_wavefunction(
    ep: EvolvedParams, mp: ModelParams, grid: SpatialGrid | None = None, tol_grid=GRID_TOLERANCE
) -> WaveField:
    """Sample the SCS on a grid.  ``grid_ok`` is False when the grid misses
    more than ``tol_grid`` of the norm."""
    grid = grid or auto_grid(ep, mp)
    return _field(scs_values(ep, mp, grid.points), grid, ep.t, tol_grid)


def scs_basis_sum(
    ep: EvolvedParams, mp: ModelParams, grid: SpatialGrid | None = None, eps=DEFAULT_EPS
) -> WaveField:
    """Sum_n c_n Psi_n(x) with recurrence coefficients.

    The truncation picked for a probability tail ``eps`` leaves an amplitude
    error of order sqrt(eps), so it is doubled once before summing.
    """
    grid = grid or auto_grid(ep, mp)
    N = 2 * coeffs_recurrence(ep, eps=eps).truncation
    expansion = coeffs_recurrence(ep, N=N, extend=False)
    basis = fock_functions(N, grid.points, mp.l)
    return _field(expansion.coeffs @ basis, grid, ep.t, GRID_TOLERANCE)


def probability_density(ep: EvolvedParams, mp: ModelParams, grid: SpatialGrid | None = None):
    """Normal density with the packet's mean and width."""
    grid = grid or auto_grid(ep, mp)
    mo = moments(ep, mp)
    z = (grid.points - mo.mean_x) / mo.sigma_x
    return np.exp(-0.5 * z * z) / (math.sqrt(2 * math.pi) * mo.sigma_x)


def semiclassical_wavefunction(
    x_mean, p_mean, ep: EvolvedParams, mp: ModelParams, grid: SpatialGrid | None = None
) -> WaveField:
    """Packet written through its mean position/momentum and widths.

    psi = (1/(2 pi sigma_x^2) (1 - zeta*)/(1 - zeta))^{1/4}
          exp[-(hbar - 2i sigma_xp)(x - x_mean)^2 / (4 hbar sigma_x^2)
              + i p_mean (2x - x_mean) / (2 hbar) + i phi]
    """
    grid = grid or auto_grid(ep, mp)
    mo = moments(ep, mp)
    zeta, hbar = ep.zeta, mp.hbar
    x = grid.points
    amplitude = (1.0 / (2 * math.pi * mo.sigma_x**2) * (1 - zeta.conjugate()) / (1 - zeta)) ** 0.25
    expo = (
        -(hbar - 2j * mo.sigma_xp) / hbar * (x - x_mean) ** 2 / (4 * mo.sigma_x**2)
        + 1j * p_mean / (2 * hbar) * (2 * x - x_mean)
        + 1j * ep.phase_phi
    )
    return _field(amplitude * np.exp(expo), grid, ep.t, GRID_TOLERANCE)
