"""Moments, uncertainty products, quadratures and semiclassicality.

All moments of the Gaussian state follow in closed form from (xi, zeta):

    x_mean  = -sqrt(2) l Re[(1 - zeta*) xi] / (1 - |zeta|^2)
    p_mean  = -(sqrt(2) hbar / l) Im[(1 + zeta*) xi] / (1 - |zeta|^2)
    sigma_x = (l / sqrt(2)) |1 - zeta| / sqrt(1 - |zeta|^2)
    sigma_p = (hbar / (sqrt(2) l)) |1 + zeta| / sqrt(1 - |zeta|^2)
    sigma_xp = -hbar Im(zeta) / (1 - |zeta|^2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError
from .params import EvolvedParams, InitialConditions, ModelParams, ramp

SEMICLASSICAL_THRESHOLD = 5.0


@dataclass(frozen=True)
class GaussianMoments:
    mean_x: float
    mean_p: float
    sigma_x: float
    sigma_p: float
    sigma_xp: float

    @property
    def heisenberg_product(self):
        return self.sigma_x * self.sigma_p

    @property
    def robertson_schroedinger(self):
        """sigma_x^2 sigma_p^2 - sigma_xp^2, equal to hbar^2 / 4 for this family."""
        return (self.sigma_x * self.sigma_p) ** 2 - self.sigma_xp**2


@dataclass(frozen=True)
class QuadratureRecord:
    tau: float
    sigma_Q: float
    sigma_P: float
    r: float


def moments(ep: EvolvedParams, mp: ModelParams) -> GaussianMoments:
    zeta, xi = ep.zeta, ep.xi
    one = 1.0 - abs(zeta) ** 2
    if not one > 0:
        raise AdmissibilityError(f"|zeta| = {abs(zeta):.17g} must be < 1")
    root2 = math.sqrt(2.0)
    return GaussianMoments(
        mean_x=-root2 * mp.l * ((1 - zeta.conjugate()) * xi).real / one,
        mean_p=-root2 * mp.hbar / mp.l * ((1 + zeta.conjugate()) * xi).imag / one,
        sigma_x=mp.l / root2 * abs(1 - zeta) / math.sqrt(one),
        sigma_p=mp.hbar / (root2 * mp.l) * abs(1 + zeta) / math.sqrt(one),
        sigma_xp=-mp.hbar * zeta.imag / one,
    )


def displacement_from_means(x_mean, p_mean, zeta, mp: ModelParams) -> complex:
    """Invert the mean-value map: the xi that centres the packet at (x_mean, p_mean)."""
    root2 = math.sqrt(2.0)
    return complex(
        -(1 + zeta) / root2 * x_mean / mp.l - (1 - zeta) / root2 * 1j * mp.l * p_mean / mp.hbar
    )


def classical_trajectory(x0, p0, mp: ModelParams, t):
    """Hamiltonian trajectory of H = p^2 / 2m(t): momentum is conserved and
    the position saturates at x0 + p0 / (m0 gamma) when gamma > 0."""
    return x0 + p0 / mp.m0 * ramp(t, mp.gamma), p0


def uncertainty_product(ep: EvolvedParams, mp: ModelParams) -> float:
    return moments(ep, mp).heisenberg_product


def spreading_law(mp: ModelParams, sigma_x0, t):
    """Heisenberg product for the minimum-uncertainty start (real zeta0, l = sqrt(2) e^r sigma_x0)."""
    T = ramp(t, mp.gamma)
    return 0.5 * mp.hbar * math.sqrt(1.0 + (mp.hbar * T) ** 2 / (4.0 * mp.m0**2 * sigma_x0**4))


def width_law(mp: ModelParams, sigma_x0, t):
    """Position width for the same start: sigma_x0 sqrt(1 + hbar^2 T^2 / (4 m0^2 sigma_x0^4))."""
    return 2.0 * sigma_x0 * spreading_law(mp, sigma_x0, t) / mp.hbar


def quadrature_trace(r, tau_samples):
    """Dimensionless quadrature widths; sigma_P is constant, sigma_Q saturates."""
    sigma_P = math.exp(r) / math.sqrt(2.0)
    records = []
    for tau in tau_samples:
        growth = -math.expm1(-math.exp(2 * r) * tau)
        sigma_Q = math.exp(-r) / math.sqrt(2.0) * math.sqrt(1.0 + growth**2)
        records.append(QuadratureRecord(tau=float(tau), sigma_Q=sigma_Q, sigma_P=sigma_P, r=r))
    return records


def semiclassicality_ratio(ic: InitialConditions, mp: ModelParams) -> float:
    """|varphi|; the packet moves semiclassically when this is >> 1/2."""
    return abs(ic.varphi)


def is_semiclassical(ic: InitialConditions, mp: ModelParams, threshold=SEMICLASSICAL_THRESHOLD):
    return semiclassicality_ratio(ic, mp) >= threshold


def spreading_to_drift_ratio(sigma_x0, p0, mp: ModelParams) -> float:
    """hbar / (2 sigma_x0 |p0|) for an arbitrary displacement angle; inf when p0 = 0."""
    if p0 == 0:
        return math.inf
    return mp.hbar / (2.0 * sigma_x0 * abs(p0))


def grid_moments(x, density):
    """Mean and standard deviation of a sampled density on a uniform grid."""
    dx = x[1] - x[0]
    norm = np.sum(density) * dx
    mean = np.sum(x * density) * dx / norm
    var = np.sum((x - mean) ** 2 * density) * dx / norm
    return float(mean), float(math.sqrt(var))
