"""Finite-difference check that a sampled state solves the Schroedinger equation.

The residual ``R = -(hbar^2 / 2m) d^2 psi/dx^2 - i hbar d psi/dt`` is formed
from closed-form samples only: a central stencil in x and a symmetric
two-point difference in t.  No propagator is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .params import EvolvedParams, ModelParams
from .position import SpatialGrid, auto_grid, scs_values
from .statistics import moments

_SECOND_DERIVATIVE = {
    2: np.array([1.0, -2.0, 1.0]),
    4: np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0,
    6: np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / 180.0,
}

#: residuals below this are treated as converged without a refinement check
RESIDUAL_FLOOR = 1e-9


@dataclass(frozen=True)
class ResidualReport:
    t: float
    l2_residual: float
    relative_residual: float
    stencil_orders: tuple
    converged: bool = True


#: minimum grid size used when the caller passes no grid
RESIDUAL_POINTS = 2049

#: largest k * dx allowed on the default grid, k = (|p_mean| + 8 sigma_p) / hbar
MAX_PHASE_STEP = 0.1


def default_dt(mp: ModelParams, t: float) -> float:
    """1e-4 of the shorter of the phase time 2 l^2 m(t) / hbar and the mass time 1/|gamma|."""
    scale = 2 * mp.l**2 * float(mp.mass_at(t)) / mp.hbar
    if mp.gamma != 0:
        scale = min(scale, 1.0 / abs(mp.gamma))
    return 1e-4 * scale


def residual_grid(ep: EvolvedParams, mp: ModelParams) -> SpatialGrid:
    """Auto grid fine enough for the stencil to resolve the packet's local wavenumber."""
    coarse = auto_grid(ep, mp, n_points=RESIDUAL_POINTS)
    mo = moments(ep, mp)
    k_max = (abs(mo.mean_p) + 8 * mo.sigma_p) / mp.hbar
    needed = math.ceil((coarse.x_max - coarse.x_min) * k_max / MAX_PHASE_STEP) + 1
    return SpatialGrid(coarse.x_min, coarse.x_max, max(RESIDUAL_POINTS, needed))


def second_derivative(values, h, order=4):
    """Central second derivative on the interior points (order//2 trimmed each side)."""
    stencil = _SECOND_DERIVATIVE[order]
    half = len(stencil) // 2
    n = len(values)
    out = np.zeros(n - 2 * half, dtype=values.dtype)
    for k, c in enumerate(stencil):
        out += c * values[k : n - 2 * half + k]
    return out / (h * h)


def _raw_residual(sample, mp, grid, t, dx_order, dt):
    x = grid.points
    h = grid.spacing
    half = len(_SECOND_DERIVATIVE[dx_order]) // 2
    mass = float(mp.mass_at(t))
    kinetic = -(mp.hbar**2) / (2 * mass) * second_derivative(sample(t, x), h, dx_order)
    ddt = (sample(t + dt, x) - sample(t - dt, x))[half:-half] / (2 * dt)
    res = kinetic - 1j * mp.hbar * ddt
    l2 = math.sqrt(float(np.sum(np.abs(res) ** 2)) * h)
    scale = math.sqrt(float(np.sum(np.abs(kinetic) ** 2)) * h)
    return l2, l2 / scale


def residual(
    ep_at: Callable[[float], EvolvedParams],
    mp: ModelParams,
    grid: SpatialGrid | None,
    t: float,
    dx_order: int = 4,
    dt_step: float | None = None,
    check_convergence: bool = True,
) -> ResidualReport:
    """Schroedinger residual of the state ``ep_at`` at time t.

    ``converged`` is False when halving both dx and dt fails to shrink a
    residual that is above the floor; exact solutions shrink, states with
    wrong dynamics do not.
    """
    if dx_order not in _SECOND_DERIVATIVE:
        raise ValueError(f"dx_order must be one of {sorted(_SECOND_DERIVATIVE)}")
    dt = default_dt(mp, t) if dt_step is None else dt_step
    grid = grid or residual_grid(ep_at(t), mp)

    def sample(tau, x):
        return scs_values(ep_at(tau), mp, x)

    l2, rel = _raw_residual(sample, mp, grid, t, dx_order, dt)
    converged = True
    if check_convergence and rel > RESIDUAL_FLOOR:
        _, rel_fine = _raw_residual(sample, mp, grid.refined(2), t, dx_order, dt / 2)
        converged = rel_fine < 0.75 * rel
    return ResidualReport(
        t=t,
        l2_residual=l2,
        relative_residual=rel,
        stencil_orders=(dx_order, 2),
        converged=converged,
    )


def norm_rate(ep_at, mp: ModelParams, grid: SpatialGrid, t: float, dt_step=None) -> float:
    """Central-difference estimate of d/dt int |psi|^2 dx."""
    dt = default_dt(mp, t) if dt_step is None else dt_step
    x = grid.points

    def norm(tau):
        return float(np.sum(np.abs(scs_values(ep_at(tau), mp, x)) ** 2) * grid.spacing)

    return (norm(t + dt) - norm(t - dt)) / (2 * dt)


def convergence_order(steps, residuals):
    """Least-squares slope of log(residual) against log(step)."""
    slope, _ = np.polyfit(np.log(steps), np.log(residuals), 1)
    return float(slope)
