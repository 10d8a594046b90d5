"""Overlaps between squeezed coherent states and the resolution of identity."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .errors import AdmissibilityError
from .fock import coefficient_ratios
from .params import EvolvedParams, ModelParams
from .special import hermite_all

BRANCH_CUT_GUARD = 1e-12
MAX_COMPLETENESS_N = 12
MAX_QUAD_ORDER = 128


@dataclass(frozen=True)
class OverlapResult:
    value: complex
    magnitude: float
    ill_conditioned: bool = False


@dataclass(frozen=True)
class CompletenessResult:
    matrix: np.ndarray
    residual: float
    tolerance: float

    @property
    def ok(self):
        return self.residual <= self.tolerance


def overlap(ep1: EvolvedParams, ep2: EvolvedParams, mp: ModelParams | None = None) -> OverlapResult:
    """<zeta1, xi1 | xi2, zeta2> for two snapshots at the same time.

    The relative dynamical phase is the difference of the two quadrature
    phases, -(hbar / 4 l^2) int_0^t Re(zeta2 - zeta1) / m.
    """
    if ep1.t != ep2.t:
        raise ValueError("overlaps are defined between snapshots at the same time")
    z1, z2, x1, x2 = ep1.zeta, ep2.zeta, ep1.xi, ep2.xi
    one1, one2 = 1 - abs(z1) ** 2, 1 - abs(z2) ** 2
    if not (one1 > 0 and one2 > 0):
        raise AdmissibilityError("both squeeze parameters need |zeta| < 1")
    cross = 1 - z1.conjugate() * z2
    xc1 = x1.conjugate()
    expo = (
        0.5 * (2 * xc1 * x2 - z2 * xc1**2 - z1.conjugate() * x2**2) / cross
        + 0.5 * (z2.conjugate() * x2**2 - abs(x2) ** 2) / one2
        + 0.5 * (z1 * xc1**2 - abs(x1) ** 2) / one1
        + 1j * (ep2.phase_phi - ep1.phase_phi)
    )
    value = (one1 * one2) ** 0.25 / cmath.sqrt(cross) * cmath.exp(expo)
    return OverlapResult(
        value=value, magnitude=abs(value), ill_conditioned=abs(cross) < BRANCH_CUT_GUARD
    )


def completeness_check(
    zeta: complex, mu: float, n_max: int, quad_order: int = 64, tolerance: float = 1e-6
) -> CompletenessResult:
    """M_{nn'} = int <n|varphi,zeta><zeta,varphi|n'> d^2 varphi / (pi mu).

    The varphi-plane is rotated by theta_f + theta_zeta/2 and scaled so the
    Gaussian factor separates into exp(-v1^2/(1+|zeta|) - v2^2/(1-|zeta|));
    (v1, v2) = sqrt(2|zeta|) (z1, z2), which keeps zeta = 0 regular.  A
    tensor Gauss-Hermite rule then integrates the polynomial remainder
    c_n c_n'^* / |c_0|^2 taken from the Fock recurrence.
    """
    zeta = complex(zeta)
    rho = abs(zeta)
    if not rho < 1:
        raise AdmissibilityError("completeness needs |zeta| < 1")
    if not mu > 0:
        raise AdmissibilityError("mu must be > 0")
    if n_max > MAX_COMPLETENESS_N:
        raise ValueError(f"n_max is capped at {MAX_COMPLETENESS_N}")
    if not 1 <= quad_order <= MAX_QUAD_ORDER:
        raise ValueError(f"quad_order must lie in [1, {MAX_QUAD_ORDER}]")

    nodes, weights = hermgauss(quad_order)
    s1, s2 = math.sqrt(1 + rho), math.sqrt(1 - rho)
    v1, v2 = np.meshgrid(s1 * nodes, s2 * nodes, indexing="ij")
    w = np.outer(weights, weights).ravel() * s1 * s2

    # |f| follows from mu; its phase only rotates the plane and drops out
    f_abs = math.sqrt(mu / (1 - rho**2))
    xi = ((v1 + 1j * v2) * cmath.exp(0.5j * cmath.phase(zeta))).ravel()
    ratios = coefficient_ratios(xi, zeta, n_max)  # (n_max + 1, Q^2)
    ground_sq = math.sqrt(1 - rho**2)  # |c_0|^2 with the Gaussian removed
    jacobian = f_abs**2  # d^2 u = |f|^2 d^2 v
    eta = 1.0 / (math.pi * mu)
    matrix = eta * jacobian * ground_sq * (ratios * w) @ ratios.conj().T
    residual = float(np.max(np.abs(matrix - np.eye(n_max + 1))))
    return CompletenessResult(matrix=matrix, residual=residual, tolerance=tolerance)


def hermite_orthogonality_check(a, b, n, n2, quad_order=64) -> complex:
    """int int H_n(x + iy) H_n2(x - iy) exp(-a x^2 - b y^2) dx dy by Gauss-Hermite."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    nodes, weights = hermgauss(quad_order)
    x, y = np.meshgrid(nodes / math.sqrt(a), nodes / math.sqrt(b), indexing="ij")
    top = max(n, n2)
    plus = hermite_all(x + 1j * y, top).values[n]
    minus = hermite_all(x - 1j * y, top).values[n2]
    w = np.outer(weights, weights) / math.sqrt(a * b)
    return complex(np.sum(w * plus * minus))


def hermite_orthogonality_exact(a, b, n, n2) -> float:
    """(pi / sqrt(ab)) 2^n n! ((a + b)/(ab))^n delta_{n n2}; exact when 1/a - 1/b = 1."""
    if n != n2:
        return 0.0
    return math.pi / math.sqrt(a * b) * 2**n * math.factorial(n) * ((a + b) / (a * b)) ** n


def orthogonality_weights(zeta_abs):
    """The (a, b) pair generated by a squeeze of modulus |zeta|."""
    return 2 * zeta_abs / (1 + zeta_abs), 2 * zeta_abs / (1 - zeta_abs)
