"""Fock-state expansion of the squeezed coherent states.

The state ``|xi, zeta>`` expands on the time-independent number states as

    c_n = c_0 (-1)^n (zeta/2)^{n/2} H_n(xi / sqrt(2 zeta)) / sqrt(n!)

with ground amplitude

    c_0 = (1 - |zeta|^2)^{1/4} exp(-(|xi|^2 - zeta* xi^2) / (2 (1 - |zeta|^2)) + i phi).

The same coefficients follow from the three-term recurrence obtained by
inserting the expansion into the annihilation condition; both routes are
implemented so each can check the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import AdmissibilityError, HermiteOverflowError, TruncationError
from .params import EvolvedParams
from .special import hermite_normalized_all

DEFAULT_EPS = 1e-10
HARD_CAP = 4096
DEFAULT_START = 32


@dataclass(frozen=True)
class FockExpansion:
    coeffs: np.ndarray
    truncation: int
    tail_bound: float

    @property
    def norm_sq(self):
        return float(np.sum(np.abs(self.coeffs) ** 2))


@dataclass(frozen=True)
class TransitionSpectrum:
    probs: np.ndarray
    total: float
    method: str = "closed_form"

    @property
    def truncation(self):
        return len(self.probs) - 1


def _check_zeta(zeta):
    if not abs(zeta) < 1:
        raise AdmissibilityError(f"|zeta| = {abs(zeta):.17g} must be < 1")


def ground_amplitude(ep: EvolvedParams) -> complex:
    """c_0 including the dynamical phase."""
    _check_zeta(ep.zeta)
    one = 1.0 - abs(ep.zeta) ** 2
    xi = ep.xi
    expo = -0.5 * (abs(xi) ** 2 - ep.zeta.conjugate() * xi * xi) / one + 1j * ep.phase_phi
    return one**0.25 * complex(np.exp(expo))


def phase_angle(ep: EvolvedParams) -> float:
    """The dynamical phase shared by every downstream state."""
    return ep.phase_phi


def _closed_form_coeffs(ep, N, branch):
    c0 = ground_amplitude(ep)
    n = np.arange(N + 1)
    xi, zeta = ep.xi, ep.zeta
    if zeta == 0:
        # coherent-state series: c_n = c0 (-xi)^n / sqrt(n!)
        if xi == 0:
            out = np.zeros(N + 1, dtype=complex)
            out[0] = c0
            return out
        log_mag = n * math.log(abs(xi)) - 0.5 * gammaln(n + 1)
        return c0 * np.exp(log_mag + 1j * n * np.angle(-xi))
    root = branch * np.sqrt(complex(zeta))
    y = xi / (math.sqrt(2.0) * root)
    # (zeta/2)^{n/2} H_n(y) / sqrt(n!) == zeta^{n/2} H_n(y) / sqrt(2^n n!)
    hn = hermite_normalized_all(y, N)
    with np.errstate(under="ignore"):
        powers = root**n
    return c0 * (-1.0) ** n * powers * hn


def _recurrence(xi, zeta, N, c0):
    """c_{n+1} = -(sqrt(n) zeta c_{n-1} + xi c_n) / sqrt(n + 1), array-friendly in xi."""
    xi = np.asarray(xi, dtype=complex)
    out = np.empty((N + 1,) + xi.shape, dtype=complex)
    out[0] = c0
    if N >= 1:
        out[1] = -xi * out[0]
    for n in range(1, N):
        out[n + 1] = -(math.sqrt(n) * zeta * out[n - 1] + xi * out[n]) / math.sqrt(n + 1)
    return out


def _abs_sq_sum(values):
    return float(np.sum(np.abs(values) ** 2))


def _auto_truncate(build, N, eps, extend, what, mass=_abs_sq_sum):
    """Double N until ``1 - mass(build(N)) < eps``; returns (values, N, tail)."""
    N = max(int(N), 0)
    values = build(N)
    tail = 1.0 - mass(values)
    while extend and tail >= eps:
        if N >= HARD_CAP:
            raise TruncationError(
                f"{what}: tail {tail:.3e} still >= eps={eps:g} at the hard cap N={HARD_CAP}",
                truncation=N,
                tail_bound=tail,
            )
        N = min(max(2 * N, 1), HARD_CAP)
        values = build(N)
        tail = 1.0 - mass(values)
    return values, N, tail


def coeffs_closed_form(
    ep: EvolvedParams, N: int = DEFAULT_START, eps: float = DEFAULT_EPS, extend=True, branch=1
) -> FockExpansion:
    """Coefficients from the Hermite closed form.

    ``branch`` (+1 or -1) selects the square root of zeta; the result does
    not depend on it.  With ``extend`` the truncation is doubled until the
    missing probability falls below ``eps`` (hard cap 4096).
    """
    _check_zeta(ep.zeta)
    coeffs, N, tail = _auto_truncate(
        lambda n: _closed_form_coeffs(ep, n, branch), N, eps, extend, "closed-form coefficients"
    )
    return FockExpansion(coeffs=coeffs, truncation=N, tail_bound=tail)


def coeffs_recurrence(
    ep: EvolvedParams, N: int = DEFAULT_START, eps: float = DEFAULT_EPS, extend=True
) -> FockExpansion:
    """Coefficients from the three-term recurrence seeded by c_0."""
    _check_zeta(ep.zeta)
    c0 = ground_amplitude(ep)
    coeffs, N, tail = _auto_truncate(
        lambda n: _recurrence(ep.xi, ep.zeta, n, c0), N, eps, extend, "recurrence coefficients"
    )
    return FockExpansion(coeffs=coeffs, truncation=N, tail_bound=tail)


def coefficient_ratios(xi, zeta, N):
    """c_n / c_0 for an array of displacements at fixed squeeze."""
    return _recurrence(xi, zeta, N, 1.0)


def _spectrum_closed_form(ep, N):
    n = np.arange(N + 1)
    xi, zeta = ep.xi, ep.zeta
    if zeta == 0:
        # Poisson law with mean |xi|^2
        if xi == 0:
            probs = np.zeros(N + 1)
            probs[0] = 1.0
            return probs
        a = abs(xi) ** 2
        return np.exp(n * math.log(a) - a - gammaln(n + 1))
    one = 1.0 - abs(zeta) ** 2
    if xi == 0:
        # even-only squeezed vacuum: P_2k = sqrt(1-|z|^2) |z|^{2k} (2k)! / (4^k k!^2)
        probs = np.zeros(N + 1)
        k = n[::2] // 2
        with np.errstate(divide="ignore"):
            log_p = (
                0.5 * math.log(one)
                + 2 * k * math.log(abs(zeta))
                + gammaln(2 * k + 1)
                - 2 * k * math.log(2.0)
                - 2 * gammaln(k + 1)
            )
        probs[::2] = np.exp(log_p)
        return probs
    prefactor = math.sqrt(one) * math.exp(
        ((zeta.conjugate() * xi * xi).real - abs(xi) ** 2) / one
    )
    y = xi / np.sqrt(2.0 * zeta)
    hn = hermite_normalized_all(y, N)
    # square the amplitude, not |H_n|, so large Hermite values meet the small powers first
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        amp = math.sqrt(prefactor) * abs(zeta) ** (0.5 * n) * np.abs(hn)
        probs = amp * amp
    if not np.all(np.isfinite(probs)):
        raise HermiteOverflowError("transition amplitude is not representable; use the recurrence")
    return probs


def transition_probabilities(
    ep: EvolvedParams, N: int = DEFAULT_START, eps: float = DEFAULT_EPS, extend=True
) -> TransitionSpectrum:
    """P_n = |<n|xi, zeta>|^2 for n = 0..N.

    Uses the closed form (Poisson law at zeta = 0, even-only law at xi = 0).
    If the Hermite factor overflows the magnitude guard, the squared
    recurrence coefficients are returned instead and ``method`` records it.
    """
    _check_zeta(ep.zeta)
    method = "closed_form"

    def build(n):
        nonlocal method
        if method == "closed_form":
            try:
                return _spectrum_closed_form(ep, n)
            except HermiteOverflowError:
                method = "recurrence"
        return np.abs(_recurrence(ep.xi, ep.zeta, n, ground_amplitude(ep))) ** 2

    probs, _, _ = _auto_truncate(build, N, eps, extend, "transition spectrum", mass=np.sum)
    return TransitionSpectrum(probs=probs, total=float(probs.sum()), method=method)
