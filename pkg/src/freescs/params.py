"""Physical parameters and the integral-of-motion functions f, g, xi, zeta.

The free particle has mass ``m(t) = m0 * exp(gamma * t)``.  The integral of
motion ``A = f a + g a^dagger + varphi`` evolves through the two complex
functions f and g; their ratios give the displacement ``xi = varphi / f``
and squeeze ``zeta = g / f`` parameters that label the state at time t.

Two independent routes are provided: the closed form (with the phase
integral done by adaptive quadrature) and a direct adaptive Runge-Kutta
integration of the equations of motion.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import AdmissibilityError, IntegrationError

#: |zeta0| must stay below this for the state to be normalizable.
ZETA_GATE = 1.0 - 1e-12

#: |gamma t| below which ``ramp`` switches to its Taylor series.
RAMP_SERIES_SWITCH = 1e-4


@dataclass(frozen=True)
class ModelParams:
    """Physical constants and the exponential mass law.

    Attributes
    ----------
    hbar : float
        Reduced Planck constant, > 0.
    m0 : float
        Mass at t = 0, > 0.
    gamma : float
        Rate of the exponential mass law; the sign selects growth or decay.
    l : float
        Length scale of the ladder operators, > 0.
    """

    hbar: float
    m0: float
    gamma: float
    l: float

    def __post_init__(self):
        for name in ("hbar", "m0", "l"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise AdmissibilityError(f"{name} must be finite and > 0, got {value!r}")
        if not math.isfinite(self.gamma):
            raise AdmissibilityError(f"gamma must be finite, got {self.gamma!r}")

    @classmethod
    def from_sigma(cls, hbar, m0, gamma, sigma_x0, r=0.0):
        """Fix ``l = sqrt(2) e^r sigma_x0`` so that the t = 0 state minimizes
        the Heisenberg product with ``zeta0 = tanh(r)``."""
        if not sigma_x0 > 0:
            raise AdmissibilityError(f"sigma_x0 must be > 0, got {sigma_x0!r}")
        return cls(hbar=hbar, m0=m0, gamma=gamma, l=math.sqrt(2.0) * math.exp(r) * sigma_x0)

    def mass_at(self, t):
        return self.m0 * np.exp(self.gamma * t)

    @property
    def kappa(self):
        """hbar / (2 l^2 m0), the rate that drives f and g."""
        return self.hbar / (2.0 * self.l**2 * self.m0)


@dataclass(frozen=True)
class InitialConditions:
    """Initial values of f and g and the constant eigen-parameter varphi."""

    f0: complex
    g0: complex
    varphi: complex

    def __post_init__(self):
        object.__setattr__(self, "f0", complex(self.f0))
        object.__setattr__(self, "g0", complex(self.g0))
        object.__setattr__(self, "varphi", complex(self.varphi))
        if self.f0 == 0:
            raise AdmissibilityError("f0 must be nonzero")
        if not all(map(cmath.isfinite, (self.f0, self.g0, self.varphi))):
            raise AdmissibilityError("initial conditions must be finite")

    @classmethod
    def from_r(cls, r, varphi=0.0):
        """f0 = cosh r, g0 = sinh r, so that mu = 1 and zeta0 = tanh r."""
        return cls(f0=math.cosh(r), g0=math.sinh(r), varphi=varphi)

    @classmethod
    def from_polar(cls, r, varphi_abs, theta_varphi):
        return cls.from_r(r, cmath.rect(varphi_abs, theta_varphi))

    @property
    def mu(self):
        return abs(self.f0) ** 2 - abs(self.g0) ** 2

    @property
    def zeta0(self):
        return self.g0 / self.f0

    @property
    def xi0(self):
        return self.varphi / self.f0


@dataclass(frozen=True)
class EvolvedParams:
    """Snapshot of the state labels at time t.

    ``asymptotic_only`` marks states (the coherent-state regime) that solve
    the Schroedinger equation only in the large-mass limit.
    """

    t: float
    f: complex
    g: complex
    xi: complex
    zeta: complex
    mu: float
    phase_phi: float
    asymptotic_only: bool = False

    def with_phase(self, phase_phi):
        return replace(self, phase_phi=phase_phi)


def ramp(t, gamma):
    """Return ``(1 - exp(-gamma t)) / gamma``, equal to t at gamma = 0.

    A Taylor series is used for ``|gamma t| < 1e-4`` where the direct
    formula cancels.
    """
    x = gamma * t
    if abs(x) < RAMP_SERIES_SWITCH:
        return t * (1.0 - x / 2.0 + x * x / 6.0 - x**3 / 24.0 + x**4 / 120.0)
    return -math.expm1(-x) / gamma


def _check_admissible(mp, ic, t):
    if not math.isfinite(t):
        raise AdmissibilityError(f"time must be finite, got {t!r}")
    if not abs(ic.zeta0) <= ZETA_GATE:
        raise AdmissibilityError(
            f"|zeta0| = {abs(ic.zeta0):.17g} is not below 1; the state is not normalizable"
        )


def _fg_at(mp, ic, tau):
    shift = 1j * mp.kappa * (ic.f0 + ic.g0) * ramp(tau, mp.gamma)
    return ic.f0 + shift, ic.g0 - shift


def zeta_at(mp, ic, tau):
    f, g = _fg_at(mp, ic, tau)
    return g / f


def _phase_rate(mp, zeta, tau):
    # d(phase)/dt = -(hbar / 4 l^2) (Re zeta + 1) / m(t)
    return -mp.hbar / (4.0 * mp.l**2) * (zeta.real + 1.0) / (mp.m0 * math.exp(mp.gamma * tau))


def phase_integral(mp, ic, t, epsabs=1e-12):
    """Phase of the ground coefficient, by adaptive quadrature."""
    if t == 0:
        return 0.0
    value, _ = quad(
        lambda tau: _phase_rate(mp, zeta_at(mp, ic, tau), tau),
        0.0,
        t,
        epsabs=epsabs,
        epsrel=1e-13,
        limit=400,
    )
    return value


def evolve_closed_form(mp: ModelParams, ic: InitialConditions, t: float) -> EvolvedParams:
    """Evaluate f, g, xi, zeta, mu and the phase at time t in closed form."""
    t = float(t)
    _check_admissible(mp, ic, t)
    f, g = _fg_at(mp, ic, t)
    return EvolvedParams(
        t=t,
        f=f,
        g=g,
        xi=ic.varphi / f,
        zeta=g / f,
        mu=abs(f) ** 2 - abs(g) ** 2,
        phase_phi=phase_integral(mp, ic, t),
    )


def evolve_ode(mp: ModelParams, ic: InitialConditions, t: float, rtol=1e-10) -> EvolvedParams:
    """Integrate the equations of motion for f, g and the phase directly.

    Independent of the closed form: uses an adaptive 8th-order Runge-Kutta
    scheme on the complex system

        g' = -i hbar (f + g) / (2 l^2 m),   f' = +i hbar (f + g) / (2 l^2 m).
    """
    t = float(t)
    _check_admissible(mp, ic, t)
    if t == 0:
        return EvolvedParams(
            t=0.0, f=ic.f0, g=ic.g0, xi=ic.xi0, zeta=ic.zeta0, mu=ic.mu, phase_phi=0.0
        )

    def rhs(tau, y):
        f, g, _ = y
        rate = mp.hbar / (2.0 * mp.l**2 * mp.m0 * math.exp(mp.gamma * tau))
        drive = 1j * rate * (f + g)
        return [drive, -drive, _phase_rate(mp, g / f, tau)]

    sol = solve_ivp(
        rhs,
        (0.0, t),
        np.array([ic.f0, ic.g0, 0.0], dtype=complex),
        method="DOP853",
        rtol=rtol,
        atol=1e-14,
    )
    if not sol.success:
        raise IntegrationError(f"ODE integration failed before t={t}: {sol.message}")
    f, g, phase = (complex(v) for v in sol.y[:, -1])
    return EvolvedParams(
        t=t,
        f=f,
        g=g,
        xi=ic.varphi / f,
        zeta=g / f,
        mu=abs(f) ** 2 - abs(g) ** 2,
        phase_phi=float(phase.real),
    )


def cs_regime_params(mp: ModelParams, xi0: complex, t: float) -> EvolvedParams:
    """Coherent-state labels (zeta = 0) valid only as gamma t -> infinity.

    The displacement rotates as ``xi0 exp[i hbar (e^{-gamma t} - 1) / (2 l^2 m0 gamma)]``
    and the phase is ``hbar / (4 l^2 m(t) gamma)``.
    """
    if not mp.gamma > 0:
        raise AdmissibilityError("the coherent-state regime needs gamma > 0 (large-mass limit)")
    if not math.isfinite(t):
        raise AdmissibilityError(f"time must be finite, got {t!r}")
    xi = complex(xi0) * cmath.exp(-1j * mp.kappa * ramp(t, mp.gamma))
    phase = mp.hbar / (4.0 * mp.l**2 * mp.mass_at(t) * mp.gamma)
    return EvolvedParams(
        t=t, f=1.0 + 0j, g=0j, xi=xi, zeta=0j, mu=1.0, phase_phi=float(phase), asymptotic_only=True
    )
