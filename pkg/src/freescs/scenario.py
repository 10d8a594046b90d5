"""Scenario files: flat ``key = value`` text with dotted section keys.

Example::

    # slowly growing mass, packet launched to the left
    model.hbar = 1
    model.m0 = 1
    model.gamma = 0.01
    init.r = 0
    init.varphi = 0.5
    init.theta_varphi = 1.5707963267948966
    init.sigma_x0 = 1
    time.t_start = 0
    time.t_end = 100
    time.n_samples = 50
    output.artifacts = density, trajectory

The initial state is given either as ``init.f0 / init.g0 / init.varphi``
(with ``model.l``) or through ``init.r / init.varphi / init.theta_varphi /
init.sigma_x0``, which sets ``l = sqrt(2) e^r sigma_x0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AdmissibilityError
from .params import (
    EvolvedParams,
    InitialConditions,
    ModelParams,
    cs_regime_params,
    evolve_closed_form,
    evolve_ode,
)
from .position import DEFAULT_POINTS, SpatialGrid

SECTIONS = ("model", "init", "time", "grid", "output")

KNOWN_KEYS = {
    "model": {"hbar", "m0", "gamma", "l"},
    "init": {"f0", "g0", "varphi", "r", "theta_varphi", "sigma_x0", "regime"},
    "time": {"t_start", "t_end", "n_samples"},
    "grid": {"mode", "x_min", "x_max", "n_points"},
    "output": {"artifacts", "truncation_eps", "gamma_sweep", "n_max", "evolution"},
}

ARTIFACTS = (
    "evolve",
    "moments",
    "uncertainty",
    "quadrature",
    "density",
    "trajectory",
    "transition",
    "coeffs",
    "verify",
)


class ScenarioParseError(ValueError):
    """Malformed text (exit code 2)."""


class ScenarioValidationError(ValueError):
    """Well-formed text describing an invalid scenario (exit code 3)."""


@dataclass(frozen=True)
class TimeSpec:
    t_start: float
    t_end: float
    n_samples: int

    @property
    def samples(self):
        return np.linspace(self.t_start, self.t_end, self.n_samples)


@dataclass(frozen=True)
class RParameterization:
    r: float
    varphi: float
    theta_varphi: float
    sigma_x0: float


@dataclass(frozen=True)
class Scenario:
    model: ModelParams
    init: InitialConditions
    time: TimeSpec
    grid: SpatialGrid | None  # None means auto
    grid_points: int
    truncation_eps: float
    outputs: tuple
    regime: str = "scs"
    evolution: str = "closed_form"
    r_form: RParameterization | None = None
    gamma_sweep: tuple = ()
    n_max: int = 40
    raw: dict = field(default_factory=dict)

    def evolved(self, t, model: ModelParams | None = None) -> EvolvedParams:
        mp = model or self.model
        if self.regime == "cs":
            return cs_regime_params(mp, self.init.xi0, t)
        if self.evolution == "ode":
            return evolve_ode(mp, self.init, t)
        return evolve_closed_form(mp, self.init, t)

    def with_gamma(self, gamma) -> ModelParams:
        return ModelParams(hbar=self.model.hbar, m0=self.model.m0, gamma=gamma, l=self.model.l)


def parse_text(text: str) -> dict:
    """Split into ``{section: {key: raw string}}``; comments start with '#'."""
    table = {name: {} for name in SECTIONS}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioParseError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "grid" and value == "auto":
            key = "grid.mode"
        if "." not in key:
            raise ScenarioParseError(f"line {lineno}: key {key!r} lacks a section prefix")
        section, name = key.split(".", 1)
        if section not in table:
            raise ScenarioParseError(f"line {lineno}: unknown section {section!r}")
        if name in table[section]:
            raise ScenarioParseError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ScenarioParseError(f"line {lineno}: empty value for {key!r}")
        table[section][name] = value
    return table


def _float(raw, key):
    try:
        value = float(raw)
    except ValueError:
        raise ScenarioParseError(f"{key}: not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise ScenarioValidationError(f"{key}: must be finite")
    return value


def _int(raw, key):
    try:
        return int(raw)
    except ValueError:
        raise ScenarioParseError(f"{key}: not an integer: {raw!r}") from None


def _complex(raw, key):
    text = raw.replace(" ", "").replace("i", "j")
    try:
        return complex(text)
    except ValueError:
        raise ScenarioParseError(f"{key}: not a complex number: {raw!r}") from None


def _list(raw):
    return [item.strip() for item in raw.split(",") if item.strip()]


def build_scenario(table: dict) -> Scenario:
    for section, keys in table.items():
        unknown = set(keys) - KNOWN_KEYS[section]
        if unknown:
            raise ScenarioValidationError(
                f"unknown keys in [{section}]: {', '.join(sorted(unknown))}"
            )
    model, init, time_, grid, output = (table[s] for s in SECTIONS)

    def need(section, key):
        if key not in table[section]:
            raise ScenarioValidationError(f"missing required key {section}.{key}")
        return table[section][key]

    hbar = _float(need("model", "hbar"), "model.hbar")
    m0 = _float(need("model", "m0"), "model.m0")
    gamma = _float(need("model", "gamma"), "model.gamma")

    fg_form = any(k in init for k in ("f0", "g0"))
    r_form_keys = any(k in init for k in ("r", "theta_varphi", "sigma_x0"))
    if fg_form == r_form_keys:
        raise ScenarioValidationError(
            "give exactly one initial form: (init.f0, init.g0, init.varphi) "
            "or (init.r, init.varphi, init.theta_varphi, init.sigma_x0)"
        )
    r_form = None
    try:
        if fg_form:
            l = _float(need("model", "l"), "model.l")
            mp = ModelParams(hbar=hbar, m0=m0, gamma=gamma, l=l)
            ic = InitialConditions(
                f0=_complex(need("init", "f0"), "init.f0"),
                g0=_complex(need("init", "g0"), "init.g0"),
                varphi=_complex(need("init", "varphi"), "init.varphi"),
            )
        else:
            if "l" in model:
                raise ScenarioValidationError("model.l is derived from init.r and init.sigma_x0")
            r_form = RParameterization(
                r=_float(need("init", "r"), "init.r"),
                varphi=_float(need("init", "varphi"), "init.varphi"),
                theta_varphi=_float(init.get("theta_varphi", "0"), "init.theta_varphi"),
                sigma_x0=_float(need("init", "sigma_x0"), "init.sigma_x0"),
            )
            if r_form.varphi < 0:
                raise ScenarioValidationError("init.varphi is a modulus in the r form; use theta_varphi")
            mp = ModelParams.from_sigma(hbar, m0, gamma, r_form.sigma_x0, r_form.r)
            ic = InitialConditions.from_polar(r_form.r, r_form.varphi, r_form.theta_varphi)
    except AdmissibilityError as exc:
        raise ScenarioValidationError(str(exc)) from None
    if not ic.mu > 0:
        raise ScenarioValidationError(f"|f0|^2 - |g0|^2 = {ic.mu:g} must be > 0")

    regime = init.get("regime", "scs")
    if regime not in ("scs", "cs"):
        raise ScenarioValidationError("init.regime must be 'scs' or 'cs'")
    if regime == "cs":
        if ic.zeta0 != 0:
            raise ScenarioValidationError("the coherent-state regime needs zeta0 = 0 (g0 = 0 or r = 0)")
        if not gamma > 0:
            raise ScenarioValidationError("the coherent-state regime needs model.gamma > 0")

    ts = TimeSpec(
        t_start=_float(need("time", "t_start"), "time.t_start"),
        t_end=_float(need("time", "t_end"), "time.t_end"),
        n_samples=_int(need("time", "n_samples"), "time.n_samples"),
    )
    if ts.n_samples < 2:
        raise ScenarioValidationError("time.n_samples must be >= 2")

    mode = grid.get("mode", "auto" if "x_min" not in grid else "explicit")
    grid_points = _int(grid.get("n_points", str(DEFAULT_POINTS)), "grid.n_points")
    if grid_points < 8:
        raise ScenarioValidationError("grid.n_points must be >= 8")
    spatial = None
    if mode == "explicit":
        try:
            spatial = SpatialGrid(
                _float(need("grid", "x_min"), "grid.x_min"),
                _float(need("grid", "x_max"), "grid.x_max"),
                grid_points,
            )
        except ValueError as exc:
            if isinstance(exc, (ScenarioParseError, ScenarioValidationError)):
                raise
            raise ScenarioValidationError(str(exc)) from None
    elif mode != "auto":
        raise ScenarioValidationError("grid.mode must be 'auto' or 'explicit'")

    eps = _float(output.get("truncation_eps", "1e-10"), "output.truncation_eps")
    if not 0 < eps <= 1e-4:
        raise ScenarioValidationError("output.truncation_eps must lie in (0, 1e-4]")
    outputs = tuple(_list(output.get("artifacts", "")))
    bad = [a for a in outputs if a not in ARTIFACTS]
    if bad:
        raise ScenarioValidationError(f"unknown artifacts: {', '.join(bad)}")
    sweep = tuple(_float(v, "output.gamma_sweep") for v in _list(output.get("gamma_sweep", "")))
    n_max = _int(output.get("n_max", "40"), "output.n_max")
    if n_max < 0:
        raise ScenarioValidationError("output.n_max must be >= 0")
    evolution = output.get("evolution", "closed_form")
    if evolution not in ("closed_form", "ode"):
        raise ScenarioValidationError("output.evolution must be 'closed_form' or 'ode'")

    return Scenario(
        model=mp,
        init=ic,
        time=ts,
        grid=spatial,
        grid_points=grid_points,
        truncation_eps=eps,
        outputs=outputs,
        regime=regime,
        evolution=evolution,
        r_form=r_form,
        gamma_sweep=sweep,
        n_max=n_max,
        raw={s: dict(v) for s, v in table.items() if v},
    )


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ScenarioParseError(f"cannot read scenario {path}: {exc}") from None
    return build_scenario(parse_text(text))
