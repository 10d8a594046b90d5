"""Command-line front end.

    freescs run SCENARIO OUTDIR
    freescs {evolve,coeffs,density,moments,transition,overlap,completeness,verify} SCENARIO [flags]

``run`` writes one CSV per artifact listed in ``output.artifacts`` plus
``manifest.json``.  The other subcommands print a single table to stdout.
Exit codes: 0 ok, 2 parse error, 3 validation error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import AdmissibilityError, HermiteOverflowError, IntegrationError, TruncationError
from .fock import coeffs_closed_form, coeffs_recurrence, transition_probabilities
from .overlap import completeness_check, overlap
from .position import auto_grid, probability_density, scs_values
from .scenario import (
    Scenario,
    ScenarioParseError,
    ScenarioValidationError,
    load_scenario,
)
from .statistics import classical_trajectory, grid_moments, moments, quadrature_trace
from .verify import residual

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3, 4


@dataclass
class Table:
    name: str
    columns: list
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    buf.write(f"# artifact: {table.name}\n")
    for key, value in table.meta.items():
        buf.write(f"# {key}: {_fmt(value)}\n")
    buf.write(",".join(table.columns) + "\n")
    for row in table.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else repr(value)
    return value


def to_json(table: Table) -> str:
    doc = {
        "artifact": table.name,
        "meta": {k: _jsonable(v) for k, v in table.meta.items()},
        "columns": table.columns,
        "rows": [[_jsonable(v) for v in row] for row in table.rows],
    }
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------- artifacts


def _grid_for(sc: Scenario, ep):
    return sc.grid or auto_grid(ep, sc.model, n_points=sc.grid_points)


def table_evolve(sc: Scenario, times) -> Table:
    table = Table(
        "evolve",
        ["t", "f_re", "f_im", "g_re", "g_im", "xi_re", "xi_im", "zeta_re", "zeta_im", "mu", "phase_phi"],
    )
    for t in times:
        ep = sc.evolved(t)
        table.rows.append(
            [float(t), ep.f.real, ep.f.imag, ep.g.real, ep.g.imag, ep.xi.real, ep.xi.imag,
             ep.zeta.real, ep.zeta.imag, ep.mu, ep.phase_phi]
        )
    return table


def table_moments(sc: Scenario, times) -> Table:
    table = Table(
        "moments",
        ["t", "mean_x", "mean_p", "sigma_x", "sigma_p", "sigma_xp", "sigma_x_sigma_p"],
    )
    for t in times:
        mo = moments(sc.evolved(t), sc.model)
        table.rows.append(
            [float(t), mo.mean_x, mo.mean_p, mo.sigma_x, mo.sigma_p, mo.sigma_xp, mo.heisenberg_product]
        )
    return table


def table_uncertainty(sc: Scenario, times) -> Table:
    gammas = sc.gamma_sweep or (sc.model.gamma,)
    table = Table("uncertainty", ["gamma", "t", "sigma_x_sigma_p"])
    for gamma in gammas:
        mp = sc.with_gamma(gamma)
        for t in times:
            table.rows.append([float(gamma), float(t), moments(sc.evolved(t, mp), mp).heisenberg_product])
    return table


def table_quadrature(sc: Scenario, times) -> Table:
    if sc.r_form is None:
        raise ScenarioValidationError("the quadrature artifact needs the r-parameterized init form")
    table = Table("quadrature", ["tau", "sigma_Q", "sigma_P", "sigma_Q_sigma_P"])
    table.meta["r"] = sc.r_form.r
    for rec in quadrature_trace(sc.r_form.r, times):
        table.rows.append([rec.tau, rec.sigma_Q, rec.sigma_P, rec.sigma_Q * rec.sigma_P])
    return table


def table_density(sc: Scenario, times) -> Table:
    table = Table("density", ["t", "x", "rho"])
    for t in times:
        ep = sc.evolved(t)
        grid = _grid_for(sc, ep)
        rho = probability_density(ep, sc.model, grid)
        table.rows.extend([float(t), float(x), float(r)] for x, r in zip(grid.points, rho))
    return table


def table_trajectory(sc: Scenario, times) -> Table:
    table = Table("trajectory", ["t", "x_mean", "x_classical", "p_mean", "sigma_x", "x_mean_grid"])
    start = moments(sc.evolved(sc.time.t_start), sc.model)
    for t in times:
        ep = sc.evolved(t)
        mo = moments(ep, sc.model)
        x_cl, _ = classical_trajectory(start.mean_x, start.mean_p, sc.model, t - sc.time.t_start)
        grid = _grid_for(sc, ep)
        x_grid, _ = grid_moments(grid.points, np.abs(scs_values(ep, sc.model, grid.points)) ** 2)
        table.rows.append([float(t), mo.mean_x, float(x_cl), mo.mean_p, mo.sigma_x, x_grid])
    return table


def table_transition(sc: Scenario, times, n_max=None) -> Table:
    table = Table("transition", ["t", "n", "P_n"])
    fixed = n_max is not None
    for t in times:
        spec = transition_probabilities(
            sc.evolved(t), N=n_max if fixed else 32, eps=sc.truncation_eps, extend=not fixed
        )
        table.rows.extend([float(t), n, float(p)] for n, p in enumerate(spec.probs))
        table.meta[f"total@t={_fmt(float(t))}"] = spec.total
    return table


def table_coeffs(sc: Scenario, times, n_max=None, method="recurrence") -> Table:
    table = Table("coeffs", ["t", "n", "c_re", "c_im", "abs_sq"])
    build = coeffs_recurrence if method == "recurrence" else coeffs_closed_form
    fixed = n_max is not None
    table.meta["method"] = method
    for t in times:
        exp = build(sc.evolved(t), N=n_max if fixed else 32, eps=sc.truncation_eps, extend=not fixed)
        table.rows.extend(
            [float(t), n, c.real, c.imag, abs(c) ** 2] for n, c in enumerate(exp.coeffs)
        )
        table.meta[f"tail@t={_fmt(float(t))}"] = exp.tail_bound
    return table


def table_verify(sc: Scenario, times) -> Table:
    table = Table("verify", ["t", "l2_residual", "relative_residual", "space_order", "time_order", "converged"])
    for t in times:
        rep = residual(sc.evolved, sc.model, sc.grid, float(t))
        table.rows.append(
            [float(t), rep.l2_residual, rep.relative_residual, *rep.stencil_orders, rep.converged]
        )
    return table


ARTIFACT_BUILDERS = {
    "evolve": table_evolve,
    "moments": table_moments,
    "uncertainty": table_uncertainty,
    "quadrature": table_quadrature,
    "density": table_density,
    "trajectory": table_trajectory,
    "transition": lambda sc, times: table_transition(sc, times, sc.n_max),
    "coeffs": lambda sc, times: table_coeffs(sc, times, sc.n_max),
    "verify": table_verify,
}


# ---------------------------------------------------------------- commands


def _manifest(sc: Scenario, written, wall):
    return {
        "library": "freescs",
        "version": __version__,
        "inputs": sc.raw,
        "resolved": {
            "hbar": sc.model.hbar,
            "m0": sc.model.m0,
            "gamma": sc.model.gamma,
            "l": sc.model.l,
            "f0": [sc.init.f0.real, sc.init.f0.imag],
            "g0": [sc.init.g0.real, sc.init.g0.imag],
            "varphi": [sc.init.varphi.real, sc.init.varphi.imag],
            "regime": sc.regime,
            "evolution": sc.evolution,
        },
        "tolerances": {
            "truncation_eps": sc.truncation_eps,
            "n_max": sc.n_max,
            "grid": "auto" if sc.grid is None else [sc.grid.x_min, sc.grid.x_max, sc.grid.n_points],
            "grid_points": sc.grid_points,
        },
        "artifacts": written,
        "wall_time_s": wall,
    }


def cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    if not sc.outputs:
        raise ScenarioValidationError("output.artifacts lists nothing to write")
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    times = sc.time.samples
    written = {}
    for name in sc.outputs:
        table = ARTIFACT_BUILDERS[name](sc, times)
        path = out / f"{name}.csv"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(to_csv(table))
        written[name] = {"file": path.name, "rows": len(table.rows), "columns": table.columns}
    manifest = _manifest(sc, written, time.perf_counter() - start)
    with open(out / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def _times(args, sc):
    return [sc.time.t_start if args.t is None else args.t]


def cmd_table(args) -> Table:
    sc = load_scenario(args.scenario)
    times = _times(args, sc)
    cmd = args.command
    if cmd == "evolve":
        return table_evolve(sc, times)
    if cmd == "moments":
        return table_moments(sc, times)
    if cmd == "density":
        return table_density(sc, times)
    if cmd == "transition":
        return table_transition(sc, times, args.n_max)
    if cmd == "coeffs":
        return table_coeffs(sc, times, args.n_max, args.method)
    if cmd == "verify":
        return table_verify(sc, times)
    if cmd == "overlap":
        other = load_scenario(args.other)
        if other.model != sc.model:
            raise ScenarioValidationError("both scenarios must share the model parameters")
        t = times[0]
        res = overlap(sc.evolved(t), other.evolved(t), sc.model)
        return Table(
            "overlap",
            ["t", "re", "im", "magnitude", "ill_conditioned"],
            [[float(t), res.value.real, res.value.imag, res.magnitude, res.ill_conditioned]],
        )
    if cmd == "completeness":
        ep = sc.evolved(times[0])
        n_max = 8 if args.n_max is None else args.n_max
        try:
            res = completeness_check(ep.zeta, ep.mu, n_max, quad_order=args.quad_order)
        except ValueError as exc:
            if isinstance(exc, AdmissibilityError):
                raise
            raise ScenarioValidationError(str(exc)) from None
        table = Table("completeness", ["n", "n2", "re", "im"])
        table.meta.update(residual=res.residual, tolerance=res.tolerance, ok=res.ok, t=float(times[0]))
        for n in range(n_max + 1):
            for n2 in range(n_max + 1):
                v = res.matrix[n, n2]
                table.rows.append([n, n2, v.real, v.imag])
        return table
    raise AssertionError(cmd)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freescs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"freescs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="write every artifact in the scenario plus a manifest")
    run.add_argument("scenario")
    run.add_argument("outdir")

    for name in ("evolve", "coeffs", "density", "moments", "transition", "overlap", "completeness", "verify"):
        p = sub.add_parser(name, help=f"print the {name} table")
        p.add_argument("scenario")
        p.add_argument("--t", type=float, default=None, help="evaluation time (default time.t_start)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if name in ("coeffs", "transition", "completeness"):
            p.add_argument("--n-max", type=int, default=None, help="fixed truncation (default: automatic)")
        if name == "coeffs":
            p.add_argument("--method", choices=("recurrence", "closed_form"), default="recurrence")
        if name == "completeness":
            p.add_argument("--quad-order", type=int, default=64)
        if name == "overlap":
            p.add_argument("--other", required=True, help="scenario supplying the second state")
    return parser


def _error(kind, code, exc):
    record = {"status": "error", "kind": kind, "exit_code": code, "message": str(exc)}
    sys.stderr.write(json.dumps(record) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with np.errstate(over="raise", invalid="raise", divide="ignore", under="ignore"):
            if args.command == "run":
                return cmd_run(args)
            table = cmd_table(args)
    except ScenarioParseError as exc:
        return _error("parse", EXIT_PARSE, exc)
    except (ScenarioValidationError, AdmissibilityError) as exc:
        return _error("validation", EXIT_VALIDATION, exc)
    except (IntegrationError, TruncationError, HermiteOverflowError, FloatingPointError) as exc:
        return _error("numerical", EXIT_NUMERICAL, exc)
    sys.stdout.write(to_json(table) if args.format == "json" else to_csv(table))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
