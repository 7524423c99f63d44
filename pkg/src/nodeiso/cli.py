"""Command-line front end.

Subcommands:
  eval      single-point isolation probability and mean squared range
  sweep     parameter sweeps (including the built-in figure presets)
  simulate  Monte Carlo estimate with confidence interval
  invert    minimum node density for a target isolation probability

Exit codes: 0 success, 2 usage or parameter error, 3 numerical or
statistical failure. Output formats: human text (default), csv, json;
CSV uses a fixed column order, always emits a header row and '.' decimals.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .analytic import (
    CancellationError,
    IsolationQuery,
    expected_r2,
    isolation_probability,
    min_density_for_isolation,
)
from .channel import ChannelParams, DiversityScheme, db_to_linear, make_success_fn, sigma_from_db
from .quadrature import (
    QuadratureError,
    expected_r2_numeric_fading,
    expected_r2_numeric_fading_shadow,
    success_prob_real_m,
)
from .simulator import SimConfig, format_topology_export, run_monte_carlo, sample_topology

__all__ = ["SweepSpec", "build_parser", "main"]

_OUTPUT_CHOICES = ("analytic", "quadrature", "simulation")


class UsageError(ValueError):
    """Bad parameters that argparse alone cannot catch."""


def _knob_key(variable: str) -> str:
    """Internal knob name for a sweep variable ('lambda' is the density)."""
    return "node_density" if variable == "lambda" else variable


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: the swept variable, its grid, and everything held fixed."""

    variable: str
    grid: tuple[float, ...]
    fixed: dict
    outputs: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.variable not in ("lambda", "sigma", "alpha", "m", "M"):
            raise UsageError(f"unknown sweep variable {self.variable!r}")
        if len(self.grid) == 0:
            raise UsageError("sweep grid must be nonempty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise UsageError("sweep grid must be strictly increasing")
        if _knob_key(self.variable) in self.fixed:
            raise UsageError(f"swept variable {self.variable!r} must not be fixed")
        for out in self.outputs:
            if out not in _OUTPUT_CHOICES:
                raise UsageError(f"unknown output kind {out!r}")


# ============================================================================
#  Figure presets
# ============================================================================

_LAMBDA_GRID = tuple(float(v) for v in np.logspace(-5, -3, 21))
_SIGMA_GRID = tuple(float(v) for v in np.arange(0.0, 4.0 + 1e-9, 0.25))
_ALPHA_GRID = tuple(float(v) for v in np.arange(2.0, 6.0 + 1e-9, 0.25))

# Caption parameters for the built-in presets. Curve variables reproduce
# the per-figure families; sigma is in natural-log units throughout.
_FIGURE_PRESETS: dict[int, dict] = {
    2: dict(
        variable="lambda",
        grid=_LAMBDA_GRID,
        fixed=dict(m=2, alpha=4.0, scheme="none", M=1),
        curves=("sigma", (0.0, 2.0, 4.0)),
        invert=False,
    ),
    3: dict(
        variable="lambda",
        grid=_LAMBDA_GRID,
        fixed=dict(sigma=2.0, alpha=4.0, scheme="none", M=1),
        curves=("m", (1, 2, 4)),
        invert=False,
    ),
    4: dict(
        variable="sigma",
        grid=_SIGMA_GRID,
        fixed=dict(m=4, alpha=4.0, scheme="none", M=1),
        curves=None,
        invert=True,
    ),
    5: dict(
        variable="alpha",
        grid=_ALPHA_GRID,
        fixed=dict(m=4, sigma=0.0, scheme="none", M=1, node_density=1e-5),
        curves=None,
        invert=False,
    ),
    6: dict(
        variable="sigma",
        grid=_SIGMA_GRID,
        fixed=dict(m=2, alpha=4.0, scheme="mrc", node_density=1e-5),
        curves=("M", (1, 2, 4)),
        invert=False,
    ),
    7: dict(
        variable="sigma",
        grid=_SIGMA_GRID,
        fixed=dict(m=2, alpha=4.0, scheme="sc", node_density=1e-5),
        curves=("M", (1, 2, 4)),
        invert=False,
    ),
}


# ============================================================================
#  Argument handling
# ============================================================================

# config-file key -> (argparse dest, converter); keys mirror the long flags.
_CONFIG_OPTIONS: dict[str, tuple[str, Callable]] = {
    "ptx": ("ptx", float),
    "w": ("w", float),
    "k": ("k", float),
    "k-db": ("k_db", float),
    "psi": ("psi", float),
    "psi-db": ("psi_db", float),
    "alpha": ("alpha", float),
    "sigma": ("sigma", float),
    "sigma-db": ("sigma_db", float),
    "m": ("m", int),
    "m-real": ("m_real", float),
    "scheme": ("scheme", str),
    "M": ("diversity_order", int),
    "lambda": ("node_density", float),
    "area": ("area_side", float),
    "boundary": ("boundary", str),
    "runs": ("runs", int),
    "seed": ("master_seed", int),
    "jobs": ("jobs", int),
    "target-pi": ("target_pi", float),
    "format": ("out_format", str),
    "outputs": ("outputs", str),
}

_DEFAULTS = dict(
    ptx=1.0,
    w=0.01,
    k=10.0,
    psi=10.0,
    alpha=4.0,
    sigma=0.0,
    m=1,
    scheme="none",
    diversity_order=1,
    node_density=None,
    area_side=100.0,
    boundary="toroidal",
    runs=1000,
    master_seed=0,
    jobs=1,
    out_format="text",
    outputs="analytic",
)


def build_parser() -> argparse.ArgumentParser:
    channel = argparse.ArgumentParser(add_help=False)
    g = channel.add_argument_group("channel")
    g.add_argument("--ptx", type=float, help="transmit power [mW] (default 1)")
    g.add_argument("--w", type=float, help="noise power [mW] (default 0.01)")
    g.add_argument("--k", type=float, help="path-loss constant, linear (default 10)")
    g.add_argument("--k-db", type=float, help="path-loss constant in dB")
    g.add_argument("--psi", type=float, help="SNR threshold, linear (default 10)")
    g.add_argument("--psi-db", type=float, help="SNR threshold in dB")
    g.add_argument("--alpha", type=float, help="path-loss exponent (default 4)")
    g.add_argument("--sigma", type=float, help="shadowing spread, natural-log units (default 0)")
    g.add_argument("--sigma-db", type=float, help="shadowing spread in dB")
    g.add_argument("--m", type=int, help="Nakagami severity, positive integer (default 1)")
    g.add_argument("--m-real", type=float, help="real Nakagami severity >= 0.5 (numerical path only)")
    g.add_argument("--scheme", choices=("none", "mrc", "sc"), help="receive diversity scheme")
    g.add_argument("--M", dest="diversity_order", type=int, help="number of diversity branches")
    g.add_argument("--config", help="key=value file mirroring the long flags; flags override it")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--format", dest="out_format", choices=("text", "csv", "json"))
    output.add_argument("--out", help="write the report to this path instead of stdout")

    parser = argparse.ArgumentParser(
        prog="nodeiso",
        description="Node isolation probability of a Poisson ad hoc network "
        "under path loss, lognormal shadowing and Nakagami-m fading.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", parents=[channel, output], help="single-point evaluation")
    p_eval.add_argument("--lambda", dest="node_density", type=float, help="node density [1/m^2]")
    p_eval.add_argument("--outputs", help="comma list of analytic,quadrature (default analytic)")
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", parents=[channel, output], help="parameter sweep, CSV-friendly")
    p_sweep.add_argument("--figure", type=int, choices=sorted(_FIGURE_PRESETS), help="built-in preset")
    p_sweep.add_argument("--variable", choices=("lambda", "sigma", "alpha", "m", "M"))
    p_sweep.add_argument("--grid", help="comma-separated, strictly increasing grid values")
    p_sweep.add_argument("--lambda", dest="node_density", type=float, help="fixed node density")
    p_sweep.add_argument("--outputs", help="comma list of analytic,quadrature,simulation")
    p_sweep.add_argument("--target-pi", dest="target_pi", type=float,
                         help="invert for density at this isolation probability")
    p_sweep.add_argument("--area", dest="area_side", type=float, help="simulation square side [m]")
    p_sweep.add_argument("--boundary", choices=("bounded", "toroidal"))
    p_sweep.add_argument("--runs", type=int, help="simulation replications per grid point")
    p_sweep.add_argument("--seed", dest="master_seed", type=int, help="simulation master seed")
    p_sweep.add_argument("--jobs", type=int, help="parallel workers for simulation")
    p_sweep.set_defaults(func=cmd_sweep)

    p_sim = sub.add_parser("simulate", parents=[channel, output], help="Monte Carlo estimate")
    p_sim.add_argument("--lambda", dest="node_density", type=float, help="node density [1/m^2]")
    p_sim.add_argument("--area", dest="area_side", type=float, help="square side [m] (default 100)")
    p_sim.add_argument("--boundary", choices=("bounded", "toroidal"))
    p_sim.add_argument("--runs", type=int, help="replications (default 1000)")
    p_sim.add_argument("--seed", dest="master_seed", type=int, help="master seed (default 0)")
    p_sim.add_argument("--jobs", type=int, help="parallel workers (default 1)")
    p_sim.add_argument("--export-topology", dest="export_topology",
                       help="write the run-0 topology to this path")
    p_sim.set_defaults(func=cmd_simulate)

    p_inv = sub.add_parser("invert", parents=[channel, output], help="minimum density for a target P_I")
    p_inv.add_argument("--target-pi", dest="target_pi", type=float, help="target isolation probability")
    p_inv.set_defaults(func=cmd_invert)

    return parser


def _apply_config_file(args: argparse.Namespace) -> None:
    path = getattr(args, "config", None)
    if not path:
        return
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_OPTIONS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        dest, conv = _CONFIG_OPTIONS[key]
        if not hasattr(args, dest):
            continue  # key not applicable to this subcommand
        if getattr(args, dest) is not None:
            continue  # explicit flag wins
        try:
            setattr(args, dest, conv(value))
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from exc


def _apply_defaults(args: argparse.Namespace) -> None:
    for dest, value in _DEFAULTS.items():
        if hasattr(args, dest) and getattr(args, dest) is None:
            setattr(args, dest, value)


def _resolve_db_alternates(args: argparse.Namespace) -> None:
    for base, db in (("k", "k_db"), ("psi", "psi_db"), ("sigma", "sigma_db")):
        db_value = getattr(args, db, None)
        if db_value is None:
            continue
        if getattr(args, base) is not None:
            raise UsageError(f"--{base.replace('_', '-')} and --{db.replace('_', '-')} are exclusive")
        if base == "sigma":
            setattr(args, base, sigma_from_db(db_value))
        else:
            setattr(args, base, db_to_linear(db_value))


def _build_params(args: argparse.Namespace, **overrides) -> ChannelParams:
    values = dict(
        ptx=args.ptx,
        w=args.w,
        k=args.k,
        psi=args.psi,
        alpha=args.alpha,
        sigma=args.sigma,
        m=args.m,
    )
    values.update(overrides)
    return ChannelParams(**values)


def _build_scheme(kind: str, branches: int) -> DiversityScheme:
    if kind == "none":
        if branches != 1:
            raise UsageError("--M applies to mrc or sc schemes only")
        return DiversityScheme.no_diversity()
    if branches == 1:
        # M = 1 diversity is identical to no diversity; normalizing here keeps
        # every downstream evaluation and report on a single code path.
        return DiversityScheme.no_diversity()
    return DiversityScheme(kind, branches)


def _parse_outputs(spec: str, allowed: tuple[str, ...]) -> tuple[str, ...]:
    outputs = tuple(part.strip() for part in spec.split(",") if part.strip())
    if not outputs:
        raise UsageError("--outputs must name at least one of " + ",".join(allowed))
    for out in outputs:
        if out not in allowed:
            raise UsageError(f"unknown output kind {out!r} (choose from {','.join(allowed)})")
    return outputs


# ============================================================================
#  Rendering
# ============================================================================


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def _emit(text: str, args: argparse.Namespace) -> None:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _render_record(fields: list[tuple[str, object]], out_format: str) -> str:
    if out_format == "json":
        return json.dumps({k: _json_safe(v) for k, v in fields}, indent=2) + "\n"
    if out_format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([k for k, _ in fields])
        writer.writerow([_fmt(v) for _, v in fields])
        return buf.getvalue()
    width = max(len(k) for k, _ in fields)
    return "".join(f"{k.ljust(width)} = {_fmt(v)}\n" for k, v in fields)


def _render_table(columns: list[str], rows: list[list], out_format: str) -> str:
    if out_format == "json":
        payload = [{c: _json_safe(v) for c, v in zip(columns, row)} for row in rows]
        return json.dumps(payload, indent=2) + "\n"
    if out_format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    cells = [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(c), *(len(r[i]) for r in cells)) if cells else len(c)
              for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    for row in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


# ============================================================================
#  Numeric helpers
# ============================================================================


def _numeric_er2(params: ChannelParams, scheme: DiversityScheme, m_real: float | None) -> float:
    if m_real is not None:
        psi = params.psi
        success = lambda y: success_prob_real_m(y, m_real, psi)  # noqa: E731
    else:
        success = make_success_fn(params, scheme)
    if params.sigma > 0:
        return expected_r2_numeric_fading_shadow(success, params)
    return expected_r2_numeric_fading(success, params)


def _p_i(node_density: float, er2: float) -> float:
    return math.exp(-node_density * math.pi * er2)


# ============================================================================
#  Subcommands
# ============================================================================


def cmd_eval(args: argparse.Namespace) -> int:
    if args.node_density is None:
        raise UsageError("eval requires --lambda")
    scheme = _build_scheme(args.scheme, args.diversity_order)
    if args.m_real is not None:
        if scheme.kind != "none":
            raise UsageError("--m-real supports the no-diversity scheme only")
        params = _build_params(args, m=1)
        er2_q = _numeric_er2(params, scheme, args.m_real)
        fields = [
            ("p_i_quadrature", _p_i(args.node_density, er2_q)),
            ("er2_quadrature", er2_q),
        ]
        _emit(_render_record(fields, args.out_format), args)
        return 0
    params = _build_params(args)
    outputs = _parse_outputs(args.outputs, ("analytic", "quadrature"))
    er2_a = expected_r2(params, scheme)
    fields = [
        ("p_i_analytic", _p_i(args.node_density, er2_a)),
        ("er2_analytic", er2_a),
    ]
    if "quadrature" in outputs:
        er2_q = _numeric_er2(params, scheme, None)
        fields.append(("p_i_quadrature", _p_i(args.node_density, er2_q)))
        fields.append(("er2_quadrature", er2_q))
    _emit(_render_record(fields, args.out_format), args)
    return 0


def _sweep_point(
    spec: SweepSpec,
    value: float,
    args: argparse.Namespace,
    target_pi: float | None,
) -> dict:
    """Evaluate one grid point; raises on invalid or failing configurations."""
    knobs = dict(spec.fixed)
    knobs[_knob_key(spec.variable)] = value
    for int_name in ("m", "M"):
        if int_name in knobs and int(knobs[int_name]) != knobs[int_name]:
            raise UsageError(f"{int_name} grid values must be integers, got {knobs[int_name]}")
    scheme = _build_scheme(knobs["scheme"], int(knobs["M"]))
    params = _build_params(args, m=int(knobs["m"]), sigma=knobs["sigma"], alpha=knobs["alpha"])
    result: dict = {}
    er2_a = expected_r2(params, scheme)
    if target_pi is not None:
        result["lambda_min"] = min_density_for_isolation(params, scheme, target_pi)
        result["er2_analytic"] = er2_a
        return result
    node_density = knobs.get("node_density")
    if node_density is None:
        raise UsageError("sweep requires --lambda when the density is not swept")
    result["p_i_analytic"] = _p_i(node_density, er2_a)
    result["er2_analytic"] = er2_a
    if "quadrature" in spec.outputs:
        result["p_i_quadrature"] = _p_i(node_density, _numeric_er2(params, scheme, None))
    if "simulation" in spec.outputs:
        config = SimConfig(
            params=params,
            scheme=scheme,
            node_density=node_density,
            area_side=args.area_side,
            boundary=args.boundary,
            runs=args.runs,
            master_seed=args.master_seed,
        )
        estimate = run_monte_carlo(config, n_jobs=args.jobs)
        result["p_i_sim"] = estimate.p_isolated
        result["sim_stderr"] = estimate.std_error
        result["sim_ci_low"] = estimate.ci95[0]
        result["sim_ci_high"] = estimate.ci95[1]
    return result


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.m_real is not None:
        raise UsageError("sweeps use the closed-form path; --m-real is eval-only")
    outputs = _parse_outputs(args.outputs, _OUTPUT_CHOICES)
    target_pi = args.target_pi
    if target_pi is not None and not 0.0 < target_pi < 1.0:
        raise UsageError(f"--target-pi must lie in (0, 1), got {target_pi}")

    if target_pi is not None and args.variable == "lambda":
        raise UsageError("--target-pi inverts for the density; sweep a different variable")
    base_fixed = dict(
        m=args.m,
        sigma=args.sigma,
        alpha=args.alpha,
        scheme=args.scheme,
        M=args.diversity_order,
        node_density=args.node_density,
    )
    if args.figure is not None:
        if args.variable is not None or args.grid is not None:
            raise UsageError("--figure and --variable/--grid are exclusive")
        preset = _FIGURE_PRESETS[args.figure]
        variable = preset["variable"]
        grid = preset["grid"]
        fixed = dict(base_fixed)
        for key, val in preset["fixed"].items():
            fixed[key] = val
        curves = preset["curves"]
        if preset["invert"] and target_pi is None:
            target_pi = 0.99  # documented preset default for the inversion figure
        if not preset["invert"] and target_pi is not None:
            raise UsageError(f"--target-pi does not apply to figure {args.figure}")
    else:
        if args.variable is None or args.grid is None:
            raise UsageError("sweep requires --figure or both --variable and --grid")
        variable = args.variable
        try:
            grid = tuple(float(v) for v in args.grid.split(","))
        except ValueError as exc:
            raise UsageError(f"bad --grid value: {exc}") from exc
        fixed = dict(base_fixed)
        curves = None

    fixed.pop(_knob_key(variable), None)
    if variable == "M" and fixed.get("scheme") == "none":
        raise UsageError("sweeping M requires --scheme mrc or sc")

    curve_list: list[tuple[float | int | None, SweepSpec]] = []
    if curves is None:
        curve_list.append((None, SweepSpec(variable, tuple(grid), fixed, outputs)))
    else:
        curve_name, curve_values = curves
        for cv in curve_values:
            cf = dict(fixed)
            cf[_knob_key(curve_name)] = cv
            cf.pop(_knob_key(variable), None)
            curve_list.append((cv, SweepSpec(variable, tuple(grid), cf, outputs)))

    columns: list[str] = []
    if curves is not None:
        columns.append(curves[0])
    columns.append(variable)
    if target_pi is not None:
        columns += ["lambda_min", "er2_analytic"]
    else:
        columns += ["p_i_analytic", "er2_analytic"]
        if "quadrature" in outputs:
            columns.append("p_i_quadrature")
        if "simulation" in outputs:
            columns += ["p_i_sim", "sim_stderr", "sim_ci_low", "sim_ci_high"]

    rows: list[list] = []
    failures = 0
    total_points = 0
    for curve_value, spec in curve_list:
        for value in spec.grid:
            total_points += 1
            head: list = [] if curve_value is None else [curve_value]
            point_value = int(value) if spec.variable in ("m", "M") else value
            try:
                result = _sweep_point(spec, value, args, target_pi)
            except (UsageError, ValueError, CancellationError, QuadratureError) as exc:
                failures += 1
                print(f"nodeiso: sweep point {spec.variable}={value:g} failed: {exc}",
                      file=sys.stderr)
                rows.append(head + [point_value] + [None] * (len(columns) - len(head) - 1))
                continue
            rows.append(head + [point_value] + [result.get(c) for c in columns[len(head) + 1 :]])
    _emit(_render_table(columns, rows, args.out_format), args)
    return 3 if failures == total_points else 0


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.m_real is not None:
        raise UsageError("the simulator requires integer m; --m-real is eval-only")
    if args.node_density is None:
        raise UsageError("simulate requires --lambda")
    scheme = _build_scheme(args.scheme, args.diversity_order)
    params = _build_params(args)
    config = SimConfig(
        params=params,
        scheme=scheme,
        node_density=args.node_density,
        area_side=args.area_side,
        boundary=args.boundary,
        runs=args.runs,
        master_seed=args.master_seed,
    )
    estimate = run_monte_carlo(config, n_jobs=args.jobs)
    er2_a = expected_r2(params, scheme)
    p_analytic = _p_i(args.node_density, er2_a)
    z = math.nan
    if estimate.std_error and not math.isnan(estimate.std_error) and estimate.std_error > 0:
        z = (estimate.p_isolated - p_analytic) / estimate.std_error
    fields = [
        ("p_i_sim", estimate.p_isolated),
        ("sim_stderr", estimate.std_error),
        ("sim_ci_low", estimate.ci95[0]),
        ("sim_ci_high", estimate.ci95[1]),
        ("p_i_any_isolated", estimate.p_any_isolated),
        ("p_i_analytic", p_analytic),
        ("z_score", z),
        ("total_nodes", estimate.total_nodes),
        ("total_isolated", estimate.total_isolated),
        ("runs_executed", estimate.runs_executed),
        ("runs_empty", estimate.runs_empty),
    ]
    if args.export_topology:
        topology = sample_topology(config, 0)
        with open(args.export_topology, "w", encoding="utf-8") as fh:
            fh.write(format_topology_export(topology, config.master_seed, 0))
    _emit(_render_record(fields, args.out_format), args)
    if estimate.total_nodes < 100:
        print("nodeiso: degenerate estimate (fewer than 100 node samples)", file=sys.stderr)
        return 3
    return 0


def cmd_invert(args: argparse.Namespace) -> int:
    if args.target_pi is None:
        raise UsageError("invert requires --target-pi")
    if not 0.0 < args.target_pi < 1.0:
        raise UsageError(f"--target-pi must lie in (0, 1), got {args.target_pi}")
    if args.m_real is not None:
        raise UsageError("--m-real is eval-only")
    scheme = _build_scheme(args.scheme, args.diversity_order)
    params = _build_params(args)
    lam = min_density_for_isolation(params, scheme, args.target_pi)
    roundtrip = isolation_probability(IsolationQuery(params, scheme, lam))
    fields = [
        ("lambda_min", lam),
        ("p_i_roundtrip", roundtrip),
        ("er2_analytic", expected_r2(params, scheme)),
    ]
    _emit(_render_record(fields, args.out_format), args)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args)
        _resolve_db_alternates(args)
        _apply_defaults(args)
        return args.func(args)
    except UsageError as exc:
        print(f"nodeiso: error: {exc}", file=sys.stderr)
        return 2
    except (CancellationError, QuadratureError) as exc:
        print(f"nodeiso: numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"nodeiso: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
