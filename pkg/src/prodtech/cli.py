"""Command-line front-end.

One task per invocation::

    prodtech <task> [--config cfg.toml] [--set key=value ...]
             --out results.csv [--format csv|json|svg] [--seed N]

Tasks: ``eval`` (deterministic surface values), ``expect`` (expected-output
sweeps), ``isoquant`` (level-set traces), ``rts`` (returns-to-scale
profiles), ``figure`` (canned figure data tables). Exit codes: 0 success,
1 runtime error, 2 configuration error.
"""

from __future__ import annotations

import sys

import click
import numpy as np

from . import __version__
from .config import RunConfig, apply_overrides, header_lines, load_config, resolve
from .errors import ConfigError, ProdtechError
from .figures import figure_table
from .geometry import (
    IsoquantTrace,
    TraceMethod,
    classify_rts,
    scale_profile,
    trace_isoquant_analytic,
    trace_isoquant_grid,
    trace_isoquant_rayscan,
)
from .output import ResultTable, format_value, write_output
from .surfaces import (
    CesSurface,
    ExpectedOutputSurface,
    LeontiefSurface,
    ResidualLeontiefSurface,
)

__all__ = ["main", "cmd_eval", "cmd_expect", "cmd_isoquant", "cmd_rts", "cmd_figure"]


def _input_labels(run: RunConfig, n_inputs: int) -> tuple[str, ...]:
    if run.labels is not None:
        return run.labels
    if n_inputs == 2:
        return ("w", "c")
    return tuple(f"x{j + 1}" for j in range(n_inputs))


def _build_surface(run: RunConfig):
    """Instantiate the surface selected by task.surface."""
    kind = run.params["surface"]
    if kind == "ces":
        if run.ces is None:
            raise ConfigError("the ces surface needs a [ces] section")
        p = run.ces
        return CesSurface(tfp=p.tfp, share=p.share, rho=p.rho, scale=p.scale)
    if run.technology is None:
        raise ConfigError(f"the {kind} surface needs technology.requirements")
    if kind == "leontief":
        return LeontiefSurface(run.technology)
    if kind == "residual":
        return ResidualLeontiefSurface(run.technology, run.params["exogenous"],
                                       clamp=run.clamp)
    return ExpectedOutputSurface(
        run.technology, model=run.demand, method=run.params["method"],
        clamp=run.clamp, n=run.params["n"], nodes=run.params["nodes"],
        seed=run.seed, workers=run.params["workers"],
    )


def cmd_eval(run: RunConfig) -> ResultTable:
    """Evaluate a deterministic surface at explicit points."""
    surface = _build_surface(run)
    points = np.asarray(run.params["points"], dtype=float)
    outputs = surface.predict(points)
    labels = _input_labels(run, points.shape[1])
    exo = run.params.get("exogenous", [])
    exo_cols = tuple(f"y{k + 2}" for k in range(len(exo)))
    columns = ("index", *labels, *exo_cols, "output")
    rows = [
        (i, *map(float, pt), *map(float, exo), float(out))
        for i, (pt, out) in enumerate(zip(points, outputs))
    ]
    return ResultTable(columns, rows)


def _expect_points(run: RunConfig) -> list[tuple[float, ...]]:
    if "points" in run.params:
        return [tuple(p) for p in run.params["points"]]
    w_lo, w_hi, w_n = run.params["w"]
    c_lo, c_hi, c_n = run.params["c"]
    w = np.linspace(w_lo, w_hi, int(w_n))
    c = np.linspace(c_lo, c_hi, int(c_n))
    return [(float(wi), float(cj)) for wi in w for cj in c]  # row-major


def cmd_expect(run: RunConfig) -> ResultTable:
    """Expected focal output on a grid of input bundles."""
    surface = ExpectedOutputSurface(
        run.technology, model=run.demand, method=run.params["method"],
        clamp=run.clamp, n=run.params["n"], nodes=run.params["nodes"],
        seed=run.seed, workers=run.params["workers"],
    )
    labels = _input_labels(run, run.technology.shape[1])
    rows = []
    for point in _expect_points(run):
        est = surface.estimate(point)
        rows.append((*point, est.value, est.std_error, est.method, est.n_samples))
    columns = (*labels, "expected_output", "std_error", "method", "n")
    return ResultTable(columns, rows)


def cmd_isoquant(run: RunConfig) -> ResultTable:
    """Trace one or more level sets of the selected surface."""
    trace_kind = run.params["trace"]
    rows, groups = [], []
    for level in run.params["levels"]:
        if trace_kind == "analytic":
            trace = _analytic_trace(run, level)
        elif trace_kind == "rayscan":
            trace = trace_isoquant_rayscan(_build_surface(run), level,
                                           run.params["angles"],
                                           tuple(run.params["bracket"]))
        else:
            grid = (tuple(run.params["w_range"]), tuple(run.params["c_range"]),
                    run.params["resolution"])
            trace = trace_isoquant_grid(_build_surface(run), level, grid)
        rows += [(float(level), i, float(pw), float(pc))
                 for i, (pw, pc) in enumerate(trace.points)]
        groups.append((f"level={format_value(level)}", trace.points))
    return ResultTable(("level", "point_index", "w", "c"), rows, groups)


def _analytic_trace(run: RunConfig, level: float):
    extent = run.params.get("extent")
    if run.params["surface"] == "leontief":
        return trace_isoquant_analytic(run.technology, level, extent)
    # Residual surface: the L-shape of the focal row translated by the
    # competing outputs' input consumption.
    req = run.technology
    shift = np.asarray(run.params["exogenous"], dtype=float) @ req[1:]
    base = trace_isoquant_analytic(req[:1], level, extent)
    return IsoquantTrace(level=level, points=base.points + shift,
                         method=TraceMethod.ANALYTIC_KINK)


def cmd_rts(run: RunConfig) -> ResultTable:
    """Scale profile and returns-to-scale classification."""
    surface = _build_surface(run)
    t_lo, t_hi, t_n = run.params["t"]
    t = np.linspace(t_lo, t_hi, int(t_n))
    profile = scale_profile(surface, run.params["base"], t)
    rts = classify_rts(profile, run.params["tolerance"])
    rows = [
        (float(ti), float(fi), float(ei))
        for ti, fi, ei in zip(profile.t_values, profile.outputs, profile.elasticities)
    ]
    groups = [("profile", np.column_stack([profile.t_values, profile.outputs]))]
    return ResultTable(("t", "output", "elasticity"), rows, groups,
                       notes={"classification": rts.classification.value})


def cmd_figure(run: RunConfig) -> tuple[ResultTable, dict]:
    """Emit the data table for one canned figure id."""
    return figure_table(run.params["id"])


def _dispatch(run: RunConfig) -> tuple[ResultTable, dict | None]:
    if run.task == "figure":
        return cmd_figure(run)
    builder = {"eval": cmd_eval, "expect": cmd_expect,
               "isoquant": cmd_isoquant, "rts": cmd_rts}[run.task]
    return builder(run), None


def _run_task(task: str, config_path, overrides, out, fmt, seed) -> None:
    try:
        cfg = load_config(config_path)
        cfg = apply_overrides(cfg, overrides)
        run = resolve(cfg, task, seed)
        table, extra = _dispatch(run)
        lines = header_lines(run, __version__, extra)
        config_doc = dict(run.resolved)
        if extra:
            config_doc["figure"] = extra
        write_output(table, out, fmt, lines, config_doc, __version__)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    except (ProdtechError, OSError, ArithmeticError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def _common_options(fn):
    for opt in reversed([
        click.option("--config", "config_path", type=click.Path(), default=None,
                     help="TOML configuration file."),
        click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
                     help="Override a config value (dotted keys, TOML literals)."),
        click.option("--out", required=True, type=click.Path(),
                     help="Output file path."),
        click.option("--format", "fmt", type=click.Choice(["csv", "json", "svg"]),
                     default="csv", show_default=True, help="Output format."),
        click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=None,
                     help="Random seed (overrides task.seed)."),
    ]):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(version=__version__, prog_name="prodtech")
def main() -> None:
    """Production-technology evaluation, expectation and geometry tool."""


def _register(task: str, doc: str) -> None:
    @main.command(task, help=doc)
    @_common_options
    def command(config_path, overrides, out, fmt, seed, _task=task):
        _run_task(_task, config_path, overrides, out, fmt, seed)


_register("eval", "Evaluate a deterministic surface at config-listed points.")
_register("expect", "Expected focal output over a grid of input bundles.")
_register("isoquant", "Trace isoquants of a deterministic or expected surface.")
_register("rts", "Returns-to-scale profile and classification along a ray.")
_register("figure", "Emit the data table behind a canned figure id (1a..5b).")


if __name__ == "__main__":
    main()
