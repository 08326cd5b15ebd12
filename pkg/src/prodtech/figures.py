"""Data tables behind the illustrative figures.

Figure parameters are fixed, documented defaults (the source figures carry no
parameter values); every builder returns its parameter set so the CLI can
print it into the output header. Figure ids:

* 1a  three CES scale curves (returns-to-scale exponents 1, 0.7, 1.3)
* 1b  CES isoquants (ray-scan traces)
* 2a  fixed-proportions scale curve
* 2b  fixed-proportions L-shaped isoquants
* 3   residual isoquants at competing demand 0 and 0.5 (kink shift)
* 4a  expected-output surface grid over one uniform competing output
* 4b  smooth isoquants of that expected surface
* 5a  grid-contour isoquants with two independent competing outputs
* 5b  the same level under AMH dependence, theta in {-0.9, 0, 0.9}
"""

from __future__ import annotations

import numpy as np

from .demand import DemandModel
from .errors import UnknownFigure
from .geometry import (
    scale_profile,
    trace_isoquant_analytic,
    trace_isoquant_grid,
    trace_isoquant_rayscan,
)
from .output import ResultTable, format_value
from .surfaces import CesSurface, ExpectedOutputSurface, LeontiefSurface
from .technology import TechnologyMatrix

__all__ = ["FIGURE_IDS", "figure_table"]


def _ces_defaults() -> dict:
    return {"tfp": 1.0, "share": 0.5, "rho": -1.0}


def _fig_1a():
    params = {**_ces_defaults(), "scales": [1.0, 0.7, 1.3],
              "base": [1.0, 1.0], "t": [0.25, 2.0, 15]}
    t = np.linspace(*params["t"][:2], params["t"][2])
    rows, groups = [], []
    for v in params["scales"]:
        surface = CesSurface(tfp=params["tfp"], share=params["share"],
                             rho=params["rho"], scale=v)
        profile = scale_profile(surface, params["base"], t)
        label = f"v={format_value(v)}"
        rows += [(label, float(ti), float(fi))
                 for ti, fi in zip(profile.t_values, profile.outputs)]
        groups.append((label, np.column_stack([profile.t_values, profile.outputs])))
    return ResultTable(("curve", "t", "output"), rows, groups), params


def _fig_1b():
    params = {**_ces_defaults(), "scale": 1.0, "levels": [0.5, 1.0, 1.5],
              "angles": 48, "bracket": [1e-9, 1e6]}
    surface = CesSurface(tfp=params["tfp"], share=params["share"],
                         rho=params["rho"], scale=params["scale"])
    return _isoquant_rows(
        params,
        lambda level: trace_isoquant_rayscan(surface, level, params["angles"],
                                             tuple(params["bracket"])),
    )


def _fig_2a():
    params = {"requirements": [[1.0, 2.0]], "base": [1.0, 2.0], "t": [0.25, 2.0, 15]}
    surface = LeontiefSurface(params["requirements"])
    t = np.linspace(*params["t"][:2], params["t"][2])
    profile = scale_profile(surface, params["base"], t)
    rows = [(float(ti), float(fi)) for ti, fi in zip(profile.t_values, profile.outputs)]
    groups = [("leontief", np.column_stack([profile.t_values, profile.outputs]))]
    return ResultTable(("t", "output"), rows, groups), params


def _fig_2b():
    params = {"requirements": [[1.0, 2.0]], "levels": [1.0, 2.0], "extent": 8.0}
    tech = TechnologyMatrix(np.asarray(params["requirements"]))
    return _isoquant_rows(
        params,
        lambda level: trace_isoquant_analytic(tech.requirements, level, params["extent"]),
    )


def _fig_3():
    params = {"requirements": [[1.0, 2.0], [0.5, 0.25]],
              "exogenous": [0.0, 0.5], "levels": [1.0, 2.0], "extent": 8.0}
    req = np.asarray(params["requirements"])
    rows, groups = [], []
    for y2 in params["exogenous"]:
        # The residual isoquant is the focal L-shape translated by the
        # competing output's input consumption.
        shift = y2 * req[1]
        for level in params["levels"]:
            base = trace_isoquant_analytic(req[:1], level, params["extent"])
            points = base.points + shift
            label = f"y2={format_value(y2)} level={format_value(level)}"
            rows += [(float(y2), float(level), i, float(pw), float(pc))
                     for i, (pw, pc) in enumerate(points)]
            groups.append((label, points))
    table = ResultTable(("y2", "level", "point_index", "w", "c"), rows, groups)
    return table, params


_FIG4_TECH = [[1.0, 1.0], [0.6, 0.3]]


def _fig_4a():
    params = {"requirements": _FIG4_TECH, "method": "closed_form",
              "clamp": "raw", "w": [0.0, 2.0, 25], "c": [0.0, 2.0, 25]}
    surface = ExpectedOutputSurface(params["requirements"], method="closed_form")
    w = np.linspace(*params["w"][:2], params["w"][2])
    c = np.linspace(*params["c"][:2], params["c"][2])
    rows = [(float(wi), float(cj), surface(wi, cj)) for wi in w for cj in c]
    return ResultTable(("w", "c", "expected_output"), rows), params


def _fig_4b():
    params = {"requirements": _FIG4_TECH, "method": "closed_form", "clamp": "raw",
              "levels": [0.25, 0.5, 0.75], "angles": 48, "bracket": [1e-9, 1e4]}
    surface = ExpectedOutputSurface(params["requirements"], method="closed_form")
    return _isoquant_rows(
        params,
        lambda level: trace_isoquant_rayscan(surface, level, params["angles"],
                                             tuple(params["bracket"])),
    )


_FIG5_TECH = [[1.0, 1.0], [0.6, 0.3], [0.3, 0.6]]


def _fig5_surface(theta: float | None) -> ExpectedOutputSurface:
    model = DemandModel(count=2, theta=theta)
    return ExpectedOutputSurface(_FIG5_TECH, model=model, method="quadrature",
                                 nodes=12)


def _fig_5a():
    params = {"requirements": _FIG5_TECH, "theta": 0.0, "levels": [0.25, 0.5],
              "method": "quadrature", "nodes": 12, "clamp": "raw",
              "w_range": [0.0, 2.0], "c_range": [0.0, 2.0], "resolution": 20}
    surface = _fig5_surface(params["theta"])
    grid = (tuple(params["w_range"]), tuple(params["c_range"]), params["resolution"])
    rows, groups = [], []
    for level in params["levels"]:
        trace = trace_isoquant_grid(surface, level, grid)
        label = f"theta=0 level={format_value(level)}"
        rows += [(0.0, float(level), i, float(pw), float(pc))
                 for i, (pw, pc) in enumerate(trace.points)]
        groups.append((label, trace.points))
    table = ResultTable(("theta", "level", "point_index", "w", "c"), rows, groups)
    return table, params


def _fig_5b():
    params = {"requirements": _FIG5_TECH, "thetas": [-0.9, 0.0, 0.9], "level": 0.4,
              "method": "quadrature", "nodes": 12, "clamp": "raw",
              "w_range": [0.0, 2.0], "c_range": [0.0, 2.0], "resolution": 20}
    grid = (tuple(params["w_range"]), tuple(params["c_range"]), params["resolution"])
    level = params["level"]
    rows, groups = [], []
    for theta in params["thetas"]:
        surface = _fig5_surface(theta)
        trace = trace_isoquant_grid(surface, level, grid)
        label = f"theta={format_value(theta)}"
        rows += [(float(theta), float(level), i, float(pw), float(pc))
                 for i, (pw, pc) in enumerate(trace.points)]
        groups.append((label, trace.points))
    table = ResultTable(("theta", "level", "point_index", "w", "c"), rows, groups)
    return table, params


def _isoquant_rows(params: dict, tracer):
    rows, groups = [], []
    for level in params["levels"]:
        trace = tracer(level)
        rows += [(float(level), i, float(pw), float(pc))
                 for i, (pw, pc) in enumerate(trace.points)]
        groups.append((f"level={format_value(level)}", trace.points))
    table = ResultTable(("level", "point_index", "w", "c"), rows, groups)
    return table, params


_BUILDERS = {
    "1a": _fig_1a, "1b": _fig_1b,
    "2a": _fig_2a, "2b": _fig_2b,
    "3": _fig_3,
    "4a": _fig_4a, "4b": _fig_4b,
    "5a": _fig_5a, "5b": _fig_5b,
}

FIGURE_IDS = tuple(_BUILDERS)


def figure_table(fig_id: str) -> tuple[ResultTable, dict]:
    """Build the data table and parameter record for one figure id."""
    try:
        builder = _BUILDERS[fig_id]
    except KeyError:
        raise UnknownFigure(
            f"unknown figure id {fig_id!r}; expected one of {', '.join(FIGURE_IDS)}"
        ) from None
    table, params = builder()
    return table, {"id": fig_id, **params}
