"""Run configuration: TOML file + dotted-key overrides -> resolved RunConfig.

The resolved configuration makes every default explicit (including the seed)
and is echoed into all output headers, so a run is fully reproducible from
any of its output files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import numpy as np

from .demand import DemandModel
from .errors import ConfigError, ProdtechError
from .output import format_value
from .technology import CesParams, ClampPolicy
from .validation import as_requirements

__all__ = ["RunConfig", "load_config", "apply_overrides", "resolve", "header_lines"]

_TASKS = ("eval", "expect", "isoquant", "rts", "figure")
_SURFACES = ("leontief", "ces", "residual", "expected")
_EXPECT_METHODS = ("closed_form", "quadrature", "monte_carlo")

# Allowed [task] keys per task kind (beyond kind/clamp/seed).
_TASK_KEYS = {
    "eval": {"surface", "points", "exogenous"},
    "expect": {"method", "n", "nodes", "workers", "w", "c", "points"},
    "isoquant": {"surface", "trace", "levels", "extent", "angles", "bracket",
                 "w_range", "c_range", "resolution", "exogenous",
                 "method", "n", "nodes", "workers"},
    "rts": {"surface", "base", "t", "tolerance", "exogenous",
            "method", "n", "nodes", "workers"},
    "figure": {"id"},
}


@dataclass(frozen=True)
class RunConfig:
    task: str
    technology: np.ndarray | None
    labels: tuple[str, ...] | None
    ces: CesParams | None
    demand: DemandModel | None
    clamp: ClampPolicy
    seed: int
    params: dict
    resolved: dict


def load_config(path: str | None) -> dict:
    """Parse the TOML config file; None means an empty configuration."""
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: invalid TOML: {exc}") from exc


def _parse_literal(text: str):
    """Parse an override value as a TOML literal, falling back to a string."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def apply_overrides(cfg: dict, assignments: tuple[str, ...]) -> dict:
    """Apply ``--set section.key=value`` overrides; overrides win."""
    for raw in assignments:
        key, sep, value = raw.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"--set expects key=value, got {raw!r}")
        parts = key.split(".")
        node = cfg
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(
                    f"--set {key}: {part!r} is a value, not a section"
                )
            node = child
        node[parts[-1]] = _parse_literal(value.strip())
    return cfg


# ---------------------------------------------------------------------------
# resolution helpers


def _check_keys(section: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{where}]: {', '.join(unknown)}")


def _build(where: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ProdtechError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _float_list(value, where: str, length: int | None = None) -> list[float]:
    try:
        out = [float(v) for v in np.asarray(value, dtype=float).ravel()]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: expected a list of numbers") from exc
    if length is not None and len(out) != length:
        raise ConfigError(f"{where}: expected {length} numbers, got {len(out)}")
    return out


def _grid_triple(value, where: str) -> tuple[float, float, int]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError(f"{where}: expected [lo, hi, count]")
    lo, hi = float(value[0]), float(value[1])
    count = value[2]
    if not isinstance(count, int) or isinstance(count, bool) or count < 2:
        raise ConfigError(f"{where}: count must be an integer >= 2")
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi <= lo:
        raise ConfigError(f"{where}: need finite lo < hi")
    return lo, hi, count


def _pos_int(value, where: str, minimum: int = 1) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"{where}: expected an integer >= {minimum}")
    return value


def _choice(value, options: tuple, where: str) -> str:
    if value not in options:
        raise ConfigError(f"{where}: expected one of {', '.join(options)}; got {value!r}")
    return value


def _default_surface(technology, ces, demand) -> str:
    if ces is not None:
        return "ces"
    if demand is not None:
        return "expected"
    if technology is not None and technology.shape[0] > 1:
        return "residual"
    return "leontief"


def _resolve_points(task: dict, params: dict, n_inputs: int) -> None:
    if "points" in task:
        pts = task["points"]
        if not isinstance(pts, (list, tuple)) or not pts:
            raise ConfigError("task.points: expected a non-empty list of points")
        rows = [_float_list(p, "task.points", n_inputs) for p in pts]
        params["points"] = rows
        return
    if "w" in task or "c" in task:
        w = _grid_triple(task.get("w", [0.25, 2.0, 8]), "task.w")
        c = _grid_triple(task.get("c", [0.25, 2.0, 8]), "task.c")
    else:
        w = c = (0.25, 2.0, 8)
    params["w"] = list(w)
    params["c"] = list(c)


def _resolve_mc_controls(task: dict, params: dict) -> None:
    params["method"] = _choice(task.get("method", "closed_form"),
                               _EXPECT_METHODS, "task.method")
    params["n"] = _pos_int(task.get("n", 100_000), "task.n", minimum=2)
    params["nodes"] = _pos_int(task.get("nodes", 64), "task.nodes", minimum=8)
    params["workers"] = _pos_int(task.get("workers", 1), "task.workers")


def resolve(cfg: dict, task_kind: str, seed_flag: int | None) -> RunConfig:
    """Validate the merged configuration and fill every default."""
    if task_kind not in _TASKS:
        raise ConfigError(f"unknown task {task_kind!r}; expected one of {', '.join(_TASKS)}")
    _check_keys(cfg, {"technology", "ces", "demand", "task"}, "config root")
    for name in ("technology", "ces", "demand", "task"):
        if name in cfg and not isinstance(cfg[name], dict):
            raise ConfigError(f"[{name}] must be a table")

    tech_sec = cfg.get("technology", {})
    _check_keys(tech_sec, {"requirements", "labels"}, "technology")
    technology = None
    labels = None
    if "requirements" in tech_sec:
        technology = _build("technology.requirements", as_requirements,
                            tech_sec["requirements"])
    if "labels" in tech_sec:
        raw = tech_sec["labels"]
        if not isinstance(raw, (list, tuple)) or not all(isinstance(s, str) for s in raw):
            raise ConfigError("technology.labels: expected a list of strings")
        labels = tuple(raw)
        if technology is not None and len(labels) != technology.shape[1]:
            raise ConfigError(
                f"technology.labels: {len(labels)} labels for "
                f"{technology.shape[1]} inputs"
            )

    ces = None
    if "ces" in cfg:
        _check_keys(cfg["ces"], {"tfp", "share", "rho", "scale"}, "ces")
        ces = _build("ces", CesParams,
                     tfp=cfg["ces"].get("tfp", 1.0),
                     share=cfg["ces"].get("share", 0.5),
                     rho=cfg["ces"].get("rho", -1.0),
                     scale=cfg["ces"].get("scale", 1.0))

    demand = None
    if "demand" in cfg:
        sec = cfg["demand"]
        _check_keys(sec, {"count", "theta", "bounds"}, "demand")
        default_count = technology.shape[0] - 1 if technology is not None else 1
        kwargs = {"count": sec.get("count", max(default_count, 1))}
        if "theta" in sec:
            kwargs["theta"] = sec["theta"]
        if "bounds" in sec:
            kwargs["bounds"] = sec["bounds"]
        demand = _build("demand", DemandModel, **kwargs)

    task_sec = dict(cfg.get("task", {}))
    declared = task_sec.pop("kind", None)
    if declared is not None and declared != task_kind:
        raise ConfigError(
            f"task.kind = {declared!r} conflicts with the {task_kind!r} subcommand"
        )
    clamp = _build("task.clamp", ClampPolicy.coerce, task_sec.pop("clamp", "raw"))
    seed_cfg = task_sec.pop("seed", None)
    if seed_flag is not None:
        seed = seed_flag
    elif seed_cfg is not None:
        seed = seed_cfg
    else:
        seed = 0
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2 ** 64:
        raise ConfigError(f"seed must be an integer in [0, 2^64), got {seed!r}")

    _check_keys(task_sec, _TASK_KEYS[task_kind], "task")
    params: dict = {}
    n_inputs = technology.shape[1] if technology is not None else 2

    if task_kind == "eval":
        surfaces = ("leontief", "ces", "residual")
        default = _default_surface(technology, ces, None)
        params["surface"] = _choice(task_sec.get("surface", default), surfaces,
                                    "task.surface")
        if "points" not in task_sec:
            raise ConfigError("task.points is required for eval")
        _resolve_points({"points": task_sec["points"]}, params, n_inputs)
        _resolve_exogenous(task_sec, params, technology, params["surface"])
    elif task_kind == "expect":
        _resolve_mc_controls(task_sec, params)
        if "points" in task_sec and ("w" in task_sec or "c" in task_sec):
            raise ConfigError("task.points and task.w/task.c are mutually exclusive")
        _resolve_points(task_sec, params, n_inputs)
    elif task_kind == "isoquant":
        default = _default_surface(technology, ces, demand)
        params["surface"] = _choice(task_sec.get("surface", default), _SURFACES,
                                    "task.surface")
        default_trace = ("analytic" if params["surface"] in ("leontief", "residual")
                         else "rayscan")
        params["trace"] = _choice(task_sec.get("trace", default_trace),
                                  ("analytic", "rayscan", "grid"), "task.trace")
        levels = task_sec.get("levels", [1.0])
        params["levels"] = _float_list(levels, "task.levels")
        if not params["levels"]:
            raise ConfigError("task.levels: expected at least one level")
        if "extent" in task_sec:
            params["extent"] = float(task_sec["extent"])
        params["angles"] = _pos_int(task_sec.get("angles", 64), "task.angles", minimum=3)
        params["bracket"] = _float_list(task_sec.get("bracket", [1e-9, 1e6]),
                                        "task.bracket", 2)
        params["w_range"] = _float_list(task_sec.get("w_range", [0.0, 2.0]),
                                        "task.w_range", 2)
        params["c_range"] = _float_list(task_sec.get("c_range", [0.0, 2.0]),
                                        "task.c_range", 2)
        params["resolution"] = _pos_int(task_sec.get("resolution", 64),
                                        "task.resolution", minimum=8)
        _resolve_exogenous(task_sec, params, technology, params["surface"])
        _resolve_mc_controls(task_sec, params)
    elif task_kind == "rts":
        default = _default_surface(technology, ces, demand)
        params["surface"] = _choice(task_sec.get("surface", default), _SURFACES,
                                    "task.surface")
        params["base"] = _float_list(task_sec.get("base", [1.0] * n_inputs),
                                     "task.base", n_inputs)
        t_lo, t_hi, t_n = _grid_triple(task_sec.get("t", [0.5, 2.0, 7]), "task.t")
        if t_lo <= 0:
            raise ConfigError("task.t: scale values must be positive")
        params["t"] = [t_lo, t_hi, t_n]
        params["tolerance"] = float(task_sec.get("tolerance", 1e-6))
        _resolve_exogenous(task_sec, params, technology, params["surface"])
        _resolve_mc_controls(task_sec, params)
    elif task_kind == "figure":
        fig_id = task_sec.get("id")
        if fig_id is None:
            raise ConfigError("task.id is required for figure (e.g. --set task.id=2b)")
        params["id"] = str(fig_id)

    if params.get("trace") == "analytic" and params["surface"] not in ("leontief", "residual"):
        raise ConfigError("task.trace: analytic traces need a fixed-proportions surface")

    # Expectation runs need a demand model; default to independent uniforms
    # and make sure the competing-output counts line up.
    needs_demand = task_kind == "expect" or params.get("surface") == "expected"
    if needs_demand:
        if technology is None:
            raise ConfigError(f"{task_kind} over an expected surface needs "
                              "technology.requirements")
        if technology.shape[0] < 2:
            raise ConfigError(
                "expected-output runs need at least one competing-output row "
                "in technology.requirements"
            )
        n_competing = technology.shape[0] - 1
        if demand is None:
            demand = _build("demand", DemandModel, count=n_competing)
        elif demand.count != n_competing:
            raise ConfigError(
                f"demand.count = {demand.count} does not match the technology's "
                f"{n_competing} competing output(s)"
            )
        if "method" not in task_sec and (demand.count != 1 or demand.theta is not None):
            params["method"] = "quadrature"  # closed form is K=2 only

    resolved = _resolved_dict(task_kind, seed, clamp, technology, labels, ces,
                              demand, params)
    return RunConfig(task=task_kind, technology=technology, labels=labels,
                     ces=ces, demand=demand, clamp=clamp, seed=seed,
                     params=params, resolved=resolved)


def _resolve_exogenous(task_sec: dict, params: dict, technology, surface: str) -> None:
    if surface != "residual":
        if "exogenous" in task_sec:
            raise ConfigError("task.exogenous only applies to the residual surface")
        return
    if technology is None:
        raise ConfigError("the residual surface needs technology.requirements")
    if technology.shape[0] < 2:
        raise ConfigError(
            "the residual surface needs a competing-output row in "
            "technology.requirements"
        )
    n_exo = technology.shape[0] - 1
    params["exogenous"] = _float_list(task_sec.get("exogenous", [0.0] * n_exo),
                                      "task.exogenous", n_exo)


def _resolved_dict(task, seed, clamp, technology, labels, ces, demand, params) -> dict:
    resolved: dict = {"task": task, "seed": seed, "clamp": clamp.value}
    if technology is not None:
        tech: dict = {"requirements": [[float(v) for v in row] for row in technology]}
        if labels is not None:
            tech["labels"] = list(labels)
        resolved["technology"] = tech
    if ces is not None:
        resolved["ces"] = {"tfp": ces.tfp, "share": ces.share,
                           "rho": ces.rho, "scale": ces.scale}
    if demand is not None:
        dm: dict = {"count": demand.count, "dependence": demand.dependence}
        if demand.theta is not None:
            dm["theta"] = demand.theta
        dm["bounds"] = [[lo, hi] for lo, hi in demand.bounds]
        resolved["demand"] = dm
    # Worker count is deliberately not echoed: results are independent of it.
    resolved["params"] = {k: v for k, v in params.items() if k != "workers"}
    return resolved


def header_lines(run: RunConfig, version: str, extra: dict | None = None) -> list[str]:
    """Flatten the resolved config into deterministic `key = value` lines."""
    lines = [f"prodtech {version}"]

    def emit(prefix: str, value) -> None:
        if isinstance(value, dict):
            for k, v in value.items():
                emit(f"{prefix}.{k}" if prefix else str(k), v)
        else:
            lines.append(f"{prefix} = {format_value(value)}")

    emit("", run.resolved)
    if extra:
        emit("figure", extra)
    return lines
