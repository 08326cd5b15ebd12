"""Geometric diagnostics: isoquant traces and returns-to-scale profiles.

Surfaces are plain callables ``(w, c) -> float``; estimator objects from
:mod:`prodtech.surfaces` work directly (they are callable) and anything with
a ``predict`` method is adapted. Root finding is bisection throughout —
production surfaces have kinks, so derivative-based methods are avoided.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyLevelSet,
    LevelNotBracketed,
    NonMonotoneRay,
    ParamDomain,
)
from .technology import InputBundle
from .validation import as_requirements, require_int_at_least, require_positive

__all__ = [
    "TraceMethod",
    "IsoquantTrace",
    "ScaleProfile",
    "RtsLabel",
    "RtsClass",
    "trace_isoquant_analytic",
    "trace_isoquant_rayscan",
    "trace_isoquant_grid",
    "scale_profile",
    "classify_rts",
]


class TraceMethod(enum.Enum):
    ANALYTIC_KINK = "analytic_kink"
    RAY_ROOT_FIND = "ray_root_find"
    GRID_CONTOUR = "grid_contour"


class RtsLabel(enum.Enum):
    CONSTANT = "constant"
    DECREASING = "decreasing"
    INCREASING = "increasing"
    MIXED = "mixed"


@dataclass(frozen=True, eq=False)
class IsoquantTrace:
    """Ordered points on one level set of a production surface.

    Points sweep monotonically by angle around the origin (descending, from
    the c-axis toward the w-axis). ``skipped_angles`` records ray directions
    on which the level was not attained (ray scanning only).
    """

    level: float
    points: np.ndarray
    method: TraceMethod
    skipped_angles: tuple[float, ...] = ()

    def __post_init__(self):
        level = float(self.level)
        if not np.isfinite(level):
            raise ParamDomain(f"level must be finite, got {self.level}")
        object.__setattr__(self, "level", level)
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
            raise DimensionMismatch("points must be a non-empty (n, 2) array")
        if not np.all(np.isfinite(pts)):
            raise ParamDomain("trace points must be finite")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "method", TraceMethod(self.method))
        object.__setattr__(
            self, "skipped_angles", tuple(float(a) for a in self.skipped_angles)
        )

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class ScaleProfile:
    """Outputs and scale elasticities along the ray t -> t * direction.

    Elasticities are log-log finite differences: centered at interior points,
    one-sided at the ends. Entries whose stencil touches a non-positive
    output are NaN (a reported gap, not an error).
    """

    direction: InputBundle
    t_values: np.ndarray
    outputs: np.ndarray
    elasticities: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        t = np.asarray(self.t_values, dtype=float)
        out = np.asarray(self.outputs, dtype=float)
        if t.ndim != 1 or out.shape != t.shape:
            raise DimensionMismatch("t_values and outputs must be matching 1-D arrays")
        if not np.all(np.isfinite(t)) or np.any(t <= 0):
            raise ParamDomain("t_values must be finite and positive")
        if np.any(np.diff(t) <= 0):
            raise ParamDomain("t_values must be strictly increasing")
        if not np.all(np.isfinite(out)):
            raise ParamDomain("profile outputs must be finite")
        elas = (np.asarray(self.elasticities, dtype=float)
                if self.elasticities is not None else _log_log_slopes(t, out))
        if elas.shape != t.shape:
            raise DimensionMismatch("elasticities must match t_values in shape")
        for arr in (t, out, elas):
            arr.flags.writeable = False
        object.__setattr__(self, "t_values", t)
        object.__setattr__(self, "outputs", out)
        object.__setattr__(self, "elasticities", elas)


@dataclass(frozen=True)
class RtsClass:
    """Returns-to-scale classification of a profile at a given tolerance."""

    classification: RtsLabel
    tolerance: float

    def __post_init__(self):
        object.__setattr__(self, "classification", RtsLabel(self.classification))
        tol = float(self.tolerance)
        if not np.isfinite(tol) or tol < 0:
            raise ParamDomain(f"tolerance must be finite and >= 0, got {self.tolerance}")
        object.__setattr__(self, "tolerance", tol)


# ---------------------------------------------------------------------------
# helpers


def _as_callable(surface):
    if callable(surface):
        return surface
    predict = getattr(surface, "predict", None)
    if predict is not None:
        return lambda *coords: float(
            predict(np.asarray(coords, dtype=float).reshape(1, -1))[0]
        )
    raise ParamDomain(
        "surface must be callable or expose predict(), "
        f"got {type(surface).__name__}"
    )


def _bisect(g, lo: float, hi: float, rel_tol: float) -> float:
    """Root of g on [lo, hi] given g(lo) <= 0 <= g(hi) or the reverse."""
    glo = g(lo)
    if glo == 0.0:
        return lo
    if g(hi) == 0.0:
        return hi
    lo_neg = glo < 0.0
    for _ in range(200):
        if hi - lo <= rel_tol * hi:
            break
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm < 0.0) == lo_neg:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _finite_level(level) -> float:
    level = float(level)
    if not np.isfinite(level):
        raise ParamDomain(f"level must be finite, got {level}")
    return level


# ---------------------------------------------------------------------------
# isoquant traces


def trace_isoquant_analytic(tech, level: float, extent: float | None = None) -> IsoquantTrace:
    """Exact L-shaped isoquant of a two-input fixed-proportions technology.

    The kink sits at ``(a1 * level, a2 * level)``; one arm runs up to
    ``c = extent`` at fixed w, the other out to ``w = extent`` at fixed c.
    ``extent`` defaults to twice the larger kink coordinate.
    """
    req = as_requirements(tech)
    if req.shape != (1, 2):
        raise DimensionMismatch(
            f"analytic trace needs a single-output, two-input technology, got shape {req.shape}"
        )
    if np.any(req[0] <= 0):
        raise ParamDomain("analytic trace needs strictly positive requirements")
    level = require_positive(level, "level")
    kink_w = req[0, 0] * level
    kink_c = req[0, 1] * level
    if extent is None:
        extent = 2.0 * max(kink_w, kink_c)
    else:
        extent = float(extent)
        if not np.isfinite(extent) or extent <= max(kink_w, kink_c):
            raise ParamDomain(
                f"extent must exceed both kink coordinates ({kink_w}, {kink_c}), got {extent}"
            )
    points = np.array([[kink_w, extent], [kink_w, kink_c], [extent, kink_c]])
    return IsoquantTrace(level=level, points=points, method=TraceMethod.ANALYTIC_KINK)


def trace_isoquant_rayscan(surface, level: float, angles: int = 64,
                           bracket: tuple[float, float] = (1e-9, 1e6)) -> IsoquantTrace:
    """Trace a level set by bisecting along rays from the origin.

    Scans ``angles`` directions strictly inside (0, pi/2). Rays on which the
    level is not attained within the radial bracket are skipped and reported
    via ``skipped_angles``; if no ray attains the level the trace would be
    empty and LevelNotBracketed is raised. A bracket whose surface values
    straddle the level in the wrong order (high at the inner radius) raises
    NonMonotoneRay.
    """
    f = _as_callable(surface)
    level = _finite_level(level)
    angles = require_int_at_least(angles, 3, "angles")
    r_lo, r_hi = (float(bracket[0]), float(bracket[1]))
    if not (np.isfinite(r_lo) and np.isfinite(r_hi)) or not (0.0 < r_lo < r_hi):
        raise ParamDomain(f"bracket must satisfy 0 < r_lo < r_hi, got {bracket}")

    points: list[tuple[float, float]] = []
    skipped: list[float] = []
    # Descending angle: from the c-axis toward the w-axis, matching the
    # analytic trace ordering.
    for i in reversed(range(angles)):
        phi = (i + 0.5) * (0.5 * np.pi) / angles
        cw, sc = np.cos(phi), np.sin(phi)

        def g(r: float) -> float:
            return f(r * cw, r * sc) - level

        g_lo, g_hi = g(r_lo), g(r_hi)
        if g_lo > 0.0 and g_hi < 0.0:
            raise NonMonotoneRay(
                f"surface falls through level {level} from below radius {r_lo} "
                f"to {r_hi} at angle {phi:.6f}"
            )
        if g_lo > 0.0 or g_hi < 0.0:
            skipped.append(phi)
            continue
        r = _bisect(g, r_lo, r_hi, rel_tol=1e-10)
        points.append((r * cw, r * sc))
    if not points:
        raise LevelNotBracketed(
            f"level {level} not attained on any of {angles} rays within radii {bracket}"
        )
    return IsoquantTrace(level=level, points=np.asarray(points),
                         method=TraceMethod.RAY_ROOT_FIND,
                         skipped_angles=tuple(skipped))


def trace_isoquant_grid(surface, level: float,
                        grid: tuple[tuple[float, float], tuple[float, float], int]
                        ) -> IsoquantTrace:
    """Marching-squares level-set extraction on a rectangular grid.

    ``grid`` is ``((w_lo, w_hi), (c_lo, c_hi), resolution)`` with resolution
    grid points per axis. Edge crossings are located by bisection along grid
    edges (not just linear interpolation), so emitted points are on-level to
    the trace tolerance; ambiguous saddle cells are resolved by the surface
    value at the cell center. Segments are chained into polylines and
    ordered by descending angle around the origin.
    """
    f = _as_callable(surface)
    level = _finite_level(level)
    (w_lo, w_hi), (c_lo, c_hi), resolution = grid
    res = require_int_at_least(resolution, 8, "resolution")
    for lo, hi, name in ((w_lo, w_hi, "w_range"), (c_lo, c_hi, "c_range")):
        if not (np.isfinite(lo) and np.isfinite(hi)) or not (0.0 <= lo < hi):
            raise ParamDomain(f"{name} must satisfy 0 <= lo < hi, got ({lo}, {hi})")

    w = np.linspace(w_lo, w_hi, res)
    c = np.linspace(c_lo, c_hi, res)
    vals = np.empty((res, res))
    for i in range(res):
        for j in range(res):
            vals[i, j] = f(w[i], c[j])
    below = vals < level

    # One crossing point per grid edge whose endpoints straddle the level.
    crossings: dict[tuple, tuple[float, float]] = {}
    for i in range(res - 1):
        for j in range(res):
            if below[i, j] != below[i + 1, j]:
                cj = c[j]
                root = _bisect(lambda t: f(t, cj) - level, w[i], w[i + 1], 1e-12)
                crossings[("w", i, j)] = (root, cj)
    for i in range(res):
        for j in range(res - 1):
            if below[i, j] != below[i, j + 1]:
                wi = w[i]
                root = _bisect(lambda t: f(wi, t) - level, c[j], c[j + 1], 1e-12)
                crossings[("c", i, j)] = (wi, root)
    if not crossings:
        raise EmptyLevelSet(
            f"no grid cell brackets level {level}: surface spans "
            f"[{vals.min()}, {vals.max()}] on the grid (locally constant "
            "surfaces at the level are degenerate and not traced)"
        )

    segments: list[tuple[tuple, tuple]] = []
    for i in range(res - 1):
        for j in range(res - 1):
            bottom, top = ("w", i, j), ("w", i, j + 1)
            left, right = ("c", i, j), ("c", i + 1, j)
            crossed = [k for k in (bottom, right, top, left) if k in crossings]
            if len(crossed) == 2:
                segments.append((crossed[0], crossed[1]))
            elif len(crossed) == 4:
                center_below = f(0.5 * (w[i] + w[i + 1]), 0.5 * (c[j] + c[j + 1])) < level
                if center_below == below[i, j]:
                    segments.append((bottom, right))
                    segments.append((top, left))
                else:
                    segments.append((bottom, left))
                    segments.append((top, right))

    ordered = _chain_and_order(segments, crossings)
    return IsoquantTrace(level=level, points=ordered, method=TraceMethod.GRID_CONTOUR)


def _chain_and_order(segments, crossings) -> np.ndarray:
    """Chain crossing points into polylines, sweep-ordered by angle."""
    adj: dict[tuple, list[tuple]] = defaultdict(list)
    for a, b in segments:
        adj[a].append(b)
        adj[b].append(a)
    used: set[frozenset] = set()

    def walk(start):
        path = [start]
        cur = start
        while True:
            step = None
            for nb in sorted(adj[cur]):
                edge = frozenset((cur, nb))
                if edge not in used:
                    step = nb
                    used.add(edge)
                    break
            if step is None:
                return path
            path.append(step)
            cur = step

    components: list[list[tuple]] = []
    for start in sorted(k for k in adj if len(adj[k]) == 1):
        path = walk(start)
        if len(path) > 1:
            components.append(path)
    for start in sorted(adj):  # remaining closed loops
        while any(frozenset((start, nb)) not in used for nb in adj[start]):
            path = walk(start)
            if len(path) > 1:
                components.append(path)

    if not components:
        # Isolated crossing points (possible only on the grid boundary).
        components = [[k] for k in sorted(crossings)]

    def angle(key):
        pw, pc = crossings[key]
        return float(np.arctan2(pc, pw))

    oriented = []
    for path in components:
        if angle(path[0]) < angle(path[-1]):
            path = path[::-1]
        oriented.append(path)
    oriented.sort(key=lambda p: -max(angle(k) for k in p))
    points = [crossings[k] for path in oriented for k in path]
    return np.asarray(points)


# ---------------------------------------------------------------------------
# returns to scale


def _log_log_slopes(t: np.ndarray, outputs: np.ndarray) -> np.ndarray:
    log_t = np.log(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_f = np.where(outputs > 0, np.log(np.where(outputs > 0, outputs, 1.0)), np.nan)
    n = t.shape[0]
    elas = np.full(n, np.nan)
    for i in range(n):
        lo = max(i - 1, 0)
        hi = min(i + 1, n - 1)
        if hi == lo:
            continue
        elas[i] = (log_f[hi] - log_f[lo]) / (log_t[hi] - log_t[lo])
    return elas


def scale_profile(surface, base, t_values) -> ScaleProfile:
    """Evaluate a surface along t * base and estimate scale elasticities."""
    f = _as_callable(surface)
    if not isinstance(base, InputBundle):
        base = InputBundle(tuple(np.asarray(base, dtype=float)))
    t = np.asarray(t_values, dtype=float)
    if t.ndim != 1 or t.shape[0] < 2:
        raise ParamDomain("t_values must be a 1-D array with at least 2 entries")
    q = np.asarray(base.quantities)
    outputs = np.array([f(*(ti * q)) for ti in t], dtype=float)
    if not np.all(np.isfinite(outputs)):
        raise ParamDomain("surface returned a non-finite output along the profile")
    return ScaleProfile(direction=base, t_values=t, outputs=outputs)


def classify_rts(profile: ScaleProfile, tolerance: float = 1e-6) -> RtsClass:
    """Classify a scale profile as constant/decreasing/increasing/mixed RTS.

    Gap entries (NaN elasticities from non-positive outputs) are excluded; a
    profile with no usable elasticity is Mixed by convention.
    """
    if not isinstance(profile, ScaleProfile):
        raise ParamDomain("profile must be a ScaleProfile")
    if profile.t_values.shape[0] < 3:
        raise ParamDomain("classification needs at least 3 t-values")
    tol = float(tolerance)
    if not np.isfinite(tol) or tol < 0:
        raise ParamDomain(f"tolerance must be finite and >= 0, got {tolerance}")
    e = profile.elasticities[np.isfinite(profile.elasticities)]
    if e.size == 0:
        label = RtsLabel.MIXED
    elif np.all(np.abs(e - 1.0) <= tol):
        label = RtsLabel.CONSTANT
    elif np.all(e < 1.0 - tol):
        label = RtsLabel.DECREASING
    elif np.all(e > 1.0 + tol):
        label = RtsLabel.INCREASING
    else:
        label = RtsLabel.MIXED
    return RtsClass(classification=label, tolerance=tol)
