"""Expected focal output over random competing demand.

The integrand ``y -> residual capacity`` is a minimum of affine functions of
the demand draw, so it is piecewise linear with analytically locatable kinks.
Three interchangeable engines exploit that structure:

* :func:`expected_output_closed_form` -- exact piecewise integration for one
  uniform competing output; the trusted oracle for the other two.
* :func:`expected_output_quadrature` -- Gauss-Legendre, split at kinks, for
  one or two competing outputs (with optional AMH dependence).
* :func:`expected_output_mc` -- seeded Monte Carlo with partition-invariant
  draws and an unbiased standard error.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .demand import DemandModel, SampleStream, amh_pdf, sample_demand
from .errors import DimensionMismatch, ParamDomain, UnsupportedDimension
from .technology import ClampPolicy, residual_capacity_batch, residual_leontief
from .validation import (
    as_quantities,
    as_requirements,
    check_same_inputs,
    require_int_at_least,
)

__all__ = [
    "ExpectationEstimate",
    "expected_output_mc",
    "expected_output_quadrature",
    "expected_output_closed_form",
]


@dataclass(frozen=True)
class ExpectationEstimate:
    """Expected-output value with sampling metadata.

    ``std_error`` and ``n_samples`` are zero for the deterministic methods.
    """

    value: float
    std_error: float = 0.0
    n_samples: int = 0
    method: str = "closed_form"

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ParamDomain(f"estimate value must be finite, got {self.value}")
        if self.std_error < 0:
            raise ParamDomain("std_error must be >= 0")


def _validate_problem(tech, inputs, model: DemandModel):
    req = as_requirements(tech)
    x = as_quantities(inputs)
    check_same_inputs(req, x)
    if not isinstance(model, DemandModel):
        raise ParamDomain("model must be a DemandModel")
    if model.count != req.shape[0] - 1:
        raise DimensionMismatch(
            f"technology has {req.shape[0] - 1} competing outputs, "
            f"demand model has {model.count}"
        )
    return req, x


# ---------------------------------------------------------------------------
# Monte Carlo


def expected_output_mc(tech, inputs, model: DemandModel,
                       clamp: ClampPolicy = ClampPolicy.RAW,
                       n: int = 100_000, seed: int = 0,
                       workers: int = 1) -> ExpectationEstimate:
    """Sample mean of the residual capacity over ``n`` demand draws.

    The result is a pure function of ``seed``: draws are counter-based and
    the reduction runs over the fully materialised sample vector, so any
    worker count produces bit-identical output.
    """
    req, x = _validate_problem(tech, inputs, model)
    clamp = ClampPolicy.coerce(clamp)
    n = require_int_at_least(n, 2, "n")
    workers = require_int_at_least(workers, 1, "workers")

    values = np.empty(n, dtype=float)

    def fill(start: int, stop: int) -> None:
        draws = sample_demand(model, SampleStream(seed, start), stop - start)
        values[start:stop] = residual_capacity_batch(req, x, draws, clamp)

    if workers == 1:
        fill(0, n)
    else:
        edges = np.linspace(0, n, workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fill, int(a), int(b))
                       for a, b in zip(edges[:-1], edges[1:]) if b > a]
            for fut in futures:
                fut.result()

    std_error = float(np.std(values, ddof=1) / np.sqrt(n))
    return ExpectationEstimate(value=float(np.mean(values)), std_error=std_error,
                               n_samples=n, method="monte_carlo")


# ---------------------------------------------------------------------------
# Piecewise-linear structure of the integrand

# Capacity along one demand coordinate is min_j (alpha_j - beta_j * y), the
# lower envelope of affine functions; kinks sit at pairwise intersections
# and, under clamping, at zero crossings.


def _lines_1d(req: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    active = req[0] > 0
    alpha = x[active] / req[0][active]
    beta = req[1][active] / req[0][active]
    return alpha, beta


def _interior_breaks_1d(alpha: np.ndarray, beta: np.ndarray, lo: float, hi: float,
                        clamp: ClampPolicy) -> list[float]:
    breaks: list[float] = []
    m = alpha.shape[0]
    for i in range(m):
        for j in range(i + 1, m):
            if beta[i] != beta[j]:
                t = (alpha[i] - alpha[j]) / (beta[i] - beta[j])
                if lo < t < hi:
                    breaks.append(float(t))
    if clamp is ClampPolicy.CLAMP_AT_ZERO:
        for i in range(m):
            if beta[i] != 0.0:
                t = alpha[i] / beta[i]
                if lo < t < hi:
                    breaks.append(float(t))
    return breaks


def _piece_edges(lo: float, hi: float, interior: list[float]) -> np.ndarray:
    edges = np.array([lo, *sorted(interior), hi], dtype=float)
    keep = np.concatenate([[True], np.diff(edges) > 0])
    return edges[keep]


def _gauss_legendre(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(nodes)


# ---------------------------------------------------------------------------
# Closed form (one uniform competing output)


def expected_output_closed_form(tech, inputs,
                                clamp: ClampPolicy = ClampPolicy.RAW,
                                model: DemandModel | None = None) -> ExpectationEstimate:
    """Exact expectation for a two-output technology with uniform demand.

    Enumerates the branch-switch (and, under clamping, zero-crossing) points
    of the piecewise-linear integrand and integrates each linear piece
    analytically. Defaults to the Uniform[0, 1] marginal.
    """
    req = as_requirements(tech)
    if req.shape[0] != 2:
        raise UnsupportedDimension(
            f"closed form needs exactly one competing output, got {req.shape[0] - 1}"
        )
    x = as_quantities(inputs)
    check_same_inputs(req, x)
    clamp = ClampPolicy.coerce(clamp)
    if model is None:
        model = DemandModel(count=1)
    if model.count != 1 or model.theta is not None:
        raise UnsupportedDimension("closed form supports a single independent uniform output")
    lo, hi = model.bounds[0]

    if hi == lo:
        value = residual_leontief(req, x, [lo], clamp)
        return ExpectationEstimate(value=value, method="closed_form")

    alpha, beta = _lines_1d(req, x)
    edges = _piece_edges(lo, hi, _interior_breaks_1d(alpha, beta, lo, hi, clamp))
    total = 0.0
    for y1, y2 in zip(edges[:-1], edges[1:]):
        ym = 0.5 * (y1 + y2)
        k = int(np.argmin(alpha - beta * ym))
        if clamp is ClampPolicy.CLAMP_AT_ZERO and alpha[k] - beta[k] * ym <= 0.0:
            continue
        total += alpha[k] * (y2 - y1) - 0.5 * beta[k] * (y2 * y2 - y1 * y1)
    return ExpectationEstimate(value=total / (hi - lo), method="closed_form")


# ---------------------------------------------------------------------------
# Quadrature


def expected_output_quadrature(tech, inputs, model: DemandModel,
                               clamp: ClampPolicy = ClampPolicy.RAW,
                               nodes: int = 64) -> ExpectationEstimate:
    """Deterministic Gauss-Legendre expectation for one or two competing outputs.

    The domain is split at analytically located kinks before quadrature is
    applied, so each panel integrand is smooth. With two outputs the inner
    dimension is split per outer node and the copula density (1 when
    independent) weights the integrand.
    """
    req, x = _validate_problem(tech, inputs, model)
    clamp = ClampPolicy.coerce(clamp)
    nodes = require_int_at_least(nodes, 8, "nodes")
    if model.count == 1:
        value = _quadrature_one_output(req, x, model, clamp, nodes)
    elif model.count == 2:
        value = _quadrature_two_outputs(req, x, model, clamp, nodes)
    else:
        raise UnsupportedDimension(
            f"quadrature supports 1 or 2 competing outputs, got {model.count}"
        )
    return ExpectationEstimate(value=value, method="quadrature")


def _quadrature_one_output(req, x, model, clamp, nodes) -> float:
    lo, hi = model.bounds[0]
    if hi == lo:
        # Point mass: reproduce the fixed-demand residual capacity exactly
        # (same arithmetic as residual_leontief, bit for bit).
        residual = x - lo * req[1]
        active = req[0] > 0
        h = float(np.min(residual[active] / req[0][active]))
        return max(0.0, h) if clamp is ClampPolicy.CLAMP_AT_ZERO else h
    alpha, beta = _lines_1d(req, x)
    edges = _piece_edges(lo, hi, _interior_breaks_1d(alpha, beta, lo, hi, clamp))
    xi, wq = _gauss_legendre(nodes)
    total = 0.0
    for y1, y2 in zip(edges[:-1], edges[1:]):
        half = 0.5 * (y2 - y1)
        y = 0.5 * (y1 + y2) + half * xi
        h = np.min(alpha[:, None] - beta[:, None] * y[None, :], axis=0)
        if clamp is ClampPolicy.CLAMP_AT_ZERO:
            np.maximum(h, 0.0, out=h)
        total += half * float(wq @ h)
    return total / (hi - lo)


def _affine_critical_curves(alpha, beta, gamma, lo_in, hi_in, clamp):
    """Kink structure of y_in -> min_j(alpha_j - beta_j y_in - gamma_j y_out).

    Returns affine curves y_in = m * y_out + q (pairwise intersections and,
    under clamping, zero crossings) plus outer coordinates where the piece
    pattern can change without an affine curve (parallel-line order swaps,
    zero crossings of lines that are constant in y_in).
    """
    curves: list[tuple[float, float]] = []
    outer_breaks: list[float] = []
    m = alpha.shape[0]
    for i in range(m):
        for j in range(i + 1, m):
            if beta[i] != beta[j]:
                denom = beta[i] - beta[j]
                curves.append((-(gamma[i] - gamma[j]) / denom,
                               (alpha[i] - alpha[j]) / denom))
            elif gamma[i] != gamma[j]:
                outer_breaks.append((alpha[i] - alpha[j]) / (gamma[i] - gamma[j]))
    if clamp is ClampPolicy.CLAMP_AT_ZERO:
        for i in range(m):
            if beta[i] != 0.0:
                curves.append((-gamma[i] / beta[i], alpha[i] / beta[i]))
            elif gamma[i] != 0.0:
                outer_breaks.append(alpha[i] / gamma[i])
    return curves, outer_breaks


def _outer_candidates(curves, outer_breaks, lo_in, hi_in, lo_out, hi_out):
    cands = list(outer_breaks)
    for m, q in curves:
        if m != 0.0:
            cands.append((lo_in - q) / m)
            cands.append((hi_in - q) / m)
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            mi, qi = curves[i]
            mj, qj = curves[j]
            if mi != mj:
                cands.append((qj - qi) / (mi - mj))
    return [float(t) for t in cands if lo_out < t < hi_out]


def _quadrature_two_outputs(req, x, model, clamp, nodes) -> float:
    (lo_in, hi_in), (lo_out, hi_out) = model.bounds
    theta = model.theta

    # Degenerate marginals collapse to the one-output problem (dependence on
    # a constant is vacuous).
    if hi_out == lo_out:
        reduced = req[[0, 1]]
        model_1 = DemandModel(count=1, bounds=(lo_in, hi_in))
        return _quadrature_one_output(reduced, x - lo_out * req[2], model_1, clamp, nodes)
    if hi_in == lo_in:
        reduced = req[[0, 2]]
        model_1 = DemandModel(count=1, bounds=(lo_out, hi_out))
        return _quadrature_one_output(reduced, x - lo_in * req[1], model_1, clamp, nodes)

    active = req[0] > 0
    alpha = x[active] / req[0][active]
    beta = req[1][active] / req[0][active]
    gamma = req[2][active] / req[0][active]

    span_in = hi_in - lo_in
    span_out = hi_out - lo_out

    curves, outer_breaks = _affine_critical_curves(alpha, beta, gamma, lo_in, hi_in, clamp)
    cands = _outer_candidates(curves, outer_breaks, lo_in, hi_in, lo_out, hi_out)
    outer_edges = _piece_edges(lo_out, hi_out, cands)

    xi, wq = _gauss_legendre(nodes)
    total = 0.0
    for o1, o2 in zip(outer_edges[:-1], outer_edges[1:]):
        o_half = 0.5 * (o2 - o1)
        y_out = 0.5 * (o1 + o2) + o_half * xi          # (T,)
        w_out = o_half * wq

        # Inner edge curves keep a fixed membership and ordering within an
        # outer piece; both can only change at candidate coordinates.
        o_mid = 0.5 * (o1 + o2)
        vals_mid = [m * o_mid + q for m, q in curves]
        inner = [(m, q) for (m, q), v in zip(curves, vals_mid) if lo_in < v < hi_in]
        inner.sort(key=lambda mq: mq[0] * o_mid + mq[1])
        edge_vals = [np.full_like(y_out, lo_in)]
        edge_vals += [m * y_out + q for m, q in inner]
        edge_vals.append(np.full_like(y_out, hi_in))
        edges = np.stack(edge_vals, axis=1)            # (T, E)

        piece_val = np.zeros_like(y_out)
        for p in range(edges.shape[1] - 1):
            i_half = 0.5 * (edges[:, p + 1] - edges[:, p])       # (T,)
            i_mid = 0.5 * (edges[:, p + 1] + edges[:, p])
            y_in = i_mid[:, None] + i_half[:, None] * xi[None, :]  # (T, Q)
            h = np.min(
                alpha[:, None, None]
                - beta[:, None, None] * y_in[None, :, :]
                - gamma[:, None, None] * y_out[None, :, None],
                axis=0,
            )
            if clamp is ClampPolicy.CLAMP_AT_ZERO:
                np.maximum(h, 0.0, out=h)
            if theta is not None:
                u = (y_in - lo_in) / span_in
                v = (y_out[:, None] - lo_out) / span_out
                h = h * amh_pdf(theta, np.clip(u, 0.0, 1.0), np.clip(v, 0.0, 1.0))
            piece_val += i_half * (h @ wq)
        total += float(w_out @ piece_val)
    return total / (span_in * span_out)
