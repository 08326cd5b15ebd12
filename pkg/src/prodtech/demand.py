"""Random competing demand: uniform marginals, optional AMH dependence.

Draws are counter-based: sample ``i`` of a stream is a pure function of
``(seed, i)``, produced from a dedicated Philox counter block. Splitting an
index range across workers therefore yields exactly the same matrix as a
single pass, bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .errors import ParamDomain, UnsupportedDimension
from .validation import require_int_at_least

__all__ = [
    "DemandModel",
    "SampleStream",
    "amh_cdf",
    "amh_pdf",
    "sample_amh_pair",
    "sample_demand",
]

_MAX_SEED = 2**64 - 1

# One Philox counter block yields four 64-bit words, i.e. four doubles.
_WORDS_PER_BLOCK = 4


@dataclass(frozen=True)
class SampleStream:
    """Position in a reproducible random stream: a seed plus a sample counter.

    ``offset(k)`` returns the stream advanced by k samples; generating from
    the advanced stream matches the tail of a single longer generation.
    """

    seed: int
    index: int = 0

    def __post_init__(self):
        seed = int(self.seed)
        if not (0 <= seed <= _MAX_SEED):
            raise ParamDomain(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        index = int(self.index)
        if index < 0:
            raise ParamDomain(f"index must be >= 0, got {self.index}")
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "index", index)

    def offset(self, k: int) -> "SampleStream":
        return SampleStream(self.seed, self.index + int(k))

    def uniform_matrix(self, n: int, draws_per_sample: int) -> np.ndarray:
        """An (n, draws_per_sample) matrix of U[0,1) doubles.

        Sample i (absolute index ``self.index + i``) owns a fixed span of
        counter blocks, so the matrix does not depend on how the index range
        is partitioned across calls.
        """
        n = require_int_at_least(n, 1, "n")
        k = require_int_at_least(draws_per_sample, 1, "draws_per_sample")
        blocks_per_sample = -(-k // _WORDS_PER_BLOCK)
        start_block = self.index * blocks_per_sample
        bit_gen = Philox(key=self.seed, counter=[start_block, 0, 0, 0])
        width = blocks_per_sample * _WORDS_PER_BLOCK
        flat = Generator(bit_gen).random(n * width)
        return flat.reshape(n, width)[:, :k]


@dataclass(frozen=True)
class DemandModel:
    """Distribution of the exogenous competing-output vector.

    count: number of competing outputs.
    theta: AMH copula parameter in [-1, 1), or None for independent columns.
        Dependence is pairwise only, so theta requires count == 2.
    bounds: (lo, hi) applied to every output, or one pair per output; each
        uniform marginal is mapped affinely onto its interval. ``lo == hi``
        is allowed as a degenerate point mass.
    """

    count: int
    theta: float | None = None
    bounds: tuple = ((0.0, 1.0),)

    def __post_init__(self):
        count = require_int_at_least(self.count, 1, "count")
        object.__setattr__(self, "count", count)
        if self.theta is not None:
            theta = float(self.theta)
            if not (np.isfinite(theta) and -1.0 <= theta < 1.0):
                raise ParamDomain(f"theta must lie in [-1, 1), got {self.theta}")
            if count != 2:
                raise UnsupportedDimension(
                    "AMH dependence couples exactly one pair of outputs; count must be 2"
                )
            object.__setattr__(self, "theta", theta)
        bounds = np.asarray(self.bounds, dtype=float)
        if bounds.ndim == 1:
            bounds = bounds.reshape(1, 2)
        if bounds.shape == (1, 2) and count > 1:
            bounds = np.repeat(bounds, count, axis=0)
        if bounds.shape != (count, 2):
            raise ParamDomain(
                f"bounds must be one (lo, hi) pair or {count} pairs, got shape {bounds.shape}"
            )
        if not np.all(np.isfinite(bounds)):
            raise ParamDomain("bounds must be finite")
        if np.any(bounds[:, 0] > bounds[:, 1]):
            raise ParamDomain("each bounds pair needs lo <= hi")
        object.__setattr__(self, "bounds", tuple((float(lo), float(hi)) for lo, hi in bounds))

    @property
    def dependence(self) -> str:
        return "independent" if self.theta is None else "amh"

    @property
    def draws_per_sample(self) -> int:
        # The AMH pair consumes (u, p); independent columns consume one each.
        return 2 if self.theta is not None else self.count

    def bounds_array(self) -> np.ndarray:
        return np.asarray(self.bounds, dtype=float)


def _check_unit(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ParamDomain(f"{name} must lie in [0, 1]")
    return arr


def _check_theta(theta) -> float:
    theta = float(theta)
    if not (np.isfinite(theta) and -1.0 <= theta < 1.0):
        raise ParamDomain(f"theta must lie in [-1, 1), got {theta}")
    return theta


def amh_cdf(theta: float, u, v):
    """AMH copula CDF: C(u, v) = uv / (1 - theta (1-u)(1-v))."""
    theta = _check_theta(theta)
    u = _check_unit(u, "u")
    v = _check_unit(v, "v")
    out = u * v / (1.0 - theta * (1.0 - u) * (1.0 - v))
    return float(out) if np.isscalar(out) or out.ndim == 0 else out


def amh_pdf(theta: float, u, v):
    """AMH copula density, the closed-form mixed partial of :func:`amh_cdf`."""
    theta = _check_theta(theta)
    u = _check_unit(u, "u")
    v = _check_unit(v, "v")
    denom = 1.0 - theta * (1.0 - u) * (1.0 - v)
    numer = v * (1.0 - theta * (1.0 - v))
    numer_dv = 1.0 - theta + 2.0 * theta * v
    out = (numer_dv * denom - 2.0 * theta * (1.0 - u) * numer) / denom**3
    return float(out) if np.isscalar(out) or out.ndim == 0 else out


def _amh_conditional_inverse(theta: float, u: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Solve dC/du(u, v) = p for v.

    The conditional CDF is v (1 - theta (1-v)) / (1 - theta (1-u)(1-v))^2;
    substituting t = 1 - v gives the quadratic
    (theta - p A^2) t^2 + (2 p A - 1 - theta) t + (1 - p) = 0 with
    A = theta (1 - u), whose unique root in [0, 1] is taken.
    """
    if theta == 0.0:
        return np.array(p, dtype=float, copy=True)
    big_a = theta * (1.0 - u)
    qa = theta - p * big_a * big_a
    qb = 2.0 * p * big_a - 1.0 - theta
    qc = 1.0 - p
    disc = np.maximum(qb * qb - 4.0 * qa * qc, 0.0)
    q = -0.5 * (qb + np.copysign(np.sqrt(disc), qb))
    with np.errstate(divide="ignore", invalid="ignore"):
        root_small = np.where(q != 0.0, qc / q, 0.0)
        root_large = np.where(qa != 0.0, q / qa, np.inf)
        linear = np.where(qb != 0.0, -qc / qb, 0.5)
    in_range = (root_small >= 0.0) & (root_small <= 1.0)
    t = np.where(in_range, root_small, root_large)
    t = np.where(np.abs(qa) < 1e-300, linear, t)
    return 1.0 - np.clip(t, 0.0, 1.0)


def sample_amh_pair(theta: float, stream: SampleStream) -> tuple[float, float]:
    """One (u, v) draw with AMH(theta) dependence and uniform marginals.

    Uses conditional-distribution inversion: u and p are independent
    uniforms from the stream's block and v solves dC/du(u, v) = p.
    """
    theta = _check_theta(theta)
    mat = stream.uniform_matrix(1, 2)
    u, p = mat[0, 0], mat[0, 1]
    v = _amh_conditional_inverse(theta, np.asarray(u), np.asarray(p))
    return float(u), float(v)


def sample_demand(model: DemandModel, stream: SampleStream, n: int) -> np.ndarray:
    """An (n, count) matrix of competing-output draws.

    Columns have Uniform[lo, hi] marginals. Under AMH dependence the column
    pair has copula C(u, v) = uv / (1 - theta (1-u)(1-v)).
    """
    if not isinstance(model, DemandModel):
        raise ParamDomain("model must be a DemandModel")
    n = require_int_at_least(n, 1, "n")
    raw = stream.uniform_matrix(n, model.draws_per_sample)
    if model.theta is not None:
        u = raw[:, 0]
        v = _amh_conditional_inverse(model.theta, u, raw[:, 1])
        unit = np.column_stack([u, v])
    else:
        unit = raw
    b = model.bounds_array()
    return b[:, 0] + (b[:, 1] - b[:, 0]) * unit
