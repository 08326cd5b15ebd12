"""Deterministic production technologies.

Three evaluation routines form the numeric core of the package:

* :func:`ces_eval` -- the four-parameter constant-elasticity-of-substitution
  function, kept as a smooth reference technology.
* :func:`leontief_eval` -- fixed-proportions production: output is the
  smallest input-limited capacity.
* :func:`residual_leontief` -- the fixed-proportions focal output evaluated
  on inputs net of the resources consumed by competing outputs.

All functions are pure; values in, value out, no shared state.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonPositiveInput, ParamDomain
from .validation import (
    as_exogenous,
    as_quantities,
    as_requirements,
    check_same_inputs,
    require_positive,
)

__all__ = [
    "ClampPolicy",
    "InputBundle",
    "TechnologyMatrix",
    "CesParams",
    "ces_eval",
    "leontief_eval",
    "residual_leontief",
]


class ClampPolicy(enum.Enum):
    """How to treat negative residual capacity.

    RAW returns the signed value as computed; CLAMP_AT_ZERO floors the
    result at zero. RAW is the default because concavity of the residual
    surface is only guaranteed without clamping.
    """

    RAW = "raw"
    CLAMP_AT_ZERO = "clamp_at_zero"

    @classmethod
    def coerce(cls, value) -> "ClampPolicy":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ParamDomain(
                f"clamp must be one of {[m.value for m in cls]}, got {value!r}"
            ) from None


@dataclass(frozen=True)
class InputBundle:
    """An ordered bundle of non-negative input quantities, optionally labelled."""

    quantities: tuple[float, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        q = tuple(float(v) for v in self.quantities)
        object.__setattr__(self, "quantities", q)
        as_quantities(q, name="quantities")
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(q):
                raise DimensionMismatch("labels must match quantities in length")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.quantities)

    def scaled(self, t: float) -> "InputBundle":
        return InputBundle(tuple(t * v for v in self.quantities), self.labels)


@dataclass(frozen=True, eq=False)
class TechnologyMatrix:
    """Per-output, per-input requirement coefficients.

    Entry (k, j) is the amount of input j consumed per unit of output k.
    Row 0 is the focal output; rows 1..K-1 describe competing outputs that
    drain the same inputs.
    """

    requirements: np.ndarray = field()

    def __post_init__(self):
        arr = as_requirements(self.requirements)
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "requirements", arr)

    @property
    def n_outputs(self) -> int:
        return self.requirements.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.requirements.shape[1]

    @property
    def focal_row(self) -> np.ndarray:
        return self.requirements[0]

    @property
    def drain_rows(self) -> np.ndarray:
        """Requirement rows of the competing outputs, shape (K - 1, M)."""
        return self.requirements[1:]


@dataclass(frozen=True)
class CesParams:
    """Parameters of the CES technology.

    tfp: total factor productivity, > 0.
    share: weight on the first input, strictly between 0 and 1.
    rho: substitution parameter, non-zero (the rho -> 0 limit is not supported).
    scale: returns-to-scale exponent, > 0.
    """

    tfp: float
    share: float
    rho: float
    scale: float

    def __post_init__(self):
        object.__setattr__(self, "tfp", require_positive(self.tfp, "tfp"))
        share = float(self.share)
        if not (np.isfinite(share) and 0.0 < share < 1.0):
            raise ParamDomain(f"share must lie strictly in (0, 1), got {share}")
        object.__setattr__(self, "share", share)
        rho = float(self.rho)
        if not np.isfinite(rho) or rho == 0.0:
            raise ParamDomain(f"rho must be finite and non-zero, got {rho}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "scale", require_positive(self.scale, "scale"))


def ces_eval(params: CesParams, inputs) -> float:
    """Evaluate the CES technology at a two-input bundle.

    Returns tfp * (share * w**rho + (1 - share) * c**rho) ** (scale / rho).
    Zero inputs are rejected when rho < 0 (the power would diverge).
    """
    if not isinstance(params, CesParams):
        params = CesParams(*params)
    x = as_quantities(inputs)
    if x.shape[0] != 2:
        raise DimensionMismatch(f"CES evaluation takes exactly 2 inputs, got {x.shape[0]}")
    if params.rho < 0 and np.any(x == 0):
        raise NonPositiveInput("inputs must be strictly positive when rho < 0")
    w, c = x
    inner = params.share * w ** params.rho + (1.0 - params.share) * c ** params.rho
    return float(params.tfp * inner ** (params.scale / params.rho))


def _capacity_min(focal: np.ndarray, residual: np.ndarray) -> float:
    # Inputs the focal output does not use impose no constraint.
    active = focal > 0
    return float(np.min(residual[active] / focal[active]))


def leontief_eval(tech, inputs) -> float:
    """Fixed-proportions output: min over used inputs of quantity / requirement.

    ``tech`` must describe a single output (one row). Inputs with a zero
    requirement are ignored rather than producing 0/0.
    """
    req = as_requirements(tech)
    if req.shape[0] != 1:
        raise DimensionMismatch(
            f"leontief_eval expects a single-output technology, got {req.shape[0]} rows"
        )
    x = as_quantities(inputs)
    check_same_inputs(req, x)
    return _capacity_min(req[0], x)


def residual_leontief(tech, inputs, exogenous, clamp: ClampPolicy = ClampPolicy.RAW) -> float:
    """Focal-output capacity on inputs net of competing-output consumption.

    Residual input j is ``x[j] - sum_k requirements[k][j] * exogenous[k-1]``
    over competing outputs k = 1..K-1; the focal Leontief minimum is then
    taken over the residuals. Under RAW the result may be negative; under
    CLAMP_AT_ZERO it is floored at zero.
    """
    req = as_requirements(tech)
    x = as_quantities(inputs)
    check_same_inputs(req, x)
    y = as_exogenous(exogenous, req.shape[0])
    clamp = ClampPolicy.coerce(clamp)
    residual = x - y @ req[1:]
    value = _capacity_min(req[0], residual)
    if clamp is ClampPolicy.CLAMP_AT_ZERO:
        value = max(0.0, value)
    return value


def residual_capacity_batch(req: np.ndarray, x: np.ndarray, draws: np.ndarray,
                            clamp: ClampPolicy) -> np.ndarray:
    """Vectorized residual capacity for a (n, K-1) matrix of competing demand.

    Internal kernel shared by the Monte Carlo and quadrature engines; ``req``
    and ``x`` must already be validated.
    """
    residual = x[np.newaxis, :] - draws @ req[1:]
    active = req[0] > 0
    values = np.min(residual[:, active] / req[0][active], axis=1)
    if clamp is ClampPolicy.CLAMP_AT_ZERO:
        np.maximum(values, 0.0, out=values)
    return values
