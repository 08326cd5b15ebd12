"""Estimator-style wrappers around the production technologies.

Each surface follows the scikit-learn parameter convention: constructor
arguments are stored verbatim, ``fit`` resolves and validates them into
trailing-underscore attributes, and ``predict`` maps an ``(n, M)`` array of
input bundles to ``(n,)`` outputs. ``fit`` takes no training data — these are
parametric surfaces, not fitted models — so ``predict`` lazily fits when
needed and every surface is also callable on a single bundle:

>>> LeontiefSurface(requirements=(1.0, 2.0))(10.0, 10.0)
5.0
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .demand import DemandModel
from .errors import NonPositiveInput, ParamDomain, UnsupportedDimension
from .expectation import (
    expected_output_closed_form,
    expected_output_mc,
    expected_output_quadrature,
)
from .technology import CesParams, ClampPolicy
from .validation import as_exogenous, as_requirements, check_points_matrix

__all__ = [
    "LeontiefSurface",
    "CesSurface",
    "ResidualLeontiefSurface",
    "ExpectedOutputSurface",
]


class _SurfaceBase(BaseEstimator):
    """Shared lazy-fit plumbing; subclasses implement _resolve and _evaluate."""

    def fit(self, X=None, y=None):
        """Resolve constructor parameters; X and y are accepted and ignored."""
        self._resolve()
        return self

    def _check_ready(self):
        if not hasattr(self, "n_inputs_"):
            self.fit()

    def predict(self, X) -> np.ndarray:
        self._check_ready()
        X = check_points_matrix(X, self.n_inputs_)
        return self._evaluate(X)

    def __call__(self, *coords) -> float:
        return float(self.predict(np.asarray(coords, dtype=float).reshape(1, -1))[0])


class LeontiefSurface(_SurfaceBase):
    """Single-output fixed-proportions technology.

    Parameters
    ----------
    requirements : array-like of shape (M,)
        Units of each input consumed per unit of output.
    """

    def __init__(self, requirements=(1.0, 1.0)):
        self.requirements = requirements

    def _resolve(self):
        matrix = as_requirements(self.requirements)
        if matrix.shape[0] != 1:
            raise UnsupportedDimension(
                "LeontiefSurface takes a single requirement row; "
                "use ResidualLeontiefSurface for competing outputs"
            )
        self.matrix_ = matrix
        self.n_inputs_ = matrix.shape[1]

    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        a = self.matrix_[0]
        active = a > 0
        return np.min(X[:, active] / a[active], axis=1)


class CesSurface(_SurfaceBase):
    """Two-input CES technology.

    Parameters mirror :class:`~prodtech.technology.CesParams`: ``tfp`` scales
    output, ``share`` weights the first input, ``rho`` controls substitution
    and ``scale`` is the returns-to-scale exponent.
    """

    def __init__(self, tfp=1.0, share=0.5, rho=-1.0, scale=1.0):
        self.tfp = tfp
        self.share = share
        self.rho = rho
        self.scale = scale

    def _resolve(self):
        self.params_ = CesParams(tfp=self.tfp, share=self.share,
                                 rho=self.rho, scale=self.scale)
        self.n_inputs_ = 2

    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        p = self.params_
        if p.rho < 0 and np.any(X == 0):
            raise NonPositiveInput("inputs must be strictly positive when rho < 0")
        inner = p.share * X[:, 0] ** p.rho + (1.0 - p.share) * X[:, 1] ** p.rho
        return p.tfp * inner ** (p.scale / p.rho)


class ResidualLeontiefSurface(_SurfaceBase):
    """Focal-output capacity at a fixed level of competing demand.

    Parameters
    ----------
    requirements : array-like of shape (K, M)
        Row 0 is the focal output; rows 1..K-1 the competing outputs.
    exogenous : array-like of shape (K - 1,)
        Fixed competing-output quantities whose input use is subtracted.
    clamp : {"raw", "clamp_at_zero"} or ClampPolicy
    """

    def __init__(self, requirements=((1.0, 1.0), (1.0, 1.0)), exogenous=(0.0,),
                 clamp="raw"):
        self.requirements = requirements
        self.exogenous = exogenous
        self.clamp = clamp

    def _resolve(self):
        self.matrix_ = as_requirements(self.requirements)
        self.exogenous_ = as_exogenous(self.exogenous, self.matrix_.shape[0])
        self.clamp_ = ClampPolicy.coerce(self.clamp)
        self.n_inputs_ = self.matrix_.shape[1]

    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        residual = X - self.exogenous_ @ self.matrix_[1:]
        a = self.matrix_[0]
        active = a > 0
        values = np.min(residual[:, active] / a[active], axis=1)
        if self.clamp_ is ClampPolicy.CLAMP_AT_ZERO:
            np.maximum(values, 0.0, out=values)
        return values


class ExpectedOutputSurface(_SurfaceBase):
    """Expected focal output over random competing demand, as a surface.

    Parameters
    ----------
    requirements : array-like of shape (K, M)
    model : DemandModel or None
        Distribution of the K-1 competing outputs; None means independent
        Uniform[0, 1] marginals.
    method : {"closed_form", "quadrature", "monte_carlo"}
    clamp : {"raw", "clamp_at_zero"} or ClampPolicy
    n, seed, workers : Monte Carlo controls; ignored by the other methods.
    nodes : quadrature node count per panel; ignored by the other methods.
    """

    _METHODS = ("closed_form", "quadrature", "monte_carlo")

    def __init__(self, requirements=((1.0, 1.0), (1.0, 1.0)), model=None,
                 method="closed_form", clamp="raw", n=100_000, nodes=64,
                 seed=0, workers=1):
        self.requirements = requirements
        self.model = model
        self.method = method
        self.clamp = clamp
        self.n = n
        self.nodes = nodes
        self.seed = seed
        self.workers = workers

    def _resolve(self):
        self.matrix_ = as_requirements(self.requirements)
        if self.matrix_.shape[0] < 2:
            raise ParamDomain("expected-output surfaces need at least one competing output")
        if self.model is None:
            self.model_ = DemandModel(count=self.matrix_.shape[0] - 1)
        elif isinstance(self.model, DemandModel):
            self.model_ = self.model
        else:
            raise ParamDomain("model must be a DemandModel or None")
        if self.method not in self._METHODS:
            raise ParamDomain(f"method must be one of {self._METHODS}, got {self.method!r}")
        self.clamp_ = ClampPolicy.coerce(self.clamp)
        self.n_inputs_ = self.matrix_.shape[1]

    def estimate(self, inputs):
        """Full :class:`ExpectationEstimate` (value plus sampling metadata)."""
        self._check_ready()
        if self.method == "closed_form":
            return expected_output_closed_form(self.matrix_, inputs, clamp=self.clamp_,
                                               model=self.model_)
        if self.method == "quadrature":
            return expected_output_quadrature(self.matrix_, inputs, self.model_,
                                              clamp=self.clamp_, nodes=self.nodes)
        # One shared stream across grid points: common random numbers keep the
        # sampled surface smooth and the run reproducible for a given seed.
        return expected_output_mc(self.matrix_, inputs, self.model_, clamp=self.clamp_,
                                  n=self.n, seed=self.seed, workers=self.workers)

    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.estimate(row).value for row in X])
