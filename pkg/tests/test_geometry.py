import numpy as np
import pytest
from numpy.testing import assert_allclose

from prodtech import (
    CesSurface,
    DemandModel,
    ExpectedOutputSurface,
    IsoquantTrace,
    LeontiefSurface,
    ResidualLeontiefSurface,
    RtsClass,
    RtsLabel,
    ScaleProfile,
    TraceMethod,
    classify_rts,
    leontief_eval,
    scale_profile,
    trace_isoquant_analytic,
    trace_isoquant_grid,
    trace_isoquant_rayscan,
)
from prodtech.errors import (
    DimensionMismatch,
    EmptyLevelSet,
    LevelNotBracketed,
    NonMonotoneRay,
    ParamDomain,
)


# ---------------------------------------------------------------------------
# analytic traces


def test_analytic_trace_is_the_l_shape():
    trace = trace_isoquant_analytic([[1.0, 2.0]], 3.0, extent=10.0)
    assert np.array_equal(trace.points,
                          [[3.0, 10.0], [3.0, 6.0], [10.0, 6.0]])
    assert trace.method is TraceMethod.ANALYTIC_KINK
    assert trace.level == 3.0
    assert len(trace) == 3


def test_analytic_trace_default_extent():
    # Default extent is twice the larger kink coordinate.
    trace = trace_isoquant_analytic([[1.0, 1.0]], 1.0)
    assert np.array_equal(trace.points, [[1.0, 2.0], [1.0, 1.0], [2.0, 1.0]])


def test_analytic_kink_lies_on_the_level_set():
    trace = trace_isoquant_analytic([[2.0, 5.0]], 2.0, extent=20.0)
    kink = trace.points[1]
    assert np.array_equal(kink, [4.0, 10.0])
    assert leontief_eval([[2.0, 5.0]], kink) == 2.0


def test_analytic_trace_validation():
    with pytest.raises(ParamDomain):
        trace_isoquant_analytic([[1.0, 2.0]], 0.0)
    with pytest.raises(ParamDomain):
        trace_isoquant_analytic([[0.0, 2.0]], 1.0)  # needs both inputs
    with pytest.raises(ParamDomain):
        trace_isoquant_analytic([[1.0, 2.0]], 3.0, extent=4.0)  # inside kink
    with pytest.raises(DimensionMismatch):
        trace_isoquant_analytic([[1.0, 2.0, 3.0]], 1.0)


# ---------------------------------------------------------------------------
# rayscan traces


def test_rayscan_recovers_the_leontief_kink():
    surface = LeontiefSurface(requirements=(1.0, 1.0)).fit()
    trace = trace_isoquant_rayscan(surface, 1.0, angles=3)
    assert trace.method is TraceMethod.RAY_ROOT_FIND
    # middle ray is the diagonal, which pierces the kink
    assert_allclose(trace.points[1], [1.0, 1.0], atol=1e-8)


def test_rayscan_on_expected_output_surface():
    surface = ExpectedOutputSurface(requirements=[[1.0, 1.0], [1.0, 1.0]],
                                    method="closed_form")
    trace = trace_isoquant_rayscan(surface, 0.5, angles=3)
    # E[min(w, c) - y] = 0.5 at w = c = 1 under unit-uniform demand
    assert_allclose(trace.points[1], [1.0, 1.0], atol=1e-8)


def test_rayscan_points_sweep_toward_the_w_axis():
    surface = ExpectedOutputSurface(requirements=[[1.0, 1.0], [1.0, 1.0]],
                                    method="closed_form")
    trace = trace_isoquant_rayscan(surface, 0.5, angles=16)
    angles = np.arctan2(trace.points[:, 1], trace.points[:, 0])
    assert np.all(np.diff(angles) < 0)
    # first ray is nearly vertical, so the level is pinned by w alone
    assert_allclose(trace.points[0][0], 1.0, atol=1e-3)


def test_rayscan_skips_rays_that_never_reach_the_level():
    # With the bracket capped at 2, near-axis rays top out below the level.
    surface = LeontiefSurface(requirements=(1.0, 1.0)).fit()
    trace = trace_isoquant_rayscan(surface, 1.0, angles=8, bracket=(1e-9, 2.0))
    assert len(trace) + len(trace.skipped_angles) == 8
    assert len(trace.skipped_angles) > 0
    for point in trace.points:
        assert abs(min(point) - 1.0) <= 1e-8


def test_rayscan_raises_when_no_ray_brackets():
    surface = LeontiefSurface(requirements=(1.0, 1.0)).fit()
    with pytest.raises(LevelNotBracketed):
        trace_isoquant_rayscan(surface, 5.0, bracket=(1e-9, 1.0))


def test_rayscan_rejects_decreasing_rays():
    with pytest.raises(NonMonotoneRay):
        trace_isoquant_rayscan(lambda w, c: 2.0 / (w + c + 1e-12), 1.0,
                               angles=4, bracket=(0.1, 10.0))


def test_rayscan_validation():
    surface = LeontiefSurface().fit()
    with pytest.raises(ParamDomain):
        trace_isoquant_rayscan(surface, 1.0, angles=2)
    with pytest.raises(ParamDomain):
        trace_isoquant_rayscan(surface, 1.0, bracket=(1.0, 1.0))
    with pytest.raises(ParamDomain):
        trace_isoquant_rayscan(surface, 1.0, bracket=(-1.0, 2.0))


# ---------------------------------------------------------------------------
# grid traces


def test_grid_trace_stays_on_level_and_in_order():
    surface = LeontiefSurface(requirements=(1.0, 1.0)).fit()
    trace = trace_isoquant_grid(surface, 1.0, ((0.0, 2.0), (0.0, 2.0), 64))
    assert trace.method is TraceMethod.GRID_CONTOUR
    values = np.minimum(trace.points[:, 0], trace.points[:, 1])
    assert np.max(np.abs(values - 1.0)) <= 1e-8
    angles = np.arctan2(trace.points[:, 1], trace.points[:, 0])
    assert np.all(np.diff(angles) <= 1e-9)


def test_grid_trace_handles_smooth_surfaces():
    # window starts off-axis: complementary inputs are undefined at zero
    surface = CesSurface(tfp=1.0, share=0.5, rho=-1.0, scale=1.0).fit()
    trace = trace_isoquant_grid(surface, 0.8, ((0.1, 4.0), (0.1, 4.0), 48))
    on_level = np.array([surface(w, c) for w, c in trace.points])
    assert np.max(np.abs(on_level - 0.8)) <= 1e-8


def test_grid_trace_empty_level_set():
    with pytest.raises(EmptyLevelSet, match="no grid cell brackets"):
        trace_isoquant_grid(lambda w, c: 1.0, 5.0, ((0.0, 2.0), (0.0, 2.0), 16))


def test_grid_trace_validation():
    surface = LeontiefSurface().fit()
    with pytest.raises(ParamDomain):
        trace_isoquant_grid(surface, 1.0, ((0.0, 2.0), (0.0, 2.0), 7))
    with pytest.raises(ParamDomain):
        trace_isoquant_grid(surface, 1.0, ((-0.5, 2.0), (0.0, 2.0), 16))
    with pytest.raises(ParamDomain):
        trace_isoquant_grid(surface, 1.0, ((2.0, 2.0), (0.0, 2.0), 16))


def test_grid_and_rayscan_agree(polyline_hausdorff):
    # rho = 2 gives a circular-arc level set that fits inside the window, so
    # neither tracer is truncated and the two polylines should coincide.
    surface = CesSurface(tfp=1.0, share=0.5, rho=2.0, scale=1.0).fit()
    grid = trace_isoquant_grid(surface, 1.0, ((0.0, 4.0), (0.0, 4.0), 64))
    rays = trace_isoquant_rayscan(surface, 1.0, angles=64)
    distance = polyline_hausdorff(grid.points, rays.points)
    assert distance <= 4.0 / 63  # within one grid cell


def test_demand_dependence_shifts_the_expected_isoquant():
    tech = [[1.0, 1.0], [0.6, 0.3], [0.3, 0.6]]
    grid = ((0.0, 2.0), (0.0, 2.0), 12)
    surf_pos = ExpectedOutputSurface(requirements=tech,
                                     model=DemandModel(count=2, theta=0.9),
                                     method="quadrature", nodes=12)
    surf_ind = ExpectedOutputSurface(requirements=tech,
                                     model=DemandModel(count=2, theta=0.0),
                                     method="quadrature", nodes=12)
    trace_pos = trace_isoquant_grid(surf_pos, 0.4, grid)
    trace_ind = trace_isoquant_grid(surf_ind, 0.4, grid)
    for surf, trace in ((surf_pos, trace_pos), (surf_ind, trace_ind)):
        own = np.array([surf(w, c) for w, c in trace.points])
        assert np.max(np.abs(own - 0.4)) <= 1e-6
    crossed = np.array([surf_ind(w, c) for w, c in trace_pos.points])
    assert np.max(np.abs(crossed - 0.4)) > 1e-4


# ---------------------------------------------------------------------------
# scale profiles and RTS


def test_scale_profile_constant_returns():
    surface = LeontiefSurface(requirements=(1.0, 2.0)).fit()
    profile = scale_profile(surface, (2.0, 2.0), [0.5, 1.0, 2.0])
    assert_allclose(profile.elasticities, 1.0, atol=1e-9)
    assert classify_rts(profile).classification is RtsLabel.CONSTANT


def test_scale_profile_decreasing_returns():
    surface = CesSurface(tfp=1.0, share=0.5, rho=-1.0, scale=0.7).fit()
    profile = scale_profile(surface, (1.0, 3.0), np.linspace(0.5, 2.0, 7))
    assert_allclose(profile.elasticities, 0.7, atol=1e-6)
    result = classify_rts(profile)
    assert result.classification is RtsLabel.DECREASING
    assert result.tolerance == 1e-6


def test_scale_profile_increasing_returns_from_fixed_demand():
    surface = ResidualLeontiefSurface(requirements=[[1.0, 1.0], [0.6, 0.3]],
                                      exogenous=(0.5,))
    profile = scale_profile(surface, (1.0, 1.0), np.linspace(1.0, 2.0, 5))
    assert np.all(profile.elasticities > 1.0)
    assert classify_rts(profile).classification is RtsLabel.INCREASING


def test_classification_tolerance_is_respected():
    surface = LeontiefSurface(requirements=(1.0, 1.0)).fit()
    profile = scale_profile(surface, (1.0, 1.0), [0.5, 1.0, 2.0])
    assert classify_rts(profile, tolerance=1e-8).classification is RtsLabel.CONSTANT


def test_mixed_profile():
    profile = ScaleProfile(direction=None, t_values=np.array([1.0, 2.0, 4.0]),
                           outputs=np.array([1.0, 3.0, 4.0]))
    assert_allclose(profile.elasticities,
                    [np.log2(3.0), 1.0, np.log(4 / 3) / np.log(2)], rtol=1e-12)
    assert classify_rts(profile).classification is RtsLabel.MIXED


def test_elasticity_gaps_at_zero_output():
    profile = ScaleProfile(direction=None,
                           t_values=np.array([1.0, 2.0, 4.0, 8.0]),
                           outputs=np.array([0.0, 0.5, 1.5, 2.0]))
    assert np.isnan(profile.elasticities[0])
    assert np.isnan(profile.elasticities[1])  # centered stencil touches zero
    assert_allclose(profile.elasticities[2], np.log(4.0) / np.log(4.0), rtol=1e-12)
    assert classify_rts(profile).classification is RtsLabel.MIXED


def test_all_gaps_classify_as_mixed():
    profile = ScaleProfile(direction=None, t_values=np.array([1.0, 2.0, 4.0]),
                           outputs=np.array([-1.0, -0.5, 0.0]))
    assert np.all(np.isnan(profile.elasticities))
    assert classify_rts(profile).classification is RtsLabel.MIXED


def test_scale_profile_auto_elasticities_exact_ray():
    profile = ScaleProfile(direction=None, t_values=np.array([1.0, 2.0, 4.0]),
                           outputs=np.array([2.0, 4.0, 8.0]))
    assert_allclose(profile.elasticities, 1.0, rtol=1e-12)


def test_scale_profile_validation():
    surface = LeontiefSurface().fit()
    with pytest.raises(ParamDomain):
        scale_profile(surface, (1.0, 1.0), [1.0])  # needs >= 2 points
    with pytest.raises(ParamDomain):
        scale_profile(surface, (1.0, 1.0), [2.0, 1.0])  # not increasing
    with pytest.raises(ParamDomain):
        scale_profile(surface, (1.0, 1.0), [0.0, 1.0])  # t must be positive
    with pytest.raises(ParamDomain):
        classify_rts(scale_profile(surface, (1.0, 1.0), [1.0, 2.0]))  # < 3 points
    with pytest.raises(ParamDomain):
        scale_profile(object(), (1.0, 1.0), [1.0, 2.0])  # not surface-like


# ---------------------------------------------------------------------------
# containers


class TestIsoquantTrace:
    def test_validation(self):
        with pytest.raises(DimensionMismatch):
            IsoquantTrace(1.0, np.empty((0, 2)), TraceMethod.GRID_CONTOUR)
        with pytest.raises(DimensionMismatch):
            IsoquantTrace(1.0, np.ones((3, 3)), TraceMethod.GRID_CONTOUR)
        with pytest.raises(ParamDomain):
            IsoquantTrace(1.0, np.array([[1.0, np.inf]]), TraceMethod.GRID_CONTOUR)

    def test_points_are_read_only(self):
        trace = trace_isoquant_analytic([[1.0, 1.0]], 1.0)
        with pytest.raises(ValueError):
            trace.points[0, 0] = 99.0

    def test_method_accepts_strings(self):
        trace = IsoquantTrace(1.0, np.array([[1.0, 1.0]]), "grid_contour")
        assert trace.method is TraceMethod.GRID_CONTOUR


def test_callable_adapter_accepts_predict_only_objects():
    class Predicting:
        def predict(self, X):
            X = np.asarray(X, dtype=float)
            return X.min(axis=1)

    profile = scale_profile(Predicting(), (1.0, 2.0), [1.0, 2.0, 4.0])
    assert_allclose(profile.outputs, [1.0, 2.0, 4.0], rtol=1e-15)


def test_rts_class_repr_fields():
    result = RtsClass(classification=RtsLabel.CONSTANT, tolerance=1e-6)
    assert result.classification.value == "constant"
