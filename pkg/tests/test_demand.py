import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from prodtech import DemandModel, SampleStream, amh_cdf, amh_pdf, sample_amh_pair, sample_demand
from prodtech.demand import _amh_conditional_inverse
from prodtech.errors import ParamDomain, UnsupportedDimension

# Kolmogorov-Smirnov critical value at the 1% level: 1.62762 / sqrt(n).
KS_1PCT = 1.62762


def amh_tau_exact(theta):
    # Kendall's tau for this copula family:
    # (3t - 2) / (3t) - 2 (1-t)^2 ln(1-t) / (3 t^2)
    return (3 * theta - 2) / (3 * theta) - (
        2 * (1 - theta) ** 2 * np.log(1 - theta) / (3 * theta**2)
    )


# ---------------------------------------------------------------------------
# streams


def test_stream_is_reproducible():
    a = SampleStream(123).uniform_matrix(50, 3)
    b = SampleStream(123).uniform_matrix(50, 3)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, SampleStream(124).uniform_matrix(50, 3))


def test_stream_partition_invariance():
    whole = SampleStream(7).uniform_matrix(50, 3)
    head = SampleStream(7).uniform_matrix(20, 3)
    tail = SampleStream(7).offset(20).uniform_matrix(30, 3)
    assert np.array_equal(whole, np.vstack([head, tail]))


def test_stream_offset_composes():
    assert SampleStream(5, index=10).offset(7).index == 17
    assert SampleStream(5).offset(3).offset(4) == SampleStream(5, index=7)


def test_stream_draw_width_does_not_shift_samples():
    # Three draws per sample round up to the same counter block as four.
    wide = SampleStream(9).uniform_matrix(10, 4)
    narrow = SampleStream(9).uniform_matrix(10, 3)
    assert np.array_equal(wide[:, :3], narrow)


def test_stream_validation():
    with pytest.raises(ParamDomain):
        SampleStream(-1)
    with pytest.raises(ParamDomain):
        SampleStream(2**64)
    with pytest.raises(ParamDomain):
        SampleStream(3, index=-1)
    SampleStream(2**64 - 1)  # largest admissible seed
    with pytest.raises(ParamDomain):
        SampleStream(3).uniform_matrix(0, 2)


def test_stream_values_are_unit_uniform():
    mat = SampleStream(42).uniform_matrix(100_000, 1)
    assert mat.min() >= 0.0 and mat.max() < 1.0
    assert abs(mat.mean() - 0.5) < 0.01


# ---------------------------------------------------------------------------
# copula functions


class TestAmhCdf:
    def test_margin_condition(self):
        assert amh_cdf(0.5, 1.0, 0.7) == 0.7

    def test_grounded_boundary(self):
        for theta in (-1.0, -0.3, 0.0, 0.5, 0.9):
            for v in (0.0, 0.3, 1.0):
                assert amh_cdf(theta, 0.0, v) == 0.0

    def test_direct_substitution(self):
        assert amh_cdf(-1.0, 0.5, 0.5) == 0.2  # 0.25 / (1 + 0.25)

    def test_boundary_axioms_vectorized(self):
        rng = np.random.default_rng(21)
        u = rng.uniform(size=500)
        zeros, ones = np.zeros_like(u), np.ones_like(u)
        for theta in (-0.9, 0.0, 0.7):
            assert np.all(amh_cdf(theta, u, zeros) == 0.0)
            assert np.all(amh_cdf(theta, zeros, u) == 0.0)
            assert_allclose(amh_cdf(theta, u, ones), u, rtol=0, atol=0)
            assert_allclose(amh_cdf(theta, ones, u), u, rtol=0, atol=0)

    def test_two_increasing(self):
        rng = np.random.default_rng(22)
        for theta in (-0.9, 0.0, 0.5, 0.9):
            u = np.sort(rng.uniform(size=(2000, 2)), axis=1)
            v = np.sort(rng.uniform(size=(2000, 2)), axis=1)
            volume = (
                amh_cdf(theta, u[:, 1], v[:, 1])
                - amh_cdf(theta, u[:, 1], v[:, 0])
                - amh_cdf(theta, u[:, 0], v[:, 1])
                + amh_cdf(theta, u[:, 0], v[:, 0])
            )
            assert volume.min() >= -1e-15

    def test_domain_checks(self):
        with pytest.raises(ParamDomain):
            amh_cdf(1.0, 0.5, 0.5)  # theta = 1 excluded
        with pytest.raises(ParamDomain):
            amh_cdf(0.5, 1.5, 0.5)
        with pytest.raises(ParamDomain):
            amh_cdf(0.5, 0.5, -0.1)


class TestAmhPdf:
    def test_independence_density_is_one(self):
        rng = np.random.default_rng(23)
        u, v = rng.uniform(size=(2, 100))
        assert np.all(amh_pdf(0.0, u, v) == 1.0)

    def test_matches_numeric_mixed_partial(self):
        rng = np.random.default_rng(24)
        h = 1e-5
        for theta in (-0.9, -0.2, 0.4, 0.9):
            u = rng.uniform(0.05, 0.95, 50)
            v = rng.uniform(0.05, 0.95, 50)
            numeric = (
                amh_cdf(theta, u + h, v + h)
                - amh_cdf(theta, u + h, v - h)
                - amh_cdf(theta, u - h, v + h)
                + amh_cdf(theta, u - h, v - h)
            ) / (4 * h * h)
            assert_allclose(amh_pdf(theta, u, v), numeric, rtol=1e-4)

    def test_integrates_to_one(self):
        nodes, weights = np.polynomial.legendre.leggauss(64)
        x = 0.5 * (nodes + 1.0)
        w = 0.5 * weights
        u, v = np.meshgrid(x, x, indexing="ij")
        for theta in (-0.9, 0.7):
            total = float(w @ amh_pdf(theta, u, v) @ w)
            assert_allclose(total, 1.0, atol=1e-10)


def test_conditional_inverse_roundtrip():
    rng = np.random.default_rng(25)
    for theta in (-0.999, -0.5, 0.3, 0.95):
        u = rng.uniform(0.01, 0.99, 200)
        v = rng.uniform(0.01, 0.99, 200)
        denom = 1.0 - theta * (1.0 - u) * (1.0 - v)
        p = v * (1.0 - theta * (1.0 - v)) / denom**2  # conditional CDF given u
        recovered = _amh_conditional_inverse(theta, u, p)
        assert_allclose(recovered, v, atol=1e-9)


def test_sample_amh_pair_theta_zero_degenerates_to_raw_uniforms():
    stream = SampleStream(123, index=7)
    raw = stream.uniform_matrix(1, 2)
    u, v = sample_amh_pair(0.0, stream)
    assert u == raw[0, 0]
    assert v == raw[0, 1]


def test_sample_amh_pair_empirical_joint_cdf():
    draws = np.array([sample_amh_pair(0.8, SampleStream(31, index=i))
                      for i in range(20_000)])
    empirical = np.mean((draws[:, 0] <= 0.5) & (draws[:, 1] <= 0.5))
    assert abs(empirical - amh_cdf(0.8, 0.5, 0.5)) < 0.01


# ---------------------------------------------------------------------------
# demand sampling


def test_sample_demand_uniform_mean():
    draws = sample_demand(DemandModel(count=1), SampleStream(40), 100_000)
    assert draws.shape == (100_000, 1)
    assert abs(draws.mean() - 0.5) < 0.01


def test_sample_demand_theta_zero_correlation_near_zero():
    draws = sample_demand(DemandModel(count=2, theta=0.0), SampleStream(41), 100_000)
    corr = np.corrcoef(draws[:, 0], draws[:, 1])[0, 1]
    assert abs(corr) < 0.02


def test_sample_demand_theta_zero_equals_independent_bitwise():
    amh = sample_demand(DemandModel(count=2, theta=0.0), SampleStream(42), 5_000)
    ind = sample_demand(DemandModel(count=2), SampleStream(42), 5_000)
    assert np.array_equal(amh, ind)


def test_sample_demand_marginals_pass_ks():
    n = 100_000
    crit = KS_1PCT / np.sqrt(n)
    for theta in (-0.9, 0.8):
        draws = sample_demand(DemandModel(count=2, theta=theta), SampleStream(43), n)
        for column in draws.T:
            assert stats.kstest(column, "uniform").statistic < crit


def test_sample_demand_kendall_tau_matches_exact_value():
    # Frozen reference values of amh_tau_exact at the three thetas below:
    # -0.16633129965625115, 0.12876478703996355, 0.27821057689707035.
    for theta in (-0.9, 0.5, 0.9):
        draws = sample_demand(DemandModel(count=2, theta=theta),
                              SampleStream(44), 300_000)
        tau = stats.kendalltau(draws[:, 0], draws[:, 1]).statistic
        assert abs(tau - amh_tau_exact(theta)) < 0.01


def test_frozen_tau_references():
    assert_allclose(amh_tau_exact(-0.9), -0.16633129965625115, rtol=1e-14)
    assert_allclose(amh_tau_exact(0.5), 0.12876478703996355, rtol=1e-14)
    assert_allclose(amh_tau_exact(0.9), 0.27821057689707035, rtol=1e-14)


def test_sample_demand_partition_invariance():
    model = DemandModel(count=2, theta=0.6)
    whole = sample_demand(model, SampleStream(45), 1_000)
    head = sample_demand(model, SampleStream(45), 400)
    tail = sample_demand(model, SampleStream(45, index=400), 600)
    assert np.array_equal(whole, np.vstack([head, tail]))


def test_sample_demand_bounds_mapping():
    model = DemandModel(count=2, bounds=((1.0, 3.0), (5.0, 5.0)))
    draws = sample_demand(model, SampleStream(46), 10_000)
    assert draws[:, 0].min() >= 1.0 and draws[:, 0].max() <= 3.0
    assert abs(draws[:, 0].mean() - 2.0) < 0.05
    assert np.all(draws[:, 1] == 5.0)  # degenerate interval is a point mass


def test_sample_demand_rejects_non_model():
    with pytest.raises(ParamDomain):
        sample_demand({"count": 1}, SampleStream(0), 10)


class TestDemandModel:
    def test_defaults(self):
        model = DemandModel(count=3)
        assert model.dependence == "independent"
        assert model.draws_per_sample == 3
        assert model.bounds == ((0.0, 1.0),) * 3

    def test_amh_pair(self):
        model = DemandModel(count=2, theta=-0.5)
        assert model.dependence == "amh"
        assert model.draws_per_sample == 2

    def test_theta_requires_two_outputs(self):
        with pytest.raises(UnsupportedDimension):
            DemandModel(count=3, theta=0.5)
        with pytest.raises(UnsupportedDimension):
            DemandModel(count=1, theta=0.5)

    def test_theta_domain(self):
        DemandModel(count=2, theta=-1.0)  # closed lower endpoint
        with pytest.raises(ParamDomain):
            DemandModel(count=2, theta=1.0)
        with pytest.raises(ParamDomain):
            DemandModel(count=2, theta=float("nan"))

    def test_bounds_validation(self):
        with pytest.raises(ParamDomain):
            DemandModel(count=1, bounds=(2.0, 1.0))
        with pytest.raises(ParamDomain):
            DemandModel(count=2, bounds=((0.0, 1.0),) * 3)
        with pytest.raises(ParamDomain):
            DemandModel(count=1, bounds=(0.0, float("inf")))

    def test_single_pair_broadcasts(self):
        model = DemandModel(count=2, bounds=(0.5, 1.5))
        assert model.bounds == ((0.5, 1.5), (0.5, 1.5))

    def test_count_validation(self):
        with pytest.raises(ParamDomain):
            DemandModel(count=0)
