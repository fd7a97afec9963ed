import math

import numpy as np
import pytest

from cvqp import (
    ConfigurationError,
    CoverageError,
    GaussianMixture,
    InvalidWeightError,
    PerceptronConfig,
    Polarity,
    ProductGaussianState,
    affine_readout,
    prob_error,
    symmetric_superposition,
    xor_homodyne_mixture,
)
from cvqp.oracle import (
    GridSpec,
    build_wavefunction,
    chain_convolution_density,
    convolution_identity_check,
    oracle_readout_distribution,
)
from cvqp.verify import verify

E = math.e
SMALL = GridSpec(12.0, 1024)


def test_grid_contains_origin():
    spec = GridSpec()
    assert 0.0 in spec.axis
    assert spec.step == pytest.approx(24.0 / 2048)


@pytest.mark.parametrize("points", [63, 10.5])
def test_grid_rejects_few_points(points):
    with pytest.raises(ConfigurationError):
        GridSpec(12.0, points)


def test_vacuum_peak():
    psi = build_wavefunction(ProductGaussianState.encode((0.0, 0.0), 1.0), GridSpec())
    i = int(np.argmin(np.abs(psi.spec.axis)))
    assert psi.amplitudes[i, i] == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-9)


def test_product_grid_norm():
    psi = build_wavefunction(ProductGaussianState.encode((1.0, -1.0), 1.0), GridSpec())
    assert abs(psi.raw_norm - 1.0) <= 1e-9
    assert abs(psi.norm - 1.0) <= 1e-9


def test_superposition_norm_uses_analytic_constant():
    psi = build_wavefunction(symmetric_superposition(1.0, -1.0, 1 / E), GridSpec())
    assert abs(psi.raw_norm - 1.0) <= 1e-9


def test_coverage_error():
    with pytest.raises(CoverageError):
        build_wavefunction(ProductGaussianState.encode((11.0, 0.0), 1.0), GridSpec())


def test_grid_needs_two_modes():
    with pytest.raises(ConfigurationError):
        build_wavefunction(ProductGaussianState.encode((0.0, 0.0, 0.0), 1.0), SMALL)


def test_and_row_moments():
    psi = build_wavefunction(ProductGaussianState.encode((-1.0, -1.0), 1.0), GridSpec())
    hist = oracle_readout_distribution(psi, (1.0, 1.0), -1.0)
    assert abs(hist.total - 1.0) <= 1e-9
    assert hist.mean() == pytest.approx(-3.0, abs=1e-9)
    assert hist.variance() == pytest.approx(1.0, abs=1e-6)


def test_rejects_bad_weight_and_bins():
    psi = build_wavefunction(ProductGaussianState.encode((0.0, 0.0), 1.0), SMALL)
    with pytest.raises(InvalidWeightError):
        oracle_readout_distribution(psi, (1.0, 1.5), 0.0)
    with pytest.raises(ConfigurationError):
        oracle_readout_distribution(psi, (1.0, 1.0), 0.0, bins=64)


def test_sharp_superposition_splits():
    state = symmetric_superposition(1.0, -1.0, 0.05)
    psi = build_wavefunction(state, GridSpec(4.0, 2048))
    hist = oracle_readout_distribution(psi, (1.0, -1.0), -1.0, bins=1024)
    c = hist.centers
    near_plus = hist.mass[np.abs(c - 1.0) < 0.5].sum()
    near_minus = hist.mass[np.abs(c + 3.0) < 0.5].sum()
    assert near_plus == pytest.approx(0.5, abs=1e-6)
    assert near_minus == pytest.approx(0.5, abs=1e-6)


def test_product_density_agrees():
    state = ProductGaussianState.encode((0.7, -1.2), (0.8, 0.45))
    config = PerceptronConfig((0.6, -0.9), 0.25)
    dist = GaussianMixture.from_mode(affine_readout(state, config))
    hist = oracle_readout_distribution(build_wavefunction(state, GridSpec()), config.etas, config.bias)
    assert hist.max_deviation(dist) <= 1e-6
    assert abs(hist.mass_at_or_below(0.0) - prob_error(dist, Polarity.POSITIVE)) <= 1e-5


def test_superposition_density_agrees():
    state = symmetric_superposition(1.3, -0.4, 0.5, 0.9)
    dist = xor_homodyne_mixture(state, -0.6)
    hist = oracle_readout_distribution(build_wavefunction(state, GridSpec()), (1.0, -1.0), -0.6)
    assert hist.max_deviation(dist) <= 1e-6


def test_parallel_rows_match_serial():
    psi = build_wavefunction(symmetric_superposition(0.5, -1.0, 0.7), SMALL)
    a = oracle_readout_distribution(psi, (0.8, -0.6), 0.1, workers=1)
    b = oracle_readout_distribution(psi, (0.8, -0.6), 0.1, workers=4)
    assert a.mass.tobytes() == b.mass.tobytes()


def test_convolution_identity_cases():
    assert convolution_identity_check(0.0, 1.0, 0.0, 1.0, 0.0) <= 1e-8
    rng = np.random.default_rng(0)
    for _ in range(10):
        a, c, z = rng.uniform(-2, 2, 3)
        b, d = rng.uniform(0.1, 2.0, 2)
        assert convolution_identity_check(a, b, c, d, z) <= 1e-8


def test_convolution_widths_add():
    # with b = d the closed form is a Gaussian in y with exponent denominator 2b, i.e. sqrt(2) times the width
    y = np.linspace(-5, 5, 101)
    assert convolution_identity_check(0.0, 0.5, 0.0, 0.5, 0.0, y) <= 1e-8


def test_convolution_rejects_nonpositive():
    with pytest.raises(ConfigurationError):
        convolution_identity_check(0.0, 0.0, 0.0, 1.0, 0.0)


def test_chain_convolution_single_mode():
    state = ProductGaussianState.encode((0.4,), 0.6)
    config = PerceptronConfig((-0.7,), 0.2)
    y, dens = chain_convolution_density(state, config)
    expected = GaussianMixture.from_mode(affine_readout(state, config)).pdf(y)
    assert np.max(np.abs(dens - expected)) <= 1e-6


@pytest.mark.slow
def test_verify_defaults_small():
    report = verify(n_product=3, n_superposition=3, n_convolution=5, seed=1)
    assert report.passed
    assert {c.kind for c in report.cases} == {"product", "superposition", "convolution"}


def test_coarse_grid_fails():
    report = verify(GridSpec(12.0, 64), bins=1024, n_product=2, n_superposition=1, n_convolution=0)
    assert not report.passed
    assert report.failures
