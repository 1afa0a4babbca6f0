import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slmspec.correlation import (
    CorrelationTrace,
    ScanGrid,
    closed_form_log,
    closed_form_trace,
    correlation_trace,
    default_trace,
    fringe_metrics,
    log_correlation,
    log_prefactor,
    pair_product,
)
from slmspec.eraser import make_slm, measure_erasers
from slmspec.errors import AliasingError, ConfigError, NoFringesError
from slmspec.optics import ApparatusConfig


def brute_product(n, phi):
    return math.prod(math.sin(phi - math.pi * j / n) ** 2 for j in range(n))


# product identity prod_j sin^2(phi - pi j/N) = sin^2(N phi)/4^(N-1), checked by brute force
@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("phi", [0.1, 0.37, 1.0, 2.2, -0.8])
def test_product_identity_brute_force(n, phi):
    assert brute_product(n, phi) == pytest.approx(math.sin(n * phi) ** 2 / 4 ** (n - 1), rel=1e-12)


def test_pair_product_values():
    cfg = ApparatusConfig(1.2, mzi_phase=0.0, pixel_count=1)
    assert pair_product(measure_erasers(cfg, make_slm(1))[0]) == 0
    cfg = ApparatusConfig(1.2, mzi_phase=math.pi / 2, pixel_count=1)
    assert pair_product(measure_erasers(cfg, make_slm(1))[0]) == pytest.approx(1.2**4 / 4)
    cfg = ApparatusConfig(1.0, mzi_phase=math.pi / 4, pixel_count=2)
    rec = measure_erasers(cfg, make_slm(2))[0]
    # (1/4)(1 - cos pi/4) * (1/4)(1 + cos pi/4)
    c = math.cos(math.pi / 4)
    assert pair_product(rec) == pytest.approx((1 - c) / 4 * (1 + c) / 4, rel=1e-14)
    assert pair_product(rec) == pytest.approx(math.sin(math.pi / 4) ** 2 / 16, rel=1e-14)


def test_correlation_examples():
    grid = ScanGrid(0, math.pi / 4, 41)
    trace = default_trace(2, grid)
    assert trace.normalized_values[-1] == pytest.approx(1.0)
    assert trace.log_values[0] == -np.inf and trace.normalized_values[0] == 0
    cfg = ApparatusConfig(pixel_count=3)
    raw = math.exp(log_correlation(cfg, make_slm(3), [math.pi / 6])[0] - log_prefactor(cfg))
    assert raw == pytest.approx(1 / 16, rel=1e-13)
    assert raw == pytest.approx(brute_product(3, math.pi / 6), rel=1e-13)
    assert trace.order == 4


def test_closed_form_examples():
    assert closed_form_trace(1, ScanGrid(0, math.pi / 2, 3)).normalized_values[-1] == 1.0
    g = ScanGrid(0, 2 * math.pi, 4001)
    assert fringe_metrics(closed_form_trace(10, g)).peak_count == 20
    g = ScanGrid(0, math.pi / 200, 11)
    assert closed_form_trace(100, g).normalized_values[-1] == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("n", [2, 3, 10, 100])
def test_oracle_equivalence_on_arbitrary_grid(n):
    grid = ScanGrid(-0.3, -0.3 + 9999 * math.pi / (20 * n), 10_000)
    got = default_trace(n, grid).normalized_values
    ref = closed_form_trace(n, grid).normalized_values
    ref = ref / ref.max()
    assert np.max(np.abs(got - ref)) <= 1e-9


@pytest.mark.parametrize("n", [2, 3, 10, 100])
def test_equals_sin_squared_on_peak_grid(n):
    grid = ScanGrid(math.pi / (2 * n), math.pi / (2 * n) + 9999 * math.pi / (20 * n), 10_000)
    got = default_trace(n, grid).normalized_values
    assert np.max(np.abs(got - np.sin(n * grid.phi) ** 2)) <= 1e-9


def test_closed_form_off_peak_grid_not_rescaled():
    grid = ScanGrid(0.1, 0.2, 11)
    np.testing.assert_allclose(closed_form_trace(1, grid).normalized_values, np.sin(grid.phi) ** 2, rtol=1e-13)


@pytest.mark.parametrize("n", [2, 10])
def test_fields_route_matches(n):
    grid = ScanGrid(0.05, 3.0, 2001)
    cfg = ApparatusConfig(pixel_count=n)
    a = correlation_trace(cfg, make_slm(n), grid).normalized_values
    b = correlation_trace(cfg, make_slm(n), grid, method="fields").normalized_values
    assert np.max(np.abs(a - b)) < 1e-9


def test_large_n_log_domain_no_underflow():
    n = 10_000
    cfg = ApparatusConfig(pixel_count=n)
    phi = np.array([0.123456, 0.5 + math.pi / (2 * n)])
    logs = log_correlation(cfg, make_slm(n), phi)
    assert np.all(np.isfinite(logs))
    linear = np.prod(np.sin(phi[0] - make_slm(n).phases) ** 2)
    assert linear == 0.0
    ref = closed_form_log(n, phi)
    np.testing.assert_allclose(logs - log_prefactor(cfg), ref, rtol=1e-9)


@pytest.mark.parametrize("n", [2, 10, 100])
def test_fringe_count_scaling(n):
    grid = ScanGrid.for_order(n, 0, 2 * math.pi)
    metrics = fringe_metrics(default_trace(n, grid))
    assert metrics.peak_count == 2 * n
    assert abs(metrics.resolution_delta - math.pi / (2 * n)) <= grid.step
    assert metrics.mean_period == pytest.approx(math.pi / n, abs=grid.step)


def test_fringe_metrics_examples():
    m = fringe_metrics(closed_form_trace(2, ScanGrid(0, 2 * math.pi, 4001)))
    assert m.peak_count == 4 and m.resolution_delta == pytest.approx(math.pi / 4, abs=2 * math.pi / 4000)
    m = fringe_metrics(closed_form_trace(10, ScanGrid(0, 2 * math.pi, 4001)))
    assert m.peak_count == 20 and m.resolution_delta == pytest.approx(math.pi / 20, abs=2 * math.pi / 4000)
    m = fringe_metrics(closed_form_trace(1, ScanGrid(0, math.pi, 1001)))
    assert m.peak_count == 1 and m.resolution_delta == pytest.approx(math.pi / 2, abs=math.pi / 1000)
    assert math.isnan(m.mean_period)
    assert list(fringe_metrics(closed_form_trace(2, ScanGrid(0, 2 * math.pi, 401))).orders) == [0, 1, 2, 3]


def test_constant_trace_has_no_fringes():
    grid = ScanGrid(0, 1, 11)
    with pytest.raises(NoFringesError):
        fringe_metrics(CorrelationTrace.from_log(grid, np.zeros(11), 2))


def test_plateau_peak_counted_once():
    grid = ScanGrid(0, 1, 7)
    logs = np.log([0.001, 0.5, 1.0, 1.0, 0.5, 0.1, 0.001])
    m = fringe_metrics(CorrelationTrace.from_log(grid, logs, 2))
    assert m.peak_count == 1
    assert m.peak_positions[0] == pytest.approx(grid.phi[2])


def test_grid_discipline():
    with pytest.raises(AliasingError):
        default_trace(10, ScanGrid(0, 2 * math.pi, 50))
    trace = default_trace(10, ScanGrid(0, 2 * math.pi, 50), allow_coarse=True)
    assert trace.order == 20


@pytest.mark.parametrize("args", [(1, 0, 10), (0, 1, 1), (0, float("inf"), 5), (0, 1, 2.5)])
def test_grid_validation(args):
    with pytest.raises(ConfigError):
        ScanGrid(*args)


def test_trace_length_checked():
    with pytest.raises(ConfigError):
        CorrelationTrace.from_log(ScanGrid(0, 1, 5), np.zeros(4), 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 40), st.floats(-5, 5))
def test_normalization_invariant(n, start):
    grid = ScanGrid(start, start + 2.0, 400)
    trace = default_trace(n, grid, allow_coarse=True)
    assert np.max(trace.normalized_values) == 1.0
    top = np.max(trace.log_values)
    np.testing.assert_allclose(trace.normalized_values, np.exp(trace.log_values - top), rtol=1e-15)
    assert np.all((trace.normalized_values >= 0) & (trace.normalized_values <= 1))


def test_jitter_on_crest_is_one_peak():
    grid = ScanGrid(0, math.pi, 2001)
    values = np.sin(grid.phi) ** 2 + 0.02 * np.sin(300 * grid.phi)
    values = np.clip(values, 1e-300, None)
    m = fringe_metrics(CorrelationTrace.from_log(grid, np.log(values), 2))
    assert m.peak_count == 1
