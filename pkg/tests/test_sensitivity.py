import math

import numpy as np
import pytest

from slmspec.correlation import CorrelationTrace, ScanGrid, closed_form_trace
from slmspec.errors import ConfigError
from slmspec.sensitivity import (
    SlopeTrace,
    differentiate,
    differentiate_samples,
    gain_curve,
    mean_abs_slope,
    phase_error,
    quantum_slope,
)


def around(phi0, step=1e-4, half=50):
    return ScanGrid(phi0 - half * step, phi0 + half * step, 2 * half + 1)


def test_constant_trace_slope_is_zero():
    grid = ScanGrid(0, 1, 21)
    slope = differentiate(CorrelationTrace.from_log(grid, np.zeros(21), 2))
    assert np.all(slope.slope_values == 0)


def test_slope_n1_at_quarter_pi():
    grid = around(math.pi / 4)
    slope = differentiate(closed_form_trace(1, grid))
    assert slope.slope_values[50] == pytest.approx(1.0, abs=1e-6)


def test_slope_n10():
    grid = around(math.pi / 40)
    slope = differentiate(closed_form_trace(10, grid))
    assert slope.slope_values[50] == pytest.approx(10.0, abs=1e-4)


@pytest.mark.parametrize("n", [1, 2, 10])
def test_finite_difference_error_bound(n):
    step = 1e-3
    grid = ScanGrid(-1, -1 + 2000 * step, 2001)
    slope = differentiate(closed_form_trace(n, grid))
    err = np.max(np.abs(slope.slope_values - n * np.sin(2 * n * grid.phi)))
    assert err <= 10 * step**2 * n**3


def test_nonuniform_rejected():
    with pytest.raises(ConfigError):
        differentiate_samples([0, 0.1, 0.3, 0.4], [0, 1, 2, 3])
    with pytest.raises(ConfigError):
        differentiate_samples([0, 1], [0, 1])


@pytest.mark.parametrize("n", [2, 10])
def test_mean_abs_slope_analytic(n):
    assert mean_abs_slope(quantum_slope(n)) == pytest.approx(2 * n / math.pi, rel=1e-3)


def test_mean_abs_slope_zero_trace():
    grid = ScanGrid(-math.pi / 2, math.pi / 2, 101)
    assert mean_abs_slope(SlopeTrace(grid, np.zeros(101))) == 0


def test_mean_abs_slope_window_checks():
    s = quantum_slope(2)
    with pytest.raises(ConfigError):
        mean_abs_slope(s, (0.5, 0.5))
    with pytest.raises(ConfigError):
        mean_abs_slope(s, (-4, 0))


def test_phase_error_constant_slope():
    grid = ScanGrid(-math.pi / 2, math.pi / 2, 11)
    report = phase_error(SlopeTrace(grid, np.ones(11)), 0.01)
    np.testing.assert_allclose(report.phase_error, 0.01)
    assert report.mean_abs_slope == pytest.approx(1.0)


def test_phase_error_best_point_n100():
    grid = ScanGrid(-math.pi / 2, math.pi / 2, 40_001)
    report = phase_error(differentiate(closed_form_trace(100, grid)), 0.01)
    assert report.min_phase_error == pytest.approx(1e-4, rel=1e-4)
    assert abs(math.sin(200 * report.best_phi)) == pytest.approx(1, abs=1e-6)


def test_phase_error_exact_with_analytic_slope():
    # max of N sin(2 N phi) is N, reached on the grid at phi = pi/(4N)
    n = 100
    grid = ScanGrid(-math.pi / 2, math.pi / 2, 4 * n + 1)
    report = phase_error(SlopeTrace(grid, n * np.sin(2 * n * grid.phi)), 0.01)
    assert report.min_phase_error == pytest.approx(0.01 / n, rel=1e-14)


def test_phase_error_infinite_at_peak():
    grid = ScanGrid(0, math.pi / 2, 101)
    report = phase_error(SlopeTrace(grid, np.sin(2 * grid.phi)), 0.1, window=(0, math.pi / 2))
    assert report.phase_error[0] == math.inf
    assert report.min_phase_error == pytest.approx(0.1)
    with pytest.raises(ConfigError):
        phase_error(SlopeTrace(grid, np.ones(101)), 0.0, window=(0, 1))


def test_gain_curve_quantum_linear():
    rows = gain_curve([2, 10, 100])
    q = [r[1] for r in rows]
    for (n, quantum, _), target in zip(rows, (4 / math.pi, 20 / math.pi, 200 / math.pi)):
        assert quantum == pytest.approx(target, rel=0.01)
    assert q[1] / q[0] == pytest.approx(5, rel=0.01)
    assert q[2] / q[0] == pytest.approx(50, rel=0.01)


def test_gain_curve_classical_flat():
    rows = dict((n, c) for n, _, c in gain_curve([2, 100]))
    # numerical integration gives 2/pi at N=2 and about 0.76 at N=100
    assert 0.5 < rows[100] / rows[2] < 2


def test_gain_ratio_monotone():
    ratios = [q / c for _, q, c in gain_curve([2, 10, 100])]
    assert ratios[0] < ratios[1] < ratios[2]


def test_linearity_fit():
    ns = np.array([2, 5, 10, 20, 50, 100])
    q = np.array([r[1] for r in gain_curve(ns)])
    slope, intercept = np.polyfit(ns, q, 1)
    r2 = 1 - np.sum((q - (slope * ns + intercept)) ** 2) / np.sum((q - q.mean()) ** 2)
    assert r2 >= 0.999
    assert abs(intercept) <= 0.05 * slope


def test_single_fringe_row():
    ((n, quantum, classical),) = gain_curve([1])
    assert n == 1 and quantum == pytest.approx(2 / math.pi, rel=1e-3)
    # a single point slit has no fringe; the one-fringe classical pattern is the two-slit one
    assert classical == pytest.approx(0, abs=1e-12)
    ((_, _, two_slit),) = gain_curve([2])
    assert two_slit == pytest.approx(quantum, rel=1e-9)


def test_gain_curve_rejects_empty():
    with pytest.raises(ConfigError):
        gain_curve([])
