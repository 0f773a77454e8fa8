import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import completed_zeta_sides, zeta_eta_series
from primewave import zeta as zm
from primewave.errors import DomainError, IncompleteScanError, PoleError, ResolutionError, ToleranceError
from primewave.zeta import (argand_path, find_zeros, hardy_z, loggamma, phase_trace,
                            riemann_siegel_theta, zeta, zeta_array, zeta_grid, zeta_prime_array)

# frozen from mpmath at 30 digits
THETA_100 = 87.97216523178722
THETA_480 = 800.2255133193119
ZETA_HALF = -1.4603545088095868
FIRST_ZERO = 14.134725141734695
ZEROS_BELOW_160 = 58


def test_special_values():
    assert abs(zeta(2) - math.pi**2 / 6) < 1e-10
    assert abs(zeta(4) - math.pi**4 / 90) < 1e-10
    for k in range(1, 6):
        assert abs(zeta(-2 * k)) < 1e-8
    assert abs(zeta(-1) + 1 / 12) < 1e-13
    assert abs(zeta(0) + 0.5) < 1e-13


def test_errors():
    with pytest.raises(PoleError):
        zeta(1)
    with pytest.raises(ToleranceError):
        zeta(2, tol=1e-18)
    with pytest.raises(DomainError):
        zeta(complex(float("nan"), 1))
    with pytest.raises(DomainError):
        zeta_array([1 + 1j, complex(float("inf"), 0)])
    with pytest.raises(DomainError):
        riemann_siegel_theta(-1.0)


def test_against_mpmath_accuracy_region():
    rng = np.random.default_rng(7)
    s = rng.uniform(-2, 10, 150) + 1j * rng.uniform(-520, 520, 150)
    got = zeta_array(s)
    for z, v in zip(s, got):
        ref = complex(mpmath.zeta(z))
        assert abs(v - ref) <= 1e-10 * max(1.0, abs(ref))


def test_scalar_tolerance_is_met():
    for s in (0.5 + 14.134725141734695j, 3 + 400j, -1.5 + 250j, 0.9 + 0.1j):
        ref = complex(mpmath.zeta(s))
        assert abs(zeta(s, tol=1e-12) - ref) <= 1e-12 * max(1.0, abs(ref)) * 10


def test_functional_equation_branch_far_left():
    for s in (-7.5 + 3j, -20 + 300j, -3 - 100j, -11):
        ref = complex(mpmath.zeta(s))
        assert abs(zeta(s) - ref) <= 1e-11 * max(1.0, abs(ref))


def test_conjugate_symmetry():
    rng = np.random.default_rng(11)
    s = rng.uniform(-2, 10, 100) + 1j * rng.uniform(0.1, 500, 100)
    a = zeta_array(s)
    b = zeta_array(np.conj(s))
    assert np.all(np.abs(np.conj(a) - b) <= 1e-10 * np.maximum(1, np.abs(a)))


def test_dual_method_agreement():
    rng = np.random.default_rng(3)
    for _ in range(50):
        s = complex(rng.uniform(0.3, 3), rng.uniform(0, 100))
        if abs(s - 1) < 1e-3:
            continue
        assert abs(zeta(s) - zeta_eta_series(s)) < 1e-9


def test_functional_equation_residual():
    rng = np.random.default_rng(5)
    for _ in range(50):
        s = complex(rng.uniform(0.05, 0.95), rng.uniform(1, 60))
        a, b = completed_zeta_sides(s)
        lhs = a * zeta(s)
        rhs = b * zeta(1 - s)
        assert abs(lhs - rhs) < 1e-8


@pytest.mark.parametrize("sigma", [5, 8, 10])
def test_right_limit_bound(sigma):
    t = np.linspace(0, 480, 4001)
    v = zeta_array(sigma + 1j * t)
    bound = 2.0**-sigma * (1 + 2 * 1.5**-sigma)
    assert np.all(np.abs(v - 1) <= bound)


def test_grid_matches_pointwise():
    sig = np.linspace(-1, 3, 41)
    ts = np.concatenate([np.linspace(1e-6, 30, 200), np.linspace(470, 480, 50)])
    g = zeta_grid(sig, ts, block=64)
    p = zeta_array(sig[None, :] + 1j * ts[:, None])
    assert np.all(np.abs(g - p) <= 1e-9 * np.maximum(1, np.abs(p)))
    with pytest.raises(DomainError):
        zeta_grid([-3.0], [1.0])


def test_derivative():
    rng = np.random.default_rng(2)
    s = rng.uniform(-3, 6, 40) + 1j * rng.uniform(0, 400, 40)
    d = zeta_prime_array(s)
    for z, v in zip(s, d):
        ref = complex(mpmath.zeta(z, derivative=1))
        assert abs(v - ref) <= 1e-8 * max(1.0, abs(ref))


def test_loggamma():
    z = np.array([0.3 + 0.7j, 5 - 3j, 12.5 + 100j, 0.25 + 260j, 3.2 + 0j, -2.5 + 0.5j])
    ref = np.array([complex(mpmath.loggamma(x)) for x in z])
    assert np.all(np.abs(loggamma(z) - ref) < 1e-12)


def test_theta():
    assert riemann_siegel_theta(0.0) == 0.0
    assert abs(riemann_siegel_theta(100.0) - THETA_100) < 1e-10
    assert abs(riemann_siegel_theta(480.0) - THETA_480) < 1e-9
    t = np.arange(10, 520, 0.01)
    assert np.all(np.diff(riemann_siegel_theta(t)) > 0)
    w = np.exp(1j * riemann_siegel_theta(20.0)) * zeta(0.5 + 20j)
    assert abs(w.imag) < 1e-10


def test_hardy_z():
    assert abs(hardy_z(0.0) - ZETA_HALF) < 1e-12
    assert hardy_z(14.0) * hardy_z(15.0) < 0
    for t in (5.0, 25.0, 125.0):
        assert abs(abs(hardy_z(t)) - abs(zeta(0.5 + 1j * t))) < 1e-12


def test_find_zeros():
    zl = find_zeros(9, 50)
    assert len(zl) == 10
    assert abs(zl.zeros[0] - FIRST_ZERO) < 1e-6
    for z, (a, b) in zip(zl.zeros, zl.brackets):
        assert b - a <= 1e-6 and a <= z <= b
        assert hardy_z(a) * hardy_z(b) <= 0
    assert len(find_zeros(0, 10)) == 0
    zl = find_zeros(0, 160)
    assert len(zl) == ZEROS_BELOW_160
    assert abs(len(zl) - zl.estimate) < 3
    with pytest.raises(DomainError):
        find_zeros(0, 600)


def test_zero_free_below_first_zero_fine_grid():
    t = np.arange(0, 10, 0.001)
    z = hardy_z(t)
    assert np.all(z < 0)


def test_find_zeros_reports_incomplete(monkeypatch):
    monkeypatch.setattr(zm, "zero_count_estimate", lambda t: 100.0 * t)
    with pytest.raises(IncompleteScanError) as e:
        find_zeros(10, 30)
    assert len(e.value.partial) > 0


def test_phase_trace_critical_line():
    tr = phase_trace(0.5, 0, 50, 0.01)
    zeros = find_zeros(0.01, 50).zeros
    assert len(tr.jumps) == len(zeros) == 10
    for j, z in zip(tr.jumps, zeros):
        assert abs(j - z) < 0.01
    assert np.all(np.diff(tr.t) > 0)
    steps = np.diff(tr.theta)[tr.jump_flags[1:]]
    assert np.all(np.abs(steps - math.pi) < zm.PHASE_WINDOW)


def test_phase_trace_other_lines():
    assert phase_trace(0.6, 0, 50, 0.01).jumps == []
    tr = phase_trace(3, 0, 50, 0.01)
    assert np.abs(tr.theta).max() < 0.2


def test_phase_trace_too_coarse():
    with pytest.raises(ResolutionError):
        phase_trace(0.5, 0, 300, 1.0)
    with pytest.raises(DomainError):
        phase_trace(0.5, 0, 10, 0)


def test_argand():
    assert argand_path(0.5, 9, 50, 0.01).origin_approaches == 10
    assert argand_path(0.5, 0, 9, 0.01).origin_approaches == 0
    assert argand_path(2, 9, 50, 0.01).origin_approaches == 0
    p = argand_path(0.5, 9, 50, 0.01)
    for (t, m), z in zip(p.approaches, find_zeros(9, 50).zeros):
        assert abs(t - z) < 1e-4 and m < 1e-2


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 10), st.floats(-500, 500))
def test_property_finite(sigma, t):
    if abs(complex(sigma, t) - 1) < 1e-6:
        return
    v = zeta(complex(sigma, t))
    assert math.isfinite(v.real) and math.isfinite(v.imag)
