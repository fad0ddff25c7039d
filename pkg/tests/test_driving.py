"""Sampled drivings and multi-slit systems."""

import numpy as np
import pytest

from loewner import (DomainError, MultiSlitSystem, PIECEWISE_CONSTANT,
                     PIECEWISE_SQRT, SampledDriving)


def test_validation():
    with pytest.raises(DomainError):
        SampledDriving(np.array([0.1, 1.0]), np.array([0.0, 1.0]))
    with pytest.raises(DomainError):
        SampledDriving(np.array([0.0, 1.0, 1.0]), np.array([0.0, 1.0, 2.0]))
    with pytest.raises(DomainError):
        SampledDriving(np.array([0.0, 1.0]), np.array([0.0, np.nan]))


def test_piecewise_constant_eval():
    u = SampledDriving(np.array([0.0, 0.5, 1.0]), np.array([1.0, 2.0, 3.0]),
                       PIECEWISE_CONSTANT)
    assert u.eval(0.25) == 1.0
    assert u.eval(0.5) == 2.0
    assert u.eval(1.0) == 3.0
    assert u.eval(2.0) == 3.0  # clamped


def test_sqrt_segments_store_coefficient():
    u = SampledDriving.sqrt_driving(2.0, 4.0)
    assert u.interp == PIECEWISE_SQRT
    tt = np.linspace(0, 4, 41)
    assert np.max(np.abs(u.eval(tt) - 2.0 * np.sqrt(tt))) < 1e-14
    # derived coefficients from endpoint values
    v = SampledDriving(np.array([0.0, 1.0, 4.0]),
                       np.array([0.0, 2.0, 4.0]), PIECEWISE_SQRT)
    assert np.allclose(v.coeffs, [2.0, 2.0 / np.sqrt(3.0)])


def test_linear_eval_and_transforms():
    u = SampledDriving(np.array([0.0, 1.0]), np.array([0.0, 3.0]))
    assert abs(u.eval(0.5) - 1.5) < 1e-15
    d = 2.0
    s = u.scaled(d)
    tt = np.linspace(0, 1, 7)
    assert np.allclose(s.eval(d * d * tt), d * u.eval(tt))
    assert np.allclose(u.translated(1.5).eval(tt), u.eval(tt) + 1.5)
    assert np.allclose(u.reflected().eval(tt), -u.eval(tt))


def test_terminal_sqrt_resolves_the_endpoint():
    u = SampledDriving.terminal_sqrt(5.0, 1.0)
    hs = 10.0 ** np.arange(-12, -1, 1.0)
    q = np.abs(u.eval(1.0) - u.eval(1.0 - hs)) / np.sqrt(hs)
    assert np.all(np.abs(q - 5.0) < 0.15)  # Hoelder quotient survives sampling


def test_system_validation():
    u1 = SampledDriving.constant(-1.0, 1.0)
    u2 = SampledDriving.constant(1.0, 1.0)
    sys = MultiSlitSystem([0.5, 0.5], [u1, u2])
    assert sys.n == 2 and sys.horizon == 1.0
    with pytest.raises(DomainError):
        MultiSlitSystem([0.6, 0.6], [u1, u2])  # weights exceed 1
    with pytest.raises(DomainError):
        MultiSlitSystem([0.5, 0.5], [u2, u1])  # ordering violated
    with pytest.raises(DomainError):
        MultiSlitSystem([0.5, 0.5], [u1, SampledDriving.constant(1.0, 2.0)])
