import math

import numpy as np
import pytest
from scipy.special import kv

from tfdcs.errors import ConvergenceError, DomainError
from tfdcs.quadrature import quad_semiinfinite


def test_unit_exponential():
    res = quad_semiinfinite(lambda t: np.exp(-t), 1e-10)
    assert abs(res.value - 1.0) <= 1e-10
    assert res.error <= 1e-10


def test_factorial_moment():
    assert quad_semiinfinite(lambda t: t**4 * np.exp(-t), 1e-10).value == pytest.approx(24.0, abs=1e-9)


def test_bessel_weight_mass():
    res = quad_semiinfinite(lambda t: 2 * np.sqrt(t) * kv(1, 2 * np.sqrt(t)), 1e-10)
    assert res.value == pytest.approx(1.0, abs=1e-10)


def test_algebraic_decay():
    assert quad_semiinfinite(lambda t: 1 / (1 + t * t), 1e-12).value == pytest.approx(math.pi / 2, abs=1e-12)


def test_relative_target_for_large_integrals():
    res = quad_semiinfinite(lambda t: t**20 * np.exp(-t), 1e-300, rtol=1e-12)
    assert res.value == pytest.approx(math.factorial(20), rel=1e-12)


def test_scalar_integrand():
    res = quad_semiinfinite(lambda t: math.exp(-2 * t), 1e-12, vectorized=False)
    assert res.value == pytest.approx(0.5, abs=1e-12)


def test_tail_cutoff():
    res = quad_semiinfinite(lambda t: np.exp(-t), 1e-10, tail_bound=lambda T: math.exp(-T))
    assert res.value == pytest.approx(1.0, abs=1e-10)
    assert res.error <= 1e-10


def test_errors():
    with pytest.raises(DomainError):
        quad_semiinfinite(lambda t: np.exp(-t), 0.0)
    with pytest.raises(ConvergenceError), np.errstate(divide="ignore", over="ignore"):
        quad_semiinfinite(lambda t: 1 / t, 1e-10)
    with pytest.raises(ConvergenceError):
        quad_semiinfinite(lambda t: np.sin(t) ** 2 / (1 + t) ** 0.5, 1e-10, max_panels=50)
