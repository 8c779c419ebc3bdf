import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfdcs import quasiprob as qp
from tfdcs.errors import DimensionError, DomainError, OutOfRangeError, UnsupportedSpectrumError
from tfdcs.model import DeformedModel, Spectrum, Truncation, energy_array
from tfdcs.specfun import ParamLists, hyp_pfq
from tfdcs.thermal import bose_einstein, cosh2_theta, internal_energy, thermal_vacuum

from conftest import BESSEL, BESSEL_LIN, BETAS, MODELS, OSC

LN2 = math.log(2.0)
OSC0 = DeformedModel(ParamLists(), 1.0, Spectrum.linear(0.0))


def test_density_examples(trunc):
    rho = qp.density_build(OSC0, 80.0, trunc)
    assert rho.weights[0] == 1.0 and np.all(rho.weights[1:] < 1e-34)
    rho = qp.density_build(OSC0, LN2, trunc)
    assert np.allclose(rho.weights, 0.5 ** (np.arange(trunc.size) + 1), rtol=1e-14, atol=0)
    rho = qp.density_build(BESSEL, 1.0, trunc)
    w = np.array([math.exp(-n * (n + 1)) for n in range(trunc.size)])
    assert np.allclose(rho.weights, w / math.fsum(w), rtol=1e-14, atol=1e-300)


def test_density_invariants(model, beta, trunc):
    rho = qp.density_build(model, beta, trunc)
    assert np.all(rho.weights >= 0)
    assert abs(rho.trace + rho.tail_weight - 1) <= 1e-12
    pos = rho.weights[rho.weights > 0]
    assert np.all(np.diff(pos) < 0)
    whole = qp.whole_density(model, beta, trunc)
    assert abs(whole.trace - 1) <= 2e-12


def test_purification(model, beta, trunc):
    red = qp.partial_trace_tilde(thermal_vacuum(model, beta, trunc))
    rho = qp.density_build(model, beta, trunc)
    mask = rho.weights > 1e-300
    assert np.max(np.abs(red.weights[mask] - rho.weights[mask]) / rho.weights[mask]) <= 1e-12
    assert abs(red.trace - (1 - red.tail_weight)) <= 1e-12


def test_tfd_equivalence(model, beta, trunc):
    rng = np.random.default_rng(7)
    tv = thermal_vacuum(model, beta, trunc)
    for _ in range(5):
        obs = rng.uniform(-1, 1, trunc.size)
        assert abs(qp.vacuum_expectation(tv, obs) - qp.thermal_average(model, obs, beta, trunc)) <= 1e-12


def test_thermal_average_examples(trunc):
    ones = np.ones(trunc.size)
    assert qp.thermal_average(OSC, ones, 1.0, trunc) == pytest.approx(1.0, abs=1e-15)
    n = np.arange(trunc.size, dtype=float)
    assert qp.thermal_average(OSC0, n, LN2, trunc) == pytest.approx(1.0, rel=1e-13)
    e = energy_array(BESSEL, trunc.n_max)
    assert qp.thermal_average(BESSEL, e, 0.5, trunc) == pytest.approx(internal_energy(BESSEL, 0.5, trunc), rel=1e-14)
    with pytest.raises(DimensionError):
        qp.thermal_average(OSC, ones[:-1], 1.0, trunc)


def test_husimi_examples(trunc):
    assert qp.husimi_q(OSC, 0.0, 1.0, trunc) == pytest.approx(1 - math.exp(-1), rel=1e-14)
    # cold limit: |<z|0>|^2 = 1 / pFq(|z|^2)
    z = 0.9 + 0.3j
    assert qp.husimi_q(BESSEL, z, 200.0, trunc) == pytest.approx(1 / hyp_pfq(BESSEL.params, abs(z) ** 2), rel=1e-13)


def test_husimi_origin(model, beta, trunc):
    p0 = qp.density_build(model, beta, trunc).weights[0]
    assert abs(qp.husimi_q(model, 0.0, beta, trunc) - p0) <= 1e-12


def test_husimi_oscillator_closed_form(trunc):
    # Q(z) = (1 - u) exp(-x (1 - u)) with u = e^{-beta}, x = |z|^2 cosh^2 for p=q=0, E0=0
    for beta in BETAS:
        for z in (0.3, 1.0 + 1.0j, 2.5):
            u = math.exp(-beta)
            x = abs(z) ** 2 * cosh2_theta(OSC0, beta)
            assert qp.husimi_q(OSC0, z, beta, trunc) == pytest.approx((1 - u) * math.exp(-x * (1 - u)), rel=1e-12)


def test_husimi_whole_factorizes(trunc):
    a = qp.husimi_q(BESSEL, 0.4, 1.0, trunc)
    b = qp.husimi_q(BESSEL, 1.1j, 1.0, trunc)
    assert qp.husimi_q_whole(BESSEL, 0.4, 1.1j, 1.0, trunc) == a * b


@pytest.mark.parametrize("name", list(MODELS))
def test_q_normalization(name, trunc):
    for beta in (0.5, 3.0):
        assert abs(qp.q_normalization(MODELS[name], beta, trunc) - 1) <= 1e-6


@pytest.mark.parametrize("name", list(MODELS))
def test_trace_via_moments(name, trunc):
    assert abs(qp.trace_via_moments(MODELS[name], 1.0, trunc) - 1) <= 1e-6


def test_p_function_examples():
    for beta in BETAS:
        assert qp.p_function_linear(OSC, 0.0, beta) == pytest.approx(math.expm1(beta), rel=1e-15)
        for z in (0.5, 1.0 - 0.5j, 3.0):
            x = abs(z) ** 2 * cosh2_theta(OSC, beta)
            want = math.expm1(beta) * math.exp(-x * math.expm1(beta))
            assert qp.p_function_linear(OSC, z, beta) == pytest.approx(want, rel=1e-12)


def test_p_function_oscillator_uses_mean_occupation():
    beta = 1.3
    nbar = bose_einstein(OSC, beta)
    z = 0.8
    # x (e^b - 1) = |z|^2 (nbar + 1) / nbar
    want = math.exp(-(abs(z) ** 2) * (nbar + 1) / nbar) / nbar
    assert qp.p_function_linear(OSC, z, beta) == pytest.approx(want, rel=1e-12)


def test_p_function_cold_continuity():
    # the ratio stays finite and continuous as theta -> 0
    vals = [qp.p_function_linear(BESSEL_LIN, 0.7, b) * math.exp(-b) for b in (20.0, 30.0, 40.0)]
    assert all(math.isfinite(v) for v in vals)
    assert vals[1] == pytest.approx(vals[2], rel=1e-3)


def test_p_function_bessel_origin_limit():
    # b = [2]: G(t) -> 1 as t -> 0, so the ratio tends to 1
    for beta in BETAS:
        near = qp.p_function_linear(BESSEL_LIN, 1e-9, beta)
        assert qp.p_function_linear(BESSEL_LIN, 0.0, beta) == pytest.approx(near, rel=1e-6)


def test_p_function_guards():
    with pytest.raises(UnsupportedSpectrumError):
        qp.p_function_linear(BESSEL, 0.5, 1.0)
    with pytest.raises(OutOfRangeError):
        qp.p_function_linear(BESSEL_LIN, 1e3, 1.0)
    # exponential weight is globally defined
    assert qp.p_function_linear(OSC, 40.0, 1.0) >= 0.0


def test_p_whole_factorizes():
    a = qp.p_function_linear(BESSEL_LIN, 0.4, 1.0)
    b = qp.p_function_linear(BESSEL_LIN, 0.9j, 1.0)
    assert qp.p_function_whole(BESSEL_LIN, 0.4, 0.9j, 1.0) == a * b


@pytest.mark.parametrize("n", range(9))
@pytest.mark.parametrize("name", ["osc", "bessel_lin"])
def test_p_moments(name, n):
    for beta in (0.5, 3.0):
        res = qp.p_moment_check(MODELS[name], n, beta)
        assert res.rel_diff <= 1e-5


def test_p_moment_examples():
    for beta in BETAS:
        res = qp.p_moment_check(OSC0, 0, beta)
        assert res.rhs == pytest.approx(-math.expm1(-beta), rel=1e-14)
        assert res.lhs == pytest.approx(res.rhs, rel=1e-9)
    res = qp.p_moment_check(OSC0, 1, LN2)
    assert res.rhs == pytest.approx(0.25, rel=1e-14)
    assert res.lhs == pytest.approx(0.25, rel=1e-9)
    with pytest.raises(DomainError):
        qp.p_moment_check(OSC0, 200, 1.0)
    with pytest.raises(UnsupportedSpectrumError):
        qp.p_moment_check(BESSEL, 0, 1.0)


def test_average_via_p_examples(trunc):
    size = trunc.size
    assert qp.average_via_p(OSC, np.ones(size), 1.0) == pytest.approx(1.0, rel=1e-5)
    n = np.arange(size, dtype=float)
    assert qp.average_via_p(OSC0, n, LN2) == pytest.approx(1.0, rel=1e-5)
    e = energy_array(BESSEL_LIN, trunc.n_max)
    assert qp.average_via_p(BESSEL_LIN, e, 1.0) == pytest.approx(internal_energy(BESSEL_LIN, 1.0, trunc), rel=1e-5)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), beta=st.sampled_from(BETAS))
def test_average_via_p_matches_thermal_average(seed, beta):
    obs = np.random.default_rng(seed).uniform(-1, 1, Truncation().size)
    t = Truncation()
    want = qp.thermal_average(BESSEL_LIN, obs, beta, t)
    got = qp.average_via_p(BESSEL_LIN, obs, beta, t)
    assert abs(got - want) <= 1e-5 * max(abs(want), 1e-3)
