import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfdcs import coherent as coh
from tfdcs.coherent import Kind
from tfdcs.errors import DomainError, TruncationError, UnsupportedFamilyError
from tfdcs.model import DeformedModel, Spectrum, Truncation, auto_raise, ladder_e_array, ladder_matrices
from tfdcs.specfun import ParamLists, hyp_pfq
from tfdcs.thermal import cosh2_theta

from conftest import BESSEL, BETAS, MODELS, OSC, OSC_GEN

LN4 = math.log(4.0)
LABELS = [cmath.rect(r, ph) for r in (0.25, 0.5, 1.0, 2.0) for ph in (0.0, math.pi / 3, math.pi)]


def build(model, kind, z, beta):
    return auto_raise(lambda t: coh.cs_build(model, kind, z, beta, t), Truncation())


def glauber(w, size):
    # independent oracle: c_n = exp(-|w|^2/2) w^n / sqrt(n!) by recursion
    c = np.empty(size, dtype=complex)
    c[0] = math.exp(-abs(w) ** 2 / 2)
    for n in range(1, size):
        c[n] = c[n - 1] * w / math.sqrt(n)
    return c


def kp_converges(model, z, beta):
    # KP normalisation for q = p + 1 is a (p+1)F(p) series needing x < 1
    return model.q < model.p + 1 or abs(z) ** 2 * cosh2_theta(model, beta) < 1


@pytest.mark.parametrize("kind", list(Kind))
def test_vacuum_label(kind, model):
    st_ = coh.cs_build(model, kind, 0.0, 1.0, Truncation(8))
    assert st_.coeffs[0] == 1 and not np.any(st_.coeffs[1:])
    assert coh.cs_norm_log(model, kind, 0.0, 1.0) == 0.0


@pytest.mark.parametrize("kind", list(Kind))
@pytest.mark.parametrize("z", [0.5, 1.0 + 1.0j, -2.0])
def test_oscillator_states_are_glauber(kind, z, beta):
    st_ = build(OSC_GEN, kind, z, beta)
    w = z * math.sqrt(cosh2_theta(OSC_GEN, beta))
    assert np.allclose(st_.coeffs, glauber(w, st_.coeffs.size), rtol=1e-13, atol=1e-15)


def test_norm_log_examples():
    # pick the label so that |z|^2 cosh^2 = 1
    z = 1 / math.sqrt(cosh2_theta(OSC, LN4))
    assert coh.cs_norm_log(OSC, Kind.BG, z, LN4) == pytest.approx(1.0, rel=1e-14)
    assert coh.cs_norm_log(BESSEL, Kind.BG, z, LN4) == pytest.approx(math.log(1.590636854637329), rel=1e-14)


def test_zero_temperature_limit():
    st_ = build(BESSEL, Kind.KP, 0.3, 500.0)
    n = np.arange(st_.coeffs.size)
    # rho_KP(n) = n!^2 / (n! (2)_n) = 1 / (n+1) for b = [2]
    want = 0.3**n * np.sqrt(n + 1.0) / math.sqrt(hyp_pfq(ParamLists((2.0,), ()), 0.09))
    assert np.allclose(st_.coeffs, want, rtol=1e-13, atol=1e-300)


def rho_direct(model, kind, n):
    # independent oracle: plain products of the defining factors
    bg = math.factorial(n) * math.prod(
        math.prod(b + k for k in range(n)) for b in model.params.b
    ) / math.prod(math.prod(a + k for k in range(n)) for a in model.params.a)
    return bg if kind is Kind.BG else math.factorial(n) ** 2 / bg


def test_coefficients_match_definition(model, beta):
    for kind in Kind:
        for z in LABELS[::4]:
            if kind is Kind.KP and not kp_converges(model, z, beta):
                continue
            st_ = build(model, kind, z, beta)
            w = z * math.sqrt(cosh2_theta(model, beta))
            params = coh.norm_params(model, kind)
            norm = hyp_pfq(params, abs(w) ** 2)
            n = np.arange(40)
            rho = np.array([rho_direct(model, kind, k) for k in n])
            want = w**n / np.sqrt(rho) / math.sqrt(norm)
            assert np.allclose(st_.coeffs[:40], want, rtol=1e-12, atol=1e-300)


def test_normalization_and_tail(model, beta):
    for z in LABELS:
        st_ = build(model, Kind.BG, z, beta)
        s = math.fsum(np.abs(st_.coeffs) ** 2)
        assert 1 - 1e-12 <= s <= 1 + 4 * np.finfo(float).eps
        assert st_.tail_weight < 1e-12


def test_truncation_error_when_cutoff_too_small():
    with pytest.raises(TruncationError):
        coh.cs_build(OSC, Kind.BG, 4.0, 1.0, Truncation(8))


def test_unknown_kind():
    with pytest.raises(DomainError):
        coh.cs_build(OSC, "gk", 1.0, 1.0, Truncation(8))


@settings(max_examples=60, deadline=None)
@given(r=st.floats(0.01, 2.0), phi=st.floats(-math.pi, math.pi))
def test_phase_covariance(r, phi):
    a = build(BESSEL, Kind.BG, r, 1.0)
    b = build(BESSEL, Kind.BG, cmath.rect(r, phi), 1.0)
    n = np.arange(a.coeffs.size)
    # an ulp in |z| becomes ~|ln c_n| * eps once exponentiated (up to ~700 eps)
    assert np.allclose(np.abs(a.coeffs), np.abs(b.coeffs), rtol=1e-12, atol=1e-290)
    assert np.allclose(b.coeffs, a.coeffs * np.exp(1j * n * phi), rtol=1e-12, atol=1e-14)


def test_overlap_examples(model):
    z = 0.7 - 0.2j
    assert coh.overlap(model, Kind.BG, z, z, 1.0) == pytest.approx(1.0, abs=1e-14)
    x = abs(z) ** 2 * cosh2_theta(model, 1.0)
    want = 1 / math.sqrt(hyp_pfq(model.params, x))
    assert coh.overlap(model, Kind.BG, z, 0.0, 1.0) == pytest.approx(want, rel=1e-14)


def test_oscillator_overlap_is_gaussian(beta):
    for z in LABELS:
        for zp in LABELS:
            o = coh.overlap(OSC, Kind.BG, z, zp, beta)
            want = math.exp(-abs(z - zp) ** 2 * cosh2_theta(OSC, beta))
            assert abs(abs(o) ** 2 - want) <= 1e-10


def test_overlap_series_agreement(model, beta):
    for kind in Kind:
        labels = [z for z in LABELS if kind is Kind.BG or kp_converges(model, z, beta)]
        states = {z: build(model, kind, z, beta) for z in labels}
        for z in labels:
            for zp in labels:
                closed = coh.overlap(model, kind, z, zp, beta)
                series = coh.overlap_series(states[z], states[zp])
                assert abs(closed - series) <= 1e-10
                assert abs(closed) <= 1 + 1e-12


def test_eigen_residual(model, beta):
    for z in LABELS:
        r = auto_raise(lambda t: coh.eigen_residual(model, z, beta, t), Truncation())
        assert r <= 1e-10
    assert coh.eigen_residual(model, 0.0, beta, Truncation(8)) == 0.0


def test_eigen_residual_rejects_kp():
    with pytest.raises(DomainError):
        coh.eigen_residual(OSC, 1.0, 1.0, Truncation(), kind=Kind.KP)


def test_oscillator_kinds_coincide(beta):
    for z in LABELS:
        bg = build(OSC, Kind.BG, z, beta)
        kp = build(OSC, Kind.KP, z, beta)
        assert np.max(np.abs(bg.coeffs - kp.coeffs)) <= 1e-14


@pytest.mark.parametrize("n", range(9))
@pytest.mark.parametrize("name", ["osc", "bessel"])
def test_identity_moments(name, n):
    m = MODELS[name]
    a = coh.identity_moment_check(m, n, 0.5)
    b = coh.identity_moment_check(m, n, 3.0)
    assert a.rel_diff <= 1e-6
    assert abs(a.lhs - b.lhs) <= 1e-10 * a.rhs


def test_identity_moment_examples():
    assert coh.identity_moment_check(OSC, 4, 1.0).lhs == pytest.approx(24.0, rel=1e-10)
    assert coh.identity_moment_check(BESSEL, 0, 1.0).lhs == pytest.approx(1.0, rel=1e-10)
    res = coh.identity_moment_check(BESSEL, 3, 1.0)
    assert res.rhs == pytest.approx(144.0, rel=1e-14)
    assert res.lhs == pytest.approx(144.0, rel=1e-10)


def test_identity_moment_family_gate():
    m = DeformedModel(ParamLists((1.5,), (2.0, 3.0)), 1.0, Spectrum.generalized())
    with pytest.raises(UnsupportedFamilyError):
        coh.identity_moment_check(m, 0, 1.0)
    with pytest.raises(DomainError):
        coh.identity_moment_check(OSC, -1, 1.0)


def test_identity_moment_numerical_branch():
    m = DeformedModel(ParamLists((), (2.0, 3.0)), 1.0, Spectrum.generalized())
    res = coh.identity_moment_check(m, 1, 1.0, rtol=1e-8, numerical=True)
    assert res.rel_diff <= 1e-6


def test_measure_density_total_mass():
    from tfdcs.quadrature import quad_semiinfinite

    res = quad_semiinfinite(
        lambda x: np.exp(coh.measure_log_density(BESSEL, x) - np.log(np.array([hyp_pfq(BESSEL.params, v) for v in x]))),
        1e-12,
    )
    assert res.value == pytest.approx(1.0, abs=1e-10)
    assert isinstance(coh.measure_log_density(BESSEL, 1.0), float)


def test_doot_examples():
    z = math.sqrt(0.75 / cosh2_theta(OSC, 1.0))
    assert coh.doot_expect(OSC, lambda x: x, z, 1.0) == pytest.approx(0.75, rel=1e-15)
    assert coh.doot_expect(OSC, lambda x: 1.0, 1.3, 1.0) == 1.0
    z = 2 / math.sqrt(cosh2_theta(OSC, 1.0))
    assert coh.doot_expect(OSC, lambda x: x * x, z, 1.0) == pytest.approx(16.0, rel=1e-14)


def test_two_mode_examples(model):
    tm = coh.two_mode_build(model, Kind.BG, 0.0, 0.0, 1.0, Truncation(8))
    assert tm.coeffs[0, 0] == 1 and np.count_nonzero(tm.coeffs) == 1
    trunc = Truncation()
    tm = coh.two_mode_build(model, Kind.BG, 0.8j, -0.5, 1.0, trunc)
    assert np.linalg.matrix_rank(tm.coeffs) == 1
    fro = np.linalg.norm(tm.coeffs)
    assert 1 - 2e-12 <= fro <= 1 + 1e-15
    lm = ladder_matrices(model, trunc)
    w = 0.8j * math.sqrt(cosh2_theta(model, 1.0))
    r = lm.a_minus @ tm.coeffs - w * tm.coeffs
    assert np.linalg.norm(r[:-1]) <= 1e-10
    assert not tm.coeffs.flags.writeable


@settings(max_examples=40, deadline=None)
@given(r=st.floats(0.0, 2.0), ph=st.floats(-math.pi, math.pi), d=st.complex_numbers(max_magnitude=1e-6))
def test_label_continuity(r, ph, d):
    z = cmath.rect(r, ph)
    zp = z + d
    if abs(zp) > 2:
        return
    a, b = build(BESSEL, Kind.BG, z, 1.0), build(BESSEL, Kind.BG, zp, 1.0)
    m = min(a.coeffs.size, b.coeffs.size)
    e = ladder_e_array(BESSEL, m)
    k = 10 * math.sqrt(cosh2_theta(BESSEL, 1.0)) * math.sqrt(e.max())
    assert np.linalg.norm(a.coeffs[:m] - b.coeffs[:m]) <= k * abs(d) + 1e-15
