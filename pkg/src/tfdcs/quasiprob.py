"""Diagonal density operators and their coherent-state quasi-probabilities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError, OutOfRangeError, UnsupportedSpectrumError
from .model import DeformedModel, Truncation, gamma_ratio_log, rho_bg_log, rho_bg_log_array
from .quadrature import quad_semiinfinite
from .specfun import hyp_pfq_series, log_meijer_weight
from .thermal import ThermalVacuum, cosh2_theta, partition_sum

# smallest positive subnormal is exp(-744.44); below this the weight is zero in binary64
_LOG_UNDERFLOW = math.log(5e-324)


@dataclass(frozen=True)
class DiagonalDensity:
    """Weights ``p_n`` of a density operator diagonal in the Fock basis."""

    weights: np.ndarray
    tail_weight: float

    @property
    def trace(self) -> float:
        return math.fsum(self.weights)


@dataclass(frozen=True)
class WholeDensity:
    """Physical times tilde density, kept as its two factors."""

    physical: DiagonalDensity
    tilde: DiagonalDensity

    @property
    def trace(self) -> float:
        return self.physical.trace * self.tilde.trace


def density_build(model: DeformedModel, beta: float, trunc: Truncation) -> DiagonalDensity:
    """Boltzmann weights ``exp(-beta E_n) / Z``."""
    ps = partition_sum(model, beta, trunc)
    return DiagonalDensity(ps.probabilities(), ps.tail)


def whole_density(model: DeformedModel, beta: float, trunc: Truncation) -> WholeDensity:
    rho = density_build(model, beta, trunc)
    return WholeDensity(rho, rho)


def partial_trace_tilde(tv: ThermalVacuum) -> DiagonalDensity:
    """Reduced density of the thermal-vacuum projector after tracing out the tilde factor."""
    w = tv.coeffs**2
    w.setflags(write=False)
    return DiagonalDensity(w, tv.tail_weight)


def _obs_array(obs_diag: Sequence[float], size: int) -> np.ndarray:
    obs = np.asarray(obs_diag, dtype=float)
    if obs.shape != (size,):
        raise DimensionError(f"observable diagonal must have length {size}, got shape {obs.shape}")
    return obs


def thermal_average(model: DeformedModel, obs_diag: Sequence[float], beta: float, trunc: Truncation) -> float:
    """``sum p_n obs[n]``."""
    obs = _obs_array(obs_diag, trunc.size)
    return math.fsum(density_build(model, beta, trunc).weights * obs)


def vacuum_expectation(tv: ThermalVacuum, obs_diag: Sequence[float]) -> float:
    """``<0(beta)| O (x) 1 |0(beta)>`` for a diagonal physical observable.

    Uses the coefficient matrix ``Psi = diag(C)`` of the doubled state and
    evaluates ``trace(Psi^T O Psi)``.
    """
    obs = _obs_array(obs_diag, tv.coeffs.size)
    psi = np.diag(tv.coeffs)
    return float(np.trace(psi.T @ (obs[:, None] * psi)))


def _scaled_modulus(model: DeformedModel, z: complex, beta: float) -> float:
    return abs(complex(z)) ** 2 * cosh2_theta(model, beta)


def _log_q_numerator(model: DeformedModel, x: float, log_p: np.ndarray, rho: np.ndarray) -> float:
    # log sum_n p_n x^n / rho(n)
    if x == 0.0:
        return float(log_p[0])
    terms = log_p + np.arange(log_p.size) * math.log(x) - rho
    m = float(np.max(terms))
    return m + math.log(math.fsum(np.exp(terms - m)))


def husimi_q(model: DeformedModel, z: complex, beta: float, trunc: Truncation) -> float:
    """Husimi function ``<z; beta| rho |z; beta>`` in the Barut-Girardello representation."""
    ps = partition_sum(model, beta, trunc)
    x = _scaled_modulus(model, z, beta)
    log_p = ps.log_weights - ps.log_z
    num = _log_q_numerator(model, x, log_p, rho_bg_log_array(model, trunc.n_max))
    return math.exp(num - hyp_pfq_series(model.params, x).log_abs)


def husimi_q_whole(model: DeformedModel, z: complex, sigma_tilde: complex, beta: float, trunc: Truncation) -> float:
    return husimi_q(model, z, beta, trunc) * husimi_q(model, sigma_tilde, beta, trunc)


def q_normalization(
    model: DeformedModel, beta: float, trunc: Truncation, *, rtol: float = 1e-10, numerical: bool = False
) -> float:
    """``integral dmu Q`` with the measure and ``Q`` evaluated as written."""
    ps = partition_sum(model, beta, trunc)
    log_p = ps.log_weights - ps.log_z
    rho = rho_bg_log_array(model, trunc.n_max)

    g = gamma_ratio_log(model)

    def integrand(xs):
        out = np.zeros_like(xs)
        log_w = log_meijer_weight(model.params, xs, numerical=numerical)
        for i, x in enumerate(xs):
            lognum = _log_q_numerator(model, x, log_p, rho)
            # the pFq factors of measure and Q cancel; skip them where the product underflows anyway
            if g + log_w[i] + lognum < _LOG_UNDERFLOW:
                continue
            logf = hyp_pfq_series(model.params, x).log_abs
            out[i] = math.exp((g + logf + log_w[i]) + (lognum - logf))
        return out

    return quad_semiinfinite(integrand, 1e-300, rtol=rtol).value


def _moment(model: DeformedModel, n: int, rtol: float, numerical: bool) -> float:
    # integral of Gamma(a/b) G(t) t^n
    g = gamma_ratio_log(model)
    res = quad_semiinfinite(
        lambda t: np.exp(g + log_meijer_weight(model.params, t, numerical=numerical) + n * np.log(t)),
        1e-300,
        rtol=rtol,
    )
    return res.value


def trace_via_moments(
    model: DeformedModel, beta: float, trunc: Truncation, *, rtol: float = 1e-10, numerical: bool = False
) -> float:
    """Trace through the coherent-state representation as a moment sum.

    ``sum_n p_n M_n / rho(n)`` with ``M_n`` the measure moments obtained by
    quadrature. Levels whose weight is below ``1e-18`` of the leading one are
    skipped.
    """
    ps = partition_sum(model, beta, trunc)
    p = ps.probabilities()
    total = []
    for n in range(trunc.size):
        if p[n] < 1e-18 * p[0]:
            break
        total.append(p[n] * _moment(model, n, rtol, numerical) / math.exp(rho_bg_log(model, n)))
    return math.fsum(total)


def _require_linear(model: DeformedModel) -> None:
    if not model.is_linear:
        raise UnsupportedSpectrumError("the P-function is only available for a linear spectrum")


def _log_weight_ratio_at_zero(model: DeformedModel, bhw: float) -> float:
    # limit of ln[G(x e^bhw) / G(x)] as x -> 0+
    if model.p == 0 and model.q == 0:
        return 0.0
    if model.p == 0 and model.q == 1:
        return bhw * min(model.params.b[0] - 1.0, 0.0)
    raise DomainError("z = 0 needs a family with a closed-form weight")


def p_function_linear(model: DeformedModel, z: complex, beta: float, *, numerical: bool = False) -> float:
    """Glauber P value ``(e^{b} - 1) G(x e^{b}) / G(x)`` with ``b = beta hbar_omega``.

    ``x = |z|^2 cosh^2(theta)``.

    Raises
    ------
    UnsupportedSpectrumError
        Generalized spectrum.
    OutOfRangeError
        ``G(x)`` underflows binary64 (non-exponential families only).
    """
    _require_linear(model)
    bhw = float(beta) * model.hbar_omega
    x = _scaled_modulus(model, z, beta)
    pref = math.log(math.expm1(bhw))
    if x == 0.0:
        return math.exp(pref + _log_weight_ratio_at_zero(model, bhw))
    den = log_meijer_weight(model.params, x, numerical=numerical)
    if den < _LOG_UNDERFLOW and not (model.p == 0 and model.q == 0):
        raise OutOfRangeError(f"weight underflows at |z|^2 cosh^2 = {x!r}; P ratio undefined in binary64")
    num = log_meijer_weight(model.params, x * math.exp(bhw), numerical=numerical)
    return math.exp(pref + num - den)


def p_function_whole(
    model: DeformedModel, z: complex, sigma_tilde: complex, beta: float, *, numerical: bool = False
) -> float:
    return p_function_linear(model, z, beta, numerical=numerical) * p_function_linear(
        model, sigma_tilde, beta, numerical=numerical
    )


@dataclass(frozen=True)
class PMomentCheck:
    lhs: float
    rhs: float
    error: float

    @property
    def rel_diff(self) -> float:
        return abs(self.lhs - self.rhs) / abs(self.rhs)


def _p_moment(model: DeformedModel, n: int, beta: float, rtol: float, numerical: bool):
    bhw = float(beta) * model.hbar_omega
    pref = math.log(math.expm1(bhw))
    scale = math.exp(bhw)
    return quad_semiinfinite(
        lambda t: np.exp(pref + log_meijer_weight(model.params, t * scale, numerical=numerical) + n * np.log(t)),
        1e-300,
        rtol=rtol,
    )


def p_moment_check(
    model: DeformedModel, n: int, beta: float, trunc: Truncation | None = None, *, rtol: float = 1e-10,
    numerical: bool = False,
) -> PMomentCheck:
    """Moment ``n`` of ``S(t) = (e^{b} - 1) G(t e^{b})`` against ``p_n rho(n) / Gamma(a/b)``."""
    _require_linear(model)
    trunc = trunc or Truncation()
    if not 0 <= n <= trunc.n_max:
        raise DomainError(f"moment index {n} outside 0..n_max")
    res = _p_moment(model, n, beta, rtol, numerical)
    ps = partition_sum(model, beta, trunc)
    log_rhs = -gamma_ratio_log(model) + (ps.log_weights[n] - ps.log_z) + rho_bg_log(model, n)
    return PMomentCheck(res.value, math.exp(log_rhs), res.error)


def average_via_p(
    model: DeformedModel, obs_diag: Sequence[float], beta: float, trunc: Truncation | None = None, *,
    rtol: float = 1e-10, numerical: bool = False,
) -> float:
    """Diagonal-observable average through the P representation.

    ``sum_n obs[n] Gamma(a/b) S_n / rho(n)`` with ``S_n`` the moments of the
    angular-integrated P weight. Summation stops once three successive
    level weights fall below ``1e-17`` of the accumulated weight.
    """
    _require_linear(model)
    trunc = trunc or Truncation()
    obs = _obs_array(obs_diag, trunc.size)
    g = gamma_ratio_log(model)
    parts: list[float] = []
    mass = 0.0
    small = 0
    for n in range(trunc.size):
        weight = _p_moment(model, n, beta, rtol, numerical).value * math.exp(g - rho_bg_log(model, n))
        parts.append(obs[n] * weight)
        mass += weight
        if weight < 1e-17 * mass:
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    return math.fsum(parts)
