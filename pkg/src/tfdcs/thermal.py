"""Temperature side of thermofield dynamics.

Mixing angle, partition function, thermal vacuum, thermodynamic quantities,
Bogoliubov thermal ladder operators and the two-level thermal qubit.

Boltzmann weights are carried as logs and normalised with ``fsum``; the
partition sum is truncated at ``n_max`` with a geometric bound on the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateLevelsError,
    DivergenceError,
    DomainError,
    NumericalError,
    TruncationError,
    UnsupportedSpectrumError,
)
from .model import (
    DeformedModel,
    LadderMatrices,
    Truncation,
    energy_array,
    ladder_e_array,
    ladder_matrices,
    spectrum_e_array,
)

# below this beta * hbar_omega the mixing angle is treated as infinite
MIN_BETA_HW = 1e-12


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not (math.isfinite(beta) and beta > 0):
        raise DomainError(f"beta must be finite and > 0, got {beta!r}")
    return beta


def _scaled_beta(model: DeformedModel, beta: float) -> float:
    x = _check_beta(beta) * model.hbar_omega
    if x < MIN_BETA_HW:
        raise DivergenceError(f"beta*hbar_omega={x!r} too small: mixing angle diverges")
    return x


def theta_of_beta(model: DeformedModel, beta: float) -> float:
    """Mixing angle ``artanh(exp(-beta hbar_omega / 2))``."""
    x = _scaled_beta(model, beta)
    y = math.exp(-0.5 * x)
    if y < 0.5:
        return math.atanh(y)
    # 1 - y straight from expm1 keeps the small denominator accurate
    return 0.5 * (math.log1p(y) - math.log(-math.expm1(-0.5 * x)))


def bose_einstein(model: DeformedModel, beta: float) -> float:
    """Mean occupation ``1 / (exp(beta hbar_omega) - 1)``; equals sinh^2(theta)."""
    x = _scaled_beta(model, beta)
    return math.exp(-x) / -math.expm1(-x)


def cosh2_theta(model: DeformedModel, beta: float) -> float:
    """``cosh^2(theta) = 1 / (1 - exp(-beta hbar_omega))``."""
    return -1.0 / math.expm1(-_scaled_beta(model, beta))


@dataclass(frozen=True)
class PartitionSum:
    """Truncated partition sum.

    ``log_weights[n] = -beta E_n``; ``tail`` bounds the discarded levels
    relative to ``value``.
    """

    log_z: float
    tail: float
    log_weights: np.ndarray

    @property
    def value(self) -> float:
        return math.exp(self.log_z)

    @property
    def n_max(self) -> int:
        return self.log_weights.size - 1

    def probabilities(self) -> np.ndarray:
        p = np.exp(self.log_weights - self.log_z)
        p.setflags(write=False)
        return p


def _log_sum_exp(lw: np.ndarray) -> float:
    m = float(np.max(lw))
    return m + math.log(math.fsum(np.exp(lw - m)))


def _gap_lower_bound(model: DeformedModel, n_max: int) -> float:
    # minimum level gap from n_max onwards, scanned over a window and clamped by the asymptotic gap
    top = 4 * n_max + 8
    levels = energy_array(model, top)
    g = float(np.min(np.diff(levels[n_max:])))
    if not model.is_linear:
        if model.p > model.q:
            raise TruncationError("level gaps vanish asymptotically (p > q); the partition sum cannot be bounded")
        if model.p == model.q:
            g = min(g, model.hbar_omega)
    if not g > 0:
        raise TruncationError("non-increasing levels beyond the truncation")
    return g


def partition_sum(model: DeformedModel, beta: float, trunc: Truncation) -> PartitionSum:
    """Boltzmann sum over ``n <= n_max`` with a geometric tail bound.

    Raises
    ------
    TruncationError
        The tail bound is not below ``tail_tol`` times the partial sum.
    """
    beta = _check_beta(beta)
    n_max = trunc.n_max
    levels = energy_array(model, n_max + 1)
    lw = -beta * levels[: n_max + 1]
    lw.setflags(write=False)
    log_z = _log_sum_exp(lw)
    g = _gap_lower_bound(model, n_max)
    log_tail = -beta * levels[n_max + 1] - math.log(-math.expm1(-beta * g))
    tail = math.exp(log_tail - log_z)
    if not tail < trunc.tail_tol:
        raise TruncationError(
            f"partition tail bound {tail:.3e} >= tail_tol {trunc.tail_tol:.1e} at n_max={n_max}, beta={beta!r}"
        )
    result = PartitionSum(log_z, tail, lw)
    if model.is_linear:
        log_closed = partition_closed_form_log(model, beta)
        if not abs(log_closed - log_z) <= tail + 1e-13 * (1.0 + abs(log_z)):
            raise NumericalError(f"partition sum ln Z = {log_z!r} disagrees with closed form {log_closed!r}")
    return result


def partition(model: DeformedModel, beta: float, trunc: Truncation) -> float:
    """Truncated partition function ``Z(beta)``."""
    return partition_sum(model, beta, trunc).value


def partition_closed_form_log(model: DeformedModel, beta: float) -> float:
    """``-beta E0 - ln(1 - exp(-beta hbar_omega))`` for a linear spectrum."""
    if not model.is_linear:
        raise UnsupportedSpectrumError("closed-form partition function needs a linear spectrum")
    beta = _check_beta(beta)
    return -beta * model.spectrum.e0 - math.log(-math.expm1(-beta * model.hbar_omega))


def partition_closed_form(model: DeformedModel, beta: float) -> float:
    """``exp(-beta E0) / (1 - exp(-beta hbar_omega))`` for a linear spectrum."""
    return math.exp(partition_closed_form_log(model, beta))


@dataclass(frozen=True)
class ThermalContext:
    beta: float
    hbar_omega: float
    theta: float
    cosh2: float
    sinh2: float
    z_partition: float
    log_z: float
    tail: float


def thermal_context(model: DeformedModel, beta: float, trunc: Truncation) -> ThermalContext:
    ps = partition_sum(model, beta, trunc)
    return ThermalContext(
        beta=float(beta),
        hbar_omega=model.hbar_omega,
        theta=theta_of_beta(model, beta),
        cosh2=cosh2_theta(model, beta),
        sinh2=bose_einstein(model, beta),
        z_partition=ps.value,
        log_z=ps.log_z,
        tail=ps.tail,
    )


@dataclass(frozen=True)
class ThermalVacuum:
    """Schmidt coefficients ``C_n = sqrt(exp(-beta E_n) / Z)`` of the thermal vacuum."""

    coeffs: np.ndarray
    tail_weight: float
    beta: float
    log_z: float


def thermal_vacuum(model: DeformedModel, beta: float, trunc: Truncation) -> ThermalVacuum:
    ps = partition_sum(model, beta, trunc)
    c = np.exp(0.5 * (ps.log_weights - ps.log_z))
    c.setflags(write=False)
    return ThermalVacuum(c, ps.tail, float(beta), ps.log_z)


def internal_energy(model: DeformedModel, beta: float, trunc: Truncation) -> float:
    """``U = sum p_n E_n``."""
    ps = partition_sum(model, beta, trunc)
    return math.fsum(ps.probabilities() * energy_array(model, trunc.n_max))


def free_energy(model: DeformedModel, beta: float, trunc: Truncation) -> float:
    """``F = -ln Z / beta``."""
    return -partition_sum(model, beta, trunc).log_z / _check_beta(beta)


def vacuum_expect_num(model: DeformedModel, beta: float, trunc: Truncation) -> float:
    """Thermal-vacuum expectation of the dimensionless level, ``sum C_n^2 e(n)``.

    ``e`` is the energy level in units of ``hbar_omega``, so the result is
    ``U / hbar_omega``.
    """
    tv = thermal_vacuum(model, beta, trunc)
    return math.fsum(tv.coeffs**2 * spectrum_e_array(model, trunc.n_max))


@dataclass(frozen=True)
class BogoliubovOps:
    """Thermal ladder matrices on the truncated physical basis."""

    a_minus: np.ndarray
    a_plus: np.ndarray
    theta: float


def bogoliubov_ops(model: DeformedModel, beta: float, trunc: Truncation) -> BogoliubovOps:
    """``A-(beta) = cosh(theta) a- - sinh(theta) a+`` and its partner."""
    theta = theta_of_beta(model, beta)
    ch, sh = math.cosh(theta), math.sinh(theta)
    lm: LadderMatrices = ladder_matrices(model, trunc)
    am = ch * lm.a_minus - sh * lm.a_plus
    ap = ch * lm.a_plus - sh * lm.a_minus
    am.setflags(write=False)
    ap.setflags(write=False)
    return BogoliubovOps(am, ap, theta)


def bogoliubov_diagonal(model: DeformedModel, beta: float, trunc: Truncation) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal of ``A+(beta) A-(beta)`` and its closed form, for ``n <= n_max - 2``.

    The closed form is ``cosh^2(theta) e(n) + sinh^2(theta) e(n + 1)`` with
    the ladder eigenvalues.
    """
    ops = bogoliubov_ops(model, beta, trunc)
    diag = np.diag(ops.a_plus @ ops.a_minus)[: trunc.n_max - 1]
    e = ladder_e_array(model, trunc.n_max)
    ch2, sh2 = math.cosh(ops.theta) ** 2, math.sinh(ops.theta) ** 2
    closed = ch2 * e[: trunc.n_max - 1] + sh2 * e[1 : trunc.n_max]
    return diag, closed


def thermal_expect_ApAm(model: DeformedModel, beta: float, trunc: Truncation, *, check: bool = True) -> float:
    """``sum p_n [cosh^2(theta) e(n) + sinh^2(theta) e(n + 1)]`` with ``e = E / hbar_omega``.

    For a linear spectrum the value is also compared against
    ``sinh^2(theta) + cosh(2 theta) U / hbar_omega`` when ``check`` is set.
    """
    ps = partition_sum(model, beta, trunc)
    p = ps.probabilities()
    e = spectrum_e_array(model, trunc.n_max + 1)
    ch2 = cosh2_theta(model, beta)
    sh2 = bose_einstein(model, beta)
    value = math.fsum(p * (ch2 * e[:-1] + sh2 * e[1:]))
    if check and model.is_linear:
        closed = thermal_expect_ApAm_linear(model, beta, trunc)
        if not abs(value - closed) <= 1e-8 * max(1.0, abs(closed)):
            raise NumericalError(f"thermal expectation {value!r} disagrees with linear closed form {closed!r}")
    return value


def thermal_expect_ApAm_linear(model: DeformedModel, beta: float, trunc: Truncation) -> float:
    """``sinh^2(theta) + cosh(2 theta) U / hbar_omega``; linear spectra only."""
    if not model.is_linear:
        raise UnsupportedSpectrumError("the closed form needs e(n+1) = e(n) + 1 (linear spectrum)")
    u = internal_energy(model, beta, trunc) / model.hbar_omega
    ch2 = cosh2_theta(model, beta)
    sh2 = bose_einstein(model, beta)
    return sh2 + (ch2 + sh2) * u


def generalized_vacuum(model: DeformedModel, beta: float, trunc: Truncation) -> np.ndarray:
    """Thermal vacuum built by repeated two-mode creation on the double vacuum.

    Returns the ``(n_max+1)^2`` coefficient matrix of
    ``Z^{-1/2} sum_n exp(-beta E_n / 2) (a+ (x) a+)^n |0,0> / rho(n)``. Each
    creation step is divided by ``sqrt(e(n))`` on both factors so that the
    ``1 / rho(n)`` normalisation is applied incrementally and nothing
    overflows.
    """
    ps = partition_sum(model, beta, trunc)
    lm = ladder_matrices(model, trunc)
    e = ladder_e_array(model, trunc.n_max)
    amp = np.exp(0.5 * (ps.log_weights - ps.log_z))
    size = trunc.size
    psi = np.zeros((size, size))
    v = np.zeros(size)
    v[0] = 1.0
    psi += amp[0] * np.outer(v, v)
    for n in range(1, size):
        v = (lm.a_plus @ v) / math.sqrt(e[n])
        psi += amp[n] * np.outer(v, v)
    psi.setflags(write=False)
    return psi


def annihilation_residual(model: DeformedModel, beta: float, trunc: Truncation) -> float:
    """``|| A-(beta) |0(beta)> ||`` with the operator on the physical factor.

    Diagnostic only; no particular value is expected.
    """
    tv = thermal_vacuum(model, beta, trunc)
    ops = bogoliubov_ops(model, beta, trunc)
    psi = np.diag(tv.coeffs)
    return float(np.linalg.norm(ops.a_minus @ psi))


def thermal_qubit(e0: float, e1: float, beta: float) -> tuple[float, float]:
    """Amplitudes ``(c0, c1)`` of the two-level thermal vacuum.

    ``c0^2 = 1 / (1 + exp(-beta (e1 - e0)))`` and ``c1^2 = 1 - c0^2``, both
    evaluated without overflow.
    """
    e0, e1 = float(e0), float(e1)
    if not e1 > e0:
        raise DegenerateLevelsError(f"need e1 > e0, got e0={e0!r}, e1={e1!r}")
    beta = float(beta)
    if not (beta >= 0 and not math.isnan(beta)):
        raise DomainError(f"beta must be >= 0, got {beta!r}")
    x = beta * (e1 - e0)
    u = math.exp(-x)
    s = 1.0 + u
    return math.sqrt(1.0 / s), math.sqrt(u / s)
