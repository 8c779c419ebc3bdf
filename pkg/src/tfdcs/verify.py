"""Verification suites: every library identity as a recorded lhs/rhs check.

A suite run yields a list of :class:`CheckRecord` objects and a summary. The
report is a pure function of the inputs (models, beta grid, tolerance
override), so two runs serialise to identical bytes unless timings are
requested.
"""

from __future__ import annotations

import cmath
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterable

import numpy as np

from . import coherent as coh
from . import quasiprob as qp
from . import thermal as th
from .errors import DivergenceError
from .model import (
    DeformedModel,
    Spectrum,
    Truncation,
    auto_raise,
    energy_array,
    ladder_e_array,
    ladder_matrices,
    rho_bg_log,
    rho_kp_log,
)
from .quadrature import quad_semiinfinite
from .specfun import (
    ParamLists,
    bessel_k,
    has_closed_form_weight,
    hyp_pfq,
    log_meijer_weight,
    meijer_moment_rhs,
    pochhammer_log,
)

SCHEMA_VERSION = 1
SUITES = ("specfun", "thermal", "coherent", "quasiprob")

REFERENCE_BATTERY: dict[str, DeformedModel] = {
    "M0": DeformedModel(ParamLists(), 1.0, Spectrum.linear(0.5)),
    "M0g": DeformedModel(ParamLists(), 1.0, Spectrum.generalized()),
    "M1": DeformedModel(ParamLists((), (2.0,)), 1.0, Spectrum.generalized()),
    "M1L": DeformedModel(ParamLists((), (2.0,)), 1.0, Spectrum.linear(0.0)),
}
REFERENCE_BETAS = (0.5, math.log(4.0), 3.0)
Z_MODULI = (0.25, 0.5, 1.0, 2.0)
Z_PHASES = (0.0, math.pi / 3, math.pi)
OBSERVABLE_SEED = 20240517


def label_grid() -> list[complex]:
    return [cmath.rect(r, ph) for r in Z_MODULI for ph in Z_PHASES]


@dataclass(frozen=True)
class CheckRecord:
    """One verified identity.

    ``mode`` is ``"abs"`` (``|lhs - rhs| <= tol``), ``"rel"``
    (``|lhs - rhs| <= tol |rhs|``), ``"le"`` (``lhs <= rhs + tol``),
    ``"info"`` (diagnostic, always passes) or ``"skip"``.
    """

    suite: str
    name: str
    anchor: str
    model: str | None
    beta: float | None
    lhs: float | None
    rhs: float | None
    tol: float | None
    mode: str
    passed: bool
    reason: str | None = None
    runtime: float = 0.0

    def to_dict(self, timings: bool = False) -> dict[str, Any]:
        d = {
            "suite": self.suite,
            "name": self.name,
            "anchor": self.anchor,
            "model": self.model,
            "beta": self.beta,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "tol": self.tol,
            "mode": self.mode,
            "pass": self.passed,
            "skipped": self.mode == "skip",
            "reason": self.reason,
        }
        if timings:
            d["runtime_s"] = self.runtime
        return d


def _judge(lhs: float, rhs: float, tol: float, mode: str) -> bool:
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        return False
    if mode == "abs":
        return abs(lhs - rhs) <= tol
    if mode == "rel":
        return abs(lhs - rhs) <= tol * abs(rhs)
    if mode == "le":
        return lhs <= rhs + tol
    raise ValueError(f"unknown comparison mode {mode!r}")


class Recorder:
    """Collects records for one (suite, model) task."""

    def __init__(self, suite: str, model: str | None, tol_override: float | None):
        self.suite = suite
        self.model = model
        self.tol_override = tol_override
        self.records: list[CheckRecord] = []

    def check(
        self,
        name: str,
        anchor: str,
        fn: Callable[[], tuple[float, float]],
        tol: float,
        mode: str = "abs",
        beta: float | None = None,
    ) -> None:
        t0 = time.perf_counter()
        lhs, rhs = fn()
        dt = time.perf_counter() - t0
        tol = self.tol_override if self.tol_override is not None else tol
        lhs, rhs = float(lhs), float(rhs)
        self.records.append(
            CheckRecord(self.suite, name, anchor, self.model, beta, lhs, rhs, tol, mode, _judge(lhs, rhs, tol, mode),
                        runtime=dt)
        )

    def info(self, name: str, anchor: str, value: float, beta: float | None = None) -> None:
        self.records.append(
            CheckRecord(self.suite, name, anchor, self.model, beta, float(value), None, None, "info", True)
        )

    def skip(self, name: str, anchor: str, reason: str, beta: float | None = None) -> None:
        self.records.append(
            CheckRecord(self.suite, name, anchor, self.model, beta, None, None, None, "skip", True, reason)
        )


def _max_abs(values: Iterable[float]) -> float:
    return float(max((abs(v) for v in values), default=0.0))


# --- specfun --------------------------------------------------------------------------------------


def suite_specfun(rec: Recorder, models: Iterable[DeformedModel] = ()) -> None:
    rec.check(
        "exp-series-collapse",
        "pFq with matching upper/lower lists equals exp",
        lambda: (
            max(abs(hyp_pfq(ParamLists((1.5, 3.0), (3.0, 1.5)), x) / math.exp(x) - 1.0) for x in np.linspace(-10, 10, 41)),
            0.0,
        ),
        1e-12,
    )
    rec.check(
        "pochhammer-step",
        "ln (x)_{n+1} - ln (x)_n = ln(x + n)",
        lambda: (
            _max_abs(
                pochhammer_log(x, n + 1) - pochhammer_log(x, n) - math.log(x + n)
                for x in (0.5, 1.0, 2.5)
                for n in range(51)
            ),
            0.0,
        ),
        1e-12,
    )
    rec.check(
        "bessel-half-order",
        "K_1/2 closed form",
        lambda: (bessel_k(0.5, 1.0), math.sqrt(math.pi / 2.0) * math.exp(-1.0)),
        1e-10,
        "rel",
    )
    x = 1.0 + 2.0j
    params = ParamLists((), (2.0,))
    rec.check(
        "pFq-conjugation",
        "pFq(conj x) = conj pFq(x) for real parameters",
        lambda: (abs(hyp_pfq(params, x.conjugate()) - hyp_pfq(params, x).conjugate()), 0.0),
        0.0,
    )
    families = [ParamLists(), ParamLists((), (2.0,))]
    for m in models:
        if m.params not in families:
            families.append(m.params)
    for fam in families:
        label = f"moment-oracle[p={fam.p},q={fam.q},b={list(fam.b)},a={list(fam.a)}]"
        if not has_closed_form_weight(fam):
            rec.skip(label, "Meijer weight moments", "no closed-form weight for this (p, q)")
            continue

        def moments(fam=fam):
            worst = 0.0
            for n in range(11):
                got = quad_semiinfinite(
                    lambda t: np.exp(log_meijer_weight(fam, t) + n * np.log(t)), 1e-300, rtol=1e-10
                ).value
                want = math.exp(meijer_moment_rhs(fam, n + 1))
                worst = max(worst, abs(got - want) / want)
            return worst, 0.0

        rec.check(label, "Meijer weight moments match the Gamma-product formula", moments, 1e-6)


# --- thermal --------------------------------------------------------------------------------------


def _fd(fn: Callable[[float], float], beta: float) -> float:
    h = 1e-5 * beta
    return (fn(beta + h) - fn(beta - h)) / (2.0 * h)


def suite_thermal(rec: Recorder, model: DeformedModel, betas: Iterable[float], trunc: Truncation) -> None:
    for beta in betas:
        tr = auto_raise(lambda t: (th.partition_sum(model, beta, t), t)[1], trunc)

        def theta_tanh():
            return math.tanh(th.theta_of_beta(model, beta)), math.exp(-0.5 * beta * model.hbar_omega)

        rec.check("theta-tanh", "tanh(theta) = exp(-beta hbar_omega / 2)", theta_tanh, 1e-12, beta=beta)

        def hyperbolic_unit():
            t = th.theta_of_beta(model, beta)
            return math.cosh(t) ** 2 - math.sinh(t) ** 2, 1.0

        rec.check("cosh2-minus-sinh2", "cosh^2 - sinh^2 = 1", hyperbolic_unit, 1e-12, beta=beta)

        rec.check(
            "sinh2-is-nT",
            "sinh^2(theta) equals the Bose-Einstein occupation",
            lambda: (math.sinh(th.theta_of_beta(model, beta)) ** 2, th.bose_einstein(model, beta)),
            1e-12,
            beta=beta,
        )
        rec.check(
            "vacuum-normalization",
            "sum of squared Schmidt coefficients is one",
            lambda: (math.fsum(th.thermal_vacuum(model, beta, tr).coeffs ** 2), 1.0),
            tr.tail_tol,
            beta=beta,
        )
        if model.is_linear:
            rec.check(
                "number-closure",
                "vacuum level expectation equals nT + E0/hbar_omega",
                lambda: (
                    th.vacuum_expect_num(model, beta, tr),
                    th.bose_einstein(model, beta) + model.spectrum.e0 / model.hbar_omega,
                ),
                1e-10,
                beta=beta,
            )
            rec.check(
                "partition-closed-form",
                "linear-spectrum partition function",
                lambda: (th.partition(model, beta, tr), th.partition_closed_form(model, beta)),
                1e-12,
                "rel",
                beta=beta,
            )
        rec.check(
            "vacuum-number-is-energy",
            "vacuum level expectation equals U / hbar_omega",
            lambda: (th.vacuum_expect_num(model, beta, tr), th.internal_energy(model, beta, tr) / model.hbar_omega),
            1e-12,
            "rel",
            beta=beta,
        )
        rec.check(
            "energy-from-logZ",
            "U = -d ln Z / d beta (central difference)",
            lambda: (
                -_fd(lambda b: th.partition_sum(model, b, tr).log_z, beta),
                th.internal_energy(model, beta, tr),
            ),
            1e-6,
            "rel",
            beta=beta,
        )
        rec.check(
            "free-energy-ode",
            "beta dF/dbeta + F = hbar_omega <level>",
            lambda: (
                beta * _fd(lambda b: th.free_energy(model, b, tr), beta) + th.free_energy(model, beta, tr),
                model.hbar_omega * th.vacuum_expect_num(model, beta, tr),
            ),
            1e-6,
            "rel",
            beta=beta,
        )

        def bogoliubov():
            diag, closed = th.bogoliubov_diagonal(model, beta, tr)
            return float(np.max(np.abs(diag - closed) / np.maximum(np.abs(closed), 1.0))), 0.0

        rec.check("bogoliubov-diagonal", "diag A+(beta) A-(beta) = cosh^2 e(n) + sinh^2 e(n+1)", bogoliubov,
                  1e-12, beta=beta)
        if model.is_linear:
            rec.check(
                "thermal-ApAm-closed-form",
                "thermal ApAm equals sinh^2 + cosh(2 theta) U / hbar_omega",
                lambda: (
                    th.thermal_expect_ApAm(model, beta, tr, check=False),
                    th.thermal_expect_ApAm_linear(model, beta, tr),
                ),
                1e-8,
                beta=beta,
            )
        else:
            rec.skip("thermal-ApAm-closed-form", "thermal ApAm linear closed form",
                     "closed form needs e(n+1) = e(n) + 1 (linear spectrum)", beta=beta)
        rec.check(
            "generalized-vacuum",
            "two-mode creation series reproduces the thermal vacuum",
            lambda: (
                float(np.max(np.abs(th.generalized_vacuum(model, beta, tr)
                                    - np.diag(th.thermal_vacuum(model, beta, tr).coeffs)))),
                0.0,
            ),
            1e-12,
            beta=beta,
        )
        rec.info("vacuum-annihilation-residual", "norm of A-(beta) applied to the thermal vacuum",
                 th.annihilation_residual(model, beta, tr), beta=beta)

    if model.is_linear:

        def flattening():
            grid = np.geomspace(1.0, 0.1, 10)
            spreads = []
            for b in grid:
                tv = auto_raise(lambda t: th.thermal_vacuum(model, b, t), trunc)
                c2 = tv.coeffs**2
                spreads.append(float(np.max(np.abs(np.diff(c2)))))
            steps = np.diff(spreads)
            # count of non-decreasing steps; must be zero
            return float(np.sum(steps >= 0)), 0.0

        rec.check("high-temperature-flattening", "weights flatten monotonically as beta drops", flattening, 0.0)


def suite_qubit(rec: Recorder) -> None:
    grid = np.geomspace(1e-3, 1e3, 100)

    def closure():
        return _max_abs(c0 * c0 + c1 * c1 - 1.0 for c0, c1 in (th.thermal_qubit(0.0, 1.0, b) for b in grid)), 0.0

    rec.check("qubit-normalization", "c0^2 + c1^2 = 1", closure, 1e-15)

    def monotone():
        c0 = np.array([th.thermal_qubit(0.0, 1.0, b)[0] for b in grid])
        bad = int(np.sum(np.diff(c0) < 0))
        return float(bad), 0.0

    rec.check("qubit-monotone", "c0 rises monotonically with beta", monotone, 0.0)
    rec.check("qubit-cold-limit", "beta -> inf gives (1, 0)",
              lambda: (abs(th.thermal_qubit(0.0, 1.0, 1e4)[0] - 1.0) + th.thermal_qubit(0.0, 1.0, 1e4)[1], 0.0), 1e-15)
    rec.check("qubit-hot-limit", "beta -> 0 gives (1/sqrt2, 1/sqrt2)",
              lambda: (_max_abs(np.array(th.thermal_qubit(0.0, 1.0, 1e-12)) - math.sqrt(0.5)), 0.0), 1e-12)
    rec.check("qubit-ln3", "beta (e1 - e0) = ln 3 gives (sqrt3/2, 1/2)",
              lambda: (_max_abs(np.array(th.thermal_qubit(0.0, math.log(3.0), 1.0)) - (math.sqrt(3) / 2, 0.5)), 0.0),
              1e-15)


# --- coherent -------------------------------------------------------------------------------------


def _convergent(model: DeformedModel, kind: coh.Kind, z: complex, beta: float) -> bool:
    try:
        coh.cs_norm_log(model, kind, z, beta)
    except DivergenceError:
        return False
    return True


def suite_coherent(rec: Recorder, model: DeformedModel, betas: Iterable[float], trunc: Truncation) -> None:
    labels = label_grid()
    rec.check(
        "bg-kp-duality",
        "rho_BG(n) rho_KP(n) = (n!)^2",
        lambda: (_max_abs(rho_bg_log(model, n) + rho_kp_log(model, n) - 2 * math.lgamma(n + 1.0) for n in range(61)),
                 0.0),
        1e-12,
    )
    for beta in betas:

        def eigen():
            return max(auto_raise(lambda t: coh.eigen_residual(model, z, beta, t), trunc) for z in labels), 0.0

        rec.check("bg-eigen-relation", "a- c = z cosh(theta) c for BG states", eigen, 1e-10, beta=beta)

        if model.p == 0 and model.q == 0:

            def collapse():
                worst = 0.0
                for z in labels:
                    bg = auto_raise(lambda t: coh.cs_build(model, coh.Kind.BG, z, beta, t), trunc)
                    kp = auto_raise(lambda t: coh.cs_build(model, coh.Kind.KP, z, beta, Truncation(bg.n_max, t.tail_tol)),
                                    trunc)
                    worst = max(worst, float(np.max(np.abs(bg.coeffs - kp.coeffs))))
                return worst, 0.0

            rec.check("canonical-collapse", "BG and KP coincide for p = q = 0", collapse, 1e-14, beta=beta)

        for kind in coh.Kind:
            zs = [z for z in labels if _convergent(model, kind, z, beta)]
            if not zs:
                rec.skip(f"overlap-{kind.value}", "overlap laws", "normalisation series diverges on the label grid",
                         beta=beta)
                continue
            # one shared truncation, fixed by the largest label (tails grow with |z|)
            widest = max(zs, key=abs)
            tk = auto_raise(lambda t: (coh.cs_build(model, kind, widest, beta, t), t)[1], trunc)
            st = {z: coh.cs_build(model, kind, z, beta, tk) for z in zs}
            pairs = [(z, zp) for z in zs for zp in zs]

            rec.check(
                f"overlap-series-{kind.value}",
                "series overlap equals the hypergeometric ratio",
                lambda: (max(abs(coh.overlap_series(st[z], st[zp]) - coh.overlap(model, kind, z, zp, beta))
                             for z, zp in pairs), 0.0),
                1e-10,
                beta=beta,
            )
            rec.check(
                f"overlap-bound-{kind.value}",
                "|overlap| <= 1",
                lambda: (max(abs(coh.overlap(model, kind, z, zp, beta)) for z, zp in pairs), 1.0),
                1e-12,
                "le",
                beta=beta,
            )
            if model.p == 0 and model.q == 0:
                c2 = th.cosh2_theta(model, beta)
                rec.check(
                    f"overlap-gaussian-{kind.value}",
                    "|overlap|^2 = exp(-|z - z'|^2 cosh^2)",
                    lambda: (
                        max(abs(abs(coh.overlap(model, kind, z, zp, beta)) ** 2 - math.exp(-abs(z - zp) ** 2 * c2))
                            for z, zp in pairs),
                        0.0,
                    ),
                    1e-10,
                    beta=beta,
                )

            def continuity():
                worst = -math.inf
                ch = math.sqrt(th.cosh2_theta(model, beta))
                e = ladder_e_array(model, tk.n_max + 1)
                dz = 1e-6 * cmath.exp(0.25j * math.pi)
                for z in zs:
                    a = st[z]
                    b = coh.cs_build(model, kind, z + dz, beta, tk)
                    support = np.nonzero(np.abs(a.coeffs) > 0)[0]
                    k = 10.0 * ch * math.sqrt(float(np.max(e[support + 1])))
                    worst = max(worst, float(np.linalg.norm(a.coeffs - b.coeffs)) - k * abs(dz))
                return worst, 0.0

            rec.check(f"label-continuity-{kind.value}", "Lipschitz bound in the label", continuity, 0.0, "le",
                      beta=beta)

            def phase_cov():
                worst = 0.0
                phi = 0.7
                n = np.arange(tk.size)
                for z in zs:
                    b = coh.cs_build(model, kind, z * cmath.exp(1j * phi), beta, tk)
                    worst = max(worst, float(np.max(np.abs(b.coeffs - st[z].coeffs * np.exp(1j * n * phi)))))
                return worst, 0.0

            rec.check(f"phase-covariance-{kind.value}", "z -> z e^{i phi} multiplies c_n by e^{i n phi}",
                      phase_cov, 1e-13, beta=beta)

        def two_mode():
            z, s = labels[4], labels[2]
            tm = auto_raise(lambda t: coh.two_mode_build(model, coh.Kind.BG, z, s, beta, t), trunc)
            sv = np.linalg.svd(tm.coeffs, compute_uv=False)
            rank_excess = float(sv[1] / sv[0])
            norm_err = abs(float(np.linalg.norm(tm.coeffs)) - 1.0)
            lm = ladder_matrices(model, Truncation(tm.physical.n_max, trunc.tail_tol))
            w = coh.scaled_label(model, z, beta)
            act = (lm.a_minus @ tm.coeffs - w * tm.coeffs)[:-1]
            return max(rank_excess, norm_err, float(np.linalg.norm(act))), 0.0

        rec.check("two-mode-product", "rank one, unit norm, eigen action on the physical factor", two_mode, 1e-10,
                  beta=beta)

    if has_closed_form_weight(model.params):
        first: dict[int, float] = {}
        for beta in betas:

            def moments():
                worst = 0.0
                for n in range(9):
                    mc = coh.identity_moment_check(model, n, beta)
                    first.setdefault(n, mc.lhs)
                    worst = max(worst, mc.rel_diff)
                return worst, 0.0

            rec.check("identity-moments", "measure moments reproduce rho_BG(n), n = 0..8", moments, 1e-6, beta=beta)

            rec.check(
                "identity-beta-independence",
                "measure moments do not depend on beta",
                lambda: (
                    max(abs(coh.identity_moment_check(model, n, beta).lhs - first[n]) / first[n] for n in range(9)),
                    0.0,
                ),
                1e-10,
                beta=beta,
            )
    else:
        rec.skip("identity-moments", "measure moments", "no closed-form weight for this (p, q)")

    rec.check(
        "doot-substitution",
        "ordered-product rule evaluates func at |z|^2 cosh^2",
        lambda: (coh.doot_expect(model, lambda v: v * v, 2.0 / math.sqrt(th.cosh2_theta(model, 1.0)), 1.0), 16.0),
        1e-12,
        "rel",
    )


# --- quasiprob ------------------------------------------------------------------------------------


def suite_quasiprob(rec: Recorder, model: DeformedModel, betas: Iterable[float], trunc: Truncation) -> None:
    rng = np.random.default_rng(OBSERVABLE_SEED)
    for beta in betas:
        tr = auto_raise(lambda t: (th.partition_sum(model, beta, t), t)[1], trunc)

        def purification():
            a = qp.partial_trace_tilde(th.thermal_vacuum(model, beta, tr)).weights
            b = qp.density_build(model, beta, tr).weights
            mask = b > 1e-290
            return float(np.max(np.abs(a[mask] - b[mask]) / b[mask])), 0.0

        rec.check("purification", "partial trace of the thermal vacuum is the Boltzmann density", purification,
                  1e-12, beta=beta)

        observables = rng.uniform(-1.0, 1.0, size=(5, tr.size))

        def tfd_equivalence(observables=observables):
            tv = th.thermal_vacuum(model, beta, tr)
            return _max_abs(qp.vacuum_expectation(tv, o) - qp.thermal_average(model, o, beta, tr)
                            for o in observables), 0.0

        rec.check("tfd-equivalence", "thermal-vacuum expectation equals the ensemble average", tfd_equivalence,
                  1e-12, beta=beta)
        rec.check(
            "average-of-energy",
            "ensemble average of E_n is U",
            lambda: (qp.thermal_average(model, energy_array(model, tr.n_max), beta, tr),
                     th.internal_energy(model, beta, tr)),
            1e-12,
            "rel",
            beta=beta,
        )
        rec.check(
            "husimi-at-origin",
            "Q(0) = p_0",
            lambda: (qp.husimi_q(model, 0.0, beta, tr), qp.density_build(model, beta, tr).weights[0]),
            1e-12,
            beta=beta,
        )
        rec.check(
            "q-factorization",
            "whole-space Q is the product of factors",
            lambda: (qp.husimi_q_whole(model, 0.5, 0.3j, beta, tr),
                     qp.husimi_q(model, 0.5, beta, tr) * qp.husimi_q(model, 0.3j, beta, tr)),
            0.0,
            beta=beta,
        )
        if has_closed_form_weight(model.params):
            rec.check("q-normalization", "integral of Q over the measure is one",
                      lambda: (qp.q_normalization(model, beta, tr), 1.0), 1e-6, beta=beta)
            rec.check("trace-via-moments", "trace through the coherent-state moment sum is one",
                      lambda: (qp.trace_via_moments(model, beta, tr), 1.0), 1e-6, beta=beta)
        else:
            rec.skip("q-normalization", "integral of Q", "no closed-form weight for this (p, q)", beta=beta)

        if not model.is_linear:
            reason = "P-function needs a linear spectrum"
            rec.skip("p-moments", "P moment problem", reason, beta=beta)
            rec.skip("average-via-p", "averages through P", reason, beta=beta)
            continue
        if not has_closed_form_weight(model.params):
            rec.skip("p-moments", "P moment problem", "no closed-form weight for this (p, q)", beta=beta)
            continue

        def p_moments():
            return max(qp.p_moment_check(model, n, beta, tr).rel_diff for n in range(9)), 0.0

        rec.check("p-moments", "P moments reproduce p_n rho(n) / Gamma(a/b), n = 0..8", p_moments, 1e-5, beta=beta)
        rec.check("average-via-p-trace", "P representation gives unit trace",
                  lambda: (qp.average_via_p(model, np.ones(tr.size), beta, tr), 1.0), 1e-5, "rel", beta=beta)
        rec.check(
            "average-via-p-energy",
            "P representation reproduces U",
            lambda: (qp.average_via_p(model, energy_array(model, tr.n_max), beta, tr),
                     qp.thermal_average(model, energy_array(model, tr.n_max), beta, tr)),
            1e-5,
            "rel",
            beta=beta,
        )
        if model.p == 0 and (model.q == 0 or model.params.b[0] >= 1.0):
            rec.check(
                "p-at-origin",
                "P(0) = e^{beta hbar_omega} - 1 when the weight is finite at 0",
                lambda: (qp.p_function_linear(model, 0.0, beta), math.expm1(beta * model.hbar_omega)),
                1e-12,
                "rel",
                beta=beta,
            )
        rec.check(
            "p-factorization",
            "whole-space P is the product of factors",
            lambda: (qp.p_function_whole(model, 0.5, 0.3j, beta),
                     qp.p_function_linear(model, 0.5, beta) * qp.p_function_linear(model, 0.3j, beta)),
            0.0,
            beta=beta,
        )


# --- driver ---------------------------------------------------------------------------------------


@dataclass(frozen=True)
class VerifyReport:
    suites: tuple[str, ...]
    models: tuple[str, ...]
    betas: tuple[float, ...]
    records: tuple[CheckRecord, ...]

    @property
    def n_failed(self) -> int:
        return sum(1 for r in self.records if not r.passed)

    @property
    def overall_pass(self) -> bool:
        return self.n_failed == 0

    def to_dict(self, timings: bool = False) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "suites": list(self.suites),
            "models": list(self.models),
            "betas": list(self.betas),
            "records": [r.to_dict(timings) for r in self.records],
            "summary": {
                "total": len(self.records),
                "passed": sum(1 for r in self.records if r.passed and r.mode != "skip"),
                "failed": self.n_failed,
                "skipped": sum(1 for r in self.records if r.mode == "skip"),
                "overall_pass": self.overall_pass,
            },
        }


def thread_count() -> int:
    raw = os.environ.get("TFDCS_THREADS", "").strip()
    if raw:
        n = int(raw)
        if n < 1:
            raise ValueError("TFDCS_THREADS must be >= 1")
        return n
    return min(8, os.cpu_count() or 1)


def run_suites(
    suites: Iterable[str],
    battery: dict[str, DeformedModel] | None = None,
    betas: Iterable[float] = REFERENCE_BETAS,
    trunc: Truncation | None = None,
    tol_override: float | None = None,
) -> VerifyReport:
    """Run the selected suites over a model battery.

    Tasks are split by (suite, model) and may run concurrently; records are
    reassembled in task order, so the report does not depend on scheduling.
    """
    suites = tuple(SUITES if "all" in suites else suites)
    for s in suites:
        if s not in SUITES:
            raise ValueError(f"unknown suite {s!r}; choose from {', '.join(SUITES)} or all")
    battery = dict(REFERENCE_BATTERY if battery is None else battery)
    betas = tuple(float(b) for b in betas)
    trunc = trunc or Truncation()

    tasks: list[Callable[[], list[CheckRecord]]] = []

    def make(suite: str, name: str | None, model: DeformedModel | None):
        def task():
            rec = Recorder(suite, name, tol_override)
            if suite == "specfun":
                suite_specfun(rec, battery.values())
            elif suite == "thermal":
                if model is None:
                    suite_qubit(rec)
                else:
                    suite_thermal(rec, model, betas, trunc)
            elif suite == "coherent":
                suite_coherent(rec, model, betas, trunc)
            else:
                suite_quasiprob(rec, model, betas, trunc)
            return rec.records

        return task

    for suite in suites:
        if suite == "specfun":
            tasks.append(make(suite, None, None))
            continue
        for name, model in battery.items():
            tasks.append(make(suite, name, model))
        if suite == "thermal":
            tasks.append(make(suite, None, None))

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        chunks = list(pool.map(lambda f: f(), tasks))
    records = tuple(r for chunk in chunks for r in chunk)
    return VerifyReport(suites, tuple(battery), betas, records)
