"""The deformed-boson family: deformation, spectrum, structure constants, ladders.

A model is fixed by the parameter lists ``a`` (length p) and ``b`` (length q),
the energy unit ``hbar_omega`` and a spectrum kind. The ladder eigenvalue is

    e(n) = n * f(n),   f(n) = prod_j (b_j - 1 + n) / prod_i (a_i - 1 + n),

and the Barut-Girardello structure constants are ``rho(n) = prod_{k<=n} e(k)``.

Two "e" functions exist on purpose. :func:`ladder_e` is the deformation
eigenvalue and drives every matrix element, structure constant and coherent
state. :func:`spectrum_e` is the dimensionless energy ``E_n / hbar_omega``: it
equals :func:`ladder_e` for a generalized spectrum and ``n + E0/hbar_omega``
for a linear one. Thermal weights use :func:`spectrum_e`.
"""

from __future__ import annotations

import enum
import functools
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, TypeVar

import numpy as np

from .errors import DomainError, ModelError, TruncationError
from .specfun import ParamLists, log_gamma, pochhammer_log

DEFAULT_N_MAX = 128
DEFAULT_TAIL_TOL = 1e-12
N_MAX_CAP = 2048
MIN_N_MAX = 4
# eager monotonicity check reaches twice the default cutoff
MONOTONE_CHECK_N = 2 * DEFAULT_N_MAX


class SpectrumKind(str, enum.Enum):
    GENERALIZED = "generalized"
    LINEAR = "linear"


@dataclass(frozen=True)
class Spectrum:
    kind: SpectrumKind = SpectrumKind.GENERALIZED
    e0: float = 0.0

    def __post_init__(self):
        try:
            kind = SpectrumKind(self.kind)
        except ValueError as exc:
            raise ModelError(f"unknown spectrum kind {self.kind!r}") from exc
        e0 = float(self.e0)
        if kind is SpectrumKind.LINEAR:
            if not (math.isfinite(e0) and e0 >= 0):
                raise ModelError(f"linear spectrum offset E0 must be finite and >= 0, got {e0!r}")
        elif e0 != 0.0:
            raise ModelError("E0 only applies to a linear spectrum")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "e0", e0)

    @classmethod
    def generalized(cls) -> "Spectrum":
        return cls(SpectrumKind.GENERALIZED)

    @classmethod
    def linear(cls, e0: float = 0.0) -> "Spectrum":
        return cls(SpectrumKind.LINEAR, e0)

    @property
    def is_linear(self) -> bool:
        return self.kind is SpectrumKind.LINEAR


_MODEL_KEYS = {"p", "q", "a", "b", "hbar_omega", "spectrum"}
_SPECTRUM_KEYS = {"kind", "E0"}


def _number(doc: Mapping, key: str, where: str) -> float:
    val = doc[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ModelError(f"{where}{key} must be a number, got {val!r}")
    return float(val)


def _number_list(doc: Mapping, key: str) -> list[float]:
    val = doc.get(key, [])
    if not isinstance(val, list):
        raise ModelError(f"{key} must be an array")
    out = []
    for v in val:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ModelError(f"{key} entries must be numbers, got {v!r}")
        out.append(float(v))
    return out


@dataclass(frozen=True)
class DeformedModel:
    """One member of the deformed-boson family.

    Construction validates the parameters and checks that the energy levels
    increase strictly up to ``MONOTONE_CHECK_N``.
    """

    params: ParamLists = field(default_factory=ParamLists)
    hbar_omega: float = 1.0
    spectrum: Spectrum = field(default_factory=Spectrum)

    def __post_init__(self):
        if not isinstance(self.params, ParamLists):
            raise ModelError("params must be a ParamLists")
        hw = float(self.hbar_omega)
        if not (math.isfinite(hw) and hw > 0):
            raise ModelError(f"hbar_omega must be finite and > 0, got {hw!r}")
        object.__setattr__(self, "hbar_omega", hw)
        check_monotone(self, MONOTONE_CHECK_N)

    @property
    def p(self) -> int:
        return self.params.p

    @property
    def q(self) -> int:
        return self.params.q

    @property
    def is_linear(self) -> bool:
        return self.spectrum.is_linear

    def to_dict(self) -> dict[str, Any]:
        spec: dict[str, Any] = {"kind": self.spectrum.kind.value}
        if self.is_linear:
            spec["E0"] = self.spectrum.e0
        return {
            "p": self.p,
            "q": self.q,
            "a": list(self.params.a),
            "b": list(self.params.b),
            "hbar_omega": self.hbar_omega,
            "spectrum": spec,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "DeformedModel":
        if not isinstance(doc, Mapping):
            raise ModelError("model document must be a JSON object")
        unknown = set(doc) - _MODEL_KEYS
        if unknown:
            raise ModelError(f"unknown model keys: {sorted(unknown)}")
        a = _number_list(doc, "a")
        b = _number_list(doc, "b")
        for key, vals in (("p", a), ("q", b)):
            if key in doc:
                n = doc[key]
                if isinstance(n, bool) or not isinstance(n, int):
                    raise ModelError(f"{key} must be an integer")
                if n != len(vals):
                    raise ModelError(f"{key}={n} does not match {len(vals)} listed parameters")
        hw = _number(doc, "hbar_omega", "") if "hbar_omega" in doc else 1.0
        sdoc = doc.get("spectrum", {"kind": "generalized"})
        if not isinstance(sdoc, Mapping):
            raise ModelError("spectrum must be an object")
        unknown = set(sdoc) - _SPECTRUM_KEYS
        if unknown:
            raise ModelError(f"unknown spectrum keys: {sorted(unknown)}")
        if "kind" not in sdoc:
            raise ModelError("spectrum.kind is required")
        e0 = _number(sdoc, "E0", "spectrum.") if "E0" in sdoc else 0.0
        try:
            params = ParamLists(tuple(a), tuple(b))
        except DomainError as exc:
            raise ModelError(str(exc)) from exc
        return cls(params, hw, Spectrum(sdoc["kind"], e0))

    @classmethod
    def from_json(cls, text: str) -> "DeformedModel":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelError(f"model file is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)


@dataclass(frozen=True)
class Truncation:
    """Fock-space cutoff and the discarded-weight tolerance."""

    n_max: int = DEFAULT_N_MAX
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if isinstance(self.n_max, bool) or int(self.n_max) != self.n_max:
            raise DomainError(f"n_max must be an integer, got {self.n_max!r}")
        if self.n_max < MIN_N_MAX:
            raise DomainError(f"n_max must be >= {MIN_N_MAX}, got {self.n_max}")
        if not (0 < self.tail_tol < 1):
            raise DomainError(f"tail_tol must lie in (0, 1), got {self.tail_tol!r}")
        object.__setattr__(self, "n_max", int(self.n_max))
        object.__setattr__(self, "tail_tol", float(self.tail_tol))

    @property
    def size(self) -> int:
        return self.n_max + 1

    def raised(self) -> "Truncation":
        """Double ``n_max``; :class:`TruncationError` once the cap is reached."""
        if self.n_max >= N_MAX_CAP:
            raise TruncationError(f"n_max already at the cap {N_MAX_CAP}")
        return Truncation(min(2 * self.n_max, N_MAX_CAP), self.tail_tol)


T = TypeVar("T")


def auto_raise(fn: Callable[[Truncation], T], trunc: Truncation) -> T:
    """Call ``fn(trunc)``, doubling ``n_max`` on truncation failure up to the cap."""
    while True:
        try:
            return fn(trunc)
        except TruncationError:
            if trunc.n_max >= N_MAX_CAP:
                raise
            trunc = trunc.raised()


def _check_n(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"level index must be a nonnegative integer, got {n!r}")
    return int(n)


def deformation_f(model: DeformedModel, n: int) -> float:
    """``prod_j (b_j - 1 + n) / prod_i (a_i - 1 + n)``."""
    n = _check_n(n)
    den = [ai - 1.0 + n for ai in model.params.a]
    if any(d == 0.0 for d in den):
        raise DomainError(f"deformation function is singular at n={n} (a parameter equals 1)")
    num = math.prod(bj - 1.0 + n for bj in model.params.b)
    return num / math.prod(den)


def ladder_e(model: DeformedModel, n: int) -> float:
    """Deformation eigenvalue ``n f(n)``, with ``e(0) = 0``."""
    n = _check_n(n)
    if n == 0:
        return 0.0
    return n * deformation_f(model, n)


def spectrum_e(model: DeformedModel, n: int) -> float:
    """Dimensionless level ``E_n / hbar_omega``."""
    n = _check_n(n)
    if model.is_linear:
        return n + model.spectrum.e0 / model.hbar_omega
    return ladder_e(model, n)


def energy(model: DeformedModel, n: int) -> float:
    return model.hbar_omega * spectrum_e(model, n)


def _rho_bg_log(params: ParamLists, n: int) -> float:
    if n == 0:
        return 0.0
    return (
        math.lgamma(n + 1.0)
        + math.fsum(pochhammer_log(bj, n) for bj in params.b)
        - math.fsum(pochhammer_log(ai, n) for ai in params.a)
    )


def rho_bg_log(model: DeformedModel, n: int) -> float:
    """``ln rho_BG(n) = ln n! + sum ln (b_j)_n - sum ln (a_i)_n``."""
    return _rho_bg_log(model.params, _check_n(n))


def rho_kp_log(model: DeformedModel, n: int) -> float:
    """Klauder-Perelomov constants, ``2 ln n! - ln rho_BG(n)``."""
    n = _check_n(n)
    return 2.0 * math.lgamma(n + 1.0) - rho_bg_log(model, n)


def gamma_ratio_log(model: DeformedModel) -> float:
    """``ln[prod Gamma(a_i) / prod Gamma(b_j)]``."""
    return math.fsum(log_gamma(ai) for ai in model.params.a) - math.fsum(log_gamma(bj) for bj in model.params.b)


def check_monotone(model: DeformedModel, n_top: int) -> None:
    """Reject spectra whose levels fail to increase strictly up to ``n_top``."""
    levels = _levels_cached(model.params, model.spectrum, n_top)
    bad = np.nonzero(~(np.diff(levels) > 0))[0]
    if bad.size:
        n = int(bad[0])
        raise ModelError(f"energy levels are not strictly increasing: e({n + 1}) <= e({n})")


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@functools.lru_cache(maxsize=256)
def _ladder_cached(params: ParamLists, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1, dtype=float)
    num = np.ones_like(n)
    den = np.ones_like(n)
    for bj in params.b:
        num = num * (bj - 1.0 + n)
    for ai in params.a:
        den = den * (ai - 1.0 + n)
    out = np.zeros_like(n)
    out[1:] = n[1:] * (num[1:] / den[1:])
    return _readonly(out)


@functools.lru_cache(maxsize=256)
def _levels_cached(params: ParamLists, spectrum: Spectrum, n_max: int) -> np.ndarray:
    if spectrum.kind is SpectrumKind.LINEAR:
        # the offset cannot change the ordering
        return _readonly(np.arange(n_max + 1, dtype=float))
    return _ladder_cached(params, n_max)


def ladder_e_array(model: DeformedModel, n_max: int) -> np.ndarray:
    """``ladder_e(n)`` for ``n = 0..n_max`` (read-only)."""
    return _ladder_cached(model.params, int(n_max))


def spectrum_e_array(model: DeformedModel, n_max: int) -> np.ndarray:
    """``spectrum_e(n)`` for ``n = 0..n_max``."""
    if model.is_linear:
        return _readonly(np.arange(n_max + 1, dtype=float) + model.spectrum.e0 / model.hbar_omega)
    return ladder_e_array(model, n_max)


def energy_array(model: DeformedModel, n_max: int) -> np.ndarray:
    return _readonly(model.hbar_omega * spectrum_e_array(model, n_max))


@functools.lru_cache(maxsize=256)
def _rho_bg_cached(params: ParamLists, n_max: int) -> np.ndarray:
    return _readonly(np.array([_rho_bg_log(params, n) for n in range(n_max + 1)]))


def rho_bg_log_array(model: DeformedModel, n_max: int) -> np.ndarray:
    return _rho_bg_cached(model.params, int(n_max))


def rho_kp_log_array(model: DeformedModel, n_max: int) -> np.ndarray:
    lf = np.array([math.lgamma(k + 1.0) for k in range(n_max + 1)])
    return _readonly(2.0 * lf - rho_bg_log_array(model, n_max))


@dataclass(frozen=True)
class LadderMatrices:
    """Truncated ladder matrices; ``a_plus`` is the transpose of ``a_minus``."""

    a_minus: np.ndarray
    a_plus: np.ndarray


def ladder_matrices(model: DeformedModel, trunc: Truncation) -> LadderMatrices:
    """Dense ``(n_max+1)^2`` matrices with ``<n-1|a_minus|n> = sqrt(e(n))``."""
    e = ladder_e_array(model, trunc.n_max)
    a_minus = np.diag(np.sqrt(e[1:]), k=1)
    a_plus = np.ascontiguousarray(a_minus.T)
    return LadderMatrices(_readonly(a_minus), _readonly(a_plus))
