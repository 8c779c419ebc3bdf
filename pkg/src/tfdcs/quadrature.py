"""Adaptive Gauss-Kronrod quadrature on the half line."""

from __future__ import annotations

import heapq
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConvergenceError, DomainError

# 15-point Kronrod extension of the 7-point Gauss-Legendre rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes (x[1], x[3], x[5], x[7]=0).
for _j, _w in zip((1, 3, 5), _WG[:3]):
    _GAUSS_W[_j] = _w
    _GAUSS_W[14 - _j] = _w
_GAUSS_W[7] = _WG[3]


class QuadResult(NamedTuple):
    value: float
    error: float
    n_panels: int


def _panel(g, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    fx = np.asarray(g(mid + half * _NODES), dtype=float)
    if not np.all(np.isfinite(fx)):
        raise ConvergenceError(f"non-finite integrand on panel [{lo!r}, {hi!r}]")
    k15 = half * float(np.dot(_KRONROD_W, fx))
    g7 = half * float(np.dot(_GAUSS_W, fx))
    return k15, abs(k15 - g7)


def _as_vectorized(f, vectorized):
    if vectorized:
        return f
    return np.vectorize(f, otypes=[float])


def quad_semiinfinite(
    f: Callable,
    tol: float = 1e-10,
    *,
    rtol: float = 0.0,
    tail_bound: Callable[[float], float] | None = None,
    vectorized: bool = True,
    max_panels: int = 4000,
) -> QuadResult:
    """Integrate ``f`` over ``(0, inf)``.

    The half line is split at ``t = 1``; ``(1, inf)`` is mapped onto ``(0, 1]``
    by ``t = 1/u``. Panels from both pieces share one priority queue and the
    worst panel (by ``|K15 - G7|``) is bisected until the summed estimate is
    at most ``max(tol, rtol * |I|)``.

    Parameters
    ----------
    f : callable
        Integrand. Receives a float ndarray when ``vectorized`` is true.
    tol : float
        Absolute error target.
    rtol : float, optional
        Relative error target; whichever target is looser wins.
    tail_bound : callable, optional
        ``tail_bound(T)`` bounds ``int_T^inf |f|``. When given, the upper
        limit is cut at the first ``T = 2**k`` where the bound drops below
        ``tol / 100`` and the cut-off bound is added to the error estimate.
    max_panels : int
        Panel budget before :class:`ConvergenceError` is raised.

    Returns
    -------
    QuadResult
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    fv = _as_vectorized(f, vectorized)

    def mapped(u):
        return fv(1.0 / u) / (u * u)

    u_lo = 0.0
    cut_error = 0.0
    if tail_bound is not None:
        upper = 1.0
        while tail_bound(upper) >= tol / 100.0:
            upper *= 2.0
            if upper > 1e300:
                raise ConvergenceError("tail bound never drops below tol/100")
        cut_error = float(tail_bound(upper))
        u_lo = 1.0 / upper

    heap = []
    total = 0.0
    err_total = cut_error
    for g, lo, hi in ((fv, 0.0, 1.0), (mapped, u_lo, 1.0)):
        if hi <= lo:
            continue
        val, err = _panel(g, lo, hi)
        total += val
        err_total += err
        heapq.heappush(heap, (-err, lo, hi, val, g is fv))

    n_panels = len(heap)
    while err_total > max(tol, rtol * abs(total)):
        if n_panels >= max_panels:
            raise ConvergenceError(
                f"quadrature stalled: error {err_total:.3e} above target after {n_panels} panels"
            )
        neg_err, lo, hi, val, direct = heapq.heappop(heap)
        g = fv if direct else mapped
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise ConvergenceError("panel width reached machine resolution")
        v1, e1 = _panel(g, lo, mid)
        v2, e2 = _panel(g, mid, hi)
        total += v1 + v2 - val
        err_total += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1, direct))
        heapq.heappush(heap, (-e2, mid, hi, v2, direct))
        n_panels += 1

    # re-sum to shed drift from the incremental updates
    total = float(np.sum([item[3] for item in heap]))
    err_total = float(sum(-item[0] for item in heap)) + cut_error
    return QuadResult(total, err_total, n_panels)
