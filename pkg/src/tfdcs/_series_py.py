"""Pure-Python twin of the compiled series kernel in ``_series.pyx``."""

from math import cos, exp, log, sin, sqrt


def pfq_sum(a, b, log_abs_x, phase, real_sign, max_terms, rel_tol):
    """Sum a generalized hypergeometric series in log-magnitude/phase form.

    Term ``k`` has log-magnitude accumulated from the term ratio
    ``prod(a_i + n) / prod(b_j + n) * |x| / (n + 1)``. The running sum is
    stored scaled by ``exp(-scale)``, with ``scale`` the largest log-term seen.

    Parameters
    ----------
    a, b : sequence of float
        Upper and lower parameters (all positive).
    log_abs_x : float
        ``log|x|``; ``x`` must be nonzero.
    phase : float
        ``arg(x)``, used only when ``real_sign == 0``.
    real_sign : int
        ``+1``/``-1`` for real positive/negative ``x`` (exact signs, no
        trigonometry); ``0`` for genuinely complex ``x``.
    max_terms : int
        Term budget.
    rel_tol : float
        Stopping threshold relative to the accumulated magnitude.

    Returns
    -------
    tuple
        ``(re, im, scale, log_tail, n_terms, converged)``; the sum equals
        ``(re + 1j*im) * exp(scale)``.
    """
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    p = len(a)
    q = len(b)
    log_t = 0.0
    scale = 0.0
    sre = 1.0
    sim = 0.0
    tail_log = 0.0
    for n in range(max_terms):
        nn = float(n)
        step = log_abs_x - log(nn + 1.0)
        for i in range(p):
            step += log(a[i] + nn)
        for i in range(q):
            step -= log(b[i] + nn)
        log_t = log_t + step
        k = nn + 1.0
        if log_t > scale:
            f = exp(scale - log_t)
            sre = sre * f
            sim = sim * f
            scale = log_t
        w = exp(log_t - scale)
        if real_sign == 0:
            sre = sre + w * cos(k * phase)
            sim = sim + w * sin(k * phase)
        elif real_sign > 0 or n % 2 == 1:
            sre = sre + w
        else:
            sre = sre - w
        mag = sqrt(sre * sre + sim * sim)
        if w < rel_tol * mag:
            r = exp(step)
            if r < 1.0:
                tail = w * r / (1.0 - r)
                if tail < rel_tol * mag:
                    tail_log = (log(tail) + scale) if tail > 0.0 else -1.0e308
                    return sre, sim, scale, tail_log, n + 2, True
    return sre, sim, scale, tail_log, max_terms + 1, False
