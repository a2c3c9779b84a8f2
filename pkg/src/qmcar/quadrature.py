"""Adaptive Simpson quadrature, vectorized over many intervals at once.

Every interval that still needs refinement is processed in the same numpy
pass, so integrating ``f`` over ten thousand small pieces costs about as many
Python-level calls as integrating it over one large piece.
"""

import numpy as np

from .errors import QuadratureError

DEFAULT_TOL = 1e-12
MAX_DEPTH = 60
MIN_DEPTH = 3


def simpson_intervals(f, lo, hi, tol, max_depth=MAX_DEPTH, min_depth=MIN_DEPTH):
    """Integrate ``f`` over each ``[lo[i], hi[i]]`` independently.

    Parameters
    ----------
    f : callable
        Vectorized integrand, maps an array of abscissae to an array of values.
    lo, hi : array_like
        Interval endpoints with ``lo <= hi``.
    tol : float or array_like
        Absolute tolerance per interval.  It is halved on every bisection.
    max_depth : int
        Bisection cap.  Pieces that reach it are accepted as they are and
        flagged in the returned ``capped`` mask.

    Returns
    -------
    values : ndarray
    err : ndarray
        Sum of the Richardson error estimates of the accepted pieces.
    capped : ndarray of bool
        True where some piece hit ``max_depth`` without meeting its tolerance.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    n = lo.size
    values = np.zeros(n)
    err = np.zeros(n)
    capped = np.zeros(n, dtype=bool)

    owner = np.arange(n)
    keep = hi > lo
    a, b, owner = lo[keep], hi[keep], owner[keep]
    tols = np.broadcast_to(np.asarray(tol, dtype=float), (n,))[keep].copy()
    if a.size == 0:
        return values, err, capped

    m = 0.5 * (a + b)
    fa, fm, fb = (np.asarray(f(x), dtype=float) for x in (a, m, b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    depth = 0

    while a.size:
        m = 0.5 * (a + b)
        flm = np.asarray(f(0.5 * (a + m)), dtype=float)
        frm = np.asarray(f(0.5 * (m + b)), dtype=float)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole

        converged = np.abs(delta) <= 15.0 * tols
        if depth < min_depth:
            converged[:] = False
        at_cap = depth >= max_depth
        done = converged | at_cap
        if done.any():
            np.add.at(values, owner[done], (left + right + delta / 15.0)[done])
            np.add.at(err, owner[done], np.abs(delta[done]) / 15.0)
            if at_cap:
                capped[owner[done & ~converged]] = True

        go = ~done
        if not go.any():
            break
        a_, m_, b_ = a[go], m[go], b[go]
        a = np.concatenate([a_, m_])
        b = np.concatenate([m_, b_])
        fa, fm, fb = (
            np.concatenate([fa[go], fm[go]]),
            np.concatenate([flm[go], frm[go]]),
            np.concatenate([fm[go], fb[go]]),
        )
        whole = np.concatenate([left[go], right[go]])
        tols = np.concatenate([tols[go], tols[go]]) * 0.5
        owner = np.concatenate([owner[go], owner[go]])
        depth += 1

    return values, err, capped


def _partition(a, b, breakpoints):
    inner = sorted(float(p) for p in breakpoints if a < p < b)
    return [a, *inner, b]


def integrate(f, a, b, tol=DEFAULT_TOL, breakpoints=(), max_depth=MAX_DEPTH):
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    The range is split at ``breakpoints`` first so that no Simpson panel
    straddles a kink; the tolerance is shared in proportion to piece length.

    Raises
    ------
    QuadratureError
        If the bisection cap is hit and the error estimate exceeds ``tol``.
    """
    if b == a:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    nodes = np.array(_partition(a, b, breakpoints))
    widths = np.diff(nodes)
    vals, err, capped = simpson_intervals(f, nodes[:-1], nodes[1:], tol * widths / (b - a), max_depth)
    achieved = float(err.sum())
    if capped.any() and achieved > tol:
        raise QuadratureError(
            f"adaptive Simpson hit depth {max_depth} on [{a}, {b}]; achieved {achieved:.3g}", achieved
        )
    return sign * float(np.sum(vals))


def cumulative_integral(f, t, tol=DEFAULT_TOL, breakpoints=(), max_depth=MAX_DEPTH):
    """Return ``int_0^t f`` for every entry of ``t`` (all inside ``[0, 1]``).

    The sorted evaluation points and breakpoints partition ``[0, max t]``; each
    piece is integrated once and the pieces are accumulated, so the total
    absolute error stays below ``tol`` however many points are requested.
    """
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    if flat.size == 0:
        return np.zeros_like(t)
    top = float(flat.max())
    bps = [float(p) for p in breakpoints if 0.0 < p < top]
    nodes = np.unique(np.concatenate([[0.0], flat, bps]))
    widths = np.diff(nodes)
    if widths.size == 0:
        return np.zeros_like(t)
    span = nodes[-1] - nodes[0]
    vals, err, capped = simpson_intervals(f, nodes[:-1], nodes[1:], tol * widths / span, max_depth)
    if capped.any() and err.sum() > tol:
        raise QuadratureError("cumulative quadrature hit the depth cap", float(err.sum()))
    cum = np.concatenate([[0.0], np.cumsum(vals)])
    return cum[np.searchsorted(nodes, flat)].reshape(t.shape)
