"""Airy function Ai and the edge density Ai'^2 - x Ai^2, self-contained.

Two regimes: the Maclaurin series on [-7.2, 5.5], where it converges fast
and stays stable, and the standard asymptotic expansions outside. The
crossover points were chosen so both regimes hold ~1e-11 absolute accuracy;
beyond [-12, 8] the asymptotic error (negative side) or underflow handling
(positive side) is not certified and evaluation is refused.
"""

import math

import numpy as np

from .errors import OutOfWindow

# Ai(0) = 3^(-2/3)/Gamma(2/3), Ai'(0) = -3^(-1/3)/Gamma(1/3)
_AI0 = 0.3550280538878172392600631860041831763980
_AIP0 = -0.2588194037928067984051835601892039634793

_SERIES_LO, _SERIES_HI = -7.2, 5.5
WINDOW_LO, WINDOW_HI = -12.0, 8.0

_SQRTPI = math.sqrt(math.pi)


def _ai_series(x: float):
    """Maclaurin series: Ai = Ai(0) f(x) + Ai'(0) g(x).

    f = sum a_k x^{3k}, g = sum b_k x^{3k+1};
    a_{k+1} = a_k / ((3k+2)(3k+3)), b_{k+1} = b_k / ((3k+3)(3k+4)).
    Derivatives come from the same running terms.
    """
    f = 1.0
    fp = 0.0       # f' = sum 3k a_k x^{3k-1}; its k = 0 term vanishes
    g = x
    gp = 1.0
    ta = 1.0       # a_k x^{3k}
    tb = x         # b_k x^{3k+1}
    x3 = x * x * x
    for k in range(0, 120):
        ta = ta * x3 / ((3 * k + 2) * (3 * k + 3))
        tb = tb * x3 / ((3 * k + 3) * (3 * k + 4))
        f += ta
        g += tb
        if x != 0.0:
            fp += (3 * k + 3) * ta / x
            gp += (3 * k + 4) * tb / x
        if abs(ta) + abs(tb) < 1e-17 * (abs(f) + abs(g)):
            break
    ai = _AI0 * f + _AIP0 * g
    aip = _AI0 * fp + _AIP0 * gp
    return ai, aip


def _asym_pos(x: float):
    """Large positive x: Ai ~ e^-zeta/(2 sqrt(pi) x^(1/4)) sum (-1)^k u_k zeta^-k."""
    zeta = (2.0 / 3.0) * x ** 1.5
    su = sv = 1.0
    u = v = 1.0
    sign = 1.0
    term_prev = np.inf
    for k in range(0, 40):
        u = u * (6 * k + 1) * (6 * k + 5) / (72.0 * (k + 1))
        v = -u * (6 * k + 7) / (6 * k + 5)
        sign = -sign
        tu = sign * u / zeta ** (k + 1)
        tv = sign * v / zeta ** (k + 1)
        if abs(tu) > term_prev:
            break
        su += tu
        sv += tv
        term_prev = abs(tu)
        if abs(tu) < 1e-17 * abs(su):
            break
    pref = math.exp(-zeta) / (2.0 * _SQRTPI)
    ai = pref * su / x ** 0.25
    aip = -pref * x ** 0.25 * sv
    return ai, aip


def _asym_neg(x: float):
    """Large negative x = -t: oscillatory expansion in zeta = (2/3) t^(3/2)."""
    t = -x
    zeta = (2.0 / 3.0) * t ** 1.5
    # u_k and v_k = -u_k (6k+1)/(6k-1), v_0 = 1
    us = [1.0]
    for k in range(0, 24):
        us.append(us[-1] * (6 * k + 1) * (6 * k + 5) / (72.0 * (k + 1)))
    vs = [1.0] + [-us[k] * (6 * k + 1) / (6 * k - 1) for k in range(1, 25)]
    c_u = s_u = 0.0   # cos and sin series for Ai
    c_v = s_v = 0.0   # for Ai'
    prev = np.inf
    for k in range(0, 12):
        mag = us[2 * k] / zeta ** (2 * k)
        if mag > prev:
            break
        prev = mag
        se = (-1.0) ** k / zeta ** (2 * k)
        so = (-1.0) ** k / zeta ** (2 * k + 1)
        c_u += se * us[2 * k]
        s_u += so * us[2 * k + 1]
        c_v += se * vs[2 * k]
        s_v += so * vs[2 * k + 1]
        if mag < 1e-17:
            break
    ph = zeta - 0.25 * math.pi
    ai = (math.cos(ph) * c_u + math.sin(ph) * s_u) / (_SQRTPI * t ** 0.25)
    aip = (math.sin(ph) * c_v - math.cos(ph) * s_v) * t ** 0.25 / _SQRTPI
    return ai, aip


def airy_ai(x: float):
    """(Ai(x), Ai'(x)) for x in [-12, 8]; OutOfWindow outside."""
    x = float(x)
    if not (WINDOW_LO <= x <= WINDOW_HI):
        raise OutOfWindow(f"x = {x} outside certified window [{WINDOW_LO}, {WINDOW_HI}]")
    if _SERIES_LO <= x <= _SERIES_HI:
        return _ai_series(x)
    if x > 0:
        return _asym_pos(x)
    return _asym_neg(x)


def airy_density(x):
    """Edge density Ai'(x)^2 - x Ai(x)^2, scalar or array, window-checked."""
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    out = np.empty_like(xs)
    for i, xv in enumerate(xs):
        ai, aip = airy_ai(xv)
        out[i] = aip * aip - xv * ai * ai
    return float(out[0]) if scalar else out
