"""Closed-form limits of frequency-flat analog beamforming.

* flat spectra and the maximum flat gain ``1 / (|cos theta_c| ln sqrt(f_max/f_min))``
* the end-fire (``theta_c = 0``) angular spectrum for a flat PSD
* the flat-spectrum rate and its optimization over the occupied bandwidth
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DivergentGainError, InvalidArgumentError, UnsupportedRegimeError
from .optimizer import MIN_ABS_COS, Scenario, bisect_multiplier, check_broadside_regime
from .power import g_power_weights
from .spectra import AngularSpectrum, SampledSpectrum, trapezoid_weights

_LN2 = math.log(2.0)


def _half_log_ratio(f_min, f_max):
    # ln sqrt(f_max / f_min), accurate for narrow bands
    return 0.5 * math.log1p((f_max - f_min) / f_min)


def max_flat_gain(theta_c: float, f_min: float, f_max: float) -> float:
    """Largest gain a flat angular/temporal shape can hold over the band."""
    if not 0 < f_min < f_max:
        raise InvalidArgumentError(f"invalid band [{f_min}, {f_max}]")
    c = check_broadside_regime(theta_c, f_min, f_max)
    return 1.0 / (c * _half_log_ratio(f_min, f_max))


def gain_db(g: float) -> float:
    return 10.0 * math.log10(g)


def flat_solution(sc: Scenario) -> tuple[AngularSpectrum, SampledSpectrum]:
    """Flat PSD ``P_R / B`` and brick-wall G at the max flat gain.

    G lives on the image grid of the band, so it is supported exactly on
    ``[cos(theta_c) f_min, cos(theta_c) f_max]`` (mirrored for negative
    cosines) and vanishes elsewhere on the period.
    """
    gmax = max_flat_gain(sc.theta_c, sc.f_min, sc.f_max)
    om, _ = sc.image_grid()
    G = AngularSpectrum(om, np.full(om.shape, gmax), sc.f_c)
    s0 = SampledSpectrum.flat(sc.f_min, sc.f_max, sc.p_r / sc.bandwidth, sc.freq_bins)
    return G, s0


def flat_multiplier(sc: Scenario) -> float:
    """Multiplier that makes the flat pair stationary in G.

    With a flat PSD ``s`` the u-integral is ``s ln(f_max/f_min)`` on the whole
    support, so ``mu = kappa / (|c| (1 + kappa G s) * s ln(f_max/f_min) / 2)``
    written without the removable ``s``.
    """
    gmax = max_flat_gain(sc.theta_c, sc.f_min, sc.f_max)
    c = abs(sc.cos_c)
    s = sc.p_r / sc.bandwidth
    return sc.kappa / (c * (1 + sc.kappa * gmax * s) * _half_log_ratio(sc.f_min, sc.f_max))


def max_bandwidth(f_c: float, theta_c: float) -> float:
    """Widest band centred at ``f_c`` still inside the broadside-side regime."""
    c = abs(math.cos(theta_c))
    return 2 * f_c * (1 - c) / (1 + c)


def flat_rate_formula(bandwidth: float, f_c: float, theta_c: float, cn: float) -> float:
    """``B log2(1 + cn / (B |cos theta_c| ln sqrt((f_c + B/2)/(f_c - B/2))))``; no checks."""
    if cn <= 0 or bandwidth <= 0:
        return 0.0
    c = abs(math.cos(theta_c))
    half_log = 0.5 * math.log1p(bandwidth / (f_c - bandwidth / 2))
    return bandwidth * math.log1p(cn / (bandwidth * c * half_log)) / _LN2


def flat_rate(sc: Scenario, bandwidth_override: float | None = None) -> float:
    """Rate of the flat solution (bit/s); optionally for another bandwidth around ``f_c``."""
    c = abs(sc.cos_c)
    if c < MIN_ABS_COS:
        raise DivergentGainError("divergent gain at broadside: |cos(theta_c)| < 1e-6")
    b = sc.bandwidth if bandwidth_override is None else float(bandwidth_override)
    bmax = max_bandwidth(sc.f_c, sc.theta_c)
    if not 0 < b <= bmax * (1 + 1e-12):
        raise UnsupportedRegimeError(
            f"bandwidth {b:.6g} Hz outside (0, {bmax:.6g}] for theta_c = {math.degrees(sc.theta_c):.6g} deg")
    return flat_rate_formula(b, sc.f_c, sc.theta_c, sc.cn)


# -- end-fire ---------------------------------------------------------------

def endfire_log_ratio(f, f_min: float, f_max: float):
    """``L(f) = ln(f_max / sqrt(f (2 f_c - f)))``, symmetric about ``f_c``."""
    f = np.asarray(f, dtype=float)
    f_c = (f_min + f_max) / 2
    x = f - f_c
    # f (2 f_c - f) = f_c^2 - x^2, written so the symmetry is exact
    return np.log(f_max) - 0.5 * np.log(f_c * f_c - x * x)


def _check_endfire(sc: Scenario):
    if abs(sc.theta_c) > 1e-12:
        raise UnsupportedRegimeError("the end-fire solution requires theta_c = 0")


def endfire_solution(sc: Scenario) -> tuple[AngularSpectrum, float]:
    """End-fire angular spectrum for the flat PSD ``P_R / B``.

    ``G(f) = (B N0 / (g_c P_R)) (mu / L(f) - 1)_+`` on the band, zero elsewhere on
    the period, with the level ``mu`` set so that the Omega-form radiated power
    equals ``P_R``.  Returns ``(G, mu)``.  The Lagrange multiplier of the
    natural-log problem is ``kappa / mu``.
    """
    _check_endfire(sc)
    f = sc.freq_grid()
    L = endfire_log_ratio(f, sc.f_min, sc.f_max)
    if sc.p_r == 0:
        return AngularSpectrum(f, np.zeros_like(f), sc.f_c), float(L.min())
    s = sc.p_r / sc.bandwidth
    s0 = SampledSpectrum.flat(sc.f_min, sc.f_max, s, sc.freq_bins)
    cost = g_power_weights(f, sc.f_c, s0, sc.f_min, sc.f_max)
    scale = 1.0 / (sc.kappa * s)

    def shape(level):
        return scale * np.maximum(level / L - 1.0, 0.0)

    # bisect on the Lagrange multiplier kappa/level, decreasing power
    bis = bisect_multiplier(lambda lam: float(cost @ shape(sc.kappa / lam)), sc.p_r, rtol=sc.mu_rtol)
    level = sc.kappa / bis.mu
    act = shape(level) > 0
    level_star = (sc.p_r / scale + cost[act].sum()) / np.sum(cost[act] / L[act])
    if abs(cost @ shape(level_star) - sc.p_r) <= abs(cost @ shape(level) - sc.p_r):
        level = level_star
    return AngularSpectrum(f, shape(level), sc.f_c), float(level)


def endfire_rate(sc: Scenario) -> float:
    """``int (log2 mu - log2 L(f))_+ df`` on the scenario grid (bit/s)."""
    _check_endfire(sc)
    if sc.p_r == 0:
        return 0.0
    _, level = endfire_solution(sc)
    f = sc.freq_grid()
    L = endfire_log_ratio(f, sc.f_min, sc.f_max)
    integrand = np.maximum(np.log2(level) - np.log2(L), 0.0)
    return float(trapezoid_weights(f) @ integrand)


# -- bandwidth optimization ---------------------------------------------------

_GOLD = (math.sqrt(5) - 1) / 2


def _golden_max(func, a, b, rtol):
    """Golden-section maximization of ``func`` on ``[a, b]`` (log-B axis)."""
    c, d = b - _GOLD * (b - a), a + _GOLD * (b - a)
    fc_, fd = func(c), func(d)
    while (b - a) > rtol:
        if fc_ >= fd:
            b, d, fd = d, c, fc_
            c = b - _GOLD * (b - a)
            fc_ = func(c)
        else:
            a, c, fc_ = c, d, fd
            d = a + _GOLD * (b - a)
            fd = func(d)
    cand = [(func(a), a), (fc_, c), (fd, d), (func(b), b)]
    return max(cand)[1]


def optimal_bandwidth(f_c: float, theta_c: float, cn: float, b_min: float = 1e6,
                      n_scan: int = 256, rtol: float = 1e-6) -> tuple[float, float]:
    """Bandwidth maximizing the flat rate around ``f_c``.

    A log-spaced pre-scan over ``[b_min, B_max]`` locates the best cell; a
    golden-section search on ``log B`` then refines inside the neighbouring
    cells.  Returns ``(B*, R*)``; ``cn = 0`` gives ``(0, 0)``.
    """
    c = abs(math.cos(theta_c))
    if c < MIN_ABS_COS:
        raise DivergentGainError("divergent gain at broadside: |cos(theta_c)| < 1e-6")
    if cn < 0:
        raise InvalidArgumentError("cn must be nonnegative")
    if cn == 0:
        return 0.0, 0.0
    bmax = max_bandwidth(f_c, theta_c)
    lo = min(b_min, bmax * 1e-6)
    xs = np.linspace(math.log(lo), math.log(bmax), n_scan)

    def obj(x):
        return flat_rate_formula(min(math.exp(x), bmax), f_c, theta_c, cn)

    vals = np.array([obj(x) for x in xs])
    i = int(np.argmax(vals))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, n_scan - 1)]
    x_best = _golden_max(obj, a, b, rtol)
    b_best = min(math.exp(x_best), bmax)
    return b_best, flat_rate_formula(b_best, f_c, theta_c, cn)
