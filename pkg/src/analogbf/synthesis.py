"""Finite-N beamformers that approximate the flat (brick-wall) angular spectrum.

The target amplitude is the indicator of the band image on the normalized
spatial-frequency axis ``x = pi * Omega / f_c``; its Fourier coefficients are
tapered by a Kaiser window.  The target interval is widened by ``guard``
times the Kaiser transition width so that the roll-off falls outside the
band instead of at its edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closed_form import max_flat_gain
from .errors import InvalidArgumentError
from .geometry import Direction, intensity_grid, ula_geometry
from .optimizer import Scenario, check_broadside_regime
from .power import radiated_power_exact
from .spectra import SampledSpectrum

DEFAULT_BETA = 8.0
DEFAULT_GUARD = 0.5


@dataclass
class SynthesisReport:
    n: int
    achieved_min_gain: float
    achieved_max_gain: float
    bound: float
    gap_db: float
    ripple_db: float
    weights: np.ndarray


def kaiser_transition_width(n: int, beta: float) -> float:
    """Transition width (rad) of a length-``n`` Kaiser window design."""
    # Kaiser's empirical relations: beta -> attenuation A -> width (A - 8) / (2.285 (n - 1))
    if beta > 4.5513:
        atten = beta / 0.1102 + 8.7
    else:
        atten = 21.0 + _invert_mid_beta(beta)
    return max(atten - 8.0, 0.0) / (2.285 * (n - 1))


def _invert_mid_beta(beta):
    # beta = 0.5842 (A-21)^0.4 + 0.07886 (A-21) for 21 <= A <= 50
    lo, hi = 0.0, 29.0
    for _ in range(80):
        mid = (lo + hi) / 2
        if 0.5842 * mid**0.4 + 0.07886 * mid < beta:
            lo = mid
        else:
            hi = mid
    return lo


def synthesize_flat_beamformer(n: int, theta_c: float, f_min: float, f_max: float,
                               f_c: float | None = None, beta: float = DEFAULT_BETA,
                               guard: float = DEFAULT_GUARD) -> np.ndarray:
    """Windowed Fourier-series weights for a half-wavelength ULA.

    Returns unnormalized weights; element index ``k`` carries the coefficient
    of order ``k - n//2`` (linear phase).
    """
    if int(n) != n or n < 2:
        raise InvalidArgumentError(f"n must be an integer >= 2, got {n}")
    n = int(n)
    check_broadside_regime(theta_c, f_min, f_max)
    if f_c is None:
        f_c = (f_min + f_max) / 2
    c = math.cos(theta_c)
    x1, x2 = sorted((math.pi * c * f_min / f_c, math.pi * c * f_max / f_c))
    pad = guard * kaiser_transition_width(n, beta) / 2
    width = min(x2 - x1 + 2 * pad, 2 * math.pi)
    centre = (x1 + x2) / 2
    return fourier_weights(n, centre, width) * np.kaiser(n, beta)


def fourier_weights(n: int, centre: float, width: float) -> np.ndarray:
    """Coefficients ``t_m = (1/2pi) int_{centre-width/2}^{centre+width/2} e^{j m x} dx``."""
    m = np.arange(n) - n // 2
    safe = np.where(m == 0, 1, m)
    mag = np.where(m == 0, width / (2 * np.pi), np.sin(m * width / 2) / (np.pi * safe))
    return mag * np.exp(1j * m * centre)


def finite_n_report(n: int, sc: Scenario, beta: float = DEFAULT_BETA, guard: float = DEFAULT_GUARD,
                    freq_points: int = 129, gain_points: int = 513) -> SynthesisReport:
    """Normalize the synthesized weights to radiate ``P_R`` with a flat PSD and
    compare the in-band gain toward ``theta_c`` with the flat-gain bound."""
    bound = max_flat_gain(sc.theta_c, sc.f_min, sc.f_max)
    b = synthesize_flat_beamformer(n, sc.theta_c, sc.f_min, sc.f_max, sc.f_c, beta, guard)
    g = ula_geometry(n, 0.5, sc.f_c)
    p_r = sc.p_r if sc.p_r > 0 else 1.0
    s0 = SampledSpectrum.flat(sc.f_min, sc.f_max, p_r / sc.bandwidth, freq_points)
    p = radiated_power_exact(g, b, s0, sc.f_min, sc.f_max, sc.u_nodes, sc.phi_nodes)
    b = b * math.sqrt(p_r / p)
    f = np.linspace(sc.f_min, sc.f_max, gain_points)
    theta = abs(sc.theta_c)
    gain = intensity_grid(g, b, f, [Direction(theta).theta])[:, 0]
    gmin, gmax = float(gain.min()), float(gain.max())
    return SynthesisReport(
        n=n, achieved_min_gain=gmin, achieved_max_gain=gmax, bound=bound,
        gap_db=10 * math.log10(bound / gmin), ripple_db=10 * math.log10(gmax / gmin), weights=b,
    )
