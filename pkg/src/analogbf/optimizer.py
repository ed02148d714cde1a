"""Joint spectral / angular power optimization under a radiated-power budget.

The problem (infinite ULA, half-wavelength spacing)::

    max  int log2(1 + g_c G(cos(theta_c) f) S0(f) / N0) df
    s.t. int D_G(f) S0(f) df <= P_R,   G >= 0, S0 >= 0

is bilinear in (G, S0).  For fixed G the optimal S0 is a water-filling
allocation; for fixed S0 the optimal G has a closed form on the image of the
band.  Both updates are solved exactly on the discretized problem: S0 is
piecewise linear on the frequency grid, G is piecewise linear on the image
grid ``cos(theta_c) * f``, the rate uses the trapezoid rule on the frequency
grid and the power is the exact integral of the interpolants.  The water
level comes from a multiplier bisection whose bracket is then sharpened by
solving for the level in closed form on the identified active set.

Multiplier convention: ``mu`` is the multiplier of the natural-log
Lagrangian ``int ln(1 + kappa G S0) df - mu (P - P_R)`` with
``kappa = g_c / N0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    DivergentGainError,
    InfeasibleError,
    InvalidArgumentError,
    NonConvergenceError,
    UnsupportedRegimeError,
)
from .power import (
    DEFAULT_PHI_NODES,
    DEFAULT_U_NODES,
    InnerIntegral,
    g_power_weights,
    radiated_power_asymptotic,
    s0_power_weights,
)
from .spectra import DEFAULT_FREQ_BINS, AngularSpectrum, SampledSpectrum, merge_breaks, trapezoid_weights

MIN_ABS_COS = 1e-6
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class Scenario:
    """Band, steering angle, link constants and numerical settings.

    ``cn = g_c * p_r / n0`` is the carrier-to-noise density ratio in Hz.
    """

    f_min: float
    f_max: float
    theta_c: float
    p_r: float = 1.0
    n0: float = 1.0
    g_c: float = 1.0
    freq_bins: int = DEFAULT_FREQ_BINS
    u_nodes: int = DEFAULT_U_NODES
    phi_nodes: int = DEFAULT_PHI_NODES
    power_rtol: float = 1e-9
    mu_rtol: float = 1e-12
    rate_rtol: float = 1e-12

    def __post_init__(self):
        if not (0 < self.f_min < self.f_max and math.isfinite(self.f_max)):
            raise InvalidArgumentError(f"need 0 < f_min < f_max, got [{self.f_min}, {self.f_max}]")
        if not (self.p_r >= 0 and self.n0 > 0 and self.g_c > 0):
            raise InvalidArgumentError("need p_r >= 0, n0 > 0, g_c > 0")
        if self.freq_bins < 2:
            raise InvalidArgumentError("freq_bins must be >= 2")

    @classmethod
    def from_cn(cls, f_min, f_max, theta_c, cn, n0=1.0, g_c=1.0, **kw) -> "Scenario":
        return cls(f_min, f_max, theta_c, p_r=cn * n0 / g_c, n0=n0, g_c=g_c, **kw)

    @property
    def f_c(self) -> float:
        return (self.f_min + self.f_max) / 2

    @property
    def bandwidth(self) -> float:
        return self.f_max - self.f_min

    @property
    def cn(self) -> float:
        return self.g_c * self.p_r / self.n0

    @property
    def kappa(self) -> float:
        return self.g_c / self.n0

    @property
    def cos_c(self) -> float:
        return math.cos(self.theta_c)

    def scaled(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def freq_grid(self) -> np.ndarray:
        return np.linspace(self.f_min, self.f_max, self.freq_bins)

    def image_grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Image of the frequency grid on the Omega axis.

        Returns ``(omega_sorted, order)`` with ``omega_sorted = image[order]``.
        """
        c = self.cos_c
        f = self.freq_grid()
        om = c * f if c >= 0 else 2 * self.f_c + c * f
        order = np.argsort(om)
        return om[order], order


@dataclass
class OptimizationResult:
    G: AngularSpectrum
    s0: SampledSpectrum
    rate: float
    mu: float
    kkt_residual: float
    power_gap: float
    iterations: int
    rate_history: list = field(default_factory=list)
    converged: bool = True


def check_broadside_regime(theta_c: float, f_min: float, f_max: float) -> float:
    """Return ``|cos(theta_c)|`` if the broadside-side closed forms apply.

    Requires ``|cos(theta_c)| <= f_min / f_max`` (the mirrored image of the
    band never folds back onto itself) and ``|cos(theta_c)| >= 1e-6``.
    """
    c = abs(math.cos(theta_c))
    if c < MIN_ABS_COS:
        raise DivergentGainError("divergent gain at broadside: |cos(theta_c)| < 1e-6")
    if c > f_min / f_max * (1 + 1e-12):
        raise UnsupportedRegimeError(
            f"|cos(theta_c)| = {c:.6g} exceeds f_min/f_max = {f_min / f_max:.6g}; "
            "use the end-fire solution for steering near the array axis")
    return c


@dataclass
class Bisection:
    mu: float
    lo: float
    hi: float
    power_lo: float
    power_hi: float
    steps: int


def bisect_multiplier(power, target: float, mu0: float = 1.0, rtol: float = 1e-12,
                      max_steps: int = 5000) -> Bisection:
    """Find ``mu`` with ``power(mu) = target`` for ``power`` nonincreasing in ``mu``.

    The bracket is grown by doubling / halving from ``mu0``; afterwards
    ``power(lo) >= target >= power(hi)`` holds at every step.
    """
    steps = 0
    mu = mu0
    p = power(mu)
    if p >= target:
        lo, plo = mu, p
        hi, phi = mu * 2, power(mu * 2)
        while phi > target:
            lo, plo = hi, phi
            hi *= 2
            phi = power(hi)
            steps += 1
            if steps > max_steps or not math.isfinite(hi):
                raise NonConvergenceError("could not bracket the multiplier from above")
    else:
        hi, phi = mu, p
        lo, plo = mu / 2, power(mu / 2)
        while plo < target:
            hi, phi = lo, plo
            lo /= 2
            plo = power(lo)
            steps += 1
            if steps > max_steps or lo == 0.0:
                raise NonConvergenceError("could not bracket the multiplier from below")
    while hi / lo - 1 > rtol:
        mid = math.sqrt(lo * hi)
        pm = power(mid)
        if pm >= target:
            lo, plo = mid, pm
        else:
            hi, phi = mid, pm
        steps += 1
        if steps > max_steps:
            raise NonConvergenceError("multiplier bisection did not converge")
    return Bisection(math.sqrt(lo * hi), lo, hi, plo, phi, steps)


def _waterpour(w, cost, floor_inv, target, rtol):
    """Maximize ``sum w ln(1 + x / floor_inv)`` s.t. ``sum cost x = target``.

    Solution ``x = (w/(mu cost) - floor_inv)_+``; returns ``(x, mu)``.
    Only entries with finite ``floor_inv`` participate.
    """
    act0 = np.isfinite(floor_inv)
    wa, ca, fa = w[act0], cost[act0], floor_inv[act0]

    def alloc(mu):
        return np.maximum(wa / (mu * ca) - fa, 0.0)

    def power(mu):
        return float(ca @ alloc(mu))

    bis = bisect_multiplier(power, target, rtol=rtol)
    mu = bis.mu
    best = abs(power(mu) - target)
    active = alloc(mu) > 0
    # closed-form water level on the identified active set
    if np.any(active):
        mu_star = wa[active].sum() / (target + np.sum(ca[active] * fa[active]))
        if abs(power(mu_star) - target) <= best:
            mu = mu_star
    x = np.zeros(w.shape)
    x[act0] = alloc(mu)
    return x, mu


def achievable_rate(G: AngularSpectrum, s0: SampledSpectrum, sc: Scenario) -> float:
    """``int log2(1 + kappa G(cos(theta_c) f) S0(f)) df`` (bit/s), trapezoid on the S0 grid."""
    f = merge_breaks(sc.f_min, sc.f_max, s0.f_grid)
    snr = sc.kappa * G.evaluate(sc.cos_c * f) * s0.evaluate(f)
    return float(trapezoid_weights(f) @ np.log1p(snr)) / _LN2


def waterfill_s0(G: AngularSpectrum, sc: Scenario) -> tuple[SampledSpectrum, float]:
    """Optimal S0 for fixed G: ``S0 = (1/(mu D) - N0/(g_c G_c))_+``.

    ``D`` is the angular power density averaged against each grid node's
    hat function, which makes the allocation exact for the discretized
    problem.  Returns ``(S0, mu)``; ``mu`` is ``inf`` when ``p_r == 0``.
    """
    f = sc.freq_grid()
    gc = G.evaluate(sc.cos_c * f)
    if not np.any(gc > 0):
        raise InfeasibleError("angular spectrum vanishes toward theta_c on the whole band")
    if sc.p_r == 0:
        return SampledSpectrum(f, np.zeros_like(f)), math.inf
    w = trapezoid_weights(f)
    cost = s0_power_weights(G, f, sc.f_min, sc.f_max)
    act = gc > 0
    if np.any(act & (cost <= 0)):
        raise InfeasibleError("target direction is reachable at zero radiated power")
    floor_inv = np.full(f.shape, np.inf)
    floor_inv[act] = 1.0 / (sc.kappa * gc[act])
    s, mu = _waterpour(w, np.where(act, cost, 1.0), floor_inv, sc.p_r, sc.mu_rtol)
    return SampledSpectrum(f, s), mu


def optimal_g_given_s0(s0: SampledSpectrum, sc: Scenario) -> tuple[AngularSpectrum, float]:
    """Optimal G for fixed S0 in the broadside-side regime.

    On the image ``W = cos(theta_c) f`` of each grid frequency::

        G(W) = ( 1 / (mu |cos theta_c| Isym(W)) - N0 / (g_c S0(f)) )_+

    with ``Isym(W) = (I(W) + I(2 f_c - W)) / 2``; the hat-function
    sensitivities replace ``|cos theta_c| Isym`` so the update is exact for
    the discretized problem.  G = 0 off the image of the band.
    Returns ``(G, mu)``.
    """
    check_broadside_regime(sc.theta_c, sc.f_min, sc.f_max)
    f = sc.freq_grid()
    sk = s0.evaluate(f)
    if not np.any(sk > 0):
        raise InfeasibleError("S0 vanishes on the band: no power to shape")
    om, order = sc.image_grid()
    if sc.p_r == 0:
        return AngularSpectrum(om, np.zeros_like(om), sc.f_c), math.inf
    w = trapezoid_weights(f)[order]
    sk = sk[order]
    cost = g_power_weights(om, sc.f_c, s0, sc.f_min, sc.f_max)
    act = sk > 0
    if np.any(act & (cost <= 0)):
        raise InfeasibleError("angular spectrum is free of radiation cost somewhere")
    floor_inv = np.full(om.shape, np.inf)
    floor_inv[act] = 1.0 / (sc.kappa * sk[act])
    g, mu = _waterpour(w, np.where(act, cost, 1.0), floor_inv, sc.p_r, sc.mu_rtol)
    return AngularSpectrum(om, g, sc.f_c), mu


def kkt_residual(G: AngularSpectrum, s0: SampledSpectrum, mu: float, sc: Scenario) -> float:
    """Stationarity of the Lagrangian with respect to G.

    At every band frequency with ``G S0 > 0``::

        r(f) = | grad(f) - mu (I(W) + I(2 f_c - W))/2 | / grad(f),
        grad(f) = kappa S0 / (|cos theta_c| (1 + kappa G S0)),  W = cos(theta_c) f

    Both u-integral terms are included.  The residual is normalized by the
    rate gradient so the threshold does not depend on units.  The largest
    ``r(f)`` is returned; 0 for an empty active set.
    """
    c = abs(sc.cos_c)
    if c < MIN_ABS_COS:
        raise DivergentGainError("divergent gain at broadside: |cos(theta_c)| < 1e-6")
    f = merge_breaks(sc.f_min, sc.f_max, s0.f_grid)
    sk = s0.evaluate(f)
    gk = G.evaluate(sc.cos_c * f)
    act = gk * sk > 0
    if not np.any(act):
        return 0.0
    f, sk, gk = f[act], sk[act], gk[act]
    grad = sc.kappa * sk / (c * (1 + sc.kappa * gk * sk))
    inner = InnerIntegral(s0, sc.f_min, sc.f_max)
    om = np.mod(sc.cos_c * f, G.period)
    cost = inner.symmetric(om, G.period)
    return float(np.max(np.abs(grad - mu * cost) / grad))


def power_gap(G: AngularSpectrum, s0: SampledSpectrum, sc: Scenario) -> float:
    """``|P - P_R| / P_R`` (absolute power when ``P_R = 0``)."""
    p = radiated_power_asymptotic(G, s0, sc.f_min, sc.f_max)
    return abs(p - sc.p_r) / sc.p_r if sc.p_r > 0 else abs(p)


def alternating_optimize(init_G: AngularSpectrum, sc: Scenario, max_iter: int = 200,
                         tol: float = 1e-12) -> OptimizationResult:
    """Alternate water-filling (S0 | G) and the closed-form G-update (G | S0).

    Stops when one full alternation changes the rate by less than
    ``tol * rate`` or after ``max_iter`` alternations.  ``rate_history``
    holds the rate after every half step, so its monotonicity can be checked.
    """
    check_broadside_regime(sc.theta_c, sc.f_min, sc.f_max)
    if sc.p_r == 0:
        f = sc.freq_grid()
        s0 = SampledSpectrum(f, np.zeros_like(f))
        return OptimizationResult(init_G, s0, 0.0, math.inf, 0.0, 0.0, 1, [0.0], True)
    G = init_G
    history: list[float] = []
    prev = None
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        s0, _ = waterfill_s0(G, sc)
        history.append(achievable_rate(G, s0, sc))
        G, mu = optimal_g_given_s0(s0, sc)
        rate = achievable_rate(G, s0, sc)
        history.append(rate)
        if prev is not None and abs(rate - prev) <= tol * rate:
            converged = True
            break
        prev = rate
    return OptimizationResult(
        G=G, s0=s0, rate=rate, mu=mu,
        kkt_residual=kkt_residual(G, s0, mu, sc),
        power_gap=power_gap(G, s0, sc),
        iterations=it, rate_history=history, converged=converged,
    )
