"""Physically defined radiated power.

Three routes to the same quantity:

* :func:`radiated_power_exact` integrates the far-field intensity of a
  finite array over the sphere and the band.
* :func:`radiated_power_asymptotic` uses the infinite-array angular spectrum,
  ``P = int S0(f) D(f) df`` with ``D(f) = 1/2 int_{-1}^{1} G(u f) du``.
* :func:`radiated_power_omega_form` swaps the order of integration,
  ``P = int_0^{2 f_c} (G(W) + G(2 f_c - W))/2 * I(W) dW`` with
  ``I(W) = int S0(W/u)/u du``.

The two spectral forms integrate the piecewise-linear interpolants exactly:
breakpoints of every factor are merged and each smooth piece gets a short
Gauss-Legendre rule, so they agree to rounding error.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError
from .geometry import SPEED_OF_LIGHT, ArrayGeometry, _weights
from .spectra import AngularSpectrum, SampledSpectrum, gauss_pieces, merge_breaks

DEFAULT_U_NODES = 64
DEFAULT_PHI_NODES = 128
_ORDER = 8


def _check_band(f_min, f_max):
    if not (0 < f_min < f_max) or not np.isfinite(f_max):
        raise InvalidArgumentError(f"invalid band [{f_min}, {f_max}]")


# -- finite arrays ----------------------------------------------------------

def sphere_node_counts(g: ArrayGeometry, f_max: float, u_nodes=DEFAULT_U_NODES,
                       phi_nodes=DEFAULT_PHI_NODES) -> tuple[int, int]:
    """Node counts large enough for the array's electrical size at ``f_max``.

    The intensity is band-limited in ``u = cos(theta)`` and in ``phi`` by
    ``k * aperture``; the requested counts are raised to cover that.
    """
    pos = g.elements
    diam = float(np.max(np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)))
    kd = 2 * np.pi * f_max * diam / SPEED_OF_LIGHT
    return max(int(u_nodes), int(np.ceil(0.5 * kd)) + 40), max(int(phi_nodes), int(np.ceil(kd)) + 40)


def sphere_average_intensity(g: ArrayGeometry, b, f, u_nodes=DEFAULT_U_NODES,
                             phi_nodes=DEFAULT_PHI_NODES, _chunk=64):
    """``(1/4 pi) * surface integral of |a(f, .)^T b|^2`` for each ``f``.

    Gauss-Legendre in ``u = cos(theta)`` times the trapezoid rule in ``phi``.
    For a ULA (on the z axis) the ``phi`` integral is done analytically.
    """
    b = _weights(g, b)
    scalar = np.ndim(f) == 0
    f = np.atleast_1d(np.asarray(f, dtype=float))
    if np.any(f <= 0):
        raise InvalidArgumentError("frequency must be positive")
    nu, nphi = sphere_node_counts(g, float(f.max()), u_nodes, phi_nodes)
    u, wu = np.polynomial.legendre.leggauss(nu)
    if g.kind == "ula":
        k = np.column_stack([np.zeros(nu), np.zeros(nu), u])
        w = wu / 2.0
    else:
        phi = 2 * np.pi * np.arange(nphi) / nphi
        s = np.sqrt(1.0 - u**2)
        k = np.stack([np.outer(s, np.cos(phi)), np.outer(s, np.sin(phi)),
                      np.repeat(u[:, None], nphi, axis=1)], axis=-1).reshape(-1, 3)
        w = np.repeat(wu, nphi) * (2 * np.pi / nphi) / (4 * np.pi)
    tau = g.delays(k)  # (Q, N)
    out = np.empty(f.size)
    for i in range(0, f.size, _chunk):
        fs = f[i:i + _chunk]
        field = np.exp(-2j * np.pi * fs[:, None, None] * tau[None]) @ b
        out[i:i + _chunk] = (np.abs(field) ** 2) @ w
    return float(out[0]) if scalar else out


def ula_power_density(b, d: float, f_ratio):
    """Closed-form sphere average for a ULA: ``sum_{n,m} b_n b_m^* sinc(2 d (n-m) f/f_c)``.

    ``f_ratio = f / f_c``; numpy's normalized sinc is used.
    """
    b = np.asarray(b, dtype=complex).ravel()
    n = b.size
    r = np.array([np.vdot(b[: n - k], b[k:]) for k in range(n)])  # sum_m b_{m+k} b_m^*
    f_ratio = np.atleast_1d(np.asarray(f_ratio, dtype=float))
    lags = np.arange(1, n)
    s = np.sinc(2 * d * np.outer(f_ratio, lags))
    return r[0].real + 2 * (s @ r[1:].real)


def radiated_power_exact(g: ArrayGeometry, b, s0: SampledSpectrum, f_min: float, f_max: float,
                         u_nodes=DEFAULT_U_NODES, phi_nodes=DEFAULT_PHI_NODES,
                         freq_order: int = 3) -> float:
    """``int S0(f) (1/4 pi) oint |a(f,.)^T b|^2 dA df`` over ``[f_min, f_max]``.

    The frequency rule is Gauss-Legendre of ``freq_order`` on every cell of
    the ``s0`` grid (the intensity is smooth in ``f``, ``S0`` is linear per
    cell).
    """
    _check_band(f_min, f_max)
    b = _weights(g, b)
    xs = merge_breaks(f_min, f_max, s0.f_grid)
    fq, wq, _ = gauss_pieces(xs, freq_order)
    sq = s0.evaluate(fq)
    act = sq > 0
    if not np.any(act):
        return 0.0
    dens = sphere_average_intensity(g, b, fq[act], u_nodes, phi_nodes)
    return float(np.sum(wq[act] * sq[act] * dens))


def norm_power(b, s0: SampledSpectrum, f_min: float, f_max: float) -> float:
    """Conventional ``||b||^2 int S0 df`` metric (ignores the array geometry)."""
    _check_band(f_min, f_max)
    b = np.asarray(b, dtype=complex).ravel()
    return float(np.vdot(b, b).real * s0.integrate(f_min, f_max))


# -- infinite array: frequency form ----------------------------------------

def angular_power_density(G: AngularSpectrum, f):
    """``D(f) = 1/2 int_{-1}^{1} G(u f) du = (A(f) - A(-f)) / (2 f)``."""
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise InvalidArgumentError("frequency must be positive")
    d = (G.antiderivative(f) - G.antiderivative(-f)) / (2 * f)
    d = np.maximum(d, 0.0)
    return float(d) if d.ndim == 0 else d


def _density_breaks(G: AngularSpectrum, f_min: float, f_max: float) -> np.ndarray:
    """Frequencies where ``D(f)`` has a kink: ``+-f`` hits a G grid node."""
    P = G.period
    ks = np.arange(np.floor(f_min / P) - 1, np.ceil(f_max / P) + 2)
    om = G.omega_grid
    return np.concatenate([(om[None, :] + P * ks[:, None]).ravel(),
                           (P * ks[:, None] - om[None, :]).ravel()])


def _freq_nodes(G, s0_grid, f_min, f_max):
    xs = merge_breaks(f_min, f_max, s0_grid, _density_breaks(G, f_min, f_max))
    return gauss_pieces(xs, _ORDER)


def radiated_power_asymptotic(G: AngularSpectrum, s0: SampledSpectrum, f_min: float,
                              f_max: float) -> float:
    """``int_{f_min}^{f_max} D(f) S0(f) df`` for the infinite array."""
    _check_band(f_min, f_max)
    fq, wq, _ = _freq_nodes(G, s0.f_grid, f_min, f_max)
    return float(np.sum(wq * s0.evaluate(fq) * angular_power_density(G, fq)))


def s0_power_weights(G: AngularSpectrum, f_grid, f_min: float, f_max: float) -> np.ndarray:
    """Exact sensitivities ``dP/dS_k`` for a piecewise-linear ``S0`` on ``f_grid``.

    ``c_k = int D(f) phi_k(f) df`` with ``phi_k`` the hat function of node
    ``k``; for any ``S0`` on that grid the asymptotic power is ``sum c_k S_k``.
    """
    _check_band(f_min, f_max)
    f_grid = np.asarray(f_grid, dtype=float)
    if f_grid[0] < f_min or f_grid[-1] > f_max:
        raise InvalidArgumentError("frequency grid must lie inside the band")
    fq, wq, _ = _freq_nodes(G, f_grid, f_grid[0], f_grid[-1])
    return _hat_project(f_grid, fq, wq * angular_power_density(G, fq))


def _hat_project(grid, xq, vals):
    j = np.clip(np.searchsorted(grid, xq, side="right") - 1, 0, grid.size - 2)
    t = (xq - grid[j]) / (grid[j + 1] - grid[j])
    return (np.bincount(j, vals * (1 - t), minlength=grid.size)
            + np.bincount(j + 1, vals * t, minlength=grid.size))


# -- infinite array: Omega form --------------------------------------------

class InnerIntegral:
    """``I(W) = int_{min(W/f_max,1)}^{min(W/f_min,1)} S0(W/u)/u du``.

    Evaluated in the frequency variable ``f = W/u`` as
    ``int_{max(W, f_min)}^{f_max} S0(f)/f df``; 0 for ``W >= f_max``.
    """

    def __init__(self, s0: SampledSpectrum, f_min: float, f_max: float):
        _check_band(f_min, f_max)
        self.s0, self.f_min, self.f_max = s0, float(f_min), float(f_max)
        self.nodes = merge_breaks(f_min, f_max, s0.f_grid)
        fq, wq, piece = gauss_pieces(self.nodes, _ORDER)
        cell = np.bincount(piece, wq * s0.evaluate(fq) / fq, minlength=self.nodes.size)
        # tail[j] = int_{nodes[j]}^{f_max} S0/f
        self.tail = np.concatenate([np.cumsum(cell[::-1])[::-1], [0.0]])[: self.nodes.size]

    def __call__(self, omega):
        om = np.atleast_1d(np.asarray(omega, dtype=float))
        lo = np.maximum(om, self.f_min)
        out = np.zeros(om.shape)
        m = lo < self.f_max
        if np.any(m):
            lo = lo[m]
            j = np.clip(np.searchsorted(self.nodes, lo, side="right") - 1, 0, self.nodes.size - 2)
            hi = self.nodes[j + 1]
            x0, w0 = np.polynomial.legendre.leggauss(_ORDER)
            half, mid = (hi - lo) / 2, (hi + lo) / 2
            x = mid[:, None] + half[:, None] * x0
            part = np.sum(half[:, None] * w0 * self.s0.evaluate(x) / x, axis=1)
            out[m] = part + self.tail[j + 1]
        return out if np.ndim(omega) else float(out[0])

    def symmetric(self, omega, period):
        """``(I(W) + I(period - W)) / 2``, the sensitivity ``dP/dG(W)``."""
        om = np.asarray(omega, dtype=float)
        return (self(om) + self(period - om)) / 2


def _omega_breaks(G, inner: InnerIntegral):
    P = G.period
    return np.concatenate([G.omega_grid, P - G.omega_grid, inner.nodes, P - inner.nodes])


def radiated_power_omega_form(G: AngularSpectrum, s0: SampledSpectrum, f_min: float,
                              f_max: float) -> float:
    """Change-of-variables power ``int_0^{2 f_c} Gsym(W) I(W) dW``."""
    _check_band(f_min, f_max)
    P = G.period
    if f_max > P:
        raise InvalidArgumentError("band must lie below one period of G (f_max <= 2 f_c)")
    inner = InnerIntegral(s0, f_min, f_max)
    xs = merge_breaks(0.0, min(P, f_max), _omega_breaks(G, inner))
    wq_nodes, wq, _ = gauss_pieces(xs, _ORDER)
    gsym = (G.evaluate(wq_nodes) + G.evaluate(P - wq_nodes)) / 2
    return float(np.sum(wq * gsym * inner(wq_nodes)))


def g_power_weights(omega_grid, f_c: float, s0: SampledSpectrum, f_min: float,
                    f_max: float) -> np.ndarray:
    """Exact sensitivities ``dP/dG_k`` for a piecewise-linear G on ``omega_grid``.

    G is taken as zero outside the grid span (within the period), so the end
    nodes carry half hats.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    P = 2.0 * f_c
    inner = InnerIntegral(s0, f_min, f_max)
    brk = np.concatenate([omega_grid, inner.nodes, P - inner.nodes])
    xs = merge_breaks(omega_grid[0], omega_grid[-1], brk)
    xq, wq, _ = gauss_pieces(xs, _ORDER)
    return _hat_project(omega_grid, xq, wq * inner.symmetric(xq, P))
