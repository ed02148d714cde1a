"""Grid-sampled nonnegative spectra.

Both representations are piecewise linear between grid points and zero
outside the grid span.  :class:`AngularSpectrum` additionally wraps its
argument modulo ``2 f_c`` before evaluation, so a grid that covers only part
of the period describes a function that vanishes on the rest of it; this is
how band-limited (brick-wall) shapes keep exact jumps.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError

DEFAULT_FREQ_BINS = 2048
_GAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    """Composite trapezoid weights for (possibly non-uniform) nodes ``x``."""
    x = np.asarray(x, dtype=float)
    w = np.zeros_like(x)
    if x.size < 2:
        return w
    h = np.diff(x)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


def gauss_pieces(breaks, order: int = 8):
    """Gauss-Legendre nodes on every sub-interval of sorted ``breaks``.

    Returns ``(nodes, weights, piece)`` where ``piece[i]`` is the index of the
    left breakpoint of the interval containing ``nodes[i]``.  Zero-length
    intervals are dropped.
    """
    if order not in _GAUSS_CACHE:
        _GAUSS_CACHE[order] = np.polynomial.legendre.leggauss(order)
    x0, w0 = _GAUSS_CACHE[order]
    breaks = np.asarray(breaks, dtype=float)
    lo, hi = breaks[:-1], breaks[1:]
    keep = hi > lo
    idx = np.nonzero(keep)[0]
    lo, hi = lo[keep], hi[keep]
    half = (hi - lo) / 2
    mid = (hi + lo) / 2
    nodes = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    weights = (half[:, None] * w0[None, :]).ravel()
    piece = np.repeat(idx, order)
    return nodes, weights, piece


def merge_breaks(a: float, b: float, *point_sets) -> np.ndarray:
    """Sorted unique breakpoints within ``[a, b]``, endpoints included."""
    pts = [np.array([a, b], dtype=float)]
    for p in point_sets:
        p = np.asarray(p, dtype=float).ravel()
        pts.append(p[(p > a) & (p < b)])
    return np.unique(np.concatenate(pts))


def _check_grid(grid, values, name):
    grid = np.asarray(grid, dtype=float).ravel()
    values = np.asarray(values, dtype=float).ravel()
    if grid.size < 2:
        raise InvalidArgumentError(f"{name} needs at least 2 grid points")
    if grid.shape != values.shape:
        raise InvalidArgumentError(f"{name}: grid and values differ in length")
    if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0):
        raise InvalidArgumentError(f"{name}: grid must be finite and strictly increasing")
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise InvalidArgumentError(f"{name}: values must be finite and nonnegative")
    grid.setflags(write=False)
    values.setflags(write=False)
    return grid, values


def _interp_zero(grid, values, x, slack):
    x = np.asarray(x, dtype=float)
    inside = (x >= grid[0] - slack) & (x <= grid[-1] + slack)
    y = np.interp(np.clip(x, grid[0], grid[-1]), grid, values)
    return np.where(inside, y, 0.0)


@dataclass(frozen=True, eq=False)
class SampledSpectrum:
    """Nonnegative function of frequency, e.g. the PSD ``S0(f)`` in W/Hz."""

    f_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g, v = _check_grid(self.f_grid, self.values, "SampledSpectrum")
        object.__setattr__(self, "f_grid", g)
        object.__setattr__(self, "values", v)

    @classmethod
    def flat(cls, f_min: float, f_max: float, level: float, n: int = DEFAULT_FREQ_BINS):
        return cls(np.linspace(f_min, f_max, n), np.full(n, float(level)))

    @classmethod
    def from_function(cls, func, f_min: float, f_max: float, n: int = DEFAULT_FREQ_BINS):
        f = np.linspace(f_min, f_max, n)
        return cls(f, func(f))

    @property
    def span(self) -> tuple[float, float]:
        return float(self.f_grid[0]), float(self.f_grid[-1])

    def evaluate(self, x):
        """Linear interpolation; 0 outside the grid span."""
        y = _interp_zero(self.f_grid, self.values, x, 0.0)
        return float(y) if np.ndim(y) == 0 else y

    def integrate(self, a: float, b: float) -> float:
        """Exact integral of the interpolant over ``[a, b]``."""
        if a > b:
            raise InvalidArgumentError(f"integration bounds reversed: {a} > {b}")
        lo, hi = max(a, self.f_grid[0]), min(b, self.f_grid[-1])
        if hi <= lo:
            return 0.0
        x = merge_breaks(lo, hi, self.f_grid)
        y = np.interp(x, self.f_grid, self.values)
        return float(np.sum(trapezoid_weights(x) * y))

    def is_zero(self) -> bool:
        return not np.any(self.values > 0)

    def scaled(self, factor: float) -> "SampledSpectrum":
        return SampledSpectrum(self.f_grid, self.values * factor)

    def to_csv(self, path, header=("freq_hz", "s0_w_per_hz")):
        write_columns(path, header, [self.f_grid, self.values])

    @classmethod
    def from_csv(cls, path):
        cols = read_columns(path, 2)
        return cls(cols[0], cols[1])


@dataclass(frozen=True, eq=False)
class AngularSpectrum:
    """Periodic angular spectrum ``G(Omega)``, period ``2 f_c``.

    ``omega_grid`` lies inside ``[0, 2 f_c]``.  Between grid points the
    function is linear; inside the period but outside the grid span it is 0.
    """

    omega_grid: np.ndarray
    values: np.ndarray
    f_c: float

    def __post_init__(self):
        g, v = _check_grid(self.omega_grid, self.values, "AngularSpectrum")
        if not self.f_c > 0:
            raise InvalidArgumentError("f_c must be positive")
        period = 2.0 * self.f_c
        tol = 1e-12 * period
        if g[0] < -tol or g[-1] > period + tol:
            raise InvalidArgumentError("omega_grid must lie within one period [0, 2 f_c]")
        object.__setattr__(self, "omega_grid", g)
        object.__setattr__(self, "values", v)
        cum = np.concatenate([[0.0], np.cumsum(np.diff(g) * (v[1:] + v[:-1]) / 2)])
        object.__setattr__(self, "_cum", cum)

    @classmethod
    def constant(cls, level: float, f_c: float) -> "AngularSpectrum":
        return cls(np.array([0.0, 2.0 * f_c]), np.array([level, level], dtype=float), f_c)

    @property
    def period(self) -> float:
        return 2.0 * self.f_c

    @property
    def total(self) -> float:
        """Integral over one period."""
        return float(self._cum[-1])

    def _wrap(self, x):
        return np.mod(np.asarray(x, dtype=float), self.period)

    def evaluate(self, x):
        """Value at ``x`` after reduction modulo ``2 f_c``."""
        r = self._wrap(x)
        y = _interp_zero(self.omega_grid, self.values, r, 1e-12 * self.period)
        return float(y) if np.ndim(y) == 0 else y

    def _cumulative(self, r):
        """``int_0^r G`` for ``r`` in ``[0, 2 f_c]``."""
        g, v = self.omega_grid, self.values
        rc = np.clip(r, g[0], g[-1])
        j = np.clip(np.searchsorted(g, rc, side="right") - 1, 0, g.size - 2)
        gr = np.interp(rc, g, v)
        return self._cum[j] + (rc - g[j]) * (v[j] + gr) / 2

    def antiderivative(self, x):
        """``int_0^x G(t) dt`` for any real ``x`` (periodic extension)."""
        x = np.asarray(x, dtype=float)
        k = np.floor(x / self.period)
        r = x - k * self.period
        return k * self.total + self._cumulative(r)

    def is_zero(self) -> bool:
        return not np.any(self.values > 0)

    def to_csv(self, path, header=("omega_hz", "g")):
        write_columns(path, header, [self.omega_grid, self.values])

    @classmethod
    def from_csv(cls, path, f_c: float):
        cols = read_columns(path, 2)
        return cls(cols[0], cols[1], f_c)


def format_float(x: float) -> str:
    """Locale-free float formatting with 15 significant digits."""
    x = float(x)
    if not np.isfinite(x):
        return repr(x)
    return f"{x:#.15g}"


def write_columns(path, header, columns):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([format_float(v) for v in row])


def read_columns(path, ncols: int) -> list[np.ndarray]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise InvalidArgumentError(f"{path}: no data rows")
    data = np.array([[float(c) for c in r[:ncols]] for r in rows[1:]], dtype=float)
    return [data[:, i] for i in range(ncols)]
