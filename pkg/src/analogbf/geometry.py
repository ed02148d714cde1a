"""Array geometries, broadband steering vectors and radiation intensity.

Elements are isotropic.  Steering vectors use true plane-wave delays, so
the phase of element ``n`` scales with frequency (beam squint) instead of
being frozen at the carrier.

Coordinate conventions
----------------------
* Directions are given by the polar angle ``theta`` measured from the +z
  axis and the azimuth ``phi`` measured from +x in the x-y plane.
* A ULA lies on the z axis with its first element at the origin, so
  ``theta`` is the angle from the array axis (end-fire at 0, broadside at
  pi/2).
* A UCA lies in the x-z plane centred at the origin; with ``phi = 0`` the
  polar angle ``theta`` is the in-plane angle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class Direction:
    """Far-field direction in spherical coordinates (radians)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= np.pi):
            raise InvalidArgumentError(f"theta must lie in [0, pi], got {self.theta}")
        if not (0.0 <= self.phi < 2.0 * np.pi):
            raise InvalidArgumentError(f"phi must lie in [0, 2pi), got {self.phi}")

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float = 0.0) -> "Direction":
        return cls(np.deg2rad(theta_deg), np.deg2rad(phi_deg % 360.0))

    def unit_vector(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """Element positions (meters) plus the design (center) frequency.

    Attributes
    ----------
    elements : ndarray, shape (N, 3)
    f_c : float
        Center frequency in Hz.
    kind : {"ula", "uca", "generic"}
    spacing : float or None
        Element spacing in wavelengths at ``f_c`` (ULA only).
    """

    elements: np.ndarray
    f_c: float
    kind: str = "generic"
    spacing: float | None = None

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.elements, dtype=float))
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise InvalidArgumentError("elements must be a non-empty (N, 3) array")
        if not np.all(np.isfinite(pos)):
            raise InvalidArgumentError("element positions must be finite")
        if not (np.isfinite(self.f_c) and self.f_c > 0):
            raise InvalidArgumentError("f_c must be positive")
        if self.kind not in ("ula", "uca", "generic"):
            raise InvalidArgumentError(f"unknown geometry kind {self.kind!r}")
        pos.setflags(write=False)
        object.__setattr__(self, "elements", pos)

    @property
    def n(self) -> int:
        return self.elements.shape[0]

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c

    def delays(self, unit_vectors: np.ndarray) -> np.ndarray:
        """Plane-wave delays ``p_n . k / c`` in seconds, shape (..., N)."""
        return np.asarray(unit_vectors) @ self.elements.T / SPEED_OF_LIGHT

    def steering_matrix(self, f, unit_vectors: np.ndarray) -> np.ndarray:
        """Steering vectors for broadcastable frequencies and directions.

        ``f`` broadcasts against the leading shape of ``unit_vectors``
        (shape (..., 3)); the result has shape (..., N).
        """
        tau = self.delays(unit_vectors)
        f = np.asarray(f, dtype=float)[..., None]
        return np.exp(-2j * np.pi * f * tau)


def ula_geometry(n: int, d: float, f_c: float) -> ArrayGeometry:
    """ULA of ``n`` isotropic elements, spacing ``d`` wavelengths at ``f_c``."""
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n}")
    if not d > 0:
        raise InvalidArgumentError(f"spacing must be positive, got {d}")
    if not f_c > 0:
        raise InvalidArgumentError(f"f_c must be positive, got {f_c}")
    step = d * SPEED_OF_LIGHT / f_c
    pos = np.zeros((int(n), 3))
    pos[:, 2] = np.arange(int(n)) * step
    return ArrayGeometry(pos, float(f_c), kind="ula", spacing=float(d))


def uca_default_radius(n: int, f_c: float) -> float:
    """Radius giving half-wavelength arc spacing at ``f_c``: N*lambda/(4*pi)."""
    return n * (SPEED_OF_LIGHT / f_c) / (4.0 * np.pi)


def uca_geometry(n: int, radius: float | None, f_c: float) -> ArrayGeometry:
    """UCA in the x-z plane; element ``k`` sits at polar angle ``2*pi*k/n``.

    ``radius=None`` selects :func:`uca_default_radius`.
    """
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n}")
    if not f_c > 0:
        raise InvalidArgumentError(f"f_c must be positive, got {f_c}")
    if radius is None:
        radius = uca_default_radius(int(n), f_c)
    if not radius >= 0:
        raise InvalidArgumentError(f"radius must be non-negative, got {radius}")
    ang = 2.0 * np.pi * np.arange(int(n)) / int(n)
    pos = np.column_stack([radius * np.sin(ang), np.zeros(int(n)), radius * np.cos(ang)])
    return ArrayGeometry(pos, float(f_c), kind="uca")


def _check_freq(f):
    if np.any(np.asarray(f) <= 0):
        raise InvalidArgumentError("frequency must be positive")


def steering_vector(g: ArrayGeometry, f: float, direction: Direction) -> np.ndarray:
    """Broadband array response ``a(f, direction)``; unit-modulus entries."""
    _check_freq(f)
    return g.steering_matrix(f, direction.unit_vector())


def ula_steering_vector(n: int, d: float, f: float, f_c: float, theta: float) -> np.ndarray:
    """Direct ULA evaluation ``exp(-j 2 pi d cos(theta) n f / f_c)``."""
    _check_freq(f)
    return np.exp(-2j * np.pi * d * np.cos(theta) * np.arange(n) * f / f_c)


def _weights(g: ArrayGeometry, b) -> np.ndarray:
    b = np.asarray(b, dtype=complex).ravel()
    if b.size != g.n:
        raise InvalidArgumentError(f"beamformer has {b.size} weights, geometry has {g.n} elements")
    return b


def radiation_intensity(g: ArrayGeometry, b, f: float, direction: Direction) -> float:
    """``|a(f, dir)^T b|^2`` (dimensionless)."""
    b = _weights(g, b)
    return float(np.abs(steering_vector(g, f, direction) @ b) ** 2)


def intensity_grid(g: ArrayGeometry, b, freqs, thetas, phi: float = 0.0) -> np.ndarray:
    """Radiation intensity on a (len(freqs), len(thetas)) grid at fixed ``phi``."""
    b = _weights(g, b)
    freqs = np.asarray(freqs, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    _check_freq(freqs)
    k = np.column_stack([np.sin(thetas) * np.cos(phi), np.sin(thetas) * np.sin(phi), np.cos(thetas)])
    tau = g.delays(k)  # (T, N)
    a = np.exp(-2j * np.pi * freqs[:, None, None] * tau[None, :, :])
    return np.abs(a @ b) ** 2


def matched_beamformer(g: ArrayGeometry, f: float, direction: Direction) -> np.ndarray:
    """Unit-norm conjugate beamformer ``conj(a(f, dir)) / sqrt(N)``."""
    return np.conj(steering_vector(g, f, direction)) / np.sqrt(g.n)


def angular_spectrum_finite(b, d: float, f_c: float, omega) -> np.ndarray | float:
    """Finite-array angular spectrum ``G(omega) = |sum_n b_n e^{-j 2 pi d n omega / f_c}|^2``.

    For ``d = 0.5`` this is periodic in ``omega`` with period ``2 f_c``.
    ``omega = cos(theta) * f`` reproduces the ULA radiation intensity.
    """
    b = np.asarray(b, dtype=complex).ravel()
    om = np.asarray(omega, dtype=float)
    # reduce the phase per element modulo 2*pi to keep periodicity exact
    phase = np.mod(np.outer(om.ravel() * (d / f_c), np.arange(b.size)), 1.0)
    val = np.abs(np.exp(-2j * np.pi * phase) @ b) ** 2
    return float(val[0]) if om.ndim == 0 else val.reshape(om.shape)
