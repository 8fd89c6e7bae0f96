"""Radiation patterns of a uniform N x N square array.

Three models live here:

* the exact composite pattern (3GPP element pattern times the square-array
  factor), normalised so that every array size radiates the same total
  power;
* a radially symmetric closed-form approximation of its main lobe;
* a piecewise-constant "sectorized" staircase of that approximation, whose
  rings are what the closed-form SNR statistics are built on.

Angles are radians throughout; the 3GPP element pattern converts to degrees
internally.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyError, DomainError
from .specfun import QuadratureSpec

SPEED_OF_LIGHT = 3e8
APPROX_SCALE = 0.2025
SECTOR0_VARIANTS = ("continuity", "paper")

NORMALIZATION_QUAD = QuadratureSpec(max_intervals=2048, abs_tol=0.0, rel_tol=1e-9)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class ArrayConfig:
    """Geometry and element parameters of one N x N array."""

    n: int
    carrier_hz: float = 50e9
    element_spacing_wavelengths: float = 0.5
    beta_x: float = 0.0
    beta_y: float = 0.0
    g_max_dbi: float = 8.0
    front_back_db: float = 30.0
    sidelobe_limit_db: float = 30.0
    theta_3db_deg: float = 65.0
    phi_3db_deg: float = 65.0
    total_power_constant: float = 4.0 * math.pi

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        if not self.carrier_hz > 0:
            raise DomainError("carrier_hz must be > 0")
        if not self.element_spacing_wavelengths > 0:
            raise DomainError("element spacing must be > 0")
        if not self.total_power_constant > 0:
            raise DomainError("total_power_constant must be > 0")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength_m

    @property
    def spacing_m(self) -> float:
        return self.element_spacing_wavelengths * self.wavelength_m

    @property
    def kd(self) -> float:
        """Electrical spacing k * d_a (pi for half-wavelength spacing)."""
        return 2.0 * math.pi * self.element_spacing_wavelengths

    @property
    def g_max_linear(self) -> float:
        return 10.0 ** (self.g_max_dbi / 10.0)

    def with_n(self, n: int) -> "ArrayConfig":
        from dataclasses import replace
        return replace(self, n=n)


@dataclass(frozen=True)
class SectorizedPattern:
    """Staircase gain over concentric rings of the radial pointing error.

    Ring ``i`` covers ``i/(D N) < r <= (i+1)/(D N)`` (ring 0 includes
    ``r = 0``); the gain is zero beyond the outermost ring.
    """

    n: int
    d_param: int
    lobes: int
    levels: tuple
    norm_constant: float
    sector0: str = "continuity"
    _gains: np.ndarray = field(init=False, repr=False, compare=False)
    _bounds: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bounds = np.array([lv[0] for lv in self.levels], dtype=float)
        gains = np.array([lv[1] for lv in self.levels], dtype=float)
        if len(self.levels) != self.lobes * self.d_param:
            raise DomainError("sector count must equal lobes * d_param")
        if np.any(np.diff(bounds) <= 0) or np.any(gains < 0):
            raise DomainError("bounds must increase and gains be non-negative")
        bounds.setflags(write=False)
        gains.setflags(write=False)
        object.__setattr__(self, "_bounds", bounds)
        object.__setattr__(self, "_gains", gains)

    @property
    def bounds(self) -> np.ndarray:
        return self._bounds

    @property
    def gains(self) -> np.ndarray:
        return self._gains

    @property
    def num_sectors(self) -> int:
        return len(self.levels)

    def sector_index(self, r):
        """Ring index of radial error ``r``; -1 beyond the last ring."""
        r = np.asarray(r, dtype=float)
        idx = np.ceil(r * self.d_param * self.n).astype(np.int64) - 1
        idx = np.maximum(idx, 0)
        return np.where(idx < self.num_sectors, idx, -1)

    def gain(self, r):
        idx = self.sector_index(r)
        out = np.where(idx >= 0, self._gains[np.maximum(idx, 0)], 0.0)
        return out if out.ndim else float(out)


# --------------------------------------------------------------------------
# Exact pattern
# --------------------------------------------------------------------------

def pointing_angles(theta_x, theta_y):
    """Map axis deviations to spherical (theta, phi) about the boresight.

    ``phi`` is returned in ``[0, 2*pi)`` and is 0 at the boresight.
    """
    sx = np.sin(theta_x)
    sy = np.sin(theta_y)
    theta = np.arctan(np.hypot(sx, sy))
    phi = np.mod(np.arctan2(sy, sx), 2.0 * np.pi)
    if np.ndim(theta) == 0:
        return float(theta), float(phi)
    return theta, phi


def _attenuation_db(vertical_deg, horizontal_deg, cfg: ArrayConfig):
    a_v = np.minimum(12.0 * ((vertical_deg - 90.0) / cfg.theta_3db_deg) ** 2, cfg.sidelobe_limit_db)
    a_h = np.minimum(12.0 * (horizontal_deg / cfg.phi_3db_deg) ** 2, cfg.front_back_db)
    return np.minimum(a_v + a_h, cfg.front_back_db)


def element_gain_db(theta_x, theta_y, cfg: ArrayConfig):
    """3GPP single-element gain in dBi for axis deviations (radians).

    The vertical angle is taken with a two-argument arctangent so that it
    lies in [0, 180] degrees and equals 90 at the boresight.
    """
    sx = np.sin(theta_x)
    vertical = np.degrees(np.arctan2(np.sqrt(1.0 + sx * sx), np.sin(theta_y)))
    horizontal = np.degrees(theta_x)
    out = cfg.g_max_dbi - _attenuation_db(vertical, horizontal, cfg)
    return out if np.ndim(out) else float(out)


def _dirichlet_sq(psi, n: int):
    """(sin(n psi/2) / (n sin(psi/2)))^2 with the removable points filled in."""
    psi = np.asarray(psi, dtype=float)
    if n == 1:
        return np.ones_like(psi)
    s = np.sin(0.5 * psi)
    small = np.abs(s) < 1e-9
    safe = np.where(small, 1.0, s)
    ratio = np.sin(0.5 * n * psi) / (n * safe)
    return np.where(small, 1.0, ratio * ratio)


def array_factor(cfg: ArrayConfig, theta, phi):
    """Unnormalised square-array factor (1 at broadside for zero phasing)."""
    st = np.sin(theta)
    psi_x = cfg.kd * st * np.cos(phi) + cfg.beta_x
    psi_y = cfg.kd * st * np.sin(phi) + cfg.beta_y
    out = _dirichlet_sq(psi_x, cfg.n) * _dirichlet_sq(psi_y, cfg.n)
    return out if out.ndim else float(out)


def _element_linear_direction(cfg: ArrayConfig, ux, uy, uz):
    # vertical angle measured from +y, horizontal angle in the x-z plane
    vertical = np.degrees(np.arccos(np.clip(uy, -1.0, 1.0)))
    horizontal = np.degrees(np.arctan2(ux, uz))
    return 10.0 ** ((cfg.g_max_dbi - _attenuation_db(vertical, horizontal, cfg)) / 10.0)


def unnormalized_pattern(cfg: ArrayConfig, theta, phi):
    """Element times array factor at a direction on the full sphere."""
    st = np.sin(theta)
    ux, uy, uz = st * np.cos(phi), st * np.sin(phi), np.cos(theta)
    psi_x = cfg.kd * ux + cfg.beta_x
    psi_y = cfg.kd * uy + cfg.beta_y
    af = _dirichlet_sq(psi_x, cfg.n) * _dirichlet_sq(psi_y, cfg.n)
    return af * _element_linear_direction(cfg, ux, uy, uz)


def _composite_nodes(lo: float, hi: float, panels: int):
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    nodes = ((_GL_X[None, :] + 1.0) * half[:, None] + edges[:-1, None]).ravel()
    weights = (_GL_W[None, :] * half[:, None]).ravel()
    return nodes, weights


def sphere_integral(func, theta_panels: int, phi_panels: int, quarter: bool = False,
                    chunk: int = 256) -> float:
    """Integrate ``func(theta, phi) * sin(theta)`` over the unit sphere with a
    composite 8-point Gauss-Legendre product rule.

    With ``quarter=True`` only ``phi`` in [0, pi/2] is visited and the result
    is multiplied by four (valid for patterns symmetric in both axes).
    """
    th, wt = _composite_nodes(0.0, math.pi, theta_panels)
    ph_hi = 0.5 * math.pi if quarter else 2.0 * math.pi
    ph, wp = _composite_nodes(0.0, ph_hi, phi_panels)
    wt = wt * np.sin(th)
    total = 0.0
    for start in range(0, th.size, chunk):
        sl = slice(start, start + chunk)
        vals = func(th[sl, None], ph[None, :])
        total += float(wt[sl] @ (vals @ wp))
    return 4.0 * total if quarter else total


def _initial_panels(cfg: ArrayConfig) -> int:
    # null-to-null main-lobe width ~ 2 / (N s) rad; at least 8 panels across it
    width = 2.0 / (cfg.n * cfg.element_spacing_wavelengths)
    return max(16, int(math.ceil(8.0 * math.pi / width)))


def pattern_power_integral(cfg: ArrayConfig, theta_panels: int) -> float:
    """Sphere integral of the unnormalised pattern at a given resolution."""
    symmetric = cfg.beta_x == 0.0 and cfg.beta_y == 0.0
    phi_panels = max(theta_panels // 2, 8) if symmetric else 2 * theta_panels
    return sphere_integral(lambda t, p: unnormalized_pattern(cfg, t, p),
                           theta_panels, phi_panels, quarter=symmetric)


_norm_cache: dict = {}
_norm_lock = threading.Lock()


def normalization_constant(cfg: ArrayConfig, quad: QuadratureSpec | None = None) -> float:
    """Per-array scale ``G'_0 / integral(pattern)`` so that every array size
    radiates the same total power.

    Panels are doubled until two successive estimates agree to the
    tolerance in ``quad``; results are cached per (config, quad).
    """
    quad = quad or NORMALIZATION_QUAD
    key = (cfg, quad)
    with _norm_lock:
        hit = _norm_cache.get(key)
    if hit is not None:
        return hit
    panels = _initial_panels(cfg)
    coarse = pattern_power_integral(cfg, panels)
    while True:
        if 2 * panels > quad.max_intervals:
            raise AccuracyError(
                f"normalization for N={cfg.n} did not converge within {quad.max_intervals} panels")
        fine = pattern_power_integral(cfg, 2 * panels)
        if abs(fine - coarse) <= max(quad.abs_tol, quad.rel_tol * abs(fine)):
            break
        panels *= 2
        coarse = fine
    value = cfg.total_power_constant / fine
    with _norm_lock:
        _norm_cache.setdefault(key, value)
    return value


def precompute_normalization(cfgs, quad: QuadratureSpec | None = None) -> None:
    """Fill the normalisation cache before a parallel section."""
    for cfg in cfgs:
        normalization_constant(cfg, quad)


def actual_gain(cfg: ArrayConfig, theta_x, theta_y):
    """Normalised composite gain (linear) for axis deviations in radians."""
    sx = np.sin(theta_x)
    sy = np.sin(theta_y)
    scale = 1.0 / np.sqrt(1.0 + sx * sx + sy * sy)  # sin(theta) * (cos phi, sin phi) / (sx, sy)
    af = (_dirichlet_sq(cfg.kd * sx * scale + cfg.beta_x, cfg.n)
          * _dirichlet_sq(cfg.kd * sy * scale + cfg.beta_y, cfg.n))
    ge = 10.0 ** (np.asarray(element_gain_db(theta_x, theta_y, cfg)) / 10.0)
    out = normalization_constant(cfg) * af * ge
    return out if np.ndim(out) else float(out)


def directional_gain(cfg: ArrayConfig, theta, phi):
    """Normalised gain at a sphere direction; integrates to ``G'_0``."""
    return normalization_constant(cfg) * unnormalized_pattern(cfg, theta, phi)


def peak_gain(cfg: ArrayConfig) -> float:
    """Boresight gain, used for a perfectly aligned ground terminal."""
    return float(actual_gain(cfg, 0.0, 0.0))


# --------------------------------------------------------------------------
# Approximate and sectorized patterns
# --------------------------------------------------------------------------

def approx_constant(cfg: ArrayConfig) -> float:
    """Scale of the closed-form approximation, 0.2025 * G_max * G_0(N)."""
    return APPROX_SCALE * cfg.g_max_linear * normalization_constant(cfg)


def _half_sinc_sq(x):
    """(1 - cos x) / x^2, written as 2 sin^2(x/2) / x^2 to avoid cancellation."""
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0.0, 1.0, x)
    s = np.sin(0.5 * safe)
    return np.where(x == 0.0, 0.5, 2.0 * s * s / (safe * safe))


def approx_gain(cfg: ArrayConfig, theta_x, theta_y):
    """Radially symmetric main-lobe approximation of :func:`actual_gain`."""
    r = np.hypot(theta_x, theta_y)
    out = approx_constant(cfg) * cfg.kd ** 2 * _half_sinc_sq(cfg.n * cfg.kd * r)
    return out if out.ndim else float(out)


def sector_levels(cfg: ArrayConfig, d_param: int, lobes: int,
                  sector0: str = "continuity") -> np.ndarray:
    """Gain of every ring, innermost first."""
    if d_param < 2 or int(d_param) != d_param:
        raise DomainError(f"d_param must be an integer >= 2, got {d_param}")
    if lobes not in (1, 2):
        raise DomainError(f"lobes must be 1 or 2, got {lobes}")
    if sector0 not in SECTOR0_VARIANTS:
        raise DomainError(f"sector0 must be one of {SECTOR0_VARIANTS}, got {sector0!r}")
    g2 = approx_constant(cfg)
    kd2 = cfg.kd ** 2
    i = np.arange(1, lobes * d_param)
    rest = g2 * kd2 * _half_sinc_sq(i * cfg.kd / d_param)
    first = 2.0 * kd2 * g2 if sector0 == "paper" else 0.5 * kd2 * g2
    return np.concatenate([[first], rest])


def sectorize(cfg: ArrayConfig, d_param: int, lobes: int,
              sector0: str = "continuity") -> SectorizedPattern:
    """Piecewise-constant ring model of the approximate pattern.

    Ring ``i >= 1`` carries the approximate gain at its inner radius.  Ring 0
    uses the ``r -> 0`` limit (``"continuity"``) or four times that value
    (``"paper"``).
    """
    gains = sector_levels(cfg, d_param, lobes, sector0)
    upper = (np.arange(lobes * d_param) + 1.0) / (d_param * cfg.n)
    levels = tuple((float(u), float(g)) for u, g in zip(upper, gains))
    return SectorizedPattern(n=cfg.n, d_param=d_param, lobes=lobes, levels=levels,
                             norm_constant=approx_constant(cfg), sector0=sector0)
