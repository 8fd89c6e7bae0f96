"""Path loss, orientation statistics and the Gamma-mixture SNR models.

The end-to-end SNR of a hovering link is a finite mixture of Gamma laws:
each pair of pointing-error rings (one per aerial terminal) contributes one
component whose weight is the probability of landing in those rings and
whose mean is the deterministic link budget times the ring gains.
"""
from __future__ import annotations

import enum
import functools
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import antenna
from .antenna import ArrayConfig
from .errors import DomainError, UsageError
from .specfun import bessel_i0e, gammainc_lower, marcum_q1

log = logging.getLogger(__name__)

RESIDUAL_POLICIES = ("to_outage", "ignore")
PATH_LOSS_VARIANTS = ("3gpp", "as_printed")


class LinkType(str, enum.Enum):
    A2A = "A2A"
    G2A = "G2A"
    A2G = "A2G"


@dataclass(frozen=True)
class OrientationStats:
    """Gaussian jitter of one terminal: per-axis mean offsets and a common
    standard deviation, all in radians."""

    boresight_offset_x: float = 0.0
    boresight_offset_y: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise DomainError(f"sigma must be >= 0, got {self.sigma}")

    @classmethod
    def from_degrees(cls, offset_x: float, offset_y: float, sigma: float) -> "OrientationStats":
        return cls(math.radians(offset_x), math.radians(offset_y), math.radians(sigma))

    @classmethod
    def ground(cls) -> "OrientationStats":
        return cls(0.0, 0.0, 0.0)

    @property
    def offset_radial(self) -> float:
        return math.hypot(self.boresight_offset_x, self.boresight_offset_y)

    @property
    def is_ground(self) -> bool:
        return self.sigma == 0.0 and self.boresight_offset_x == 0.0 and self.boresight_offset_y == 0.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class LinkBudget:
    """One end-to-end link.  Powers are given in dBm and thresholds in dB;
    the linear values used by all internal maths are derived once here."""

    link_type: LinkType
    distance_m: float
    tx_power_dbm: float
    noise_power_dbm: float
    nakagami_m: float
    snr_threshold_db: float
    building_height_m: float
    tx_array: ArrayConfig
    rx_array: ArrayConfig
    tx_orientation: OrientationStats
    rx_orientation: OrientationStats
    d_param: int = 25
    lobes: int = 2
    sector0: str = "continuity"
    path_loss_variant: str = "3gpp"
    tx_power_mw: float = field(init=False)
    noise_power_mw: float = field(init=False)
    snr_threshold: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "link_type", LinkType(self.link_type))
        if not self.distance_m > 0:
            raise DomainError("distance_m must be > 0")
        if not self.building_height_m > 0:
            raise DomainError("building_height_m must be > 0")
        if not self.nakagami_m >= 0.5:
            raise DomainError(f"nakagami_m must be >= 0.5, got {self.nakagami_m}")
        if self.lobes not in (1, 2) or self.d_param < 2:
            raise DomainError("sectorization needs d_param >= 2 and lobes in {1, 2}")
        if self.sector0 not in antenna.SECTOR0_VARIANTS:
            raise DomainError(f"unknown sector0 variant {self.sector0!r}")
        if self.path_loss_variant not in PATH_LOSS_VARIANTS:
            raise DomainError(f"unknown path-loss variant {self.path_loss_variant!r}")
        if self.link_type is LinkType.G2A and not self.tx_orientation.is_ground:
            raise DomainError("G2A links need a ground (zero-jitter) transmitter")
        if self.link_type is LinkType.A2G and not self.rx_orientation.is_ground:
            raise DomainError("A2G links need a ground (zero-jitter) receiver")
        if not 10.0 <= self.distance_m <= 3000.0:
            log.warning("distance %.1f m is outside the 10-3000 m range the path-loss model "
                        "is exercised on", self.distance_m)
        object.__setattr__(self, "tx_power_mw", db_to_linear(self.tx_power_dbm))
        object.__setattr__(self, "noise_power_mw", db_to_linear(self.noise_power_dbm))
        object.__setattr__(self, "snr_threshold", db_to_linear(self.snr_threshold_db))

    @property
    def path_gain(self) -> float:
        return db_to_linear(path_loss_db(self.distance_m, self.tx_array.carrier_hz,
                                         self.building_height_m, self.path_loss_variant))

    @property
    def snr_scale(self) -> float:
        """P_t * h_L / noise: the SNR for unit antenna gain and unit fading."""
        return self.tx_power_mw * self.path_gain / self.noise_power_mw

    def with_sizes(self, nt: int | None = None, nr: int | None = None) -> "LinkBudget":
        tx = self.tx_array if nt is None else self.tx_array.with_n(nt)
        rx = self.rx_array if nr is None else self.rx_array.with_n(nr)
        return replace(self, tx_array=tx, rx_array=rx)


def path_loss_db(distance_m: float, carrier_hz: float, building_height_m: float,
                 variant: str = "3gpp") -> float:
    """Large-scale channel gain in dB (negative: a loss).

    ``variant="3gpp"`` follows the 3GPP rural-macro LOS form where the
    building-height correction on ``log10(Z)`` adds loss;
    ``"as_printed"`` flips that term's sign.  Carrier is given in Hz and
    converted to GHz inside the formula.
    """
    if not distance_m > 0 or not building_height_m > 0 or not carrier_hz > 0:
        raise DomainError("path_loss_db needs positive distance, carrier and building height")
    if variant not in PATH_LOSS_VARIANTS:
        raise DomainError(f"unknown path-loss variant {variant!r}")
    f_ghz = carrier_hz / 1e9
    hb173 = building_height_m ** 1.73
    free_space = 20.0 * math.log10(40.0 * math.pi * distance_m * f_ghz / 3.0)
    log_term = min(0.03 * hb173, 10.0) * math.log10(distance_m)
    const_term = min(0.044 * hb173, 14.77)
    linear_term = 0.002 * distance_m * math.log10(building_height_m)
    if variant == "3gpp":
        return -free_space - log_term + const_term - linear_term
    return -free_space + log_term + const_term - linear_term


@functools.lru_cache(maxsize=4096)
def _sector_weights_cached(offset_radial: float, sigma: float, n: int,
                           d_param: int, lobes: int) -> np.ndarray:
    a = offset_radial / sigma
    edges = np.arange(lobes * d_param + 1) / (d_param * n * sigma)
    q = np.array([marcum_q1(a, float(b)) for b in edges])
    w = np.maximum(q[:-1] - q[1:], 0.0)
    w.setflags(write=False)
    return w


def sector_weights(orient: OrientationStats, n: int, d_param: int, lobes: int) -> np.ndarray:
    """Probability that the radial pointing error falls in each ring."""
    if orient.sigma <= 0:
        raise DomainError("sector_weights needs sigma > 0; ground terminals use peak gain")
    if lobes not in (1, 2) or d_param < 2:
        raise DomainError("sectorization needs d_param >= 2 and lobes in {1, 2}")
    return _sector_weights_cached(orient.offset_radial, orient.sigma, int(n),
                                  int(d_param), int(lobes))


def rician_pdf(r, offset_radial: float, sigma: float):
    """Density of the radial error sqrt(x^2 + y^2) for Gaussian axes."""
    r = np.asarray(r, dtype=float)
    s2 = sigma * sigma
    arg = r * offset_radial / s2
    i0e = np.array([bessel_i0e(float(v)) for v in arg.ravel()]).reshape(arg.shape)
    # exp(-(r^2 + v^2) / 2s^2) * I0(rv/s^2) = exp(-(r - v)^2 / 2s^2) * I0e(rv/s^2)
    return r / s2 * np.exp(-(r - offset_radial) ** 2 / (2 * s2)) * i0e


@dataclass(frozen=True)
class SnrMixtureModel:
    """SNR law sum_i w_i Gamma(shape=m, mean=s_i), plus untracked mass."""

    shape_m: float
    weights: np.ndarray
    scales: np.ndarray
    residual_mass: float

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        s = np.array(self.scales, dtype=float)
        if w.shape != s.shape or w.ndim != 1:
            raise DomainError("weights and scales must be 1-D arrays of equal length")
        if np.any(w < 0) or np.any(w > 1):
            raise DomainError("weights must lie in [0, 1]")
        if not np.all(np.isfinite(s)) or np.any(s <= 0):
            raise DomainError("scales must be finite and positive")
        if abs(w.sum() + self.residual_mass - 1.0) > 1e-9 or self.residual_mass < -1e-12:
            raise DomainError("weights plus residual mass must sum to one")
        w.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "scales", s)
        object.__setattr__(self, "residual_mass", max(float(self.residual_mass), 0.0))

    @classmethod
    def from_components(cls, shape_m: float, weights, scales) -> "SnrMixtureModel":
        w = np.asarray(weights, dtype=float).ravel()
        return cls(shape_m, w, np.asarray(scales, dtype=float).ravel(), 1.0 - float(w.sum()))

    @property
    def components(self) -> list:
        return list(zip(self.weights.tolist(), self.scales.tolist()))

    def __len__(self) -> int:
        return self.weights.size


def _check_type(link: LinkBudget, expected: LinkType) -> None:
    if link.link_type is not expected:
        raise UsageError(f"expected a {expected.value} link, got {link.link_type.value}")


def _ring_model(link: LinkBudget, array: ArrayConfig, orient: OrientationStats):
    if orient.sigma <= 0:
        raise DomainError("aerial terminal needs sigma > 0")
    w = sector_weights(orient, array.n, link.d_param, link.lobes)
    g = antenna.sector_levels(array, link.d_param, link.lobes, link.sector0)
    return w, g


def build_a2a_mixture(link: LinkBudget) -> SnrMixtureModel:
    """(jD)^2 components, one per pair of transmitter / receiver rings."""
    _check_type(link, LinkType.A2A)
    wt, gt = _ring_model(link, link.tx_array, link.tx_orientation)
    wr, gr = _ring_model(link, link.rx_array, link.rx_orientation)
    weights = np.outer(wt, wr)
    scales = link.snr_scale * np.outer(gt, gr)
    return SnrMixtureModel.from_components(link.nakagami_m, weights, scales)


def _ground_aerial(link: LinkBudget, ground: ArrayConfig, aerial: ArrayConfig,
                   aerial_orient: OrientationStats) -> SnrMixtureModel:
    w, g = _ring_model(link, aerial, aerial_orient)
    scales = link.snr_scale * antenna.peak_gain(ground) * g
    return SnrMixtureModel.from_components(link.nakagami_m, w, scales)


def build_g2a_mixture(link: LinkBudget) -> SnrMixtureModel:
    """jD components; the ground transmitter contributes its peak gain."""
    _check_type(link, LinkType.G2A)
    return _ground_aerial(link, link.tx_array, link.rx_array, link.rx_orientation)


def build_a2g_mixture(link: LinkBudget) -> SnrMixtureModel:
    """Mirror image of :func:`build_g2a_mixture` with the roles swapped."""
    _check_type(link, LinkType.A2G)
    return _ground_aerial(link, link.rx_array, link.tx_array, link.tx_orientation)


_BUILDERS = {
    LinkType.A2A: build_a2a_mixture,
    LinkType.G2A: build_g2a_mixture,
    LinkType.A2G: build_a2g_mixture,
}


def build_mixture(link: LinkBudget) -> SnrMixtureModel:
    return _BUILDERS[link.link_type](link)


def mixture_pdf(model: SnrMixtureModel, snr_linear):
    """Density of the modelled SNR; integrates to ``1 - residual_mass``."""
    x = np.atleast_1d(np.asarray(snr_linear, dtype=float))
    if np.any(x <= 0):
        raise DomainError("mixture_pdf needs snr > 0")
    m = model.shape_m
    keep = model.weights > 0
    w, s = model.weights[keep], model.scales[keep]
    rate = m / s
    logc = np.log(w) + m * np.log(rate) - math.lgamma(m)
    expo = logc[None, :] + (m - 1.0) * np.log(x)[:, None] - x[:, None] * rate[None, :]
    out = np.exp(expo).sum(axis=1)
    return out if np.ndim(snr_linear) else float(out[0])


def mixture_cdf(model: SnrMixtureModel, snr_linear, residual_policy: str = "to_outage"):
    """CDF of the modelled SNR.

    With ``"to_outage"`` the untracked probability mass is treated as
    zero-SNR realisations; ``"ignore"`` drops it.
    """
    if residual_policy not in RESIDUAL_POLICIES:
        raise UsageError(f"residual_policy must be one of {RESIDUAL_POLICIES}")
    x = np.atleast_1d(np.asarray(snr_linear, dtype=float))
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError("mixture_cdf needs snr >= 0")
    m = model.shape_m
    args = m * x[:, None] / model.scales[None, :]
    out = gammainc_lower(m, args) @ model.weights
    if residual_policy == "to_outage":
        out = out + model.residual_mass
    out = np.clip(out, 0.0, 1.0)
    return out if np.ndim(snr_linear) else float(out[0])


def outage_probability(link: LinkBudget) -> float:
    """P[SNR < threshold] from the closed-form mixture."""
    return float(mixture_cdf(build_mixture(link), link.snr_threshold, "to_outage"))
