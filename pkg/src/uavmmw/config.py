"""Run configuration: an INI file in human units, parsed into frozen sections.

Every key has a documented default, unknown sections or keys are rejected,
and :meth:`RunConfig.to_ini` writes a file that parses back to an equal
config.  Conversion to radians / milliwatts / hertz happens only in
:meth:`RunConfig.link_budget`.
"""
from __future__ import annotations

import configparser
import hashlib
import io
import typing
from dataclasses import dataclass, field, fields, replace

from .antenna import SECTOR0_VARIANTS, ArrayConfig
from .channel import (PATH_LOSS_VARIANTS, RESIDUAL_POLICIES, LinkBudget, LinkType,
                      OrientationStats)
from .errors import UsageError
from .montecarlo import SimulationSpec

OUTAGE_SWEEP_VARIABLES = ("tx_power_dbm", "distance_m", "sigma_deg", "n", "nt", "nr",
                          "noise_power_dbm", "snr_threshold_db")
OUTAGE_SERIES_VARIABLES = OUTAGE_SWEEP_VARIABLES + ("link_type", "none")


@dataclass(frozen=True)
class LinkSection:
    type: str = "A2A"
    distance_m: float = 1000.0
    tx_power_dbm: float = 20.0
    noise_power_dbm: float = -110.0
    nakagami_m: float = 3.0
    snr_threshold_db: float = 10.0
    building_height_m: float = 30.0
    path_loss: str = "3gpp"


@dataclass(frozen=True)
class ArraySection:
    """Element and lattice parameters shared by both terminals."""
    carrier_ghz: float = 50.0
    spacing_wavelengths: float = 0.5
    g_max_dbi: float = 8.0
    front_back_db: float = 30.0
    sidelobe_limit_db: float = 30.0
    theta_3db_deg: float = 65.0
    phi_3db_deg: float = 65.0


@dataclass(frozen=True)
class TerminalSection:
    n: int = 8
    sigma_deg: float = 2.0
    offset_x_deg: float = 0.5
    offset_y_deg: float = 0.5


@dataclass(frozen=True)
class ModelSection:
    d_param: int = 25
    lobes: int = 2
    sector0: str = "continuity"
    residual: str = "to_outage"


@dataclass(frozen=True)
class SimulationSection:
    samples: int = 5_000_000
    seed: int = 0
    batch_size: int = 250_000
    workers: int = 1


@dataclass(frozen=True)
class PatternSection:
    theta_x_min_deg: float = -30.0
    theta_x_max_deg: float = 30.0
    points: int = 601
    theta_y_deg: tuple = (0.0, 2.0, 4.0)


@dataclass(frozen=True)
class DistributionSection:
    snr_min_db: float = -20.0
    snr_max_db: float = 60.0
    points: int = 321
    d_values: tuple = ()


@dataclass(frozen=True)
class OutageSection:
    variable: str = "tx_power_dbm"
    start: float = 0.0
    stop: float = 40.0
    step: float = 2.0
    series_variable: str = "n"
    series: tuple = (6.0, 9.0, 12.0)
    method: str = "analytical"


@dataclass(frozen=True)
class ValidateSection:
    cdf_rel_tol: float = 0.15
    min_cdf: float = 1e-3
    snr_min_db: float = -10.0
    snr_max_db: float = 40.0
    points: int = 101


@dataclass(frozen=True)
class OptimizeSection:
    n_max: int = 18
    method: str = "analytical"
    symmetric: bool = False


@dataclass(frozen=True)
class RunConfig:
    link: LinkSection = field(default_factory=LinkSection)
    array: ArraySection = field(default_factory=ArraySection)
    tx: TerminalSection = field(default_factory=TerminalSection)
    rx: TerminalSection = field(default_factory=TerminalSection)
    model: ModelSection = field(default_factory=ModelSection)
    simulation: SimulationSection = field(default_factory=SimulationSection)
    pattern: PatternSection = field(default_factory=PatternSection)
    distribution: DistributionSection = field(default_factory=DistributionSection)
    outage: OutageSection = field(default_factory=OutageSection)
    validate: ValidateSection = field(default_factory=ValidateSection)
    optimize: OptimizeSection = field(default_factory=OptimizeSection)

    def __post_init__(self):
        _check_choice("link.type", self.link.type, tuple(t.value for t in LinkType))
        _check_choice("link.path_loss", self.link.path_loss, PATH_LOSS_VARIANTS)
        _check_choice("model.sector0", self.model.sector0, SECTOR0_VARIANTS)
        _check_choice("model.residual", self.model.residual, RESIDUAL_POLICIES)
        _check_choice("outage.variable", self.outage.variable, OUTAGE_SWEEP_VARIABLES)
        _check_choice("outage.series_variable", self.outage.series_variable,
                      OUTAGE_SERIES_VARIABLES)
        _check_choice("outage.method", self.outage.method, ("analytical", "monte_carlo"))
        _check_choice("optimize.method", self.optimize.method, ("analytical", "monte_carlo"))
        if self.simulation.workers < 1:
            raise UsageError("simulation.workers must be >= 1")

    # -- conversion to model objects -------------------------------------
    def array_config(self, n: int) -> ArrayConfig:
        a = self.array
        return ArrayConfig(n=n, carrier_hz=a.carrier_ghz * 1e9,
                           element_spacing_wavelengths=a.spacing_wavelengths,
                           g_max_dbi=a.g_max_dbi, front_back_db=a.front_back_db,
                           sidelobe_limit_db=a.sidelobe_limit_db,
                           theta_3db_deg=a.theta_3db_deg, phi_3db_deg=a.phi_3db_deg)

    def link_budget(self) -> LinkBudget:
        """The configured link.  The ground end of a G2A/A2G link is held
        perfectly still regardless of its [tx]/[rx] jitter settings."""
        kind = LinkType(self.link.type)
        tx_orient = _orientation(self.tx)
        rx_orient = _orientation(self.rx)
        if kind is LinkType.G2A:
            tx_orient = OrientationStats.ground()
        elif kind is LinkType.A2G:
            rx_orient = OrientationStats.ground()
        lk = self.link
        return LinkBudget(
            link_type=kind, distance_m=lk.distance_m, tx_power_dbm=lk.tx_power_dbm,
            noise_power_dbm=lk.noise_power_dbm, nakagami_m=lk.nakagami_m,
            snr_threshold_db=lk.snr_threshold_db, building_height_m=lk.building_height_m,
            tx_array=self.array_config(self.tx.n), rx_array=self.array_config(self.rx.n),
            tx_orientation=tx_orient, rx_orientation=rx_orient,
            d_param=self.model.d_param, lobes=self.model.lobes, sector0=self.model.sector0,
            path_loss_variant=lk.path_loss)

    def simulation_spec(self) -> SimulationSpec:
        s = self.simulation
        return SimulationSpec(num_samples=s.samples, seed=s.seed, batch_size=s.batch_size)

    # -- overrides and serialisation -------------------------------------
    def with_value(self, section: str, key: str, raw) -> "RunConfig":
        """Return a copy with ``section.key`` set; ``raw`` may be text."""
        sec = _section(self, section)
        hints = _hints(type(sec))
        if key not in hints:
            raise UsageError(f"unknown key {section}.{key}")
        value = _coerce(hints[key], raw, f"{section}.{key}") if isinstance(raw, str) else raw
        return replace(self, **{section: replace(sec, **{key: value})})

    def to_ini(self, exclude: tuple = ()) -> str:
        """Canonical INI text; floats use ``repr`` so parsing is exact."""
        parser = configparser.ConfigParser(interpolation=None)
        for f in fields(self):
            sec = getattr(self, f.name)
            parser[f.name] = {k.name: _format(getattr(sec, k.name)) for k in fields(sec)
                              if f"{f.name}.{k.name}" not in exclude}
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    def digest(self) -> str:
        """SHA-256 of the canonical config.  ``simulation.workers`` is left out
        because results do not depend on it."""
        return hashlib.sha256(self.to_ini(exclude=("simulation.workers",)).encode()).hexdigest()


def _orientation(t: TerminalSection) -> OrientationStats:
    return OrientationStats.from_degrees(t.offset_x_deg, t.offset_y_deg, t.sigma_deg)


def _check_choice(name: str, value, allowed) -> None:
    if value not in allowed:
        raise UsageError(f"{name} must be one of {list(allowed)}, got {value!r}")


def _section(cfg: RunConfig, name: str):
    if name not in {f.name for f in fields(cfg)}:
        raise UsageError(f"unknown config section [{name}]")
    return getattr(cfg, name)


def _hints(cls) -> dict:
    return typing.get_type_hints(cls)


def _coerce(kind, raw: str, name: str):
    text = raw.strip()
    try:
        if kind is bool:
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        if kind is tuple:
            return tuple(_list_item(v) for v in text.split(",") if v.strip())
        return text
    except ValueError:
        raise UsageError(f"{name}: cannot parse {raw!r} as {kind.__name__}") from None


def _list_item(text: str):
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        return text


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    return str(value)


def parse_ini(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse INI text on top of ``base`` (defaults if omitted)."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise UsageError(f"malformed config: {exc}") from None
    cfg = base or RunConfig()
    for section in parser.sections():
        _section(cfg, section)
        for key, raw in parser.items(section):
            cfg = cfg.with_value(section, key, raw)
    return cfg


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    with open(path, encoding="utf-8") as fh:
        return parse_ini(fh.read())


def apply_override(cfg: RunConfig, assignment: str) -> RunConfig:
    """Apply one ``section.key=value`` override."""
    target, sep, raw = assignment.partition("=")
    section, dot, key = target.strip().partition(".")
    if not sep or not dot:
        raise UsageError(f"override must look like section.key=value, got {assignment!r}")
    return cfg.with_value(section, key.strip(), raw)


__all__ = ["RunConfig", "parse_ini", "load_config", "apply_override"] + [
    c.__name__ for c in (LinkSection, ArraySection, TerminalSection, ModelSection,
                         SimulationSection, PatternSection, DistributionSection,
                         OutageSection, ValidateSection, OptimizeSection)]
