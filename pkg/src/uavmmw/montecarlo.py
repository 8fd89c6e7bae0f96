"""Monte Carlo ground truth for the SNR distribution and outage.

Every sample draws the four axis deviations and a unit-mean Gamma fading
power, evaluates the *exact* array patterns and forms the SNR.  Samples are
generated in fixed-size batches; batch ``i`` owns a Philox stream keyed by
``(seed, i)``, so results do not depend on how batches are spread across
threads.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from . import antenna
from .channel import LinkBudget, LinkType, OrientationStats
from .errors import DomainError, UsageError

log = logging.getLogger(__name__)

MIN_REPORTED_SAMPLES = 10_000


@dataclass(frozen=True)
class SimulationSpec:
    num_samples: int = 5_000_000
    seed: int = 0
    batch_size: int = 250_000

    def __post_init__(self):
        if self.num_samples < 1 or self.batch_size < 1:
            raise DomainError("num_samples and batch_size must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be an unsigned 64-bit integer")

    def batches(self) -> list[tuple[int, int]]:
        full, rem = divmod(self.num_samples, self.batch_size)
        sizes = [self.batch_size] * full + ([rem] if rem else [])
        return list(enumerate(sizes))


@dataclass(frozen=True)
class OutageEstimate:
    p_hat: float
    std_err: float
    n: int
    events: int
    seed: int

    @property
    def low_confidence(self) -> bool:
        return self.events < 20

    def as_dict(self) -> dict:
        return {"p_hat": self.p_hat, "std_err": self.std_err, "n": self.n,
                "events": self.events, "seed": self.seed,
                "low_confidence": self.low_confidence}


def batch_rng(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for batch ``index``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_orientation(orient: OrientationStats, rng: np.random.Generator, size: int):
    z = rng.standard_normal((2, size))
    return (orient.boresight_offset_x + orient.sigma * z[0],
            orient.boresight_offset_y + orient.sigma * z[1])


def _draw(link: LinkBudget, rng: np.random.Generator, size: int):
    # fixed draw order: tx axes, rx axes, fading
    tx = sample_orientation(link.tx_orientation, rng, size)
    rx = sample_orientation(link.rx_orientation, rng, size)
    m = link.nakagami_m
    fading = rng.standard_gamma(m, size) / m
    return tx, rx, fading


def _terminal_gain(array: antenna.ArrayConfig, angles, ground: bool):
    if ground:
        return antenna.peak_gain(array)
    return antenna.actual_gain(array, angles[0], angles[1])


def _batch_snr(link: LinkBudget, seed: int, index: int, size: int) -> np.ndarray:
    tx, rx, fading = _draw(link, batch_rng(seed, index), size)
    gt = _terminal_gain(link.tx_array, tx, link.link_type is LinkType.G2A)
    gr = _terminal_gain(link.rx_array, rx, link.link_type is LinkType.A2G)
    return link.snr_scale * gt * gr * fading


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _prepare(link: LinkBudget) -> None:
    antenna.precompute_normalization([link.tx_array, link.rx_array])


def sample_link_snr(link: LinkBudget, spec: SimulationSpec,
                    workers: int = 1) -> Iterator[np.ndarray]:
    """Linear SNR samples, one array per batch, in batch order.

    With ``workers > 1`` all batches are generated up front on a thread pool
    (holding every sample in memory); the values are identical either way.
    """
    _prepare(link)
    if workers > 1:
        yield from _map(lambda item: _batch_snr(link, spec.seed, *item), spec.batches(), workers)
        return
    for index, size in spec.batches():
        yield _batch_snr(link, spec.seed, index, size)


def _finish(events: int, n: int, seed: int, warn: bool = True) -> OutageEstimate:
    p = events / n
    est = OutageEstimate(p_hat=p, std_err=math.sqrt(p * (1.0 - p) / n), n=n,
                         events=int(events), seed=seed)
    if not warn:
        return est
    if n < MIN_REPORTED_SAMPLES:
        log.warning("only %d samples; estimates below %d samples are not reportable",
                    n, MIN_REPORTED_SAMPLES)
    if est.low_confidence:
        log.warning("only %d outage events in %d samples: low-confidence estimate", events, n)
    return est


def estimate_outage(link: LinkBudget, spec: SimulationSpec, workers: int = 1) -> OutageEstimate:
    """Fraction of samples with SNR below the threshold, with its binomial
    standard error."""
    _prepare(link)
    thr = link.snr_threshold

    def count(item):
        index, size = item
        return int(np.count_nonzero(_batch_snr(link, spec.seed, index, size) < thr))

    events = sum(_map(count, spec.batches(), workers))
    return _finish(events, spec.num_samples, spec.seed)


def estimate_outage_grid(link: LinkBudget, spec: SimulationSpec, nt_values: Iterable[int],
                         nr_values: Iterable[int], workers: int = 1) -> list[list[OutageEstimate]]:
    """Outage for every (N_t, N_r) pair from one shared set of draws.

    Cell ``(i, j)`` is identical to ``estimate_outage(link.with_sizes(nt_i,
    nr_j), spec)``: the draws do not depend on the array sizes, so the
    per-batch patterns are evaluated once per size and reused across the
    grid.
    """
    nt_values, nr_values = list(nt_values), list(nr_values)
    tx_arrays = [link.tx_array.with_n(n) for n in nt_values]
    rx_arrays = [link.rx_array.with_n(n) for n in nr_values]
    antenna.precompute_normalization(tx_arrays + rx_arrays)
    thr = link.snr_threshold
    scale = link.snr_scale
    tx_ground = link.link_type is LinkType.G2A
    rx_ground = link.link_type is LinkType.A2G

    def count(item):
        index, size = item
        tx, rx, fading = _draw(link, batch_rng(spec.seed, index), size)
        gts = [_terminal_gain(a, tx, tx_ground) for a in tx_arrays]
        grs = [_terminal_gain(a, rx, rx_ground) for a in rx_arrays]
        out = np.zeros((len(gts), len(grs)), dtype=np.int64)
        for i, gt in enumerate(gts):
            partial = scale * gt
            for j, gr in enumerate(grs):
                out[i, j] = np.count_nonzero(partial * gr * fading < thr)
        return out

    events = sum(_map(count, spec.batches(), workers))
    grid = [[_finish(int(events[i, j]), spec.num_samples, spec.seed, warn=False)
             for j in range(len(nr_values))] for i in range(len(nt_values))]
    weak = sum(e.low_confidence for row in grid for e in row)
    if weak:
        log.warning("%d of %d grid cells have fewer than 20 outage events", weak,
                    len(nt_values) * len(nr_values))
    return grid


def cdf_and_outage(link: LinkBudget, spec: SimulationSpec, grid,
                   workers: int = 1) -> tuple[np.ndarray, OutageEstimate]:
    """Empirical CDF on ``grid`` and the outage estimate from one pass over
    the samples; each batch is reduced to integer counts before merging."""
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) < 0):
        raise UsageError("grid must be sorted ascending")
    _prepare(link)
    thr = link.snr_threshold

    def reduce(item):
        index, size = item
        snr = np.sort(_batch_snr(link, spec.seed, index, size))
        return (np.searchsorted(snr, grid, side="right"),
                int(np.searchsorted(snr, thr, side="left")))

    counts = np.zeros(grid.size, dtype=np.int64)
    events = 0
    for c, e in _map(reduce, spec.batches(), workers):
        counts += c
        events += e
    return counts / spec.num_samples, _finish(events, spec.num_samples, spec.seed)


def empirical_cdf(samples, grid) -> np.ndarray:
    """One-pass P(X <= x) on a sorted grid.  ``samples`` may be a single
    array or an iterable of batches."""
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) < 0):
        raise UsageError("grid must be sorted ascending")
    if isinstance(samples, np.ndarray):
        samples = [samples]
    counts = np.zeros(grid.size, dtype=np.int64)
    total = 0
    for batch in samples:
        batch = np.sort(np.asarray(batch, dtype=float).ravel())
        counts += np.searchsorted(batch, grid, side="right")
        total += batch.size
    if total == 0:
        raise UsageError("empirical_cdf got no samples")
    return counts / total


def sector_occupancy(orient: OrientationStats, n: int, d_param: int, lobes: int,
                     spec: SimulationSpec) -> np.ndarray:
    """Empirical frequency of the radial pointing error in each ring."""
    pattern_rings = lobes * d_param
    counts = np.zeros(pattern_rings, dtype=np.int64)
    for index, size in spec.batches():
        x, y = sample_orientation(orient, batch_rng(spec.seed, index), size)
        idx = np.ceil(np.hypot(x, y) * d_param * n).astype(np.int64) - 1
        idx = np.maximum(idx, 0)
        counts += np.bincount(idx[idx < pattern_rings], minlength=pattern_rings)
    return counts / spec.num_samples
