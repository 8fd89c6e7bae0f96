import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavmmw import antenna
from uavmmw.antenna import ArrayConfig
from uavmmw.errors import DomainError

# 4*pi / (scipy dblquad of the raw pattern over the sphere, epsrel 1e-9),
# computed once and frozen here as an independent oracle.
DBLQUAD_G0 = {1: 1.5225387144227498, 2: 3.0392587671285343, 3: 5.896324997937183}

angles = st.floats(-0.3, 0.3)


def test_config_derived_quantities():
    cfg = ArrayConfig(8)
    assert cfg.wavelength_m == pytest.approx(6e-3)
    assert cfg.spacing_m == pytest.approx(3e-3)
    assert cfg.kd == pytest.approx(math.pi)
    assert cfg.with_n(3).n == 3 and cfg.with_n(3).carrier_hz == cfg.carrier_hz
    with pytest.raises(DomainError):
        ArrayConfig(0)
    with pytest.raises(DomainError):
        ArrayConfig(2.5)


def test_pointing_angles_boresight_and_axes():
    assert antenna.pointing_angles(0.0, 0.0) == (0.0, 0.0)
    theta, phi = antenna.pointing_angles(0.1, 0.0)
    assert theta == pytest.approx(math.atan(math.sin(0.1)))
    assert phi == 0.0
    theta, phi = antenna.pointing_angles(0.0, -0.1)
    assert phi == pytest.approx(1.5 * math.pi)


def test_element_gain_peak_and_floor():
    cfg = ArrayConfig(1)
    assert antenna.element_gain_db(0.0, 0.0, cfg) == pytest.approx(8.0)
    # 65 degrees off in theta_x alone costs 12 dB
    assert antenna.element_gain_db(math.radians(65.0), 0.0, cfg) == pytest.approx(-4.0)
    assert antenna.element_gain_db(math.radians(170.0), 0.0, cfg) == pytest.approx(8.0 - 30.0)


@settings(max_examples=100, deadline=None)
@given(angles, angles)
def test_element_gain_symmetric(tx, ty):
    cfg = ArrayConfig(1)
    g = antenna.element_gain_db(tx, ty, cfg)
    assert antenna.element_gain_db(-tx, ty, cfg) == pytest.approx(g, abs=1e-12)
    assert antenna.element_gain_db(tx, -ty, cfg) == pytest.approx(g, abs=1e-12)
    assert g <= 8.0 + 1e-12


def test_array_factor_nulls_and_peak():
    cfg = ArrayConfig(8)
    assert antenna.array_factor(cfg, 0.0, 0.0) == 1.0
    # first null of an 8-element half-wave array: sin(theta) = 2/8
    assert antenna.array_factor(cfg, math.asin(0.25), 0.0) == pytest.approx(0.0, abs=1e-25)
    assert antenna.array_factor(ArrayConfig(1), 1.0, 2.0) == 1.0


@pytest.mark.parametrize("n", sorted(DBLQUAD_G0))
def test_normalization_matches_independent_quadrature(n):
    assert antenna.normalization_constant(ArrayConfig(n)) == pytest.approx(DBLQUAD_G0[n], rel=1e-8)


def test_normalized_pattern_integrates_to_total_power():
    cfg = ArrayConfig(6)
    total = antenna.sphere_integral(lambda t, p: antenna.directional_gain(cfg, t, p), 256, 512)
    assert total == pytest.approx(4.0 * math.pi, rel=1e-7)


def test_normalization_frozen_values_and_growth():
    # values from the converged Gauss-Legendre sphere rule
    assert antenna.normalization_constant(ArrayConfig(8)) == pytest.approx(35.037074596348646,
                                                                           rel=1e-9)
    assert antenna.peak_gain(ArrayConfig(8)) == pytest.approx(221.06899545666585, rel=1e-9)
    peaks = [antenna.peak_gain(ArrayConfig(n)) for n in (1, 2, 4, 8, 12)]
    assert all(b > a for a, b in zip(peaks, peaks[1:]))


def test_actual_gain_n1_is_scaled_element():
    cfg = ArrayConfig(1)
    tx, ty = 0.2, -0.1
    ge = 10 ** (antenna.element_gain_db(tx, ty, cfg) / 10)
    assert antenna.actual_gain(cfg, tx, ty) == pytest.approx(
        antenna.normalization_constant(cfg) * ge, rel=1e-14)


def test_approx_matches_actual_near_boresight():
    cfg = ArrayConfig(8)
    assert antenna.approx_gain(cfg, 0.0, 0.0) == pytest.approx(antenna.peak_gain(cfg), rel=1e-3)
    r = np.radians([0.5, 1.0, 2.0])
    rel = np.abs(antenna.approx_gain(cfg, r, 0 * r) / antenna.actual_gain(cfg, r, 0 * r) - 1)
    assert np.all(rel < 0.02)


def test_sectorize_layout():
    cfg = ArrayConfig(8)
    sec = antenna.sectorize(cfg, 25, 2)
    assert sec.num_sectors == 50
    assert sec.bounds[0] == pytest.approx(1 / 200)
    assert sec.bounds[-1] == pytest.approx(2 / 8)
    assert sec.gain(0.0) == sec.gains[0]
    assert sec.gain(sec.bounds[0]) == sec.gains[0]  # right-closed rings
    assert sec.gain(np.nextafter(sec.bounds[0], 1.0)) == sec.gains[1]
    assert sec.gain(0.3) == 0.0
    assert np.array_equal(sec.sector_index([0.0, 0.3]), [0, -1])


def test_sector0_variants():
    cfg = ArrayConfig(8)
    cont = antenna.sector_levels(cfg, 25, 2, "continuity")
    paper = antenna.sector_levels(cfg, 25, 2, "paper")
    assert paper[0] == pytest.approx(4 * cont[0])
    np.testing.assert_array_equal(cont[1:], paper[1:])
    assert cont[0] == pytest.approx(antenna.approx_gain(cfg, 0.0, 0.0))
    with pytest.raises(DomainError):
        antenna.sector_levels(cfg, 25, 3)
    with pytest.raises(DomainError):
        antenna.sector_levels(cfg, 1, 2)
    with pytest.raises(DomainError):
        antenna.sector_levels(cfg, 25, 2, "other")


def test_sector_levels_decrease_over_main_lobe():
    levels = antenna.sector_levels(ArrayConfig(10), 25, 2)
    # with half-wave spacing the main-lobe null sits at the outer edge of ring 2D
    assert np.all(np.diff(levels) < 0)
    assert levels[-1] < 1e-2 * levels[0]


def test_normalization_cache_is_shared():
    cfg = ArrayConfig(5)
    a = antenna.normalization_constant(cfg)
    assert antenna.normalization_constant(ArrayConfig(5)) is a
