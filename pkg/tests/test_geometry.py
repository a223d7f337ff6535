import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lorawan_capacity.errors import CoverageError, DomainError
from lorawan_capacity.geometry import (
    URBAN_MODEL,
    URBAN_SENSITIVITY,
    PathLossModel,
    SensitivityTable,
    build_cell,
    max_range_km,
    path_loss_db,
    preset_cell,
    sample_deployment,
    sample_distances,
)

REFERENCE_P = (0.19, 0.08, 0.10, 0.14, 0.20, 0.28)


def _hata_by_hand(f, hb, hm, d):
    lf = math.log10(f)
    a = (1.1 * lf - 0.7) * hm - (1.56 * lf - 0.8)
    return 69.55 + 26.16 * lf - 13.82 * math.log10(hb) - a + (44.9 - 6.55 * math.log10(hb)) * math.log10(d)


def test_path_loss_values():
    m = PathLossModel(868, 30, 1.5)
    assert path_loss_db(m, 1.0) == pytest.approx(125.99339, abs=1e-4)
    assert path_loss_db(m, 2.0) == pytest.approx(136.59713, abs=1e-4)
    assert round(path_loss_db(m, 1.0), 1) == 126.0
    assert round(path_loss_db(m, 2.0), 1) == 136.6


@given(st.floats(0.1, 50), st.floats(10, 200), st.floats(1, 10), st.floats(150, 1500))
def test_path_loss_matches_formula_and_decade_slope(d, hb, hm, f):
    m = PathLossModel(f, hb, hm)
    assert path_loss_db(m, d) == pytest.approx(_hata_by_hand(f, hb, hm, d), abs=1e-9)
    assert path_loss_db(m, 10 * d) - path_loss_db(m, d) == pytest.approx(44.9 - 6.55 * math.log10(hb), abs=1e-9)


def test_path_loss_floor():
    with pytest.raises(DomainError):
        path_loss_db(URBAN_MODEL, 0.05)


def test_model_validation():
    with pytest.raises(DomainError):
        PathLossModel(2400)
    with pytest.raises(DomainError):
        PathLossModel(868, -1)


@pytest.mark.parametrize("d", [0.5, 1.0, 3.0])
def test_max_range_round_trip(d):
    m = URBAN_MODEL
    assert max_range_km(m, path_loss_db(m, d)) == pytest.approx(d, rel=1e-12)
    assert path_loss_db(m, max_range_km(m, path_loss_db(m, d))) == pytest.approx(path_loss_db(m, d), abs=1e-9)


def test_max_range_decade_and_value():
    m = URBAN_MODEL
    base = max_range_km(m, 130.0)
    assert max_range_km(m, 130.0 + m.slope_db_per_decade) == pytest.approx(10 * base)
    assert m.slope_db_per_decade == pytest.approx(35.22, abs=0.005)
    assert max_range_km(m, 126.0) == pytest.approx(1.0, abs=0.001)
    with pytest.raises(DomainError):
        max_range_km(m, 50.0)


def test_urban_preset_matches_ring_ratio_oracle():
    # Rings spaced by q = 10**(step/slope); shares are telescoping differences of q**(-2k).
    q = 10 ** (2.5 / (44.9 - 6.55 * math.log10(30)))
    radii = [q ** -(12 - sf) for sf in range(7, 13)]
    oracle = [radii[0] ** 2] + [radii[k] ** 2 - radii[k - 1] ** 2 for k in range(1, 6)]
    cell = preset_cell("paper-urban")
    assert cell.probabilities == pytest.approx(oracle, abs=1e-12)
    assert max(abs(a - b) for a, b in zip(cell.probabilities, REFERENCE_P)) <= 0.01
    assert math.fsum(cell.probabilities) == 1.0


def test_single_ring_and_equal_sensitivities():
    assert preset_cell("single-ring").probabilities == (1.0, 0, 0, 0, 0, 0)
    flat = SensitivityTable((-130.0,) * 6)
    cell = build_cell(URBAN_MODEL, flat)
    assert cell.probabilities[0] == 1.0
    assert sum(cell.probabilities[1:]) == 0.0


def test_coverage_error():
    with pytest.raises(CoverageError) as err:
        build_cell(URBAN_MODEL, URBAN_SENSITIVITY, radius_km=10.0)
    assert err.value.radius_km == 10.0
    assert err.value.max_range_km == pytest.approx(4.6487, abs=1e-3)


def test_sf_for_distance_lowest_sufficient():
    cell = preset_cell("paper-urban")
    assert cell.sf_for_distance(0.0) == 7
    assert cell.sf_for_distance(cell.ring_radii_km[0]) == 7
    assert cell.sf_for_distance(cell.ring_radii_km[0] + 1e-9) == 8
    assert cell.sf_for_distance(cell.radius_km) == 12


sens_patterns = st.lists(st.floats(0.0, 4.0), min_size=5, max_size=5)


@given(sens_patterns, st.floats(-30, 30))
def test_probabilities_invariant_to_common_offset(steps, offset):
    base = [-120.0]
    for s in steps:
        base.append(base[-1] - s)
    a = build_cell(URBAN_MODEL, SensitivityTable(tuple(base), 14.0))
    b = build_cell(URBAN_MODEL, SensitivityTable(tuple(x + offset for x in base), 14.0 + offset))
    assert math.fsum(a.probabilities) == pytest.approx(1.0, abs=1e-15)
    assert all(0.0 <= p <= 1.0 for p in a.probabilities)
    assert a.probabilities == pytest.approx(b.probabilities, abs=1e-9)


@given(st.floats(0.3, 1.0))
def test_shrinking_radius_grows_inner_shares(frac):
    full = preset_cell("paper-urban")
    small = build_cell(URBAN_MODEL, URBAN_SENSITIVITY, radius_km=full.radius_km * frac)
    for j in range(6):
        assert sum(small.probabilities[: j + 1]) >= sum(full.probabilities[: j + 1]) - 1e-12


def test_frequency_change_with_matched_budgets():
    # Same slope, budgets shifted by the intercept change -> same shares.
    m2 = PathLossModel(434.0, 30, 1.5)
    shift = m2.intercept_db - URBAN_MODEL.intercept_db
    sens2 = SensitivityTable(tuple(s - shift for s in URBAN_SENSITIVITY.sensitivities_dbm), 14.0)
    a = preset_cell("paper-urban")
    b = build_cell(m2, sens2)
    assert b.probabilities == pytest.approx(a.probabilities, abs=1e-12)


@pytest.mark.slow
def test_sampling_frequencies_match_shares():
    cell = preset_cell("paper-urban")
    _, sfs = sample_distances(cell, 1_000_000, seed=7)
    for k, sf in enumerate(range(7, 13)):
        assert np.mean(sfs == sf) == pytest.approx(cell.probabilities[k], abs=0.005)


def test_sampling_determinism_and_bounds():
    cell = preset_cell("paper-urban")
    a = sample_deployment(cell, 50, seed=3)
    assert a == sample_deployment(cell, 50, seed=3)
    assert a != sample_deployment(cell, 50, seed=4)
    (one,) = sample_deployment(cell, 1, seed=0)
    assert 0.0 <= one[0] <= cell.radius_km
    assert one[1] == cell.sf_for_distance(one[0])
    with pytest.raises(DomainError):
        sample_deployment(cell, 0, seed=0)


@settings(max_examples=20)
@given(st.integers(0, 2**32))
def test_sampled_sf_matches_ring(seed):
    cell = preset_cell("paper-urban")
    for d, sf in sample_deployment(cell, 20, seed):
        assert cell.sf_for_distance(d) == sf
