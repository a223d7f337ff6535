import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lorawan_capacity.analytic import (
    ScenarioSpec,
    effective_rate,
    find_max_throughput,
    network_received_at_max_rate,
    offered_load,
    per_node_throughput,
    success_probability,
    table1,
    throughput_curve,
)
from lorawan_capacity.errors import DomainError
from lorawan_capacity.phy import TransmissionProfile, time_on_air
from lorawan_capacity.regulation import ChannelPlan

SF12_ONLY = (0, 0, 0, 0, 0, 1.0)
SF7_ONLY = (1.0, 0, 0, 0, 0, 0)


def test_spec_validation():
    with pytest.raises(DomainError):
        ScenarioSpec(0, 1.0)
    with pytest.raises(DomainError):
        ScenarioSpec(10, 1.0, sf_probabilities=(0.5, 0.5, 0.5, 0, 0, 0))
    with pytest.raises(DomainError):
        ScenarioSpec(10, 1.0, payload_bytes=60)  # SF10-12 present, 51 B limit
    ScenarioSpec(10, 1.0, payload_bytes=60, sf_probabilities=SF7_ONLY)


def test_effective_rate():
    spec = ScenarioSpec(10, 0.0, sf_probabilities=SF12_ONLY)
    assert effective_rate(0.0, 12, spec) == 0.0
    cap_h = effective_rate(1e9, 12, spec) * 3600
    assert cap_h == pytest.approx(3 * 0.01 / time_on_air(TransmissionProfile(12, 10)) * 3600)
    assert cap_h == pytest.approx(108.96, abs=0.01)
    assert effective_rate(0.01, 12, spec) == 0.01


def test_success_probability_examples():
    lone = ScenarioSpec(1, 100.0, sf_probabilities=SF7_ONLY)
    assert success_probability(lone, 7) == 1.0
    # Choose lambda so that G = 0.5 on a single uncapped SF7 channel.
    t7 = time_on_air(TransmissionProfile(7, 10))
    spec = ScenarioSpec(11, 0.0, plan=ChannelPlan(1, 1.0), sf_probabilities=SF7_ONLY)
    lam = 0.5 / (10 * t7)
    assert offered_load(spec, 7, lam) == pytest.approx(0.5)
    assert success_probability(spec, 7, lam) == pytest.approx(math.exp(-1), abs=1e-12)


def test_report_aggregates():
    spec = ScenarioSpec(1000, 300.0, 10)
    rep = per_node_throughput(spec)
    weighted = sum(s.probability * s.lambda_eff_per_hour * s.success_probability for s in rep.per_sf)
    assert rep.per_node_packets_per_hour == pytest.approx(weighted, rel=1e-12)
    assert rep.network_packets_per_hour == pytest.approx(1000 * rep.per_node_packets_per_hour, rel=1e-9)
    assert rep.per_node_bytes_per_hour == pytest.approx(10 * rep.per_node_packets_per_hour)
    for s in rep.per_sf:
        assert 0 <= s.success_probability <= 1
        assert s.lambda_eff_per_hour <= min(300.0, s.cap_per_hour) + 1e-9
    assert throughput_curve(spec, [300.0])[0] == pytest.approx(rep.per_node_packets_per_hour, rel=1e-12)


def test_low_rate_is_collision_free():
    spec = ScenarioSpec(250, 0.01, 10)
    assert per_node_throughput(spec).per_node_packets_per_hour == pytest.approx(0.01, rel=1e-3)
    lam = np.array([1e-4, 2e-4])
    thr = throughput_curve(spec, lam)
    assert (thr[1] - thr[0]) / (lam[1] - lam[0]) == pytest.approx(1.0, rel=1e-3)


def test_fig3_saturates_beyond_caps():
    spec = ScenarioSpec(250, 0.0, 10)
    highest_cap = max(spec.rate_cap(sf) for sf in range(7, 13)) * 3600
    thr = throughput_curve(spec, [highest_cap * 1.01, highest_cap * 10, highest_cap * 100])
    assert thr[0] == pytest.approx(thr[1]) == pytest.approx(thr[2])


def test_larger_networks_get_less_per_node():
    small = per_node_throughput(ScenarioSpec(250, 500.0, 10))
    large = per_node_throughput(ScenarioSpec(5000, 500.0, 10))
    assert large.per_node_packets_per_hour < small.per_node_packets_per_hour


@settings(max_examples=50)
@given(st.integers(1, 5000), st.floats(0.1, 1e4), st.integers(2, 51))
def test_halving_payload_never_hurts(n, lam, pl):
    full = per_node_throughput(ScenarioSpec(n, lam, pl)).per_node_packets_per_hour
    half = per_node_throughput(ScenarioSpec(n, lam, pl // 2)).per_node_packets_per_hour
    assert half >= full * (1 - 1e-12)


def test_fig2_curve_shape():
    base = ScenarioSpec(1, 0.0, 10)
    pts = network_received_at_max_rate(base, [1, 10, 100, 300, 1000, 3000, 5000, 20000])
    one = pts[0]
    caps = sum(p * base.rate_cap(sf) * 3600 for sf, p in zip(range(7, 13), base.sf_probabilities))
    assert one.network_packets_per_hour == pytest.approx(caps)
    totals = [p.network_packets_per_hour for p in pts]
    k = int(np.argmax(totals))
    assert 0 < k < len(totals) - 1
    assert totals[-1] < totals[k] / 10


def test_table1_single_device_single_sf():
    row = table1(1, 20, sf_probabilities=SF12_ONLY)
    cap = 3 * 0.01 / time_on_air(TransmissionProfile(12, 20)) * 3600
    assert row.max_packets_per_hour == pytest.approx(cap, rel=1e-9)
    assert row.lambda_star_per_hour == pytest.approx(cap, rel=1e-9)
    assert row.success_probability == pytest.approx(1.0)
    assert row.collision_success == 1.0


def test_table1_reference_rows():
    # Published reference rows: (pkt/h, lambda*, success %)
    r = table1(250, 10)
    assert r.max_packets_per_hour == pytest.approx(367, rel=0.05)
    assert r.lambda_star_per_hour == pytest.approx(2620, rel=0.05)
    assert 100 * r.success_probability == pytest.approx(14.01, abs=1.0)
    r = table1(5000, 50)
    assert r.max_packets_per_hour == pytest.approx(7.3, rel=0.05)
    assert r.lambda_star_per_hour == pytest.approx(50, rel=0.1)
    assert 100 * r.success_probability == pytest.approx(14.60, abs=1.0)
    r = table1(500, 30)
    assert r.max_packets_per_hour == pytest.approx(117, rel=0.05)
    assert r.lambda_star_per_hour == pytest.approx(870, rel=0.05)
    assert 100 * r.success_probability == pytest.approx(13.45, abs=1.0)


def test_find_max_is_a_maximum():
    spec = ScenarioSpec(1000, 0.0, 30)
    lam, best = find_max_throughput(spec)
    grid = np.logspace(0, 5, 20001)
    assert throughput_curve(spec, grid).max() <= best * (1 + 1e-6)
    assert throughput_curve(spec, [lam])[0] == pytest.approx(best)


def test_shared_sub_band_lowers_cap():
    per = table1(250, 10)
    shared = table1(250, 10, plan=ChannelPlan.shared_sub_band(3, 0.01))
    assert shared.max_packets_per_hour < per.max_packets_per_hour
