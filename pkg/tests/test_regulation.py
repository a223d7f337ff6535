import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lorawan_capacity.errors import DomainError, LedgerError
from lorawan_capacity.phy import TransmissionProfile, time_on_air, time_on_air_us
from lorawan_capacity.regulation import (
    HOUR_US,
    US_PER_S,
    AirtimeLedger,
    ChannelPlan,
    FairAccessPolicy,
    audit_airtime,
    fair_access_allows,
    ledger_can_transmit,
    ledger_record_tx,
    max_packet_rate,
    max_window_airtime_us,
    off_period,
    off_period_us,
)

SF12_10B = time_on_air(TransmissionProfile(12, 10))


def test_off_period_examples():
    assert off_period(0.3, 0.5) == pytest.approx(0.3)
    assert off_period(0.3, 1.0) == 0.0
    assert off_period(0.9912, 0.01) == pytest.approx(98.1288)
    assert off_period(SF12_10B, 0.01) == pytest.approx(99 * 0.991232)
    with pytest.raises(DomainError):
        off_period(1.0, 0.0)
    with pytest.raises(DomainError):
        off_period(1.0, 1.5)


@given(st.floats(1e-3, 5.0), st.floats(1e-3, 5.0), st.floats(0.001, 0.999))
def test_off_period_linear_and_decreasing(a, b, d):
    assert off_period(a + b, d) == pytest.approx(off_period(a, d) + off_period(b, d))
    assert off_period(a, d) > off_period(a, min(1.0, d * 1.01))


def test_off_period_us_is_exact_for_one_percent():
    assert off_period_us(1_000_000, 0.01) == 99_000_000
    assert off_period_us(41216, 0.01) == 41216 * 99


def test_max_packet_rate_examples():
    assert max_packet_rate(3, 0.01, 0.04634) == pytest.approx(0.6474, abs=1e-4)
    assert max_packet_rate(3, 0.01, 0.9912) * 3600 == pytest.approx(109, abs=0.5)
    sf7 = time_on_air(TransmissionProfile(7, 10))
    assert max_packet_rate(3, 0.01, sf7) * 3600 == pytest.approx(2620.34, abs=0.01)
    # Airtime per hour per sub-band at the cap is d * 3600 s = 36 s.
    rate = max_packet_rate(3, 0.01, SF12_10B)
    assert rate * 3600 * SF12_10B / 3 == pytest.approx(36.0)


def test_channel_plan_mappings():
    per = ChannelPlan(3, 0.01)
    shared = ChannelPlan.shared_sub_band(3, 0.01)
    assert per.sub_bands == (0, 1, 2) and shared.sub_bands == (0,)
    assert per.rate_cap(1.0) == pytest.approx(3 * shared.rate_cap(1.0))
    with pytest.raises(DomainError):
        ChannelPlan(0)
    with pytest.raises(DomainError):
        ChannelPlan(3, 0.0)
    with pytest.raises(DomainError):
        ChannelPlan(3, 0.01, sub_band_mapping=(0, 1))


def test_ledger_cycle():
    led = AirtimeLedger.for_plan(ChannelPlan(3, 0.01))
    assert all(ledger_can_transmit(led, sb, 0) for sb in (0, 1, 2))
    ledger_record_tx(led, 0, 5 * US_PER_S, US_PER_S, 0.01)
    end = 6 * US_PER_S
    assert led.last_end[0] == end
    assert not led.can_transmit(0, end)
    assert not led.can_transmit(0, end + 99 * US_PER_S - 1)
    assert led.can_transmit(0, end + 99 * US_PER_S)
    assert led.can_transmit(1, end)
    with pytest.raises(LedgerError):
        led.record_tx(0, end + US_PER_S, 1000, 0.01)
    with pytest.raises(DomainError):
        led.can_transmit(7, 0)


def test_fair_access_budget():
    pol = FairAccessPolicy()
    led = AirtimeLedger((0,))
    assert fair_access_allows(led, pol, US_PER_S, 0)
    t = 0
    for _ in range(30):
        assert pol.allows(led, US_PER_S, t)
        led.record_tx(0, t, US_PER_S, 0.01)
        t += 100 * US_PER_S
    assert not pol.allows(led, US_PER_S, t)
    # The window slides: a day after the first frame, budget frees up again.
    assert pol.allows(led, US_PER_S, 24 * HOUR_US + 1)


def test_fair_access_sf12_thirty_frames():
    toa = time_on_air_us(TransmissionProfile(12, 10))
    pol = FairAccessPolicy(30.0)
    led = AirtimeLedger((0,))
    sent, t = 0, 0
    while pol.allows(led, toa, t):
        led.record_tx(0, t, toa, 0.01)
        sent += 1
        t = led.blocked_until[0]
    assert sent == 30


def test_window_airtime_brute_force():
    rng = np.random.default_rng(0)
    starts, t = [], 0
    toas = []
    for _ in range(40):
        t += int(rng.integers(0, 300))
        toa = int(rng.integers(1, 50))
        starts.append(t)
        toas.append(toa)
        t += toa
    w = 500
    brute = 0
    for a in range(0, t + 1):
        tot = sum(max(0, min(s + d, a + w) - max(s, a)) for s, d in zip(starts, toas))
        brute = max(brute, tot)
    assert max_window_airtime_us(starts, toas, w) == brute


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.integers(0, 3 * HOUR_US), min_size=1, max_size=300),
    st.sampled_from([0.01, 0.1, 0.5]),
    st.integers(10_000, 2_000_000),
)
def test_ledger_accepted_traces_pass_audit(requests, d, toa):
    led = AirtimeLedger((0,))
    starts = []
    for t in sorted(requests):
        if led.can_transmit(0, t):
            led.record_tx(0, t, toa, d)
            starts.append(t)
    assert audit_airtime(starts, [toa] * len(starts), d, toa)


def test_greedy_device_reaches_cap():
    toa = time_on_air_us(TransmissionProfile(9, 20))
    plan = ChannelPlan(3, 0.01)
    led = AirtimeLedger.for_plan(plan)
    horizon = 6 * HOUR_US
    count = 0
    t = 0
    while t < horizon:
        sb = min(plan.sub_bands, key=lambda s: led.blocked_until[s])
        t = max(t, led.blocked_until[sb])
        if t >= horizon:
            break
        led.record_tx(sb, t, toa, plan.duty_cycle)
        count += 1
        t += toa  # single radio
    expected = plan.rate_cap(toa / US_PER_S) * horizon / US_PER_S
    assert abs(count - expected) <= plan.n_channels
