"""Discrete-event simulation of Class A devices around one gateway.

Device uplink behaviour does not depend on the gateway, so each device's
generation stream and duty-cycle gating are resolved per device first.
Same-(channel, SF) overlaps are then found by sorting. When acknowledgements
or a half-duplex gateway are enabled, the gateway side runs over a time
ordered event queue (frame ends, receive windows, downlink start/end).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from ..analytic import ScenarioSpec
from ..errors import DomainError
from ..phy import time_on_air_us
from ..regulation import US_PER_S, AirtimeLedger, FairAccessPolicy, off_period_us
from .gateway import Downlink, GatewayConfig, GatewayState
from .metrics import SimMetrics, collect_metrics
from .traffic import (
    STREAM_ACK,
    STREAM_TRAFFIC,
    STREAM_WARM_START,
    PoissonTraffic,
    assign_sfs,
    device_rng,
    stationary_blocked_until,
)

MIN_DURATION_S = 600.0
MAX_HORIZON_US = 2**62


class EventKind(IntEnum):
    """Event kinds; the value is the tie-break priority at equal times."""

    FRAME_END = 0
    ACK_END = 1
    GENERATE = 2
    FRAME_START = 3
    RX1_OPEN = 4
    RX2_OPEN = 5
    ACK_START = 6


@dataclass
class Frames:
    """Column store of attempted uplink frames."""

    device: np.ndarray
    sf: np.ndarray
    channel: np.ndarray
    start: np.ndarray
    end: np.ndarray
    ack_requested: np.ndarray
    collided: np.ndarray = None
    gateway_lost: np.ndarray = None
    ack_window: np.ndarray = None  # 0 none/missed, 1 RX1, 2 RX2

    @property
    def delivered(self) -> np.ndarray:
        return ~(self.collided | self.gateway_lost)


@dataclass
class SimResult:
    metrics: SimMetrics
    frames: Frames
    downlinks: list[Downlink] = field(default_factory=list)
    generated: np.ndarray = None
    duty_blocked: np.ndarray = None


def _gate_device(times, channels, sub_of, toa_us, block_us, initial, ledger, d, fair, record):
    """Drop frames whose sub-band is still in its off-period."""
    keep = []
    if ledger is None:
        blocked = list(initial)
        for k, (t, c) in enumerate(zip(times, channels)):
            sb = sub_of[c]
            if t >= blocked[sb]:
                blocked[sb] = t + block_us
                keep.append(k)
            elif record is not None:
                record.append(k)
        return keep
    for sb, until in enumerate(initial):
        if sb in ledger.blocked_until:
            ledger.blocked_until[sb] = until
    for k, (t, c) in enumerate(zip(times, channels)):
        sb = sub_of[c]
        if ledger.can_transmit(sb, t) and (fair is None or fair.allows(ledger, toa_us, t)):
            ledger.record_tx(sb, t, toa_us, d)
            keep.append(k)
        elif record is not None:
            record.append(k)
    return keep


def resolve_collisions(channel, sf, start, end) -> np.ndarray:
    """Flag every frame that overlaps another frame on the same channel and SF."""
    n = start.size
    collided = np.zeros(n, bool)
    if n < 2:
        return collided
    key = channel.astype(np.int64) * 16 + sf
    order = np.lexsort((start, key))
    k_s, s_s, e_s = key[order], start[order], end[order]
    same_next = k_s[1:] == k_s[:-1]
    # Running max of earlier ends, reset per group via a per-group offset.
    span = int(e_s.max()) + 1
    run_max = np.maximum.accumulate(e_s + k_s * span) - k_s * span
    hit_prev = np.zeros(n, bool)
    hit_prev[1:] = same_next & (run_max[:-1] > s_s[1:])
    hit_next = np.zeros(n, bool)
    hit_next[:-1] = same_next & (s_s[1:] < e_s[:-1])
    collided[order] = hit_prev | hit_next
    return collided


def run(
    spec: ScenarioSpec,
    duration_s: float,
    seed: int,
    *,
    gateway: GatewayConfig | None = None,
    traffic=None,
    sfs=None,
    fair_access: FairAccessPolicy | None = None,
    warm_start: bool = True,
    trace=None,
) -> SimResult:
    """Simulate ``duration_s`` seconds of uplink generation.

    ``sfs`` overrides the largest-remainder SF split with one SF per device.
    ``trace`` is a text stream receiving one CSV line per event.
    ``warm_start`` draws each sub-band's initial off-period from the
    stationary state of Poisson gating; without it every device starts with
    a clear ledger at t=0 and long off-periods keep devices phase-locked for
    hours.
    Frames generated while the chosen channel's sub-band is in its
    off-period (or over the fair-access budget) are dropped and counted as
    duty-blocked.
    """
    if duration_s < MIN_DURATION_S:
        raise DomainError(f"duration must be at least {MIN_DURATION_S:.0f} s")
    duration_us = round(duration_s * US_PER_S)
    if duration_us > MAX_HORIZON_US // 4:
        raise DomainError("event horizon overflow")
    gateway = gateway or GatewayConfig()
    traffic = traffic or PoissonTraffic()
    plan = spec.plan
    n_ch = plan.n_channels
    sub_of = list(plan.sub_band_mapping)
    d = plan.duty_cycle

    if sfs is None:
        dev_sf = assign_sfs(spec.n_devices, spec.sf_probabilities)
    else:
        dev_sf = np.asarray(sfs, np.int64)
        if dev_sf.size != spec.n_devices:
            raise DomainError("sfs must list one SF per device")
    toa_by_sf = {sf: time_on_air_us(spec.profile(sf)) for sf in set(dev_sf.tolist())}
    rate = spec.lambda_per_hour / 3600.0

    cols = {k: [] for k in ("device", "start", "channel", "ack")}
    generated = np.zeros(spec.n_devices, np.int64)
    blocked = np.zeros(spec.n_devices, np.int64)
    trace_gen = [] if trace is not None else None
    for dev in range(spec.n_devices):
        sf = int(dev_sf[dev])
        toa = toa_by_sf[sf]
        block_us = toa + (off_period_us(toa, d) if spec.enforce_duty_cycle else 0)
        times, chans = traffic.arrivals(device_rng(seed, dev, STREAM_TRAFFIC), dev, rate, duration_us, n_ch)
        acks = device_rng(seed, dev, STREAM_ACK).random(times.size) < spec.ack_fraction
        ledger = None
        if fair_access is not None and spec.enforce_duty_cycle:
            ledger = AirtimeLedger(plan.sub_bands)
        elif fair_access is not None:
            raise DomainError("fair access requires duty-cycle enforcement")
        n_sb = max(sub_of) + 1
        initial = [0] * n_sb
        if warm_start and spec.enforce_duty_cycle:
            warm = device_rng(seed, dev, STREAM_WARM_START)
            for sb in plan.sub_bands:
                sb_rate = rate * sub_of.count(sb) / n_ch
                initial[sb] = stationary_blocked_until(warm, block_us, sb_rate)
        dropped = [] if trace is not None else None
        keep = _gate_device(
            times.tolist(), chans.tolist(), sub_of, toa, block_us, initial, ledger, d, fair_access, dropped
        )
        generated[dev] = times.size
        blocked[dev] = times.size - len(keep)
        cols["device"].append(np.full(len(keep), dev, np.int64))
        cols["start"].append(times[keep])
        cols["channel"].append(chans[keep])
        cols["ack"].append(acks[keep])
        if trace is not None:
            kept = set(keep)
            for k, (t, c) in enumerate(zip(times.tolist(), chans.tolist())):
                trace_gen.append((t, EventKind.GENERATE, dev, c, sf, "attempt" if k in kept else "duty_blocked"))

    device = np.concatenate(cols["device"]) if cols["device"] else np.empty(0, np.int64)
    start = np.concatenate(cols["start"]) if cols["start"] else np.empty(0, np.int64)
    channel = np.concatenate(cols["channel"]).astype(np.int64) if cols["channel"] else np.empty(0, np.int64)
    ack_req = np.concatenate(cols["ack"]) if cols["ack"] else np.empty(0, bool)
    sf_arr = dev_sf[device]
    toa_lookup = np.zeros(13, np.int64)
    for s, toa in toa_by_sf.items():
        toa_lookup[s] = toa
    toa_arr = toa_lookup[sf_arr]
    frames = Frames(device, sf_arr, channel, start, start + toa_arr, ack_req)
    frames.collided = resolve_collisions(channel, sf_arr, start, frames.end)
    frames.gateway_lost = np.zeros(start.size, bool)
    frames.ack_window = np.zeros(start.size, np.int8)

    downlinks: list[Downlink] = []
    events = []
    if spec.ack_fraction > 0 or gateway.half_duplex:
        downlinks = _gateway_pass(frames, spec, gateway, events if trace is not None else None)

    metrics = collect_metrics(spec, frames, dev_sf, generated, blocked, downlinks, duration_us, seed)
    if trace is not None:
        _write_trace(trace, frames, trace_gen, events)
    return SimResult(metrics, frames, downlinks, generated, blocked)


def _gateway_pass(frames: Frames, spec: ScenarioSpec, config: GatewayConfig, log) -> list[Downlink]:
    gw = GatewayState(spec.plan, config)
    max_up = int((frames.end - frames.start).max()) if frames.start.size else 0
    dev, sf, ch = frames.device.tolist(), frames.sf.tolist(), frames.channel.tolist()
    st, en = frames.start.tolist(), frames.end.tolist()
    collided, ackr = frames.collided.tolist(), frames.ack_requested.tolist()
    lost = [False] * len(st)
    window = [0] * len(st)

    heap = [(en[i], EventKind.FRAME_END, dev[i], i) for i in range(len(st))]
    heapq.heapify(heap)
    tx_intervals: list[tuple[int, int]] = []

    while heap:
        t, kind, _, i = heapq.heappop(heap)
        if kind == EventKind.FRAME_END:
            if config.half_duplex and tx_intervals:
                horizon = t - max_up
                tx_intervals[:] = [iv for iv in tx_intervals if iv[1] > horizon]
                lost[i] = any(s < t and st[i] < e for s, e in tx_intervals)
            ok = not collided[i] and not lost[i]
            if log is not None:
                outcome = "delivered" if ok else ("collided" if collided[i] else "gateway_busy")
                log.append((t, kind, dev[i], ch[i], sf[i], outcome))
            if ok and ackr[i]:
                heapq.heappush(heap, (t + gw.rx1_delay_us, EventKind.RX1_OPEN, dev[i], i))
        elif kind in (EventKind.RX1_OPEN, EventKind.RX2_OPEN):
            win = 1 if kind == EventKind.RX1_OPEN else 2
            dl = gw.try_window(win, t, dev[i], ch[i], sf[i])
            if dl is not None:
                window[i] = win
                tx_intervals.append((dl.start, dl.end))
                heapq.heappush(heap, (dl.start, EventKind.ACK_START, dev[i], i))
                heapq.heappush(heap, (dl.end, EventKind.ACK_END, dev[i], i))
            elif win == 1:
                heapq.heappush(heap, (en[i] + gw.rx2_delay_us, EventKind.RX2_OPEN, dev[i], i))
            if log is not None:
                outcome = "ack" if dl is not None else ("blocked" if win == 1 else "missed")
                c, s = (ch[i], sf[i]) if win == 1 else (-1, config.rx2_sf)
                log.append((t, kind, dev[i], c, s, outcome))
        elif log is not None:
            w = window[i]
            c, s = (ch[i], sf[i]) if w == 1 else (-1, config.rx2_sf)
            log.append((t, kind, dev[i], c, s, f"rx{w}"))

    frames.gateway_lost = np.asarray(lost, bool)
    frames.ack_window = np.asarray(window, np.int8)
    return gw.downlinks


_KIND_NAMES = {k: k.name.lower() for k in EventKind}


def _write_trace(out, frames: Frames, gen_events, gw_events) -> None:
    rows = list(gen_events)
    delivered = frames.delivered
    for i in range(frames.start.size):
        dv, c, s = int(frames.device[i]), int(frames.channel[i]), int(frames.sf[i])
        rows.append((int(frames.start[i]), EventKind.FRAME_START, dv, c, s, ""))
    if gw_events:
        rows.extend(gw_events)
    else:
        for i in range(frames.start.size):
            dv, c, s = int(frames.device[i]), int(frames.channel[i]), int(frames.sf[i])
            rows.append((int(frames.end[i]), EventKind.FRAME_END, dv, c, s, "delivered" if delivered[i] else "collided"))
    rows.sort(key=lambda r: (r[0], int(r[1]), r[2], r[3]))
    out.write("#schema=1\ntime_us,kind,device,channel,sf,outcome\n")
    for t, kind, dv, c, s, outcome in rows:
        out.write(f"{t},{_KIND_NAMES[kind]},{dv},{c},{s},{outcome}\n")
