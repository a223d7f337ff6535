"""Counters and derived rates for one simulation run."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from ..phy import SPREADING_FACTORS


@dataclass(frozen=True)
class SFMetrics:
    sf: str  # "7".."12" or "all"
    n_devices: int
    generated: int
    attempted: int
    delivered: int
    collided: int
    gateway_lost: int
    duty_blocked: int
    ack_requested: int
    ack_rx1: int
    ack_rx2: int
    ack_missed: int
    airtime_s: float
    offered_load: float
    success_ratio: float
    delivery_ratio: float
    throughput_pkt_h: float
    throughput_bytes_h: float

    @property
    def success_std_error(self) -> float:
        """Binomial standard error of ``success_ratio`` under the model value ``exp(-2G)``."""
        p = math.exp(-2.0 * self.offered_load)
        return math.sqrt(p * (1 - p) / self.attempted) if self.attempted else math.inf


@dataclass(frozen=True)
class SimMetrics:
    seed: int
    duration_s: float
    per_sf: tuple[SFMetrics, ...]
    total: SFMetrics
    downlink_count: int
    downlink_airtime_s: float
    gateway_utilization: float
    first_frame_start_s: float
    last_frame_end_s: float

    def for_sf(self, sf: int) -> SFMetrics:
        return next(m for m in self.per_sf if m.sf == str(sf))

    @property
    def collision_ratio(self) -> float:
        t = self.total
        return t.collided / t.attempted if t.attempted else 0.0

    def time_to_drain_s(self, trigger_s: float) -> float:
        return self.last_frame_end_s - trigger_s


CSV_COLUMNS = ("seed",) + tuple(f.name for f in fields(SFMetrics)) + (
    "downlink_count",
    "downlink_airtime_s",
    "gateway_utilization",
)


def _fmt(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.6f}"
    return str(v)


def metrics_rows(m: SimMetrics) -> list[list[str]]:
    """CSV rows, one per SF plus an ``all`` row, in :data:`CSV_COLUMNS` order."""
    rows = []
    for sfm in (*m.per_sf, m.total):
        vals = [m.seed] + [getattr(sfm, f.name) for f in fields(SFMetrics)]
        vals += [m.downlink_count, m.downlink_airtime_s, m.gateway_utilization]
        rows.append([_fmt(v) for v in vals])
    return rows


def _group(spec, label, n_dev, mask_f, generated, blocked, frames, airtime_us, duration_us):
    attempted = int(mask_f.sum())
    delivered = int((mask_f & frames.delivered).sum())
    collided = int((mask_f & frames.collided).sum())
    lost = int((mask_f & frames.gateway_lost & ~frames.collided).sum())
    ack_req = int((mask_f & frames.ack_requested).sum())
    rx1 = int((mask_f & (frames.ack_window == 1)).sum())
    rx2 = int((mask_f & (frames.ack_window == 2)).sum())
    ack_ok_candidates = int((mask_f & frames.ack_requested & frames.delivered).sum())
    dur_s = duration_us / 1e6
    if label != "all" and n_dev > 0 and airtime_us:
        # Load per channel offered by the other devices on this SF, measured.
        per_dev_rate = attempted / n_dev / dur_s
        g = (n_dev - 1) * per_dev_rate * airtime_us / 1e6 / spec.plan.n_channels
    else:
        g = math.nan
    per_node = delivered / n_dev / dur_s * 3600 if n_dev else 0.0
    return SFMetrics(
        sf=label,
        n_devices=n_dev,
        generated=int(generated),
        attempted=attempted,
        delivered=delivered,
        collided=collided,
        gateway_lost=lost,
        duty_blocked=int(blocked),
        ack_requested=ack_req,
        ack_rx1=rx1,
        ack_rx2=rx2,
        ack_missed=ack_ok_candidates - rx1 - rx2,
        airtime_s=(airtime_us or 0) / 1e6,
        offered_load=g,
        success_ratio=delivered / attempted if attempted else math.nan,
        delivery_ratio=delivered / generated if generated else math.nan,
        throughput_pkt_h=per_node,
        throughput_bytes_h=per_node * spec.payload_bytes,
    )


def collect_metrics(spec, frames, dev_sf, generated, blocked, downlinks, duration_us, seed) -> SimMetrics:
    per_sf = []
    for sf in SPREADING_FACTORS:
        devs = dev_sf == sf
        n_dev = int(devs.sum())
        airtime = int(frames.end[frames.sf == sf][0] - frames.start[frames.sf == sf][0]) if (frames.sf == sf).any() else None
        per_sf.append(
            _group(spec, str(sf), n_dev, frames.sf == sf, generated[devs].sum(), blocked[devs].sum(), frames, airtime, duration_us)
        )
    total = _group(
        spec, "all", spec.n_devices, np.ones(frames.start.size, bool), generated.sum(), blocked.sum(), frames, None, duration_us
    )
    dl_air = sum(dl.end - dl.start for dl in downlinks) / 1e6
    dur_s = duration_us / 1e6
    return SimMetrics(
        seed=seed,
        duration_s=dur_s,
        per_sf=tuple(per_sf),
        total=total,
        downlink_count=len(downlinks),
        downlink_airtime_s=dl_air,
        gateway_utilization=dl_air / dur_s,
        first_frame_start_s=float(frames.start.min()) / 1e6 if frames.start.size else math.nan,
        last_frame_end_s=float(frames.end.max()) / 1e6 if frames.end.size else math.nan,
    )
