"""Seeded traffic sources and device-to-SF assignment."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..phy import SPREADING_FACTORS

STREAM_TRAFFIC = 0
STREAM_ACK = 1
STREAM_WARM_START = 2


def device_rng(seed: int, device_id: int, stream: int = STREAM_TRAFFIC) -> np.random.Generator:
    """Independent Philox stream for one (run seed, device, purpose) triple."""
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, device_id, stream])
    return np.random.Generator(np.random.Philox(ss))


def largest_remainder_counts(n: int, probabilities) -> list[int]:
    """Split ``n`` into integer counts proportional to ``probabilities``."""
    quotas = [n * p for p in probabilities]
    counts = [math.floor(q) for q in quotas]
    short = n - sum(counts)
    order = sorted(range(len(quotas)), key=lambda k: (-(quotas[k] - counts[k]), k))
    for k in order[:short]:
        counts[k] += 1
    return counts


def assign_sfs(n_devices: int, probabilities) -> np.ndarray:
    counts = largest_remainder_counts(n_devices, probabilities)
    return np.repeat(np.asarray(SPREADING_FACTORS), counts)


@dataclass(frozen=True)
class PoissonTraffic:
    """Poisson generation with a uniformly random channel per frame."""

    def arrivals(self, rng, device_id, rate_per_s, duration_us, n_channels):
        if rate_per_s <= 0:
            return np.empty(0, np.int64), np.empty(0, np.int64)
        if not math.isfinite(rate_per_s):
            raise DomainError("simulated generation rate must be finite")
        horizon = duration_us / 1e6
        expected = rate_per_s * horizon
        chunk = int(expected + 6 * math.sqrt(expected) + 16)
        parts, t = [], 0.0
        while t < horizon:
            gaps = rng.exponential(1.0 / rate_per_s, chunk)
            times = t + np.cumsum(gaps)
            parts.append(times)
            t = times[-1]
        times = np.concatenate(parts)
        times_us = np.floor(times[times < horizon] * 1e6).astype(np.int64)
        channels = rng.integers(0, n_channels, times_us.size)
        return times_us, channels


@dataclass(frozen=True)
class ScheduledTraffic:
    """Explicit generation times (seconds) and optional channels per device."""

    times_s: tuple[tuple[float, ...], ...]
    channels: tuple[tuple[int, ...], ...] | None = None

    def arrivals(self, rng, device_id, rate_per_s, duration_us, n_channels):
        times = np.round(np.asarray(self.times_s[device_id], float) * 1e6).astype(np.int64)
        if self.channels is not None:
            chans = np.asarray(self.channels[device_id], np.int64)
        else:
            chans = rng.integers(0, n_channels, times.size)
        keep = times < duration_us
        return times[keep], chans[keep]


@dataclass(frozen=True)
class AvalancheTraffic:
    """Every device generates one frame at ``trigger_s`` plus uniform jitter."""

    trigger_s: float
    jitter_window_s: float = 0.0
    channels: tuple[int, ...] | None = None

    def arrivals(self, rng, device_id, rate_per_s, duration_us, n_channels):
        jitter = rng.uniform(0.0, self.jitter_window_s) if self.jitter_window_s > 0 else 0.0
        t = np.array([round((self.trigger_s + jitter) * 1e6)], np.int64)
        if self.channels is not None:
            ch = np.array([self.channels[device_id]], np.int64)
        else:
            ch = rng.integers(0, n_channels, 1)
        keep = t < duration_us
        return t[keep], ch[keep]


def stationary_blocked_until(rng, block_us: int, rate_per_s: float) -> int:
    """Initial off-period residue of a sub-band gated at ``rate_per_s``.

    Under Poisson generation a gated sub-band alternates a fixed blocked
    phase of ``block_us`` and an exponential free phase. At a random instant
    it is blocked with probability ``D / (D + 1/rate)`` and the residue is
    then uniform over the blocked phase.
    """
    if block_us <= 0 or rate_per_s <= 0 or not math.isfinite(rate_per_s):
        return 0
    blocked_s = block_us / 1e6
    q = blocked_s / (blocked_s + 1.0 / rate_per_s)
    u, v = rng.random(2)
    return int(v * block_us) if u < q else 0
