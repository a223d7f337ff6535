"""Duty-cycle accounting: off-periods, rate caps, ledgers and fair access.

Ledger times are integer microseconds.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, LedgerError

US_PER_S = 1_000_000
HOUR_US = 3600 * US_PER_S
DAY_US = 24 * HOUR_US


def _check_duty(d: float) -> None:
    if not 0.0 < d <= 1.0:
        raise DomainError(f"duty cycle must lie in (0, 1], got {d}")


def off_period(toa: float, d: float) -> float:
    """Mandatory silence after a frame of ``toa`` seconds at duty cycle ``d``."""
    _check_duty(d)
    if toa <= 0:
        raise DomainError("time on air must be positive")
    return toa * (1.0 / d - 1.0)


def off_period_us(toa_us: int, d: float) -> int:
    """Integer-microsecond off-period, rounded up so the limit is never exceeded."""
    _check_duty(d)
    ratio = Fraction(d).limit_denominator(10**9)
    return math.ceil(toa_us * (1 - ratio) / ratio)


def max_packet_rate(n: int, d: float, toa: float) -> float:
    """Packets per second a device may send over ``n`` independent sub-bands."""
    if n <= 0 or d <= 0 or toa <= 0:
        raise DomainError("channels, duty cycle and airtime must be positive")
    return n * d / toa


@dataclass(frozen=True)
class ChannelPlan:
    """Uplink channels and the sub-band each one belongs to.

    By default every channel is its own sub-band, so a device's rate cap is
    ``n_channels * duty_cycle / toa``.
    """

    n_channels: int = 3
    duty_cycle: float = 0.01
    channel_bandwidth_hz: int = 125000
    sub_band_mapping: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.n_channels < 1:
            raise DomainError("need at least one channel")
        _check_duty(self.duty_cycle)
        mapping = self.sub_band_mapping
        if mapping is None:
            mapping = tuple(range(self.n_channels))
        mapping = tuple(int(m) for m in mapping)
        if len(mapping) != self.n_channels:
            raise DomainError("sub_band_mapping needs one entry per channel")
        object.__setattr__(self, "sub_band_mapping", mapping)

    @classmethod
    def shared_sub_band(cls, n_channels: int = 3, duty_cycle: float = 0.01, **kw):
        """All channels accounted in one sub-band, as in the EU868 default channels."""
        return cls(n_channels, duty_cycle, sub_band_mapping=(0,) * n_channels, **kw)

    @property
    def sub_bands(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.sub_band_mapping)))

    @property
    def n_sub_bands(self) -> int:
        return len(set(self.sub_band_mapping))

    def rate_cap(self, toa: float) -> float:
        """Device packet-rate ceiling (packets/s) for frames of ``toa`` seconds."""
        return max_packet_rate(self.n_sub_bands, self.duty_cycle, toa)


@dataclass(frozen=True)
class FairAccessPolicy:
    daily_airtime_budget_s: float = 30.0

    def __post_init__(self):
        if self.daily_airtime_budget_s <= 0:
            raise DomainError("fair-access budget must be positive")

    @property
    def budget_us(self) -> int:
        return round(self.daily_airtime_budget_s * US_PER_S)

    def allows(self, ledger: "AirtimeLedger", toa_us: int, at_us: int) -> bool:
        return ledger.airtime_last_day_us(at_us) + toa_us <= self.budget_us


@dataclass
class AirtimeLedger:
    """Per-transmitter record of sub-band off-periods and recent airtime."""

    sub_bands: tuple[int, ...]
    blocked_until: dict[int, int] = field(default_factory=dict)
    last_end: dict[int, int] = field(default_factory=dict)
    _history: deque = field(default_factory=deque, repr=False)
    _day_airtime_us: int = field(default=0, repr=False)

    def __post_init__(self):
        self.sub_bands = tuple(self.sub_bands)
        for sb in self.sub_bands:
            self.blocked_until.setdefault(sb, 0)
            self.last_end.setdefault(sb, 0)

    @classmethod
    def for_plan(cls, plan: ChannelPlan) -> "AirtimeLedger":
        return cls(plan.sub_bands)

    def _check(self, sub_band: int) -> None:
        if sub_band not in self.blocked_until:
            raise DomainError(f"unknown sub-band {sub_band!r}")

    def can_transmit(self, sub_band: int, at_us: int) -> bool:
        self._check(sub_band)
        return at_us >= self.blocked_until[sub_band]

    def record_tx(self, sub_band: int, start_us: int, toa_us: int, d: float) -> "AirtimeLedger":
        if not self.can_transmit(sub_band, start_us):
            raise LedgerError(
                f"sub-band {sub_band} blocked until {self.blocked_until[sub_band]} us, "
                f"transmission at {start_us} us"
            )
        end = start_us + toa_us
        self.last_end[sub_band] = end
        self.blocked_until[sub_band] = end + off_period_us(toa_us, d)
        self._history.append((start_us, toa_us))
        self._day_airtime_us += toa_us
        return self

    def airtime_last_day_us(self, at_us: int) -> int:
        """Airtime of transmissions that started within the trailing 24 h."""
        horizon = at_us - DAY_US
        hist = self._history
        while hist and hist[0][0] <= horizon:
            self._day_airtime_us -= hist.popleft()[1]
        return self._day_airtime_us


def ledger_can_transmit(ledger: AirtimeLedger, sub_band: int, at_us: int) -> bool:
    return ledger.can_transmit(sub_band, at_us)


def ledger_record_tx(ledger: AirtimeLedger, sub_band: int, start_us: int, toa_us: int, d: float):
    return ledger.record_tx(sub_band, start_us, toa_us, d)


def fair_access_allows(ledger: AirtimeLedger, policy: FairAccessPolicy, toa_us: int, at_us: int) -> bool:
    return policy.allows(ledger, toa_us, at_us)


def max_window_airtime_us(starts_us, toas_us, window_us: int = HOUR_US) -> int:
    """Largest airtime falling inside any window of length ``window_us``.

    Intervals must not overlap one another. The maximum is attained by a
    window that opens at some interval start, so only those are checked.
    """
    starts = np.asarray(starts_us, dtype=np.int64)
    toas = np.asarray(toas_us, dtype=np.int64)
    if starts.size == 0:
        return 0
    order = np.argsort(starts, kind="stable")
    starts, toas = starts[order], toas[order]
    ends = starts + toas
    cum = np.concatenate(([0], np.cumsum(toas)))
    win_end = starts + window_us
    # Intervals fully inside [s_k, s_k + W) are k..j-1 where j = first end > win_end.
    j = np.searchsorted(ends, win_end, side="right")
    full = cum[j] - cum[np.arange(starts.size)]
    partial = np.zeros_like(full)
    has_next = j < starts.size
    jj = j[has_next]
    partial[has_next] = np.clip(win_end[has_next] - starts[jj], 0, None)
    return int((full + partial).max())


def audit_airtime(starts_us, toas_us, d: float, max_toa_us: int, window_us: int = HOUR_US) -> bool:
    """True when no sliding window carries more than ``d * window + max_toa``."""
    limit = d * window_us + max_toa_us
    return max_window_airtime_us(starts_us, toas_us, window_us) <= limit


__all__ = [
    "AirtimeLedger",
    "ChannelPlan",
    "FairAccessPolicy",
    "audit_airtime",
    "fair_access_allows",
    "ledger_can_transmit",
    "ledger_record_tx",
    "max_packet_rate",
    "max_window_airtime_us",
    "off_period",
    "off_period_us",
]
