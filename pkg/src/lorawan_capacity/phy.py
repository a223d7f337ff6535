"""LoRa frame airtime and data-rate arithmetic.

Airtime follows the Semtech symbol-count formula. Durations are computed as
exact rationals and exposed either as float seconds or as integer
microseconds, the latter being the simulator's time base.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError

SPREADING_FACTORS = (7, 8, 9, 10, 11, 12)
BANDWIDTHS_HZ = (7800, 10400, 15600, 20800, 31200, 41700, 62500, 125000, 250000, 500000)

# EU868 maximum MAC payload per SF at 125 kHz.
_MAX_PAYLOAD = {7: 222, 8: 222, 9: 115, 10: 51, 11: 51, 12: 51}


def _check_sf(sf: int) -> None:
    if sf not in _MAX_PAYLOAD:
        raise DomainError(f"spreading factor must be in 7..12, got {sf!r}")


def default_low_dr_optimize(sf: int, bandwidth_hz: int) -> bool:
    """Low data-rate optimisation is mandated when a symbol lasts >= 16 ms."""
    return sf >= 11 and bandwidth_hz <= 125000


def max_payload(sf: int) -> int:
    _check_sf(sf)
    return _MAX_PAYLOAD[sf]


@dataclass(frozen=True)
class TransmissionProfile:
    """Radio parameters of a single LoRa frame.

    ``low_dr_optimize`` left as ``None`` is resolved from ``sf`` and
    ``bandwidth_hz`` (on for SF11/SF12 at 125 kHz and below).
    """

    sf: int
    payload_bytes: int
    bandwidth_hz: int = 125000
    coding_rate_denominator: int = 5
    preamble_symbols: int = 8
    explicit_header: bool = True
    crc_enabled: bool = True
    low_dr_optimize: bool | None = None

    def __post_init__(self):
        _check_sf(self.sf)
        if self.bandwidth_hz not in BANDWIDTHS_HZ:
            raise DomainError(f"bandwidth {self.bandwidth_hz} Hz not in {BANDWIDTHS_HZ}")
        if self.coding_rate_denominator not in (5, 6, 7, 8):
            raise DomainError("coding rate denominator must be 5..8")
        if self.preamble_symbols < 1:
            raise DomainError("preamble must have at least one symbol")
        if not 1 <= self.payload_bytes <= _MAX_PAYLOAD[self.sf]:
            raise DomainError(
                f"payload {self.payload_bytes} B outside 1..{_MAX_PAYLOAD[self.sf]} for SF{self.sf}"
            )
        if self.low_dr_optimize is None:
            object.__setattr__(
                self, "low_dr_optimize", default_low_dr_optimize(self.sf, self.bandwidth_hz)
            )


def symbol_duration(sf: int, bandwidth_hz: float) -> float:
    """Seconds per chirp symbol, ``2**sf / bandwidth``."""
    _check_sf(sf)
    if bandwidth_hz <= 0:
        raise DomainError("bandwidth must be positive")
    return 2**sf / bandwidth_hz


def payload_symbols(profile: TransmissionProfile) -> int:
    """Number of symbols after the preamble (header + payload + CRC)."""
    sf = profile.sf
    de = 1 if profile.low_dr_optimize else 0
    ih = 0 if profile.explicit_header else 1
    crc = 1 if profile.crc_enabled else 0
    numerator = 8 * profile.payload_bytes - 4 * sf + 28 + 16 * crc - 20 * ih
    blocks = -(-numerator // (4 * (sf - 2 * de)))  # ceil for integers
    return 8 + max(blocks * profile.coding_rate_denominator, 0)


def _airtime_exact(profile: TransmissionProfile) -> Fraction:
    symbols = Fraction(profile.preamble_symbols) + Fraction(17, 4) + payload_symbols(profile)
    return symbols * Fraction(2**profile.sf, profile.bandwidth_hz)


def time_on_air(profile: TransmissionProfile) -> float:
    """Frame airtime in seconds."""
    return float(_airtime_exact(profile))


def time_on_air_us(profile: TransmissionProfile) -> int:
    """Frame airtime rounded to the nearest microsecond."""
    return round(_airtime_exact(profile) * 1_000_000)


def bit_rate(profile: TransmissionProfile, coded: bool = True) -> float:
    """Bit rate in bit/s; ``coded=False`` drops the ``4/CR`` factor."""
    rate = profile.sf * profile.bandwidth_hz / 2**profile.sf
    if coded:
        rate *= 4 / profile.coding_rate_denominator
    return rate


def airtime_table(
    payloads: range | None = None,
    bandwidth_hz: int = 125000,
    coding_rate_denominator: int = 5,
) -> list[tuple[int, int, float]]:
    """Rows ``(sf, payload_bytes, toa_ms)`` for every valid payload per SF."""
    rows = []
    for sf in SPREADING_FACTORS:
        top = _MAX_PAYLOAD[sf]
        sizes = payloads if payloads is not None else range(1, top + 1)
        for pl in sizes:
            if pl > top:
                continue
            prof = TransmissionProfile(
                sf, pl, bandwidth_hz=bandwidth_hz, coding_rate_denominator=coding_rate_denominator
            )
            rows.append((sf, pl, time_on_air(prof) * 1000))
    return rows


__all__ = [
    "BANDWIDTHS_HZ",
    "SPREADING_FACTORS",
    "TransmissionProfile",
    "airtime_table",
    "bit_rate",
    "max_payload",
    "payload_symbols",
    "symbol_duration",
    "time_on_air",
    "time_on_air_us",
]
