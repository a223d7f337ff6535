"""Gateway downlink state and Class A receive-window scheduling."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..phy import TransmissionProfile, time_on_air_us
from ..regulation import US_PER_S, AirtimeLedger, ChannelPlan

RX2_SUB_BAND = -1


@dataclass(frozen=True)
class GatewayConfig:
    """Gateway downlink behaviour.

    ``rx1_duty_cycle=None`` reuses the uplink plan's duty cycle on the uplink
    sub-bands. RX2 uses a dedicated sub-band at ``rx2_duty_cycle``. An ack
    carries no application payload, which on air is a 12-byte MAC frame
    (MHDR, FHDR, MIC) sent without payload CRC.
    """

    half_duplex: bool = False
    rx1_delay_s: float = 1.0
    rx2_delay_s: float = 2.0
    rx1_duty_cycle: float | None = None
    rx2_duty_cycle: float = 0.10
    rx2_sf: int = 12
    ack_phy_payload_bytes: int = 12

    def ack_airtime_us(self, sf: int) -> int:
        return time_on_air_us(TransmissionProfile(sf, self.ack_phy_payload_bytes, crc_enabled=False))


@dataclass(frozen=True)
class Downlink:
    device: int
    window: int  # 1 or 2
    channel: int  # -1 for the RX2 frequency
    sub_band: int
    sf: int
    start: int
    end: int


@dataclass
class GatewayState:
    """Single-radio gateway: one downlink at a time, duty-cycled per sub-band."""

    plan: ChannelPlan
    config: GatewayConfig = field(default_factory=GatewayConfig)
    ledger: AirtimeLedger = None
    busy_until: int = 0
    downlinks: list = field(default_factory=list)

    def __post_init__(self):
        if self.ledger is None:
            self.ledger = AirtimeLedger(self.plan.sub_bands + (RX2_SUB_BAND,))
        self._ack_toa = {sf: self.config.ack_airtime_us(sf) for sf in range(7, 13)}

    @property
    def rx1_delay_us(self) -> int:
        return round(self.config.rx1_delay_s * US_PER_S)

    @property
    def rx2_delay_us(self) -> int:
        return round(self.config.rx2_delay_s * US_PER_S)

    def try_window(self, window: int, at_us: int, device: int, channel: int, uplink_sf: int):
        """Send an ack in RX``window`` at ``at_us`` if radio and ledger allow it."""
        if window == 1:
            sb, sf, chan = self.plan.sub_band_mapping[channel], uplink_sf, channel
            duty = self.config.rx1_duty_cycle or self.plan.duty_cycle
        else:
            sb, sf, chan = RX2_SUB_BAND, self.config.rx2_sf, -1
            duty = self.config.rx2_duty_cycle
        if at_us < self.busy_until or not self.ledger.can_transmit(sb, at_us):
            return None
        toa = self._ack_toa[sf]
        self.ledger.record_tx(sb, at_us, toa, duty)
        self.busy_until = at_us + toa
        dl = Downlink(device, window, chan, sb, sf, at_us, at_us + toa)
        self.downlinks.append(dl)
        return dl


def schedule_class_a_downlink(gateway: GatewayState, uplink_end_us: int, device: int, channel: int, sf: int):
    """Ack an uplink ending at ``uplink_end_us``: RX1 first, RX2 only if RX1 fails.

    Returns the scheduled :class:`Downlink`, or ``None`` when both windows are
    unavailable (the ack is missed).
    """
    dl = gateway.try_window(1, uplink_end_us + gateway.rx1_delay_us, device, channel, sf)
    if dl is None:
        dl = gateway.try_window(2, uplink_end_us + gateway.rx2_delay_us, device, channel, sf)
    return dl
