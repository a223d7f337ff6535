"""LoRaWAN capacity analysis: airtime, duty cycle, SF geometry, ALOHA model and simulator."""

from .analytic import (
    CapacityReport,
    ScenarioSpec,
    effective_rate,
    network_received_at_max_rate,
    per_node_throughput,
    success_probability,
    table1,
)
from .errors import ConfigError, CoverageError, DomainError, LedgerError
from .geometry import (
    CellModel,
    PathLossModel,
    SensitivityTable,
    build_cell,
    max_range_km,
    path_loss_db,
    preset_cell,
    sample_deployment,
)
from .phy import TransmissionProfile, bit_rate, max_payload, symbol_duration, time_on_air
from .regulation import AirtimeLedger, ChannelPlan, FairAccessPolicy, max_packet_rate, off_period

__version__ = "0.1.0"
