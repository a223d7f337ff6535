from .engine import EventKind, Frames, SimResult, resolve_collisions, run
from .gateway import Downlink, GatewayConfig, GatewayState, schedule_class_a_downlink
from .metrics import CSV_COLUMNS, SFMetrics, SimMetrics, metrics_rows
from .scenarios import AvalancheScenario, avalanche_preset
from .traffic import (
    AvalancheTraffic,
    PoissonTraffic,
    ScheduledTraffic,
    assign_sfs,
    device_rng,
    largest_remainder_counts,
)
