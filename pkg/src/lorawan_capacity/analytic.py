"""Superposition-of-ALOHA capacity model.

Each (channel, SF) pair is treated as an independent pure-ALOHA network.
A device on SF ``i`` offers ``min(lambda, cap_i)`` packets/s, where
``cap_i = n_sub_bands * d / T_i``; a frame survives with probability
``exp(-2 G_i)`` where ``G_i`` is the load offered by the other devices on
that SF, spread evenly over the channels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError
from .geometry import CellModel, preset_cell
from .phy import SPREADING_FACTORS, TransmissionProfile, max_payload, time_on_air
from .regulation import ChannelPlan

REFERENCE_SF_PROBABILITIES = (0.19, 0.08, 0.10, 0.14, 0.20, 0.28)


@dataclass(frozen=True)
class ScenarioSpec:
    """Network scenario shared by the analytic model and the simulator.

    ``sf_probabilities`` lists the SF7..SF12 shares. ``lambda_per_hour`` may be
    ``math.inf`` to make every device transmit at its duty-cycle cap.
    """

    n_devices: int
    lambda_per_hour: float
    payload_bytes: int = 10
    plan: ChannelPlan = field(default_factory=ChannelPlan)
    sf_probabilities: tuple[float, ...] = field(
        default_factory=lambda: preset_cell("paper-urban").probabilities
    )
    coding_rate_denominator: int = 5
    bandwidth_hz: int = 125000
    preamble_symbols: int = 8
    ack_fraction: float = 0.0
    enforce_duty_cycle: bool = True

    def __post_init__(self):
        if self.n_devices < 1:
            raise DomainError("need at least one device")
        if self.lambda_per_hour < 0:
            raise DomainError("generation rate must be non-negative")
        probs = tuple(float(p) for p in self.sf_probabilities)
        if len(probs) != 6 or any(p < 0 for p in probs):
            raise DomainError("sf_probabilities needs six non-negative entries")
        if abs(math.fsum(probs) - 1.0) > 1e-9:
            raise DomainError(f"sf_probabilities must sum to 1, got {math.fsum(probs)}")
        object.__setattr__(self, "sf_probabilities", probs)
        if not 0.0 <= self.ack_fraction <= 1.0:
            raise DomainError("ack_fraction must lie in [0, 1]")
        for sf, p in zip(SPREADING_FACTORS, probs):
            if p > 0 and self.payload_bytes > max_payload(sf):
                raise DomainError(
                    f"payload {self.payload_bytes} B infeasible on SF{sf} (max {max_payload(sf)} B)"
                )

    @classmethod
    def from_cell(cls, cell: CellModel, n_devices: int, lambda_per_hour: float, **kw):
        return cls(n_devices, lambda_per_hour, sf_probabilities=cell.probabilities, **kw)

    def with_(self, **changes) -> "ScenarioSpec":
        return replace(self, **changes)

    def profile(self, sf: int) -> TransmissionProfile:
        return TransmissionProfile(
            sf,
            self.payload_bytes,
            bandwidth_hz=self.bandwidth_hz,
            coding_rate_denominator=self.coding_rate_denominator,
            preamble_symbols=self.preamble_symbols,
        )

    def airtime(self, sf: int) -> float:
        return time_on_air(self.profile(sf))

    def rate_cap(self, sf: int) -> float:
        """Packets/s ceiling on SF ``sf`` (``inf`` when duty cycle is not enforced)."""
        if not self.enforce_duty_cycle:
            return math.inf
        return self.plan.rate_cap(self.airtime(sf))


@dataclass(frozen=True)
class SFStats:
    sf: int
    probability: float
    n_devices: float
    airtime_s: float
    cap_per_hour: float
    lambda_eff_per_hour: float
    offered_load: float
    success_probability: float


@dataclass(frozen=True)
class CapacityReport:
    lambda_per_hour: float
    n_devices: int
    payload_bytes: int
    per_sf: tuple[SFStats, ...]
    per_node_packets_per_hour: float
    per_node_bytes_per_hour: float
    network_packets_per_hour: float
    # Received / generated: what Table-1-style "successful transmission" measures.
    delivery_ratio: float
    # Received / transmitted: collision survival only.
    success_probability: float


def effective_rate(lam: float, sf: int, spec: ScenarioSpec) -> float:
    """Transmitted packets/s for generation rate ``lam`` packets/s."""
    if lam < 0:
        raise DomainError("rate must be non-negative")
    return min(lam, spec.rate_cap(sf))


def offered_load(spec: ScenarioSpec, sf: int, lam: float | None = None) -> float:
    """Erlangs per channel offered by the other devices on ``sf``."""
    if lam is None:
        lam = spec.lambda_per_hour / 3600.0
    n_i = spec.n_devices * spec.sf_probabilities[sf - 7]
    interferers = max(n_i - 1.0, 0.0)
    if interferers == 0.0:
        return 0.0
    return interferers * effective_rate(lam, sf, spec) * spec.airtime(sf) / spec.plan.n_channels


def success_probability(spec: ScenarioSpec, sf: int, lam: float | None = None) -> float:
    return math.exp(-2.0 * offered_load(spec, sf, lam))


def per_node_throughput(spec: ScenarioSpec) -> CapacityReport:
    lam = spec.lambda_per_hour / 3600.0
    rows = []
    received = 0.0
    sent = 0.0
    for sf, p in zip(SPREADING_FACTORS, spec.sf_probabilities):
        cap = spec.rate_cap(sf)
        lam_eff = effective_rate(lam, sf, spec)
        g = offered_load(spec, sf, lam)
        ps = math.exp(-2.0 * g)
        rows.append(
            SFStats(
                sf, p, spec.n_devices * p, spec.airtime(sf), cap * 3600.0, lam_eff * 3600.0, g, ps
            )
        )
        received += p * lam_eff * ps
        sent += p * lam_eff
    per_node_h = received * 3600.0
    delivery = received / lam if 0 < lam < math.inf else (1.0 if lam == 0 else math.nan)
    return CapacityReport(
        lambda_per_hour=spec.lambda_per_hour,
        n_devices=spec.n_devices,
        payload_bytes=spec.payload_bytes,
        per_sf=tuple(rows),
        per_node_packets_per_hour=per_node_h,
        per_node_bytes_per_hour=per_node_h * spec.payload_bytes,
        network_packets_per_hour=per_node_h * spec.n_devices,
        delivery_ratio=delivery,
        success_probability=received / sent if sent > 0 else 1.0,
    )


def throughput_curve(spec: ScenarioSpec, lambdas_per_hour) -> np.ndarray:
    """Per-node received packets/hour for each generation rate (vectorised)."""
    lam = np.asarray(lambdas_per_hour, dtype=float) / 3600.0
    total = np.zeros_like(lam)
    n = spec.plan.n_channels
    for sf, p in zip(SPREADING_FACTORS, spec.sf_probabilities):
        if p == 0.0:
            continue
        t = spec.airtime(sf)
        lam_eff = np.minimum(lam, spec.rate_cap(sf))
        interferers = max(spec.n_devices * p - 1.0, 0.0)
        total += p * lam_eff * np.exp(-2.0 * interferers * lam_eff * t / n)
    return total * 3600.0


@dataclass(frozen=True)
class NetworkPoint:
    n_devices: int
    network_packets_per_hour: float
    per_node_packets_per_hour: float


def network_received_at_max_rate(base: ScenarioSpec, n_values) -> list[NetworkPoint]:
    """Packets received per hour when every device sends at its duty-cycle cap."""
    out = []
    for n_dev in n_values:
        rep = per_node_throughput(replace(base, n_devices=int(n_dev), lambda_per_hour=math.inf))
        out.append(NetworkPoint(int(n_dev), rep.network_packets_per_hour, rep.per_node_packets_per_hour))
    return out


@dataclass(frozen=True)
class Table1Row:
    n_devices: int
    payload_bytes: int
    max_packets_per_hour: float
    max_bytes_per_hour: float
    lambda_star_per_hour: float
    success_probability: float
    collision_success: float


def _golden_max(f, lo: float, hi: float, rel_tol: float = 1e-7) -> float:
    inv_phi = (math.sqrt(5) - 1) / 2
    a, b = math.log(lo), math.log(hi)
    c, d = b - inv_phi * (b - a), a + inv_phi * (b - a)
    fc, fd = f(math.exp(c)), f(math.exp(d))
    while b - a > rel_tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(math.exp(d))
    return math.exp((a + b) / 2)


def find_max_throughput(
    spec: ScenarioSpec, lo_per_hour: float = 1.0, hi_per_hour: float = 1e5, points_per_decade: int = 200
) -> tuple[float, float]:
    """Return ``(lambda_star, max_throughput)`` in packets/hour.

    Log grid over ``[lo, hi]`` plus every SF's cap (the curve has kinks
    there), then golden-section refinement around the best grid point.
    Ties go to the smallest rate.
    """
    decades = math.log10(hi_per_hour / lo_per_hour)
    grid = np.logspace(
        math.log10(lo_per_hour), math.log10(hi_per_hour), int(round(decades * points_per_decade)) + 1
    )
    caps = [
        spec.rate_cap(sf) * 3600.0
        for sf, p in zip(SPREADING_FACTORS, spec.sf_probabilities)
        if p > 0 and lo_per_hour <= spec.rate_cap(sf) * 3600.0 <= hi_per_hour
    ]
    cand = np.unique(np.concatenate((grid, caps)))
    vals = throughput_curve(spec, cand)
    k = int(np.argmax(vals))
    best_lam, best_val = float(cand[k]), float(vals[k])
    lo = float(cand[max(k - 1, 0)])
    hi = float(cand[min(k + 1, cand.size - 1)])
    if hi > lo:
        f = lambda x: float(throughput_curve(spec, [x])[0])  # noqa: E731
        lam = _golden_max(f, lo, hi)
        val = f(lam)
        if val > best_val * (1 + 1e-12):
            best_lam, best_val = lam, val
    return best_lam, best_val


def table1(
    n_devices: int,
    payload_bytes: int,
    plan: ChannelPlan | None = None,
    sf_probabilities=None,
) -> Table1Row:
    """Maximum per-node throughput over the generation rate for one deployment."""
    spec = ScenarioSpec(
        n_devices,
        0.0,
        payload_bytes,
        plan=plan or ChannelPlan(3, 0.01),
        sf_probabilities=sf_probabilities or preset_cell("paper-urban").probabilities,
    )
    lam_star, best = find_max_throughput(spec)
    rep = per_node_throughput(replace(spec, lambda_per_hour=lam_star))
    return Table1Row(
        n_devices,
        payload_bytes,
        best,
        best * payload_bytes,
        lam_star,
        best / lam_star,
        rep.success_probability,
    )
