"""Canned traffic scenarios built on :func:`run`."""

from __future__ import annotations

from dataclasses import dataclass

from ..analytic import ScenarioSpec
from .engine import MIN_DURATION_S, SimResult, run
from .traffic import AvalancheTraffic


@dataclass(frozen=True)
class AvalancheScenario:
    """Every device reports once around a common trigger (e.g. dusk switching lights)."""

    spec: ScenarioSpec
    traffic: AvalancheTraffic
    duration_s: float

    def run(self, seed: int, **kw) -> SimResult:
        return run(self.spec, self.duration_s, seed, traffic=self.traffic, **kw)

    def time_to_drain_s(self, result: SimResult) -> float:
        return result.metrics.time_to_drain_s(self.traffic.trigger_s)


def avalanche_preset(
    spec: ScenarioSpec, trigger_time_s: float, jitter_window_s: float = 0.0, channels=None
) -> AvalancheScenario:
    duration = max(MIN_DURATION_S, trigger_time_s + jitter_window_s + 10.0)
    traffic = AvalancheTraffic(trigger_time_s, jitter_window_s, None if channels is None else tuple(channels))
    return AvalancheScenario(spec, traffic, duration)
