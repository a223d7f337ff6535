"""Scenario files: TOML documents with phy/regulation/cell/traffic/gateway/output sections."""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .analytic import ScenarioSpec
from .errors import ConfigError, DomainError
from .geometry import (
    CellModel,
    PathLossModel,
    SensitivityTable,
    build_cell,
    preset_cell,
)
from .netsim import AvalancheTraffic, GatewayConfig, PoissonTraffic
from .regulation import ChannelPlan, FairAccessPolicy

CONFIG_DIR_ENV = "LORAWAN_CAPACITY_CONFIG_DIR"

_SCHEMA = {
    "phy": {"bandwidth_hz", "coding_rate_denominator", "preamble_symbols", "payload_bytes"},
    "regulation": {"n_channels", "duty_cycle", "sub_band_mapping", "fair_access", "fair_access_budget_s"},
    "cell": {
        "preset",
        "sf_probabilities",
        "frequency_mhz",
        "base_height_m",
        "mobile_height_m",
        "sensitivities_dbm",
        "tx_power_dbm",
        "radius_km",
    },
    "traffic": {
        "n_devices",
        "lambda_per_hour",
        "ack_fraction",
        "duration_s",
        "seeds",
        "mode",
        "trigger_s",
        "jitter_window_s",
    },
    "gateway": {"half_duplex", "rx1_duty_cycle", "rx2_duty_cycle", "rx2_sf"},
    "sweep": {"parameter", "values"},
    "output": {"metrics_csv", "trace_path", "format"},
}
_SWEEPABLE = {"lambda_per_hour", "n_devices", "ack_fraction", "payload_bytes"}


@dataclass
class ScenarioFile:
    spec: ScenarioSpec
    cell: CellModel | None
    duration_s: float = 3600.0
    seeds: tuple[int, ...] = (0,)
    traffic: object = field(default_factory=PoissonTraffic)
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    fair_access: FairAccessPolicy | None = None
    sweep_parameter: str | None = None
    sweep_values: tuple = ()
    metrics_csv: str | None = None
    trace_path: str | None = None
    source: Path | None = None


def resolve_path(path: str | os.PathLike) -> Path:
    """Use ``path`` as given, else look it up under ``$LORAWAN_CAPACITY_CONFIG_DIR``."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    base = os.environ.get(CONFIG_DIR_ENV)
    if base and (Path(base) / p).exists():
        return Path(base) / p
    return p


def _check_keys(doc: dict) -> None:
    for section, body in doc.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        extra = set(body) - _SCHEMA[section]
        if extra:
            raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(extra))}")


def _plan(reg: dict) -> ChannelPlan:
    n = int(reg.get("n_channels", 3))
    d = float(reg.get("duty_cycle", 0.01))
    mapping = reg.get("sub_band_mapping", "per-channel")
    if mapping == "per-channel":
        return ChannelPlan(n, d)
    if mapping == "shared":
        return ChannelPlan.shared_sub_band(n, d)
    if isinstance(mapping, list):
        return ChannelPlan(n, d, sub_band_mapping=tuple(mapping))
    raise ConfigError(f"sub_band_mapping must be 'per-channel', 'shared' or a list, got {mapping!r}")


def _cell(cell: dict) -> CellModel | None:
    if "sf_probabilities" in cell:
        if len(cell) > 1:
            raise ConfigError("[cell] sf_probabilities excludes other cell keys")
        return None
    if "preset" in cell:
        if len(cell) > 1:
            raise ConfigError("[cell] preset excludes explicit model keys")
        return preset_cell(cell["preset"])
    if not cell:
        return preset_cell("paper-urban")
    model = PathLossModel(
        float(cell.get("frequency_mhz", 868.0)),
        float(cell.get("base_height_m", 30.0)),
        float(cell.get("mobile_height_m", 1.5)),
    )
    if "sensitivities_dbm" not in cell:
        raise ConfigError("explicit [cell] needs sensitivities_dbm")
    sens = SensitivityTable(tuple(cell["sensitivities_dbm"]), float(cell.get("tx_power_dbm", 14.0)))
    radius = cell.get("radius_km")
    return build_cell(model, sens, None if radius is None else float(radius))


def parse_scenario(doc: dict, source: Path | None = None) -> ScenarioFile:
    _check_keys(doc)
    phy, reg = doc.get("phy", {}), doc.get("regulation", {})
    cell_doc, tr = doc.get("cell", {}), doc.get("traffic", {})
    gw, out, sw = doc.get("gateway", {}), doc.get("output", {}), doc.get("sweep", {})
    try:
        plan = _plan(reg)
        cell = _cell(cell_doc)
        probs = tuple(cell_doc["sf_probabilities"]) if cell is None else cell.probabilities
        spec = ScenarioSpec(
            n_devices=int(tr.get("n_devices", 100)),
            lambda_per_hour=float(tr.get("lambda_per_hour", 10.0)),
            payload_bytes=int(phy.get("payload_bytes", 10)),
            plan=plan,
            sf_probabilities=probs,
            coding_rate_denominator=int(phy.get("coding_rate_denominator", 5)),
            bandwidth_hz=int(phy.get("bandwidth_hz", 125000)),
            preamble_symbols=int(phy.get("preamble_symbols", 8)),
            ack_fraction=float(tr.get("ack_fraction", 0.0)),
        )
        mode = tr.get("mode", "poisson")
        if mode == "poisson":
            traffic = PoissonTraffic()
        elif mode == "avalanche":
            traffic = AvalancheTraffic(float(tr.get("trigger_s", 60.0)), float(tr.get("jitter_window_s", 0.0)))
        else:
            raise ConfigError(f"traffic mode must be 'poisson' or 'avalanche', got {mode!r}")
        seeds = tr.get("seeds", [0])
        seeds = tuple(range(seeds)) if isinstance(seeds, int) else tuple(int(s) for s in seeds)
        gateway = GatewayConfig(
            half_duplex=bool(gw.get("half_duplex", False)),
            rx1_duty_cycle=gw.get("rx1_duty_cycle"),
            rx2_duty_cycle=float(gw.get("rx2_duty_cycle", 0.10)),
            rx2_sf=int(gw.get("rx2_sf", 12)),
        )
        fair = None
        if reg.get("fair_access", False):
            fair = FairAccessPolicy(float(reg.get("fair_access_budget_s", 30.0)))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"bad value: {exc}") from exc
    if out.get("format", "csv") != "csv":
        raise ConfigError("only csv output is supported")
    param = sw.get("parameter")
    if param is not None and param not in _SWEEPABLE:
        raise ConfigError(f"sweep parameter must be one of {sorted(_SWEEPABLE)}")
    return ScenarioFile(
        spec=spec,
        cell=cell,
        duration_s=float(tr.get("duration_s", 3600.0)),
        seeds=seeds,
        traffic=traffic,
        gateway=gateway,
        fair_access=fair,
        sweep_parameter=param,
        sweep_values=tuple(sw.get("values", ())),
        metrics_csv=out.get("metrics_csv"),
        trace_path=out.get("trace_path"),
        source=source,
    )


def load_scenario(path: str | os.PathLike) -> ScenarioFile:
    p = resolve_path(path)
    try:
        with open(p, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"scenario file not found: {p}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{p}: {exc}") from exc
    return parse_scenario(doc, p)


def sweep_spec(spec: ScenarioSpec, parameter: str, value) -> ScenarioSpec:
    if parameter not in _SWEEPABLE:
        raise ConfigError(f"cannot sweep {parameter!r}; choose one of {sorted(_SWEEPABLE)}")
    caster = int if parameter in ("n_devices", "payload_bytes") else float
    return spec.with_(**{parameter: caster(value)})


__all__ = ["CONFIG_DIR_ENV", "ScenarioFile", "load_scenario", "parse_scenario", "resolve_path", "sweep_spec"]
