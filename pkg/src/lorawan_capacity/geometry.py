"""Spreading-factor geometry of a single-gateway disk cell.

Devices are spread uniformly over a disk; each one uses the lowest SF whose
link budget covers its Okumura-Hata path loss. With a uniform area density
the SF shares are ring-area ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoverageError, DomainError
from .phy import SPREADING_FACTORS

MIN_DISTANCE_KM = 0.1


@dataclass(frozen=True)
class PathLossModel:
    """Okumura-Hata urban model with the small/medium-city mobile correction."""

    frequency_mhz: float = 868.0
    base_height_m: float = 30.0
    mobile_height_m: float = 1.5
    environment: str = "urban-small-city"

    def __post_init__(self):
        if not 150.0 <= self.frequency_mhz <= 1500.0:
            raise DomainError(f"Hata model valid for 150-1500 MHz, got {self.frequency_mhz}")
        if self.base_height_m <= 0 or self.mobile_height_m <= 0:
            raise DomainError("antenna heights must be positive")
        if self.environment != "urban-small-city":
            raise DomainError(f"unsupported environment {self.environment!r}")

    @property
    def slope_db_per_decade(self) -> float:
        return 44.9 - 6.55 * math.log10(self.base_height_m)

    @property
    def intercept_db(self) -> float:
        """Path loss at 1 km."""
        logf = math.log10(self.frequency_mhz)
        a_hm = (1.1 * logf - 0.7) * self.mobile_height_m - (1.56 * logf - 0.8)
        return 69.55 + 26.16 * logf - 13.82 * math.log10(self.base_height_m) - a_hm


def path_loss_db(model: PathLossModel, distance_km: float) -> float:
    if distance_km < MIN_DISTANCE_KM:
        raise DomainError(f"distance {distance_km} km below Hata validity floor {MIN_DISTANCE_KM} km")
    return model.intercept_db + model.slope_db_per_decade * math.log10(distance_km)


def max_range_km(model: PathLossModel, link_budget_db: float) -> float:
    """Distance at which the path loss equals ``link_budget_db``."""
    floor_loss = path_loss_db(model, MIN_DISTANCE_KM)
    if link_budget_db < floor_loss:
        raise DomainError(
            f"budget {link_budget_db:.2f} dB below loss at {MIN_DISTANCE_KM} km ({floor_loss:.2f} dB)"
        )
    return 10 ** ((link_budget_db - model.intercept_db) / model.slope_db_per_decade)


@dataclass(frozen=True)
class SensitivityTable:
    """Receiver sensitivity (dBm) for SF7..SF12 and the device TX power."""

    sensitivities_dbm: tuple[float, ...]
    tx_power_dbm: float = 14.0

    def __post_init__(self):
        sens = tuple(float(s) for s in self.sensitivities_dbm)
        if len(sens) != len(SPREADING_FACTORS):
            raise DomainError("need one sensitivity per SF7..SF12")
        if any(b > a for a, b in zip(sens, sens[1:])):
            raise DomainError("sensitivities must not increase with SF")
        object.__setattr__(self, "sensitivities_dbm", sens)

    @classmethod
    def uniform_steps(cls, sf7_dbm: float, step_db: float, tx_power_dbm: float = 14.0):
        return cls(tuple(sf7_dbm - step_db * k for k in range(6)), tx_power_dbm)

    def link_budget_db(self, sf: int) -> float:
        return self.tx_power_dbm - self.sensitivities_dbm[sf - 7]


@dataclass(frozen=True)
class CellModel:
    """Disk cell of radius ``radius_km`` split into SF rings.

    ``ring_radii_km[k]`` is the outer radius served by SF ``7 + k``;
    ``probabilities[k]`` is the share of devices on that SF.
    """

    radius_km: float
    ring_radii_km: tuple[float, ...]
    probabilities: tuple[float, ...]

    def probability(self, sf: int) -> float:
        return self.probabilities[sf - 7]

    def sf_for_distance(self, distance_km: float) -> int:
        if distance_km > self.radius_km:
            raise DomainError(f"distance {distance_km} km outside cell of radius {self.radius_km} km")
        k = int(np.searchsorted(self.ring_radii_km, distance_km, side="left"))
        return SPREADING_FACTORS[k]


def cell_from_rings(radius_km: float, ring_radii_km) -> CellModel:
    rings = [min(max(float(r), 0.0), radius_km) for r in ring_radii_km]
    rings[-1] = radius_km
    for k in range(1, len(rings)):
        rings[k] = max(rings[k], rings[k - 1])
    r2 = radius_km**2
    probs = []
    inner = 0.0
    for r in rings:
        probs.append((r * r - inner * inner) / r2)
        inner = r
    # Telescoping sum: fix rounding so the shares add to exactly one.
    probs[-1] = 1.0 - math.fsum(probs[:-1])
    return CellModel(radius_km, tuple(rings), tuple(probs))


def build_cell(
    model: PathLossModel, sens: SensitivityTable, radius_km: float | None = None
) -> CellModel:
    """Rings from per-SF ranges; ``radius_km=None`` uses the SF12 range."""
    floor_loss = path_loss_db(model, MIN_DISTANCE_KM)
    ranges = []
    for sf in SPREADING_FACTORS:
        budget = sens.link_budget_db(sf)
        # Below the validity floor losses are clamped to the floor value, so an
        # SF that cannot close the floor loss serves nobody.
        ranges.append(max_range_km(model, budget) if budget >= floor_loss else 0.0)
    if ranges[-1] == 0.0:
        raise CoverageError(radius_km if radius_km is not None else MIN_DISTANCE_KM, 0.0)
    if radius_km is None:
        radius_km = ranges[-1]
    if radius_km <= 0:
        raise DomainError("radius must be positive")
    if radius_km > ranges[-1] * (1 + 1e-12):
        raise CoverageError(radius_km, ranges[-1])
    return cell_from_rings(radius_km, ranges)


def sample_distances(cell: CellModel, n_devices: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Array form of :func:`sample_deployment`: ``(distances_km, sfs)``."""
    if n_devices < 1:
        raise DomainError("need at least one device")
    rng = np.random.default_rng(seed)
    dist = cell.radius_km * np.sqrt(rng.random(n_devices))
    idx = np.searchsorted(np.asarray(cell.ring_radii_km), dist, side="left")
    sfs = np.asarray(SPREADING_FACTORS)[np.minimum(idx, len(SPREADING_FACTORS) - 1)]
    return dist, sfs


def sample_deployment(cell: CellModel, n_devices: int, seed: int) -> list[tuple[float, int]]:
    dist, sfs = sample_distances(cell, n_devices, seed)
    return list(zip(dist.tolist(), sfs.tolist()))


URBAN_MODEL = PathLossModel(868.0, 30.0, 1.5)
URBAN_SENSITIVITY = SensitivityTable.uniform_steps(-123.0, 2.5, tx_power_dbm=14.0)


def preset_cell(name: str) -> CellModel:
    """Named cell calibrations.

    ``paper-urban`` spaces sensitivities 2.5 dB apart with a 30 m gateway mast
    and sets the radius to the SF12 range. ``single-ring`` is a 1 km cell that
    SF7 covers entirely.
    """
    if name == "paper-urban":
        return build_cell(URBAN_MODEL, URBAN_SENSITIVITY)
    if name == "single-ring":
        return build_cell(URBAN_MODEL, URBAN_SENSITIVITY, radius_km=1.0)
    raise DomainError(f"unknown cell preset {name!r}; known: paper-urban, single-ring")


CELL_PRESETS = ("paper-urban", "single-ring")
