"""Scenario sweeps over episodes, written as raw per-episode CSV rows."""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..mobility import MobilityConfig, MobilityModel
from .config import EpisodeConfig
from .episode import EpisodeLog, Models, run_episode

CSV_COLUMNS = ["family", "scenario", "value", "episode", "seed", "mean_error", "si", "final_rho", "final_center_error"]


@dataclass(frozen=True)
class Scenario:
    family: str
    value: float | str
    config: EpisodeConfig

    @property
    def name(self) -> str:
        return f"{self.family}={self.value}"


def _moving(base: EpisodeConfig, speed: float = 1.0, waypoints: int = 100) -> EpisodeConfig:
    mob = MobilityConfig(MobilityModel.SLAW, waypoints, base.mobility.area_side, speed)
    return base.replace(mobility=mob)


def scenario_matrix(base: EpisodeConfig = EpisodeConfig(), waypoints=(100, 500, 1900),
                    speeds=(0.0, 0.5, 1.0, 2.0), altitudes=(50.0, 100.0, 150.0)) -> list[Scenario]:
    out = []
    for w in waypoints:
        out.append(Scenario("waypoints", w, _moving(base, waypoints=w)))
    for flag in (False, True):
        noise = dataclasses.replace(base.noise, rubble_enabled=flag)
        out.append(Scenario("rubble", "on" if flag else "off", _moving(base).replace(noise=noise)))
    for v in speeds:
        out.append(Scenario("speed", v, _moving(base, speed=v)))
    for h in altitudes:
        out.append(Scenario("altitude", h, _moving(base).replace(trajectory=base.trajectory.replace(h=h))))
    static = MobilityConfig(MobilityModel.STATIC, 1, base.mobility.area_side, 0.0)
    out.append(Scenario("static_loop", "static", base.replace(mobility=static)))
    return out


def episode_row(scenario: Scenario, episode: int, log: EpisodeLog) -> dict:
    last = log.records[-1]
    center_err = float(np.linalg.norm(last.truth.mean(axis=0) - last.params.center))
    return {
        "family": scenario.family,
        "scenario": scenario.name,
        "value": scenario.value,
        "episode": episode,
        "seed": log.config.seed,
        "mean_error": float(log.mean_errors.mean()),
        "si": float(np.mean([r.error.si for r in log.records])),
        "final_rho": last.params.rho,
        "final_center_error": center_err,
    }


def evaluate(scenarios: list[Scenario], episodes: int = 5, seed: int = 0, models: Models | None = None,
             out: str | Path | None = None) -> list[dict]:
    """Run ``episodes`` episodes per scenario; episode ``k`` uses seed ``seed + k``.

    Paired seeds across scenarios make on/off comparisons like-for-like.
    Models are loaded once from the first scenario's config when not given;
    a missing checkpoint raises a configuration error before any episode runs.
    """
    if models is None and scenarios:
        models = Models.for_config(scenarios[0].config)
    rows = []
    for sc in scenarios:
        for k in range(episodes):
            log = run_episode(sc.config.replace(seed=seed + k), models)
            rows.append(episode_row(sc, k, log))
    if out is not None:
        write_rows(rows, out)
    return rows


def write_rows(rows: list[dict], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})


def medians(rows: list[dict], key: str) -> dict[str, float]:
    groups: dict[str, list[float]] = {}
    for r in rows:
        groups.setdefault(r["scenario"], []).append(r[key])
    return {k: float(np.median(v)) for k, v in groups.items()}
