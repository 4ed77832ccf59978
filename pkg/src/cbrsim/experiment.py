"""Experiment harness: single runs, paired sweeps, and CSV emission."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .config import ScenarioConfig
from .engine import Simulator
from .metrics import RunMetrics, pdr
from .scenario import build_simulation

CSV_COLUMNS = ("node_count", "mode", "seed", "pdr", "sent", "delivered",
               "drop_no_route", "drop_route_error", "drop_dead_forwarder",
               "drop_dead_sender", "reformations", "head_changes", "row_type")


def run_scenario(config: ScenarioConfig) -> RunMetrics:
    config.validate()
    sim = build_simulation(config)
    return sim.run_until(config.duration_s)


def run_scenario_sim(config: ScenarioConfig) -> Simulator:
    """Like run_scenario but returns the whole simulator (for snapshots and
    trace inspection)."""
    config.validate()
    sim = build_simulation(config)
    sim.run_until(config.duration_s)
    return sim


@dataclass
class CellResult:
    node_count: int
    mode: str
    seeds: List[int]
    metrics: List[RunMetrics]

    @property
    def pdrs(self) -> List[Optional[float]]:
        return [pdr(m) for m in self.metrics]

    @property
    def mean_pdr(self) -> Optional[float]:
        values = [p for p in self.pdrs if p is not None]
        if not values:
            return None
        return sum(values) / len(values)


@dataclass
class SweepResult:
    cells: Dict[Tuple[int, str], CellResult] = field(default_factory=dict)

    def mean_pdr(self, node_count: int, mode: str) -> Optional[float]:
        return self.cells[(node_count, mode)].mean_pdr


def sweep(node_counts: Sequence[int], modes: Sequence[str], replicates: int,
          base_config: ScenarioConfig) -> SweepResult:
    """Run every (node_count, mode) cell over `replicates` seeds.

    Both modes of a cell share the same seeds, so placement, waypoints, and
    traffic randomness are identical — a paired comparison.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    result = SweepResult()
    for n in node_counts:
        for mode in modes:
            seeds, metrics = [], []
            for r in range(replicates):
                seed = base_config.seed + r
                config = replace(base_config, node_count=n, protocol_mode=mode, seed=seed)
                seeds.append(seed)
                metrics.append(run_scenario(config))
            result.cells[(n, mode)] = CellResult(n, mode, seeds, metrics)
    return result


def _fmt_pdr(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


def sweep_to_csv(result: SweepResult) -> str:
    """One row per run, plus a flagged mean row per cell. Column order is
    fixed (see CSV_COLUMNS)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for (n, mode), cell in result.cells.items():
        for seed, m in zip(cell.seeds, cell.metrics):
            writer.writerow([n, mode, seed, _fmt_pdr(pdr(m)), m.packets_sent,
                             m.packets_delivered, m.dropped["no-route"],
                             m.dropped["route-error"], m.dropped["dead-forwarder"],
                             m.dropped["dead-sender"], m.cluster_reformations,
                             m.head_changes, "run"])
        totals = cell.metrics

        def mean(getter) -> str:
            return f"{sum(getter(m) for m in totals) / len(totals):.3f}"

        writer.writerow([n, mode, "", _fmt_pdr(cell.mean_pdr),
                         mean(lambda m: m.packets_sent),
                         mean(lambda m: m.packets_delivered),
                         mean(lambda m: m.dropped["no-route"]),
                         mean(lambda m: m.dropped["route-error"]),
                         mean(lambda m: m.dropped["dead-forwarder"]),
                         mean(lambda m: m.dropped["dead-sender"]),
                         mean(lambda m: m.cluster_reformations),
                         mean(lambda m: m.head_changes), "mean"])
    return out.getvalue()


def write_sweep_csv(result: SweepResult, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(sweep_to_csv(result))
