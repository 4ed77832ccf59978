"""Scenario configuration: defaults, validation, and the flat key=value file format."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Optional


class ConfigError(ValueError):
    """Raised with the offending key named in the message."""


@dataclass
class ScenarioConfig:
    # Scenario shape
    node_count: int = 30
    duration_s: float = 300.0
    seed: int = 1
    protocol_mode: str = "ecbrp"  # "cbrp" | "ecbrp"

    # Arena and radio
    area_width_m: float = 400.0
    area_height_m: float = 400.0
    tx_range_m: float = 80.0

    # Mobility
    node_speed_mps: float = 20.0
    pause_time_s: float = 100.0
    mobility_tick_s: float = 1.0

    # Energy
    initial_energy: float = 600.0
    transmit_cost: float = 1.0
    head_transmit_cost_factor: float = 1.0

    # Weight metric
    w1: float = 0.7
    w2: float = 0.2
    w3: float = 0.05
    w4: float = 0.05
    ideal_degree: int = 2
    p_v_mode: str = "ch_time"  # "ch_time" | "energy_consumed"

    # Clustering timers
    hello_interval_s: float = 1.0
    stale_timeout_intervals: float = 3.0
    undecided_timer_intervals: float = 2.0

    # Routing
    max_retries: int = 2
    rreq_timeout_s: float = 2.0
    route_cache: bool = False

    # Traffic
    flows: Optional[int] = None  # None -> 1 flow per 10 nodes, min 1
    packets_per_second: float = 4.0
    traffic_start_s: float = 5.0

    # Radio timing
    propagation_delay_s: float = 0.0

    def effective_flows(self) -> int:
        if self.flows is not None:
            return self.flows
        return max(1, self.node_count // 10)

    def stale_timeout_s(self) -> float:
        return self.stale_timeout_intervals * self.hello_interval_s

    def undecided_timer_s(self) -> float:
        return self.undecided_timer_intervals * self.hello_interval_s

    def validate(self) -> None:
        if self.protocol_mode not in ("cbrp", "ecbrp"):
            raise ConfigError(f"protocol_mode: must be 'cbrp' or 'ecbrp', got {self.protocol_mode!r}")
        if self.effective_flows() > 0 and self.node_count < 2:
            raise ConfigError(f"node_count: routing requires at least 2 nodes, got {self.node_count}")
        if self.node_count < 1:
            raise ConfigError(f"node_count: must be >= 1, got {self.node_count}")
        for key in ("area_width_m", "area_height_m", "tx_range_m", "hello_interval_s",
                    "mobility_tick_s", "transmit_cost", "initial_energy"):
            if getattr(self, key) <= 0:
                raise ConfigError(f"{key}: must be positive, got {getattr(self, key)}")
        for key in ("duration_s", "node_speed_mps", "pause_time_s", "w1", "w2", "w3", "w4",
                    "packets_per_second", "rreq_timeout_s", "propagation_delay_s",
                    "traffic_start_s", "head_transmit_cost_factor"):
            if getattr(self, key) < 0:
                raise ConfigError(f"{key}: must be non-negative, got {getattr(self, key)}")
        if self.ideal_degree < 0:
            raise ConfigError(f"ideal_degree: must be >= 0, got {self.ideal_degree}")
        if self.p_v_mode not in ("ch_time", "energy_consumed"):
            raise ConfigError(f"p_v_mode: must be 'ch_time' or 'energy_consumed', got {self.p_v_mode!r}")
        if self.flows is not None and self.flows < 0:
            raise ConfigError(f"flows: must be >= 0, got {self.flows}")
        if self.max_retries < 0:
            raise ConfigError(f"max_retries: must be >= 0, got {self.max_retries}")


_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key not in _FIELD_TYPES:
        raise ConfigError(f"{key}: unknown configuration key")
    ftype = _FIELD_TYPES[key]
    if key == "flows":
        if raw.lower() in ("none", ""):
            return None
        return int(raw)
    if ftype == "bool" or key == "route_cache":
        if raw.lower() in ("1", "true", "on", "yes"):
            return True
        if raw.lower() in ("0", "false", "off", "no"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    if ftype == "int":
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}")
    if ftype == "float":
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {raw!r}")
    return raw


def apply_overrides(config: ScenarioConfig, overrides: dict) -> ScenarioConfig:
    for key, value in overrides.items():
        if not hasattr(config, key):
            raise ConfigError(f"{key}: unknown configuration key")
        setattr(config, key, value)
    return config


def load_config_file(path: str, base: Optional[ScenarioConfig] = None) -> ScenarioConfig:
    """Parse a flat key=value file, one key per line; '#' starts a comment."""
    config = base if base is not None else ScenarioConfig()
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
            key, raw = line.split("=", 1)
            key = key.strip()
            setattr(config, key, _parse_value(key, raw))
    return config
