"""Scenario files: a JSON document mirroring SimConfig, schema-validated.

Unknown keys are rejected; every field has a documented default (the
defaults reproduce the standard 500 m x 500 m / 200 m / 5 J setup).
"""

from __future__ import annotations

import json
from pathlib import Path as FilePath
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .config import MessageBits, NodeSpec, SimConfig
from .energy import EnergyModel
from .kinematics import Terrain
from .linkmodel import StabilityConfig


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario document."""


class TerrainDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    width: float = Field(500.0, gt=0)
    height: float = Field(500.0, gt=0)


class EnergyDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    tx_j_per_bit: float = Field(0.312e-6, gt=0)
    rx_j_per_bit: float = Field(0.234e-6, gt=0)


class StabilityDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    w_energy: float = Field(0.5, ge=0)
    w_let: float = Field(0.5, ge=0)
    let_cap_s: float = Field(100.0, gt=0)
    theta_high: float = Field(0.7, gt=0, le=1)
    theta_moderate: float = Field(0.4, gt=0, lt=1)


class MessageBitsDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    hello: int = Field(128, ge=0)
    reply_hello: int = Field(128, ge=0)
    rreq: int = Field(256, ge=0)
    rrep: int = Field(256, ge=0)
    data: int = Field(1024, ge=0)


class NodeDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    id: str
    x: float
    y: float
    heading: float
    speed: float | None = Field(None, ge=0)
    residual_percent: float = Field(100.0, ge=0, le=100)


class Scenario(BaseModel):
    """Top-level scenario document."""

    model_config = ConfigDict(extra="forbid")

    terrain: TerrainDoc = Field(default_factory=TerrainDoc)
    range_m: float = Field(200.0, gt=0)
    node_count: int = Field(11, ge=2)
    speed_mps: float = Field(10.0, ge=0)
    initial_energy_j: float = Field(5.0, gt=0)
    energy: EnergyDoc = Field(default_factory=EnergyDoc)
    stability: StabilityDoc = Field(default_factory=StabilityDoc)
    re_mode: Literal["receiver", "sender", "min"] = "receiver"
    message_bits: MessageBitsDoc = Field(default_factory=MessageBitsDoc)
    cache_ttl_s: float = Field(10.0, gt=0)
    per_hop_latency_s: float = Field(0.001, ge=0)
    rreq_window_s: float | None = Field(None, gt=0)
    max_paths: int = Field(3, ge=1)
    hop_budget: int | None = Field(None, ge=1)
    packets_per_flow: int = Field(100, ge=0)
    packet_interval_s: float = Field(0.1, ge=0)
    flows: list[tuple[str, str]] | None = None
    flow_count: int | None = Field(None, ge=0)
    flow_spacing_s: float = Field(1.0, ge=0)
    duration_s: float = Field(60.0, gt=0)
    seed: int = 1
    mode: Literal["multipath", "single"] = "multipath"
    nodes: list[NodeDoc] | None = None

    def to_sim_config(self) -> SimConfig:
        try:
            return SimConfig(
                terrain=Terrain(self.terrain.width, self.terrain.height),
                range_m=self.range_m,
                node_count=self.node_count,
                speed_mps=self.speed_mps,
                initial_energy_j=self.initial_energy_j,
                energy=EnergyModel(self.energy.tx_j_per_bit, self.energy.rx_j_per_bit),
                stability=StabilityConfig(
                    w_energy=self.stability.w_energy,
                    w_let=self.stability.w_let,
                    let_cap_s=self.stability.let_cap_s,
                    theta_high=self.stability.theta_high,
                    theta_moderate=self.stability.theta_moderate,
                ),
                re_mode=self.re_mode,
                bits=MessageBits(
                    hello=self.message_bits.hello,
                    reply_hello=self.message_bits.reply_hello,
                    rreq=self.message_bits.rreq,
                    rrep=self.message_bits.rrep,
                    data=self.message_bits.data,
                ),
                cache_ttl_s=self.cache_ttl_s,
                per_hop_latency_s=self.per_hop_latency_s,
                rreq_window_s=self.rreq_window_s,
                max_paths=self.max_paths,
                hop_budget=self.hop_budget,
                packets_per_flow=self.packets_per_flow,
                packet_interval_s=self.packet_interval_s,
                flows=tuple((s, d) for s, d in self.flows) if self.flows is not None else None,
                flow_count=self.flow_count,
                flow_spacing_s=self.flow_spacing_s,
                duration_s=self.duration_s,
                seed=self.seed,
                mode=self.mode,
                nodes=tuple(
                    NodeSpec(n.id, n.x, n.y, n.heading, n.speed, n.residual_percent)
                    for n in self.nodes
                )
                if self.nodes is not None
                else None,
            )
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc

    @classmethod
    def from_sim_config(cls, cfg: SimConfig) -> "Scenario":
        return cls(
            terrain=TerrainDoc(width=cfg.terrain.width, height=cfg.terrain.height),
            range_m=cfg.range_m,
            node_count=cfg.node_count,
            speed_mps=cfg.speed_mps,
            initial_energy_j=cfg.initial_energy_j,
            energy=EnergyDoc(
                tx_j_per_bit=cfg.energy.tx_j_per_bit, rx_j_per_bit=cfg.energy.rx_j_per_bit
            ),
            stability=StabilityDoc(
                w_energy=cfg.stability.w_energy,
                w_let=cfg.stability.w_let,
                let_cap_s=cfg.stability.let_cap_s,
                theta_high=cfg.stability.theta_high,
                theta_moderate=cfg.stability.theta_moderate,
            ),
            re_mode=cfg.re_mode,
            message_bits=MessageBitsDoc(
                hello=cfg.bits.hello,
                reply_hello=cfg.bits.reply_hello,
                rreq=cfg.bits.rreq,
                rrep=cfg.bits.rrep,
                data=cfg.bits.data,
            ),
            cache_ttl_s=cfg.cache_ttl_s,
            per_hop_latency_s=cfg.per_hop_latency_s,
            rreq_window_s=cfg.rreq_window_s,
            max_paths=cfg.max_paths,
            hop_budget=cfg.hop_budget,
            packets_per_flow=cfg.packets_per_flow,
            packet_interval_s=cfg.packet_interval_s,
            flows=[(s, d) for s, d in cfg.flows] if cfg.flows is not None else None,
            flow_count=cfg.flow_count,
            flow_spacing_s=cfg.flow_spacing_s,
            duration_s=cfg.duration_s,
            seed=cfg.seed,
            mode=cfg.mode,
            nodes=[
                NodeDoc(
                    id=n.node_id,
                    x=n.x,
                    y=n.y,
                    heading=n.heading,
                    speed=n.speed,
                    residual_percent=n.residual_percent,
                )
                for n in cfg.nodes
            ]
            if cfg.nodes is not None
            else None,
        )


def _format_validation_error(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<document>"
        parts.append(f"{loc}: {err['msg']}")
    return "invalid scenario: " + "; ".join(parts)


def parse_scenario(document: dict) -> Scenario:
    """Validate a raw JSON document; ScenarioError names the offending key."""
    try:
        scenario = Scenario.model_validate(document)
    except ValidationError as exc:
        raise ScenarioError(_format_validation_error(exc)) from exc
    # Surface SimConfig-level consistency errors (cross-field rules) early.
    scenario.to_sim_config()
    return scenario


def load_scenario(path: str | FilePath) -> Scenario:
    """Read and validate a scenario file."""
    raw = FilePath(path).read_text(encoding="utf-8")
    try:
        document = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid scenario JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ScenarioError("scenario document must be a JSON object")
    return parse_scenario(document)


def dump_scenario(scenario: Scenario) -> str:
    """Serialize a scenario to JSON; parses back to an equal scenario."""
    return json.dumps(scenario.model_dump(), indent=2, sort_keys=False) + "\n"
