"""Full experiment parameterization shared by the network, protocol and engine."""

from __future__ import annotations

from dataclasses import dataclass, field

from .energy import EnergyModel
from .kinematics import Terrain
from .linkmodel import StabilityConfig

MODE_MULTIPATH = "multipath"
MODE_SINGLE = "single"

RE_MODES = ("receiver", "sender", "min")


@dataclass(frozen=True)
class MessageBits:
    """Wire sizes of every message type, in bits."""

    hello: int = 128
    reply_hello: int = 128
    rreq: int = 256
    rrep: int = 256
    data: int = 1024

    def __post_init__(self) -> None:
        for name in ("hello", "reply_hello", "rreq", "rrep", "data"):
            if getattr(self, name) < 0:
                raise ValueError(f"message size {name} must be non-negative")


@dataclass(frozen=True)
class NodeSpec:
    """Explicit node table row for fixed scenarios."""

    node_id: str
    x: float
    y: float
    heading: float
    speed: float | None = None  # None: use the scenario-wide speed
    residual_percent: float = 100.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.residual_percent <= 100.0):
            raise ValueError("residual_percent must lie in [0, 100]")


@dataclass(frozen=True)
class SimConfig:
    """Everything a run needs; equal configs with equal seeds reproduce bit-identically."""

    terrain: Terrain = field(default_factory=lambda: Terrain(500.0, 500.0))
    range_m: float = 200.0
    node_count: int = 11
    speed_mps: float = 10.0
    initial_energy_j: float = 5.0
    energy: EnergyModel = field(default_factory=EnergyModel)
    stability: StabilityConfig = field(default_factory=StabilityConfig)
    re_mode: str = "receiver"
    bits: MessageBits = field(default_factory=MessageBits)
    cache_ttl_s: float = 10.0
    per_hop_latency_s: float = 0.001
    rreq_window_s: float | None = None  # None: 2 * node count * per-hop latency
    max_paths: int = 3
    hop_budget: int | None = None  # None: node count
    packets_per_flow: int = 100
    packet_interval_s: float = 0.1
    flows: tuple[tuple[str, str], ...] | None = None
    flow_count: int | None = None  # None: one random flow per 4 nodes
    flow_spacing_s: float = 1.0
    duration_s: float = 60.0
    seed: int = 1
    mode: str = MODE_MULTIPATH
    nodes: tuple[NodeSpec, ...] | None = None

    def __post_init__(self) -> None:
        if self.range_m <= 0:
            raise ValueError("range_m must be positive")
        if self.node_count < 2:
            raise ValueError("node_count must be at least 2")
        if self.speed_mps < 0:
            raise ValueError("speed_mps must be non-negative")
        if self.initial_energy_j <= 0:
            raise ValueError("initial_energy_j must be positive")
        if self.re_mode not in RE_MODES:
            raise ValueError(f"re_mode must be one of {RE_MODES}")
        if self.cache_ttl_s <= 0:
            raise ValueError("cache_ttl_s must be positive")
        if self.per_hop_latency_s < 0:
            raise ValueError("per_hop_latency_s must be non-negative")
        if self.rreq_window_s is not None and self.rreq_window_s <= 0:
            raise ValueError("rreq_window_s must be positive")
        if self.per_hop_latency_s == 0 and self.rreq_window_s is None:
            raise ValueError("zero per_hop_latency_s requires an explicit rreq_window_s")
        if self.max_paths < 1:
            raise ValueError("max_paths must be at least 1")
        if self.hop_budget is not None and self.hop_budget < 1:
            raise ValueError("hop_budget must be at least 1")
        if self.packets_per_flow < 0:
            raise ValueError("packets_per_flow must be non-negative")
        if self.packet_interval_s < 0:
            raise ValueError("packet_interval_s must be non-negative")
        if self.flow_count is not None and self.flow_count < 0:
            raise ValueError("flow_count must be non-negative")
        if self.flow_spacing_s < 0:
            raise ValueError("flow_spacing_s must be non-negative")
        if self.duration_s <= 0:
            raise ValueError("duration_s must be positive")
        if self.mode not in (MODE_MULTIPATH, MODE_SINGLE):
            raise ValueError(f"mode must be '{MODE_MULTIPATH}' or '{MODE_SINGLE}'")
        if self.nodes is not None and len(self.nodes) != self.node_count:
            raise ValueError("explicit node table length must equal node_count")

    @property
    def effective_window_s(self) -> float:
        if self.rreq_window_s is not None:
            return self.rreq_window_s
        return 2.0 * self.node_count * self.per_hop_latency_s

    @property
    def effective_hop_budget(self) -> int:
        return self.hop_budget if self.hop_budget is not None else self.node_count

    @property
    def effective_flow_count(self) -> int:
        # Offered load scales with density so per-node load stays comparable
        # across a density sweep.
        if self.flow_count is not None:
            return self.flow_count
        return max(1, self.node_count // 4)
