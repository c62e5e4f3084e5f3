"""amrsim: deterministic discrete-event simulator for the AMR multipath
routing protocol (link-stability- and residual-energy-aware route selection)
in mobile ad-hoc networks."""

__version__ = "0.1.0"

from .config import MessageBits, NodeSpec, SimConfig
from .energy import EnergyModel, EnergyState
from .kinematics import NodeKinematics, Terrain, distance, in_range, position_at
from .linkmodel import (
    NEVER_EXPIRES,
    LetResult,
    LinkAssessment,
    StabilityConfig,
    compute_let,
    link_stability,
    normalize_let,
)
from .network import Network, NodeState
from .routing import (
    AmrEngine,
    Path,
    RouteCache,
    RouteCacheEntry,
    accept_rreq,
    check_route_cache,
    extend_rreq,
    maintain_routes,
    select_forwarding_set,
)
from .simulator import (
    MetricsReport,
    compute_avg_energy_rate,
    compute_pdr,
    generate_scenario,
    run,
    sweep,
)

__all__ = [
    "AmrEngine",
    "EnergyModel",
    "EnergyState",
    "LetResult",
    "LinkAssessment",
    "MessageBits",
    "MetricsReport",
    "NEVER_EXPIRES",
    "Network",
    "NodeKinematics",
    "NodeSpec",
    "NodeState",
    "Path",
    "RouteCache",
    "RouteCacheEntry",
    "SimConfig",
    "StabilityConfig",
    "Terrain",
    "accept_rreq",
    "check_route_cache",
    "compute_avg_energy_rate",
    "compute_let",
    "compute_pdr",
    "distance",
    "extend_rreq",
    "generate_scenario",
    "in_range",
    "link_stability",
    "maintain_routes",
    "normalize_let",
    "position_at",
    "run",
    "select_forwarding_set",
    "sweep",
]
