"""Mutable per-run network state: node motion, energy reservoirs, radio charging."""

from __future__ import annotations

from dataclasses import dataclass

from .config import SimConfig
from .energy import EnergyState
from .events import EventQueue
from .kinematics import NodeKinematics, distance, in_range, snapshot_at
from .linkmodel import LinkAssessment, compute_let, link_stability


@dataclass
class NodeState:
    """One node's physical state. Protocol state lives in the routing engine."""

    kin: NodeKinematics
    energy: EnergyState

    @property
    def node_id(self) -> str:
        return self.kin.node_id


class Network:
    """All nodes plus the event queue, message counters and the energy ledger.

    Owned and mutated exclusively by the single-threaded simulation loop.
    """

    def __init__(self, cfg: SimConfig, nodes: list[NodeState]):
        self.cfg = cfg
        self.nodes: dict[str, NodeState] = {
            n.node_id: n for n in sorted(nodes, key=lambda n: n.node_id)
        }
        if len(self.nodes) != len(nodes):
            raise ValueError("duplicate node ids")
        self.ids: tuple[str, ...] = tuple(self.nodes)
        self.queue = EventQueue()
        self.counters: dict[str, int] = {
            "hello": 0,
            "reply_hello": 0,
            "rreq": 0,
            "rrep": 0,
            "data": 0,
        }
        self.drops: dict[str, int] = {
            "rreq_loop": 0,
            "rreq_dominance": 0,
            "rreq_budget": 0,
        }
        # Energy ledger: intended bit totals plus the clamp shortfall from
        # transactions that hit depletion, for exact reconciliation.
        self.tx_bits = 0
        self.rx_bits = 0
        self.clamped_j = 0.0

    def state(self, node_id: str) -> NodeState:
        return self.nodes[node_id]

    def alive(self, node_id: str) -> bool:
        return self.nodes[node_id].energy.alive

    def in_range(self, u: str, v: str, t: float) -> bool:
        return in_range(
            self.nodes[u].kin, self.nodes[v].kin, t, self.cfg.range_m, self.cfg.terrain
        )

    def dist(self, u: str, v: str, t: float) -> float:
        return distance(self.nodes[u].kin, self.nodes[v].kin, t, self.cfg.terrain)

    def snapshot(self, node_id: str, t: float) -> NodeKinematics:
        return snapshot_at(self.nodes[node_id].kin, t, self.cfg.terrain)

    def charge_tx(self, node_id: str, bits: int, counter: str | None = None) -> bool:
        """Charge a transmission; returns False if it depleted the sender."""
        st = self.nodes[node_id].energy
        cost = bits * self.cfg.energy.tx_j_per_bit
        self.clamped_j += max(0.0, cost - st.residual)
        self.tx_bits += bits
        ok = st.consume_tx(self.cfg.energy, bits)
        if ok and counter is not None:
            self.counters[counter] += 1
        return ok

    def charge_rx(self, node_id: str, bits: int) -> bool:
        """Charge a reception; returns False if the receiver died mid-receive."""
        st = self.nodes[node_id].energy
        cost = bits * self.cfg.energy.rx_j_per_bit
        self.clamped_j += max(0.0, cost - st.residual)
        self.rx_bits += bits
        return st.consume_rx(self.cfg.energy, bits)

    def assess_link(self, sender: str, replier: str, t: float) -> LinkAssessment:
        """Stability of the sender<->replier link as the replier scores it.

        Straight-line LET from the reflected states at t, blended with the
        residual-energy fraction selected by cfg.re_mode.
        """
        let = compute_let(
            self.snapshot(sender, t), self.snapshot(replier, t), t, self.cfg.range_m
        )
        sender_re = self.nodes[sender].energy.residual_fraction()
        replier_re = self.nodes[replier].energy.residual_fraction()
        if self.cfg.re_mode == "receiver":
            re = replier_re
        elif self.cfg.re_mode == "sender":
            re = sender_re
        else:
            re = min(sender_re, replier_re)
        return link_stability(re, let, self.cfg.stability)

    def consumed_by_node(self) -> dict[str, float]:
        return {nid: st.energy.consumed for nid, st in self.nodes.items()}
