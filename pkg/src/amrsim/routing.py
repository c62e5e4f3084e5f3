"""AMR protocol state machine.

Route-cache lookup, Hello-based neighbor discovery, threshold-gated route
establishment with duplicate-RREQ dominance filtering, RREP return,
round-robin multipath data distribution, and cache maintenance. The pure
per-step rules live at module level; the event-driven orchestration is
`AmrEngine`, which owns all protocol state and drives a `Network`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .config import MODE_SINGLE, SimConfig
from .events import (
    CACHE_EXPIRY,
    DATA_START,
    FLOW_START,
    MESSAGE_DELIVERY,
    WINDOW_CLOSE,
    Event,
)
from .kinematics import NodeKinematics
from .linkmodel import LinkAssessment, StabilityConfig
from .network import Network


class DeadEndError(ValueError):
    """A discovery wave reached a node with no neighbors to forward through."""


class RouteLoopError(ValueError):
    """Extending an RREQ would revisit a node already on its partial path."""


class NodeDeadError(ValueError):
    """The requested operation needs a node that has depleted its energy."""


# ---------------------------------------------------------------------------
# Domain types


@dataclass(frozen=True)
class Path:
    """A discovered simple route; stability is the product of its link scores."""

    nodes: tuple[str, ...]
    stability: float
    link_stabilities: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("path must be simple (no repeated nodes)")

    @property
    def hops(self) -> int:
        return len(self.nodes) - 1

    @property
    def source(self) -> str:
        return self.nodes[0]

    @property
    def destination(self) -> str:
        return self.nodes[-1]


@dataclass
class RouteCacheEntry:
    entry_id: int
    source: str
    destination: str
    path: Path
    created_at: float
    expires_at: float


class RouteCache:
    """Per-source store of discovered paths with expiry timestamps."""

    def __init__(self) -> None:
        self.entries: dict[int, RouteCacheEntry] = {}
        self._next_id = 0

    def add(self, source: str, destination: str, path: Path, created_at: float, ttl: float) -> RouteCacheEntry:
        entry = RouteCacheEntry(
            self._next_id, source, destination, path, created_at, created_at + ttl
        )
        self._next_id += 1
        self.entries[entry.entry_id] = entry
        return entry

    def discard(self, entry_id: int) -> None:
        self.entries.pop(entry_id, None)


def check_route_cache(
    cache: RouteCache, source: str, destination: str, now: float
) -> tuple[int, list[int]]:
    """Ids of all unexpired cached entries for (source, destination), with count."""
    ids = [
        e.entry_id
        for e in cache.entries.values()
        if e.source == source and e.destination == destination and now < e.expires_at
    ]
    return len(ids), ids


def maintain_routes(cache: RouteCache, now: float) -> RouteCache:
    """Drop every entry whose expiry has passed; others are untouched."""
    for entry_id in [e.entry_id for e in cache.entries.values() if e.expires_at <= now]:
        cache.discard(entry_id)
    return cache


# ---------------------------------------------------------------------------
# Control messages


@dataclass(frozen=True)
class HelloMsg:
    sender: str
    kinematics: NodeKinematics  # position/speed/heading snapshot at send time
    sent_at: float


@dataclass(frozen=True)
class ReplyHelloMsg:
    responder: str
    link_stability: float
    assessment: LinkAssessment


@dataclass(frozen=True)
class RreqMsg:
    request_id: int
    source: str
    next: str
    partial_path: tuple[str, ...]
    partial_path_stability: float
    link_stabilities: tuple[float, ...] = ()


@dataclass(frozen=True)
class RrepMsg:
    path: Path


def select_forwarding_set(
    neighbors: Sequence[tuple[str, float]], cfg: StabilityConfig
) -> list[str]:
    """Neighbors a discovery wave continues through.

    Best neighbor at or above theta_high: just that one. At or above
    theta_moderate: the top two (or one, if only one neighbor exists).
    Below: every neighbor. Ties break toward the smaller node id.
    """
    if not neighbors:
        raise DeadEndError("no neighbors to forward through")
    ranked = sorted(neighbors, key=lambda item: (-item[1], item[0]))
    best = ranked[0][1]
    if best >= cfg.theta_high:
        chosen = ranked[:1]
    elif best >= cfg.theta_moderate:
        chosen = ranked[:2]
    else:
        chosen = ranked
    return [node_id for node_id, _ in chosen]


def extend_rreq(rreq: RreqMsg, via_link_stability: float, next_node: str) -> RreqMsg:
    """Append one hop to an RREQ, multiplying its partial-path stability."""
    if next_node in rreq.partial_path:
        raise RouteLoopError(f"{next_node} already on partial path")
    return RreqMsg(
        request_id=rreq.request_id,
        source=rreq.source,
        next=next_node,
        partial_path=rreq.partial_path + (next_node,),
        partial_path_stability=rreq.partial_path_stability * via_link_stability,
        link_stabilities=rreq.link_stabilities + (via_link_stability,),
    )


def accept_rreq(best_seen: dict[int, float], rreq: RreqMsg) -> bool:
    """Duplicate-suppression rule: accept the first RREQ per request id, then
    only strictly better ones; best-seen updates on every acceptance."""
    prev = best_seen.get(rreq.request_id)
    if prev is not None and rreq.partial_path_stability <= prev:
        return False
    best_seen[rreq.request_id] = rreq.partial_path_stability
    return True


# ---------------------------------------------------------------------------
# Event payloads


@dataclass(frozen=True)
class FlowStartEv:
    flow_id: int


@dataclass(frozen=True)
class RreqDeliverEv:
    request_id: int
    rreq: RreqMsg


@dataclass(frozen=True)
class WindowCloseEv:
    request_id: int


@dataclass(frozen=True)
class RrepDeliverEv:
    request_id: int
    path: Path
    node_index: int


@dataclass(frozen=True)
class DataStartEv:
    flow_id: int


@dataclass(frozen=True)
class PacketDepartEv:
    flow_id: int
    packet_index: int
    path_index: int


@dataclass(frozen=True)
class PacketDeliverEv:
    flow_id: int
    packet_index: int
    path_index: int
    node_index: int


@dataclass(frozen=True)
class CacheExpiryEv:
    node_id: str
    entry_id: int


# ---------------------------------------------------------------------------
# Engine bookkeeping


@dataclass
class PathUsage:
    path: Path
    assigned: int = 0
    delivered: int = 0
    lost: int = 0


@dataclass
class Flow:
    flow_id: int
    source: str
    destination: str
    offered: int
    start_time: float
    delivered: int = 0
    lost: int = 0
    route_failed: bool = False
    cache_hit: bool = False
    data_start: float | None = None
    paths: list[PathUsage] = field(default_factory=list)
    done: bool = False

    def settled(self) -> int:
        return self.delivered + self.lost


@dataclass
class Discovery:
    request_id: int
    source: str
    destination: str
    started_at: float
    window_close: float
    flow_id: int | None = None
    enlisted: dict[tuple[str, ...], Path] = field(default_factory=dict)
    memo: dict[str, list[tuple[str, LinkAssessment]]] = field(default_factory=dict)
    closed: bool = False
    pending_rreps: int = 0
    result_paths: list[Path] = field(default_factory=list)
    failed: bool = False
    done: bool = False


@dataclass
class DiscoveryOutcome:
    """Result of one route establishment; failed is distinct from empty success."""

    paths: list[Path]
    failed: bool
    request_id: int


class AmrEngine:
    """Protocol orchestration over a Network, driven by the shared event queue."""

    def __init__(self, net: Network):
        self.net = net
        self.cfg: SimConfig = net.cfg
        self.caches: dict[str, RouteCache] = {nid: RouteCache() for nid in net.ids}
        self.best_seen: dict[str, dict[int, float]] = {nid: {} for nid in net.ids}
        self.flows: dict[int, Flow] = {}
        self.discoveries: dict[int, Discovery] = {}
        self.paths_discovered = 0
        self.route_failures = 0
        self.clock = 0.0
        self._next_flow = 0
        self._next_request = 0

    # -- public operations ---------------------------------------------------

    def discover_neighbors(self, node_id: str, now: float) -> list[tuple[str, LinkAssessment]]:
        """One Hello round: charge the broadcast and every reply, return the
        alive in-range neighbors with their link assessments."""
        if not self.net.alive(node_id):
            raise NodeDeadError(f"{node_id} cannot broadcast: energy depleted")
        return self._hello_exchange(node_id, now)

    def establish_routes(self, source: str, destination: str, now: float) -> DiscoveryOutcome:
        """Run one discovery wave to completion and return the paths that made
        it back to the source (which caches them)."""
        if source == destination:
            raise ValueError("source and destination must differ")
        if not self.net.alive(source):
            raise NodeDeadError(f"{source} cannot start discovery: energy depleted")
        discovery = self._start_discovery(source, destination, now, flow_id=None)
        self.drain(stop=lambda: discovery.done)
        return DiscoveryOutcome(
            paths=list(discovery.result_paths),
            failed=discovery.failed,
            request_id=discovery.request_id,
        )

    def distribute_data(self, paths: Sequence[Path], packets: int, now: float) -> Flow:
        """Round-robin `packets` across `paths` (stability-descending) and run
        the forwarding to completion."""
        if not paths:
            raise ValueError("at least one path is required")
        if packets < 0:
            raise ValueError("packet count must be non-negative")
        flow = self._new_flow(paths[0].source, paths[0].destination, packets, now)
        self._start_data(flow, list(paths), now)
        self.drain(stop=lambda: flow.done)
        return flow

    def amr_send(
        self, source: str, destination: str, packets: int, now: float
    ) -> tuple[Flow, dict[str, int]]:
        """Top-level send: cached routes if any, otherwise discovery, then
        data distribution and cache maintenance. Returns the flow record and
        the control-message counts the call generated."""
        before = dict(self.net.counters)
        flow = self._new_flow(source, destination, packets, now)
        self.net.queue.push(now, FLOW_START, FlowStartEv(flow.flow_id))
        self.drain(stop=lambda: flow.done)
        control = {
            k: self.net.counters[k] - before[k] for k in ("hello", "reply_hello", "rreq", "rrep")
        }
        return flow, control

    def start_flow(self, source: str, destination: str, packets: int, at: float) -> Flow:
        """Schedule a flow without draining (used by the simulation loop)."""
        flow = self._new_flow(source, destination, packets, at)
        self.net.queue.push(at, FLOW_START, FlowStartEv(flow.flow_id))
        return flow

    def drain(self, until: float | None = None, stop: Callable[[], bool] | None = None) -> None:
        """Process queued events in (time, sequence) order.

        Stops when the queue empties, the next event would exceed `until`,
        or `stop()` turns true between events.
        """
        queue = self.net.queue
        while queue:
            if stop is not None and stop():
                return
            if until is not None and queue.peek_time() > until:
                return
            event = queue.pop()
            self.clock = max(self.clock, event.time)
            self._dispatch(event)

    # -- event dispatch ------------------------------------------------------

    def _dispatch(self, event: Event) -> None:
        payload = event.payload
        t = event.time
        if isinstance(payload, FlowStartEv):
            self._on_flow_start(self.flows[payload.flow_id], t)
        elif isinstance(payload, RreqDeliverEv):
            self._on_rreq_deliver(payload, t)
        elif isinstance(payload, WindowCloseEv):
            self._on_window_close(self.discoveries[payload.request_id], t)
        elif isinstance(payload, RrepDeliverEv):
            self._on_rrep_deliver(payload, t)
        elif isinstance(payload, DataStartEv):
            self._on_data_start(self.flows[payload.flow_id], t)
        elif isinstance(payload, PacketDepartEv):
            self._on_packet_depart(payload, t)
        elif isinstance(payload, PacketDeliverEv):
            self._on_packet_deliver(payload, t)
        elif isinstance(payload, CacheExpiryEv):
            self.caches[payload.node_id].discard(payload.entry_id)
        else:
            raise TypeError(f"unknown event payload {payload!r}")

    # -- flow lifecycle ------------------------------------------------------

    def _new_flow(self, source: str, destination: str, packets: int, at: float) -> Flow:
        if source == destination:
            raise ValueError("source and destination must differ")
        flow = Flow(self._next_flow, source, destination, packets, at)
        self._next_flow += 1
        self.flows[flow.flow_id] = flow
        return flow

    def _on_flow_start(self, flow: Flow, t: float) -> None:
        if not self.net.alive(flow.source):
            self._fail_flow(flow)
            return
        count, entry_ids = check_route_cache(
            self.caches[flow.source], flow.source, flow.destination, t
        )
        if count:
            cache = self.caches[flow.source]
            paths = [cache.entries[eid].path for eid in entry_ids]
            paths.sort(key=lambda p: (-p.stability, p.nodes))
            flow.cache_hit = True
            self._start_data(flow, paths, t)
        else:
            self._start_discovery(flow.source, flow.destination, t, flow_id=flow.flow_id)

    def _fail_flow(self, flow: Flow) -> None:
        flow.route_failed = True
        flow.lost = flow.offered
        flow.done = True
        self.route_failures += 1

    def _finish_flow_if_settled(self, flow: Flow, t: float) -> None:
        if not flow.done and flow.settled() >= flow.offered:
            flow.done = True
            maintain_routes(self.caches[flow.source], t)

    # -- discovery wave ------------------------------------------------------

    def _start_discovery(
        self, source: str, destination: str, now: float, flow_id: int | None
    ) -> Discovery:
        discovery = Discovery(
            request_id=self._next_request,
            source=source,
            destination=destination,
            started_at=now,
            window_close=now + self.cfg.effective_window_s,
            flow_id=flow_id,
        )
        self._next_request += 1
        self.discoveries[discovery.request_id] = discovery
        initial = RreqMsg(
            request_id=discovery.request_id,
            source=source,
            next=source,
            partial_path=(source,),
            partial_path_stability=1.0,
        )
        self._visit(discovery, initial, now)
        self.net.queue.push(
            discovery.window_close, WINDOW_CLOSE, WindowCloseEv(discovery.request_id)
        )
        return discovery

    def _hello_exchange(self, node_id: str, t: float) -> list[tuple[str, LinkAssessment]]:
        net = self.net
        bits = self.cfg.bits
        if not net.charge_tx(node_id, bits.hello, "hello"):
            return []
        replies: list[tuple[str, LinkAssessment]] = []
        for other in net.ids:
            if other == node_id or not net.alive(other):
                continue
            if not net.in_range(node_id, other, t):
                continue
            if not net.charge_rx(other, bits.hello):
                continue  # died receiving the Hello: no reply
            assessment = net.assess_link(node_id, other, t)
            if not net.charge_tx(other, bits.reply_hello, "reply_hello"):
                continue  # died transmitting the reply
            if not net.charge_rx(node_id, bits.reply_hello):
                continue  # broadcaster died mid-receive; reply unheard
            replies.append((other, assessment))
        return replies

    def _visit(self, discovery: Discovery, rreq: RreqMsg, t: float) -> None:
        """A node holding an accepted RREQ discovers neighbors and forwards."""
        node_id = rreq.partial_path[-1]
        if not self.net.alive(node_id):
            return
        if node_id not in discovery.memo:
            discovery.memo[node_id] = self._hello_exchange(node_id, t)
        neighbors = discovery.memo[node_id]
        # Selection operates on viable next hops: neighbors already on the
        # partial path would only produce loop-rejected RREQs, so they are
        # filtered before the threshold branching, not after.
        candidates = [
            (nid, a.stability) for nid, a in neighbors if nid not in rreq.partial_path
        ]
        if not candidates:
            return  # dead end: the wave stops here
        scores = dict(candidates)
        selected = select_forwarding_set(candidates, self.cfg.stability)
        # The sought destination always hears the RREQ when it is a neighbor;
        # threshold selection only gates how the wave continues past here.
        if discovery.destination in scores and discovery.destination not in selected:
            selected.append(discovery.destination)
        for next_id in selected:
            try:
                extended = extend_rreq(rreq, scores[next_id], next_id)
            except RouteLoopError:  # unreachable with pre-filtered candidates
                self.net.drops["rreq_loop"] += 1
                continue
            if len(extended.partial_path) - 1 > self.cfg.effective_hop_budget:
                self.net.drops["rreq_budget"] += 1
                continue
            if not self.net.charge_tx(node_id, self.cfg.bits.rreq, "rreq"):
                return  # sender depleted: nothing further leaves this node
            if not self.net.in_range(node_id, next_id, t):
                continue  # drifted out since assessment; transmission wasted
            self.net.queue.push(
                t + self.cfg.per_hop_latency_s,
                MESSAGE_DELIVERY,
                RreqDeliverEv(discovery.request_id, extended),
            )

    def _on_rreq_deliver(self, ev: RreqDeliverEv, t: float) -> None:
        discovery = self.discoveries[ev.request_id]
        rreq = ev.rreq
        node_id = rreq.next
        if not self.net.alive(node_id):
            return
        if not self.net.charge_rx(node_id, self.cfg.bits.rreq):
            return
        if node_id == discovery.destination:
            # The destination enlists every distinct arrival inside the window.
            if not discovery.closed and rreq.partial_path not in discovery.enlisted:
                discovery.enlisted[rreq.partial_path] = Path(
                    nodes=rreq.partial_path,
                    stability=rreq.partial_path_stability,
                    link_stabilities=rreq.link_stabilities,
                )
            return
        if accept_rreq(self.best_seen[node_id], rreq):
            self._visit(discovery, rreq, t)
        else:
            self.net.drops["rreq_dominance"] += 1

    def _on_window_close(self, discovery: Discovery, t: float) -> None:
        discovery.closed = True
        ranked = sorted(
            discovery.enlisted.values(), key=lambda p: (-p.stability, p.nodes)
        )
        chosen = ranked[: self.cfg.max_paths]
        if not chosen:
            self._resolve_discovery(discovery, t)
            return
        discovery.pending_rreps = len(chosen)
        for path in chosen:
            self._send_rrep_hop(discovery, path, len(path.nodes) - 1, t)

    def _send_rrep_hop(self, discovery: Discovery, path: Path, node_index: int, t: float) -> None:
        sender = path.nodes[node_index]
        receiver = path.nodes[node_index - 1]
        if not self.net.alive(sender) or not self.net.charge_tx(
            sender, self.cfg.bits.rrep, "rrep"
        ):
            self._rrep_resolved(discovery, path, delivered=False, t=t)
            return
        if not self.net.in_range(sender, receiver, t):
            self._rrep_resolved(discovery, path, delivered=False, t=t)
            return
        self.net.queue.push(
            t + self.cfg.per_hop_latency_s,
            MESSAGE_DELIVERY,
            RrepDeliverEv(discovery.request_id, path, node_index - 1),
        )

    def _on_rrep_deliver(self, ev: RrepDeliverEv, t: float) -> None:
        discovery = self.discoveries[ev.request_id]
        node_id = ev.path.nodes[ev.node_index]
        if not self.net.alive(node_id) or not self.net.charge_rx(
            node_id, self.cfg.bits.rrep
        ):
            self._rrep_resolved(discovery, ev.path, delivered=False, t=t)
            return
        if ev.node_index == 0:
            entry = self.caches[node_id].add(
                discovery.source, discovery.destination, ev.path, t, self.cfg.cache_ttl_s
            )
            self.net.queue.push(
                entry.expires_at, CACHE_EXPIRY, CacheExpiryEv(node_id, entry.entry_id)
            )
            self.paths_discovered += 1
            self._rrep_resolved(discovery, ev.path, delivered=True, t=t)
        else:
            self._send_rrep_hop(discovery, ev.path, ev.node_index, t)

    def _rrep_resolved(self, discovery: Discovery, path: Path, delivered: bool, t: float) -> None:
        discovery.pending_rreps -= 1
        if delivered:
            discovery.result_paths.append(path)
        if discovery.pending_rreps <= 0:
            discovery.result_paths.sort(key=lambda p: (-p.stability, p.nodes))
            self._resolve_discovery(discovery, t)

    def _resolve_discovery(self, discovery: Discovery, t: float) -> None:
        discovery.failed = not discovery.result_paths
        discovery.done = True
        if discovery.flow_id is None:
            return
        flow = self.flows[discovery.flow_id]
        if discovery.failed:
            self._fail_flow(flow)
        else:
            self.net.queue.push(t, DATA_START, DataStartEv(flow.flow_id))

    # -- data distribution ----------------------------------------------------

    def _on_data_start(self, flow: Flow, t: float) -> None:
        cache = self.caches[flow.source]
        _, entry_ids = check_route_cache(cache, flow.source, flow.destination, t)
        paths = [cache.entries[eid].path for eid in entry_ids]
        paths.sort(key=lambda p: (-p.stability, p.nodes))
        if not paths:
            self._fail_flow(flow)
            return
        self._start_data(flow, paths, t)

    def _start_data(self, flow: Flow, paths: list[Path], t: float) -> None:
        if self.cfg.mode == MODE_SINGLE:
            paths = paths[:1]
        flow.paths = [PathUsage(p) for p in paths]
        flow.data_start = t
        if flow.offered == 0:
            flow.done = True
            maintain_routes(self.caches[flow.source], t)
            return
        for j in range(flow.offered):
            index = j % len(flow.paths)
            flow.paths[index].assigned += 1
            self.net.queue.push(
                t + j * self.cfg.packet_interval_s,
                MESSAGE_DELIVERY,
                PacketDepartEv(flow.flow_id, j, index),
            )

    def _on_packet_depart(self, ev: PacketDepartEv, t: float) -> None:
        flow = self.flows[ev.flow_id]
        self._packet_hop(flow, flow.paths[ev.path_index], ev, node_index=0, t=t)

    def _packet_hop(
        self, flow: Flow, usage: PathUsage, ev: PacketDepartEv | PacketDeliverEv, node_index: int, t: float
    ) -> None:
        path = usage.path
        sender = path.nodes[node_index]
        receiver = path.nodes[node_index + 1]
        if not self.net.alive(sender):
            self._packet_lost(flow, usage, t)
            return
        if not self.net.charge_tx(sender, self.cfg.bits.data, "data"):
            self._packet_lost(flow, usage, t)
            return
        if not self.net.alive(receiver) or not self.net.in_range(sender, receiver, t):
            self._packet_lost(flow, usage, t)
            return
        self.net.queue.push(
            t + self.cfg.per_hop_latency_s,
            MESSAGE_DELIVERY,
            PacketDeliverEv(flow.flow_id, ev.packet_index, ev.path_index, node_index + 1),
        )

    def _on_packet_deliver(self, ev: PacketDeliverEv, t: float) -> None:
        flow = self.flows[ev.flow_id]
        usage = flow.paths[ev.path_index]
        node_id = usage.path.nodes[ev.node_index]
        if not self.net.charge_rx(node_id, self.cfg.bits.data):
            self._packet_lost(flow, usage, t)
            return
        if ev.node_index == len(usage.path.nodes) - 1:
            flow.delivered += 1
            usage.delivered += 1
            self._finish_flow_if_settled(flow, t)
        else:
            self._packet_hop(flow, usage, ev, ev.node_index, t)

    def _packet_lost(self, flow: Flow, usage: PathUsage, t: float) -> None:
        flow.lost += 1
        usage.lost += 1
        self._finish_flow_if_settled(flow, t)
