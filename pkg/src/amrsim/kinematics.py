"""Constant-velocity 2-D node motion on a bounded terrain with reflective walls."""

from __future__ import annotations

import math
from dataclasses import dataclass


class TemporalOrderError(ValueError):
    """Raised when a kinematic query predates the node's reference time."""


@dataclass(frozen=True)
class Terrain:
    """Rectangular simulation area with the origin at the lower-left corner."""

    width: float
    height: float

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("terrain dimensions must be positive")

    def contains(self, x: float, y: float) -> bool:
        return 0.0 <= x <= self.width and 0.0 <= y <= self.height


@dataclass(frozen=True)
class NodeKinematics:
    """Motion state of one node.

    Position (x0, y0) holds at reference time t0; the node then moves at
    constant `speed` (m/s) along `heading` (degrees counterclockwise from
    the +x axis, normalized to [0, 360)).
    """

    node_id: str
    x0: float
    y0: float
    speed: float
    heading: float
    t0: float = 0.0

    def __post_init__(self) -> None:
        if self.speed < 0:
            raise ValueError("speed must be non-negative")
        object.__setattr__(self, "heading", self.heading % 360.0)

    @property
    def velocity(self) -> tuple[float, float]:
        """Velocity vector (vx, vy) implied by speed and heading."""
        rad = math.radians(self.heading)
        return self.speed * math.cos(rad), self.speed * math.sin(rad)

    def position_unreflected(self, t: float) -> tuple[float, float]:
        """Straight-line position at time t, ignoring any terrain."""
        if t < self.t0:
            raise TemporalOrderError(
                f"node {self.node_id}: query time {t} precedes reference time {self.t0}"
            )
        vx, vy = self.velocity
        dt = t - self.t0
        return self.x0 + vx * dt, self.y0 + vy * dt


def _fold(u: float, span: float) -> tuple[float, float]:
    """Fold an unbounded coordinate into [0, span] by specular reflection.

    Returns the folded coordinate and the velocity sign (+1/-1) on the
    current fold segment. Exact for u already inside [0, span].
    """
    period = 2.0 * span
    m = u % period
    if m <= span:
        return m, 1.0
    return period - m, -1.0


def position_at(k: NodeKinematics, t: float, terrain: Terrain) -> tuple[float, float]:
    """Node position at time t with specular reflection at the terrain edges."""
    ux, uy = k.position_unreflected(t)
    x, _ = _fold(ux, terrain.width)
    y, _ = _fold(uy, terrain.height)
    return x, y


def velocity_at(k: NodeKinematics, t: float, terrain: Terrain) -> tuple[float, float]:
    """Instantaneous velocity at time t, accounting for past reflections."""
    ux, uy = k.position_unreflected(t)
    vx, vy = k.velocity
    _, sx = _fold(ux, terrain.width)
    _, sy = _fold(uy, terrain.height)
    return vx * sx, vy * sy


def snapshot_at(k: NodeKinematics, t: float, terrain: Terrain) -> NodeKinematics:
    """Kinematics rebased at time t: current position and effective heading.

    The snapshot extrapolates as a straight line, which is what neighbor
    link-lifetime prediction operates on.
    """
    x, y = position_at(k, t, terrain)
    vx, vy = velocity_at(k, t, terrain)
    if k.speed > 0:
        heading = math.degrees(math.atan2(vy, vx)) % 360.0
    else:
        heading = k.heading
    return NodeKinematics(k.node_id, x, y, k.speed, heading, t)


def distance(a: NodeKinematics, b: NodeKinematics, t: float, terrain: Terrain) -> float:
    """Euclidean distance between two nodes at time t."""
    xa, ya = position_at(a, t, terrain)
    xb, yb = position_at(b, t, terrain)
    return math.hypot(xa - xb, ya - yb)


def in_range(
    a: NodeKinematics, b: NodeKinematics, t: float, r: float, terrain: Terrain
) -> bool:
    """Unit-disk connectivity test: true iff the pair is within radius r.

    The boundary is inclusive: a pair at exactly distance r is connected.
    """
    if r <= 0:
        raise ValueError("communication range must be positive")
    return distance(a, b, t, terrain) <= r
