"""Link-expiration-time prediction and the weighted link-stability score.

A link between two nodes moving at constant velocities expires when their
separation first exceeds the transmission radius. The closed form solves
|p + v*t| = r for the relative position p and relative velocity v; the
stability score blends the partner's residual-energy fraction with the
normalized expiration time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .kinematics import NodeKinematics


class LinkOutOfRangeError(ValueError):
    """Expiration time is undefined for a pair already out of range."""


@dataclass(frozen=True)
class LetResult:
    """Predicted link expiration time; value is None when it never expires."""

    value: float | None

    @property
    def never_expires(self) -> bool:
        return self.value is None


NEVER_EXPIRES = LetResult(None)


@dataclass(frozen=True)
class StabilityConfig:
    """Weights and thresholds for the link-stability score.

    Weights are renormalized to sum to 1 at construction. LET values are
    mapped onto [0, 1] by clamping at `let_cap_s` so the energy fraction
    and the expiration time are commensurable.
    """

    w_energy: float = 0.5
    w_let: float = 0.5
    let_cap_s: float = 100.0
    theta_high: float = 0.7
    theta_moderate: float = 0.4

    def __post_init__(self) -> None:
        if self.w_energy < 0 or self.w_let < 0:
            raise ValueError("stability weights must be non-negative")
        total = self.w_energy + self.w_let
        if total <= 0:
            raise ValueError("at least one stability weight must be positive")
        object.__setattr__(self, "w_energy", self.w_energy / total)
        object.__setattr__(self, "w_let", self.w_let / total)
        if self.let_cap_s <= 0:
            raise ValueError("let_cap_s must be positive")
        if not (0.0 < self.theta_moderate < self.theta_high <= 1.0):
            raise ValueError("thresholds must satisfy 0 < theta_moderate < theta_high <= 1")


@dataclass(frozen=True)
class LinkAssessment:
    """Outcome of scoring one link: its predicted lifetime and stability."""

    let: LetResult
    stability: float = field(default=0.0)

    def __post_init__(self) -> None:
        if not (0.0 <= self.stability <= 1.0):
            raise ValueError("stability must lie in [0, 1]")


def compute_let(a: NodeKinematics, b: NodeKinematics, t: float, r: float) -> LetResult:
    """Time from t until the pair first drifts beyond radius r.

    Trajectories are extrapolated as straight lines from the states at
    time t. Returns NEVER_EXPIRES when the relative velocity is zero.
    Raises LinkOutOfRangeError if the pair is already out of range.
    """
    if r <= 0:
        raise ValueError("communication range must be positive")
    xa, ya = a.position_unreflected(t)
    xb, yb = b.position_unreflected(t)
    vax, vay = a.velocity
    vbx, vby = b.velocity
    dvx = vax - vbx
    dvy = vay - vby
    dx = xa - xb
    dy = ya - yb
    if dx * dx + dy * dy > r * r:
        raise LinkOutOfRangeError(
            f"nodes {a.node_id} and {b.node_id} are out of range at t={t}"
        )
    v2 = dvx * dvx + dvy * dvy
    if v2 == 0.0:
        return NEVER_EXPIRES
    dot = dvx * dx + dvy * dy
    cross = dvx * dy - dvy * dx
    disc = v2 * r * r - cross * cross
    # The chord through the in-range disk always exists; only float noise
    # can push the discriminant negative.
    tol = 1e-9 * max(1.0, v2 * r * r)
    if disc < 0.0:
        if disc < -tol:
            raise AssertionError(f"negative discriminant {disc} for in-range pair")
        disc = 0.0
    let = (-dot + math.sqrt(disc)) / v2
    return LetResult(max(let, 0.0))


def normalize_let(let: LetResult, cfg: StabilityConfig) -> float:
    """Map an expiration time onto [0, 1]: capped linear, 1.0 for never."""
    if let.never_expires:
        return 1.0
    return min(let.value, cfg.let_cap_s) / cfg.let_cap_s


def link_stability(
    re_fraction: float, let: LetResult, cfg: StabilityConfig
) -> LinkAssessment:
    """Weighted stability score: w_energy * RE fraction + w_let * normalized LET."""
    if not (0.0 <= re_fraction <= 1.0):
        raise ValueError(f"re_fraction {re_fraction} outside [0, 1]")
    score = cfg.w_energy * re_fraction + cfg.w_let * normalize_let(let, cfg)
    return LinkAssessment(let=let, stability=min(max(score, 0.0), 1.0))
