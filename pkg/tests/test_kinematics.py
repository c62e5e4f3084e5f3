import math
import random

import pytest
from hypothesis import given, strategies as st

from amrsim.kinematics import (
    NodeKinematics,
    TemporalOrderError,
    Terrain,
    distance,
    in_range,
    position_at,
    snapshot_at,
    velocity_at,
)

T500 = Terrain(500.0, 500.0)


def step_with_reflection(x0, y0, speed, heading, t, terrain, dt=1e-3):
    """Independent oracle: explicit time-stepping with wall bounces."""
    rad = math.radians(heading)
    vx, vy = speed * math.cos(rad), speed * math.sin(rad)
    x, y = x0, y0
    for _ in range(round(t / dt)):
        x += vx * dt
        y += vy * dt
        if x > terrain.width:
            x = 2 * terrain.width - x
            vx = -vx
        elif x < 0:
            x = -x
            vx = -vx
        if y > terrain.height:
            y = 2 * terrain.height - y
            vy = -vy
        elif y < 0:
            y = -y
            vy = -vy
    return x, y


def test_uniform_motion():
    k = NodeKinematics("n", 0.0, 0.0, 10.0, 0.0, 0.0)
    assert position_at(k, 5.0, T500) == pytest.approx((50.0, 0.0), abs=1e-12)


def test_stationary_node():
    k = NodeKinematics("n", 0.0, 0.0, 0.0, 123.0, 0.0)
    assert position_at(k, 99.0, T500) == (0.0, 0.0)


def test_position_at_reference_time_is_exact():
    k = NodeKinematics("n", 123.456, 78.9, 10.0, 37.0, 2.5)
    assert position_at(k, 2.5, T500) == (123.456, 78.9)


def test_reflection_matches_stepping_oracle():
    # starts at x=490 heading +x at 10 m/s: reflects at x=500 at t=1
    k = NodeKinematics("n", 490.0, 0.0, 10.0, 0.0, 0.0)
    assert position_at(k, 2.0, T500) == pytest.approx((490.0, 0.0), abs=1e-9)
    ox, oy = step_with_reflection(490.0, 0.0, 10.0, 0.0, 2.0, T500)
    assert (ox, oy) == pytest.approx((490.0, 0.0), abs=0.05)


def test_reflection_oracle_random_trajectories():
    rng = random.Random(42)
    for _ in range(25):
        x0, y0 = rng.uniform(0, 500), rng.uniform(0, 500)
        speed = rng.uniform(0, 25)
        heading = rng.uniform(0, 360)
        t = rng.uniform(0, 120)
        k = NodeKinematics("n", x0, y0, speed, heading, 0.0)
        x, y = position_at(k, t, T500)
        ox, oy = step_with_reflection(x0, y0, speed, heading, t, T500)
        assert x == pytest.approx(ox, abs=0.1)
        assert y == pytest.approx(oy, abs=0.1)
        assert 0 <= x <= 500 and 0 <= y <= 500


def test_temporal_order_error():
    k = NodeKinematics("n", 0.0, 0.0, 1.0, 0.0, 10.0)
    with pytest.raises(TemporalOrderError):
        position_at(k, 9.0, T500)
    b = NodeKinematics("m", 1.0, 1.0, 1.0, 0.0, 0.0)
    with pytest.raises(TemporalOrderError):
        distance(k, b, 5.0, T500)


def test_heading_normalized():
    assert NodeKinematics("n", 0, 0, 1.0, -90.0).heading == 270.0
    assert NodeKinematics("n", 0, 0, 1.0, 360.0).heading == 0.0
    assert NodeKinematics("n", 0, 0, 1.0, 725.0).heading == 5.0


def test_negative_speed_rejected():
    with pytest.raises(ValueError):
        NodeKinematics("n", 0, 0, -1.0, 0.0)


def test_terrain_validation():
    with pytest.raises(ValueError):
        Terrain(0.0, 100.0)
    with pytest.raises(ValueError):
        Terrain(100.0, -5.0)


@given(
    x0=st.floats(0, 500),
    y0=st.floats(0, 500),
    speed=st.floats(0, 30),
    heading=st.floats(0, 360),
    t=st.floats(0, 200),
    eps=st.floats(1e-6, 0.01),
)
def test_position_continuity(x0, y0, speed, heading, t, eps):
    k = NodeKinematics("n", x0, y0, speed, heading, 0.0)
    x1, y1 = position_at(k, t, T500)
    x2, y2 = position_at(k, t + eps, T500)
    assert math.hypot(x2 - x1, y2 - y1) <= speed * eps + 1e-9
    assert 0 <= x2 <= 500 and 0 <= y2 <= 500


def test_reflection_preserves_speed():
    # finite-difference speed matches configured speed away from bounce instants
    k = NodeKinematics("n", 480.0, 250.0, 17.0, 12.0, 0.0)
    dt = 1e-4
    bounce_times = []
    for i in range(200000):
        t = i * 5e-3
        vx, vy = velocity_at(k, t, T500)
        vx2, vy2 = velocity_at(k, t + 5e-3, T500)
        if (vx > 0) != (vx2 > 0) or (vy > 0) != (vy2 > 0):
            bounce_times.append(t)
    assert bounce_times, "trajectory should bounce at least once"
    rng = random.Random(7)
    for _ in range(200):
        t = rng.uniform(0, 1000)
        if any(abs(t - bt) < 0.02 for bt in bounce_times):
            continue
        x1, y1 = position_at(k, t, T500)
        x2, y2 = position_at(k, t + dt, T500)
        est = math.hypot(x2 - x1, y2 - y1) / dt
        assert est == pytest.approx(17.0, rel=1e-6)


def test_distance_345_triangle():
    a = NodeKinematics("a", 0.0, 0.0, 0.0, 0.0, 0.0)
    b = NodeKinematics("b", 3.0, 4.0, 0.0, 0.0, 0.0)
    for t in (0.0, 1.0, 50.0):
        assert distance(a, b, t, T500) == pytest.approx(5.0, abs=1e-12)


def test_distance_identical_nodes():
    a = NodeKinematics("a", 10.0, 20.0, 5.0, 45.0, 0.0)
    assert distance(a, a, 3.0, T500) == 0.0


def test_distance_moving_node():
    a = NodeKinematics("a", 0.0, 0.0, 10.0, 0.0, 0.0)
    b = NodeKinematics("b", 100.0, 0.0, 0.0, 0.0, 0.0)
    assert distance(a, b, 5.0, T500) == pytest.approx(50.0, abs=1e-12)


def test_distance_symmetry_sampled():
    rng = random.Random(3)
    for _ in range(50):
        a = NodeKinematics("a", rng.uniform(0, 500), rng.uniform(0, 500),
                           rng.uniform(0, 20), rng.uniform(0, 360), 0.0)
        b = NodeKinematics("b", rng.uniform(0, 500), rng.uniform(0, 500),
                           rng.uniform(0, 20), rng.uniform(0, 360), 0.0)
        t = rng.uniform(0, 100)
        assert distance(a, b, t, T500) == distance(b, a, t, T500)
        assert in_range(a, b, t, 200.0, T500) == in_range(b, a, t, 200.0, T500)


def test_in_range_boundary_inclusive():
    a = NodeKinematics("a", 0.0, 0.0, 0.0, 0.0, 0.0)
    assert in_range(a, NodeKinematics("b", 150.0, 0.0, 0.0, 0.0, 0.0), 0.0, 200.0, T500)
    assert in_range(a, NodeKinematics("b", 200.0, 0.0, 0.0, 0.0, 0.0), 0.0, 200.0, T500)
    assert not in_range(a, NodeKinematics("b", 200.01, 0.0, 0.0, 0.0, 0.0), 0.0, 200.0, T500)


def test_in_range_requires_positive_radius():
    a = NodeKinematics("a", 0.0, 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        in_range(a, a, 0.0, 0.0, T500)


def test_snapshot_rebases_state():
    k = NodeKinematics("n", 490.0, 100.0, 10.0, 0.0, 0.0)
    snap = snapshot_at(k, 3.0, T500)  # reflected at x=500 at t=1, now heading 180
    assert snap.t0 == 3.0
    assert snap.heading == pytest.approx(180.0)
    assert (snap.x0, snap.y0) == pytest.approx(position_at(k, 3.0, T500))
    # snapshot extrapolation agrees with the reflected truth until the next bounce
    x_true = position_at(k, 10.0, T500)
    x_snap = snap.position_unreflected(10.0)
    assert x_snap == pytest.approx(x_true, abs=1e-9)
