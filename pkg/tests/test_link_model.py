import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from amrsim.kinematics import NodeKinematics
from amrsim.linkmodel import (
    NEVER_EXPIRES,
    LetResult,
    LinkAssessment,
    LinkOutOfRangeError,
    StabilityConfig,
    compute_let,
    link_stability,
    normalize_let,
)

CFG = StabilityConfig()


def node(name, x, y, speed, heading):
    return NodeKinematics(name, x, y, speed, heading, 0.0)


def let_oracle(a, b, r, dt=1e-3):
    """First sampled instant the straight-line pair separation exceeds r."""
    ax, ay = a.position_unreflected(0.0)
    bx, by = b.position_unreflected(0.0)
    avx, avy = a.velocity
    bvx, bvy = b.velocity
    px, py = ax - bx, ay - by
    vx, vy = avx - bvx, avy - bvy
    r2 = r * r
    chunk = 1 << 20
    start = 0
    while start * dt < 1e7:
        t = (start + np.arange(chunk)) * dt
        d2 = (px + vx * t) ** 2 + (py + vy * t) ** 2
        out = d2 > r2
        if out.any():
            return t[int(np.argmax(out))]
        start += chunk
    raise AssertionError("pair never left range; oracle horizon exceeded")


def random_in_range_pair(rng, r=200.0, min_rel_speed=0.05):
    while True:
        ax, ay = rng.uniform(0, 500), rng.uniform(0, 500)
        dx, dy = rng.uniform(-r, r), rng.uniform(-r, r)
        if dx * dx + dy * dy > r * r:
            continue
        a = node("a", ax, ay, rng.uniform(0, 20), rng.uniform(0, 360))
        b = node("b", ax + dx, ay + dy, rng.uniform(0, 20), rng.uniform(0, 360))
        avx, avy = a.velocity
        bvx, bvy = b.velocity
        if math.hypot(avx - bvx, avy - bvy) >= min_rel_speed:
            return a, b


class TestComputeLet:
    def test_head_on_crossing(self):
        # closing at 20 m/s from 100 m apart: out of 200 m range at t=15
        a = node("a", 0.0, 0.0, 10.0, 0.0)
        b = node("b", 100.0, 0.0, 10.0, 180.0)
        let = compute_let(a, b, 0.0, 200.0)
        assert let.value == pytest.approx(15.0, abs=1e-9)
        assert let_oracle(a, b, 200.0) == pytest.approx(15.0, abs=2e-3)

    def test_separating_pair(self):
        a = node("a", 0.0, 0.0, 10.0, 180.0)
        b = node("b", 100.0, 0.0, 10.0, 0.0)
        let = compute_let(a, b, 0.0, 200.0)
        assert let.value == pytest.approx(5.0, abs=1e-9)
        assert let_oracle(a, b, 200.0) == pytest.approx(5.0, abs=2e-3)

    def test_identical_velocities_never_expire(self):
        a = node("a", 0.0, 0.0, 10.0, 45.0)
        b = node("b", 50.0, 50.0, 10.0, 45.0)
        assert compute_let(a, b, 0.0, 200.0).never_expires

    def test_both_stationary_never_expire(self):
        a = node("a", 0.0, 0.0, 0.0, 0.0)
        b = node("b", 30.0, 40.0, 0.0, 90.0)
        assert compute_let(a, b, 0.0, 200.0) is NEVER_EXPIRES

    def test_out_of_range_pair_rejected(self):
        a = node("a", 0.0, 0.0, 10.0, 0.0)
        b = node("b", 300.0, 0.0, 10.0, 180.0)
        with pytest.raises(LinkOutOfRangeError):
            compute_let(a, b, 0.0, 200.0)

    def test_oracle_equivalence_sampled(self):
        rng = random.Random(11)
        for _ in range(100):
            a, b = random_in_range_pair(rng)
            let = compute_let(a, b, 0.0, 200.0)
            assert not let.never_expires
            assert abs(let.value - let_oracle(a, b, 200.0)) <= 0.01

    def test_crossing_property(self):
        # at t + LET the straight-line separation equals the radius
        rng = random.Random(23)
        for _ in range(200):
            a, b = random_in_range_pair(rng)
            let = compute_let(a, b, 0.0, 200.0)
            ax, ay = a.position_unreflected(let.value)
            bx, by = b.position_unreflected(let.value)
            assert math.hypot(ax - bx, ay - by) == pytest.approx(200.0, abs=200.0 * 1e-6)

    def test_symmetry(self):
        rng = random.Random(31)
        for _ in range(200):
            a, b = random_in_range_pair(rng)
            assert compute_let(a, b, 0.0, 200.0).value == pytest.approx(
                compute_let(b, a, 0.0, 200.0).value, abs=1e-9
            )

    def test_nonzero_reference_time(self):
        # same geometry expressed with t0=5 gives the same LET at t=5
        a = node("a", 0.0, 0.0, 10.0, 0.0)
        b = node("b", 100.0, 0.0, 10.0, 180.0)
        a5 = NodeKinematics("a", 0.0, 0.0, 10.0, 0.0, 5.0)
        b5 = NodeKinematics("b", 100.0, 0.0, 10.0, 180.0, 5.0)
        assert compute_let(a5, b5, 5.0, 200.0).value == pytest.approx(
            compute_let(a, b, 0.0, 200.0).value, abs=1e-12
        )


class TestNormalizeLet:
    def test_linear_scaling(self):
        assert normalize_let(LetResult(50.0), CFG) == pytest.approx(0.5)

    def test_never_expires_maps_to_one(self):
        assert normalize_let(NEVER_EXPIRES, CFG) == 1.0

    def test_clamped_at_cap(self):
        assert normalize_let(LetResult(250.0), CFG) == 1.0


class TestLinkStability:
    def test_maximum_case(self):
        out = link_stability(1.0, NEVER_EXPIRES, CFG)
        assert out.stability == 1.0

    def test_direct_arithmetic(self):
        out = link_stability(0.9, LetResult(50.0), CFG)
        assert out.stability == pytest.approx(0.7)

    def test_degenerate_weights(self):
        cfg = StabilityConfig(w_energy=1.0, w_let=0.0)
        assert link_stability(0.85, LetResult(1.0), cfg).stability == pytest.approx(0.85)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            link_stability(1.2, NEVER_EXPIRES, CFG)
        with pytest.raises(ValueError):
            link_stability(-0.1, NEVER_EXPIRES, CFG)

    @given(
        re=st.floats(0, 1),
        let=st.one_of(st.none(), st.floats(0, 1e6)),
        w=st.floats(0, 1),
        cap=st.floats(1.0, 1e4),
    )
    def test_output_range(self, re, let, w, cap):
        cfg = StabilityConfig(w_energy=w, w_let=1.0 - w, let_cap_s=cap)
        out = link_stability(re, LetResult(let) if let is not None else NEVER_EXPIRES, cfg)
        assert 0.0 <= out.stability <= 1.0

    @given(
        re1=st.floats(0, 1), re2=st.floats(0, 1),
        let1=st.floats(0, 500), let2=st.floats(0, 500),
    )
    def test_monotonicity(self, re1, re2, let1, let2):
        lo_re, hi_re = sorted((re1, re2))
        lo_let, hi_let = sorted((let1, let2))
        base = link_stability(lo_re, LetResult(lo_let), CFG).stability
        assert link_stability(hi_re, LetResult(lo_let), CFG).stability >= base
        assert link_stability(lo_re, LetResult(hi_let), CFG).stability >= base


class TestStabilityConfig:
    def test_weight_renormalization(self):
        cfg = StabilityConfig(w_energy=2.0, w_let=6.0)
        assert cfg.w_energy == pytest.approx(0.25)
        assert cfg.w_let == pytest.approx(0.75)

    def test_invalid_thresholds(self):
        with pytest.raises(ValueError):
            StabilityConfig(theta_high=0.4, theta_moderate=0.4)
        with pytest.raises(ValueError):
            StabilityConfig(theta_high=1.1)
        with pytest.raises(ValueError):
            StabilityConfig(theta_moderate=0.0)

    def test_invalid_weights(self):
        with pytest.raises(ValueError):
            StabilityConfig(w_energy=-0.1)
        with pytest.raises(ValueError):
            StabilityConfig(w_energy=0.0, w_let=0.0)

    def test_assessment_range_validated(self):
        with pytest.raises(ValueError):
            LinkAssessment(let=NEVER_EXPIRES, stability=1.5)
