import pytest
from hypothesis import given, strategies as st

from amrsim.energy import EnergyModel, EnergyState

MODEL = EnergyModel()  # 0.312 uJ/bit tx, 0.234 uJ/bit rx


def test_tx_cost_per_million_bits():
    s = EnergyState(initial=5.0)
    ok = s.consume_tx(MODEL, 1_000_000)
    assert ok
    assert s.consumed == pytest.approx(0.312, abs=1e-12)
    assert s.residual == pytest.approx(4.688, abs=1e-12)


def test_rx_cost_per_million_bits():
    s = EnergyState(initial=5.0)
    assert s.consume_rx(MODEL, 1_000_000)
    assert s.consumed == pytest.approx(0.234, abs=1e-12)


def test_zero_bits_is_identity():
    s = EnergyState(initial=5.0, consumed=1.25)
    assert s.consume_tx(MODEL, 0)
    assert s.consume_rx(MODEL, 0)
    assert s.consumed == 1.25


def test_depleting_transmission_clamps_and_fails():
    s = EnergyState(initial=5.0, consumed=5.0 - 0.0001)
    ok = s.consume_tx(EnergyModel(tx_j_per_bit=0.001, rx_j_per_bit=0.001), 1)
    assert not ok
    assert s.residual == 0.0
    assert not s.alive


def test_depleting_receive_fails():
    s = EnergyState(initial=1.0, consumed=0.9999999)
    assert not s.consume_rx(MODEL, 1_000_000)
    assert s.residual == 0.0


def test_exact_depletion_counts_as_failure():
    s = EnergyState(initial=1.0)
    model = EnergyModel(tx_j_per_bit=1.0, rx_j_per_bit=1.0)
    assert not s.consume_tx(model, 1)
    assert s.residual == 0.0


def test_residual_fraction():
    assert EnergyState(5.0, 0.5).residual_fraction() == pytest.approx(0.9)
    assert EnergyState(5.0).residual_fraction() == 1.0
    assert EnergyState(5.0, 5.0).residual_fraction() == 0.0


def test_dead_node_cannot_transact():
    s = EnergyState(initial=1.0, consumed=1.0)
    assert not s.alive
    assert not s.consume_tx(MODEL, 0)


def test_validation():
    with pytest.raises(ValueError):
        EnergyState(initial=0.0)
    with pytest.raises(ValueError):
        EnergyState(initial=1.0, consumed=2.0)
    with pytest.raises(ValueError):
        EnergyModel(tx_j_per_bit=0.0)
    with pytest.raises(ValueError):
        EnergyState(1.0).consume_tx(MODEL, -5)


@given(st.lists(st.tuples(st.booleans(), st.integers(0, 10_000_000)), max_size=50))
def test_conservation_and_monotonicity(ops):
    s = EnergyState(initial=5.0)
    prev_residual = s.residual
    for is_tx, bits in ops:
        if is_tx:
            s.consume_tx(MODEL, bits)
        else:
            s.consume_rx(MODEL, bits)
        assert s.residual <= prev_residual
        prev_residual = s.residual
        assert s.residual >= 0.0
        assert s.initial == pytest.approx(s.residual + s.consumed, rel=1e-12)
