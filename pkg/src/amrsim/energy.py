"""Per-node energy bookkeeping under a per-bit transmit/receive cost model."""

from __future__ import annotations

from dataclasses import dataclass

# MICA2 radio costs in joules per bit.
DEFAULT_TX_J_PER_BIT = 0.312e-6
DEFAULT_RX_J_PER_BIT = 0.234e-6


@dataclass(frozen=True)
class EnergyModel:
    """Per-bit radio energy costs."""

    tx_j_per_bit: float = DEFAULT_TX_J_PER_BIT
    rx_j_per_bit: float = DEFAULT_RX_J_PER_BIT

    def __post_init__(self) -> None:
        if self.tx_j_per_bit <= 0 or self.rx_j_per_bit <= 0:
            raise ValueError("per-bit energy costs must be positive")


@dataclass
class EnergyState:
    """Initial and consumed energy of one node.

    Consumption clamps at depletion: residual never goes negative and a
    transaction that exhausts the reservoir fails (the node dies mid-way).
    """

    initial: float
    consumed: float = 0.0

    def __post_init__(self) -> None:
        if self.initial <= 0:
            raise ValueError("initial energy must be positive")
        if not (0.0 <= self.consumed <= self.initial):
            raise ValueError("consumed energy must lie in [0, initial]")

    @property
    def residual(self) -> float:
        return self.initial - self.consumed

    @property
    def alive(self) -> bool:
        return self.residual > 0.0

    def residual_fraction(self) -> float:
        """Remaining energy as a fraction of the initial reservoir."""
        return self.residual / self.initial

    def _consume(self, cost: float) -> bool:
        charge = min(cost, self.residual)
        self.consumed += charge
        return self.residual > 0.0

    def consume_tx(self, model: EnergyModel, bits: int) -> bool:
        """Charge a transmission of `bits`; False if it depleted the node."""
        if bits < 0:
            raise ValueError("bit count must be non-negative")
        return self._consume(bits * model.tx_j_per_bit)

    def consume_rx(self, model: EnergyModel, bits: int) -> bool:
        """Charge a reception of `bits`; False if the node died mid-receive."""
        if bits < 0:
            raise ValueError("bit count must be non-negative")
        return self._consume(bits * model.rx_j_per_bit)
