"""Geometry and the first-order radio energy dissipation model.

Every protocol in this package charges node batteries through the same
dual-slope radio model: electronics cost per bit for TX and RX, a
free-space (d^2) amplifier below the crossover distance d0 and a
multipath (d^4) amplifier above it, plus a per-signal aggregation cost
at cluster heads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Canonical constants of the LEACH/SEP/DEEC model family.
E_ELEC = 50e-9       # J/bit, TX and RX electronics
EPS_FS = 10e-12      # J/bit/m^2, free-space amplifier
EPS_MP = 0.0013e-12  # J/bit/m^4, multipath amplifier
E_DA = 5e-9          # J/bit/signal, data aggregation


@dataclass(frozen=True)
class Position:
    """A point in the deployment field, in meters."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"position coordinates must be finite, got ({self.x}, {self.y})")


def distance(a: Position, b: Position) -> float:
    """Euclidean distance between two positions, in meters."""
    dx = a.x - b.x
    dy = a.y - b.y
    return math.sqrt(dx * dx + dy * dy)


@dataclass(frozen=True)
class EnergyModel:
    """Radio constants for transmit/receive/aggregation dissipation."""

    e_elec: float = E_ELEC
    eps_fs: float = EPS_FS
    eps_mp: float = EPS_MP
    e_da: float = E_DA

    def __post_init__(self):
        for name in ("e_elec", "eps_fs", "eps_mp", "e_da"):
            if getattr(self, name) <= 0:
                raise ValueError(f"energy model coefficient {name} must be > 0")

    @property
    def d0(self) -> float:
        """Crossover distance between the d^2 and d^4 amplifier regimes."""
        return math.sqrt(self.eps_fs / self.eps_mp)

    def tx_energy(self, k: int, d: float) -> float:
        """Energy to transmit a k-bit packet over distance d meters."""
        d2 = d * d
        if d < self.d0:
            return self.e_elec * k + self.eps_fs * k * d2
        return self.e_elec * k + self.eps_mp * k * (d2 * d2)

    def rx_energy(self, k: int) -> float:
        """Energy to receive a k-bit packet."""
        return self.e_elec * k

    def aggregation_energy(self, k: int, signals: int) -> float:
        """Energy to fuse `signals` k-bit signals into one outbound packet."""
        return self.e_da * k * signals
