"""Election probabilities, thresholds, and transmission gating for
LEACH, SEP, TEEN and DEEC.

All functions here are pure; `elect_candidates` is the only one that
consumes the random stream, drawing one uniform per alive node in
ascending node-id order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional


class ProtocolKind(str, Enum):
    LEACH = "leach"
    SEP = "sep"
    TEEN = "teen"
    DEEC = "deec"


@dataclass
class ProtocolSpec:
    """Which baseline protocol to run, its parameters, and the ACH switch.

    SEP fields are ignored unless kind is SEP (except that DEEC reuses
    `sep_a`/`sep_m` for its initial-energy spread); TEEN fields are
    ignored unless kind is TEEN.
    """

    kind: ProtocolKind = ProtocolKind.LEACH
    popt: float = 0.05
    sep_a: float = 1.0
    sep_m: float = 0.1
    teen_hard: float = 100.0
    teen_soft: float = 2.0
    ach_enabled: bool = False
    ach_min_dist: float = 12.0

    def validate(self):
        if not (0.0 < self.popt <= 1.0):
            raise ValueError(f"protocol.popt must be in (0, 1], got {self.popt}")
        if self.sep_a < 0:
            raise ValueError(f"protocol.sep_a must be >= 0, got {self.sep_a}")
        if not (0.0 <= self.sep_m <= 1.0):
            raise ValueError(f"protocol.sep_m must be in [0, 1], got {self.sep_m}")
        if self.teen_soft <= 0:
            raise ValueError(f"protocol.teen_soft must be > 0, got {self.teen_soft}")
        if self.teen_hard <= self.teen_soft:
            raise ValueError(
                f"protocol.teen_hard must exceed teen_soft, got {self.teen_hard} <= {self.teen_soft}"
            )
        if self.ach_min_dist <= 0:
            raise ValueError(f"ach.min_dist must be > 0, got {self.ach_min_dist}")


@dataclass
class NodeElectionState:
    """Per-node bookkeeping used by the election rules."""

    node_id: int
    residual_energy: float
    last_ch_round: Optional[int] = None
    heterogeneity_factor: float = 0.0  # a_i; 0 for normal/homogeneous nodes
    is_advanced: bool = False          # SEP classification
    last_sensed_transmitted: Optional[float] = None  # TEEN internal variable


def epoch_length(p: float) -> int:
    """Rounds a node stays ineligible after serving as CH (nearest int, min 1)."""
    return max(1, round(1.0 / p))


def is_eligible(state: NodeElectionState, rnd: int, epoch_len: int) -> bool:
    """True iff the node is alive and has not served as CH in the current epoch.

    Epochs are the consecutive `epoch_len`-round windows starting at round
    0, matching the period of the threshold formula: eligibility returns at
    each epoch boundary rather than a fixed number of rounds after serving.
    A per-node rolling window would let the whole population drift into the
    certain-election round at the end of the threshold period and serve in
    lockstep, collapsing the network into CH-less direct transmission.
    """
    if state.residual_energy <= 0:
        return False
    return state.last_ch_round is None or rnd // epoch_len > state.last_ch_round // epoch_len


def leach_threshold(p: float, rnd: int, eligible: bool) -> float:
    """T(n) = p / (1 - p*(r mod round(1/p))) for eligible nodes, else 0.

    Clamped to 1 when the denominator drops to p or below, so the last
    round of an epoch elects with certainty.
    """
    if not eligible:
        return 0.0
    m = epoch_length(p)
    denom = 1.0 - p * (rnd % m)
    if denom <= p:
        return 1.0
    return min(1.0, p / denom)


def sep_probability(spec: ProtocolSpec, is_advanced: bool) -> float:
    """Class election probability: popt/(1+a*m) for normal, *(1+a) for advanced."""
    pnrm = spec.popt / (1.0 + spec.sep_a * spec.sep_m)
    if is_advanced:
        return pnrm * (1.0 + spec.sep_a)
    return pnrm


def network_average_energy(energies: Iterable[float], n_total: int) -> float:
    """Sum of alive nodes' residual energies divided by the deployed node count."""
    if n_total < 1:
        raise ValueError(f"n_total must be >= 1, got {n_total}")
    return math.fsum(energies) / n_total


# Cap keeps the threshold denominator positive for very high-energy nodes.
DEEC_P_MAX = 0.999


def deec_probability(
    spec: ProtocolSpec,
    state: NodeElectionState,
    avg_energy: float,
    sum_a: float,
    n_total: int,
) -> float:
    """Per-node CH probability popt*N*(1+a_i)*Ei / ((N + sum a_j) * avg)."""
    if avg_energy <= 0:
        raise ValueError("avg_energy must be > 0 (network is dead otherwise)")
    pi = (
        spec.popt
        * n_total
        * (1.0 + state.heterogeneity_factor)
        * state.residual_energy
        / ((n_total + sum_a) * avg_energy)
    )
    return min(pi, DEEC_P_MAX)


def deec_threshold(pi: float, rnd: int, eligible: bool) -> float:
    """LEACH-style threshold with the node-specific probability pi."""
    if pi <= 0.0 or not eligible:
        return 0.0
    return leach_threshold(pi, rnd, True)


def teen_should_transmit(
    sensed: float, hard: float, soft: float, last_sent: Optional[float]
) -> bool:
    """Hard/soft threshold gate.

    Nothing is sent below the hard threshold. The first crossing always
    transmits; after that a transmission needs the sensed value to have
    moved at least `soft` from the last transmitted value. The caller
    updates `last_sent` to `sensed` exactly when this returns True.
    """
    if sensed < hard:
        return False
    if last_sent is None:
        return True
    return abs(sensed - last_sent) >= soft


def node_probability(
    spec: ProtocolSpec,
    state: NodeElectionState,
    avg_energy: float,
    sum_a: float,
    n_total: int,
) -> float:
    """The election probability a node uses under the configured protocol."""
    if spec.kind is ProtocolKind.SEP:
        return sep_probability(spec, state.is_advanced)
    if spec.kind is ProtocolKind.DEEC:
        return deec_probability(spec, state, avg_energy, sum_a, n_total)
    # LEACH and TEEN share the uniform election rule.
    return spec.popt


def elect_candidates(
    spec: ProtocolSpec,
    states: Iterable[NodeElectionState],
    rnd: int,
    avg_energy: float,
    rng,
) -> set[int]:
    """Draw one uniform per alive node (ascending node_id) and elect those
    whose draw falls strictly below their threshold."""
    states = sorted(states, key=lambda s: s.node_id)
    sum_a = math.fsum(s.heterogeneity_factor for s in states)
    n_total = len(states)
    elected: set[int] = set()
    for st in states:
        if st.residual_energy <= 0:
            continue
        p = node_probability(spec, st, avg_energy, sum_a, n_total)
        if p <= 0:
            t = 0.0
        else:
            eligible = is_eligible(st, rnd, epoch_length(p))
            t = leach_threshold(p, rnd, eligible)
        if rng.random() < t:
            elected.add(st.node_id)
    return elected
