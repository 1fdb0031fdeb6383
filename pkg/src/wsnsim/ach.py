"""ACH: demote cluster heads that confirmed too close to another CH.

Candidates are processed greedily in descending residual-energy order
(ascending node_id on ties). A candidate is demoted iff it lies within
`min_dist` of an already-accepted candidate, so every pair of surviving
CHs ends up at least `min_dist` apart. Demoted nodes revert to normal
members for the round and keep their election eligibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .energy import Position, distance


@dataclass(frozen=True)
class ChCandidate:
    node_id: int
    position: Position
    residual_energy: float


def ach_filter(
    candidates: Sequence[ChCandidate], min_dist: float
) -> tuple[set[int], set[int]]:
    """Split candidates into (accepted, demoted) CH id sets."""
    if min_dist <= 0:
        raise ValueError(f"min_dist must be > 0, got {min_dist}")
    order = sorted(candidates, key=lambda c: (-c.residual_energy, c.node_id))
    accepted: list[ChCandidate] = []
    demoted: set[int] = set()
    for cand in order:
        # Only surviving CHs block; demoted ones are normal nodes again.
        if any(distance(cand.position, a.position) < min_dist for a in accepted):
            demoted.add(cand.node_id)
        else:
            accepted.append(cand)
    return {a.node_id for a in accepted}, demoted


def pairwise_min_distance(positions: Sequence[Position]) -> float:
    """Minimum distance over all unordered pairs; needs at least 2 positions."""
    if len(positions) < 2:
        raise ValueError("pairwise_min_distance needs at least 2 positions")
    return min(distance(a, b) for a, b in combinations(positions, 2))
