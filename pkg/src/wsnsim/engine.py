"""Round-based network lifecycle: deployment, election, ACH confirmation,
association, data transmission, energy accounting and metrics.

A run is a pure function of its NetworkConfig. Randomness comes from
three streams derived from the run seed (deployment, election, TEEN
sensing), so matched runs of different protocol kinds consume election
draws at identical stream positions. Draw order is fixed: deployment
first, then per round election draws in node-id order, then TEEN
sensing draws in node-id order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ach import ChCandidate, ach_filter
from .energy import EnergyModel, Position
from .protocols import (
    NodeElectionState,
    ProtocolKind,
    ProtocolSpec,
    epoch_length,
    leach_threshold,
    sep_probability,
)


class ConfigError(ValueError):
    """A configuration value failed validation; message names the key."""


@dataclass
class NetworkConfig:
    field_width: float = 100.0
    field_height: float = 100.0
    n_nodes: int = 100
    bs_position: Position = field(default_factory=lambda: Position(50.0, 50.0))
    packet_bits: int = 4000
    max_rounds: int = 8000
    seed: int = 1
    protocol: ProtocolSpec = field(default_factory=ProtocolSpec)
    energy: EnergyModel = field(default_factory=EnergyModel)
    initial_energy_normal: float = 0.25

    def validate(self):
        if self.field_width <= 0 or self.field_height <= 0:
            raise ConfigError(
                f"field_width/field_height must be > 0, got {self.field_width}x{self.field_height}"
            )
        if self.n_nodes < 1:
            raise ConfigError(f"n_nodes must be >= 1, got {self.n_nodes}")
        if self.packet_bits < 1:
            raise ConfigError(f"packet_bits must be >= 1, got {self.packet_bits}")
        if self.max_rounds < 1:
            raise ConfigError(f"max_rounds must be >= 1, got {self.max_rounds}")
        if not (0.0 <= self.bs_position.x <= self.field_width):
            raise ConfigError(f"bs.x must lie within the field, got {self.bs_position.x}")
        if not (0.0 <= self.bs_position.y <= self.field_height):
            raise ConfigError(f"bs.y must lie within the field, got {self.bs_position.y}")
        if self.initial_energy_normal <= 0:
            raise ConfigError(
                f"initial_energy_normal must be > 0, got {self.initial_energy_normal}"
            )
        try:
            self.protocol.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class Node:
    election: NodeElectionState
    position: Position

    @property
    def alive(self) -> bool:
        return self.election.residual_energy > 0


@dataclass
class ClusterAssignment:
    """Per-round mapping of member nodes to confirmed CHs."""

    clusters: dict[int, list[int]]  # ch node_id -> member node_ids
    direct_to_bs: list[int]         # members with no CH to join


@dataclass
class RoundMetrics:
    round: int
    alive: int
    dead: int
    ch_count: int
    packets_to_bs_cum: int
    packets_to_ch_cum: int
    total_residual_energy_j: float
    # Dissipation charged this round; not part of the CSV schema.
    energy_spent_j: float = 0.0


@dataclass
class SimulationResult:
    config: NetworkConfig
    rounds: list[RoundMetrics]
    positions: np.ndarray                    # (n_nodes, 2)
    ch_rounds: list[np.ndarray]              # per round, ascending confirmed CH ids
    ch_history: list[tuple[int, int, int]]   # (round, node_id, epoch_len at election)
    first_death_round: int                   # -1 if no node died
    last_death_round: int                    # -1 if the network survived max_rounds
    final_packets_to_bs: int
    final_packets_to_ch: int


def deploy(config: NetworkConfig, rng) -> list[Node]:
    """Place nodes uniformly over the field and assign initial energies.

    Draw order: one (x, y) uniform pair per node in id order; then for
    SEP one permutation (first floor(m*n) entries are advanced); for
    DEEC one uniform per node in id order for the energy spread.
    """
    n = config.n_nodes
    spec = config.protocol
    e0 = config.initial_energy_normal
    u = rng.random((n, 2))
    xs = u[:, 0] * config.field_width
    ys = u[:, 1] * config.field_height

    energies = np.full(n, e0)
    a_i = np.zeros(n)
    advanced = np.zeros(n, dtype=bool)
    if spec.kind is ProtocolKind.SEP:
        perm = rng.permutation(n)
        advanced[perm[: int(spec.sep_m * n)]] = True
        energies[advanced] = e0 * (1.0 + spec.sep_a)
        a_i[advanced] = spec.sep_a
    elif spec.kind is ProtocolKind.DEEC:
        spread = rng.random(n)
        energies = e0 * (1.0 + spec.sep_a * spread)
        a_i = energies / e0 - 1.0

    return [
        Node(
            election=NodeElectionState(
                node_id=i,
                residual_energy=float(energies[i]),
                heterogeneity_factor=float(a_i[i]),
                is_advanced=bool(advanced[i]),
            ),
            position=Position(float(xs[i]), float(ys[i])),
        )
        for i in range(n)
    ]


def associate(members: list[Node], chs: list[Node]) -> ClusterAssignment:
    """Assign each member to its nearest confirmed CH (ties to the lowest
    CH id); with no CHs all members go direct to the BS."""
    if not chs:
        return ClusterAssignment(
            clusters={}, direct_to_bs=[m.election.node_id for m in members]
        )
    chs = sorted(chs, key=lambda c: c.election.node_id)
    clusters: dict[int, list[int]] = {c.election.node_id: [] for c in chs}
    for m in members:
        best = min(
            chs,
            key=lambda c: (
                (m.position.x - c.position.x) ** 2 + (m.position.y - c.position.y) ** 2,
                c.election.node_id,
            ),
        )
        clusters[best.election.node_id].append(m.election.node_id)
    return ClusterAssignment(clusters=clusters, direct_to_bs=[])


def _tx_vec(model: EnergyModel, k: int, d: np.ndarray) -> np.ndarray:
    # Mirrors EnergyModel.tx_energy elementwise, bit for bit.
    d2 = d * d
    return np.where(
        d < model.d0,
        model.e_elec * k + model.eps_fs * k * d2,
        model.e_elec * k + model.eps_mp * k * (d2 * d2),
    )


class Simulation:
    """One seeded run over a mutable network state.

    `nodes`, `rng_elect` and `rng_sense` may be injected for scripted
    tests; by default they derive deterministically from config.seed.
    """

    def __init__(
        self,
        config: NetworkConfig,
        nodes: Optional[list[Node]] = None,
        rng_elect=None,
        rng_sense=None,
    ):
        config.validate()
        self.config = config
        ss = np.random.SeedSequence(config.seed)
        s_deploy, s_elect, s_sense = ss.spawn(3)
        if nodes is None:
            nodes = deploy(config, np.random.default_rng(s_deploy))
        if len(nodes) != config.n_nodes:
            raise ConfigError(
                f"n_nodes={config.n_nodes} but {len(nodes)} nodes supplied"
            )
        self.rng_elect = rng_elect if rng_elect is not None else np.random.default_rng(s_elect)
        self.rng_sense = rng_sense if rng_sense is not None else np.random.default_rng(s_sense)

        n = config.n_nodes
        self.pos = np.array([[nd.position.x, nd.position.y] for nd in nodes])
        self.energy = np.array([nd.election.residual_energy for nd in nodes])
        self.a_i = np.array([nd.election.heterogeneity_factor for nd in nodes])
        self.advanced = np.array([nd.election.is_advanced for nd in nodes])
        self.last_ch = np.full(n, -1, dtype=np.int64)
        self.last_sent = np.full(n, np.nan)
        self.sum_a = float(math.fsum(self.a_i))
        dx = self.pos[:, 0] - config.bs_position.x
        dy = self.pos[:, 1] - config.bs_position.y
        self.d_bs = np.sqrt(dx * dx + dy * dy)

        self.packets_to_bs = 0
        self.packets_to_ch = 0
        self.metrics: list[RoundMetrics] = []
        self.ch_rounds: list[np.ndarray] = []
        self.ch_history: list[tuple[int, int, int]] = []

        spec = config.protocol
        if spec.kind is ProtocolKind.SEP:
            p_adv = sep_probability(spec, True)
            p_nrm = sep_probability(spec, False)
            self._p_node = np.where(self.advanced, p_adv, p_nrm)
            self._epoch_node = np.where(
                self.advanced, epoch_length(p_adv), epoch_length(p_nrm)
            ).astype(np.int64)
        elif spec.kind is not ProtocolKind.DEEC:
            self._p_node = np.full(n, spec.popt)
            self._epoch_node = np.full(n, epoch_length(spec.popt), dtype=np.int64)

    @property
    def alive_count(self) -> int:
        return int((self.energy > 0).sum())

    def snapshot_nodes(self) -> list[Node]:
        """Materialize the current state as Node values (for inspection)."""
        return [
            Node(
                election=NodeElectionState(
                    node_id=i,
                    residual_energy=float(self.energy[i]),
                    last_ch_round=int(self.last_ch[i]) if self.last_ch[i] >= 0 else None,
                    heterogeneity_factor=float(self.a_i[i]),
                    is_advanced=bool(self.advanced[i]),
                    last_sensed_transmitted=(
                        float(self.last_sent[i]) if not np.isnan(self.last_sent[i]) else None
                    ),
                ),
                position=Position(float(self.pos[i, 0]), float(self.pos[i, 1])),
            )
            for i in range(self.config.n_nodes)
        ]

    def _thresholds(self, rnd: int, alive: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per-node election threshold and epoch length for this round."""
        cfg = self.config
        spec = cfg.protocol
        n = cfg.n_nodes
        if spec.kind is ProtocolKind.DEEC:
            avg = float(self.energy.sum()) / n
            p = np.zeros(n)
            p[alive] = (
                spec.popt
                * n
                * (1.0 + self.a_i[alive])
                * self.energy[alive]
                / ((n + self.sum_a) * avg)
            )
            np.minimum(p, 0.999, out=p)
            epoch = np.ones(n, dtype=np.int64)
            epoch[alive] = np.maximum(1, np.rint(1.0 / p[alive])).astype(np.int64)
        else:
            p = self._p_node
            epoch = self._epoch_node
        # Eligibility returns at epoch boundaries (see protocols.is_eligible).
        eligible = alive & ((self.last_ch < 0) | (rnd // epoch > self.last_ch // epoch))
        denom = 1.0 - p * np.mod(rnd, epoch)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(denom <= p, 1.0, np.minimum(1.0, p / denom))
        t = np.where(eligible & (p > 0), t, 0.0)
        return t, epoch

    def run_round(self, rnd: int) -> RoundMetrics:
        """One protocol cycle.

        Charge order within the data phase (one subtraction per line):
        member TX to its CH; per-CH RX of all received packets; per-CH
        aggregation plus TX to BS as one combined charge; direct-to-BS
        member TX when no CH exists. Nodes overdrawing die at round end
        after completing the round in full.
        """
        cfg = self.config
        spec = cfg.protocol
        model = cfg.energy
        k = cfg.packet_bits
        n = cfg.n_nodes
        teen = spec.kind is ProtocolKind.TEEN

        alive = self.energy > 0.0
        alive_idx = np.flatnonzero(alive)
        if alive_idx.size == 0:
            raise RuntimeError("run_round called on a dead network")

        # (1)-(2) election
        t, epoch = self._thresholds(rnd, alive)
        draws = self.rng_elect.random(alive_idx.size)
        cand = alive_idx[draws < t[alive_idx]]

        # (3) ACH confirmation
        if spec.ach_enabled and cand.size > 1:
            accepted, _ = ach_filter(
                [
                    ChCandidate(
                        int(i),
                        Position(float(self.pos[i, 0]), float(self.pos[i, 1])),
                        float(self.energy[i]),
                    )
                    for i in cand
                ],
                spec.ach_min_dist,
            )
            chs = np.array(sorted(accepted), dtype=np.int64)
        else:
            chs = cand.astype(np.int64)
        self.last_ch[chs] = rnd
        for i in chs:
            self.ch_history.append((rnd, int(i), int(epoch[i])))
        self.ch_rounds.append(chs.copy())

        is_member = alive.copy()
        is_member[chs] = False
        mem = np.flatnonzero(is_member)

        # TEEN sensing draws for every alive node, id order
        if teen:
            sensed = np.full(n, np.nan)
            sensed[alive_idx] = self.rng_sense.uniform(
                0.0, 2.0 * spec.teen_hard, alive_idx.size
            )
            have = ~np.isnan(self.last_sent)
            gate = (sensed >= spec.teen_hard) & (
                ~have | (np.abs(sensed - self.last_sent) >= spec.teen_soft)
            )
            gate &= alive
            self.last_sent[gate] = sensed[gate]

        # (4)-(5) association and data phase
        parts: list[float] = []
        if chs.size > 0:
            tmask = gate[mem] if teen else np.ones(mem.size, dtype=bool)
            if mem.size > 0:
                dx = self.pos[mem, 0][:, None] - self.pos[chs, 0][None, :]
                dy = self.pos[mem, 1][:, None] - self.pos[chs, 1][None, :]
                dist_mc = np.sqrt(dx * dx + dy * dy)
                assign = np.argmin(dist_mc, axis=1)
                d_own = dist_mc[np.arange(mem.size), assign]
                tx_m = _tx_vec(model, k, d_own[tmask])
                self.energy[mem[tmask]] -= tx_m
                parts.append(float(tx_m.sum()))
                recv = np.bincount(assign[tmask], minlength=chs.size)
                self.packets_to_ch += int(tmask.sum())
            else:
                recv = np.zeros(chs.size, dtype=np.int64)
            rx = model.e_elec * k * recv
            self.energy[chs] -= rx
            parts.append(float(rx.sum()))
            fwd = model.e_da * k * (recv + 1) + _tx_vec(model, k, self.d_bs[chs])
            if teen:
                active = (recv > 0) | gate[chs]
                fwd = np.where(active, fwd, 0.0)
                self.packets_to_bs += int(active.sum())
            else:
                self.packets_to_bs += int(chs.size)
            self.energy[chs] -= fwd
            parts.append(float(fwd.sum()))
        elif mem.size > 0:
            tmask = gate[mem] if teen else np.ones(mem.size, dtype=bool)
            tx_d = _tx_vec(model, k, self.d_bs[mem[tmask]])
            self.energy[mem[tmask]] -= tx_d
            parts.append(float(tx_d.sum()))
            self.packets_to_bs += int(tmask.sum())

        # (6) deaths at round end; overdraw is not counted as dissipation
        dying = alive & (self.energy <= 0.0)
        overdraw = float(np.clip(-self.energy[dying], 0.0, None).sum())
        self.energy[dying] = 0.0
        spent = math.fsum(parts) - overdraw

        # (7) metrics snapshot
        alive_after = int((self.energy > 0.0).sum())
        metrics = RoundMetrics(
            round=rnd,
            alive=alive_after,
            dead=n - alive_after,
            ch_count=int(chs.size),
            packets_to_bs_cum=self.packets_to_bs,
            packets_to_ch_cum=self.packets_to_ch,
            total_residual_energy_j=math.fsum(self.energy),
            energy_spent_j=spent,
        )
        self.metrics.append(metrics)
        return metrics

    def run(self) -> SimulationResult:
        rnd = 0
        while rnd < self.config.max_rounds and self.alive_count > 0:
            self.run_round(rnd)
            rnd += 1
        first_death = next((m.round for m in self.metrics if m.dead > 0), -1)
        last_death = next((m.round for m in self.metrics if m.alive == 0), -1)
        return SimulationResult(
            config=self.config,
            rounds=self.metrics,
            positions=self.pos,
            ch_rounds=self.ch_rounds,
            ch_history=self.ch_history,
            first_death_round=first_death,
            last_death_round=last_death,
            final_packets_to_bs=self.packets_to_bs,
            final_packets_to_ch=self.packets_to_ch,
        )


def run_simulation(config: NetworkConfig) -> SimulationResult:
    """Run a full seeded simulation from a validated config."""
    return Simulation(config).run()
