import dataclasses
import math

import numpy as np
import pytest

from conftest import ScriptedRng
from wsnsim import (
    ConfigError,
    NetworkConfig,
    Node,
    NodeElectionState,
    Position,
    ProtocolKind,
    ProtocolSpec,
    Simulation,
    associate,
    deploy,
    elect_candidates,
    run_simulation,
)


def make_node(node_id, x, y, energy=0.5):
    return Node(
        election=NodeElectionState(node_id=node_id, residual_energy=energy),
        position=Position(x, y),
    )


class TestDeploy:
    def test_single_homogeneous_node(self):
        cfg = NetworkConfig(n_nodes=1)
        nodes = deploy(cfg, np.random.default_rng(0))
        assert len(nodes) == 1
        assert nodes[0].election.residual_energy == cfg.initial_energy_normal

    def test_deterministic(self):
        cfg = NetworkConfig(seed=7)
        a = Simulation(cfg)
        b = Simulation(cfg)
        assert np.array_equal(a.pos, b.pos)
        assert np.array_equal(a.energy, b.energy)

    def test_positions_within_field(self):
        cfg = NetworkConfig(field_width=80.0, field_height=40.0, bs_position=Position(40, 20))
        nodes = deploy(cfg, np.random.default_rng(1))
        for nd in nodes:
            assert 0 <= nd.position.x <= 80
            assert 0 <= nd.position.y <= 40

    def test_sep_advanced_fraction(self):
        cfg = NetworkConfig(protocol=ProtocolSpec(kind=ProtocolKind.SEP))
        nodes = deploy(cfg, np.random.default_rng(2))
        advanced = [nd for nd in nodes if nd.election.is_advanced]
        assert len(advanced) == 10
        for nd in advanced:
            assert nd.election.residual_energy == pytest.approx(0.5)
            assert nd.election.heterogeneity_factor == pytest.approx(1.0)

    def test_deec_energy_spread(self):
        cfg = NetworkConfig(protocol=ProtocolSpec(kind=ProtocolKind.DEEC))
        nodes = deploy(cfg, np.random.default_rng(3))
        e0 = cfg.initial_energy_normal
        for nd in nodes:
            e = nd.election.residual_energy
            assert e0 <= e <= e0 * 2
            assert nd.election.heterogeneity_factor == pytest.approx(e / e0 - 1)


class TestAssociate:
    def test_tie_goes_to_lower_ch_id(self):
        member = make_node(0, 10, 0)
        chs = [make_node(7, 20, 0), make_node(3, 0, 0)]
        res = associate([member], chs)
        assert res.clusters[3] == [0]
        assert res.clusters[7] == []

    def test_no_chs_direct_to_bs(self):
        members = [make_node(i, i, 0) for i in range(4)]
        res = associate(members, [])
        assert res.clusters == {}
        assert res.direct_to_bs == [0, 1, 2, 3]

    def test_single_ch_takes_all(self):
        members = [make_node(i, i * 10, 5) for i in range(5)]
        res = associate(members, [make_node(9, 50, 50)])
        assert res.clusters[9] == [0, 1, 2, 3, 4]
        assert res.direct_to_bs == []


class TestRunRound:
    def test_lone_ch_round_cost(self):
        cfg = NetworkConfig(
            n_nodes=1,
            max_rounds=1,
            initial_energy_normal=0.25,
            protocol=ProtocolSpec(popt=0.05),
        )
        node = make_node(0, 30.0, 10.0, energy=0.25)
        sim = Simulation(cfg, nodes=[node], rng_elect=ScriptedRng([[0.0]]))
        m = sim.run_round(0)
        model = cfg.energy
        d_bs = math.sqrt(20.0 * 20.0 + 40.0 * 40.0)
        expected = 0.25 - (
            model.aggregation_energy(4000, 1) + model.tx_energy(4000, d_bs)
        )
        assert sim.energy[0] == pytest.approx(expected, rel=1e-12)
        assert m.ch_count == 1
        assert m.packets_to_bs_cum == 1
        assert m.packets_to_ch_cum == 0

    def test_ach_thins_close_candidates(self):
        pts = [(10, 10), (20, 10), (90, 90), (15, 10)]
        draws = [[0.0, 0.0, 0.9, 0.9]]

        def build(ach):
            cfg = NetworkConfig(
                n_nodes=4,
                initial_energy_normal=0.5,
                max_rounds=1,
                protocol=ProtocolSpec(popt=0.5, ach_enabled=ach),
            )
            nodes = [make_node(i, float(x), float(y)) for i, (x, y) in enumerate(pts)]
            return Simulation(cfg, nodes=nodes, rng_elect=ScriptedRng([list(d) for d in draws]))

        leach = build(False)
        leach.run_round(0)
        ach = build(True)
        ach.run_round(0)
        # candidates 0 and 1 are 10 m apart: ACH demotes one of them
        assert list(leach.ch_rounds[0]) == [0, 1]
        assert list(ach.ch_rounds[0]) == [0]

    def test_dead_network_rejected(self):
        cfg = NetworkConfig(n_nodes=2, max_rounds=5)
        nodes = [make_node(0, 1, 1, energy=0.0), make_node(1, 2, 2, energy=0.0)]
        sim = Simulation(cfg, nodes=nodes)
        with pytest.raises(RuntimeError):
            sim.run_round(0)


class TestElectionConsistency:
    @pytest.mark.parametrize("kind", list(ProtocolKind))
    def test_engine_matches_scalar_election(self, kind):
        cfg = NetworkConfig(seed=42, protocol=ProtocolSpec(kind=kind))
        sim = Simulation(cfg)
        states = [nd.election for nd in sim.snapshot_nodes()]
        avg = float(sim.energy.sum()) / cfg.n_nodes
        rng = np.random.default_rng(np.random.SeedSequence(42).spawn(3)[1])
        expected = elect_candidates(cfg.protocol, states, 0, avg, rng)
        sim.run_round(0)
        assert set(int(i) for i in sim.ch_rounds[0]) == expected

    def test_golden_round0_leach_seed42(self):
        sim = Simulation(NetworkConfig(seed=42))
        sim.run_round(0)
        assert sorted(int(i) for i in sim.ch_rounds[0]) == [1, 14, 43]


class TestRunSimulation:
    def test_invalid_config_rejected(self):
        with pytest.raises(ConfigError, match="max_rounds"):
            run_simulation(NetworkConfig(max_rounds=0))
        with pytest.raises(ConfigError, match="n_nodes"):
            run_simulation(NetworkConfig(n_nodes=0))
        with pytest.raises(ConfigError, match="bs"):
            run_simulation(NetworkConfig(bs_position=Position(500, 50)))

    def test_deterministic_series(self):
        cfg = NetworkConfig(n_nodes=30, max_rounds=120, seed=5)
        a = run_simulation(cfg)
        b = run_simulation(cfg)
        assert a.rounds == b.rounds

    def test_monotone_death_and_counters(self):
        cfg = NetworkConfig(n_nodes=40, max_rounds=3000, seed=6)
        res = run_simulation(cfg)
        prev = None
        for m in res.rounds:
            assert m.alive + m.dead == 40
            if prev is not None:
                assert m.alive <= prev.alive
                assert m.packets_to_bs_cum >= prev.packets_to_bs_cum
                assert m.packets_to_ch_cum >= prev.packets_to_ch_cum
                assert m.total_residual_energy_j <= prev.total_residual_energy_j + 1e-15
            prev = m
        assert res.last_death_round == res.rounds[-1].round
        assert res.rounds[-1].alive == 0
        assert 0 <= res.first_death_round <= res.last_death_round

    def test_packet_accounting_non_teen(self):
        cfg = NetworkConfig(n_nodes=40, max_rounds=400, seed=8)
        res = run_simulation(cfg)
        prev_bs = 0
        prev_alive = 40
        for m in res.rounds:
            delta = m.packets_to_bs_cum - prev_bs
            if m.ch_count > 0:
                assert delta == m.ch_count
            else:
                assert delta == prev_alive
            prev_bs = m.packets_to_bs_cum
            prev_alive = m.alive

    def test_epoch_honor_trace(self):
        cfg = NetworkConfig(n_nodes=50, max_rounds=600, seed=9)
        res = run_simulation(cfg)
        serves = {}
        for rnd, node, epoch in res.ch_history:
            if node in serves:
                prev_rnd, _ = serves[node]
                assert rnd // epoch > prev_rnd // epoch
            serves[node] = (rnd, epoch)

    def test_ach_separation_every_round(self):
        cfg = NetworkConfig(
            n_nodes=60, max_rounds=500, seed=10, protocol=ProtocolSpec(ach_enabled=True)
        )
        res = run_simulation(cfg)
        for chs in res.ch_rounds:
            for i, a in enumerate(chs):
                for b in chs[i + 1:]:
                    dx = res.positions[a, 0] - res.positions[b, 0]
                    dy = res.positions[a, 1] - res.positions[b, 1]
                    assert math.sqrt(dx * dx + dy * dy) >= 12.0

    def test_teen_traffic_never_exceeds_leach(self):
        base = NetworkConfig(n_nodes=50, max_rounds=2000, seed=11)
        leach = run_simulation(base)
        teen = run_simulation(
            dataclasses.replace(base, protocol=ProtocolSpec(kind=ProtocolKind.TEEN))
        )
        lp = [m.packets_to_ch_cum for m in leach.rounds]
        tp = [m.packets_to_ch_cum for m in teen.rounds]
        length = max(len(lp), len(tp))
        lp += [lp[-1]] * (length - len(lp))
        tp += [tp[-1]] * (length - len(tp))
        assert all(t <= l for t, l in zip(tp, lp))

    def test_energy_conservation(self):
        cfg = NetworkConfig(n_nodes=40, max_rounds=2000, seed=12)
        sim = Simulation(cfg)
        prev_total = math.fsum(sim.energy)
        res = sim.run()
        for m in res.rounds:
            delta = prev_total - m.total_residual_energy_j
            if m.energy_spent_j > 0:
                assert abs(delta - m.energy_spent_j) / m.energy_spent_j < 1e-12
            prev_total = m.total_residual_energy_j
