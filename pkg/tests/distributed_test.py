from dataclasses import fields

import numpy as np
import pytest

from qresilience.average import ORIGINAL, RULER, AverageConfig, SampledMode, run_average, sample_trajectories
from qresilience.distributed import (
    WIRE_FORMAT,
    Channel,
    ChannelConfig,
    ClassicalMessage,
    NodeAgent,
    QuantumBackplane,
    StarNetwork,
    run_distributed_experiment,
    run_distributed_round,
)
from qresilience.errors import ChannelDropError, DomainError
from qresilience.noise import StaticNoiseSpec

VALUES = (0.3, -0.1, 0.45)
THETA = 0.125


def test_wire_layout():
    payload = ClassicalMessage(7, 1).encode()
    assert payload == b"\x00\x00\x00\x07\x01"
    assert WIRE_FORMAT.size == 5
    assert ClassicalMessage.decode(payload) == ClassicalMessage(7, 1)


def test_message_validation():
    with pytest.raises(DomainError):
        ClassicalMessage(1, 2)
    with pytest.raises(DomainError):
        ClassicalMessage.decode(b"\x00\x01")


def test_channel_is_fifo():
    channel = Channel()
    for sender in (3, 1, 2):
        channel.send(ClassicalMessage(sender, sender % 2))
    assert [m.sender for m in channel.drain()] == [3, 1, 2]
    assert channel.drain() == []
    assert channel.bits_sent == 3


def test_drop_probability_validation():
    with pytest.raises(DomainError):
        ChannelConfig(1.5)


@pytest.mark.parametrize("values", [VALUES, (0.1, -0.3, 0.5, 0.2, -0.4)])
def test_transcripts_replay_sampled_mode(values):
    alpha, seed = 100, 42
    noise = StaticNoiseSpec.symmetric(0.85, len(values))
    batch = sample_trajectories(AverageConfig(values, THETA, RULER, noise, SampledMode(alpha, seed)))
    network = StarNetwork(values, THETA, noise, seed)
    for row in range(alpha):
        transcript = network.run_round()
        assert transcript.outcome_bits == tuple(int(b) for b in batch.outcomes[row])
        assert transcript.ruler_bit == int(batch.ruler[row])
        assert transcript.parity == int(batch.parities[row])
    assert network.bits_transmitted == alpha * len(values)


def test_single_round_equals_first_sampled_row():
    noise = StaticNoiseSpec.symmetric(0.9, 3)
    transcript = run_distributed_round(VALUES, THETA, noise, seed=5)
    batch = sample_trajectories(AverageConfig(VALUES, THETA, RULER, noise, SampledMode(1, 5)))
    assert transcript.ruler_bit == int(batch.ruler[0])
    assert transcript.message_count == 3
    assert transcript.final_estimate in (0.0, pytest.approx(np.pi))


def test_delivery_order_does_not_change_result():
    noise = StaticNoiseSpec.symmetric(0.8, 3)
    plain = StarNetwork(VALUES, THETA, noise, seed=11)
    shuffled = StarNetwork(VALUES, THETA, noise, seed=11)
    for _ in range(20):
        a = plain.run_round()
        b = shuffled.run_round(delivery_order=[3, 1, 2])
        assert (a.parity, a.ruler_bit, a.outcome_bits) == (b.parity, b.ruler_bit, b.outcome_bits)
        assert [m.sender for m in b.messages] == [3, 1, 2]


def test_delivery_order_must_be_permutation():
    network = StarNetwork(VALUES, THETA)
    with pytest.raises(DomainError):
        network.run_round(delivery_order=[1, 2])


def test_dropped_message_aborts_round():
    network = StarNetwork(VALUES, THETA, channel_config=ChannelConfig(1.0, seed=0))
    with pytest.raises(ChannelDropError) as info:
        network.run_round()
    assert info.value.sender == 1
    assert info.value.round_index == 0


def test_backplane_enforces_measurement_order():
    backplane = QuantumBackplane(AverageConfig(VALUES, THETA, RULER))
    with pytest.raises(DomainError):
        backplane.measure_x(2)
    backplane.measure_x(1)
    with pytest.raises(DomainError):
        backplane.apply_phase(1, 0.1)
    with pytest.raises(DomainError):
        backplane.readout(0)


def test_backplane_requires_ruler_variant():
    with pytest.raises(DomainError):
        QuantumBackplane(AverageConfig(VALUES, THETA, ORIGINAL))


def test_experiment_report_matches_sampled_run():
    noise = StaticNoiseSpec.symmetric(0.9, 3)
    alpha, seed = 300, 3
    distributed = run_distributed_experiment(VALUES, THETA, noise, alpha, seed)
    sampled = run_average(AverageConfig(VALUES, THETA, RULER, noise, SampledMode(alpha, seed)))
    assert distributed.p_zero == sampled.p_zero
    assert distributed.byproduct_parity_histogram == sampled.byproduct_parity_histogram
    assert distributed.fidelity == pytest.approx(sampled.fidelity, abs=1e-12)


def test_experiment_rejects_zero_rounds():
    with pytest.raises(DomainError):
        run_distributed_experiment(VALUES, THETA, alpha=0)


class RecordingBackplane:
    def __init__(self):
        self.calls = []

    def apply_phase(self, node_id, angle):
        self.calls.append(("phase", node_id))

    def measure_x(self, node_id):
        self.calls.append(("measure", node_id))
        return 0


def test_nodes_only_reach_their_own_qubit():
    network = StarNetwork(VALUES, THETA)
    for node in network.nodes:
        backplane = RecordingBackplane()
        node.shift(backplane, len(network.nodes), THETA)
        assert node.measure(backplane) == ClassicalMessage(node.id, 0)
        assert backplane.calls == [("phase", node.id), ("measure", node.id)]
    assert [f.name for f in fields(NodeAgent)] == ["id", "private_value", "channel"]
    assert [f.name for f in fields(ClassicalMessage)] == ["sender", "bit"]
    assert not any(isinstance(v, AverageConfig) for v in vars(network.backplane).values())


def test_network_experiment_uses_its_own_parameters():
    noise = StaticNoiseSpec.symmetric(0.9, 3)
    report = StarNetwork(VALUES, THETA, noise, seed=3).run_experiment(300)
    expected = run_distributed_experiment(VALUES, THETA, noise, 300, 3)
    assert report.p_zero == expected.p_zero
    assert report.distance_ratio == expected.distance_ratio
    with pytest.raises(DomainError):
        StarNetwork(VALUES, THETA).run_experiment(0)
