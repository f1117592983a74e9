"""
Star-graph execution of the ruler-variant average algorithm.

Each outer node holds one private value, phase-shifts and measures its own
qubit, and sends a single classical bit to the ruler over an in-process
channel. The ruler XORs the bits, applies the byproduct correction and
reads itself out.

Entanglement cannot be split across processes, so the quantum state lives
in one shared backplane. Nodes only ever talk to the backplane about their
own qubit; the backplane serializes every request under a lock and draws
randomness from one Generator in the same order as sampled mode, so a
distributed run replays the monolithic trajectory bit for bit.
"""

import logging
import struct
import threading
from dataclasses import dataclass, field
from queue import Empty, Queue
from typing import Optional

import numpy as np

from .average import (
    RULER,
    AverageConfig,
    SampledMode,
    branch_table_from_state,
    estimate_ratio,
    measure_and_correct,
    phase_angle,
    prepared_state,
    report_from_p_zero,
)
from .config import DEFAULT_SEED
from .errors import ChannelDropError, DomainError
from .qstate import apply_local, phase_gate

logger = logging.getLogger(__name__)

# sender id (u32), bit (u8), big-endian
WIRE_FORMAT = struct.Struct(">IB")


@dataclass(frozen=True)
class ClassicalMessage:
    sender: int
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise DomainError(f"payload must be a single bit, got {self.bit}", field="bit")
        if not 0 <= self.sender < 2 ** 32:
            raise DomainError(f"sender id {self.sender} does not fit u32", field="sender")

    def encode(self):
        return WIRE_FORMAT.pack(self.sender, self.bit)

    @classmethod
    def decode(cls, payload):
        if len(payload) != WIRE_FORMAT.size:
            raise DomainError(
                f"expected {WIRE_FORMAT.size} bytes, got {len(payload)}", field="payload"
            )
        sender, bit = WIRE_FORMAT.unpack(payload)
        return cls(sender, bit)


@dataclass(frozen=True)
class ChannelConfig:
    drop_probability: float = 0.0
    seed: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.drop_probability <= 1.0:
            raise DomainError(
                f"drop probability must lie in [0, 1], got {self.drop_probability}",
                field="drop_probability",
            )


@dataclass(frozen=True)
class RoundTranscript:
    messages: tuple
    parity: int
    final_estimate: float
    message_count: int
    ruler_bit: int

    @property
    def outcome_bits(self):
        """Measurement bits ordered by sender id."""
        return tuple(m.bit for m in sorted(self.messages, key=lambda m: m.sender))


class Channel:
    """FIFO link from the outer nodes to the ruler; drops use their own generator."""

    def __init__(self, config=None):
        self.config = config or ChannelConfig()
        self._queue = Queue()
        self._rng = np.random.default_rng(self.config.seed)
        self.bits_sent = 0
        self.dropped = 0

    def send(self, message):
        self.bits_sent += 1
        if self.config.drop_probability and self._rng.random() < self.config.drop_probability:
            self.dropped += 1
            logger.debug("channel dropped message from node %d", message.sender)
            return
        self._queue.put_nowait(message.encode())

    def drain(self):
        received = []
        while True:
            try:
                received.append(ClassicalMessage.decode(self._queue.get_nowait()))
            except Empty:
                return received


class QuantumBackplane:
    """Single owner of the shared register; requests are served in arrival order."""

    def __init__(self, config, seed=DEFAULT_SEED):
        if config.variant != RULER:
            raise DomainError("the star harness runs the ruler variant", field="variant")
        self._resource = prepared_state(config)
        self._rng = np.random.default_rng(seed)
        self._lock = threading.Lock()
        self._cache_key = None
        self._table = None
        self._state = None
        self.reset()

    def reset(self):
        with self._lock:
            self._phases = []
            self._prefix = 0
            self._depth = 0

    def apply_phase(self, node_id, angle):
        with self._lock:
            if self._depth:
                raise DomainError("phase shifts must precede measurements", field="node_id")
            self._phases.append((node_id, angle))

    def _round_table(self):
        key = tuple(self._phases)
        if key != self._cache_key:
            rho = self._resource
            for node_id, angle in key:
                rho = apply_local(rho, phase_gate(angle), [node_id + 1])
            self._state = rho
            self._table = branch_table_from_state(rho)
            self._cache_key = key
        return self._table

    def shifted_state(self):
        with self._lock:
            self._round_table()
            return self._state

    def measure_x(self, node_id):
        """sigma_x measurement of node `node_id`'s qubit (qubit node_id + 1)."""
        with self._lock:
            table = self._round_table()
            expected = table.measured[self._depth] - 1
            if node_id != expected:
                raise DomainError(
                    f"node {node_id} measured out of turn (expected {expected})", field="node_id"
                )
            bit = table.next_outcome(self._prefix, self._depth, self._rng.random())
            self._prefix = 2 * self._prefix + bit
            self._depth += 1
            return bit

    def readout(self, correction_parity):
        """Apply R(pi)^parity to the ruler, then H and a z measurement."""
        with self._lock:
            table = self._round_table()
            if self._depth != table.width:
                raise DomainError("ruler read out before every node measured", field="depth")
            branch_parity = bin(self._prefix).count("1") % 2
            return table.ruler_outcome(
                self._prefix, self._rng.random(), corrected=correction_parity == branch_parity
            )


@dataclass
class NodeAgent:
    id: int
    private_value: float
    channel: Channel = field(repr=False)

    def shift(self, backplane, n_values, theta):
        backplane.apply_phase(self.id, phase_angle(self.private_value, n_values, theta))

    def measure(self, backplane):
        return ClassicalMessage(self.id, backplane.measure_x(self.id))


class StarNetwork:
    """Ruler at the hub, one NodeAgent per value on the rim (ids 1..N)."""

    def __init__(self, values, theta, noise=None, seed=DEFAULT_SEED, channel_config=None):
        self.config = AverageConfig(tuple(values), theta, RULER, noise)
        self.theta = theta
        self.seed = seed
        self.channel = Channel(channel_config)
        self.backplane = QuantumBackplane(self.config, seed)
        self.nodes = [
            NodeAgent(j, v, self.channel) for j, v in enumerate(self.config.values, start=1)
        ]
        self.rounds = 0

    @property
    def bits_transmitted(self):
        return self.channel.bits_sent

    def run_round(self, delivery_order=None):
        self.backplane.reset()
        n = len(self.nodes)
        for node in self.nodes:
            node.shift(self.backplane, n, self.theta)
        outgoing = {node.id: node.measure(self.backplane) for node in self.nodes}

        order = delivery_order or [node.id for node in self.nodes]
        if sorted(order) != sorted(outgoing):
            raise DomainError(f"delivery order {order} is not a permutation of node ids", field="delivery_order")
        for node_id in order:
            self.channel.send(outgoing[node_id])

        received = self.channel.drain()
        missing = sorted(set(outgoing) - {m.sender for m in received})
        if missing:
            raise ChannelDropError(missing[0], self.rounds)

        parity = 0
        for message in received:
            parity ^= message.bit
        ruler_bit = self.backplane.readout(parity)
        self.rounds += 1
        return RoundTranscript(
            messages=tuple(received),
            parity=parity,
            final_estimate=estimate_ratio(1.0 - ruler_bit),
            message_count=len(received),
            ruler_bit=ruler_bit,
        )

    def run_experiment(self, alpha):
        """Aggregate alpha rounds into the same report sampled mode produces."""
        if alpha < 1:
            raise DomainError(f"alpha must be >= 1, got {alpha}", field="alpha")
        transcripts = [self.run_round() for _ in range(alpha)]

        ruler_bits = np.array([t.ruler_bit for t in transcripts])
        parities = np.array([t.parity for t in transcripts])
        histogram = {0: int(np.sum(parities == 0)), 1: int(np.sum(parities == 1))}
        config = AverageConfig(
            self.config.values, self.theta, RULER, self.config.noise, SampledMode(alpha, self.seed)
        )
        ruler_state = measure_and_correct(self.backplane.shifted_state())
        logger.info("distributed run: %d rounds, %d bits on the wire", alpha, self.bits_transmitted)
        return report_from_p_zero(config, float(np.mean(ruler_bits == 0)), ruler_state, histogram)


def run_distributed_round(values, theta, noise=None, seed=DEFAULT_SEED, channel_config=None):
    """One trajectory; equal to the first row of a sampled run with the same seed."""
    return StarNetwork(values, theta, noise, seed, channel_config).run_round()


def run_distributed_experiment(values, theta, noise=None, alpha=1, seed=DEFAULT_SEED,
                               channel_config=None):
    return StarNetwork(values, theta, noise, seed, channel_config).run_experiment(alpha)
