"""Deterministic discrete-event simulation of the silent-zero CSMA/CA MAC.

The protocol simulated here moves unicast payloads with an RTS / CTS /
DATA / ACK exchange:

* an initiator must observe the channel idle for the wait window b plus
  NIFS before its RTS, where b defaults to the longest possible frame
  airtime.  Carrier sensing detects *energized* symbols only, so the
  silent zero runs inside an RBN payload sense as idle air; waiting a full
  b is what protects an ongoing frame from being walked over.
* responders (CTS to an RTS, ACK to a clean data frame, the data frame
  after a CTS) follow after a SIFS and never contend, which gives them
  strict priority over new initiators whose NIFS-based wait is longer.
* a failed exchange (no CTS, no ACK) backs off: the contention window
  starts at cw_min slots, doubles per failure up to cw_max, and the drawn
  slot count is added to the idle time the initiator must observe.  The
  window resets on success.
* nodes overhearing an RTS or CTS addressed elsewhere defer (a NAV): an
  RTS reserves SIFS + CTS + SIFS + DATA(length) + SIFS + ACK beyond its
  end, a CTS reserves SIFS + DATA(length) + SIFS + ACK.

Channel model: single collision domain per adjacency, optional per-link
propagation delay, no capture effect.  A receiver slot is garbled whenever
a foreign in-range transmitter puts energy anywhere into it; silence never
garbles anything, which is exactly why a mid-payload interloper corrupts
the frame (its energy lands in slots the receiver is decoding) while a
genuinely quiet channel does not.

All times are integer microseconds.  Given the same scenario and seed the
event order, trace and metrics are reproducible bit for bit; per-node
random streams are derived from the scenario seed and the node id.

Backoff slot counting is restart-on-busy: the required idle time before a
(re)attempt is the full window plus the drawn slots, re-observed from
scratch whenever the channel goes busy.  Slots are not redrawn on
interruption.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heappop, heappush
from typing import Optional

from rbnsize import codec, frames
from rbnsize.energy import DeviceProfile, get_profile
from rbnsize.frames import (
    Address,
    ControlFrame,
    DataFrame,
    FrameError,
    CrcMismatch,
    TYPE_ACK,
    TYPE_CTS,
    TYPE_RTS,
    build_control_frame,
    build_data_frame,
    parse_frame,
)

SCENARIO_VERSION = 1


@dataclass(frozen=True)
class SimTiming:
    """Protocol timing constants, all in integer microseconds/slots."""

    slot_us: int
    sifs_us: int
    nifs_us: int
    b_override_us: Optional[int] = None
    timeout_margin_us: int = 0  # resolved to 2 slots when 0
    retry_limit: int = 7
    cw_min_slots: int = 16
    cw_max_slots: int = 1024

    def __post_init__(self):
        if self.sifs_us >= self.nifs_us:
            raise ValueError("SIFS must be shorter than NIFS")
        if min(self.slot_us, self.sifs_us) <= 0:
            raise ValueError("slot and SIFS must be positive")
        if self.b_override_us is not None and self.b_override_us < 1:
            raise ValueError("b_override must be at least 1 us")
        if self.cw_min_slots < 1 or self.cw_max_slots < self.cw_min_slots:
            raise ValueError("need 1 <= cw_min <= cw_max")


@dataclass(frozen=True)
class NodeSpec:
    node_id: str
    address: Address
    neighbors: tuple[str, ...] = ()
    pos: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class TrafficItem:
    time_us: int
    src: str
    dest: str
    payload: bytes


@dataclass(frozen=True)
class SimScenario:
    nodes: tuple[NodeSpec, ...]
    traffic: tuple[TrafficItem, ...]
    timing: SimTiming
    profile: DeviceProfile
    rng_seed: int = 0
    duration_us: Optional[int] = None  # None: run to quiescence
    comm_range: Optional[float] = None
    link_delays_us: dict = field(default_factory=dict)
    count_transients: bool = False


@dataclass(frozen=True)
class TraceEvent:
    time_us: int
    node: str
    event: str
    detail: str = ""

    def to_line(self) -> str:
        return f"{self.time_us} {self.node} {self.event} {self.detail}".rstrip()


@dataclass
class NodeEnergy:
    tx_uj: Fraction = Fraction(0)
    idle_uj: Fraction = Fraction(0)
    transient_uj: Fraction = Fraction(0)

    @property
    def total_uj(self) -> Fraction:
        return self.tx_uj + self.idle_uj + self.transient_uj


@dataclass
class SimMetrics:
    offered: int = 0
    delivered: int = 0
    crc_failures: int = 0
    rts_collisions: int = 0
    retries: int = 0
    dropped: int = 0
    per_node_energy: dict = field(default_factory=dict)
    channel_busy_fraction: Fraction = Fraction(0)
    latencies_us: dict = field(default_factory=dict)  # traffic index -> us

    def to_dict(self) -> dict:
        latencies = [self.latencies_us[k] for k in sorted(self.latencies_us)]
        return {
            "offered": self.offered,
            "delivered": self.delivered,
            "crc_failures": self.crc_failures,
            "rts_collisions": self.rts_collisions,
            "retries": self.retries,
            "dropped": self.dropped,
            "channel_busy_fraction": float(self.channel_busy_fraction),
            "latency_us": {
                "per_frame": {str(k): v for k, v in sorted(self.latencies_us.items())},
                "min": min(latencies) if latencies else None,
                "max": max(latencies) if latencies else None,
                "mean": sum(latencies) / len(latencies) if latencies else None,
            },
            "per_node_energy_uj": {
                node: {
                    "tx": float(e.tx_uj),
                    "idle": float(e.idle_uj),
                    "transient": float(e.transient_uj),
                    "total": float(e.total_uj),
                    "total_exact": str(e.total_uj),
                }
                for node, e in sorted(self.per_node_energy.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass
class _Pending:
    traffic_index: int
    dest: Address
    payload_bits: tuple[int, ...]
    enqueued_us: int


@dataclass
class _Transmission:
    sender: str
    kind: str  # RTS | CTS | ACK | DATA
    frame: object
    start_us: int
    duration_us: int
    traffic_index: Optional[int] = None

    @property
    def end_us(self) -> int:
        return self.start_us + self.duration_us

    def energized_intervals(self, symbol_us: int) -> list[tuple[int, int]]:
        return [
            (self.start_us + a * symbol_us, self.start_us + b * symbol_us)
            for a, b in self.frame.energized_spans()
        ]


class _Node:
    def __init__(self, spec: NodeSpec, order: int, rng: random.Random):
        self.spec = spec
        self.order = order
        self.rng = rng
        self.queue: deque[_Pending] = deque()
        self.phase = "idle"  # idle | await_cts | await_data | await_ack
        self.attempts = 0
        self.cw_slots = 0  # current window; set from timing on first failure
        self.backoff_slots = 0
        self.nav_until = 0
        self.gen = 0  # invalidates stale scheduled events
        self.tx_until = 0
        self.expect_src: Optional[Address] = None
        self.expect_length = 0
        self.energy = NodeEnergy()
        self.own_tx: list[tuple[int, int]] = []  # [start, end) of own transmissions

    @property
    def node_id(self) -> str:
        return self.spec.node_id

    @property
    def address(self) -> Address:
        return self.spec.address


class Simulator:
    """Single-run simulator; construct, call :meth:`run`, read trace/metrics."""

    def __init__(self, scenario: SimScenario):
        self.scenario = scenario
        self.timing = scenario.timing
        self.profile = scenario.profile
        symbol = scenario.profile.symbol_duration_us
        if symbol != int(symbol):
            raise ValueError("simulation needs an integer symbol duration")
        self.symbol_us = int(symbol)
        b_default = frames.max_frame_duration(scenario.profile)
        self.b_us = (scenario.timing.b_override_us
                     if scenario.timing.b_override_us is not None
                     else int(b_default))
        self.margin_us = scenario.timing.timeout_margin_us or 2 * scenario.timing.slot_us
        self.control_airtime = frames.CONTROL_SYMBOLS * self.symbol_us

        self.nodes: dict[str, _Node] = {}
        self.by_address: dict[bytes, _Node] = {}
        for order, spec in enumerate(scenario.nodes):
            node = _Node(spec, order,
                         random.Random(f"{scenario.rng_seed}:{spec.node_id}"))
            if spec.node_id in self.nodes:
                raise ValueError(f"duplicate node id {spec.node_id!r}")
            if spec.address.octets in self.by_address:
                raise ValueError(f"duplicate address {spec.address}")
            self.nodes[spec.node_id] = node
            self.by_address[spec.address.octets] = node
        self.neighbors = self._build_adjacency()

        self.now = 0
        self._heap: list = []
        self._seq = 0
        self.trace: list[TraceEvent] = []
        self.metrics = SimMetrics(offered=len(scenario.traffic))
        self.transmissions: list[_Transmission] = []
        self._delivered: set[int] = set()  # traffic indices, deduplicated
        self._ran = False

    # --- wiring -------------------------------------------------------------

    def _build_adjacency(self) -> dict[str, set[str]]:
        adjacency = {nid: set() for nid in self.nodes}
        explicit = False
        for spec in self.scenario.nodes:
            for other in spec.neighbors:
                if other not in self.nodes:
                    raise ValueError(f"unknown neighbor {other!r} of {spec.node_id}")
                adjacency[spec.node_id].add(other)
                adjacency[other].add(spec.node_id)  # connectivity is symmetric
                explicit = True
        if not explicit and self.scenario.comm_range is not None:
            rng2 = self.scenario.comm_range ** 2
            specs = self.scenario.nodes
            for i, a in enumerate(specs):
                for b in specs[i + 1:]:
                    if a.pos is None or b.pos is None:
                        raise ValueError("comm_range needs node positions")
                    dx = a.pos[0] - b.pos[0]
                    dy = a.pos[1] - b.pos[1]
                    if dx * dx + dy * dy <= rng2:
                        adjacency[a.node_id].add(b.node_id)
                        adjacency[b.node_id].add(a.node_id)
        for nid in adjacency:
            adjacency[nid].discard(nid)
        return adjacency

    def _delay(self, sender: str, receiver: str) -> int:
        key = "|".join(sorted((sender, receiver)))
        return int(self.scenario.link_delays_us.get(key, 0))

    # --- event plumbing -------------------------------------------------------

    def _schedule(self, time_us: int, node: _Node, fn, *args):
        self._seq += 1
        heappush(self._heap, (time_us, node.order, self._seq, fn, args))

    def _trace(self, node: str, event: str, detail: str = ""):
        self.trace.append(TraceEvent(self.now, node, event, detail))

    # --- channel view ----------------------------------------------------------

    def _busy_intervals(self, node: _Node) -> list[tuple[int, int]]:
        """Merged energized intervals audible at the node, up to knowledge now."""
        audible = self.neighbors[node.node_id] | {node.node_id}
        spans = []
        for t in self.transmissions:
            if t.sender not in audible:
                continue
            shift = 0 if t.sender == node.node_id else self._delay(t.sender, node.node_id)
            for a, b in t.energized_intervals(self.symbol_us):
                spans.append((a + shift, b + shift))
        spans.sort()
        merged: list[tuple[int, int]] = []
        for a, b in spans:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        return merged

    def carrier_sense(self, node_id: str, at_us: int) -> bool:
        """True when an in-range transmitter is emitting an energized symbol.

        Silent payload zeros do not register: a node mid-way through the
        zero run of a neighbour's payload senses an idle channel.
        """
        for a, b in self._busy_intervals(self.nodes[node_id]):
            if a <= at_us < b:
                return True
        return False

    def _earliest_idle_fire(self, node: _Node, ready_us: int, idle_needed: int) -> int:
        """Earliest t >= ready with [t - idle_needed, t] idle at the node.

        Channel observation starts at time 0; a NAV defers like busy air.
        """
        intervals = self._busy_intervals(node)
        fire = max(ready_us, idle_needed,  # window must fit after time 0
                   node.nav_until + idle_needed)
        while True:
            window_start = fire - idle_needed
            bumped = False
            for a, b in intervals:
                if a < fire and b > window_start:  # overlap with (start, fire]
                    fire = b + idle_needed
                    bumped = True
            if not bumped:
                return fire

    def _data_airtime(self, payload_octets: int) -> int:
        return frames.data_symbol_count(payload_octets) * self.symbol_us

    # --- initiation ---------------------------------------------------------------

    def _plan_attempt(self, node: _Node):
        if node.phase != "idle" or not node.queue:
            return
        node.gen += 1
        idle_needed = (self.b_us + self.timing.nifs_us
                       + node.backoff_slots * self.timing.slot_us)
        fire = self._earliest_idle_fire(node, max(self.now, node.tx_until), idle_needed)
        self._schedule(fire, node, self._fire_rts, node, node.gen)

    def _fire_rts(self, node: _Node, gen: int):
        if gen != node.gen or node.phase != "idle" or not node.queue:
            return
        idle_needed = (self.b_us + self.timing.nifs_us
                       + node.backoff_slots * self.timing.slot_us)
        fire = self._earliest_idle_fire(node, self.now, idle_needed)
        if fire != self.now:  # channel changed since planning: try again later
            node.gen += 1
            self._schedule(fire, node, self._fire_rts, node, node.gen)
            return
        head = node.queue[0]
        rts = build_control_frame(TYPE_RTS, head.dest, node.address,
                                  length=len(head.payload_bits) // 8)
        node.attempts += 1
        node.phase = "await_cts"
        self._transmit(node, rts, "RTS")
        node.gen += 1
        deadline = (self.now + self.control_airtime + self.timing.sifs_us
                    + self.control_airtime + self.margin_us)
        self._schedule(deadline, node, self._cts_timeout, node, node.gen)

    def _cts_timeout(self, node: _Node, gen: int):
        if gen != node.gen or node.phase != "await_cts":
            return
        self._trace(node.node_id, "cts_timeout", f"attempt={node.attempts}")
        self._retry_or_drop(node)

    def _ack_timeout(self, node: _Node, gen: int):
        if gen != node.gen or node.phase != "await_ack":
            return
        self._trace(node.node_id, "ack_timeout", f"attempt={node.attempts}")
        self._retry_or_drop(node)

    def _retry_or_drop(self, node: _Node):
        node.phase = "idle"
        if node.attempts > self.timing.retry_limit:
            dropped = node.queue.popleft()
            self.metrics.dropped += 1
            self._trace(node.node_id, "drop",
                        f"traffic={dropped.traffic_index} attempts={node.attempts}")
            node.attempts = 0
            node.cw_slots = 0
            node.backoff_slots = 0
            self._plan_attempt(node)
            return
        self.metrics.retries += 1
        if node.cw_slots == 0:
            node.cw_slots = self.timing.cw_min_slots
        node.backoff_slots = node.rng.randrange(node.cw_slots)
        self._trace(node.node_id, "backoff",
                    f"slots={node.backoff_slots} cw={node.cw_slots}")
        node.cw_slots = min(node.cw_slots * 2, self.timing.cw_max_slots)
        self._plan_attempt(node)

    # --- transmission ----------------------------------------------------------------

    def _transmit(self, node: _Node, frame, kind: str,
                  traffic_index: Optional[int] = None):
        duration = len(frame.symbols()) * self.symbol_us
        t = _Transmission(sender=node.node_id, kind=kind, frame=frame,
                          start_us=self.now, duration_us=duration,
                          traffic_index=traffic_index)
        self.transmissions.append(t)
        node.own_tx.append((self.now, self.now + duration))
        node.tx_until = max(node.tx_until, self.now + duration)
        breakdown = frames.air_frame_energy(
            frame, self.profile, count_transients=self.scenario.count_transients)
        node.energy.tx_uj += breakdown.tx_uj
        node.energy.idle_uj += breakdown.idle_uj
        node.energy.transient_uj += breakdown.transient_uj
        self._trace(node.node_id, "tx_start",
                    f"kind={kind} dest={frame.dest} dur={duration}")
        self._schedule(t.end_us, node, self._tx_end, node, t)
        for neighbor_id in sorted(self.neighbors[node.node_id]):
            peer = self.nodes[neighbor_id]
            arrival = t.end_us + self._delay(node.node_id, neighbor_id)
            self._schedule(arrival, peer, self._rx_complete, peer, t)

    def _tx_end(self, node: _Node, t: _Transmission):
        self._trace(node.node_id, "tx_end", f"kind={t.kind}")
        if t.kind == "CTS":
            node.phase = "await_data"
            deadline = (self.now + self.timing.sifs_us
                        + self._data_airtime(node.expect_length) + self.margin_us)
            node.gen += 1
            self._schedule(deadline, node, self._data_timeout, node, node.gen)
        elif t.kind == "DATA":
            node.phase = "await_ack"
            deadline = (self.now + self.timing.sifs_us + self.control_airtime
                        + self.margin_us)
            node.gen += 1
            self._schedule(deadline, node, self._ack_timeout, node, node.gen)
        elif t.kind == "ACK":
            node.phase = "idle"
            self._plan_attempt(node)

    def _data_timeout(self, node: _Node, gen: int):
        if gen != node.gen or node.phase != "await_data":
            return
        self._trace(node.node_id, "data_timeout", "")
        node.phase = "idle"
        node.expect_src = None
        self._plan_attempt(node)

    # --- reception --------------------------------------------------------------------

    def _own_tx_overlaps(self, node: _Node, start: int, end: int) -> bool:
        return any(a < end and b > start for a, b in node.own_tx)

    def _garbled_slots(self, node: _Node, t: _Transmission) -> list[int]:
        shift = self._delay(t.sender, node.node_id)
        rx_start = t.start_us + shift
        rx_end = t.end_us + shift
        garbled = set()
        for other in self.transmissions:
            if other is t or other.sender == t.sender:
                continue
            if other.sender not in self.neighbors[node.node_id]:
                continue
            oshift = self._delay(other.sender, node.node_id)
            for a, b in other.energized_intervals(self.symbol_us):
                a += oshift
                b += oshift
                if b <= rx_start or a >= rx_end:
                    continue
                first = max(0, (a - rx_start) // self.symbol_us)
                last = min((rx_end - rx_start) // self.symbol_us,
                           -(-(b - rx_start) // self.symbol_us))
                garbled.update(range(first, last))
        return sorted(garbled)

    def _rx_complete(self, node: _Node, t: _Transmission):
        shift = self._delay(t.sender, node.node_id)
        rx_start = t.start_us + shift
        if self._own_tx_overlaps(node, rx_start, self.now):
            return  # half duplex: a transmitting node hears nothing
        received = list(t.frame.symbols())
        for i in self._garbled_slots(node, t):
            received[i] = None
        try:
            frame = parse_frame(received)
        except FrameError as exc:
            self._rx_failed(node, t, exc)
            return
        if frame.dest.octets != node.address.octets and not frame.dest.is_broadcast:
            self._overhear(node, t, frame)
            return
        handler = {
            "RTS": self._handle_rts, "CTS": self._handle_cts,
            "DATA": self._handle_data, "ACK": self._handle_ack,
        }[t.kind]
        handler(node, t, frame)

    def _rx_failed(self, node: _Node, t: _Transmission, exc: FrameError):
        self._trace(node.node_id, "rx_garbled",
                    f"kind={t.kind} from={t.sender} error={type(exc).__name__}")
        if t.kind == "RTS" and t.frame.dest.octets == node.address.octets:
            self.metrics.rts_collisions += 1
        if (isinstance(exc, CrcMismatch) and t.kind == "DATA"
                and t.frame.dest.octets == node.address.octets):
            self.metrics.crc_failures += 1
            self._trace(node.node_id, "crc_fail", f"from={t.sender}")
            if node.phase == "await_data":
                node.gen += 1  # cancel the data timeout
                node.phase = "idle"
                node.expect_src = None
                self._plan_attempt(node)

    def _overhear(self, node: _Node, t: _Transmission, frame):
        if t.kind == "RTS":
            reserve = (self.timing.sifs_us + self.control_airtime
                       + self.timing.sifs_us + self._data_airtime(frame.length)
                       + self.timing.sifs_us + self.control_airtime)
        elif t.kind == "CTS":
            reserve = (self.timing.sifs_us + self._data_airtime(frame.length)
                       + self.timing.sifs_us + self.control_airtime)
        else:
            return
        until = self.now + reserve
        if until > node.nav_until:
            node.nav_until = until
            self._trace(node.node_id, "nav_set", f"until={until} on={t.kind}")
            if node.phase == "idle" and node.queue:
                self._plan_attempt(node)

    def _handle_rts(self, node: _Node, t: _Transmission, rts: ControlFrame):
        self._trace(node.node_id, "rx_rts", f"from={t.sender} length={rts.length}")
        if node.phase != "idle" or node.tx_until > self.now:
            self._trace(node.node_id, "rts_ignored", f"phase={node.phase}")
            return
        if node.nav_until > self.now:  # someone else holds a reservation
            self._trace(node.node_id, "rts_ignored", f"nav_until={node.nav_until}")
            return
        node.gen += 1  # suspend any initiation plan of our own
        node.phase = "responding"
        node.expect_src = rts.src
        node.expect_length = rts.length
        cts = build_control_frame(
            TYPE_CTS, rts.src, node.address,
            length=self._piggyback_length(node, rts.src))
        self._schedule(self.now + self.timing.sifs_us, node,
                       self._send_response, node, cts, "CTS")

    def _send_response(self, node: _Node, frame: ControlFrame, kind: str):
        self._transmit(node, frame, kind)

    def _handle_cts(self, node: _Node, t: _Transmission, cts: ControlFrame):
        if node.phase != "await_cts" or not node.queue:
            return
        head = node.queue[0]
        if cts.src.octets != head.dest.octets:
            return
        self._trace(node.node_id, "rx_cts", f"from={t.sender}")
        node.gen += 1  # cancel the CTS timeout
        node.phase = "sending"
        data = build_data_frame(head.dest, node.address, head.payload_bits)
        self._schedule(self.now + self.timing.sifs_us, node,
                       self._send_data, node, data, head.traffic_index)

    def _send_data(self, node: _Node, data: DataFrame, traffic_index: int):
        self._transmit(node, data, "DATA", traffic_index=traffic_index)

    def _handle_data(self, node: _Node, t: _Transmission, data: DataFrame):
        if (node.phase != "await_data" or node.expect_src is None
                or data.src.octets != node.expect_src.octets):
            self._trace(node.node_id, "rx_unexpected_data", f"from={t.sender}")
            return
        node.gen += 1  # cancel the data timeout
        if t.traffic_index is not None and t.traffic_index not in self._delivered:
            # a retransmission after a lost ACK re-delivers the same item;
            # count it once and keep the first latency
            self._delivered.add(t.traffic_index)
            item = self.scenario.traffic[t.traffic_index]
            self.metrics.latencies_us[t.traffic_index] = self.now - item.time_us
        self._trace(node.node_id, "deliver",
                    f"from={t.sender} octets={data.length} traffic={t.traffic_index}")
        node.phase = "responding"
        node.expect_src = None
        ack = build_control_frame(TYPE_ACK, data.src, node.address,
                                  length=self._piggyback_length(node, data.src))
        self._schedule(self.now + self.timing.sifs_us, node,
                       self._send_response, node, ack, "ACK")

    def _handle_ack(self, node: _Node, t: _Transmission, ack: ControlFrame):
        if node.phase != "await_ack" or not node.queue:
            return
        head = node.queue[0]
        if ack.src.octets != head.dest.octets:
            return
        node.gen += 1  # cancel the ACK timeout
        node.queue.popleft()
        node.phase = "idle"
        node.attempts = 0
        node.cw_slots = 0
        node.backoff_slots = 0
        self._trace(node.node_id, "tx_success", f"traffic={head.traffic_index}")
        self._plan_attempt(node)

    def _piggyback_length(self, node: _Node, peer: Address) -> int:
        for pending in node.queue:
            if pending.dest.octets == peer.octets:
                return len(pending.payload_bits) // 8
        return 0

    # --- traffic and run ------------------------------------------------------------------

    def _enqueue(self, node: _Node, item: TrafficItem, index: int):
        dest = self.nodes[item.dest].address
        node.queue.append(_Pending(
            traffic_index=index, dest=dest,
            payload_bits=codec.bits_from_octets(item.payload),
            enqueued_us=self.now))
        self._trace(node.node_id, "enqueue",
                    f"traffic={index} dest={item.dest} octets={len(item.payload)}")
        self._plan_attempt(node)

    def run(self) -> SimMetrics:
        if self._ran:
            raise RuntimeError("a Simulator instance runs once")
        self._ran = True
        for index, item in enumerate(self.scenario.traffic):
            if item.src not in self.nodes or item.dest not in self.nodes:
                raise ValueError(f"traffic {index} names unknown nodes")
            node = self.nodes[item.src]
            self._schedule(item.time_us, node, self._enqueue, node, item, index)
        horizon = self.scenario.duration_us
        while self._heap:
            time_us, _, _, fn, args = heappop(self._heap)
            if horizon is not None and time_us > horizon:
                break
            self.now = time_us
            fn(*args)
        self._finalize_metrics()
        return self.metrics

    def _finalize_metrics(self):
        self.metrics.delivered = len(self._delivered)
        for node in self.nodes.values():
            self.metrics.per_node_energy[node.node_id] = node.energy
        spans = []
        for t in self.transmissions:
            spans.extend(t.energized_intervals(self.symbol_us))
        spans.sort()
        busy = 0
        horizon = self.scenario.duration_us
        if horizon is None:
            horizon = max((t.end_us for t in self.transmissions), default=0)
        last_end = 0
        for a, b in spans:
            a, b = max(a, last_end), min(b, horizon)
            if b > a:
                busy += b - a
                last_end = max(last_end, b)
        if horizon > 0:
            self.metrics.channel_busy_fraction = Fraction(busy, horizon)


def run(scenario: SimScenario) -> tuple[SimMetrics, list[TraceEvent]]:
    """Run a scenario to completion; returns the metrics and the event trace."""
    simulator = Simulator(scenario)
    metrics = simulator.run()
    return metrics, simulator.trace


# --- scenario files -------------------------------------------------------------

def default_timing(profile: DeviceProfile) -> SimTiming:
    symbol = int(profile.symbol_duration_us)
    return SimTiming(slot_us=symbol, sifs_us=symbol, nifs_us=3 * symbol)


def scenario_from_dict(raw: dict) -> SimScenario:
    if raw.get("version") != SCENARIO_VERSION:
        raise ValueError(f"unsupported scenario version {raw.get('version')!r}")
    profile_spec = raw["profile"]
    if isinstance(profile_spec, str):
        profile = get_profile(profile_spec)
    else:
        profile = DeviceProfile.create(
            name=profile_spec.get("name", "custom"),
            data_rate_kbps=profile_spec["data_rate_kbps"],
            symbol_duration_us=profile_spec["symbol_duration_us"],
            v_cc=profile_spec["v_cc_v"],
            i_high_ma=profile_spec["i_high_ma"],
            i_low_ma=profile_spec["i_low_ma"],
            t_on_us=profile_spec["t_on_us"],
        )
    timing_raw = raw.get("timing", {})
    base = default_timing(profile)
    timing = SimTiming(
        slot_us=int(timing_raw.get("slot_us", base.slot_us)),
        sifs_us=int(timing_raw.get("sifs_us", base.sifs_us)),
        nifs_us=int(timing_raw.get("nifs_us", base.nifs_us)),
        b_override_us=timing_raw.get("b_override_us"),
        timeout_margin_us=int(timing_raw.get("timeout_margin_us", 0)),
        retry_limit=int(timing_raw.get("retry_limit", base.retry_limit)),
        cw_min_slots=int(timing_raw.get("cw_min_slots", base.cw_min_slots)),
        cw_max_slots=int(timing_raw.get("cw_max_slots", base.cw_max_slots)),
    )
    nodes = tuple(
        NodeSpec(
            node_id=n["id"],
            address=Address.parse(n["address"]),
            neighbors=tuple(n.get("neighbors", ())),
            pos=tuple(n["pos"]) if "pos" in n else None,
        )
        for n in raw["nodes"]
    )
    traffic = tuple(
        TrafficItem(time_us=int(t["time_us"]), src=t["src"], dest=t["dest"],
                    payload=bytes.fromhex(t.get("payload_hex", "")))
        for t in raw.get("traffic", ())
    )
    return SimScenario(
        nodes=nodes,
        traffic=traffic,
        timing=timing,
        profile=profile,
        rng_seed=int(raw.get("seed", 0)),
        duration_us=raw.get("duration_us"),
        comm_range=raw.get("comm_range"),
        link_delays_us=dict(raw.get("link_delays_us", {})),
        count_transients=bool(raw.get("count_transients", False)),
    )


def load_scenario(path: str) -> SimScenario:
    """Load a scenario from the versioned JSON schema (see README)."""
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))
