"""Sink and sensor state machines.

Each handler takes a state plus one input and returns the updated state
together with whatever it emits. States are updated in place (and returned)
so the engine can drive thousands of sensors without copying stores; nothing
else is shared between handlers.

A sensor knows only what it measures: its perceived power and the ``B0`` and
``R`` carried by the sink's question. The ``sender`` ids kept on entries are
instrumentation for building the trace digraph and never influence a
decision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from .world import distance_from_power, timer_duration


class ProtocolError(RuntimeError):
    """A handler was invoked in a phase where the protocol forbids it."""


class Phase(enum.Enum):
    IDLE = "idle"
    TIMER_PENDING = "timer_pending"
    FIRED = "fired"


@dataclass(frozen=True)
class Question:
    B0: float
    R: float


@dataclass(frozen=True)
class Answer:
    tag: float
    payload: frozenset


@dataclass(frozen=True, slots=True)
class AnswerEntry:
    tag: float
    payload: frozenset
    sender: int


@dataclass
class AggregateStore:
    own_answer: Optional[int] = None
    entries: list = field(default_factory=list)

    @property
    def received_any(self) -> bool:
        return bool(self.entries)

    def flatten(self) -> frozenset:
        """Union of the own answer and every incorporated payload."""
        out = set() if self.own_answer is None else {self.own_answer}
        for e in self.entries:
            out |= e.payload
        return frozenset(out)

    def senders(self) -> list:
        """Distinct direct senders of incorporated entries, first arrival first."""
        return list(dict.fromkeys(e.sender for e in self.entries))


@dataclass
class SensorProtocolState:
    is_source: bool
    store: AggregateStore
    phase: Phase = Phase.IDLE
    P_i: float = math.nan
    R_i: float = math.nan
    broadcast_count: int = 0
    ignored_idle: int = 0
    ignored_fired: int = 0


def new_sensor(is_source: bool, token=None) -> SensorProtocolState:
    """Fresh sensor state; a source carries ``token`` as its own answer."""
    if is_source and token is None:
        raise ValueError("a source needs an answer token")
    return SensorProtocolState(is_source, AggregateStore(token if is_source else None))


@dataclass(frozen=True)
class SelectionOutcome:
    found: bool
    P_j: float = math.nan
    R_j: float = math.inf


@dataclass
class SinkState:
    deadline: float
    collected: set = field(default_factory=set)
    senders: list = field(default_factory=list)
    closed: bool = False
    late: int = 0


def sensor_on_question(state: SensorProtocolState, B0: float, R: float,
                       P_measured: float, v: float):
    """Handle the sink's question.

    Returns ``(state, emissions, timer)`` where ``timer`` is the delay
    ``2 (R - R_i) / v`` after which :func:`sensor_on_timer` must run.
    """
    if state.phase is not Phase.IDLE:
        raise ProtocolError("question delivered twice")
    state.P_i = P_measured
    # The floor of R guards the rim against rounding in the power inversion.
    state.R_i = min(distance_from_power(B0, P_measured), R)
    timer = timer_duration(R, state.R_i, v)
    emissions = []
    if state.is_source:
        emissions.append(Answer(state.P_i, state.store.flatten()))
        state.broadcast_count += 1
    state.phase = Phase.TIMER_PENDING
    return state, emissions, timer


def sensor_on_answer(state: SensorProtocolState, tag: float, payload: frozenset,
                     sender: int) -> SensorProtocolState:
    if state.phase is Phase.TIMER_PENDING:
        state.store.entries.append(AnswerEntry(tag, payload, sender))
    elif state.phase is Phase.FIRED:
        state.ignored_fired += 1
    else:
        state.ignored_idle += 1
    return state


def select_relay_gap(store: AggregateStore, P_i: float, B0: float) -> SelectionOutcome:
    """Pick the greatest tag strictly below ``P_i`` and recover its distance.

    Tags at or above ``P_i`` come from senders no farther from the sink
    than the selecting sensor and are never chosen.
    """
    if not store.entries:
        raise ProtocolError("selection on an empty store")
    best = -math.inf
    for e in store.entries:
        if best < e.tag < P_i:
            best = e.tag
    if best == -math.inf:
        return SelectionOutcome(False)
    return SelectionOutcome(True, best, distance_from_power(B0, best))


def gap_allows(R_j: float, R_i: float, f: float, r: float) -> bool:
    # Strict: a gap of exactly f*r suppresses.
    return R_j - R_i > f * r


def sensor_on_timer(state: SensorProtocolState, f: float, r: float, B0: float):
    """Fire the sensor's timer; returns ``(state, emissions)``."""
    if state.phase is not Phase.TIMER_PENDING:
        raise ProtocolError(f"timer fired in phase {state.phase.value}")
    state.phase = Phase.FIRED
    if not state.store.entries:
        return state, []
    sel = select_relay_gap(state.store, state.P_i, B0)
    if not gap_allows(sel.R_j, state.R_i, f, r):
        return state, []
    state.broadcast_count += 1
    return state, [Answer(state.P_i, state.store.flatten())]


def new_sink(deadline: float) -> SinkState:
    return SinkState(deadline)


def sink_on_answer(state: SinkState, tag: float, payload: frozenset, sender: int,
                   now: float) -> SinkState:
    """Incorporate an answer; anything after the deadline is dropped and counted."""
    if state.closed or now > state.deadline:
        state.late += 1
        return state
    state.collected |= payload
    state.senders.append(sender)
    return state


def sink_on_deadline(state: SinkState) -> SinkState:
    if state.closed:
        raise ProtocolError("sink deadline fired twice")
    state.closed = True
    state.collected = frozenset(state.collected)
    return state
