"""Discrete-event execution of a single trial and the trace digraph it leaves.

The sink's question travels at speed ``v``; sensor answers are delivered the
instant they are emitted unless the deployment was configured with
``finite_speed=True``, in which case they too travel at ``v``. An answer never
reaches a sensor before the question's wavefront does: a zero-latency
delivery to a sensor the question has not reached yet is held until it
arrives. Every sensor broadcast reaches exactly the nodes (sink included)
within distance ``r`` of the emitter.

Events at equal times run in the order question arrival, answer delivery,
timer, sink deadline, and then by insertion sequence.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from typing import IO, Optional

import numpy as np

from . import protocol as proto
from .world import Deployment, sink_deadline

SINK = -1

QUESTION, DELIVERY, TIMER, DEADLINE = 0, 1, 2, 3
KIND_NAMES = {QUESTION: "question", DELIVERY: "delivery", TIMER: "timer", DEADLINE: "deadline"}


@dataclass(order=True, frozen=True)
class Event:
    time: float
    priority: int
    seq: int
    data: tuple = field(compare=False, default=())

    @property
    def kind(self) -> str:
        return KIND_NAMES[self.priority]


class EventQueue:
    """Min-heap of events keyed on ``(time, kind priority, seq)``."""

    def __init__(self):
        self._heap = []
        self._seq = 0

    def push(self, time: float, priority: int, *data) -> None:
        heapq.heappush(self._heap, (time, priority, self._seq, data))
        self._seq += 1

    def pop(self) -> Event:
        return Event(*heapq.heappop(self._heap))

    def __len__(self):
        return len(self._heap)


class SpatialGrid:
    """Uniform grid with cells of side ``cell`` for closed-disc range queries.

    Queries scan the 3x3 block of cells around the query point, which covers
    every point within ``cell`` of it. Membership uses ``dx*dx + dy*dy <= r*r``.
    """

    def __init__(self, xy: np.ndarray, cell: float):
        if not cell > 0:
            raise ValueError(f"cell size must be positive, got {cell}")
        self.xy = xy
        self.cell = cell
        ij = np.floor(xy / cell).astype(np.int64) if len(xy) else np.zeros((0, 2), np.int64)
        buckets: dict = {}
        for k, (i, j) in enumerate(ij.tolist()):
            buckets.setdefault((i, j), []).append(k)
        self._cells = {key: np.asarray(ids, dtype=np.int64) for key, ids in buckets.items()}
        self._empty = np.zeros(0, dtype=np.int64)

    def query(self, x: float, y: float, r: float) -> np.ndarray:
        """Sorted indices of points within distance ``r`` of ``(x, y)``; needs ``r <= cell``."""
        if r > self.cell:
            raise ValueError("query radius exceeds grid cell size")
        ci, cj = math.floor(x / self.cell), math.floor(y / self.cell)
        parts = [self._cells.get((ci + di, cj + dj), self._empty)
                 for di in (-1, 0, 1) for dj in (-1, 0, 1)]
        cand = np.concatenate(parts)
        if cand.size == 0:
            return cand
        d = self.xy[cand]
        dx = d[:, 0] - x
        dy = d[:, 1] - y
        hit = cand[dx * dx + dy * dy <= r * r]
        hit.sort()
        return hit


def _grid_for(deployment: Deployment, r: float) -> SpatialGrid:
    cache = deployment.__dict__.setdefault("_grid_cache", {})
    grid = cache.get(r)
    if grid is None:
        grid = cache[r] = SpatialGrid(deployment.xy, r)
    return grid


def neighbors_within(deployment: Deployment, emitter, r: float) -> set:
    """Nodes within closed distance ``r`` of ``emitter`` (a sensor id or ``SINK``).

    The emitter itself is excluded; ``SINK`` is included when in range.
    """
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    if emitter == SINK:
        x = y = 0.0
    else:
        s = deployment.sites[emitter]
        x, y = s.x, s.y
    out = set(_grid_for(deployment, r).query(x, y, r).tolist())
    out.discard(emitter)
    if emitter != SINK and x * x + y * y <= r * r:
        out.add(SINK)
    return out


@dataclass
class TraceDigraph:
    """Sensors plus the sink, with an edge ``(j, i)`` for every recorded relation.

    ``edges`` keeps first-recorded order and holds no duplicates.
    """
    n: int
    is_source: list
    edges: list = field(default_factory=list)
    fired: list = None
    broadcasts: list = None

    def __post_init__(self):
        if self.fired is None:
            self.fired = [False] * self.n
        if self.broadcasts is None:
            self.broadcasts = [0] * self.n
        self._edge_set = set(self.edges)

    @property
    def nodes(self) -> list:
        return list(range(self.n)) + [SINK]

    def add_edge(self, u: int, v: int) -> None:
        if (u, v) not in self._edge_set:
            self._edge_set.add((u, v))
            self.edges.append((u, v))

    def edge_set(self) -> frozenset:
        return frozenset(self._edge_set)

    def to_dict(self) -> dict:
        return {"n": self.n, "is_source": list(self.is_source),
                "edges": [list(e) for e in self.edges],
                "fired": list(self.fired), "broadcasts": list(self.broadcasts)}

    @classmethod
    def from_dict(cls, d: dict) -> "TraceDigraph":
        return cls(d["n"], list(d["is_source"]), [tuple(e) for e in d["edges"]],
                   list(d["fired"]), list(d["broadcasts"]))


@dataclass
class TrialOutcome:
    digraph: TraceDigraph
    total_broadcasts: int
    collected: frozenset
    n_star: int
    diagnostics: dict
    emissions: list
    states: list = field(default=None, repr=False)


class _TraceWriter:
    def __init__(self, fh: Optional[IO[str]]):
        self.fh = fh

    def write(self, time, kind, sender, receivers=(), tag=None, payload_size=0):
        if self.fh is None:
            return
        rec = {"time": time, "kind": kind, "sender": "sink" if sender == SINK else sender,
               "receivers": ["sink" if x == SINK else x for x in receivers],
               "tag": tag, "payload_size": payload_size}
        self.fh.write(json.dumps(rec) + "\n")


def run_trial(deployment: Deployment, trace: Optional[IO[str]] = None,
              finite_speed: Optional[bool] = None) -> TrialOutcome:
    """Simulate one query round on ``deployment``.

    ``trace`` optionally receives a JSON-lines log with one record for the
    question, every answer broadcast and the sink deadline. ``finite_speed``
    overrides the deployment config's delivery mode.
    """
    cfg = deployment.config
    R, B0, v, f, r = cfg.R, cfg.B0, cfg.v, cfg.f, deployment.r
    if finite_speed is None:
        finite_speed = cfg.finite_speed
    sites = deployment.sites
    n = len(sites)
    grid = _grid_for(deployment, r)
    log = _TraceWriter(trace)

    states = [proto.new_sensor(s.is_source, s.id if s.is_source else None) for s in sites]
    sink = proto.new_sink(sink_deadline(R, v))
    D = TraceDigraph(n, [s.is_source for s in sites])
    emissions = []
    r2 = r * r

    q = EventQueue()
    log.write(0.0, "question", SINK, tag=B0)
    for s in sites:
        q.push(s.R_i / v, QUESTION, s.id)
    q.push(sink.deadline, DEADLINE)

    def broadcast(now: float, i: int, ans: proto.Answer, from_timer: bool):
        s = sites[i]
        receivers = grid.query(s.x, s.y, r).tolist()
        receivers.remove(i)
        to_sink = s.x * s.x + s.y * s.y <= r2
        xy = deployment.xy
        for k in receivers:
            if finite_speed:
                dx, dy = xy[k, 0] - s.x, xy[k, 1] - s.y
                at = now + math.sqrt(dx * dx + dy * dy) / v
            else:
                at = max(now, sites[k].R_i / v)
            q.push(at, DELIVERY, k, ans, i)
        if to_sink:
            q.push(now + (s.R_i / v if finite_speed else 0.0), DELIVERY, SINK, ans, i)
            receivers.append(SINK)
        emissions.append((now, i, from_timer))
        D.broadcasts[i] += 1
        log.write(now, "answer", i, receivers, ans.tag, len(ans.payload))

    heap = q._heap
    pop = heapq.heappop
    while heap:
        now, kind, _, data = pop(heap)
        if kind == DELIVERY:
            k, ans, sender = data
            if k == SINK:
                before = sink.late
                proto.sink_on_answer(sink, ans.tag, ans.payload, sender, now)
                if sink.late == before:
                    D.add_edge(sender, SINK)
            else:
                proto.sensor_on_answer(states[k], ans.tag, ans.payload, sender)
        elif kind == QUESTION:
            i = data[0]
            st, out, delay = proto.sensor_on_question(states[i], B0, R, sites[i].P_i, v)
            q.push(now + delay, TIMER, i)
            for ans in out:
                broadcast(now, i, ans, False)
        elif kind == TIMER:
            i = data[0]
            st = states[i]
            st, out = proto.sensor_on_timer(st, f, r, B0)
            D.fired[i] = True
            if out:
                for j in st.store.senders():
                    D.add_edge(j, i)
                for ans in out:
                    broadcast(now, i, ans, True)
        else:
            proto.sink_on_deadline(sink)

    total = sum(D.broadcasts)
    diagnostics = {
        "ignored_idle": sum(st.ignored_idle for st in states),
        "ignored_fired": sum(st.ignored_fired for st in states),
        "sink_late": sink.late,
    }
    log.write(sink.deadline, "deadline", SINK, payload_size=len(sink.collected))
    return TrialOutcome(D, total, frozenset(sink.collected), cfg.n_star, diagnostics,
                        emissions, states)


def export_dot(outcome: TrialOutcome, deployment: Deployment) -> str:
    """Render the trace digraph as Graphviz DOT.

    Positions are scaled to a unit disc and pinned (``pos="x,y!"``); render
    with ``neato -n``. Sources carry ``source=true`` and a star shape.
    """
    R = deployment.config.R
    D = outcome.digraph
    lines = ["digraph D {", "  node [shape=point width=0.06];"]
    lines.append('  sink [label="sink" shape=doublecircle width=0.15 pos="0,0!"];')
    for s in deployment.sites:
        attrs = [f'pos="{s.x / R:.6f},{s.y / R:.6f}!"']
        if s.is_source:
            attrs.append("source=true shape=star width=0.12")
        lines.append(f"  s{s.id} [{' '.join(attrs)}];")

    def name(u):
        return "sink" if u == SINK else f"s{u}"

    for u, w in D.edges:
        lines.append(f"  {name(u)} -> {name(w)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
