"""Performance indicators computed from a finished trial."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import asdict, dataclass

from .engine import SINK, TraceDigraph, TrialOutcome


@dataclass(frozen=True)
class MetricsReport:
    connected_fraction: float
    power_ratio: float
    treeness: float
    c: int

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        return cls(**json.loads(text))


def reach_set(D: TraceDigraph) -> set:
    """Nodes with a directed path to the sink, the sink included."""
    preds: dict = {}
    for u, w in D.edges:
        preds.setdefault(w, []).append(u)
    seen = {SINK}
    frontier = deque([SINK])
    while frontier:
        w = frontier.popleft()
        for u in preds.get(w, ()):
            if u not in seen:
                seen.add(u)
                frontier.append(u)
    return seen


def connected_sources_fraction(D: TraceDigraph, n_star: int) -> float:
    if n_star < 1:
        raise ValueError("n_star must be >= 1")
    C = reach_set(D)
    hits = sum(1 for k in C if k != SINK and D.is_source[k])
    return hits / n_star


def power_usage_ratio(total_broadcasts: int, n_star: int) -> float:
    if n_star < 1:
        raise ValueError("n_star must be >= 1")
    return total_broadcasts / n_star


def qualifying_edges(D: TraceDigraph, C=None) -> list:
    """Edges lying on some directed path to the sink.

    Such an edge is exactly one whose head reaches the sink: its tail then
    reaches the sink through it, and a path through it can always be cut
    down to a simple one.
    """
    if C is None:
        C = reach_set(D)
    return [(u, w) for u, w in D.edges if w in C]


def treeness(D: TraceDigraph) -> float:
    """Qualifying edges per node reaching the sink beyond the sink itself (0 if none)."""
    C = reach_set(D)
    c = len(C)
    if c == 1:
        return 0.0
    return len(qualifying_edges(D, C)) / (c - 1)


def energy_index(power_ratio: float, n_r: float) -> float:
    """Power ratio weighted by ``n_r``, which broadcast energy grows with linearly."""
    if not (power_ratio > 0 and n_r > 0):
        raise ValueError("energy_index needs positive inputs")
    return power_ratio * n_r


def evaluate(outcome: TrialOutcome) -> MetricsReport:
    D = outcome.digraph
    C = reach_set(D)
    c = len(C)
    tr = 0.0 if c == 1 else len(qualifying_edges(D, C)) / (c - 1)
    return MetricsReport(
        connected_fraction=connected_sources_fraction(D, outcome.n_star),
        power_ratio=power_usage_ratio(outcome.total_broadcasts, outcome.n_star),
        treeness=tr,
        c=c,
    )
