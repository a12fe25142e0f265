"""Route construction for anonymous sensor networks driven by perceived sink power.

Sensors carry no identifiers; each one tells itself apart only by the power
at which it hears the sink's question. The package simulates the resulting
timer-ordered aggregation protocol, records the trace digraph it induces and
measures connectivity, broadcast cost and redundancy over parameter sweeps.
"""

from .engine import SINK, TraceDigraph, TrialOutcome, export_dot, neighbors_within, run_trial
from .experiment import (SweepRow, SweepSpec, default_paper_spec, emit_csv, emit_plot_data,
                         parse_csv, run_sweep)
from .metrics import (MetricsReport, connected_sources_fraction, energy_index, evaluate,
                      power_usage_ratio, reach_set, treeness)
from .world import (Deployment, SensorSite, WorldConfig, broadcast_radius, distance_from_power,
                    n_star_from_ratio, perceived_power, sample_deployment, timer_duration)

__version__ = "0.1.0"

__all__ = [
    "SINK", "TraceDigraph", "TrialOutcome", "export_dot", "neighbors_within", "run_trial",
    "SweepRow", "SweepSpec", "default_paper_spec", "emit_csv", "emit_plot_data", "parse_csv",
    "run_sweep", "MetricsReport", "connected_sources_fraction", "energy_index", "evaluate",
    "power_usage_ratio", "reach_set", "treeness", "Deployment", "SensorSite", "WorldConfig",
    "broadcast_radius", "distance_from_power", "n_star_from_ratio", "perceived_power",
    "sample_deployment", "timer_duration",
]
