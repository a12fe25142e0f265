"""
One query round, step by step
=============================

Three sensors on a line: a source at distance 0.8 from the sink and two
plain sensors at 0.55 and 0.28. Every broadcast reaches 0.3 around its
emitter. We run the round, look at who fired when, and export the trace
digraph.
"""

from anonroute.engine import SINK, export_dot, run_trial
from anonroute.metrics import evaluate
from anonroute.world import WorldConfig, build_deployment, sample_deployment

# n_r is chosen so that sqrt(n_r / n) * R == 0.3
cfg = WorldConfig(n=3, n_star=1, f=0.3, n_r=3 * 0.3 ** 2, seed=0)
dep = build_deployment(cfg, [0.8, 0.55, 0.28], [0.0, 0.0, 0.0], [True, False, False])

out = run_trial(dep)
for t, sensor, from_timer in out.emissions:
    print(f"t={t:.3f}  sensor {sensor} broadcasts ({'timer' if from_timer else 'initial'})")

# The outer source's timer finds nothing to forward; the two relays fire in turn.
name = {SINK: "sink"}
print("edges:", [(name.get(u, u), name.get(w, w)) for u, w in out.digraph.edges])
print("collected by the sink:", sorted(out.collected))
print(evaluate(out))

##############################################################################
# A random deployment at the scale of the paper's illustration: 100 sensors,
# 10 sources, f = 0.3 and r = 0.26 R. Render the DOT file with
# ``neato -n -Tpng single_trial.dot -o single_trial.png``.

dep = sample_deployment(WorldConfig(n=100, n_star=10, f=0.3, n_r=6.76, seed=7))
out = run_trial(dep)
print(evaluate(out))
with open("single_trial.dot", "w", encoding="utf-8") as fh:
    fh.write(export_dot(out, dep))
