"""
How the gap test suppresses redundant relays
============================================

Adding a fourth sensor just off the axis next to the relay at 0.55 makes
that relay redundant: the new sensor fires a moment earlier, and the relay
then finds its nearest farther-out contributor only 0.009 away, well under
f * r = 0.09, so it stays silent.
"""

from anonroute.engine import run_trial
from anonroute.metrics import evaluate
from anonroute.protocol import select_relay_gap
from anonroute.world import WorldConfig, build_deployment

xs = [0.8, 0.55, 0.28, 0.55]
ys = [0.0, 0.0, 0.0, 0.1]
cfg = WorldConfig(n=4, n_star=1, f=0.3, n_r=4 * 0.3 ** 2, seed=0)
dep = build_deployment(cfg, xs, ys, [True, False, False, False])
out = run_trial(dep)

relay = out.states[1]
sel = select_relay_gap(relay.store, relay.P_i, cfg.B0)
print(f"relay at 0.55: nearest outer contributor at {sel.R_j:.4f}, "
      f"gap {sel.R_j - relay.R_i:.4f} vs f*r = {cfg.f * dep.r:.2f}")
print("broadcasts per sensor:", out.digraph.broadcasts)
print("edges:", out.digraph.edges)
print(evaluate(out))

##############################################################################
# Sweeping f on a larger random deployment shows the trade-off: a larger gap
# requirement saves broadcasts but loses sources.

from anonroute.world import sample_deployment  # noqa: E402

for f in (0.0, 0.1, 0.3, 0.5, 1.0):
    cfg = WorldConfig(n=2000, n_star=40, f=f, n_r=13, seed=3)
    m = evaluate(run_trial(sample_deployment(cfg)))
    print(f"f={f:.1f}  connected={m.connected_fraction:.3f}  "
          f"power ratio={m.power_ratio:6.2f}  treeness={m.treeness:.2f}")
