"""
Indicators against the source ratio
===================================

A reduced version of the full sweep (n = 2000, nine source ratios, three f
values, one n_r, a handful of trials per cell). The results go to a CSV and
to per-indicator plot-data files; if matplotlib is available the three
indicators are drawn against a logarithmic ratio axis.
"""

from pathlib import Path

from anonroute.experiment import default_paper_spec, emit_csv, emit_plot_data, run_sweep

spec = default_paper_spec()
spec.n_r_values = [13.0]
spec.trials = 5

rows = run_sweep(spec, progress=lambda cell: print("done", cell))
Path("sweep_results.csv").write_text(emit_csv(rows), encoding="utf-8")
emit_plot_data(rows, "sweep_plots")

##############################################################################
# One panel per indicator, one curve per f.

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, axes = plt.subplots(3, 1, figsize=(4, 9), sharex=True)
    for ax, (col, label) in zip(axes, [("cf_mean", "connected sources"),
                                       ("pr_mean", "power usage ratio"),
                                       ("tr_mean", "treeness")]):
        for f in spec.f_values:
            sub = [r for r in rows if r.f == f]
            ax.plot([r.ratio for r in sub], [getattr(r, col) for r in sub], "o-",
                    label=f"f={f:g}")
        ax.set_xscale("log")
        ax.set_ylabel(label)
    axes[0].legend()
    axes[-1].set_xlabel("n*/n")
    fig.tight_layout()
    fig.savefig("sweep_nr13.png", dpi=120)
