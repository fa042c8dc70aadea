"""Reproducing a full SNR sweep to CSV and SVG.

``figure_config`` returns the preset sweeps (fig1, fig2, fig3). The same runs
are available from the command line as ``cpdsss fig2 --out fig2.csv``.
"""

import sys
from pathlib import Path

from cpdsss.harness import figure_config, run_sweep

out = Path(sys.argv[1] if len(sys.argv) > 1 else "fig2.csv")
cfg = figure_config("fig2", trials=5)
res = run_sweep(cfg, output=out)
print(f"{len(res.records)} records, {len(res.aggregates)} cells -> {out}")

try:
    from cpdsss.plotting import plot_aggregate
except ImportError:
    print("matplotlib not installed; skipping the plot")
else:
    svg = plot_aggregate(out.with_name(out.stem + "_aggregate.csv"), out.with_suffix(".svg"))
    print(f"plot -> {svg}")
