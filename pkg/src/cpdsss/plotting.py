"""Capacity-versus-SNR line plots rendered from an aggregate CSV."""

from __future__ import annotations

import csv
from pathlib import Path


def plot_aggregate(csv_path, svg_path) -> Path:
    """Render one line per (direction, csi_mode, k, m) plus its ideal reference."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series: dict[tuple, list[tuple[float, float, float]]] = {}
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["direction"], row["csi_mode"], int(row["k"]), int(row["m"]))
            series.setdefault(key, []).append(
                (float(row["snr_db"]), float(row["mean_capacity_bpcu"]), float(row["mean_ideal_bpcu"]))
            )

    fig, ax = plt.subplots(figsize=(6, 4.5))
    ideals_drawn = set()
    for (direction, csi, k, m), pts in sorted(series.items()):
        pts.sort()
        snr = [p[0] for p in pts]
        (line,) = ax.semilogy(snr, [p[1] for p in pts], marker="o", ms=3,
                              ls="-" if csi == "perfect" else "--",
                              label=f"{direction.upper()} K={k} M={m} ({csi} CSI)")
        if (direction, m) not in ideals_drawn:
            ideals_drawn.add((direction, m))
            ax.semilogy(snr, [p[2] for p in pts], color="k", ls=":", lw=1,
                        label=f"ideal single user, M={m}")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("capacity (bits per channel use)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    svg_path = Path(svg_path)
    fig.savefig(svg_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return svg_path
