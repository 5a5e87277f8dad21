"""Figure rendering for sweep output.

Kept separate from the table emitters so report runs can write a PNG next
to the delimited file without dragging matplotlib into the numeric path.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .montecarlo import SweepTable

# Closed-form curves get lines; Monte Carlo estimates get error-bar markers
# keyed to their stderr column.
_MC_PAIRS = (
    ("mc_cmimo_mean", "mc_cmimo_stderr", "co-located MC"),
    ("mc_dmimo_mean", "mc_dmimo_stderr", "distributed MC"),
)
_CURVE_LABELS = {
    "se_cmimo_asym": "co-located, closed form",
    "se_dmimo_asym": "distributed, closed form",
    "se_cmimo_high_snr": "co-located, high-SNR",
    "se_dmimo_high_snr": "distributed, high-SNR",
    "se_cmimo_ring": "co-located (center), closed form",
    "se_dmimo_ring": "ring, closed form",
    "avg_se_dmimo": "ring, disk-averaged",
    "avg_se_cmimo_center": "center, disk-averaged",
}


def render_sweep(table: SweepTable, path: str) -> None:
    """Render a SweepTable to an image file (format from the extension)."""
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    xs = [row[table.axis] for row in table.rows]

    for col, label in _CURVE_LABELS.items():
        if col not in table.columns:
            continue
        ys = [row.get(col) for row in table.rows]
        if all(y is None for y in ys):
            continue
        ax.plot(xs, ys, marker=".", linewidth=1.4, label=label)

    for mean_col, err_col, label in _MC_PAIRS:
        if mean_col not in table.columns:
            continue
        pts = [
            (x, row[mean_col], row.get(err_col) or 0.0)
            for x, row in zip(xs, table.rows)
            if row.get(mean_col) is not None
        ]
        if not pts:
            continue
        px, py, pe = zip(*pts)
        ax.errorbar(px, py, yerr=[3.0 * e for e in pe], fmt="o", markersize=4,
                    capsize=3, linestyle="none", label=label)

    ax.set_xlabel(table.axis)
    ax.set_ylabel("spectral efficiency (bit/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_ring_profile(r_grid, se_by_snr: dict, r_a_opt: float, path: str) -> None:
    """Plot disk-averaged spectral efficiency against ring radius."""
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    for snr_db, values in se_by_snr.items():
        ax.plot(r_grid, values, linewidth=1.4, label=f"snr = {snr_db:g} dB")
    ax.axvline(r_a_opt, color="k", linestyle="--", linewidth=1.0,
               label=f"optimum r_a = {r_a_opt:.4g}")
    ax.set_xlabel("ring radius r_a")
    ax.set_ylabel("disk-averaged spectral efficiency (bit/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
