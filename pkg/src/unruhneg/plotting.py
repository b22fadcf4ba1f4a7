"""SVG figures of negativity against r, one curve per q_R."""

from __future__ import annotations

import io
from collections import OrderedDict
from math import sqrt

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .sweeps import MalformedCSVError, read_rows  # noqa: E402

golden_mean = (sqrt(5.0) - 1.0) / 2.0
fig_width = 5.0
fig_size = [fig_width, fig_width * golden_mean]

params = {
    "axes.labelsize": 11,
    "font.family": "serif",
    "font.size": 9,
    "mathtext.fontset": "stix",
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "figure.figsize": fig_size,
    "lines.linewidth": 1.2,
    "lines.markersize": 3,
    "figure.subplot.left": 0.14,
    "figure.subplot.bottom": 0.16,
    "figure.subplot.right": 0.96,
    "figure.subplot.top": 0.93,
    # fixed ids and no timestamp: identical input gives identical bytes
    "svg.hashsalt": "unruhneg",
    "svg.fonttype": "path",
}


def curve_gid(q_r: float) -> str:
    return f"curve-qr-{q_r:.6g}"


def _curves(rows):
    curves = OrderedDict()
    for row in rows:
        curves.setdefault(row.q_r, []).append((row.r, row.negativity, row.converged))
    # top to bottom in the legend: largest q_R first
    return OrderedDict(sorted(curves.items(), key=lambda kv: -kv[0]))


def render_svg(rows, title: str | None = None) -> bytes:
    """Render sweep rows to SVG bytes. Unconverged points get hollow markers."""
    rows = list(rows)
    if not rows:
        raise MalformedCSVError("no rows to plot")
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        try:
            for q_r, pts in _curves(rows).items():
                pts.sort()
                rs = [p[0] for p in pts]
                ns = [p[1] for p in pts]
                (line,) = ax.plot(rs, ns, marker="o", label=rf"$q_R={q_r:g}$", gid=curve_gid(q_r))
                bad = [(r, n) for r, n, ok in pts if not ok]
                if bad:
                    ax.plot(*zip(*bad), linestyle="none", marker="o", markersize=6,
                            markerfacecolor="none", color=line.get_color(),
                            gid=curve_gid(q_r) + "-unconverged")
            ax.set_xlabel(r"$r$")
            ax.set_ylabel(r"$\mathcal{N}$")
            if title is None:
                title = f"{rows[0].family}, {rows[0].bipartition}"
            ax.set_title(title)
            ax.set_ylim(bottom=0)
            ax.legend(frameon=False)
            buf = io.BytesIO()
            fig.savefig(buf, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    return buf.getvalue()


def emit_plot(csv_path, svg_path) -> None:
    """Read a sweep CSV and write its SVG figure."""
    data = render_svg(read_rows(csv_path))
    with open(svg_path, "wb") as fh:
        fh.write(data)
