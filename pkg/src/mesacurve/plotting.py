"""Figures of dual graphs with PL values; rendered off-screen to image files."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402

from .graph import DualGraph  # noqa: E402
from .pl import PLFunction  # noqa: E402


def _colors(g: DualGraph, supports):
    palette = ["#d95f02", "#1b9e77", "#7570b3", "#e7298a", "#66a61e"]
    color = {v: "#cccccc" for v in g.vertex_ids}
    for i, E in enumerate(supports):
        for v in E:
            color[v] = palette[i % len(palette)]
    return [color[v] for v in g.vertex_ids]


def plot_graph(g: DualGraph, pl: PLFunction | None, path: str, title: str = "", supports=(), tops=()) -> str:
    """Draw ``g`` with vertex labels ``id (genus) value`` and edge labels delta; returns ``path``."""
    mg = nx.MultiGraph()
    mg.add_nodes_from(g.vertex_ids)
    for e in g.edges:
        mg.add_edge(*e.ends, key=e.id)
    pos = nx.spring_layout(nx.Graph(mg), seed=0) if len(g.vertex_ids) > 1 else {g.vertex_ids[0]: (0.0, 0.0)}
    fig, ax = plt.subplots(figsize=(6, 4.5))
    top_set = set().union(*tops) if tops else set()
    nx.draw_networkx_nodes(mg, pos, ax=ax, node_color=_colors(g, supports),
                           edgecolors=["black" if v in top_set else "none" for v in g.vertex_ids], linewidths=2)
    seen: dict[frozenset, int] = {}
    for e in g.edges:
        a, b = e.ends
        key = frozenset(e.ends)
        k = seen.get(key, 0)
        seen[key] = k + 1
        if a == b:
            x, y = pos[a]
            ax.add_patch(plt.Circle((x, y + 0.08 * (k + 1)), 0.08 * (k + 1), fill=False, lw=1))
            ax.annotate(e.id, (x, y + 0.17 * (k + 1)), fontsize=7, ha="center")
            continue
        rad = 0.25 * ((k + 1) // 2) * (1 if k % 2 else -1) if k else 0.0
        ax.annotate("", xy=pos[b], xytext=pos[a],
                    arrowprops=dict(arrowstyle="-", connectionstyle=f"arc3,rad={rad}", lw=1))
        mx, my = (pos[a][0] + pos[b][0]) / 2, (pos[a][1] + pos[b][1]) / 2
        ax.annotate(f"{e.id} {list(e.delta.coords)}", (mx, my + rad * 0.5), fontsize=7, ha="center", color="#444444")
    labels = {}
    for v in g.vertex_ids:
        val = list(pl.value(v).coords) if pl is not None else ""
        gen = g.vertex(v).genus
        labels[v] = f"{v}" + (f" (g={gen})" if gen else "") + (f"\n{val}" if pl is not None else "")
    nx.draw_networkx_labels(mg, pos, labels=labels, ax=ax, font_size=8)
    ax.set_title(title, fontsize=10)
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
