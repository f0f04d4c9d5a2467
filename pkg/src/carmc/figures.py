"""Render the class diagram and state machines as PNG figures.

The layouts are computed here (grid for classes, topological layers for
states) so the output does not depend on a graphviz binary. Figures are a
convenience view next to the dot/json/tsv outputs; matplotlib is only
imported when they are requested.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Circle, FancyArrowPatch

from . import objectmodel as om
from .dm_rules import PRE_CREATION, StateTransitionDiagram

_BOX_W, _BOX_H_BASE, _LINE_H = 3.2, 0.55, 0.28
_GRID_X, _GRID_Y = 4.2, 1.2


def _class_box_lines(cls: om.Class) -> list[str]:
    lines = [a.name for a in cls.attributes]
    lines.append("")
    lines.extend(s.name for s in cls.services)
    return lines


def render_class_figure(model: om.ObjectModel, path: Path) -> Path:
    per_row = 3
    positions: dict[str, tuple[float, float]] = {}
    heights: dict[str, float] = {}
    y = 0.0
    for row_start in range(0, len(model.classes), per_row):
        row = model.classes[row_start:row_start + per_row]
        row_h = max(_BOX_H_BASE + _LINE_H * len(_class_box_lines(c)) for c in row)
        for col, cls in enumerate(row):
            positions[cls.name] = (col * _GRID_X, y)
            heights[cls.name] = row_h
        y -= row_h + _GRID_Y
    width = per_row * _GRID_X
    height = -y + 1.0
    fig, ax = plt.subplots(figsize=(max(width * 0.9, 4.0), max(height * 0.75, 3.0)))
    ax.axis("off")
    for cls in model.classes:
        x, top = positions[cls.name]
        box_h = heights[cls.name]
        ax.add_patch(plt.Rectangle((x, top - box_h), _BOX_W, box_h, fill=False, linewidth=1.2))
        ax.text(x + _BOX_W / 2, top - 0.18, cls.name, ha="center", va="top",
                fontsize=9, fontweight="bold")
        cursor = top - _BOX_H_BASE
        for line in _class_box_lines(cls):
            if line:
                ax.text(x + 0.15, cursor, line, ha="left", va="top", fontsize=7)
            else:
                ax.plot([x, x + _BOX_W], [cursor + 0.06, cursor + 0.06],
                        linewidth=0.8, color="black")
            cursor -= _LINE_H
    for rel in model.relationships:
        xa, ya = positions[rel.class_a]
        xb, yb = positions[rel.class_b]
        ca = (xa + _BOX_W / 2, ya - heights[rel.class_a] / 2)
        cb = (xb + _BOX_W / 2, yb - heights[rel.class_b] / 2)
        ax.plot([ca[0], cb[0]], [ca[1], cb[1]], linewidth=0.9, color="gray", zorder=0)
        ax.text((ca[0] + cb[0]) / 2, (ca[1] + cb[1]) / 2,
                f"{rel.card_a} --- {rel.card_b}", fontsize=6, ha="center", va="bottom",
                color="dimgray")
    ax.set_xlim(-0.5, width)
    ax.set_ylim(y + _GRID_Y - 0.5, 1.0)
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
    return path


def _state_layers(std: StateTransitionDiagram) -> dict[str, int]:
    """Longest-path depth from the pre-creation state, cycles ignored."""
    succ: dict[str, list[str]] = {s.name: [] for s in std.states}
    for t in std.transitions:
        if t.source != t.target:
            succ[t.source].append(t.target)
    depth = {s.name: 0 for s in std.states}
    changed = True
    rounds = 0
    while changed and rounds <= len(std.states) + 1:
        changed = False
        rounds += 1
        for source, targets in succ.items():
            for target in targets:
                if depth[target] < depth[source] + 1:
                    depth[target] = depth[source] + 1
                    changed = True
    return depth


def render_std_figure(std: StateTransitionDiagram, path: Path) -> Path:
    depth = _state_layers(std)
    layers: dict[int, list[str]] = {}
    for state in std.states:
        layers.setdefault(depth[state.name], []).append(state.name)
    positions: dict[str, tuple[float, float]] = {}
    for level in sorted(layers):
        names = layers[level]
        for i, name in enumerate(names):
            positions[name] = (i * 3.0 - (len(names) - 1) * 1.5, -level * 1.6)
    width = max(3.5, 3.0 * max(len(v) for v in layers.values()))
    height = max(3.0, 1.6 * (max(layers) + 1))
    fig, ax = plt.subplots(figsize=(width, height))
    ax.axis("off")
    kinds = {s.name: s.kind for s in std.states}
    for name, (x, y) in positions.items():
        if kinds[name] == PRE_CREATION:
            ax.add_patch(Circle((x, y), 0.12, color="black"))
        else:
            style = "dashed" if kinds[name] == "auxiliary" else "solid"
            ax.add_patch(plt.Rectangle((x - 1.1, y - 0.3), 2.2, 0.6, fill=False,
                                       linewidth=1.1, linestyle=style))
            ax.text(x, y, name, ha="center", va="center", fontsize=8)
    for t in std.transitions:
        xa, ya = positions[t.source]
        xb, yb = positions[t.target]
        if t.source == t.target:
            arrow = FancyArrowPatch((xa + 1.1, ya + 0.1), (xa + 1.1, ya - 0.1),
                                    connectionstyle="arc3,rad=2.2",
                                    arrowstyle="-|>", mutation_scale=10, color="gray")
            label_pos = (xa + 1.9, ya)
        else:
            arrow = FancyArrowPatch((xa, ya - 0.32), (xb, yb + 0.32),
                                    arrowstyle="-|>", mutation_scale=10, color="black",
                                    linewidth=0.9)
            label_pos = ((xa + xb) / 2 + 0.1, (ya + yb) / 2)
        ax.add_patch(arrow)
        ax.text(*label_pos, t.label(), fontsize=6.5, ha="left", va="center", color="dimgray")
    ax.set_title(std.class_name, fontsize=10)
    ax.relim()
    ax.autoscale_view()
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
    return path


def render_figures(model: om.ObjectModel, stds: list[StateTransitionDiagram],
                   out_dir: Path) -> list[Path]:
    written: list[Path] = []
    if model.classes:
        written.append(render_class_figure(model, out_dir / "classes.png"))
    for std in stds:
        written.append(render_std_figure(std, out_dir / f"std_{std.class_name}.png"))
    return written
