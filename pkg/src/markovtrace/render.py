"""Graphviz DOT output for diagrams.

Boxes become nodes and wires become edges labelled with their type. Input
and output ports sit in ``rank=source`` / ``rank=sink`` groups so the layout
runs left to right. A wire that no box or output port reads ends in a point
node (a delete); a wire read several times fans out (a copy). Node names
come from the canonical numbering, so isomorphic diagrams render to the same
bytes.
"""
from __future__ import annotations

from .diagram import Diagram


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(d: Diagram, name: str = "diagram") -> str:
    c = d.canonical.cospan
    g = c.apex
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", '  node [fontname="Helvetica"];',
             '  edge [fontname="Helvetica", fontsize=10];']

    lines.append("  { rank=source;")
    for j, w in enumerate(c.left):
        lines.append(f'    in{j} [shape=plaintext, label="{j}"];')
    lines.append("  }")
    for i, b in enumerate(g.boxes):
        lines.append(f"  b{i} [shape=box, label={_quote(b.label)}];")
    lines.append("  { rank=sink;")
    for j, w in enumerate(c.right):
        lines.append(f'    out{j} [shape=plaintext, label="{j}"];')
    lines.append("  }")

    source = {w: f"in{j}" for j, w in enumerate(c.left)}
    for i, b in enumerate(g.boxes):
        for w in b.outputs:
            source[w] = f"b{i}"
    targets: dict[int, list[str]] = {w: [] for w in range(g.n_wires)}
    for i, b in enumerate(g.boxes):
        for w in b.inputs:
            targets[w].append(f"b{i}")
    for j, w in enumerate(c.right):
        targets[w].append(f"out{j}")

    for w in range(g.n_wires):
        src = source[w]
        label = _quote(g.wire_labels[w])
        tails = targets[w]
        if not tails:
            lines.append(f"  del{w} [shape=point];")
            tails = [f"del{w}"]
        for t in tails:
            lines.append(f"  {src} -> {t} [label={label}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
