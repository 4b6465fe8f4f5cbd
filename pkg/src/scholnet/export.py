"""File writers: GEXF 1.2 graphs and plain CSV tables.

Output is byte-stable: rows are sorted, floats use ``repr`` and no
timestamps are written anywhere.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from pathlib import Path
from xml.sax.saxutils import quoteattr

from .netbuild import WeightedGraph

NODE_ATTRIBUTES = (("category", "string"), ("lat", "double"), ("lon", "double"),
                   ("paper_count", "integer"))


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, float):
        if value.is_integer() and abs(value) < 1e15:
            return str(int(value))
        return repr(value)
    return str(value)


def gexf_string(g: WeightedGraph) -> str:
    kind = "directed" if g.directed else "undirected"
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<gexf xmlns="http://gexf.net/1.2" version="1.2">',
        f'  <graph mode="static" defaultedgetype="{kind}">',
        '    <attributes class="node">',
    ]
    for idx, (title, typ) in enumerate(NODE_ATTRIBUTES):
        out.append(f'      <attribute id="{idx}" title="{title}" type="{typ}"/>')
    out.append("    </attributes>")
    out.append("    <nodes>")
    for node in g.sorted_nodes():
        attrs = g.nodes[node]
        label = attrs.get("label", node)
        out.append(f"      <node id={quoteattr(node)} label={quoteattr(str(label))}>")
        out.append("        <attvalues>")
        for idx, (title, _) in enumerate(NODE_ATTRIBUTES):
            value = attrs.get(title)
            if value is not None:
                out.append(f'          <attvalue for="{idx}" value={quoteattr(fmt(value))}/>')
        out.append("        </attvalues>")
        out.append("      </node>")
    out.append("    </nodes>")
    out.append("    <edges>")
    for idx, (u, v, w) in enumerate(g.sorted_edges()):
        out.append(f'      <edge id="{idx}" source={quoteattr(u)} target={quoteattr(v)} '
                   f'weight="{fmt(w)}"/>')
    out.append("    </edges>")
    out.append("  </graph>")
    out.append("</gexf>")
    return "\n".join(out) + "\n"


def csv_string(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def edge_list_csv(g: WeightedGraph) -> str:
    return csv_string(("source", "target", "weight"), g.sorted_edges())


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path
