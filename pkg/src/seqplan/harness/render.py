"""Layout files and three-view SVG drawings of pipe layouts."""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from pathlib import Path

from ..planners import PipeLayout, PipeTaskSpec
from ..validators import layout_gaps

PANEL = 240  # px per view, margins included
MARGIN = 20
PLANES = {"XY": (0, 1), "XZ": (0, 2), "YZ": (1, 2)}
SVG_NS = "http://www.w3.org/2000/svg"


def layout_to_json(layout: PipeLayout, spec: PipeTaskSpec) -> dict:
    return {**spec.to_json(), "segments": layout.to_json()}


def load_layout(path: str | Path) -> tuple[PipeLayout, PipeTaskSpec]:
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    return PipeLayout.from_json(d.get("segments", [])), PipeTaskSpec.from_json(d)


def _scale(spec: PipeTaskSpec) -> float:
    return (PANEL - 2 * MARGIN) / max(spec.room, 1)


def _project(p, plane: str, ox: float, s: float, room: int) -> tuple[float, float]:
    i, j = PLANES[plane]
    return ox + MARGIN + p[i] * s, MARGIN + (room - p[j]) * s


def render_svg(layout: PipeLayout, spec: PipeTaskSpec) -> ET.Element:
    s = _scale(spec)
    room = spec.room
    gaps = layout_gaps(layout)
    svg = ET.Element("svg", xmlns=SVG_NS, width=str(PANEL * 3), height=str(PANEL + 20),
                     viewBox=f"0 0 {PANEL * 3} {PANEL + 20}")
    svg.set("data-room", str(room))
    style = ET.SubElement(svg, "style")
    style.text = (".pipe{stroke:#1f4e9c;stroke-width:3}.frame{fill:none;stroke:#999}"
                  ".obstacle{fill:#000}.mandatory{fill:none;stroke:#000;stroke-width:2}"
                  ".start{fill:#2a2}.end{fill:#d22}.gap{fill:none;stroke:#f0a000;stroke-width:3}"
                  ".gap-link{stroke:#f0a000;stroke-dasharray:4 3}")
    for k, plane in enumerate(PLANES):
        ox = k * PANEL
        g = ET.SubElement(svg, "g", {"class": "panel", "data-plane": plane,
                                     "data-origin": f"{ox + MARGIN},{MARGIN}", "data-scale": repr(s)})
        ET.SubElement(g, "rect", {"class": "frame", "x": str(ox + MARGIN), "y": str(MARGIN),
                                  "width": str(room * s), "height": str(room * s)})
        label = ET.SubElement(g, "text", x=str(ox + MARGIN), y=str(PANEL + 10))
        label.text = plane
        for idx, pipe in enumerate(layout.pipes):
            (x1, y1), (x2, y2) = (_project(pipe.start, plane, ox, s, room), _project(pipe.end, plane, ox, s, room))
            ET.SubElement(g, "line", {"class": "pipe", "data-index": str(idx),
                                      "x1": f"{x1:g}", "y1": f"{y1:g}", "x2": f"{x2:g}", "y2": f"{y2:g}"})
        for cls, pts in (("start", [spec.start]), ("end", [spec.end]), ("obstacle", spec.obstacles)):
            for p in pts:
                cx, cy = _project(p, plane, ox, s, room)
                ET.SubElement(g, "rect", {"class": cls, "data-point": ",".join(map(str, p)),
                                          "x": f"{cx - 4:g}", "y": f"{cy - 4:g}", "width": "8", "height": "8"})
        for p in spec.mandatory:
            cx, cy = _project(p, plane, ox, s, room)
            ET.SubElement(g, "circle", {"class": "mandatory", "data-point": ",".join(map(str, p)),
                                        "cx": f"{cx:g}", "cy": f"{cy:g}", "r": "6"})
        for a, b in gaps:
            (x1, y1), (x2, y2) = _project(a, plane, ox, s, room), _project(b, plane, ox, s, room)
            ET.SubElement(g, "line", {"class": "gap-link", "x1": f"{x1:g}", "y1": f"{y1:g}",
                                      "x2": f"{x2:g}", "y2": f"{y2:g}"})
            ET.SubElement(g, "circle", {"class": "gap", "data-from": ",".join(map(str, a)),
                                        "data-to": ",".join(map(str, b)),
                                        "cx": f"{(x1 + x2) / 2:g}", "cy": f"{(y1 + y2) / 2:g}",
                                        "r": f"{10 + abs(x2 - x1) / 2 + abs(y2 - y1) / 2:g}"})
    return svg


def export_layout(layout: PipeLayout, spec: PipeTaskSpec, json_path: str | Path,
                  svg_path: str | Path | None = None) -> tuple[Path, Path]:
    """Write the layout JSON and its SVG drawing (next to it unless ``svg_path`` is given)."""
    json_path = Path(json_path)
    svg_path = Path(svg_path) if svg_path is not None else json_path.with_suffix(".svg")
    json_path.write_text(json.dumps(layout_to_json(layout, spec), indent=2), encoding="utf-8")
    tree = ET.ElementTree(render_svg(layout, spec))
    ET.indent(tree)
    tree.write(svg_path, encoding="utf-8", xml_declaration=True)
    return json_path, svg_path
