"""
StairKit - Overlay Figures
SVG overlay of ground-truth labels and clustered stair lines on an image canvas
"""

import xml.etree.ElementTree as ET
from typing import Sequence, Tuple

from stairkit.core.line_cluster import StairLine2D
from stairkit.models.grid import StairClass, StairLineLabel

SVG_NS = "http://www.w3.org/2000/svg"
XML_DECLARATION = '<?xml version="1.0" encoding="UTF-8"?>\n'

ET.register_namespace("", SVG_NS)

# one colour per cluster, cycled
CLUSTER_PALETTE = (
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
    "#46f0f0", "#f032e6", "#bcf60c", "#008080", "#9a6324",
)
GT_COLORS = {StairClass.CONVEX: "#ffffff", StairClass.CONCAVE: "#ffe119", StairClass.UNKNOWN: "#808080"}


def _num(value: float) -> str:
    """Fixed 3-decimal form so the same input always gives the same bytes"""
    text = f"{value:.3f}".rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


def _path(parent: ET.Element, x1: float, y1: float, x2: float, y2: float, **attrs: str) -> ET.Element:
    return ET.SubElement(
        parent,
        "path",
        {"d": f"M {_num(x1)} {_num(y1)} L {_num(x2)} {_num(y2)}", "fill": "none", **attrs},
    )


def render_overlay(
    image_dims: Tuple[int, int],
    lines: Sequence[StairLine2D] = (),
    labels: Sequence[StairLineLabel] = (),
) -> str:
    """
    SVG document with one path per ground-truth label (dashed, coloured by class)
    and one path per predicted line (solid, coloured by cluster index)
    """
    width, height = image_dims
    root = ET.Element(
        f"{{{SVG_NS}}}svg",
        {"width": str(width), "height": str(height), "viewBox": f"0 0 {width} {height}"},
    )
    ET.SubElement(root, "rect", {"x": "0", "y": "0", "width": str(width), "height": str(height), "fill": "#000000"})

    gt_group = ET.SubElement(root, "g", {"id": "ground-truth"})
    for label in labels:
        _path(gt_group, label.x1, label.y1, label.x2, label.y2, **{
            "stroke": GT_COLORS[label.cls],
            "stroke-width": "2",
            "stroke-dasharray": "6 4",
            "class": "convex" if label.cls == StairClass.CONVEX else "concave",
        })

    pred_group = ET.SubElement(root, "g", {"id": "predicted"})
    for n, line in enumerate(lines):
        _path(pred_group, line.x1, line.y1, line.x2, line.y2, **{
            "stroke": CLUSTER_PALETTE[n % len(CLUSTER_PALETTE)],
            "stroke-width": "2",
            "data-cluster": str(n),
            "data-members": str(line.member_count),
        })

    return XML_DECLARATION + ET.tostring(root, encoding="unicode") + "\n"
