"""
Overlay Figure Tests
"""

import xml.etree.ElementTree as ET

from stairkit.core.line_cluster import cluster_grid
from stairkit.core.overlay import SVG_NS, render_overlay

NS = {"svg": SVG_NS}


def test_overlay_groups_and_paths(two_line_grid, two_lines):
    svg = render_overlay((512, 512), cluster_grid(two_line_grid), two_lines)
    root = ET.fromstring(svg)
    assert root.tag == f"{{{SVG_NS}}}svg"
    assert root.get("viewBox") == "0 0 512 512"

    gt = root.findall("svg:g[@id='ground-truth']/svg:path", NS)
    assert [p.get("class") for p in gt] == ["convex", "concave"]
    assert all(p.get("stroke-dasharray") for p in gt)

    predicted = root.findall("svg:g[@id='predicted']/svg:path", NS)
    assert [p.get("d") for p in predicted] == ["M 0 100 L 512 100", "M 0 200 L 512 200"]
    assert [p.get("data-members") for p in predicted] == ["16", "16"]
    assert predicted[0].get("stroke") != predicted[1].get("stroke")


def test_overlay_is_deterministic(two_line_grid, two_lines):
    lines = cluster_grid(two_line_grid)
    first = render_overlay((512, 512), lines, two_lines)
    assert first == render_overlay((512, 512), lines, two_lines)
    assert first.startswith('<?xml version="1.0" encoding="UTF-8"?>')
    assert first.endswith("</svg>\n")


def test_empty_overlay_has_only_the_canvas():
    root = ET.fromstring(render_overlay((320, 240)))
    assert root.get("width") == "320"
    assert root.findall(".//svg:path", NS) == []
