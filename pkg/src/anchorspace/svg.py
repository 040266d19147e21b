"""SVG rendering of topologies and path traces (debugging aid).

Nodes are circles, the routed path is a single polyline, anchors get
distinct markers: diamonds for positioned anchors, border arrows for
directional ones.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .topology import DirectionalAnchor, PositionedAnchor, Topology


def render_route_svg(
    topology: Topology,
    path: Sequence[int],
    destination: Optional[int] = None,
    title: str = "",
    size: int = 640,
    margin: float = 40.0,
) -> str:
    """Render one routed path over the topology as an SVG document."""
    xs = [p.x for p in topology.nodes]
    ys = [p.y for p in topology.nodes]
    for a in topology.anchors:
        if isinstance(a, PositionedAnchor):
            xs.append(a.point.x)
            ys.append(a.point.y)
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    span = max(xmax - xmin, ymax - ymin, 1e-9)
    scale = (size - 2.0 * margin) / span

    def sx(x: float) -> float:
        return margin + (x - xmin) * scale

    def sy(y: float) -> float:
        return size - (margin + (y - ymin) * scale)  # SVG y grows downward

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{margin:.1f}" y="20" font-size="13" fill="#333">{title}</text>')
    for p in topology.nodes:
        out.append(f'<circle cx="{sx(p.x):.2f}" cy="{sy(p.y):.2f}" r="2.5" fill="#9db2bd"/>')
    cx, cy = sx((xmin + xmax) / 2.0), sy((ymin + ymax) / 2.0)
    for a in topology.anchors:
        if isinstance(a, PositionedAnchor):
            x, y = sx(a.point.x), sy(a.point.y)
            out.append(
                f'<rect x="{x - 5:.2f}" y="{y - 5:.2f}" width="10" height="10" '
                f'fill="#ff8c00" transform="rotate(45 {x:.2f} {y:.2f})"/>'
            )
        elif isinstance(a, DirectionalAnchor):
            dx, dy = a.direction
            tip_x = cx + dx * (size / 2.0 - margin / 2.0)
            tip_y = cy - dy * (size / 2.0 - margin / 2.0)
            tail_x = tip_x - dx * 30.0
            tail_y = tip_y + dy * 30.0
            out.append(
                f'<line x1="{tail_x:.2f}" y1="{tail_y:.2f}" x2="{tip_x:.2f}" '
                f'y2="{tip_y:.2f}" stroke="#ff8c00" stroke-width="3"/>'
            )
            out.append(
                f'<circle cx="{tip_x:.2f}" cy="{tip_y:.2f}" r="5" fill="#ff8c00"/>'
            )
    if path:
        pts = " ".join(
            f"{sx(topology.nodes[v].x):.2f},{sy(topology.nodes[v].y):.2f}" for v in path
        )
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="#d62728" stroke-width="2"/>'
        )
        s = topology.nodes[path[0]]
        out.append(f'<circle cx="{sx(s.x):.2f}" cy="{sy(s.y):.2f}" r="5" fill="#2ca02c"/>')
    if destination is not None:
        t = topology.nodes[destination]
        out.append(
            f'<circle cx="{sx(t.x):.2f}" cy="{sy(t.y):.2f}" r="6" fill="none" '
            f'stroke="#d62728" stroke-width="2.5"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
