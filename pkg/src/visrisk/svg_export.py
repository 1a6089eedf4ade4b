"""Static SVG renderings of the five views, built from the API payloads.

Each renderer consumes exactly what the corresponding endpoints serve, so a
saved picture matches what the browser shows for the same permalink.  The
geometry is deliberately plain: lines, rects, circles, text.
"""

from __future__ import annotations

from typing import Optional
from xml.sax.saxutils import escape

from visrisk.datacube import time_key
from visrisk.state import ViewState
from visrisk.workspace import (
    NotFound,
    Workspace,
    ewm_payload,
    events_payload,
    network_payload,
    panel_payload,
    som_payload,
    som_plane_payload,
    som_trajectory_payload,
    sotm_payload,
)

WIDTH, HEIGHT = 960, 540
MARGIN = 60

PALETTE = ("#4878b0", "#d65f5f", "#6aa56a", "#b292c8", "#c2a04d",
           "#7f7f7f", "#57a7b5", "#c97fb5")

STATE_COLORS = ("#5b8fc9", "#e0b13f", "#c9473f", "#7d5ba6", "#5faa5f", "#888888")


def _ramp(v: float) -> str:
    """Blue-to-yellow similarity ramp on [0, 1]."""
    v = min(max(float(v), 0.0), 1.0)
    r = int(40 + v * (245 - 40))
    g = int(70 + v * (220 - 70))
    b = int(200 + v * (50 - 200))
    return f"rgb({r},{g},{b})"


def _svg(children: list[str], width=WIDTH, height=HEIGHT) -> str:
    body = "\n".join(children)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n{body}\n</svg>\n'
    )


def _text(x, y, s, fill="#333", anchor="start", size=11) -> str:
    return (f'<text x="{x:.1f}" y="{y:.1f}" fill="{fill}" text-anchor="{anchor}" '
            f'font-size="{size}">{escape(str(s))}</text>')


def _empty(message: str) -> str:
    return _svg([_text(WIDTH / 2, HEIGHT / 2, message, anchor="middle", size=16)])


def _linear(lo: float, hi: float, out_lo: float, out_hi: float):
    span = hi - lo if hi > lo else 1.0
    def scale(v: float) -> float:
        return out_lo + (v - lo) / span * (out_hi - out_lo)
    return scale


def _axes(x0, y0, x1, y1, y_lo, y_hi) -> list[str]:
    parts = [
        f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="#999"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#999"/>',
        _text(x0 - 6, y1 + 4, f"{y_lo:.2f}", anchor="end"),
        _text(x0 - 6, y0 + 4, f"{y_hi:.2f}", anchor="end"),
    ]
    return parts


def _span_filter(times: list[str], span) -> list[int]:
    if not span:
        return list(range(len(times)))
    lo, hi = time_key(span[0]), time_key(span[1])
    return [i for i, t in enumerate(times) if lo <= time_key(t) <= hi]


def event_key(entity: str, start: str) -> str:
    return f"{entity}|{start}"


def render_dashboard(ws: Workspace, state: ViewState) -> str:
    indicator = state.layer or ws.cube.indicators[0]
    transform = "percentile" if state.transform else "raw"
    panel = panel_payload(ws, indicator, transform)
    entities = [e for e in (state.entities or panel["entities"])
                if e in panel["entities"]]
    keep = _span_filter(panel["times"], state.span)
    if not keep or not entities:
        return _empty("no data in the selected range")
    times = [panel["times"][i] for i in keep]
    series = {}
    for entity in entities:
        row = panel["values"][panel["entities"].index(entity)]
        series[entity] = [row[i] for i in keep]
    observed = [v for row in series.values() for v in row if v is not None]
    if not observed:
        return _empty("no observations in the selected range")
    y_lo, y_hi = min(observed), max(observed)
    sx = _linear(0, max(len(times) - 1, 1), MARGIN, WIDTH - MARGIN)
    sy = _linear(y_lo, y_hi, HEIGHT - MARGIN, MARGIN)
    parts = _axes(MARGIN, MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, y_lo, y_hi)
    parts.append(_text(WIDTH / 2, 24, f"{indicator} ({transform})", anchor="middle", size=14))
    parts.append(_text(MARGIN, HEIGHT - 20, times[0]))
    parts.append(_text(WIDTH - MARGIN, HEIGHT - 20, times[-1], anchor="end"))
    for key in state.events:
        for ev in events_payload(ws):
            if event_key(ev["entity"], ev["start"]) == key and ev["start"] in times:
                x = sx(times.index(ev["start"]))
                parts.append(f'<line x1="{x:.1f}" y1="{MARGIN}" x2="{x:.1f}" '
                             f'y2="{HEIGHT - MARGIN}" stroke="#c44" stroke-dasharray="4 3"/>')
                parts.append(_text(x + 3, MARGIN + 12, ev["label"], fill="#c44"))
    for i, entity in enumerate(entities):
        pts = [(sx(j), sy(v)) for j, v in enumerate(series[entity]) if v is not None]
        if not pts:
            continue
        path = " ".join(f"{x:.1f},{y:.1f}" for x, y in pts)
        color = PALETTE[i % len(PALETTE)]
        parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        parts.append(_text(pts[-1][0] + 4, pts[-1][1], entity, fill=color))
    return _svg(parts)


def render_ewm(ws: Workspace, state: ViewState) -> str:
    payload = ewm_payload(ws)
    entities = list(state.entities) or sorted({r["entity"] for r in payload["rows"]})
    rows = [r for r in payload["rows"] if r["entity"] in entities]
    if state.span:
        lo, hi = time_key(state.span[0]), time_key(state.span[1])
        rows = [r for r in rows if lo <= time_key(r["time"]) <= hi]
    if not rows:
        return _empty("no scored rows in the selected range")
    times = sorted({r["time"] for r in rows}, key=time_key)
    sx = _linear(0, max(len(times) - 1, 1), MARGIN, WIDTH - MARGIN)
    parts = []
    if len(entities) == 1:
        # single economy: stacked contribution bands (bias first) in score space
        groups = ["bias"] + list(payload["groups"])
        by_time = {r["time"]: r for r in rows}
        stacks = []
        for t in times:
            r = by_time.get(t)
            if r is None:
                stacks.append(None)
                continue
            bias = r["score"] - sum(r["contributions"].values())
            levels = [0.0, bias]
            for g in payload["groups"]:
                levels.append(levels[-1] + r["contributions"][g])
            stacks.append(levels)
        flat = [v for s in stacks if s for v in s]
        y_lo, y_hi = min(flat + [0.0]), max(flat + [0.0])
        sy = _linear(y_lo, y_hi, HEIGHT - MARGIN, MARGIN)
        parts += _axes(MARGIN, MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, y_lo, y_hi)
        for gi, g in enumerate(groups):
            top, bottom = [], []
            for j, s in enumerate(stacks):
                if s is None:
                    continue
                top.append((sx(j), sy(s[gi + 1])))
                bottom.append((sx(j), sy(s[gi])))
            if not top:
                continue
            ring = top + bottom[::-1]
            path = " ".join(f"{x:.1f},{y:.1f}" for x, y in ring)
            color = PALETTE[gi % len(PALETTE)]
            parts.append(f'<polygon points="{path}" fill="{color}" fill-opacity="0.55" '
                         f'stroke="none"/>')
            parts.append(_text(WIDTH - MARGIN + 4, MARGIN + 14 * (gi + 1), g,
                               fill=color, anchor="start"))
        parts.append(_text(WIDTH / 2, 24, f"risk contributions: {entities[0]}",
                           anchor="middle", size=14))
    else:
        sy = _linear(0.0, 1.0, HEIGHT - MARGIN, MARGIN)
        parts += _axes(MARGIN, MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, 0.0, 1.0)
        for i, entity in enumerate(entities):
            pts = [(sx(times.index(r["time"])), sy(r["probability"]))
                   for r in rows if r["entity"] == entity]
            if not pts:
                continue
            path = " ".join(f"{x:.1f},{y:.1f}" for x, y in sorted(pts))
            color = PALETTE[i % len(PALETTE)]
            parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                         f'stroke-width="1.3"/>')
            parts.append(_text(pts[-1][0] + 4, pts[-1][1], entity, fill=color))
        parts.append(_text(WIDTH / 2, 24, "systemic risk probability",
                           anchor="middle", size=14))
    parts.append(_text(MARGIN, HEIGHT - 20, times[0]))
    parts.append(_text(WIDTH - MARGIN, HEIGHT - 20, times[-1], anchor="end"))
    return _svg(parts)


def _fsm_cell_colors(ws: Workspace, doc: dict, layer: Optional[str]) -> tuple[list[str], str]:
    m = doc["x"] * doc["y"]
    state_doc = doc.get("state_layer")
    if layer is None:
        layer = "state" if state_doc else ws.cube.indicators[0]
    if layer == "state":
        if not state_doc:
            raise NotFound("no state layer published")
        return ([STATE_COLORS[p % len(STATE_COLORS)] for p in state_doc["partition"]],
                "stability states")
    if layer.startswith("state:"):
        cls = layer.split(":", 1)[1]
        if not state_doc or cls not in state_doc["classes"]:
            raise NotFound(f"unknown state class {cls!r}")
        ci = state_doc["classes"].index(cls)
        probs = [row[ci] for row in state_doc["probabilities"]]
        return [_ramp(p) for p in probs], f"P({cls})"
    plane = som_plane_payload(ws, layer)["values"]
    lo, hi = min(plane), max(plane)
    span = (hi - lo) or 1.0
    return [_ramp((v - lo) / span) for v in plane], layer


def render_fsm(ws: Workspace, state: ViewState) -> str:
    doc = som_payload(ws)
    colors, title = _fsm_cell_colors(ws, doc, state.layer)
    x_units, y_units = doc["x"], doc["y"]
    cell = min((WIDTH - 2 * MARGIN) / x_units, (HEIGHT - 2 * MARGIN) / y_units)
    ox = (WIDTH - cell * x_units) / 2
    oy = (HEIGHT - cell * y_units) / 2
    parts = [_text(WIDTH / 2, 24, f"financial stability map: {title}",
                   anchor="middle", size=14)]
    for i, color in enumerate(colors):
        col, row = i % x_units, i // x_units
        parts.append(
            f'<rect x="{ox + col * cell:.1f}" y="{oy + row * cell:.1f}" '
            f'width="{cell:.1f}" height="{cell:.1f}" fill="{color}" '
            f'stroke="white" stroke-width="1"/>'
        )
    def center(c, r):
        return ox + (c + 0.5) * cell, oy + (r + 0.5) * cell
    for i, entity in enumerate(state.entities):
        traj = som_trajectory_payload(ws, entity)
        keep = _span_filter(traj["times"], state.span)
        pts = [center(*traj["coords"][j]) for j in keep]
        if not pts:
            continue
        color = PALETTE[i % len(PALETTE)]
        path = " ".join(f"{x:.1f},{y:.1f}" for x, y in pts)
        parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                     f'stroke-width="2" marker-end="none"/>')
        parts.append(f'<circle cx="{pts[-1][0]:.1f}" cy="{pts[-1][1]:.1f}" r="4" '
                     f'fill="{color}"/>')
        parts.append(_text(pts[-1][0] + 6, pts[-1][1] - 6, entity, fill=color))
    return _svg(parts)


def render_fsmt(ws: Workspace, state: ViewState) -> str:
    doc = sotm_payload(ws)
    times = doc["times"]
    keep = _span_filter(times, state.span)
    if not keep:
        return _empty("no time slices in the selected range")
    m = doc["m"]
    sizes = doc["flows"]["node_sizes"]
    coloring = doc["coloring"]
    structural = doc["structural_positions"]
    sx = _linear(0, max(len(keep) - 1, 1), MARGIN, WIDTH - MARGIN - 40)
    max_size = max((max(row) for row in sizes), default=1) or 1
    parts = [_text(WIDTH / 2, 24,
                   "stability map over time" + (" (distorted)" if state.transform else ""),
                   anchor="middle", size=14)]
    node_xy = {}
    for j, t in enumerate(keep):
        x = sx(j)
        for unit in range(m):
            if state.transform:
                y = MARGIN + structural[t][unit] * (HEIGHT - 2 * MARGIN)
            else:
                y = MARGIN + (unit + 0.5) / m * (HEIGHT - 2 * MARGIN)
            h = 6 + 24 * sizes[t][unit] / max_size
            node_xy[(t, unit)] = (x, y)
            parts.append(
                f'<rect x="{x - 5:.1f}" y="{y - h / 2:.1f}" width="10" height="{h:.1f}" '
                f'fill="{_ramp(coloring[t][unit])}" stroke="#666" stroke-width="0.5"/>'
            )
        parts.append(_text(x, HEIGHT - MARGIN + 24, times[t], anchor="middle", size=9))
    for step in doc["flows"]["transitions"]:
        t = times.index(step["from_time"])
        if t not in keep or t + 1 not in keep:
            continue
        for flow in step["flows"]:
            x0, y0 = node_xy[(t, flow["source"])]
            x1, y1 = node_xy[(t + 1, flow["target"])]
            width = 0.5 + 3.0 * flow["count"] / max_size
            title = escape(", ".join(flow["entities"]))
            parts.append(
                f'<path d="M {x0 + 5:.1f} {y0:.1f} C {(x0 + x1) / 2:.1f} {y0:.1f} '
                f'{(x0 + x1) / 2:.1f} {y1:.1f} {x1 - 5:.1f} {y1:.1f}" fill="none" '
                f'stroke="#7899bb" stroke-opacity="0.45" stroke-width="{width:.1f}">'
                f'<title>{title}</title></path>'
            )
    if state.entities and doc.get("assignments"):
        for i, entity in enumerate(state.entities):
            pts = []
            for t in keep:
                unit = doc["assignments"].get(times[t], {}).get(entity)
                if unit is not None:
                    pts.append(node_xy[(t, unit)])
            if pts:
                path = " ".join(f"{x:.1f},{y:.1f}" for x, y in pts)
                color = PALETTE[i % len(PALETTE)]
                parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                             f'stroke-width="2"/>')
                parts.append(_text(pts[-1][0] + 8, pts[-1][1], entity, fill=color))
    return _svg(parts)


def render_bim(ws: Workspace, state: ViewState) -> str:
    start, end = (state.span or (None, None))
    doc = network_payload(ws, start, end)
    if not doc["nodes"]:
        return _empty("no discussion in the selected window")
    sx = _linear(0, ws.config.network.width, MARGIN, WIDTH - MARGIN)
    sy = _linear(0, ws.config.network.height, MARGIN, HEIGHT - MARGIN)
    pos = {}
    for node in doc["nodes"]:
        x, y = node["x"], node["y"]
        if node["id"] in state.pinned:
            x, y = state.pinned[node["id"]]
        pos[node["id"]] = (sx(x), sy(y))
    parts = [_text(WIDTH / 2, 24, "bank interrelation map", anchor="middle", size=14)]
    for edge in doc["edges"]:
        (x0, y0), (x1, y1) = pos[edge["a"]], pos[edge["b"]]
        shade = int(220 - 190 * edge["darkness"])
        parts.append(f'<line x1="{x0:.1f}" y1="{y0:.1f}" x2="{x1:.1f}" y2="{y1:.1f}" '
                     f'stroke="rgb({shade},{shade},{shade})" stroke-width="1.2"/>')
    max_count = max(n["count"] for n in doc["nodes"])
    for node in doc["nodes"]:
        x, y = pos[node["id"]]
        r = 4 + 16 * node["count"] / max_count
        share = node.get("distress_share", 0.0)
        ring = ('stroke="#c22" stroke-width="2.5"' if share >= 0.5
                else 'stroke="#456" stroke-width="0.8"')
        parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{r:.1f}" '
                     f'fill="{_ramp(0.25 + share / 2)}" {ring}>'
                     f'<title>{escape(node["id"])}: share {share:.2f}</title></circle>')
        parts.append(_text(x + r + 2, y + 3, node["id"], size=9))
    return _svg(parts)


RENDERERS = {
    "dashboard": render_dashboard,
    "ewm": render_ewm,
    "fsm": render_fsm,
    "fsmt": render_fsmt,
    "bim": render_bim,
}


def render_view(ws: Workspace, view: str, state: ViewState) -> str:
    try:
        renderer = RENDERERS[view]
    except KeyError:
        raise NotFound(f"unknown view {view!r}") from None
    return renderer(ws, state)
