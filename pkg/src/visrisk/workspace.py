"""Published artifact sets and the JSON payloads served from them.

A workspace is an immutable snapshot of everything a frontend needs: the
cube, events, trained map models, the occurrence corpus and the scoring
model.  Rebuilds construct a fresh snapshot and swap it in atomically;
request handlers only ever read one snapshot.  The payload builders here
are the single source for both the HTTP endpoints and the static SVG
exporter, which keeps the two visually in sync.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from visrisk import som as som_ops
from visrisk import sotm as sotm_ops
from visrisk.datacube import (
    CubeError,
    DataCube,
    EventRecord,
    percentile_transform,
    slice_entity_series,
    slice_indicator_panel,
    time_key,
)
from visrisk.ewm import EwmModel
from visrisk.network import (
    LayoutState,
    NetworkError,
    OccurrenceRecord,
    build_cooccurrence,
    distress_share,
    fr_layout,
    layout_to_dict,
    pin_and_relax,
    read_occurrences_csv,
)
from visrisk.som import SomModel, StateLayer
from visrisk.sotm import SotmModel


class NotFound(Exception):
    """Unknown entity, indicator, artifact or token."""


class BadRequest(Exception):
    """Malformed query parameters or request body."""


@dataclass(frozen=True)
class SomSettings:
    x: int = 13
    y: int = 10
    iterations: int = 40
    sigma_final: float = 1.0
    transform: str = "raw"


@dataclass(frozen=True)
class SotmSettings:
    units: int = 8
    sigma: float = 1.2
    epochs_per_slice: int = 10
    transform: str = "raw"


@dataclass(frozen=True)
class NetworkSettings:
    width: float = 1000.0
    height: float = 700.0
    iterations: int = 200
    seed: int = 7


@dataclass(frozen=True)
class PipelineConfig:
    observations: Optional[str] = None
    links: Optional[str] = None
    events: Optional[str] = None
    states: Optional[str] = None
    labels: Optional[str] = None
    occurrences: Optional[str] = None
    som: SomSettings = SomSettings()
    sotm: SotmSettings = SotmSettings()
    network: NetworkSettings = NetworkSettings()
    ewm_groups: dict = field(default_factory=dict)
    ewm_weights: Optional[dict] = None
    ewm_bias: float = 0.0
    ewm_fit: dict = field(default_factory=dict)
    distress_terms: tuple[str, ...] = ()
    frontend_dir: Optional[str] = None


def load_config(path) -> PipelineConfig:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    ewm = doc.get("ewm", {})
    return PipelineConfig(
        observations=doc.get("observations"),
        links=doc.get("links"),
        events=doc.get("events"),
        states=doc.get("states"),
        labels=doc.get("labels"),
        occurrences=doc.get("occurrences"),
        som=SomSettings(**doc.get("som", {})),
        sotm=SotmSettings(**doc.get("sotm", {})),
        network=NetworkSettings(**doc.get("network", {})),
        ewm_groups=ewm.get("groups", {}),
        ewm_weights=ewm.get("weights"),
        ewm_bias=float(ewm.get("bias", 0.0)),
        ewm_fit=ewm.get("fit", {}),
        distress_terms=tuple(doc.get("distress_terms", ())),
        frontend_dir=doc.get("frontend_dir"),
    )


def read_label_csv(path, expected=("entity", "time", "label")) -> list[tuple[str, str, str]]:
    """Shared reader for per-(entity, time) label files."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [c.strip().lower() for c in next(reader)]
        if header[:3] != list(expected):
            raise CubeError(f"{path}: expected header {','.join(expected)}")
        return [(r[0].strip(), r[1].strip(), r[2].strip()) for r in reader if r]


ARTIFACTS = ("cube.json", "events.json", "som.json", "sotm.json",
             "network.json", "ewm.json", "risk.json")


@dataclass
class Workspace:
    version: str
    config: PipelineConfig
    cube: DataCube
    pct_cube: DataCube
    events: list[EventRecord]
    som_model: Optional[SomModel] = None
    som_state: Optional[StateLayer] = None
    som_transform: str = "raw"
    sotm_model: Optional[SotmModel] = None
    sotm_doc: Optional[dict] = None
    records: list[OccurrenceRecord] = field(default_factory=list)
    ewm_model: Optional[EwmModel] = None
    risk_doc: Optional[dict] = None
    network_doc: Optional[dict] = None

    def cube_for(self, transform: str) -> DataCube:
        if transform == "raw":
            return self.cube
        if transform == "percentile":
            return self.pct_cube
        raise BadRequest(f"unknown transform {transform!r}")


class WorkspaceHolder:
    """Single mutable cell; swapping is one attribute assignment, hence atomic."""

    def __init__(self, workspace: Workspace):
        self.current = workspace

    def swap(self, workspace: Workspace) -> None:
        self.current = workspace


def build_workspace(data_dir, config: PipelineConfig) -> Workspace:
    """Load published artifacts from data_dir into an immutable snapshot."""
    root = Path(data_dir)
    cube_path = root / "cube.json"
    if not cube_path.exists():
        raise NotFound(f"no cube artifact at {cube_path}")
    digest = hashlib.sha256()
    for name in ARTIFACTS:
        p = root / name
        if p.exists():
            digest.update(name.encode())
            digest.update(p.read_bytes())

    cube = DataCube.from_dict(json.loads(cube_path.read_text(encoding="utf-8")))
    ws = Workspace(
        version=digest.hexdigest()[:16],
        config=config,
        cube=cube,
        pct_cube=percentile_transform(cube),
        events=[],
    )
    events_path = root / "events.json"
    if events_path.exists():
        ws.events = [
            EventRecord(d["entity"], d["start"], d.get("end"), d["label"])
            for d in json.loads(events_path.read_text(encoding="utf-8"))
        ]
    som_path = root / "som.json"
    if som_path.exists():
        doc = json.loads(som_path.read_text(encoding="utf-8"))
        ws.som_model, ws.som_state = SomModel.from_dict(doc)
        ws.som_transform = doc.get("transform", "raw")
    sotm_path = root / "sotm.json"
    if sotm_path.exists():
        ws.sotm_doc = json.loads(sotm_path.read_text(encoding="utf-8"))
        ws.sotm_model = SotmModel.from_dict(ws.sotm_doc)
    ewm_path = root / "ewm.json"
    if ewm_path.exists():
        ws.ewm_model = EwmModel.from_dict(json.loads(ewm_path.read_text(encoding="utf-8")))
    risk_path = root / "risk.json"
    if risk_path.exists():
        ws.risk_doc = json.loads(risk_path.read_text(encoding="utf-8"))
    network_path = root / "network.json"
    if network_path.exists():
        ws.network_doc = json.loads(network_path.read_text(encoding="utf-8"))
    if config.occurrences and Path(config.occurrences).exists():
        ws.records = read_occurrences_csv(config.occurrences)
    return ws


# ---------------------------------------------------------------------------
# payload builders


def meta_payload(ws: Workspace) -> dict:
    return {
        "version": ws.version,
        "entities": list(ws.cube.entities),
        "times": list(ws.cube.times),
        "indicators": list(ws.cube.indicators),
        "n_events": len(ws.events),
        "has": {
            "som": ws.som_model is not None,
            "sotm": ws.sotm_model is not None,
            "network": bool(ws.records) or ws.network_doc is not None,
            "ewm": ws.risk_doc is not None,
        },
        "views": ["dashboard", "ewm", "fsm", "fsmt", "bim"],
    }


def _masked_rows(values: np.ndarray, observed: np.ndarray) -> list[list]:
    return [
        [float(values[i, j]) if observed[i, j] else None
         for j in range(values.shape[1])]
        for i in range(values.shape[0])
    ]


def panel_payload(ws: Workspace, indicator: str, transform: str = "raw") -> dict:
    cube = ws.cube_for(transform)
    try:
        panel = slice_indicator_panel(cube, indicator)
    except CubeError as err:
        raise NotFound(str(err)) from None
    return {
        "indicator": indicator,
        "transform": transform,
        "entities": list(panel.row_labels),
        "times": list(panel.col_labels),
        "values": _masked_rows(panel.values, panel.observed),
    }


def series_payload(ws: Workspace, entity: str, transform: str = "raw") -> dict:
    cube = ws.cube_for(transform)
    try:
        series = slice_entity_series(cube, entity)
    except CubeError as err:
        raise NotFound(str(err)) from None
    return {
        "entity": entity,
        "transform": transform,
        "times": list(series.row_labels),
        "indicators": list(series.col_labels),
        "values": _masked_rows(series.values, series.observed),
    }


def events_payload(ws: Workspace) -> list[dict]:
    return [
        {"entity": e.entity, "start": e.start, "end": e.end, "label": e.label}
        for e in ws.events
    ]


def _require_som(ws: Workspace) -> SomModel:
    if ws.som_model is None:
        raise NotFound("no trained map published")
    return ws.som_model


def som_payload(ws: Workspace) -> dict:
    model = _require_som(ws)
    doc = model.to_dict(ws.som_state)
    doc["transform"] = ws.som_transform
    return doc


def som_plane_payload(ws: Workspace, indicator: str) -> dict:
    model = _require_som(ws)
    try:
        plane = som_ops.component_plane(model, indicator)
    except som_ops.SomError as err:
        raise NotFound(str(err)) from None
    return {"indicator": indicator, "x": model.x, "y": model.y,
            "values": plane.tolist()}


def som_trajectory_payload(ws: Workspace, entity: str) -> dict:
    model = _require_som(ws)
    cube = ws.cube_for(ws.som_transform)
    try:
        series = slice_entity_series(cube, entity)
    except CubeError as err:
        raise NotFound(str(err)) from None
    times, coords = [], []
    for t, tlabel in enumerate(series.row_labels):
        mask = series.observed[t]
        if mask.any():
            b = som_ops.find_bmu(series.values[t], mask, model)
            times.append(tlabel)
            coords.append([float(model.coords[b, 0]), float(model.coords[b, 1])])
    return {"entity": entity, "times": times, "coords": coords}


def sotm_payload(ws: Workspace) -> dict:
    if ws.sotm_doc is None:
        raise NotFound("no trained time map published")
    return ws.sotm_doc


def sotm_plane_payload(ws: Workspace, indicator: str) -> dict:
    if ws.sotm_model is None:
        raise NotFound("no trained time map published")
    try:
        plane = sotm_ops.component_plane_t(ws.sotm_model, indicator)
    except sotm_ops.SotmError as err:
        raise NotFound(str(err)) from None
    return {"indicator": indicator, "times": list(ws.sotm_model.times),
            "values": plane.tolist()}


def _parse_window(ws: Workspace, start: Optional[str], end: Optional[str]):
    for label in (start, end):
        if label is not None:
            try:
                time_key(label)
            except CubeError as err:
                raise BadRequest(str(err)) from None
    if start is not None and end is not None and time_key(start) > time_key(end):
        raise BadRequest(f"window start {start!r} after end {end!r}")
    return (start, end)


def network_payload(ws: Workspace, start: Optional[str] = None,
                    end: Optional[str] = None, seed: Optional[int] = None) -> dict:
    if not ws.records:
        if ws.network_doc is not None and start is None and end is None and seed is None:
            return ws.network_doc
        raise NotFound("no occurrence corpus published")
    window = _parse_window(ws, start, end)
    windowed = [r for r in ws.records
                if (start is None or time_key(r.time) >= time_key(start))
                and (end is None or time_key(r.time) <= time_key(end))]
    net = build_cooccurrence(ws.records, window)
    if not net.nodes:
        return {"window": [start, end], "nodes": [], "edges": []}
    settings = ws.config.network
    layout = fr_layout(net, settings.width, settings.height, settings.iterations,
                       settings.seed if seed is None else seed)
    shares = {node: distress_share(windowed, node, ws.config.distress_terms)
              for node in net.nodes}
    return layout_to_dict(net, layout, shares)


def relax_payload(ws: Workspace, body: dict) -> dict:
    if not isinstance(body, dict):
        raise BadRequest("body must be an object")
    window = _parse_window(ws, body.get("from"), body.get("to"))
    if not ws.records:
        raise NotFound("no occurrence corpus published")
    net = build_cooccurrence(ws.records, window)
    if not net.nodes:
        raise BadRequest("window selects an empty network")
    node_ids = tuple(sorted(net.nodes))
    positions = body.get("positions") or {}
    pinned = body.get("pinned") or {}
    iterations = int(body.get("iterations", 50))
    if not 1 <= iterations <= 500:
        raise BadRequest("iterations must be in 1..500")
    settings = ws.config.network
    pos = np.zeros((len(node_ids), 2))
    for i, node in enumerate(node_ids):
        if node not in positions:
            raise BadRequest(f"missing position for node {node!r}")
        x, y = positions[node]
        pos[i] = (float(x), float(y))
    for node in pinned:
        if node not in net.nodes:
            raise BadRequest(f"pinned node {node!r} not in window")
    k = float(np.sqrt(settings.width * settings.height / len(node_ids)))
    layout = LayoutState(node_ids, pos, settings.width, settings.height, k,
                         settings.width / 20.0, settings.seed)
    try:
        relaxed = pin_and_relax(layout, net, {n: (float(p[0]), float(p[1]))
                                              for n, p in pinned.items()},
                                iterations=iterations)
    except NetworkError as err:
        raise BadRequest(str(err)) from None
    return {
        "window": [window[0], window[1]],
        "positions": {node: [float(relaxed.positions[i, 0]), float(relaxed.positions[i, 1])]
                      for i, node in enumerate(node_ids)},
    }


def ewm_payload(ws: Workspace, entity: Optional[str] = None) -> dict:
    if ws.risk_doc is None:
        raise NotFound("no scored model published")
    if entity is None:
        return ws.risk_doc
    if entity not in ws.cube.entities:
        raise NotFound(f"unknown entity {entity!r}")
    rows = [r for r in ws.risk_doc["rows"] if r["entity"] == entity]
    return {"groups": ws.risk_doc["groups"], "rows": rows,
            "skipped": [s for s in ws.risk_doc.get("skipped", [])
                        if s["entity"] == entity]}
