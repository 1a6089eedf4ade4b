"""Entity co-occurrence networks and force-directed layouts.

Occurrence records are pre-extracted mentions (one document, one time
point, a set of entities).  Counting is per document: a record mentioning
an entity twice counts once, and every unordered pair mentioned together
increments one edge.  Layouts follow the classic spring model: repulsion
k^2/d between all pairs, attraction d^2/k along edges, displacement capped
by a linearly cooling temperature, positions clamped to the frame.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from visrisk.datacube import time_key


class NetworkError(ValueError):
    """Raised on malformed occurrence data or empty layout input."""


@dataclass(frozen=True)
class OccurrenceRecord:
    """One document's entity mentions, deduplicated, with optional raw text."""

    doc_id: str
    time: str
    mentions: frozenset[str]
    text: Optional[str] = None

    def __post_init__(self):
        if not self.mentions:
            raise NetworkError(f"record {self.doc_id!r} has no mentions")


@dataclass(frozen=True)
class CooccurrenceNetwork:
    """Occurrence counts per entity and co-mention counts per entity pair."""

    nodes: dict[str, int]
    edges: dict[tuple[str, str], int]
    window: tuple[Optional[str], Optional[str]]


@dataclass
class LayoutState:
    """2-D node positions inside a W x H frame plus the cooling state."""

    node_ids: tuple[str, ...]
    positions: np.ndarray       # (n, 2)
    width: float
    height: float
    k: float
    temperature: float
    seed: int

    def position_of(self, node: str) -> tuple[float, float]:
        i = self.node_ids.index(node)
        return float(self.positions[i, 0]), float(self.positions[i, 1])


def build_cooccurrence(records: Iterable[OccurrenceRecord],
                       window: tuple[Optional[str], Optional[str]] = (None, None),
                       ) -> CooccurrenceNetwork:
    """Count occurrences and co-occurrences over records inside the window.

    Window bounds are inclusive time labels; None leaves a side open.
    Entities and pairs that never appear are simply absent.
    """
    start, end = window
    start_k = time_key(start) if start is not None else None
    end_k = time_key(end) if end is not None else None
    nodes: dict[str, int] = {}
    edges: dict[tuple[str, str], int] = {}
    for rec in records:
        t = time_key(rec.time)
        if start_k is not None and t < start_k:
            continue
        if end_k is not None and t > end_k:
            continue
        mentions = sorted(rec.mentions)
        for m in mentions:
            nodes[m] = nodes.get(m, 0) + 1
        for i in range(len(mentions)):
            for j in range(i + 1, len(mentions)):
                pair = (mentions[i], mentions[j])
                edges[pair] = edges.get(pair, 0) + 1
    return CooccurrenceNetwork(nodes, edges, window)


def edge_styling(network: CooccurrenceNetwork) -> dict[tuple[str, str], float]:
    """Edge darkness in [0, 1], log-scaled so the heaviest edge is fully dark."""
    if not network.edges:
        return {}
    w_max = max(network.edges.values())
    denom = np.log1p(w_max)
    return {pair: float(np.log1p(w) / denom) for pair, w in network.edges.items()}


def _separate_coincident(pos: np.ndarray, rng: np.random.Generator, scale: float) -> None:
    """Nudge exactly coincident nodes apart so force directions are defined."""
    for _ in range(16):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((delta ** 2).sum(axis=2))
        np.fill_diagonal(dist, np.inf)
        clashes = np.argwhere(dist < 1e-9)
        clashes = clashes[clashes[:, 0] < clashes[:, 1]]
        if clashes.size == 0:
            return
        for _, j in clashes:
            pos[j] += rng.uniform(-scale, scale, size=2)
    raise NetworkError("could not separate coincident nodes")


def _force_pass(pos: np.ndarray, edge_idx: np.ndarray, k: float) -> np.ndarray:
    delta = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt((delta ** 2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    # repulsion k^2/d between every pair, applied along the unit vector:
    # (delta/d) * k^2/d = delta * k^2/d^2
    disp = (delta * (k ** 2 / dist ** 2)[:, :, None]).sum(axis=1)
    if edge_idx.size:
        u, v = edge_idx[:, 0], edge_idx[:, 1]
        dvec = pos[u] - pos[v]
        d = np.sqrt((dvec ** 2).sum(axis=1))
        d = np.where(d < 1e-12, 1e-12, d)
        pull = dvec / d[:, None] * (d ** 2 / k)[:, None]
        np.add.at(disp, u, -pull)
        np.add.at(disp, v, pull)
    return disp


def _cap_and_move(pos, disp, temp, width, height, frozen=None):
    lengths = np.sqrt((disp ** 2).sum(axis=1))
    factor = np.where(lengths > temp, np.divide(temp, lengths, out=np.ones_like(lengths),
                                                where=lengths > 0), 1.0)
    step = disp * factor[:, None]
    if frozen is not None:
        step[frozen] = 0.0
    pos += step
    np.clip(pos[:, 0], 0.0, width, out=pos[:, 0])
    np.clip(pos[:, 1], 0.0, height, out=pos[:, 1])


def fr_layout(network: CooccurrenceNetwork, width: float, height: float,
              iterations: int = 200, seed: int = 0) -> LayoutState:
    """Force-directed layout with seeded uniform initialization.

    Ideal edge length k = sqrt(W*H / n); temperature cools linearly from
    W/10 to W/(10*iterations).  Deterministic for a fixed seed.
    """
    node_ids = tuple(sorted(network.nodes))
    if not node_ids:
        raise NetworkError("layout needs at least one node")
    n = len(node_ids)
    idx = {node: i for i, node in enumerate(node_ids)}
    edge_idx = np.array([[idx[a], idx[b]] for (a, b) in sorted(network.edges)], dtype=int)
    rng = np.random.default_rng(seed)
    pos = rng.uniform((0.0, 0.0), (width, height), size=(n, 2))
    k = float(np.sqrt(width * height / n))
    temps = np.linspace(width / 10.0, width / (10.0 * iterations), iterations)
    temp = width / 10.0
    for temp in temps:
        if n > 1:
            _separate_coincident(pos, rng, k * 1e-6)
            disp = _force_pass(pos, edge_idx, k)
        else:
            disp = np.zeros_like(pos)
        _cap_and_move(pos, disp, temp, width, height)
    return LayoutState(node_ids, pos, float(width), float(height), k, float(temp), seed)


def pin_and_relax(layout: LayoutState, network: CooccurrenceNetwork,
                  pinned: dict[str, tuple[float, float]],
                  iterations: int = 50) -> LayoutState:
    """Hold the pinned nodes fixed and let the rest settle under a short reheat."""
    node_ids = layout.node_ids
    idx = {node: i for i, node in enumerate(node_ids)}
    pos = layout.positions.copy()
    frozen = np.zeros(len(node_ids), dtype=bool)
    for node, (px, py) in pinned.items():
        if node not in idx:
            raise NetworkError(f"unknown pinned node {node!r}")
        pos[idx[node]] = (px, py)
        frozen[idx[node]] = True
    edge_idx = np.array([[idx[a], idx[b]] for (a, b) in sorted(network.edges)
                         if a in idx and b in idx], dtype=int).reshape(-1, 2)
    rng = np.random.default_rng(layout.seed)
    temps = np.linspace(layout.width / 20.0, layout.width / (20.0 * iterations), iterations)
    temp = layout.temperature
    for temp in temps:
        if len(node_ids) > 1:
            if not frozen.all():
                _separate_coincident(pos, rng, layout.k * 1e-6)
            disp = _force_pass(pos, edge_idx, layout.k)
        else:
            disp = np.zeros_like(pos)
        _cap_and_move(pos, disp, temp, layout.width, layout.height, frozen=frozen)
    return LayoutState(node_ids, pos, layout.width, layout.height, layout.k,
                       float(temp), layout.seed)


def distress_share(records: Sequence[OccurrenceRecord], entity: str,
                   terms: Sequence[str]) -> float:
    """Fraction of the entity's mentioning records whose text hits a distress term.

    Whole-word, case-insensitive matching; an entity that never occurs
    scores 0.
    """
    if not terms:
        return 0.0
    pattern = re.compile(
        r"\b(?:" + "|".join(re.escape(t) for t in terms) + r")\b", re.IGNORECASE
    )
    mentioning = [r for r in records if entity in r.mentions]
    if not mentioning:
        return 0.0
    hits = sum(1 for r in mentioning if r.text and pattern.search(r.text))
    return hits / len(mentioning)


def layout_to_dict(network: CooccurrenceNetwork, layout: LayoutState,
                   shares: Optional[dict[str, float]] = None) -> dict:
    """Wire format for the interrelation map: nodes with positions, styled edges."""
    darkness = edge_styling(network)
    shares = shares or {}
    return {
        "window": [network.window[0], network.window[1]],
        "nodes": [
            {
                "id": node,
                "count": network.nodes[node],
                "x": float(layout.positions[i, 0]),
                "y": float(layout.positions[i, 1]),
                "distress_share": shares.get(node, 0.0),
            }
            for i, node in enumerate(layout.node_ids)
        ],
        "edges": [
            {"a": a, "b": b, "count": count, "darkness": darkness[(a, b)]}
            for (a, b), count in sorted(network.edges.items())
        ],
    }


def read_occurrences_csv(path) -> list[OccurrenceRecord]:
    """Load a `doc_id,time,entity[,text]` CSV into deduplicated records.

    Rows sharing a doc_id merge into one record; text may be supplied on
    any of the document's rows (the first non-empty one wins).
    """
    import csv

    docs: dict[str, dict] = {}
    order: list[str] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [c.strip().lower() for c in next(reader)]
        except StopIteration:
            raise NetworkError(f"{path}: empty file, header row required") from None
        if header[:3] != ["doc_id", "time", "entity"]:
            raise NetworkError(f"{path}: expected header doc_id,time,entity[,text]")
        has_text = len(header) > 3 and header[3] == "text"
        for row_no, row in enumerate(reader, start=1):
            if len(row) < 3:
                raise NetworkError(f"{path} row {row_no}: expected doc_id,time,entity")
            doc_id, t, entity = row[0].strip(), row[1].strip(), row[2].strip()
            time_key(t)
            doc = docs.get(doc_id)
            if doc is None:
                doc = {"time": t, "mentions": set(), "text": None}
                docs[doc_id] = doc
                order.append(doc_id)
            doc["mentions"].add(entity)
            if has_text and len(row) > 3 and row[3].strip() and doc["text"] is None:
                doc["text"] = row[3]
    return [
        OccurrenceRecord(doc_id, docs[doc_id]["time"],
                         frozenset(docs[doc_id]["mentions"]), docs[doc_id]["text"])
        for doc_id in order
    ]
