"""The macroprudential data cube and its slice/transform operations.

The cube is a dense panel tensor over three ordered axes (entities, times,
indicators) with an explicit observation mask, plus an optional per-time
link matrix over entities.  Everything here is immutable after ingestion;
transforms return new cubes.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.stats import rankdata


class CubeError(ValueError):
    """Raised on malformed input rows or unknown axis labels."""


_QUARTER_RE = re.compile(r"^(\d{4})[Qq]([1-4])$")
_YEAR_RE = re.compile(r"^(\d{4})$")
_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")
_DATE_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")


def time_key(label: str) -> tuple[int, int, int]:
    """Chronological sort key for a time label.

    Accepts ``YYYY``, ``YYYYQn``, ``YYYY-MM`` and ``YYYY-MM-DD``.  Quarters
    map to the first month of the quarter so mixed granularities still order
    sensibly.  Raises :class:`CubeError` for anything else.
    """
    m = _QUARTER_RE.match(label)
    if m:
        year, q = int(m.group(1)), int(m.group(2))
        return (year, 3 * (q - 1) + 1, 0)
    m = _YEAR_RE.match(label)
    if m:
        return (int(m.group(1)), 0, 0)
    m = _MONTH_RE.match(label)
    if m:
        return (int(m.group(1)), int(m.group(2)), 0)
    m = _DATE_RE.match(label)
    if m:
        return (int(m.group(1)), int(m.group(2)), int(m.group(3)))
    raise CubeError(f"unparseable time label {label!r}")


@dataclass(frozen=True)
class DataCube:
    """Dense (entity, time, indicator) tensor with mask and optional links.

    ``links`` maps a time index to a square non-negative matrix over
    entities, stored exactly as ingested (directed); symmetrize on the
    consumer side when needed.
    """

    entities: tuple[str, ...]
    times: tuple[str, ...]
    indicators: tuple[str, ...]
    values: np.ndarray          # float64, shape (E, T, K)
    observed: np.ndarray        # bool, same shape
    links: dict[int, np.ndarray] = field(default_factory=dict)

    def entity_index(self, entity: str) -> int:
        try:
            return self.entities.index(entity)
        except ValueError:
            raise CubeError(f"unknown entity {entity!r}") from None

    def time_index(self, t: str) -> int:
        try:
            return self.times.index(t)
        except ValueError:
            raise CubeError(f"unknown time {t!r}") from None

    def indicator_index(self, indicator: str) -> int:
        try:
            return self.indicators.index(indicator)
        except ValueError:
            raise CubeError(f"unknown indicator {indicator!r}") from None

    def to_dict(self) -> dict:
        """JSON-ready representation; unobserved cells become null."""
        vals = np.where(self.observed, self.values, np.nan)
        nested = [
            [[None if not self.observed[e, t, k] else float(vals[e, t, k])
              for k in range(len(self.indicators))]
             for t in range(len(self.times))]
            for e in range(len(self.entities))
        ]
        return {
            "entities": list(self.entities),
            "times": list(self.times),
            "indicators": list(self.indicators),
            "values": nested,
            "links": {self.times[ti]: m.tolist() for ti, m in sorted(self.links.items())},
        }

    @staticmethod
    def from_dict(doc: dict) -> "DataCube":
        entities = tuple(doc["entities"])
        times = tuple(doc["times"])
        indicators = tuple(doc["indicators"])
        raw = doc["values"]
        values = np.zeros((len(entities), len(times), len(indicators)))
        observed = np.zeros(values.shape, dtype=bool)
        for e in range(len(entities)):
            for t in range(len(times)):
                for k in range(len(indicators)):
                    v = raw[e][t][k]
                    if v is not None:
                        values[e, t, k] = float(v)
                        observed[e, t, k] = True
        links = {}
        for label, matrix in doc.get("links", {}).items():
            ti = times.index(label)
            links[ti] = np.asarray(matrix, dtype=float)
        return DataCube(entities, times, indicators, values, observed, links)


@dataclass(frozen=True)
class EventRecord:
    """A labeled episode for one entity, e.g. a crisis with start/end."""

    entity: str
    start: str
    end: Optional[str]
    label: str


@dataclass(frozen=True)
class CubeSlice:
    """Two-dimensional view of the cube with its mask carried over."""

    axes: tuple[str, str]
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    values: np.ndarray
    observed: np.ndarray


class PooledRow(NamedTuple):
    entity: str
    time: str
    values: np.ndarray    # (K,)
    observed: np.ndarray  # (K,) bool


def _parse_value(raw, row_no: int) -> tuple[float, bool]:
    if raw is None:
        return 0.0, False
    text = str(raw).strip()
    if text == "":
        return 0.0, False
    try:
        v = float(text)
    except ValueError:
        raise CubeError(f"row {row_no}: non-numeric value {text!r}") from None
    if not np.isfinite(v):
        raise CubeError(f"row {row_no}: non-finite value {text!r}")
    return v, True


def ingest_observations(rows: Iterable[Sequence]) -> DataCube:
    """Build a cube from (entity, time, indicator, value) records.

    Axes are the union of what appears in the input: entities and
    indicators sorted lexicographically, times chronologically.  Cells
    absent from the input (or with an empty value) are unobserved.
    Duplicate (entity, time, indicator) keys and unparseable times are
    rejected.
    """
    cells: dict[tuple[str, str, str], tuple[float, bool]] = {}
    for row_no, row in enumerate(rows, start=1):
        if len(row) < 4:
            raise CubeError(f"row {row_no}: expected entity,time,indicator,value")
        entity, t, indicator = str(row[0]).strip(), str(row[1]).strip(), str(row[2]).strip()
        try:
            time_key(t)
        except CubeError:
            raise CubeError(f"row {row_no}: unparseable time {t!r}") from None
        key = (entity, t, indicator)
        if key in cells:
            raise CubeError(f"row {row_no}: duplicate observation for {key}")
        cells[key] = _parse_value(row[3], row_no)

    if not cells:
        raise CubeError("no observations")

    entities = tuple(sorted({k[0] for k in cells}))
    times = tuple(sorted({k[1] for k in cells}, key=time_key))
    indicators = tuple(sorted({k[2] for k in cells}))
    values = np.zeros((len(entities), len(times), len(indicators)))
    observed = np.zeros(values.shape, dtype=bool)
    e_idx = {e: i for i, e in enumerate(entities)}
    t_idx = {t: i for i, t in enumerate(times)}
    k_idx = {k: i for i, k in enumerate(indicators)}
    for (entity, t, indicator), (v, obs) in cells.items():
        if obs:
            values[e_idx[entity], t_idx[t], k_idx[indicator]] = v
            observed[e_idx[entity], t_idx[t], k_idx[indicator]] = True
    return DataCube(entities, times, indicators, values, observed)


def ingest_links(rows: Iterable[Sequence], cube: DataCube) -> DataCube:
    """Attach (source, target, time, weight) link records to a cube.

    Matrices are stored as given (directed); unspecified pairs are zero.
    Returns a new cube; the input cube is untouched.
    """
    links: dict[int, np.ndarray] = {ti: m.copy() for ti, m in cube.links.items()}
    n = len(cube.entities)
    e_idx = {e: i for i, e in enumerate(cube.entities)}
    for row_no, row in enumerate(rows, start=1):
        if len(row) < 4:
            raise CubeError(f"row {row_no}: expected source,target,time,weight")
        source, target, t = str(row[0]).strip(), str(row[1]).strip(), str(row[2]).strip()
        if source not in e_idx:
            raise CubeError(f"row {row_no}: unknown entity {source!r}")
        if target not in e_idx:
            raise CubeError(f"row {row_no}: unknown entity {target!r}")
        ti = cube.time_index(t)
        try:
            w = float(row[3])
        except (TypeError, ValueError):
            raise CubeError(f"row {row_no}: non-numeric weight {row[3]!r}") from None
        if not np.isfinite(w) or w < 0:
            raise CubeError(f"row {row_no}: negative or non-finite weight {w}")
        if ti not in links:
            links[ti] = np.zeros((n, n))
        links[ti][e_idx[source], e_idx[target]] = w
    return replace(cube, links=links)


def ingest_events(rows: Iterable[Sequence]) -> list[EventRecord]:
    """Parse (entity, start, end, label) episode records, sorted by (entity, start)."""
    records = []
    for row_no, row in enumerate(rows, start=1):
        if len(row) < 4:
            raise CubeError(f"row {row_no}: expected entity,start,end,label")
        entity, start, end, label = (str(c).strip() for c in row[:4])
        start_k = time_key(start)
        if end == "":
            end_val = None
        else:
            if time_key(end) < start_k:
                raise CubeError(f"row {row_no}: end {end!r} before start {start!r}")
            end_val = end
        records.append(EventRecord(entity, start, end_val, label))
    records.sort(key=lambda r: (r.entity, time_key(r.start)))
    return records


def slice_cross_section(cube: DataCube, t: str) -> CubeSlice:
    """Entities x indicators at one time point (the cube's red side)."""
    ti = cube.time_index(t)
    return CubeSlice(
        ("entity", "indicator"), cube.entities, cube.indicators,
        cube.values[:, ti, :].copy(), cube.observed[:, ti, :].copy(),
    )


def slice_indicator_panel(cube: DataCube, indicator: str) -> CubeSlice:
    """Entities x time for one indicator (the blue side)."""
    ki = cube.indicator_index(indicator)
    return CubeSlice(
        ("entity", "time"), cube.entities, cube.times,
        cube.values[:, :, ki].copy(), cube.observed[:, :, ki].copy(),
    )


def slice_entity_series(cube: DataCube, entity: str) -> CubeSlice:
    """Time x indicators for one entity (the green side)."""
    ei = cube.entity_index(entity)
    return CubeSlice(
        ("time", "indicator"), cube.times, cube.indicators,
        cube.values[ei, :, :].copy(), cube.observed[ei, :, :].copy(),
    )


def slice_links(cube: DataCube, t: str) -> np.ndarray:
    """Square link matrix at one time point; zeros when no link data exists."""
    ti = cube.time_index(t)
    n = len(cube.entities)
    if ti in cube.links:
        return cube.links[ti].copy()
    return np.zeros((n, n))


def percentile_transform(cube: DataCube) -> DataCube:
    """Rescale each (entity, indicator) series to percentiles of its own history.

    Observed values map to 100*(rank-1)/(n-1) with ascending mean ranks for
    ties; a single observation maps to 50.  Unobserved cells stay unobserved.
    """
    out = cube.values.copy()
    for e in range(len(cube.entities)):
        for k in range(len(cube.indicators)):
            mask = cube.observed[e, :, k]
            n = int(mask.sum())
            if n == 0:
                continue
            if n == 1:
                out[e, mask, k] = 50.0
                continue
            ranks = rankdata(cube.values[e, mask, k], method="average")
            out[e, mask, k] = 100.0 * (ranks - 1.0) / (n - 1.0)
    return replace(cube, values=out)


def pool_panel(cube: DataCube) -> list[PooledRow]:
    """Flatten the cube to one row per (entity, time), dropping empty rows.

    Rows keep axis order: entities in entity order, times chronological
    within each entity.  A row with zero observed indicators is omitted.
    """
    rows = []
    for e, entity in enumerate(cube.entities):
        for t, time in enumerate(cube.times):
            mask = cube.observed[e, t, :]
            if mask.any():
                rows.append(PooledRow(entity, time, cube.values[e, t, :].copy(), mask.copy()))
    return rows


def pooled_arrays(rows: Sequence[PooledRow]) -> tuple[np.ndarray, np.ndarray]:
    """Stack pooled rows into (values, observed) matrices for training."""
    if not rows:
        k = 0
        return np.zeros((0, k)), np.zeros((0, k), dtype=bool)
    values = np.stack([r.values for r in rows])
    observed = np.stack([r.observed for r in rows])
    return values, observed


def _read_csv(path, expected_header: Sequence[str]):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CubeError(f"{path}: empty file, header row required") from None
        got = [c.strip().lower() for c in header]
        if got[: len(expected_header)] != list(expected_header):
            raise CubeError(
                f"{path}: expected header {','.join(expected_header)}, got {','.join(header)}"
            )
        return list(reader)


def read_observations_csv(path) -> DataCube:
    """Load an `entity,time,indicator,value` CSV (header required, empty value = missing)."""
    return ingest_observations(_read_csv(path, ("entity", "time", "indicator", "value")))


def read_links_csv(path, cube: DataCube) -> DataCube:
    """Load a `source,target,time,weight` CSV onto an existing cube."""
    return ingest_links(_read_csv(path, ("source", "target", "time", "weight")), cube)


def read_events_csv(path) -> list[EventRecord]:
    """Load an `entity,start,end,label` CSV; empty end = open-ended episode."""
    return ingest_events(_read_csv(path, ("entity", "start", "end", "label")))
