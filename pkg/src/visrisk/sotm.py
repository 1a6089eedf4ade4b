"""Self-organizing time map: one orientation-chained 1-D SOM per time slice.

The first slice initializes along the first principal component of its own
cross section; every later slice starts from the previous slice's trained
reference vectors, so unit orientation carries across time.  The
neighborhood radius stays constant over slices, which is what keeps the
timeline comparable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from visrisk.datacube import DataCube
from visrisk.som import (
    SomModel,
    TrainConfig,
    _axis_span,
    _pca_basis,
    batch_epoch,
    find_bmu,
    grid_coords,
)


class SotmError(ValueError):
    """Raised on empty time slices or degenerate first-slice data."""


@dataclass(frozen=True)
class SotmModel:
    """Ordered sequence of 1-D unit arrays, one per time point."""

    times: tuple[str, ...]
    m_units: int
    slices: np.ndarray          # (T, M, n) float64
    sigma: float
    epochs_per_slice: int
    dim_names: tuple[str, ...]

    def slice_model(self, t: int) -> SomModel:
        """The time-t unit array wrapped as a 1-D SOM (units on 0..M-1)."""
        return SomModel(
            self.m_units, 1, self.slices[t], grid_coords(self.m_units, 1),
            self.dim_names, TrainConfig(iterations=max(self.epochs_per_slice, 1),
                                        sigma_final=self.sigma),
        )

    def to_dict(self) -> dict:
        return {
            "times": list(self.times),
            "m": self.m_units,
            "sigma": self.sigma,
            "epochs_per_slice": self.epochs_per_slice,
            "dim_names": list(self.dim_names),
            "slices": self.slices.tolist(),
        }

    @staticmethod
    def from_dict(doc: dict) -> "SotmModel":
        return SotmModel(
            tuple(doc["times"]), int(doc["m"]),
            np.asarray(doc["slices"], dtype=float),
            float(doc["sigma"]), int(doc["epochs_per_slice"]),
            tuple(doc["dim_names"]),
        )


@dataclass(frozen=True)
class AlluvialFlows:
    """Cluster sizes per time and entity transitions between consecutive times."""

    times: tuple[str, ...]
    node_sizes: np.ndarray                                # (T, M) int
    flows: tuple[dict[tuple[int, int], tuple[str, ...]], ...]  # len T-1

    def to_dict(self) -> dict:
        return {
            "times": list(self.times),
            "node_sizes": self.node_sizes.tolist(),
            "transitions": [
                {
                    "from_time": self.times[t],
                    "to_time": self.times[t + 1],
                    "flows": [
                        {"source": i, "target": j, "count": len(ids), "entities": list(ids)}
                        for (i, j), ids in sorted(step.items())
                    ],
                }
                for t, step in enumerate(self.flows)
            ],
        }


def _slice_rows(cube: DataCube, t: int):
    """Entities with at least one observed indicator at time index t."""
    keep = cube.observed[:, t, :].any(axis=1)
    entities = [cube.entities[e] for e in np.flatnonzero(keep)]
    return entities, cube.values[keep, t, :], cube.observed[keep, t, :]


def train_sotm(cube: DataCube, m_units: int, sigma: float,
               epochs_per_slice: int = 10) -> SotmModel:
    """Train the chained per-slice arrays over the cube's time axis.

    Each slice runs `epochs_per_slice` batch updates at constant sigma;
    setting it to 1 gives a single batch update per time point.
    """
    if m_units < 1:
        raise SotmError("m_units must be >= 1")
    if sigma <= 0:
        raise SotmError("sigma must be > 0")
    if epochs_per_slice < 1:
        raise SotmError("epochs_per_slice must be >= 1")

    n_times = len(cube.times)
    slices = np.empty((n_times, m_units, len(cube.indicators)))
    config = TrainConfig(iterations=epochs_per_slice, sigma_final=sigma)
    coords = grid_coords(m_units, 1)
    refs = None
    for t in range(n_times):
        entities, values, observed = _slice_rows(cube, t)
        if not entities:
            raise SotmError(f"empty time slice at {cube.times[t]!r}")
        if t == 0:
            complete = values[observed.all(axis=1)]
            if complete.shape[0] < 2:
                raise SotmError(
                    "first slice needs at least 2 complete-case rows for PCA initialization"
                )
            try:
                mean, comps = _pca_basis(complete, cube.indicators, 1)
            except ValueError as err:
                raise SotmError(f"degenerate first-slice covariance: {err}") from None
            sd1, pc1 = comps[0]
            refs = mean + _axis_span(m_units)[:, None] * sd1 * pc1
        model = SomModel(m_units, 1, refs, coords, cube.indicators, config)
        for _ in range(epochs_per_slice):
            model = batch_epoch(model, values, observed, sigma)
        refs = model.refs
        slices[t] = refs
    return SotmModel(tuple(cube.times), m_units, slices, float(sigma),
                     int(epochs_per_slice), tuple(cube.indicators))


def assign_entities(model: SotmModel, cube: DataCube) -> dict[str, dict[str, int]]:
    """Per time point, each observed entity's best-matching unit in that slice."""
    if tuple(cube.times) != model.times:
        raise SotmError("cube times do not match the trained model")
    assignments: dict[str, dict[str, int]] = {}
    for t, time in enumerate(model.times):
        entities, values, observed = _slice_rows(cube, t)
        slice_model = model.slice_model(t)
        assignments[time] = {
            entity: find_bmu(values[j], observed[j], slice_model)
            for j, entity in enumerate(entities)
        }
    return assignments


def alluvial_flows(model: SotmModel, assignments: dict[str, dict[str, int]]) -> AlluvialFlows:
    """Node sizes per (time, unit) and unit-to-unit entity flows between steps."""
    times = model.times
    sizes = np.zeros((len(times), model.m_units), dtype=int)
    for t, time in enumerate(times):
        for unit in assignments.get(time, {}).values():
            sizes[t, unit] += 1
    steps = []
    for t in range(len(times) - 1):
        here, there = assignments.get(times[t], {}), assignments.get(times[t + 1], {})
        step: dict[tuple[int, int], list[str]] = {}
        for entity in sorted(here):
            if entity in there:
                step.setdefault((here[entity], there[entity]), []).append(entity)
        steps.append({pair: tuple(ids) for pair, ids in step.items()})
    return AlluvialFlows(times, sizes, tuple(steps))


def profile_coloring(model: SotmModel) -> np.ndarray:
    """Similarity coloring in [0, 1] per (time, unit).

    Every reference vector is projected on the first principal component of
    the pooled reference-vector set and rescaled min->0, max->1.  A fully
    degenerate model (all vectors identical) colors to 0.5 everywhere.
    """
    pooled = model.slices.reshape(-1, model.slices.shape[2])
    flat = np.full(pooled.shape[0], 0.5)
    try:
        mean, comps = _pca_basis(pooled, model.dim_names, 1)
    except ValueError:
        return flat.reshape(model.slices.shape[:2])
    proj = (pooled - mean) @ comps[0][1]
    lo, hi = proj.min(), proj.max()
    if hi > lo:
        flat = (proj - lo) / (hi - lo)
    return flat.reshape(model.slices.shape[:2])


def component_plane_t(model: SotmModel, indicator: Union[int, str]) -> np.ndarray:
    """One indicator's value across every (time, unit) cell."""
    if isinstance(indicator, str):
        try:
            k = model.dim_names.index(indicator)
        except ValueError:
            raise SotmError(f"unknown indicator {indicator!r}") from None
    else:
        k = indicator
        if not 0 <= k < model.slices.shape[2]:
            raise SotmError(f"indicator index {k} out of range")
    return model.slices[:, :, k].copy()


def structural_positions(model: SotmModel) -> np.ndarray:
    """Vertical unit positions distorted by data-space gaps along each chain.

    y(t, 0) = 0 and each next unit adds its Euclidean distance to the
    previous one; all chains share one scale, the longest chain spanning
    [0, 1].
    """
    t_count, m, _ = model.slices.shape
    y = np.zeros((t_count, m))
    for t in range(t_count):
        gaps = np.linalg.norm(np.diff(model.slices[t], axis=0), axis=1)
        y[t, 1:] = np.cumsum(gaps)
    peak = y.max()
    if peak > 0:
        y /= peak
    return y
