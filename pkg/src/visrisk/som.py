"""Batch self-organizing map over a rectangular grid.

Data and dimension reduction in one step: reference vectors quantize the
input distribution while the fixed grid keeps similar profiles adjacent.
Missing components are handled throughout by a masked Euclidean distance
(scaled by sqrt(n / observed)) and by component-wise batch updates that
only average rows observing that component.  The whole pipeline is
deterministic: PCA initialization, linear radius decay, index-order
tie-breaks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np


class SomError(ValueError):
    """Raised on degenerate training data or invalid queries."""


@dataclass(frozen=True)
class TrainConfig:
    iterations: int = 40
    sigma_final: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise SomError("iterations must be >= 1")
        if self.sigma_final <= 0:
            raise SomError("sigma_final must be > 0")


@dataclass(frozen=True)
class StateLayer:
    """Per-unit class-probability field derived from labeled data."""

    classes: tuple[str, ...]
    probabilities: np.ndarray   # (M, C), rows sum to 1
    partition: np.ndarray       # (M,) argmax class index
    empty_units: np.ndarray     # (M,) bool, True where inherited

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "probabilities": self.probabilities.tolist(),
            "partition": self.partition.tolist(),
            "empty_units": self.empty_units.tolist(),
        }


@dataclass(frozen=True)
class SomModel:
    """Rectangular grid of reference vectors with unit lattice coordinates.

    Unit i lives at ``coords[i] = (col, row)`` with ``i = row * x + col``
    (row-major); ``refs[i]`` is its prototype in data space.
    """

    x: int
    y: int
    refs: np.ndarray        # (M, n) float64
    coords: np.ndarray      # (M, 2) float64 lattice points
    dim_names: tuple[str, ...]
    config: TrainConfig

    @property
    def n_units(self) -> int:
        return self.x * self.y

    @property
    def n_dims(self) -> int:
        return self.refs.shape[1]

    def grid_distances(self) -> np.ndarray:
        """Pairwise Euclidean distance between unit coordinates, (M, M)."""
        d = self.coords[:, None, :] - self.coords[None, :, :]
        return np.sqrt((d ** 2).sum(axis=2))

    def to_dict(self, state: Optional[StateLayer] = None) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "dim_names": list(self.dim_names),
            "refs": self.refs.tolist(),
            "config": {
                "iterations": self.config.iterations,
                "sigma_final": self.config.sigma_final,
                "seed": self.config.seed,
            },
            "state_layer": state.to_dict() if state is not None else None,
        }

    @staticmethod
    def from_dict(doc: dict) -> tuple["SomModel", Optional[StateLayer]]:
        config = TrainConfig(**doc["config"])
        x, y = int(doc["x"]), int(doc["y"])
        model = SomModel(
            x, y, np.asarray(doc["refs"], dtype=float), grid_coords(x, y),
            tuple(doc["dim_names"]), config,
        )
        state = None
        if doc.get("state_layer"):
            s = doc["state_layer"]
            state = StateLayer(
                tuple(s["classes"]),
                np.asarray(s["probabilities"], dtype=float),
                np.asarray(s["partition"], dtype=int),
                np.asarray(s["empty_units"], dtype=bool),
            )
        return model, state


def grid_coords(x: int, y: int) -> np.ndarray:
    """Lattice coordinates (col, row) for a row-major x-by-y grid."""
    cols, rows = np.meshgrid(np.arange(x), np.arange(y))
    return np.column_stack([cols.ravel(), rows.ravel()]).astype(float)


def masked_sq_distances(values: np.ndarray, observed: np.ndarray, refs: np.ndarray,
                        chunk: int = 512) -> np.ndarray:
    """Unscaled squared distance over observed components, rows x units.

    The sqrt(n / observed) scale factor is constant per row, so it never
    affects which unit wins; it is applied only where true distances are
    reported.
    """
    n_rows = values.shape[0]
    out = np.empty((n_rows, refs.shape[0]))
    for start in range(0, n_rows, chunk):
        stop = min(start + chunk, n_rows)
        diff = values[start:stop, None, :] - refs[None, :, :]
        out[start:stop] = (diff ** 2 * observed[start:stop, None, :]).sum(axis=2)
    return out


def masked_distance(x: np.ndarray, mask: np.ndarray, ref: np.ndarray) -> float:
    """Euclidean distance over observed components, scaled by sqrt(n / observed)."""
    p = int(mask.sum())
    if p == 0:
        raise SomError("vector has no observed components")
    n = x.shape[0]
    sq = float((((x - ref) ** 2) * mask).sum())
    return np.sqrt(sq * n / p)


def find_bmu(x: np.ndarray, mask: np.ndarray, model: SomModel) -> int:
    """Index of the best-matching unit; ties go to the lowest unit index."""
    if not mask.any():
        raise SomError("vector has no observed components")
    d2 = masked_sq_distances(x[None, :], mask[None, :], model.refs)[0]
    return int(np.argmin(d2))


def neighborhood(d_r: np.ndarray, sigma: float) -> np.ndarray:
    """Gaussian grid-distance weighting, exp(-d_r^2 / (2 sigma^2))."""
    if sigma <= 0:
        raise SomError("sigma must be > 0")
    return np.exp(-np.asarray(d_r, dtype=float) ** 2 / (2.0 * sigma ** 2))


def radius_schedule(t: int, iterations: int, x: int, y: int, sigma_final: float) -> float:
    """Linear decay from half the grid diagonal down to sigma_final.

    t is 1-based; with a single iteration the radius is sigma_final
    outright.
    """
    if not 1 <= t <= iterations:
        raise SomError(f"iteration {t} outside 1..{iterations}")
    sigma0 = np.sqrt(x ** 2 + y ** 2) / 2.0
    if iterations == 1:
        return float(sigma_final)
    frac = (t - 1) / (iterations - 1)
    return float(sigma0 + (sigma_final - sigma0) * frac)


def _pca_basis(complete: np.ndarray, dim_names: Sequence[str], n_components: int):
    """Mean, eigenvalue-scaled directions for the leading principal components."""
    mean = complete.mean(axis=0)
    cov = np.cov(complete, rowvar=False, ddof=1)
    cov = np.atleast_2d(cov)
    eigvals, eigvecs = np.linalg.eigh(cov)
    eigvals = np.clip(eigvals, 0.0, None)
    order = np.argsort(eigvals)[::-1]
    eigvals, eigvecs = eigvals[order], eigvecs[:, order]
    if eigvals[0] <= 1e-12 * (1.0 + float(np.trace(cov))):
        variances = np.diag(cov)
        degenerate = int(np.argmin(variances))
        raise SomError(
            f"zero covariance: indicator {dim_names[degenerate]!r} (and all others) is constant"
        )
    components = []
    for c in range(n_components):
        vec = eigvecs[:, c].copy()
        # sign fixed so the largest-magnitude entry is positive
        peak = int(np.argmax(np.abs(vec)))
        if vec[peak] < 0:
            vec = -vec
        components.append((np.sqrt(eigvals[c]), vec))
    return mean, components


def _axis_span(count: int) -> np.ndarray:
    if count == 1:
        return np.zeros(1)
    return np.linspace(-2.0, 2.0, count)


def pca_init(values: np.ndarray, observed: np.ndarray, x: int, y: int,
             dim_names: Sequence[str], config: TrainConfig) -> SomModel:
    """Lay reference vectors on the plane of the first two principal components.

    The grid spans +/-2 standard deviations along each component, with the
    first component on the longer grid axis (columns when square).  Uses
    complete-case rows only; requires at least two of them.
    """
    if values.shape[1] < 2:
        raise SomError("need at least 2 indicators for PCA initialization")
    complete = values[observed.all(axis=1)]
    if complete.shape[0] < 2:
        raise SomError(
            f"need at least 2 complete-case rows for PCA initialization, got {complete.shape[0]}"
        )
    mean, comps = _pca_basis(complete, dim_names, 2)
    (sd1, pc1), (sd2, pc2) = comps
    col_span, row_span = _axis_span(x), _axis_span(y)
    coords = grid_coords(x, y)
    refs = np.empty((x * y, values.shape[1]))
    for i, (col, row) in enumerate(coords):
        if x >= y:
            u1, u2 = col_span[int(col)], row_span[int(row)]
        else:
            u1, u2 = row_span[int(row)], col_span[int(col)]
        refs[i] = mean + u1 * sd1 * pc1 + u2 * sd2 * pc2
    return SomModel(x, y, refs, coords, tuple(dim_names), config)


def batch_epoch(model: SomModel, values: np.ndarray, observed: np.ndarray,
                sigma: float, hard_assignment: bool = False) -> SomModel:
    """One batch update: every unit moves to its neighborhood-weighted mean.

    BMUs are matched against the pre-update model.  Component-wise, both the
    numerator and denominator only include rows that observe the component;
    a unit keeps its previous value for components with a zero denominator.
    With hard_assignment the neighborhood collapses to the indicator
    function and the step is exactly a Lloyd k-means iteration.
    """
    if values.shape[0] == 0:
        return model
    if not observed.any(axis=1).all():
        raise SomError("every row needs at least one observed component")
    d2 = masked_sq_distances(values, observed, model.refs)
    bmus = np.argmin(d2, axis=1)
    if hard_assignment:
        h_units = np.eye(model.n_units)
    else:
        h_units = neighborhood(model.grid_distances(), sigma)
    weights = h_units[:, bmus]                      # (M, N)
    num = weights @ (values * observed)
    den = weights @ observed.astype(float)
    refs = np.where(den > 0, np.divide(num, den, out=np.zeros_like(num), where=den > 0),
                    model.refs)
    return replace(model, refs=refs)


def train(values: np.ndarray, observed: np.ndarray, x: int, y: int,
          dim_names: Sequence[str], config: Optional[TrainConfig] = None) -> SomModel:
    """PCA init followed by `iterations` batch epochs on a shrinking radius."""
    config = config or TrainConfig()
    model = pca_init(values, observed, x, y, dim_names, config)
    for t in range(1, config.iterations + 1):
        sigma = radius_schedule(t, config.iterations, x, y, config.sigma_final)
        model = batch_epoch(model, values, observed, sigma)
    return model


def project_trajectory(model: SomModel, values: np.ndarray,
                       observed: np.ndarray) -> list[tuple[float, float]]:
    """Grid coordinates of each row's BMU, in row order; duplicates retained."""
    coords = []
    for j in range(values.shape[0]):
        b = find_bmu(values[j], observed[j], model)
        coords.append((float(model.coords[b, 0]), float(model.coords[b, 1])))
    return coords


def component_plane(model: SomModel, indicator: Union[int, str]) -> np.ndarray:
    """One indicator's value across all units (row-major)."""
    if isinstance(indicator, str):
        try:
            k = model.dim_names.index(indicator)
        except ValueError:
            raise SomError(f"unknown indicator {indicator!r}") from None
    else:
        k = indicator
        if not 0 <= k < model.n_dims:
            raise SomError(f"indicator index {k} out of range")
    return model.refs[:, k].copy()


def state_layer(model: SomModel, values: np.ndarray, observed: np.ndarray,
                labels: Sequence[str]) -> StateLayer:
    """Class frequencies among the rows mapped to each unit.

    Units that receive no rows inherit the distribution of the nearest
    non-empty unit by grid distance (lowest index on ties).
    """
    if len(labels) == 0:
        raise SomError("need at least one labeled row")
    classes = tuple(sorted(set(labels)))
    class_idx = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((model.n_units, len(classes)))
    for j in range(values.shape[0]):
        b = find_bmu(values[j], observed[j], model)
        counts[b, class_idx[labels[j]]] += 1
    totals = counts.sum(axis=1)
    empty = totals == 0
    probs = np.zeros_like(counts)
    probs[~empty] = counts[~empty] / totals[~empty, None]
    if empty.any():
        grid_d = model.grid_distances()
        non_empty = np.flatnonzero(~empty)
        if non_empty.size == 0:
            raise SomError("no unit received any labeled row")
        for i in np.flatnonzero(empty):
            nearest = non_empty[np.argmin(grid_d[i, non_empty])]
            probs[i] = probs[nearest]
    partition = np.argmax(probs, axis=1)
    return StateLayer(classes, probs, partition, empty)


def quantization_error(model: SomModel, values: np.ndarray, observed: np.ndarray) -> float:
    """Mean masked distance from each row to its BMU."""
    if values.shape[0] == 0:
        return 0.0
    d2 = masked_sq_distances(values, observed, model.refs)
    best = d2.min(axis=1)
    n = values.shape[1]
    scale = n / observed.sum(axis=1)
    return float(np.mean(np.sqrt(best * scale)))
