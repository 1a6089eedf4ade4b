"""Configurable early-warning scoring over cube indicators.

A pooled logistic model on percentile-scaled indicators: the linear score
decomposes exactly into named indicator-group contributions plus the bias,
and the logistic link turns it into a vulnerability probability.  Fitting
is plain full-batch gradient ascent with an L2 penalty on the weights,
deterministic from zero initialization.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import expit

from visrisk.datacube import DataCube, pool_panel


class EwmError(ValueError):
    """Raised on inconsistent group/weight configuration or unusable data."""


@dataclass(frozen=True)
class EwmModel:
    """Named indicator groups, per-indicator weights, bias, logistic link."""

    groups: tuple[tuple[str, tuple[str, ...]], ...]   # ordered (name, members)
    weights: dict[str, float]
    bias: float

    def __post_init__(self):
        seen: set[str] = set()
        for name, members in self.groups:
            for m in members:
                if m in seen:
                    raise EwmError(f"indicator {m!r} assigned to more than one group")
                seen.add(m)
        if seen != set(self.weights):
            missing = seen.symmetric_difference(self.weights)
            raise EwmError(f"groups and weights disagree on indicators: {sorted(missing)}")
        for k, w in self.weights.items():
            if not np.isfinite(w):
                raise EwmError(f"non-finite weight for {k!r}")

    @property
    def indicators(self) -> tuple[str, ...]:
        return tuple(m for _, members in self.groups for m in members)

    def to_dict(self) -> dict:
        return {
            "groups": {name: list(members) for name, members in self.groups},
            "group_order": [name for name, _ in self.groups],
            "weights": dict(self.weights),
            "bias": self.bias,
        }

    @staticmethod
    def from_dict(doc: dict) -> "EwmModel":
        order = doc.get("group_order") or sorted(doc["groups"])
        groups = tuple((name, tuple(doc["groups"][name])) for name in order)
        return EwmModel(groups, {k: float(v) for k, v in doc["weights"].items()},
                        float(doc["bias"]))


@dataclass(frozen=True)
class RiskRow:
    entity: str
    time: str
    score: float
    probability: float
    contributions: dict[str, float]


@dataclass(frozen=True)
class RiskSeries:
    """Scored (entity, time) rows plus the rows skipped for missing inputs."""

    group_names: tuple[str, ...]
    rows: tuple[RiskRow, ...]
    skipped: tuple[tuple[str, str, tuple[str, ...]], ...]   # (entity, time, missing)

    def to_dict(self) -> dict:
        return {
            "groups": list(self.group_names),
            "rows": [
                {
                    "entity": r.entity,
                    "time": r.time,
                    "score": r.score,
                    "probability": r.probability,
                    "contributions": r.contributions,
                }
                for r in self.rows
            ],
            "skipped": [
                {"entity": e, "time": t, "missing": list(miss)}
                for e, t, miss in self.skipped
            ],
        }


def score(model: EwmModel, cube: DataCube) -> RiskSeries:
    """Score every (entity, time) row of a percentile-transformed cube.

    score = bias + sum of group contributions, each contribution summing
    w_k * x_k / 100 over the group's indicators in group order, so the
    decomposition identity is exact by construction.  Rows missing any
    model indicator are skipped and flagged.
    """
    for k in model.indicators:
        if k not in cube.indicators:
            raise EwmError(f"model indicator {k!r} absent from cube")
    k_idx = {k: cube.indicators.index(k) for k in model.indicators}
    rows = []
    skipped = []
    for pooled in pool_panel(cube):
        missing = tuple(k for k in model.indicators if not pooled.observed[k_idx[k]])
        if missing:
            skipped.append((pooled.entity, pooled.time, missing))
            continue
        contributions = {}
        total = model.bias
        for name, members in model.groups:
            c = 0.0
            for k in members:
                c += model.weights[k] * pooled.values[k_idx[k]] / 100.0
            contributions[name] = c
            total += c
        rows.append(RiskRow(pooled.entity, pooled.time, total,
                            float(expit(total)), contributions))
    return RiskSeries(tuple(name for name, _ in model.groups), tuple(rows), tuple(skipped))


@dataclass(frozen=True)
class FitConfig:
    learning_rate: float = 0.5
    iterations: int = 2000
    l2: float = 0.0


def log_likelihood(features: np.ndarray, labels: np.ndarray,
                   weights: np.ndarray, bias: float, l2: float) -> float:
    """Mean penalized log-likelihood; the objective gradient ascent climbs."""
    s = features @ weights + bias
    ll = -(labels * np.logaddexp(0.0, -s) + (1 - labels) * np.logaddexp(0.0, s)).mean()
    return float(ll - 0.5 * l2 * (weights ** 2).sum())


def gradient(features: np.ndarray, labels: np.ndarray,
             weights: np.ndarray, bias: float, l2: float) -> tuple[np.ndarray, float]:
    """Analytic gradient of `log_likelihood` in (weights, bias)."""
    resid = labels - expit(features @ weights + bias)
    g_w = features.T @ resid / features.shape[0] - l2 * weights
    g_b = float(resid.mean())
    return g_w, g_b


def fit(cube: DataCube, labels: dict[tuple[str, str], int],
        config: Optional[FitConfig] = None,
        groups: Optional[dict[str, Sequence[str]]] = None) -> EwmModel:
    """Fit logistic weights on the cube's percentile-scaled indicators.

    `labels` maps (entity, time) to 0/1; only labeled rows observing every
    model indicator enter the fit.  Needs at least one row of each class.
    A warning is emitted when weights blow up at the iteration cap, the
    signature of perfectly separable data with no penalty.
    """
    config = config or FitConfig()
    if groups is None:
        groups = {"all": list(cube.indicators)}
    ordered = tuple((name, tuple(members)) for name, members in groups.items())
    indicator_list = [m for _, members in ordered for m in members]
    for k in indicator_list:
        if k not in cube.indicators:
            raise EwmError(f"model indicator {k!r} absent from cube")
    col = [cube.indicators.index(k) for k in indicator_list]

    feats, ys = [], []
    for pooled in pool_panel(cube):
        y = labels.get((pooled.entity, pooled.time))
        if y is None:
            continue
        if not all(pooled.observed[c] for c in col):
            continue
        feats.append(pooled.values[col] / 100.0)
        ys.append(int(y))
    if not feats:
        raise EwmError("no labeled rows with complete model indicators")
    features = np.stack(feats)
    y_arr = np.asarray(ys, dtype=float)
    if y_arr.min() == y_arr.max():
        raise EwmError("need at least one positive and one negative labeled row")

    w = np.zeros(features.shape[1])
    b = 0.0
    for _ in range(config.iterations):
        g_w, g_b = gradient(features, y_arr, w, b, config.l2)
        w += config.learning_rate * g_w
        b += config.learning_rate * g_b
    if np.abs(w).max() > 15.0:
        warnings.warn(
            "weights still growing at the iteration cap; data may be perfectly "
            "separable (consider l2 > 0)", RuntimeWarning,
        )
    weights = {k: float(w[i]) for i, k in enumerate(indicator_list)}
    return EwmModel(ordered, weights, float(b))
