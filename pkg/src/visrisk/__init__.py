"""Compute core of the VisRisk platform.

Ingests a four-dimensional macroprudential data cube (entities x time x
indicators, plus per-time interlinkage matrices), trains self-organizing
maps over pooled panels and per-time-slice arrays, builds entity
co-occurrence networks with force-directed layouts, scores a configurable
early-warning model, and serves everything as JSON to an interactive
frontend.
"""

from visrisk.datacube import (
    CubeError,
    CubeSlice,
    DataCube,
    EventRecord,
    ingest_events,
    ingest_links,
    ingest_observations,
    percentile_transform,
    pool_panel,
)
from visrisk.som import SomModel, TrainConfig, train
from visrisk.sotm import SotmModel, train_sotm
from visrisk.network import CooccurrenceNetwork, OccurrenceRecord, build_cooccurrence, fr_layout
from visrisk.ewm import EwmModel, RiskSeries, score

__all__ = [
    "CubeError",
    "CubeSlice",
    "DataCube",
    "EventRecord",
    "ingest_events",
    "ingest_links",
    "ingest_observations",
    "percentile_transform",
    "pool_panel",
    "SomModel",
    "TrainConfig",
    "train",
    "SotmModel",
    "train_sotm",
    "CooccurrenceNetwork",
    "OccurrenceRecord",
    "build_cooccurrence",
    "fr_layout",
    "EwmModel",
    "RiskSeries",
    "score",
]

__version__ = "0.1.0"
