"""Batch entry points: the full pipeline, headless.

Each command reads its inputs (CSV sources named by the config, JSON
artifacts left by earlier commands), writes one JSON artifact into the
data directory, and exits 0.  Artifacts on disk are the only coupling
between commands, so any stage can be rerun alone.  Errors print a single
machine-parseable JSON line on stderr; exit codes: 0 ok, 2 usage, 3 data
error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from visrisk import som as som_ops
from visrisk import sotm as sotm_ops
from visrisk.datacube import (
    CubeError,
    DataCube,
    percentile_transform,
    pool_panel,
    pooled_arrays,
    read_events_csv,
    read_links_csv,
    read_observations_csv,
)
from visrisk.ewm import EwmError, EwmModel, FitConfig, fit, score
from visrisk.network import (
    NetworkError,
    build_cooccurrence,
    distress_share,
    fr_layout,
    layout_to_dict,
    read_occurrences_csv,
)
from visrisk.som import SomError, TrainConfig
from visrisk.sotm import SotmError
from visrisk.state import StateError, ViewState, decode_state
from visrisk.workspace import (
    BadRequest,
    NotFound,
    PipelineConfig,
    WorkspaceHolder,
    build_workspace,
    load_config,
    read_label_csv,
)

DATA_ERRORS = (CubeError, NetworkError, EwmError, StateError, NotFound, BadRequest,
               FileNotFoundError, json.JSONDecodeError, KeyError)
NUMERIC_ERRORS = (SomError, SotmError, np.linalg.LinAlgError, FloatingPointError,
                  OverflowError, ZeroDivisionError)


def _write_artifact(data_dir: Path, name: str, doc) -> Path:
    data_dir.mkdir(parents=True, exist_ok=True)
    path = data_dir / name
    path.write_text(json.dumps(doc, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _load_cube(data_dir: Path) -> DataCube:
    path = data_dir / "cube.json"
    if not path.exists():
        raise CubeError(f"no cube artifact at {path}; run ingest first")
    return DataCube.from_dict(json.loads(path.read_text(encoding="utf-8")))


def _transformed(cube: DataCube, transform: str) -> DataCube:
    if transform == "percentile":
        return percentile_transform(cube)
    if transform == "raw":
        return cube
    raise CubeError(f"unknown transform {transform!r} in config")


def run_ingest(config: PipelineConfig, data_dir: Path) -> None:
    if not config.observations:
        raise CubeError("config has no observations path")
    cube = read_observations_csv(config.observations)
    if config.links:
        cube = read_links_csv(config.links, cube)
    _write_artifact(data_dir, "cube.json", cube.to_dict())
    events = read_events_csv(config.events) if config.events else []
    _write_artifact(data_dir, "events.json", [
        {"entity": e.entity, "start": e.start, "end": e.end, "label": e.label}
        for e in events
    ])
    print(f"ingested cube {len(cube.entities)}x{len(cube.times)}x{len(cube.indicators)}, "
          f"{len(events)} events")


def run_train_som(config: PipelineConfig, data_dir: Path) -> None:
    cube = _transformed(_load_cube(data_dir), config.som.transform)
    rows = pool_panel(cube)
    values, observed = pooled_arrays(rows)
    train_config = TrainConfig(iterations=config.som.iterations,
                               sigma_final=config.som.sigma_final)
    model = som_ops.train(values, observed, config.som.x, config.som.y,
                          cube.indicators, train_config)
    state = None
    if config.states:
        wanted = {(e, t): label for e, t, label in read_label_csv(config.states)}
        labeled = [(r.values, r.observed, wanted[(r.entity, r.time)])
                   for r in rows if (r.entity, r.time) in wanted]
        if labeled:
            lv = np.stack([v for v, _, _ in labeled])
            lo = np.stack([o for _, o, _ in labeled])
            state = som_ops.state_layer(model, lv, lo, [s for _, _, s in labeled])
    doc = model.to_dict(state)
    doc["transform"] = config.som.transform
    doc["quantization_error"] = som_ops.quantization_error(model, values, observed)
    _write_artifact(data_dir, "som.json", doc)
    print(f"trained {config.som.x}x{config.som.y} map on {len(rows)} rows, "
          f"qe={doc['quantization_error']:.4f}")


def run_train_sotm(config: PipelineConfig, data_dir: Path) -> None:
    cube = _transformed(_load_cube(data_dir), config.sotm.transform)
    model = sotm_ops.train_sotm(cube, config.sotm.units, config.sotm.sigma,
                                config.sotm.epochs_per_slice)
    assignments = sotm_ops.assign_entities(model, cube)
    flows = sotm_ops.alluvial_flows(model, assignments)
    doc = model.to_dict()
    doc["transform"] = config.sotm.transform
    doc["coloring"] = sotm_ops.profile_coloring(model).tolist()
    doc["structural_positions"] = sotm_ops.structural_positions(model).tolist()
    doc["flows"] = flows.to_dict()
    doc["assignments"] = assignments
    _write_artifact(data_dir, "sotm.json", doc)
    print(f"trained time map: {len(model.times)} slices x {model.m_units} units")


def run_network(config: PipelineConfig, data_dir: Path) -> None:
    if not config.occurrences:
        raise NetworkError("config has no occurrences path")
    records = read_occurrences_csv(config.occurrences)
    net = build_cooccurrence(records)
    if not net.nodes:
        raise NetworkError("occurrence corpus is empty")
    settings = config.network
    layout = fr_layout(net, settings.width, settings.height,
                       settings.iterations, settings.seed)
    shares = {node: distress_share(records, node, config.distress_terms)
              for node in net.nodes}
    _write_artifact(data_dir, "network.json", layout_to_dict(net, layout, shares))
    print(f"built network: {len(net.nodes)} nodes, {len(net.edges)} edges")


def _config_model(config: PipelineConfig) -> EwmModel:
    if not config.ewm_groups or config.ewm_weights is None:
        raise EwmError("config has no inline model (groups + weights) and no fit artifact")
    groups = tuple((name, tuple(members)) for name, members in config.ewm_groups.items())
    return EwmModel(groups, {k: float(v) for k, v in config.ewm_weights.items()},
                    config.ewm_bias)


def run_ewm_fit(config: PipelineConfig, data_dir: Path) -> None:
    if not config.labels:
        raise EwmError("config has no labels path")
    cube = percentile_transform(_load_cube(data_dir))
    labels = {
        (e, t): int(v) for e, t, v in read_label_csv(config.labels)
    }
    model = fit(cube, labels, FitConfig(**config.ewm_fit),
                groups=config.ewm_groups or None)
    _write_artifact(data_dir, "ewm.json", model.to_dict())
    print(f"fitted model on {len(labels)} labels, bias={model.bias:.3f}")


def run_ewm_score(config: PipelineConfig, data_dir: Path) -> None:
    cube = percentile_transform(_load_cube(data_dir))
    ewm_path = data_dir / "ewm.json"
    if ewm_path.exists():
        model = EwmModel.from_dict(json.loads(ewm_path.read_text(encoding="utf-8")))
    else:
        model = _config_model(config)
        _write_artifact(data_dir, "ewm.json", model.to_dict())
    series = score(model, cube)
    _write_artifact(data_dir, "risk.json", series.to_dict())
    print(f"scored {len(series.rows)} rows ({len(series.skipped)} skipped)")


def run_serve(config: PipelineConfig, data_dir: Path, host: str, port: int) -> None:
    from visrisk.server import serve

    holder = WorkspaceHolder(build_workspace(data_dir, config))
    print(f"serving workspace {holder.current.version} on http://{host}:{port}")
    serve(holder, host=host, port=port)


def run_export(config: PipelineConfig, data_dir: Path, view: str,
               token: str | None, out: Path | None) -> None:
    from visrisk import svg_export

    ws = build_workspace(data_dir, config)
    state = decode_state(token) if token else ViewState(view=view)
    svg = svg_export.render_view(ws, view, state)
    out = out or Path(f"{view}.svg")
    out.write_text(svg, encoding="utf-8")
    print(f"wrote {out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="visrisk", description="macroprudential visualization pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="pipeline config (JSON)")
        p.add_argument("--data-dir", default="artifacts", help="artifact directory")

    for name, doc in [
        ("ingest", "read observation/link/event CSVs into cube artifacts"),
        ("train-som", "train the stability map from the cube artifact"),
        ("train-sotm", "train the per-quarter time map"),
        ("network", "build the co-occurrence network and its layout"),
        ("ewm-fit", "fit early-warning weights from labels"),
        ("ewm-score", "score the early-warning model over the cube"),
    ]:
        common(sub.add_parser(name, help=doc))

    serve_p = sub.add_parser("serve", help="serve the workspace over HTTP")
    common(serve_p)
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8700)

    export_p = sub.add_parser("export", help="render a view to a static SVG")
    export_p.add_argument("view", choices=["dashboard", "ewm", "fsm", "fsmt", "bim"])
    common(export_p)
    export_p.add_argument("--state", help="permalink token")
    export_p.add_argument("--out", type=Path)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        data_dir = Path(args.data_dir)
        if args.command == "ingest":
            run_ingest(config, data_dir)
        elif args.command == "train-som":
            run_train_som(config, data_dir)
        elif args.command == "train-sotm":
            run_train_sotm(config, data_dir)
        elif args.command == "network":
            run_network(config, data_dir)
        elif args.command == "ewm-fit":
            run_ewm_fit(config, data_dir)
        elif args.command == "ewm-score":
            run_ewm_score(config, data_dir)
        elif args.command == "serve":
            run_serve(config, data_dir, args.host, args.port)
        elif args.command == "export":
            run_export(config, data_dir, args.view, args.state, args.out)
    except NUMERIC_ERRORS as err:
        print(json.dumps({"error": str(err), "code": 4}), file=sys.stderr)
        return 4
    except DATA_ERRORS as err:
        print(json.dumps({"error": str(err), "code": 3}), file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
