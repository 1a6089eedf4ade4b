/** Wire types for the workspace API. */

export interface MetaPayload {
  version: string;
  entities: string[];
  times: string[];
  indicators: string[];
  n_events: number;
  has: { som: boolean; sotm: boolean; network: boolean; ewm: boolean };
  views: string[];
}

export interface PanelPayload {
  indicator: string;
  transform: string;
  entities: string[];
  times: string[];
  values: (number | null)[][];
}

export interface EventPayload {
  entity: string;
  start: string;
  end: string | null;
  label: string;
}

export interface StateLayerPayload {
  classes: string[];
  probabilities: number[][];
  partition: number[];
  empty_units: boolean[];
}

export interface SomPayload {
  x: number;
  y: number;
  dim_names: string[];
  refs: number[][];
  state_layer: StateLayerPayload | null;
  transform: string;
}

export interface PlanePayload {
  indicator: string;
  values: number[];
}

export interface TrajectoryPayload {
  entity: string;
  times: string[];
  coords: [number, number][];
}

export interface FlowPayload {
  source: number;
  target: number;
  count: number;
  entities: string[];
}

export interface SotmPayload {
  times: string[];
  m: number;
  coloring: number[][];
  structural_positions: number[][];
  flows: {
    node_sizes: number[][];
    transitions: { from_time: string; to_time: string; flows: FlowPayload[] }[];
  };
  assignments: Record<string, Record<string, number>>;
}

export interface NetworkNode {
  id: string;
  count: number;
  x: number;
  y: number;
  distress_share: number;
}

export interface NetworkEdge {
  a: string;
  b: string;
  count: number;
  darkness: number;
}

export interface NetworkPayload {
  window: [string | null, string | null];
  nodes: NetworkNode[];
  edges: NetworkEdge[];
}

export interface RelaxPayload {
  window: [string | null, string | null];
  positions: Record<string, [number, number]>;
}

export interface RiskRowPayload {
  entity: string;
  time: string;
  score: number;
  probability: number;
  contributions: Record<string, number>;
}

export interface RiskPayload {
  groups: string[];
  rows: RiskRowPayload[];
}
