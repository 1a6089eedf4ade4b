/** In-memory fixture server: the API surface from canned data.
 *
 * The network endpoints are computed from a canned record set with an
 * independent co-occurrence implementation, so tests can verify that what
 * a view renders for a window matches what counting records in that
 * window must produce.  Tokens are plain base64 JSON here; the client
 * treats them as opaque either way.
 */

import { Api } from "../src/api.js";
import { ViewState } from "../src/state.js";
import {
  EventPayload,
  MetaPayload,
  NetworkPayload,
  PanelPayload,
  PlanePayload,
  RiskPayload,
  SomPayload,
  SotmPayload,
  TrajectoryPayload,
} from "../src/types.js";

export const TIMES = ["2005Q1", "2005Q2", "2005Q3", "2005Q4",
                      "2006Q1", "2006Q2", "2006Q3", "2006Q4"];
export const ENTITIES = ["DE", "JP", "US"];
export const INDICATORS = ["credit_gap", "leverage"];
export const GROUPS = ["domestic macroeconomic", "credit and asset imbalances",
                       "global imbalances"];

export interface OccurrenceRecord {
  doc: string;
  time: string;
  mentions: string[];
}

export const RECORDS: OccurrenceRecord[] = [
  { doc: "p1", time: "2005Q1", mentions: ["AlphaBank", "BetaBank"] },
  { doc: "p2", time: "2005Q2", mentions: ["AlphaBank", "GammaBank"] },
  { doc: "p3", time: "2005Q3", mentions: ["BetaBank", "GammaBank", "DeltaBank"] },
  { doc: "p4", time: "2005Q4", mentions: ["AlphaBank"] },
  { doc: "p5", time: "2006Q1", mentions: ["DeltaBank", "AlphaBank"] },
  { doc: "p6", time: "2006Q2", mentions: ["DeltaBank"] },
  { doc: "p7", time: "2006Q3", mentions: ["AlphaBank", "BetaBank"] },
  { doc: "p8", time: "2006Q4", mentions: ["EpsilonBank", "DeltaBank"] },
];

/** Independent co-occurrence counting over an inclusive window. */
export function cooccurrence(
  records: OccurrenceRecord[],
  from: string | null,
  to: string | null,
): { nodes: Map<string, number>; edges: Map<string, number> } {
  const nodes = new Map<string, number>();
  const edges = new Map<string, number>();
  for (const record of records) {
    if (from && record.time < from) continue;
    if (to && record.time > to) continue;
    const names = [...new Set(record.mentions)].sort();
    for (const name of names) nodes.set(name, (nodes.get(name) ?? 0) + 1);
    for (let i = 0; i < names.length; i++) {
      for (let j = i + 1; j < names.length; j++) {
        const key = `${names[i]}|${names[j]}`;
        edges.set(key, (edges.get(key) ?? 0) + 1);
      }
    }
  }
  return { nodes, edges };
}

function panelValues(transform: string): (number | null)[][] {
  // DE flat-ish, JP mid, US ramps up; window [t2..t5] spans a narrower range
  const raw: (number | null)[][] = [
    [12, 14, 13, 15, 14, 16, 15, 17],
    [30, 28, null, 31, 29, 30, 28, 27],
    [5, 9, 20, 35, 55, 70, 88, 99],
  ];
  if (transform !== "percentile") return raw;
  return raw.map((row) => {
    const seen = row.filter((v): v is number => v !== null).sort((a, b) => a - b);
    return row.map((v) => v === null ? null
      : (100 * seen.indexOf(v)) / Math.max(seen.length - 1, 1));
  });
}

export const EVENTS: EventPayload[] = [
  { entity: "US", start: "2006Q1", end: "2006Q4", label: "banking crisis" },
];

function riskPayload(entity: string | null): RiskPayload {
  const rows = [];
  for (const e of ENTITIES) {
    if (entity && e !== entity) continue;
    for (const [ti, t] of TIMES.entries()) {
      const base = e === "US" ? 0.1 * ti : 0.02 * ti;
      const contributions = {
        "domestic macroeconomic": Number((0.05 + base / 4).toFixed(6)),
        "credit and asset imbalances":
          e === "US" && t === "2006Q1" ? 0.23 : Number((base / 2).toFixed(6)),
        "global imbalances": Number((0.03 + base / 8).toFixed(6)),
      };
      const bias = -1.5;
      const score = bias
        + contributions["domestic macroeconomic"]
        + contributions["credit and asset imbalances"]
        + contributions["global imbalances"];
      rows.push({
        entity: e, time: t, score,
        probability: 1 / (1 + Math.exp(-score)),
        contributions,
      });
    }
  }
  return { groups: GROUPS, rows };
}

const SOM: SomPayload = {
  x: 3, y: 2, dim_names: INDICATORS,
  refs: [[0, 0], [1, 2], [2, 4], [3, 6], [4, 8], [5, 10]],
  state_layer: {
    classes: ["calm", "crisis"],
    probabilities: [[1, 0], [1, 0], [0.8, 0.2], [0.3, 0.7], [0, 1], [0, 1]],
    partition: [0, 0, 0, 1, 1, 1],
    empty_units: [false, false, false, false, false, false],
  },
  transform: "raw",
};

const TRAJECTORIES: Record<string, TrajectoryPayload> = {
  US: { entity: "US", times: TIMES,
        coords: [[0, 0], [0, 0], [1, 0], [1, 1], [2, 0], [2, 1], [2, 1], [2, 1]] },
  DE: { entity: "DE", times: TIMES.slice(0, 4),
        coords: [[0, 1], [0, 1], [1, 1], [1, 1]] },
  JP: { entity: "JP", times: TIMES,
        coords: [[0, 0], [0, 1], [0, 0], [0, 1], [0, 0], [0, 1], [0, 0], [0, 1]] },
};

const SOTM: SotmPayload = {
  times: TIMES.slice(0, 4),
  m: 2,
  coloring: [[0, 1], [0.1, 0.9], [0.2, 0.8], [0.3, 0.7]],
  structural_positions: [[0, 1], [0, 0.8], [0, 0.55], [0, 0.3]],
  flows: {
    node_sizes: [[2, 1], [1, 2], [2, 1], [2, 1]],
    transitions: [
      { from_time: "2005Q1", to_time: "2005Q2",
        flows: [{ source: 0, target: 0, count: 1, entities: ["DE"] },
                { source: 0, target: 1, count: 1, entities: ["US"] },
                { source: 1, target: 1, count: 1, entities: ["JP"] }] },
      { from_time: "2005Q2", to_time: "2005Q3",
        flows: [{ source: 0, target: 0, count: 1, entities: ["DE"] },
                { source: 1, target: 0, count: 1, entities: ["US"] },
                { source: 1, target: 1, count: 1, entities: ["JP"] }] },
      { from_time: "2005Q3", to_time: "2005Q4",
        flows: [{ source: 0, target: 0, count: 2, entities: ["DE", "US"] },
                { source: 1, target: 1, count: 1, entities: ["JP"] }] },
    ],
  },
  assignments: {
    "2005Q1": { DE: 0, US: 0, JP: 1 },
    "2005Q2": { DE: 0, US: 1, JP: 1 },
    "2005Q3": { DE: 0, US: 0, JP: 1 },
    "2005Q4": { DE: 0, US: 0, JP: 1 },
  },
};

export interface LoggedRequest {
  method: string;
  url: string;
  body: unknown;
}

export class FixtureServer {
  requests: LoggedRequest[] = [];
  /** Per-path artificial delays, for stale-response tests. */
  delays = new Map<string, number>();

  meta: MetaPayload = {
    version: "fixture",
    entities: ENTITIES,
    times: TIMES,
    indicators: INDICATORS,
    n_events: EVENTS.length,
    has: { som: true, sotm: true, network: true, ewm: true },
    views: ["dashboard", "ewm", "fsm", "fsmt", "bim"],
  };

  networkFor(from: string | null, to: string | null, seed: number): NetworkPayload {
    const { nodes, edges } = cooccurrence(RECORDS, from, to);
    const ids = [...nodes.keys()].sort();
    return {
      window: [from, to],
      nodes: ids.map((id, i) => {
        const angle = (2 * Math.PI * i) / Math.max(ids.length, 1) + seed * 0.7;
        return {
          id, count: nodes.get(id)!,
          x: 500 + 300 * Math.cos(angle),
          y: 350 + 250 * Math.sin(angle),
          distress_share: id === "DeltaBank" ? 0.75 : 0.1,
        };
      }),
      edges: [...edges.entries()].sort().map(([key, count]) => {
        const [a, b] = key.split("|");
        return { a, b, count, darkness: Math.min(1, Math.log1p(count) / Math.log1p(3)) };
      }),
    };
  }

  private route(method: string, url: string, body: unknown): unknown {
    const [path, query = ""] = url.split("?");
    const params = new URLSearchParams(query);
    if (path === "/api/meta") return this.meta;
    if (path === "/api/events") return EVENTS;
    if (path === "/api/cube/panel") {
      return {
        indicator: params.get("indicator") ?? INDICATORS[0],
        transform: params.get("transform") ?? "raw",
        entities: ENTITIES,
        times: TIMES,
        values: panelValues(params.get("transform") ?? "raw"),
      } satisfies PanelPayload;
    }
    if (path === "/api/ewm") return riskPayload(params.get("entity"));
    if (path === "/api/som") return SOM;
    if (path === "/api/som/plane") {
      const indicator = params.get("indicator") ?? INDICATORS[0];
      const k = INDICATORS.indexOf(indicator);
      return { indicator, values: SOM.refs.map((r) => r[k]) } satisfies PlanePayload;
    }
    if (path === "/api/som/trajectory") {
      const traj = TRAJECTORIES[params.get("entity") ?? ""];
      if (!traj) throw new Error("404 unknown entity");
      return traj;
    }
    if (path === "/api/sotm") return SOTM;
    if (path === "/api/network") {
      return this.networkFor(params.get("from"), params.get("to"),
        Number(params.get("seed") ?? 0));
    }
    if (path === "/api/network/relax" && method === "POST") {
      const request = body as {
        positions: Record<string, [number, number]>;
        pinned: Record<string, [number, number]>;
      };
      const positions: Record<string, [number, number]> = {};
      for (const [id, [x, y]] of Object.entries(request.positions)) {
        positions[id] = request.pinned[id]
          ? request.pinned[id]
          : [x + 17, y + 9];   // deterministic "relaxation" shift
      }
      return { window: [null, null], positions };
    }
    if (path === "/api/state" && method === "POST") {
      const token = btoa(JSON.stringify(body));
      return { token, state: body };
    }
    if (path.startsWith("/api/state/")) {
      return JSON.parse(atob(path.slice("/api/state/".length)));
    }
    throw new Error(`fixture has no route for ${method} ${url}`);
  }

  install(): Api {
    const handler = async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      const method = init?.method ?? "GET";
      const body = init?.body ? JSON.parse(String(init.body)) : null;
      this.requests.push({ method, url, body });
      const delay = this.delays.get(url.split("?")[0]);
      if (delay) await new Promise((resolve) => setTimeout(resolve, delay));
      let payload: unknown;
      try {
        payload = this.route(method, url, body);
      } catch (err) {
        return new Response(String(err), { status: 404 });
      }
      return new Response(JSON.stringify(payload), {
        status: 200, headers: { "content-type": "application/json" },
      });
    };
    globalThis.fetch = handler as typeof fetch;
    return new Api("");
  }
}

/** Drives a view like the app shell does, re-rendering on every update. */
export class Shell {
  container: HTMLElement;
  private pending: Promise<void> = Promise.resolve();

  constructor(
    private view: { render(c: HTMLElement, ctx: {
      api: Api; state: ViewState; update(p: Partial<ViewState>): void;
    }): Promise<void> },
    public state: ViewState,
    private api: Api,
  ) {
    this.container = document.createElement("div");
    document.body.appendChild(this.container);
  }

  render(): Promise<void> {
    const run = async () => {
      this.container.replaceChildren();
      await this.view.render(this.container, {
        api: this.api,
        state: this.state,
        update: (patch) => {
          this.state = { ...this.state, ...patch };
          this.pending = this.pending.then(() => run());
        },
      });
    };
    this.pending = this.pending.then(run);
    return this.pending;
  }

  /** Await all renders triggered so far (including cascades). */
  async settle(): Promise<void> {
    let last;
    do {
      last = this.pending;
      await last;
    } while (last !== this.pending);
  }

  query<T extends Element>(selector: string): T {
    const node = this.container.querySelector<T>(selector);
    if (!node) throw new Error(`no element matches ${selector}`);
    return node;
  }

  queryAll<T extends Element>(selector: string): T[] {
    return Array.from(this.container.querySelectorAll<T>(selector));
  }
}

export function mouse(type: string, options: MouseEventInit = {}): MouseEvent {
  return new MouseEvent(type, { bubbles: true, cancelable: true, ...options });
}
