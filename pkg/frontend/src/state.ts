/** View state: the one document every interaction must keep expressible.
 *
 * The server is the token authority; the client posts a state document and
 * carries the returned token in the URL fragment.  `transform` doubles as
 * the dashboard's raw/percentile switch and the time map's grid/distorted
 * position toggle.  Event selections are `entity|start` keys.
 */

export type ViewId = "dashboard" | "ewm" | "fsm" | "fsmt" | "bim";

export const VIEW_IDS: ViewId[] = ["dashboard", "ewm", "fsm", "fsmt", "bim"];

export interface ViewState {
  view: ViewId;
  entities: string[];
  span: [string, string] | null;
  layer: string | null;
  transform: boolean;
  events: string[];
  pinned: Record<string, [number, number]>;
}

export function defaultState(view: ViewId = "dashboard"): ViewState {
  return { view, entities: [], span: null, layer: null, transform: false,
           events: [], pinned: {} };
}

export function stateFromDocument(doc: Record<string, unknown>): ViewState {
  const view = (doc.view as ViewId) ?? "dashboard";
  if (!VIEW_IDS.includes(view)) throw new Error(`unknown view ${String(doc.view)}`);
  const span = doc.span as [string, string] | null | undefined;
  const pinned: Record<string, [number, number]> = {};
  for (const [node, xy] of Object.entries((doc.pinned as object) ?? {})) {
    const pair = xy as [number, number];
    pinned[node] = [Number(pair[0]), Number(pair[1])];
  }
  return {
    view,
    entities: ((doc.entities as string[]) ?? []).map(String),
    span: span ? [String(span[0]), String(span[1])] : null,
    layer: doc.layer == null ? null : String(doc.layer),
    transform: Boolean(doc.transform),
    events: ((doc.events as string[]) ?? []).map(String),
    pinned,
  };
}

export function stateDocument(state: ViewState): Record<string, unknown> {
  const pinned: Record<string, [number, number]> = {};
  for (const node of Object.keys(state.pinned).sort()) {
    const [x, y] = state.pinned[node];
    pinned[node] = [Math.round(x * 100) / 100, Math.round(y * 100) / 100];
  }
  return {
    entities: [...state.entities],
    events: [...state.events],
    layer: state.layer,
    pinned,
    span: state.span ? [...state.span] : null,
    transform: state.transform,
    view: state.view,
  };
}

export function eventKey(entity: string, start: string): string {
  return `${entity}|${start}`;
}

export function toggle(list: string[], item: string): string[] {
  return list.includes(item) ? list.filter((x) => x !== item) : [...list, item];
}
