/** Shared view chrome: time brush, entity legend, tooltip. */

import { el, svg, clear } from "./dom.js";
import { linearScale } from "./scale.js";

export const BRUSH_WIDTH = 900;
export const BRUSH_HEIGHT = 26;

/**
 * Horizontal drag brush over an ordered time axis.  Commits the selected
 * [start, end] labels on mouseup; a click without drag clears the span.
 */
export function timeBrush(
  times: string[],
  span: [string, string] | null,
  onChange: (span: [string, string] | null) => void,
): SVGSVGElement {
  const root = svg("svg", {
    width: BRUSH_WIDTH, height: BRUSH_HEIGHT, class: "time-brush",
    "data-role": "time-brush",
  });
  const scale = linearScale(0, Math.max(times.length - 1, 1), 4, BRUSH_WIDTH - 4);
  root.appendChild(svg("rect", {
    x: 0, y: 8, width: BRUSH_WIDTH, height: 10, fill: "#e8e8ee", rx: 3,
  }));
  const selection = svg("rect", {
    class: "brush-selection", y: 6, height: 14, fill: "#9bb3d4",
    "fill-opacity": 0.7, rx: 3, x: 0, width: 0,
  });
  root.appendChild(selection);

  const indexAt = (pixel: number) => {
    const raw = Math.round(scale.invert(pixel));
    return Math.min(Math.max(raw, 0), times.length - 1);
  };
  const paint = (i0: number, i1: number) => {
    const [a, b] = i0 <= i1 ? [i0, i1] : [i1, i0];
    selection.setAttribute("x", String(scale(a)));
    selection.setAttribute("width", String(Math.max(scale(b) - scale(a), 2)));
  };
  if (span) {
    const i0 = times.indexOf(span[0]);
    const i1 = times.indexOf(span[1]);
    if (i0 >= 0 && i1 >= 0) paint(i0, i1);
  }

  let anchor: number | null = null;
  root.addEventListener("mousedown", (evt) => {
    const left = root.getBoundingClientRect().left;
    anchor = indexAt(evt.clientX - left);
    paint(anchor, anchor);
  });
  root.addEventListener("mousemove", (evt) => {
    if (anchor === null) return;
    const left = root.getBoundingClientRect().left;
    paint(anchor, indexAt(evt.clientX - left));
  });
  root.addEventListener("mouseup", (evt) => {
    if (anchor === null) return;
    const left = root.getBoundingClientRect().left;
    const other = indexAt(evt.clientX - left);
    const [i0, i1] = anchor <= other ? [anchor, other] : [other, anchor];
    anchor = null;
    if (i0 === i1) {
      selection.setAttribute("width", "0");
      onChange(null);
    } else {
      onChange([times[i0], times[i1]]);
    }
  });
  return root;
}

export interface LegendHooks {
  onToggle(entity: string): void;
  onHover(entity: string | null): void;
}

export function entityLegend(
  entities: string[],
  selected: string[],
  colorOf: (entity: string) => string,
  hooks: LegendHooks,
): HTMLElement {
  const list = el("div", { class: "legend", "data-role": "legend" });
  const active = selected.length ? selected : entities;
  for (const entity of entities) {
    const item = el("span", {
      class: "legend-item" + (active.includes(entity) ? "" : " deselected"),
      "data-entity": entity,
    }, entity);
    item.style.color = colorOf(entity);
    item.addEventListener("click", () => hooks.onToggle(entity));
    item.addEventListener("mouseenter", () => hooks.onHover(entity));
    item.addEventListener("mouseleave", () => hooks.onHover(null));
    list.appendChild(item);
  }
  return list;
}

export class Tooltip {
  readonly node: HTMLElement;

  constructor(parent: HTMLElement) {
    this.node = el("div", { class: "tooltip", "data-role": "tooltip" });
    this.node.style.display = "none";
    this.node.style.position = "absolute";
    parent.appendChild(this.node);
  }

  show(text: string, x: number, y: number): void {
    this.node.textContent = text;
    this.node.style.left = `${x + 12}px`;
    this.node.style.top = `${y + 12}px`;
    this.node.style.display = "block";
  }

  hide(): void {
    this.node.style.display = "none";
  }
}

export function emptyMessage(container: Element, message: string): void {
  clear(container);
  container.appendChild(el("div", { class: "empty-state" }, message));
}

/** Indices of `times` inside the span (all of them when span is null). */
export function spanIndices(times: string[], span: [string, string] | null): number[] {
  if (!span) return times.map((_, i) => i);
  const i0 = times.indexOf(span[0]);
  const i1 = times.indexOf(span[1]);
  if (i0 < 0 || i1 < 0) {
    // span labels outside this axis: fall back to lexical-chronological compare
    return times.map((_, i) => i).filter((i) => times[i] >= span[0] && times[i] <= span[1]);
  }
  return times.map((_, i) => i).filter((i) => i >= i0 && i <= i1);
}
